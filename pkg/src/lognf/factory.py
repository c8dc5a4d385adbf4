"""Assemble normal-form transducers and oracles from group expressions."""
from __future__ import annotations

from typing import Mapping, Sequence

from .alphabet import Alphabet, invert, invert_word
from .errors import UnknownGenerator
from .lang import (BS, UT, Cyclic, Direct, FiniteIndex, Free, FreeProd, GroupExpr, Torus,
                   Wreath, Z)
from .machine import BUFFERED, Compose, Substitute, Transducer, run
from .nf.basic import CounterNF, DirectNF, FreeNF
from .nf.bs import BSNF
from .nf.extensions import OvergroupNF, SubgroupNF, TorusNF
from .nf.freeprod import FreeProdNF
from .nf.nilpotent import UTNF
from .nf.wreath import WreathNF
from .oracles import Oracle, oracle_for, product_word_problem


class IdentityFilter(Transducer):
    """Send the stored normal form of the identity to the empty word.

    The identity's image ``e = f(λ)`` is a fixed word kept in the finite
    control.  Output is held back while it still agrees with a prefix of
    ``e``; if the whole output turns out to equal ``e`` nothing is written.
    """

    def __init__(self, inner: Transducer):
        self.inner = inner
        self.alphabet_in = inner.alphabet_in
        self.alphabet_out = inner.alphabet_out
        self.identity_word = run(inner, (), mode=BUFFERED)[0]
        self.name = inner.name

    def process(self, tape, ws):
        e = self.identity_word
        if not e:
            yield from self.inner.process(tape, ws)
            return
        held = []
        gen = self.inner.process(tape, ws)
        for x in gen:
            if held is not None:
                held.append(x)
                if tuple(held) == e[:len(held)]:
                    continue
                yield from held
                held = None
            else:
                yield x
        if held is not None and tuple(held) != e:
            yield from held


def _orders(expr: GroupExpr) -> list[int]:
    if isinstance(expr, Cyclic):
        return [expr.order]
    return [0] * expr.alphabet.rank


def normal_form(expr: GroupExpr) -> Transducer:
    """The raw normal-form transducer for ``expr`` (identity already maps to λ)."""
    if isinstance(expr, Z):
        return CounterNF(expr.alphabet)
    if isinstance(expr, Cyclic):
        return CounterNF(expr.alphabet, expr.order)
    if isinstance(expr, Free):
        return FreeNF(expr.alphabet)
    if isinstance(expr, BS):
        return BSNF(expr.p)
    if isinstance(expr, UT):
        return UTNF(expr.rank)
    if isinstance(expr, Torus):
        return TorusNF(expr.m, expr.n)
    if isinstance(expr, Direct):
        return DirectNF(normal_form(expr.left), normal_form(expr.right))
    if isinstance(expr, Wreath):
        return WreathNF(normal_form(expr.lamp), normal_form(expr.base))
    if isinstance(expr, FreeProd):
        return FreeProdNF(normal_form(expr.left), normal_form(expr.right),
                          product_word_problem(expr.left, expr.right),
                          (_orders(expr.left), _orders(expr.right)))
    if isinstance(expr, FiniteIndex):
        sub = SubgroupNF(normal_form(expr.ambient), expr.table)
        if expr.direction == "sub":
            return sub
        return OvergroupNF(sub, expr.table)
    raise TypeError(f"cannot build {expr!r}")


def build(expr: GroupExpr) -> tuple[Transducer, Oracle]:
    """Normal-form transducer (wrapped by the identity filter) and exact oracle."""
    return IdentityFilter(normal_form(expr)), oracle_for(expr)


def change_generators(f: Transducer, substitution: Mapping[str, Sequence[str]],
                      direction: str = "add") -> Transducer:
    """Normal form over a modified generating set.

    ``add``: the new generators (keys) are expressed over ``f``'s alphabet;
    inputs over the enlarged alphabet are substituted letter by letter and
    fed to ``f``.

    ``remove``: the keys are generators of ``f``'s alphabet to drop,
    expressed over the remaining ones; outputs of ``f`` are rewritten so
    that they avoid the dropped letters.
    """
    old = f.alphabet_in
    table: dict[str, tuple[str, ...]] = {}
    for name, word in substitution.items():
        word = tuple(word)
        if direction == "add" and name in old.generators:
            raise UnknownGenerator(f"{name!r} is already a generator")
        if direction == "remove" and name not in old.generators:
            raise UnknownGenerator(f"{name!r} is not a generator of {old}")
        kept = old if direction == "add" else Alphabet(
            g for g in old.generators if g not in substitution)
        for x in word:
            if x not in kept:
                raise UnknownGenerator(f"{x!r} is not available to express {name!r}")
        table[name] = word
        table[invert(name)] = invert_word(word)
    if direction == "add":
        alphabet = old + Alphabet(substitution)
        full = {x: table.get(x, (x,)) for x in alphabet}
        return Compose(f, Substitute(full, alphabet, old, "subst"))
    if direction == "remove":
        alphabet = Alphabet(g for g in old.generators if g not in substitution)
        out = {x: table.get(x, (x,)) for x in f.alphabet_out}
        restricted = _Restricted(f, alphabet)
        return Compose(Substitute(out, f.alphabet_out, alphabet, "subst"), restricted)
    raise ValueError(f"direction must be 'add' or 'remove', not {direction!r}")


class _Restricted(Transducer):
    """``f`` on the smaller input alphabet."""

    def __init__(self, f: Transducer, alphabet: Alphabet):
        self.f = f
        self.alphabet_in = alphabet
        self.alphabet_out = f.alphabet_out
        self.name = f.name

    def process(self, tape, ws):
        return self.f.process(tape, ws)


__all__ = ["IdentityFilter", "normal_form", "build", "change_generators"]
