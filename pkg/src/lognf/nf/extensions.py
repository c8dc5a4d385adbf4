"""Finite-index subgroups and overgroups, and extensions by a normal subgroup.

Schreier rewriting follows the coset walk of a word through a
:class:`~lognf.lang.CosetTable`; the current coset is bounded by the index,
so it lives in the finite control.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Mapping, Sequence

from ..alphabet import Alphabet, invert, invert_word, split_token
from ..errors import DivisibilityViolation, NotInSubgroup
from ..lang import Cyclic, CosetTable
from ..machine import (Compose, ConcatTape, ConstTape, InverseTape, Substitute, Transducer,
                       power, run, scan)
from ..oracles import product_word_problem
from .basic import CounterNF
from .freeprod import FreeProdNF


class SchreierRewrite(Transducer):
    """Ambient word of the subgroup -> word in the Schreier generators."""

    def __init__(self, table: CosetTable):
        self.table = table
        self.alphabet_in = table.alphabet
        self.alphabet_out = table.schreier_alphabet
        self.name = "schreier"

    def process(self, tape, ws):
        table = self.table
        coset = 0
        with ws.frame() as fr:
            for y in scan(tape, fr):
                x = table.schreier_letter(coset, y)
                if x is not None:
                    yield x
                coset = table.step(coset, y)
        if coset != 0:
            raise NotInSubgroup(f"the coset walk ends at coset {coset}, not at the subgroup")


def expander(table: CosetTable) -> Substitute:
    """Schreier generators -> their ambient words."""
    mapping = {}
    for name, word in table.schreier.items():
        mapping[name] = word
        mapping[invert(name)] = invert_word(word)
    return Substitute(mapping, table.schreier_alphabet, table.alphabet, "expand")


class SubgroupNF(Transducer):
    """Normal form of the subgroup from one of the ambient group: rewrite(h(expand(w)))."""

    def __init__(self, ambient_nf: Transducer, table: CosetTable):
        self.table = table
        self.inner = Compose(SchreierRewrite(table), Compose(ambient_nf, expander(table)))
        self.alphabet_in = self.alphabet_out = table.schreier_alphabet
        self.name = f"sub({ambient_nf.name})"

    def process(self, tape, ws):
        return self.inner.process(tape, ws)


class OvergroupNF(Transducer):
    """Normal form of the ambient group from one of the subgroup.

    ``w = (w r^-1) r`` with ``r`` the representative of the coset of ``w``;
    the first factor lies in the subgroup and is normalised there.
    """

    def __init__(self, sub_nf: Transducer, table: CosetTable):
        self.table = table
        self.inner = Compose(expander(table), Compose(sub_nf, SchreierRewrite(table)))
        self.alphabet_in = self.alphabet_out = table.alphabet
        self.name = f"super({sub_nf.name})"

    def process(self, tape, ws):
        table = self.table
        coset = 0
        with ws.frame() as fr:
            for y in scan(tape, fr):
                coset = table.step(coset, y)
            rep = table.representatives[coset]
            shifted = ConcatTape(fr, tape, ConstTape(invert_word(rep)))
            yield from self.inner.process(shifted, ws)
            yield from rep


def schreier_rewrite(word: Sequence[str], table: CosetTable) -> tuple[str, ...]:
    return run(SchreierRewrite(table), word)[0]


def nf_finite_index(direction: str, table: CosetTable, nf: Transducer) -> Transducer:
    """``sub``: subgroup normal form from the ambient ``nf``.

    ``super``: ambient normal form from a subgroup normal form ``nf`` over the
    Schreier generators.
    """
    if direction == "sub":
        return SubgroupNF(nf, table)
    if direction == "super":
        return OvergroupNF(nf, table)
    raise ValueError(f"direction must be 'sub' or 'super', not {direction!r}")


# ---------------------------------------------------------------------------
# extensions


@dataclass(frozen=True)
class ExtensionContext:
    """Data for normalising ``G`` with a normal subgroup ``N``.

    ``quotient`` is a normal form of ``G/N`` over its own alphabet,
    ``to_quotient`` sends each letter of ``G`` to a quotient word,
    ``section`` sends each quotient letter back to a ``G`` word, and
    ``kernel`` maps any ``G`` word representing an element of ``N`` to a
    unique representative of that element.
    """

    alphabet: Alphabet
    quotient: Transducer
    to_quotient: Mapping[str, Sequence[str]]
    section: Mapping[str, Sequence[str]]
    kernel: Transducer


class ExtensionNF(Transducer):
    """Writes ``b = section(quotient(to_quotient(w)))`` and then ``kernel(b^-1 w)``.

    The letters of ``b^-1`` come from replaying the first phase through the
    streaming inverter; only the length of ``b`` is stored.
    """

    def __init__(self, ctx: ExtensionContext, name: str = "extension"):
        self.ctx = ctx
        q_alpha = ctx.quotient.alphabet_out
        self.lift = Compose(
            Substitute(ctx.section, q_alpha, ctx.alphabet, "section"),
            Compose(ctx.quotient,
                    Substitute(ctx.to_quotient, ctx.alphabet, ctx.quotient.alphabet_in, "project")))
        self.alphabet_in = self.alphabet_out = ctx.alphabet
        self.name = name

    def process(self, tape, ws):
        with ws.frame() as fr:
            b = fr.stream(self.lift, tape)
            k = fr.int(0)
            for x in scan(b, fr):
                yield x
                k.set(k.v + 1)
            rest = ConcatTape(fr, InverseTape(fr, b, n=k.v), tape, n1=k.v)
            yield from self.ctx.kernel.process(rest, ws)


def extend_nf(ctx: ExtensionContext) -> Transducer:
    return ExtensionNF(ctx)


class TorusRep(Transducer):
    """``a^(m*i)`` with ``i = (sum of a-exponents)/m + (sum of b-exponents)/n``.

    Valid for words representing elements of the central subgroup
    ``<a^m> = <b^n>`` of ``<a, b | a^m = b^n>``.
    """

    def __init__(self, m: int, n: int):
        self.m, self.n = m, n
        self.alphabet_in = self.alphabet_out = Alphabet(["a", "b"])
        self.name = f"torus-rep({m},{n})"

    def process(self, tape, ws):
        with ws.frame() as fr:
            ra, sb = fr.int(0), fr.int(0)
            for x in scan(tape, fr):
                name, sign = split_token(x)
                if name == "a":
                    ra.set(ra.v + sign)
                else:
                    sb.set(sb.v + sign)
            if ra.v % self.m or sb.v % self.n:
                raise DivisibilityViolation(
                    f"exponent sums {ra.v} and {sb.v} are not divisible by {self.m} and {self.n}")
            i = fr.int(ra.v // self.m + sb.v // self.n)
            yield from power(fr, "a", self.m * i.v)


def torus_context(m: int, n: int) -> ExtensionContext:
    """``<a, b | a^m = b^n>`` over its center, with quotient ``C_m * C_n``."""
    quotient = FreeProdNF(CounterNF(Alphabet(["c"]), m), CounterNF(Alphabet(["c"]), n),
                          product_word_problem(Cyclic(m), Cyclic(n)), ([m], [n]))
    to_q = {"a": ("0.c",), "a^-1": ("0.c^-1",), "b": ("1.c",), "b^-1": ("1.c^-1",)}
    section = {v[0]: (k,) for k, v in to_q.items()}
    return ExtensionContext(Alphabet(["a", "b"]), quotient, to_q, section, TorusRep(m, n))


class TorusNF(ExtensionNF):
    def __init__(self, m: int, n: int):
        super().__init__(torus_context(m, n), f"torus({m},{n})")
        self.m, self.n = m, n


def torus_rep(word: Sequence[str], m: int, n: int) -> tuple[str, ...]:
    return run(TorusRep(m, n), word)[0]


__all__ = ["SchreierRewrite", "SubgroupNF", "OvergroupNF", "schreier_rewrite",
           "nf_finite_index", "ExtensionContext", "ExtensionNF", "extend_nf", "TorusRep",
           "torus_context", "TorusNF", "torus_rep", "expander"]
