"""Group expressions, word syntax and coset-table files.

Grammar::

    expr := "Z" | "Free(" k ")" | "Cyclic(" m ")" | "BS(1," p ")" | "UT(" r ")"
          | "Torus(" m "," n ")"
          | ("Direct" | "Wreath" | "FreeProd") "(" expr "," expr ")"
          | "FiniteIndex(" expr "," "@" file "," ("sub" | "super") ")"

Words are whitespace separated tokens ``name``, ``name^-1``, ``name^k`` or
``name^-k``; ``λ`` and the empty string denote the empty word.
"""
from __future__ import annotations

import os
import re
from dataclasses import dataclass, field
from typing import Sequence

from .alphabet import Alphabet, free_reduce, invert, invert_word, split_token
from .errors import (ArityError, CosetTableError, GroupSyntaxError, MalformedExponent,
                     MissingOracle, NotInSubgroup, UnknownGenerator)

EMPTY_WORD = "λ"
MAX_UT_RANK = 8


# ---------------------------------------------------------------------------
# expression tree


class GroupExpr:
    """Base class of expression nodes; ``text`` is the canonical spelling."""

    @property
    def text(self) -> str:
        raise NotImplementedError

    @property
    def alphabet(self) -> Alphabet:
        raise NotImplementedError

    def __str__(self) -> str:
        return self.text


@dataclass(frozen=True)
class Z(GroupExpr):
    @property
    def text(self):
        return "Z"

    @property
    def alphabet(self):
        return Alphabet(["t"])


@dataclass(frozen=True)
class Free(GroupExpr):
    rank: int

    @property
    def text(self):
        return f"Free({self.rank})"

    @property
    def alphabet(self):
        return Alphabet(f"x{i}" for i in range(1, self.rank + 1))


@dataclass(frozen=True)
class Cyclic(GroupExpr):
    order: int

    @property
    def text(self):
        return f"Cyclic({self.order})"

    @property
    def alphabet(self):
        return Alphabet(["c"])


@dataclass(frozen=True)
class BS(GroupExpr):
    p: int

    @property
    def text(self):
        return f"BS(1,{self.p})"

    @property
    def alphabet(self):
        return Alphabet(["a", "t"])


def ut_generators(r: int) -> list[tuple[int, int]]:
    """Index pairs of UT(r) generators in superdiagonal order."""
    return [(j, j + d) for d in range(1, r) for j in range(1, r - d + 1)]


@dataclass(frozen=True)
class UT(GroupExpr):
    rank: int

    @property
    def text(self):
        return f"UT({self.rank})"

    @property
    def alphabet(self):
        return Alphabet(f"e.{i}.{j}" for i, j in ut_generators(self.rank))


@dataclass(frozen=True)
class Torus(GroupExpr):
    m: int
    n: int

    @property
    def text(self):
        return f"Torus({self.m},{self.n})"

    @property
    def alphabet(self):
        return Alphabet(["a", "b"])


@dataclass(frozen=True)
class Direct(GroupExpr):
    left: GroupExpr
    right: GroupExpr

    @property
    def text(self):
        return f"Direct({self.left.text},{self.right.text})"

    @property
    def alphabet(self):
        return self.left.alphabet.prefixed("0.") + self.right.alphabet.prefixed("1.")


@dataclass(frozen=True)
class Wreath(GroupExpr):
    lamp: GroupExpr
    base: GroupExpr

    @property
    def text(self):
        return f"Wreath({self.lamp.text},{self.base.text})"

    @property
    def alphabet(self):
        return self.lamp.alphabet.prefixed("0.") + self.base.alphabet.prefixed("1.")


@dataclass(frozen=True)
class FreeProd(GroupExpr):
    left: GroupExpr
    right: GroupExpr

    @property
    def text(self):
        return f"FreeProd({self.left.text},{self.right.text})"

    @property
    def alphabet(self):
        return self.left.alphabet.prefixed("0.") + self.right.alphabet.prefixed("1.")


@dataclass(frozen=True)
class FiniteIndex(GroupExpr):
    """A finite-index pair: ``sub`` names the subgroup, ``super`` the ambient group."""

    ambient: GroupExpr
    table: "CosetTable" = field(compare=False)
    path: str
    direction: str

    @property
    def text(self):
        return f"FiniteIndex({self.ambient.text},@{self.path},{self.direction})"

    @property
    def alphabet(self):
        if self.direction == "sub":
            return self.table.schreier_alphabet
        return self.ambient.alphabet


# ---------------------------------------------------------------------------
# coset tables


class CosetTable:
    """Right coset action of an ambient alphabet on ``d`` cosets of a subgroup.

    Coset ``0`` is the subgroup itself and its representative is the empty
    word.  Schreier generators ``r_i · y · r_j^-1`` (for ``i -y-> j``) that
    freely reduce to the empty word are dropped; the others are named
    ``x.<i>.<y>``.
    """

    def __init__(self, alphabet: Alphabet, representatives: Sequence[Sequence[str]],
                 transitions: dict[tuple[int, str], int]):
        self.alphabet = alphabet
        self.index = len(representatives)
        self.representatives = [tuple(r) for r in representatives]
        self._fwd: dict[tuple[int, str], int] = {}
        self._validate(transitions)
        self.schreier: dict[str, tuple[str, ...]] = {}
        self._edge_name: dict[tuple[int, str], str | None] = {}
        for i in range(self.index):
            for y in alphabet.generators:
                j = self._fwd[i, y]
                word = self.representatives[i] + (y,) + invert_word(self.representatives[j])
                if free_reduce(word):
                    name = f"x.{i}.{y}"
                    self.schreier[name] = word
                    self._edge_name[i, y] = name
                else:
                    self._edge_name[i, y] = None
        self.schreier_alphabet = Alphabet(self.schreier)

    def _validate(self, transitions):
        d = self.index
        if d < 1:
            raise CosetTableError("index must be at least 1")
        if self.representatives[0]:
            raise CosetTableError("the first representative must be the empty word")
        for y in self.alphabet.generators:
            images = []
            for i in range(d):
                if (i, y) not in transitions:
                    raise CosetTableError(f"missing transition for coset {i} and {y}")
                j = transitions[i, y]
                if not 0 <= j < d:
                    raise CosetTableError(f"coset {j} out of range")
                images.append(j)
            if sorted(images) != list(range(d)):
                raise CosetTableError(f"generator {y} does not act as a permutation")
            for i, j in enumerate(images):
                self._fwd[i, y] = j
                self._fwd[j, invert(y)] = i
        for i, rep in enumerate(self.representatives):
            if self.trace(rep) != i:
                raise CosetTableError(f"representative {i} does not trace to its own coset")

    def step(self, coset: int, token: str) -> int:
        return self._fwd[coset, token]

    def trace(self, word: Sequence[str], start: int = 0) -> int:
        c = start
        for x in word:
            try:
                c = self._fwd[c, x]
            except KeyError:
                raise UnknownGenerator(x) from None
        return c

    def schreier_letter(self, coset: int, token: str) -> str | None:
        """Schreier letter contributed by reading ``token`` at ``coset``."""
        name, sign = split_token(token)
        if sign > 0:
            return self._edge_name[coset, name]
        prev = self._fwd[coset, token]
        x = self._edge_name[prev, name]
        return None if x is None else invert(x)

    def rewrite(self, word: Sequence[str]) -> tuple[str, ...]:
        """Exact (unmetered) Schreier rewriting, used by oracles and tests."""
        c = 0
        out = []
        for y in word:
            x = self.schreier_letter(c, y)
            if x is not None:
                out.append(x)
            c = self._fwd[c, y]
        if c != 0:
            raise NotInSubgroup(f"word ends in coset {c}")
        return tuple(out)

    def expand(self, word: Sequence[str]) -> tuple[str, ...]:
        out: list[str] = []
        for x in word:
            name, sign = split_token(x)
            w = self.schreier[name]
            out.extend(w if sign > 0 else invert_word(w))
        return tuple(out)

    @classmethod
    def load(cls, path: str, alphabet: Alphabet) -> "CosetTable":
        try:
            with open(path, encoding="utf-8") as fh:
                lines = [ln.strip() for ln in fh]
        except OSError as exc:
            raise CosetTableError(f"cannot read coset table {path}: {exc}") from None
        return cls.parse(lines, alphabet)

    @classmethod
    def parse(cls, lines: Sequence[str], alphabet: Alphabet) -> "CosetTable":
        lines = [ln for ln in (s.strip() for s in lines) if ln and not ln.startswith("#")]
        if not lines:
            raise CosetTableError("empty coset table")
        head = lines[0].split()
        if len(head) != 2 or head[0] != "index" or not head[1].isdigit():
            raise CosetTableError("first line must be 'index d'")
        d = int(head[1])
        if len(lines) < d + 1:
            raise CosetTableError("too few representative lines")
        reps = [parse_word(ln, alphabet) for ln in lines[1:d + 1]]
        transitions: dict[tuple[int, str], int] = {}
        for ln in lines[d + 1:]:
            parts = ln.split()
            if len(parts) != 3 or not parts[0].isdigit() or not parts[2].isdigit():
                raise CosetTableError(f"bad transition line {ln!r}")
            i, y, j = int(parts[0]), parts[1], int(parts[2])
            if y not in alphabet.generators:
                raise CosetTableError(f"unknown generator {y!r} in transition")
            if (i, y) in transitions and transitions[i, y] != j:
                raise CosetTableError(f"conflicting transitions for coset {i} and {y}")
            transitions[i, y] = j
        return cls(alphabet, reps, transitions)


# ---------------------------------------------------------------------------
# words


_TOKEN = re.compile(r"^([^\s^]+)(?:\^(.*))?$")


def parse_word(text: str, alphabet: Alphabet) -> tuple[str, ...]:
    """Parse whitespace separated tokens, expanding ``name^k`` into ``k`` copies.

    >>> parse_word("t^3 a^-2", Alphabet(["a", "t"]))
    ('t', 't', 't', 'a^-1', 'a^-1')
    """
    text = text.strip()
    if text in ("", EMPTY_WORD):
        return ()
    out: list[str] = []
    for tok in text.split():
        m = _TOKEN.match(tok)
        if not m:
            raise MalformedExponent(f"cannot parse token {tok!r}")
        name, exp = m.group(1), m.group(2)
        if name not in alphabet.generators:
            raise UnknownGenerator(f"{name!r} is not a generator of {alphabet}")
        if exp is None:
            out.append(name)
            continue
        if not re.fullmatch(r"-?[0-9]+", exp) or int(exp) == 0:
            raise MalformedExponent(f"bad exponent in {tok!r}")
        k = int(exp)
        out.extend([name if k > 0 else invert(name)] * abs(k))
    return tuple(out)


def format_word(word: Sequence[str]) -> str:
    return " ".join(word)


# ---------------------------------------------------------------------------
# parser


class _Parser:
    def __init__(self, text: str, base_dir: str | None):
        self.text = text
        self.pos = 0
        self.base_dir = base_dir

    def error(self, msg: str):
        raise GroupSyntaxError(msg, self.pos)

    def skip(self):
        while self.pos < len(self.text) and self.text[self.pos].isspace():
            self.pos += 1

    def expect(self, s: str):
        self.skip()
        if not self.text.startswith(s, self.pos):
            self.error(f"expected {s!r}")
        self.pos += len(s)

    def name(self) -> str:
        self.skip()
        m = re.compile(r"[A-Za-z]+").match(self.text, self.pos)
        if not m:
            self.error("expected a group name")
        self.pos = m.end()
        return m.group(0)

    def integer(self) -> int:
        self.skip()
        m = re.compile(r"-?[0-9]+").match(self.text, self.pos)
        if not m:
            self.error("expected an integer")
        self.pos = m.end()
        return int(m.group(0))

    def path(self) -> str:
        self.expect("@")
        self.skip()
        start = self.pos
        while self.pos < len(self.text) and self.text[self.pos] not in ",)":
            self.pos += 1
        path = self.text[start:self.pos].strip()
        if not path:
            self.error("expected a file name after '@'")
        return path

    def expr(self) -> GroupExpr:
        start = self.pos
        kind = self.name()
        if kind == "Z":
            return Z()
        if kind in ("Free", "Cyclic", "UT"):
            self.expect("(")
            k = self.integer()
            self.expect(")")
            if kind == "Free":
                if k < 1:
                    raise ArityError(f"Free({k}): rank must be at least 1")
                return Free(k)
            if kind == "Cyclic":
                if k < 2:
                    raise ArityError(f"Cyclic({k}): order must be at least 2")
                return Cyclic(k)
            if not 2 <= k <= MAX_UT_RANK:
                raise ArityError(f"UT({k}): size must lie in 2..{MAX_UT_RANK}")
            return UT(k)
        if kind in ("BS", "Torus"):
            self.expect("(")
            m = self.integer()
            self.expect(",")
            n = self.integer()
            self.expect(")")
            if kind == "BS":
                if m != 1 or n < 2:
                    raise ArityError(f"BS({m},{n}): only BS(1,p) with p >= 2 is supported")
                return BS(n)
            if m < 1 or n < 1:
                raise ArityError(f"Torus({m},{n}): exponents must be positive")
            return Torus(m, n)
        if kind in ("Direct", "Wreath", "FreeProd"):
            self.expect("(")
            left = self.expr()
            self.expect(",")
            right = self.expr()
            self.expect(")")
            if kind == "Direct":
                return Direct(left, right)
            if kind == "Wreath":
                return Wreath(left, right)
            check_freeprod_oracle(left, right)
            return FreeProd(left, right)
        if kind == "FiniteIndex":
            self.expect("(")
            ambient = self.expr()
            self.expect(",")
            path = self.path()
            self.expect(",")
            direction = self.name()
            if direction not in ("sub", "super"):
                self.error("direction must be 'sub' or 'super'")
            self.expect(")")
            full = path if self.base_dir is None else os.path.join(self.base_dir, path)
            table = CosetTable.load(full, ambient.alphabet)
            return FiniteIndex(ambient, table, path, direction)
        self.pos = start
        self.error(f"unknown group {kind!r}")


def parse_group(text: str, base_dir: str | None = None) -> GroupExpr:
    """Parse a group expression; ``@file`` references resolve against ``base_dir``."""
    p = _Parser(text, base_dir)
    e = p.expr()
    p.skip()
    if p.pos != len(text):
        p.error("trailing input")
    return e


def check_freeprod_oracle(left: GroupExpr, right: GroupExpr) -> None:
    """Raise :class:`MissingOracle` unless a product word problem is registered."""
    free_like = (Z, Free)
    if isinstance(left, free_like) and isinstance(right, free_like):
        return
    if isinstance(left, Cyclic) and isinstance(right, Cyclic):
        return
    raise MissingOracle(
        f"no word-problem oracle registered for FreeProd({left.text},{right.text})")

