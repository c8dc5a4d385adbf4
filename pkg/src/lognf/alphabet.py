"""Symmetric alphabets and generator tokens.

A token is a plain string: ``"t"`` for a generator and ``"t^-1"`` for its
formal inverse.  Qualified names (``"0.c"``, ``"1.0.t"``, ``"e.1.2"``) are
ordinary generator names; the dots only matter to the constructions that
add or strip the positional prefixes ``0.`` and ``1.``.
"""
from __future__ import annotations

from typing import Iterable, Iterator, Sequence

INV = "^-1"


def invert(token: str) -> str:
    """Formal inverse of a single token."""
    if token.endswith(INV):
        return token[:-3]
    return token + INV


def split_token(token: str) -> tuple[str, int]:
    """Return ``(generator name, exponent sign)``."""
    if token.endswith(INV):
        return token[:-3], -1
    return token, 1


def invert_word(word: Sequence[str]) -> tuple[str, ...]:
    return tuple(invert(x) for x in reversed(word))


def free_reduce(word: Iterable[str]) -> tuple[str, ...]:
    stack: list[str] = []
    for x in word:
        if stack and stack[-1] == invert(x):
            stack.pop()
        else:
            stack.append(x)
    return tuple(stack)


class Alphabet:
    """Ordered symmetric alphabet.

    Letters are ordered by generator declaration order with each positive
    letter immediately before its inverse; this is the letter order used for
    shortlex comparisons.
    """

    __slots__ = ("generators", "letters", "_order")

    def __init__(self, generators: Iterable[str]):
        self.generators = tuple(generators)
        if len(set(self.generators)) != len(self.generators):
            raise ValueError(f"duplicate generators in {self.generators}")
        letters = []
        for g in self.generators:
            letters.append(g)
            letters.append(g + INV)
        self.letters = tuple(letters)
        self._order = {x: i for i, x in enumerate(self.letters)}

    @property
    def rank(self) -> int:
        return len(self.generators)

    def order(self, token: str) -> int:
        return self._order[token]

    def index(self, token: str) -> int:
        """Generator index of ``token`` (ignoring its sign)."""
        return self._order[token] >> 1

    def prefixed(self, prefix: str) -> "Alphabet":
        return Alphabet(prefix + g for g in self.generators)

    def __add__(self, other: "Alphabet") -> "Alphabet":
        return Alphabet(self.generators + other.generators)

    def __contains__(self, token: object) -> bool:
        return token in self._order

    def __iter__(self) -> Iterator[str]:
        return iter(self.letters)

    def __len__(self) -> int:
        return len(self.letters)

    def __eq__(self, other: object) -> bool:
        return isinstance(other, Alphabet) and other.generators == self.generators

    def __hash__(self) -> int:
        return hash(self.generators)

    def __le__(self, other: "Alphabet") -> bool:
        return all(x in other for x in self.letters)

    def __repr__(self) -> str:
        return f"Alphabet({list(self.generators)!r})"
