"""Shared helpers for the test suite: families, word samplers and reference oracles."""
from __future__ import annotations

import os
import random
from functools import lru_cache
from typing import Sequence

from lognf import build, invert, invert_word, parse_group

DATA = os.path.join(os.path.dirname(__file__), "data")

FAMILIES = {
    "Free(2)": "Free(2)",
    "ZxZ": "Direct(Z,Z)",
    "C2 wr Z": "Wreath(Cyclic(2),Z)",
    "Z wr Z": "Wreath(Z,Z)",
    "Z wr ZxZ": "Wreath(Z,Direct(Z,Z))",
    "Z*Z": "FreeProd(Z,Z)",
    "C2*C3": "FreeProd(Cyclic(2),Cyclic(3))",
    "BS(1,2)": "BS(1,2)",
    "BS(1,3)": "BS(1,3)",
    "UT(3)": "UT(3)",
    "UT(4)": "UT(4)",
    "Torus(2,3)": "Torus(2,3)",
    "2Z in Z": "FiniteIndex(Z,@even_z.coset,sub)",
    "Z over 2Z": "FiniteIndex(Z,@even_z.coset,super)",
}


@lru_cache(maxsize=None)
def family(text: str):
    """``(expr, nf, oracle)`` for a group expression, cached across tests."""
    expr = parse_group(text, DATA)
    nf, oracle = build(expr)
    return expr, nf, oracle


def stack_reduce(word: Sequence[str]) -> tuple[str, ...]:
    """Free reduction with an explicit stack (the textbook reference)."""
    out: list[str] = []
    for x in word:
        if out and out[-1] == invert(x):
            out.pop()
        else:
            out.append(x)
    return tuple(out)


def random_word(rng: random.Random, letters: Sequence[str], n: int) -> tuple[str, ...]:
    return tuple(rng.choice(letters) for _ in range(n))


@lru_cache(maxsize=None)
def relator_pool(text: str, seed: int = 7, probes: int = 4000, max_len: int = 6) -> tuple:
    """Short words equal to the identity, found by bucketing random words by oracle value.

    Two short words with the same value give the relator ``u v^-1``; free
    cancellations ``x x^-1`` are always included.
    """
    _, nf, oracle = family(text)
    letters = nf.alphabet_in.letters
    rng = random.Random(seed)
    buckets: dict = {}
    relators = {(x, invert(x)) for x in letters}
    for _ in range(probes):
        w = random_word(rng, letters, rng.randint(1, max_len))
        buckets.setdefault(oracle.value(w), []).append(w)
    for words in buckets.values():
        for u in words[1:4]:
            r = words[0] + invert_word(u)
            if stack_reduce(r):
                relators.add(r)
    return tuple(sorted(relators))


def equal_variant(text: str, word: Sequence[str], rng: random.Random,
                  max_len: int) -> tuple[str, ...]:
    """A different spelling of ``word``: relators spliced in at random positions."""
    pool = relator_pool(text)
    w = list(word)
    for _ in range(rng.randint(1, 3)):
        r = rng.choice(pool)
        if len(w) + len(r) > max_len:
            break
        i = rng.randint(0, len(w))
        w[i:i] = r
    return tuple(w)


def word_pair(text: str, rng: random.Random, max_len: int) -> tuple[tuple[str, ...], tuple[str, ...]]:
    """Half the time an equal pair (relator splicing), otherwise an independent or near pair."""
    _, nf, _ = family(text)
    letters = nf.alphabet_in.letters
    u = random_word(rng, letters, rng.randint(0, max_len // 2))
    kind = rng.random()
    if kind < 0.5:
        return u, equal_variant(text, u, rng, max_len)
    if kind < 0.75 and u:
        v = list(u)
        v[rng.randrange(len(v))] = rng.choice(letters)
        return u, tuple(v)
    return u, random_word(rng, letters, rng.randint(0, max_len))
