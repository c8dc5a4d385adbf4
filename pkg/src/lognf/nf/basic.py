"""Normal forms for cyclic, free and direct-product groups."""
from __future__ import annotations

from typing import Sequence

from ..alphabet import Alphabet, split_token
from ..lang import Free
from ..machine import (END, METERED, SliceTape, SubstTape, Transducer, power,
                       projection_table, run, scan)
from ..oracles import ModularWordProblem, free_word_problem


class CounterNF(Transducer):
    """``g^k`` for a one-generator group: ``k`` in Z, or ``0 <= k < modulus``."""

    def __init__(self, alphabet: Alphabet, modulus: int = 0):
        if alphabet.rank != 1:
            raise ValueError("a counter normal form needs exactly one generator")
        self.alphabet_in = self.alphabet_out = alphabet
        self.modulus = modulus
        self.gen = alphabet.generators[0]
        self.name = f"counter{modulus or ''}"

    def process(self, tape, ws):
        with ws.frame() as fr:
            total = fr.int(0)
            for x in scan(tape, fr):
                v = total.v + split_token(x)[1]
                total.set(v % self.modulus if self.modulus else v)
            yield from power(fr, self.gen, total.v)


class FreeNF(Transducer):
    """Free reduction with two position counters and a logspace word problem.

    For the letter ``x`` at ``c1`` the scan looks at each later ``x^-1``
    (position ``c2``, left to right) and asks whether ``w[c1..c2]`` is
    trivial.  If so the whole window cancels and ``c1`` jumps past it;
    otherwise ``x`` survives reduction and is written.
    """

    def __init__(self, alphabet: Alphabet, wp: ModularWordProblem | None = None):
        self.alphabet_in = self.alphabet_out = alphabet
        self.wp = wp or free_word_problem(alphabet)
        self.name = "free"

    def process(self, tape, ws):
        with ws.frame() as fr:
            c1 = fr.int(1)
            c2 = fr.int(1)
            while True:
                x = tape.letter_at(c1.v)
                if x is END:
                    return
                target = x[:-3] if x.endswith("^-1") else x + "^-1"
                c2.set(c1.v)
                cancelled = False
                while True:
                    c2.set(c2.v + 1)
                    y = tape.letter_at(c2.v)
                    if y is END:
                        break
                    if y != target:
                        continue
                    with ws.frame() as sub:
                        if self.wp.trivial(SliceTape(sub, tape, c1.v, c2.v), ws):
                            cancelled = True
                    if cancelled:
                        break
                if cancelled:
                    c1.set(c2.v + 1)
                else:
                    yield x
                    c1.set(c1.v + 1)


class DirectNF(Transducer):
    """``f(u) h(v)`` where ``u``, ``v`` are the two factor projections of the input."""

    def __init__(self, left: Transducer, right: Transducer):
        self.left, self.right = left, right
        self.alphabet_in = left.alphabet_in.prefixed("0.") + right.alphabet_in.prefixed("1.")
        self.alphabet_out = left.alphabet_out.prefixed("0.") + right.alphabet_out.prefixed("1.")
        self.tables = (projection_table(self.alphabet_in, "0."),
                       projection_table(self.alphabet_in, "1."))
        self.name = f"direct({left.name},{right.name})"

    def process(self, tape, ws):
        for side, f in enumerate((self.left, self.right)):
            prefix = f"{side}."
            with ws.frame() as fr:
                view = SubstTape(fr, tape, self.tables[side], (id(self), side))
                for x in f.process(view, ws):
                    yield prefix + x


def free_nf(word: Sequence[str], rank: int, mode: str = METERED) -> tuple[str, ...]:
    return run(FreeNF(Free(rank).alphabet), word, mode=mode)[0]


def direct_nf(word: Sequence[str], left: Transducer, right: Transducer,
              mode: str = METERED) -> tuple[str, ...]:
    return run(DirectNF(left, right), word, mode=mode)[0]
