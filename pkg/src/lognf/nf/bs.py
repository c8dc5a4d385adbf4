"""Normal form for BS(1,p) = <a, t | t a t^-1 = a^p>.

Elements are matrices ``[[p**i, m], [0, 1]]``.  The a-letter read when the
t-exponent sum of the prefix is ``L`` (its *level*) contributes ``±p**L`` to
``m``.  A block ``t^L a^k t^-L`` is the element ``a^k`` placed at level
``L``; blocks are written verbatim, one per nonzero digit, in increasing
level order, and the t-exponent sum follows as a final ``t`` run.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Iterator, Sequence

from ..alphabet import Alphabet, invert, split_token
from ..errors import NonPositiveBeta, NonZeroTExp
from ..machine import (END, METERED, ConcatTape, InverseTape, RepeatTape, Tape, Transducer,
                       Workspace, WordTape, power, run, scan)

ALPHABET = Alphabet(["a", "t"])


@dataclass(frozen=True)
class LevelStats:
    texp: int
    l_min: int
    l_max: int


def measure_levels(tape: Tape, fr) -> tuple:
    """One pass: t-exponent sum and the extreme levels of the t-walk (registers)."""
    texp, lo, hi = fr.int(0), fr.int(0), fr.int(0)
    for x in scan(tape, fr):
        if x[0] == "t":
            texp.set(texp.v + split_token(x)[1])
            if texp.v < lo.v:
                lo.set(texp.v)
            elif texp.v > hi.v:
                hi.set(texp.v)
    return texp, lo, hi


def level_stats(word: Sequence[str]) -> LevelStats:
    ws = Workspace()
    with ws.frame() as fr:
        texp, lo, hi = measure_levels(WordTape(ws, word), fr)
        return LevelStats(texp.v, lo.v, hi.v)


def block(fr, level: int, k: int) -> Iterator[str]:
    """Spell ``a^k`` placed at ``level``: ``t^level a^k t^-level``."""
    yield from power(fr, "t", level)
    yield from power(fr, "a", k)
    yield from power(fr, "t", -level)


class Approximation(Transducer):
    """Digit-by-digit expansion of a zero t-exponent word, lowest level first.

    Per level ``l`` the a-exponent at that level is added to a carry ``aexp``;
    below the top level the remainder ``aexp mod p`` is written as a block and
    the quotient carried up.  At the top level whatever remains (of any sign
    or size) is written as the last block.  The generator's return value is
    ``beta``, the exponent of the last written block (``0`` if none).
    """

    def __init__(self, p: int, on_level: Callable[[int, int], None] | None = None):
        self.p = p
        self.alphabet_in = self.alphabet_out = ALPHABET
        self.on_level = on_level
        self.name = f"approx{p}"

    @property
    def key(self):
        return ("approx", self.p)

    def process(self, tape, ws):
        p = self.p
        with ws.frame() as fr:
            texp, lo, hi = measure_levels(tape, fr)
            if texp.v != 0:
                raise NonZeroTExp(f"t-exponent sum is {texp.v}")
            beta = fr.int(0)
            aexp = fr.int(0)
            q, r = fr.int(0), fr.int(0)
            level = fr.int(lo.v)
            if self.on_level:
                self.on_level(level.v, aexp.v)
            while level.v <= hi.v:
                # a-exponent at this level
                walk = fr.int(0)
                for x in scan(tape, fr):
                    if x[0] == "t":
                        walk.set(walk.v + split_token(x)[1])
                    elif walk.v == level.v:
                        aexp.set(aexp.v + split_token(x)[1])
                fr.free(walk)
                if level.v < hi.v:
                    qq, rr = divmod(aexp.v, p)
                    q.set(qq)
                    r.set(rr)
                    if r.v:
                        yield from block(fr, level.v, r.v)
                        beta.set(r.v)
                    aexp.set(q.v)
                elif aexp.v:
                    beta.set(aexp.v)
                    yield from block(fr, level.v, aexp.v)
                    aexp.set(0)
                level.set(level.v + 1)
                if self.on_level:
                    self.on_level(level.v, aexp.v)
            return beta.v


def _drain(gen) -> int:
    """Run a generator to completion, discarding output, and return its value."""
    try:
        while True:
            next(gen)
    except StopIteration as stop:
        return stop.value


class DigitExpansion(Transducer):
    """Rewrite the last block ``(a^beta)`` of an approximation into digits ``< p``.

    Earlier blocks are copied; with ``beta = b0 + b1 p + ... `` the last block
    becomes ``a^b0`` at its own level, ``a^b1`` one level up and so on,
    omitting zero digits.  Requires ``beta > 0``.
    """

    def __init__(self, p: int):
        self.p = p
        self.alphabet_in = self.alphabet_out = ALPHABET
        self.name = f"digits{p}"

    @property
    def key(self):
        return ("digits", self.p)

    @staticmethod
    def parse_block(tape: Tape, i: int, fr):
        """Read the block starting at ``i``; return (level, a-exponent, next position)."""
        pos = fr.int(i)
        level = fr.int(0)
        x = tape.letter_at(pos.v)
        while x is not END and x[0] == "t":
            level.set(level.v + split_token(x)[1])
            pos.set(pos.v + 1)
            x = tape.letter_at(pos.v)
        k = fr.int(0)
        while x is not END and x[0] == "a":
            k.set(k.v + split_token(x)[1])
            pos.set(pos.v + 1)
            x = tape.letter_at(pos.v)
        out = (level.v, k.v, pos.v + abs(level.v))
        fr.free(pos)
        fr.free(level)
        fr.free(k)
        return out

    def process(self, tape, ws):
        with ws.frame() as fr:
            last = fr.int(0)
            i = fr.int(1)
            while tape.letter_at(i.v) is not END:
                last.set(i.v)
                i.set(self.parse_block(tape, i.v, fr)[2])
            if last.v == 0:
                return
            i.set(1)
            while i.v < last.v:
                yield tape.letter_at(i.v)
                i.set(i.v + 1)
            level, k, _ = self.parse_block(tape, last.v, fr)
            yield from expand_digits(fr, level, k, self.p)


def expand_digits(fr, level: int, beta: int, p: int) -> Iterator[str]:
    if beta <= 0:
        raise NonPositiveBeta(f"beta = {beta}")
    b = fr.int(beta)
    c = fr.int(level)
    while b.v >= p:
        r = b.v % p
        if r:
            yield from block(fr, c.v, r)
        b.set(b.v // p)
        c.set(c.v + 1)
    yield from block(fr, c.v, b.v)


class BSNF(Transducer):
    """The BS(1,p) normal form: digit blocks of ``m`` followed by ``t^texp``."""

    def __init__(self, p: int):
        if p < 2:
            raise ValueError("p must be at least 2")
        self.p = p
        self.alphabet_in = self.alphabet_out = ALPHABET
        self.approx = Approximation(p)
        self.digits = DigitExpansion(p)
        self.name = f"bs{p}"

    def process(self, tape, ws):
        with ws.frame() as fr:
            texp = measure_levels(tape, fr)[0]
            tail = RepeatTape(fr, "t^-1" if texp.v > 0 else "t", abs(texp.v))
            u = ConcatTape(fr, tape, tail)
            beta = fr.int(_drain(self.approx.process(u, ws)))
            if beta.v > 0:
                yield from self.digits.process(fr.stream(self.approx, u), ws)
            elif beta.v < 0:
                inv = InverseTape(fr, u)
                for x in self.digits.process(fr.stream(self.approx, inv), ws):
                    yield invert(x) if x[0] == "a" else x
            yield from power(fr, "t", texp.v)


def bs_approximate(word: Sequence[str], p: int,
                   on_level: Callable[[int, int], None] | None = None) -> tuple[tuple[str, ...], int]:
    """Approximation output and its ``beta`` for a zero t-exponent word."""
    ws = Workspace()
    gen = Approximation(p, on_level).process(WordTape(ws, word), ws)
    out = []
    try:
        while True:
            out.append(next(gen))
    except StopIteration as stop:
        return tuple(out), stop.value


def bs_expand_hs(prefix: Sequence[str], beta: int, alpha: int, p: int) -> tuple[str, ...]:
    """``prefix`` followed by the digit blocks of ``(a^beta)^(t^alpha)``.

    With ``x^y = y^-1 x y`` that block sits at level ``-alpha``; digit ``j``
    of ``beta`` goes to level ``j - alpha``.
    """
    ws = Workspace()
    with ws.frame() as fr:
        return tuple(prefix) + tuple(expand_digits(fr, -alpha, beta, p))


def bs_nf(word: Sequence[str], p: int, mode: str = METERED) -> tuple[str, ...]:
    return run(BSNF(p), word, mode=mode)[0]
