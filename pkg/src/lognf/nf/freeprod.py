"""Free products ``G * H`` through longest factor prefixes and a product word problem."""
from __future__ import annotations

from typing import Sequence

from ..alphabet import split_token
from ..machine import (END, METERED, ConcatTape, InverseTape, SliceTape, SubstTape, Tape,
                       Transducer, Workspace, WordTape, projection_table, run)
from .basic import FreeNF


class FreeProdNF(Transducer):
    """Alternating product of factor normal forms.

    The input is first freely reduced over the joint alphabet.  Starting at
    ``s``, the longest segment ``w[s..e]`` lying in the left factor is found
    (or, if there is none, the longest one in the right factor); the factor's
    normal form of that segment's projection is written and the scan resumes
    at ``e + 1``.  Only ``s``, ``e`` and the input length are kept between
    rounds.

    ``orders`` gives, per factor, the modulus of each generator's exponent
    sum (``0`` for infinite order).  A segment can only lie in one factor if
    the other factor's exponent sums vanish, which prunes most candidates
    before the word problem is consulted.
    """

    def __init__(self, left: Transducer, right: Transducer, wp,
                 orders: tuple[Sequence[int], Sequence[int]] | None = None):
        self.factors = (left, right)
        self.wp = wp
        self.alphabet_in = left.alphabet_in.prefixed("0.") + right.alphabet_in.prefixed("1.")
        self.alphabet_out = left.alphabet_out.prefixed("0.") + right.alphabet_out.prefixed("1.")
        self.reduce = FreeNF(self.alphabet_in)
        self.keep = tuple(projection_table(self.alphabet_in, f"{s}.", strip=False) for s in (0, 1))
        self.strip = tuple(projection_table(self.alphabet_in, f"{s}.") for s in (0, 1))
        if orders is None:
            orders = ([0] * left.alphabet_in.rank, [0] * right.alphabet_in.rank)
        self.orders = orders
        self.gen_index = {x: self.factors[int(x[0])].alphabet_in.index(x[2:])
                          for x in self.alphabet_in}
        self.name = f"freeprod({left.name},{right.name})"

    def _in_factor(self, tape: Tape, s: int, e: int, side: int, ws: Workspace) -> bool:
        """Whether ``w[s..e]`` equals its own projection to factor ``side``."""
        with ws.frame() as fr:
            seg = SliceTape(fr, tape, s, e)
            proj = SubstTape(fr, seg, self.keep[side], (id(self), "keep", side))
            witness = ConcatTape(fr, seg, InverseTape(fr, proj))
            return self.wp.trivial(witness, ws)

    def longest_prefix(self, tape: Tape, s: int, n: int, side: int, ws: Workspace) -> int:
        """Largest ``e`` with ``w[s..e]`` in factor ``side``; ``s - 1`` if none."""
        other = 1 - side
        mods = self.orders[other]
        with ws.frame() as fr:
            sums = [fr.int(0) for _ in mods]
            e = fr.int(s)
            while e.v <= n:
                x = tape.letter_at(e.v)
                if x[0] == str(other):
                    k = self.gen_index[x]
                    v = sums[k].v + split_token(x)[1]
                    sums[k].set(v % mods[k] if mods[k] else v)
                e.set(e.v + 1)
            e.set(n)
            while e.v >= s:
                x = tape.letter_at(e.v)
                nxt = tape.letter_at(e.v + 1)
                if (nxt is END or nxt[0] != str(side)) and not any(r.v for r in sums):
                    if self._in_factor(tape, s, e.v, side, ws):
                        return e.v
                if x[0] == str(other):
                    k = self.gen_index[x]
                    v = sums[k].v - split_token(x)[1]
                    sums[k].set(v % mods[k] if mods[k] else v)
                e.set(e.v - 1)
            return s - 1

    def process(self, tape, ws):
        with ws.frame() as fr:
            w = fr.stream(self.reduce, tape)
            n = w.length(fr)
            s = fr.int(1)
            while s.v <= n.v:
                side = 0
                e = self.longest_prefix(w, s.v, n.v, 0, ws)
                if e < s.v:
                    side = 1
                    e = self.longest_prefix(w, s.v, n.v, 1, ws)
                prefix = f"{side}."
                with ws.frame() as sub:
                    seg = SliceTape(sub, w, s.v, e)
                    view = SubstTape(sub, seg, self.strip[side], (id(self), "strip", side))
                    for x in self.factors[side].process(view, ws):
                        yield prefix + x
                s.set(e + 1)


def prefix_in_factor(nf: FreeProdNF, word: Sequence[str], side: int = 0,
                     mode: str = METERED) -> int:
    """Length of the longest prefix of the freely reduced ``word`` lying in a factor."""
    ws = Workspace(mode=mode)
    tape = WordTape(ws, word)
    with ws.frame() as fr:
        n = tape.length(fr)
        return nf.longest_prefix(tape, 1, n.v, side, ws)


def freeprod_nf(nf: FreeProdNF, word: Sequence[str], mode: str = METERED) -> tuple[str, ...]:
    return run(nf, word, mode=mode)[0]
