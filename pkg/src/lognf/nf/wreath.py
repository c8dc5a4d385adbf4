"""Wreath products ``G wr H``: lamps over the base group, enumerated in shortlex order.

A position ``p`` (``0 <= p <= n``) of the input stands for the base element
``v(p) = f_H(H-projection of the first p letters)``; positions are the only
persistent representation of base elements, everything else is recomputed
by streaming.
"""
from __future__ import annotations

from enum import IntEnum
from typing import Sequence

from ..machine import (END, METERED, InverseTape, SubstTape, Tape, Transducer,
                       Workspace, WordTape, projection_table, run, streams_equal)


class Order(IntEnum):
    LESS = -1
    EQUAL = 0
    GREATER = 1


def compare_streams(f: Transducer, u: Tape, v: Tape, ws: Workspace) -> Order:
    """Shortlex comparison of ``f(u)`` and ``f(v)``: lengths first, then letters."""
    order = f.alphabet_out.order
    with ws.frame() as fr:
        a = fr.stream(f, u)
        b = fr.stream(f, v)
        la = a.length(fr)
        lb = b.length(fr)
        if la.v != lb.v:
            return Order.LESS if la.v < lb.v else Order.GREATER
        j = fr.int(1)
        while j.v <= la.v:
            x, y = a.letter_at(j.v), b.letter_at(j.v)
            if x != y:
                return Order.LESS if order(x) < order(y) else Order.GREATER
            j.set(j.v + 1)
        return Order.EQUAL


def shortlex_compare(f: Transducer, u: Sequence[str], v: Sequence[str],
                     mode: str = METERED) -> Order:
    ws = Workspace(mode=mode)
    return compare_streams(f, WordTape(ws, u), WordTape(ws, v), ws)


class LampFilter(Transducer):
    """Lamp letters written while the cursor sits at ``v(p)``, in input order."""

    def __init__(self, wreath: "WreathNF", p: int):
        self.wreath = wreath
        self.p = p
        self.alphabet_in = wreath.alphabet_in
        self.alphabet_out = wreath.lamp.alphabet_in
        self.name = f"lamp@{p}"

    @property
    def key(self):
        return ("lamp", id(self.wreath), self.p)

    def process(self, tape, ws):
        wr = self.wreath
        with ws.frame() as fr:
            target = wr.base_prefix(fr, tape, self.p)
            here = streams_equal(wr.base, wr.base_prefix(fr, tape, 0), target, ws)
            i = fr.int(1)
            while True:
                x = tape.letter_at(i.v)
                if x is END:
                    return
                if x.startswith("0."):
                    if here:
                        yield x[2:]
                else:
                    # the cursor moved: recompare the new prefix with v(p)
                    with ws.frame() as sub:
                        here = streams_equal(wr.base, wr.base_prefix(sub, tape, i.v), target, ws)
                i.set(i.v + 1)


class WreathNF(Transducer):
    """``v_1 u_1 v_1^-1 ... v_k u_k v_k^-1 f_H(H(w))`` with ``v_1 < ... < v_k`` in shortlex."""

    def __init__(self, lamp: Transducer, base: Transducer):
        self.lamp, self.base = lamp, base
        self.alphabet_in = lamp.alphabet_in.prefixed("0.") + base.alphabet_in.prefixed("1.")
        self.alphabet_out = lamp.alphabet_out.prefixed("0.") + base.alphabet_out.prefixed("1.")
        self.base_table = projection_table(self.alphabet_in, "1.")
        self.name = f"wreath({lamp.name},{base.name})"

    def base_prefix(self, fr, tape: Tape, p: int | None) -> Tape:
        """Base projection of the first ``p`` letters (the whole input for ``None``)."""
        return SubstTape(fr, tape, self.base_table, (id(self), "base"), limit=p)

    def compare_positions(self, tape, p: int, q: int, ws) -> Order:
        with ws.frame() as fr:
            return compare_streams(self.base, self.base_prefix(fr, tape, p),
                                   self.base_prefix(fr, tape, q), ws)

    def next_position(self, tape: Tape, p: int, ws: Workspace) -> int | None:
        """Smallest position whose base element is the shortlex successor of ``v(p)``.

        Returns ``None`` when ``v(p)`` is the largest element reached by a prefix.
        """
        with ws.frame() as fr:
            best = fr.int(-1)
            j = fr.int(0)
            while True:
                if j.v > 0:
                    x = tape.letter_at(j.v)
                    if x is END:
                        break
                    if x.startswith("0."):
                        # same base prefix as position j-1
                        j.set(j.v + 1)
                        continue
                if self.compare_positions(tape, j.v, p, ws) == Order.GREATER:
                    if best.v < 0 or self.compare_positions(tape, j.v, best.v, ws) == Order.LESS:
                        best.set(j.v)
                j.set(j.v + 1)
            return None if best.v < 0 else best.v

    def process(self, tape, ws):
        with ws.frame() as fr:
            p = fr.int(0)
            while True:
                with ws.frame() as sub:
                    lamp_word = sub.stream(LampFilter(self, p.v), tape)
                    lamp_nf = self.lamp.process(lamp_word, ws)
                    first = next(lamp_nf, END)
                    if first is not END:
                        for x in self.base.process(self.base_prefix(sub, tape, p.v), ws):
                            yield "1." + x
                        yield "0." + first
                        for x in lamp_nf:
                            yield "0." + x
                        inv = InverseTape(sub, self.base_prefix(sub, tape, p.v))
                        for x in self.base.process(inv, ws):
                            yield "1." + x
                    lamp_nf.close()
                q = self.next_position(tape, p.v, ws)
                if q is None:
                    break
                p.set(q)
            with ws.frame() as sub:
                for x in self.base.process(self.base_prefix(sub, tape, None), ws):
                    yield "1." + x


def next_v(wreath: WreathNF, word: Sequence[str], p: int, mode: str = METERED) -> int | None:
    ws = Workspace(mode=mode)
    return wreath.next_position(WordTape(ws, word), p, ws)


def lamp_at(wreath: WreathNF, word: Sequence[str], p: int, mode: str = METERED) -> tuple[str, ...]:
    """Normal form of the lamp at ``v(p)``; empty iff that lamp is trivial."""
    ws = Workspace(mode=mode)
    tape = WordTape(ws, word)
    with ws.frame() as fr:
        lamps = fr.stream(LampFilter(wreath, p), tape)
        return tuple(wreath.lamp.process(lamps, ws))


def wreath_nf(wreath: WreathNF, word: Sequence[str], mode: str = METERED) -> tuple[str, ...]:
    return run(wreath, word, mode=mode)[0]


__all__ = ["Order", "compare_streams", "shortlex_compare", "LampFilter", "WreathNF",
           "next_v", "lamp_at", "wreath_nf"]
