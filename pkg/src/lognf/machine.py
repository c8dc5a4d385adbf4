"""Executable model of a deterministic logspace transducer.

A transducer is an object whose :meth:`Transducer.process` method is a
generator: it reads a :class:`Tape` (read-only, random access by 1-based
position, ``END`` past the last letter), keeps every unbounded integer of
its state in :class:`Register` objects allocated from a :class:`Workspace`,
and yields output letters strictly left to right.  Letters, booleans and
other finite-state values may live in ordinary Python locals; they play the
role of the finite state control and are not metered.

Composition follows the replay construction: the consumer reads its input
through a :class:`RestartableStream`, which re-runs the producer from scratch
whenever a letter before its current cursor is requested.  A paused producer
is resumed when the consumer reads forward, so one-pass consumers pay for a
single producer run.

In ``buffered`` mode, streams are materialised (and memoised per execution)
instead of replayed.  That mode exists for speed in oracles and tests; its
space figures are meaningless, but its output words are identical.
"""
from __future__ import annotations

import time
from dataclasses import dataclass
from typing import Callable, Hashable, Iterable, Iterator, Mapping, Sequence

from .alphabet import Alphabet, invert
from .errors import StepBudgetExceeded, UnknownToken

END = None
"""Exhaustion marker returned by :meth:`Tape.letter_at` past the end."""

DEFAULT_STEP_LIMIT = 10**9
METERED = "metered"
BUFFERED = "buffered"

CSV_HEADER = "input_length,peak_bits,steps,output_length"


@dataclass(frozen=True)
class SpaceReport:
    input_length: int
    peak_bits: int
    steps: int
    output_length: int

    def csv_row(self) -> str:
        return f"{self.input_length},{self.peak_bits},{self.steps},{self.output_length}"


class Register:
    """A metered integer cell; its width is ``bit_length(|v|) + 1`` sign bit."""

    __slots__ = ("ws", "v", "width", "_lo", "_hi")

    def __init__(self, ws: "Workspace", value: int = 0):
        self.ws = ws
        self.v = value
        self.width = abs(value).bit_length() + 1
        # |v| in [_lo, _hi) keeps the current width
        self._hi = 1 << (self.width - 1)
        self._lo = self._hi >> 1
        ws.bits += self.width
        if ws.bits > ws.peak_bits:
            ws.peak_bits = ws.bits

    def set(self, value: int) -> None:
        a = value if value >= 0 else -value
        if self._lo <= a < self._hi:
            self.v = value
            return
        w = a.bit_length() + 1
        ws = self.ws
        ws.bits += w - self.width
        self.width = w
        self._hi = 1 << (w - 1)
        self._lo = self._hi >> 1
        if ws.bits > ws.peak_bits:
            ws.peak_bits = ws.bits
        self.v = value

    def __iadd__(self, d: int) -> "Register":
        self.set(self.v + d)
        return self

    def __isub__(self, d: int) -> "Register":
        self.set(self.v - d)
        return self

    def __repr__(self) -> str:
        return f"Register({self.v})"


class Frame:
    """Owner of a group of registers and streams, released together.

    Transducer generators open a frame with ``with ws.frame() as fr:`` so
    that everything they allocated is returned to the meter when they finish
    or are closed early.
    """

    __slots__ = ("ws", "_regs", "_owned")

    def __init__(self, ws: "Workspace"):
        self.ws = ws
        self._regs: list[Register] = []
        self._owned: list = []

    def int(self, value: int = 0) -> Register:
        r = Register(self.ws, value)
        self._regs.append(r)
        return r

    def free(self, r: Register) -> None:
        self._regs.remove(r)
        self.ws.bits -= r.width

    def stream(self, t: "Transducer", tape: "Tape") -> "Tape":
        return self.own(self.ws.stream(t, tape))

    def own(self, obj):
        self._owned.append(obj)
        return obj

    def close(self) -> None:
        while self._owned:
            self._owned.pop().close()
        ws = self.ws
        for r in self._regs:
            ws.bits -= r.width
        self._regs.clear()

    def __enter__(self) -> "Frame":
        return self

    def __exit__(self, *exc) -> None:
        self.close()


class Workspace:
    """Meter shared by one execution and all of its sub-executions."""

    def __init__(self, step_limit: int = DEFAULT_STEP_LIMIT, mode: str = METERED,
                 deadline: float | None = None):
        if mode not in (METERED, BUFFERED):
            raise ValueError(f"unknown execution mode {mode!r}")
        self.mode = mode
        self.step_limit = step_limit
        self.deadline = deadline
        self.bits = 0
        self.peak_bits = 0
        self.steps = 0
        self._serial = 0
        self._cache: dict = {}
        self._check_at = 0
        self._schedule_check()

    def _schedule_check(self) -> None:
        nxt = self.step_limit + 1
        if self.deadline is not None:
            nxt = min(nxt, self.steps + 4096)
        self._check_at = nxt

    def tick(self, n: int = 1) -> None:
        self.steps += n
        if self.steps >= self._check_at:
            if self.steps > self.step_limit:
                raise StepBudgetExceeded(f"more than {self.step_limit} transitions")
            if self.deadline is not None and time.monotonic() > self.deadline:
                raise StepBudgetExceeded(f"deadline passed after {self.steps} transitions")
            self._schedule_check()

    def serial(self) -> int:
        self._serial += 1
        return self._serial

    def frame(self) -> Frame:
        return Frame(self)

    def stream(self, t: "Transducer", tape: "Tape") -> "Tape":
        if self.mode == BUFFERED:
            key = (t.key, tape.key)
            word = self._cache.get(key)
            if word is None:
                gen = t.process(tape, self)
                try:
                    word = tuple(gen)
                finally:
                    gen.close()
                self._cache[key] = word
            return ListTape(self, word, key=("stream", key))
        return RestartableStream(self, t, tape)


# ---------------------------------------------------------------------------
# tapes


class Tape:
    """Read-only input tape addressed by 1-based position."""

    key: Hashable = None

    def letter_at(self, i: int) -> str | None:
        raise NotImplementedError

    def length(self, fr: Frame) -> Register:
        """Count the letters by scanning; the count lives in a register of ``fr``."""
        n = fr.int(0)
        while self.letter_at(n.v + 1) is not END:
            n.set(n.v + 1)
        return n

    def close(self) -> None:
        pass


def scan(tape: Tape, fr: Frame, start: int = 1) -> Iterator[str]:
    """Yield letters from ``start`` to the end, head position held in a register."""
    pos = fr.int(start)
    try:
        while True:
            x = tape.letter_at(pos.v)
            if x is END:
                return
            yield x
            pos.set(pos.v + 1)
    finally:
        fr.free(pos)


class WordTape(Tape):
    """The input tape proper: an immutable word."""

    __slots__ = ("ws", "word", "n", "key")

    def __init__(self, ws: Workspace, word: Sequence[str], key: Hashable = None):
        self.ws = ws
        self.word = tuple(word)
        self.n = len(self.word)
        self.key = key if key is not None else ("word", ws.serial())

    def letter_at(self, i: int) -> str | None:
        self.ws.tick()
        if 1 <= i <= self.n:
            return self.word[i - 1]
        return END

    def length(self, fr: Frame) -> Register:
        self.ws.tick(self.n + 1)
        return fr.int(self.n)


class ListTape(WordTape):
    """Materialised intermediate word (buffered mode only)."""


class ConstTape(Tape):
    """A word fixed at construction time and kept in the finite control."""

    __slots__ = ("word", "key")

    def __init__(self, word: Sequence[str]):
        self.word = tuple(word)
        self.key = ("const", self.word)

    def letter_at(self, i: int) -> str | None:
        if 1 <= i <= len(self.word):
            return self.word[i - 1]
        return END


class RestartableStream(Tape):
    """Output of ``t`` on ``src`` served letter by letter through replay.

    ``letter_at(j)`` for ``j`` behind the cursor restarts the producer and
    counts its suppressed output up to ``j``; reads at or beyond the cursor
    resume the paused producer.
    """

    def __init__(self, ws: Workspace, t: "Transducer", src: Tape):
        self.ws = ws
        self.t = t
        self.src = src
        self.key = ("stream", t.key, src.key)
        self._frame = ws.frame()
        self.count = self._frame.int(0)
        self._gen: Iterator[str] | None = None
        self._last: str | None = END
        self._done = False

    def _restart(self) -> None:
        if self._gen is not None:
            self._gen.close()
        self.count.set(0)
        self._last = END
        self._done = False
        self._gen = self.t.process(self.src, self.ws)

    def letter_at(self, j: int) -> str | None:
        if j < 1:
            return END
        count = self.count
        if self._gen is None or j < count.v:
            self._restart()
        elif j == count.v:
            return self._last
        while count.v < j:
            if self._done:
                return END
            try:
                x = next(self._gen)
            except StopIteration:
                self._done = True
                return END
            self.ws.tick()
            count.set(count.v + 1)
            self._last = x
        return self._last

    def close(self) -> None:
        if self._gen is not None:
            self._gen.close()
            self._gen = None
        self._frame.close()


class SubstTape(Tape):
    """Image of ``base`` under a letter-to-word substitution.

    Covers projections (letters mapped to the empty word), renamings and
    generator expansions.  Access goes through a bidirectional cursor, so
    nearby positions are cheap and no intermediate word is stored.  ``limit``
    truncates the base to its first ``limit`` letters.
    """

    def __init__(self, fr: Frame, base: Tape, table: Mapping[str, tuple[str, ...]],
                 tag: Hashable, limit: int | None = None):
        self.base = base
        self.table = table
        self.key = ("subst", tag, limit, base.key)
        self.limit = fr.int(limit) if limit is not None else None
        self.ipos = fr.int(0)
        self.obase = fr.int(0)
        self._img: tuple[str, ...] = ()

    def _read(self, i: int) -> str | None:
        if self.limit is not None and i > self.limit.v:
            return END
        x = self.base.letter_at(i)
        if x is END:
            return END
        try:
            return self.table[x]
        except KeyError:
            raise UnknownToken(x) from None

    def letter_at(self, j: int) -> str | None:
        if j < 1:
            return END
        ipos, obase = self.ipos, self.obase
        img = self._img
        while j > obase.v + len(img):
            nxt = self._read(ipos.v + 1)
            if nxt is END:
                return END
            obase.set(obase.v + len(img))
            ipos.set(ipos.v + 1)
            img = self._img = nxt
        while j <= obase.v:
            ipos.set(ipos.v - 1)
            img = self._img = self._read(ipos.v)
            obase.set(obase.v - len(img))
        return img[j - obase.v - 1]


class InverseTape(Tape):
    """Formal inverse of ``base``: reversed, every letter inverted."""

    def __init__(self, fr: Frame, base: Tape, n: int | None = None):
        self.base = base
        self.key = ("inv", base.key)
        self.n = fr.int(n) if n is not None else base.length(fr)

    def letter_at(self, j: int) -> str | None:
        n = self.n.v
        if 1 <= j <= n:
            return invert(self.base.letter_at(n - j + 1))
        return END


class SliceTape(Tape):
    """Letters ``i..j`` (inclusive) of ``base``."""

    def __init__(self, fr: Frame, base: Tape, i: int, j: int):
        self.base = base
        self.key = ("slice", i, j, base.key)
        self.i = fr.int(i)
        self.j = fr.int(j)

    def letter_at(self, m: int) -> str | None:
        if 1 <= m <= self.j.v - self.i.v + 1:
            return self.base.letter_at(self.i.v + m - 1)
        return END


class ConcatTape(Tape):
    def __init__(self, fr: Frame, first: Tape, second: Tape, n1: int | None = None):
        self.first = first
        self.second = second
        self.key = ("cat", first.key, second.key)
        self.n1 = fr.int(n1) if n1 is not None else first.length(fr)

    def letter_at(self, j: int) -> str | None:
        if j < 1:
            return END
        if j <= self.n1.v:
            return self.first.letter_at(j)
        return self.second.letter_at(j - self.n1.v)


class RepeatTape(Tape):
    """``token`` repeated ``count`` times."""

    def __init__(self, fr: Frame, token: str, count: int):
        self.token = token
        self.key = ("rep", token, count)
        self.count = fr.int(count)

    def letter_at(self, j: int) -> str | None:
        if 1 <= j <= self.count.v:
            return self.token
        return END


# ---------------------------------------------------------------------------
# transducers


class Transducer:
    """Deterministic, restartable machine from an input tape to output letters."""

    alphabet_in: Alphabet
    alphabet_out: Alphabet
    name = "transducer"

    @property
    def key(self) -> Hashable:
        return self

    def process(self, tape: Tape, ws: Workspace) -> Iterator[str]:
        raise NotImplementedError

    def __call__(self, word: Sequence[str], mode: str = BUFFERED) -> tuple[str, ...]:
        return run(self, word, mode=mode)[0]

    def __repr__(self) -> str:
        return f"<{type(self).__name__} {self.name}>"


class Copier(Transducer):
    name = "copy"

    def __init__(self, alphabet: Alphabet):
        self.alphabet_in = self.alphabet_out = alphabet

    def process(self, tape, ws):
        with ws.frame() as fr:
            yield from scan(tape, fr)


class FormalInverse(Transducer):
    """Streams ``a_n^-1 ... a_1^-1`` after measuring ``n`` in a register."""

    name = "inverse"

    def __init__(self, alphabet: Alphabet):
        self.alphabet_in = self.alphabet_out = alphabet

    def process(self, tape, ws):
        with ws.frame() as fr:
            yield from scan(InverseTape(fr, tape), fr)


class Substitute(Transducer):
    """Letter-by-letter substitution ``x -> table[x]``."""

    def __init__(self, table: Mapping[str, Sequence[str]], alphabet_in: Alphabet,
                 alphabet_out: Alphabet, name: str = "subst"):
        self.table = {x: tuple(w) for x, w in table.items()}
        self.alphabet_in = alphabet_in
        self.alphabet_out = alphabet_out
        self.name = name

    def process(self, tape, ws):
        with ws.frame() as fr:
            for x in scan(tape, fr):
                try:
                    yield from self.table[x]
                except KeyError:
                    raise UnknownToken(x) from None


class Compose(Transducer):
    """``f`` after ``g``; ``f`` reads ``g``'s output through replay."""

    def __init__(self, f: Transducer, g: Transducer):
        if not g.alphabet_out <= f.alphabet_in:
            raise UnknownToken(
                f"cannot compose: {g.alphabet_out} is not contained in {f.alphabet_in}")
        self.f = f
        self.g = g
        self.alphabet_in = g.alphabet_in
        self.alphabet_out = f.alphabet_out
        self.name = f"{f.name}∘{g.name}"

    def process(self, tape, ws):
        with ws.frame() as fr:
            yield from self.f.process(fr.stream(self.g, tape), ws)


class Renamed(Transducer):
    """Wraps a transducer with letter renamings on both sides."""

    def __init__(self, inner: Transducer, rename_in: Mapping[str, str],
                 rename_out: Mapping[str, str], alphabet_in: Alphabet, alphabet_out: Alphabet):
        self.inner = inner
        self.table_in = {x: (y,) for x, y in rename_in.items()}
        self.rename_out = dict(rename_out)
        self.alphabet_in = alphabet_in
        self.alphabet_out = alphabet_out
        self.name = inner.name

    def process(self, tape, ws):
        with ws.frame() as fr:
            view = SubstTape(fr, tape, self.table_in, ("ren", id(self)))
            out = self.rename_out
            for x in self.inner.process(view, ws):
                yield out[x]


# ---------------------------------------------------------------------------
# operations


def _check_tokens(t: Transducer, word: Sequence[str]) -> tuple[str, ...]:
    word = tuple(word)
    alphabet = t.alphabet_in
    for x in word:
        if x not in alphabet:
            raise UnknownToken(f"{x!r} is not in the input alphabet of {t.name}")
    return word


def run(t: Transducer, word: Sequence[str], *, mode: str = METERED,
        step_limit: int = DEFAULT_STEP_LIMIT,
        deadline: float | None = None) -> tuple[tuple[str, ...], SpaceReport]:
    """Execute ``t`` on ``word`` and return the output with its space report."""
    word = _check_tokens(t, word)
    ws = Workspace(step_limit=step_limit, mode=mode, deadline=deadline)
    tape = WordTape(ws, word)
    out: list[str] = []
    gen = t.process(tape, ws)
    try:
        for x in gen:
            ws.tick()
            out.append(x)
    finally:
        gen.close()
    return tuple(out), SpaceReport(len(word), ws.peak_bits, ws.steps, len(out))


def compose(f: Transducer, g: Transducer) -> Transducer:
    return Compose(f, g)


def streams_equal(f: Transducer, u: Tape, v: Tape, ws: Workspace) -> bool:
    """Compare ``f(u)`` and ``f(v)`` letter by letter without storing either."""
    gu = f.process(u, ws)
    gv = f.process(v, ws)
    try:
        while True:
            x = next(gu, END)
            y = next(gv, END)
            ws.tick()
            if x != y:
                return False
            if x is END:
                return True
    finally:
        gu.close()
        gv.close()


def equal_nf(f: Transducer, u: Sequence[str], v: Sequence[str], *, mode: str = METERED,
             step_limit: int = DEFAULT_STEP_LIMIT) -> bool:
    u = _check_tokens(f, u)
    v = _check_tokens(f, v)
    ws = Workspace(step_limit=step_limit, mode=mode)
    return streams_equal(f, WordTape(ws, u), WordTape(ws, v), ws)


def inverse_nf(f: Transducer, word: Sequence[str], *, mode: str = METERED) -> tuple[str, ...]:
    return run(compose(f, FormalInverse(f.alphabet_in)), word, mode=mode)[0]


def materialize(t: Transducer, word: Iterable[str]) -> tuple[str, ...]:
    """Buffered run, for oracles and tests."""
    return run(t, tuple(word), mode=BUFFERED)[0]


def letter_map(alphabet: Alphabet, f: Callable[[str], Sequence[str]]) -> dict[str, tuple[str, ...]]:
    return {x: tuple(f(x)) for x in alphabet}


def power(fr: Frame, token: str, exponent: int) -> Iterator[str]:
    """Yield ``token**exponent`` as repeated letters; the count lives in a register."""
    tok = token if exponent >= 0 else invert(token)
    i = fr.int(0)
    try:
        while i.v < abs(exponent):
            yield tok
            i.set(i.v + 1)
    finally:
        fr.free(i)


def projection_table(alphabet: Alphabet, prefix: str, strip: bool = True) -> dict[str, tuple[str, ...]]:
    """Keep the letters carrying ``prefix`` (optionally stripped), drop the rest."""
    k = len(prefix)
    return {x: ((x[k:] if strip else x),) if x.startswith(prefix) else () for x in alphabet}
