"""Random words and space-metering sweeps."""
from __future__ import annotations

import math
import random
import statistics
import time
from dataclasses import dataclass
from typing import Iterator, Sequence

from .alphabet import Alphabet
from .machine import DEFAULT_STEP_LIMIT, METERED, SpaceReport, Transducer, run

METER_HEADER = "length,sample,peak_bits,steps,output_length"


def random_word(rng: random.Random, alphabet: Alphabet, n: int) -> tuple[str, ...]:
    """Uniform i.i.d. letters over the symmetric alphabet."""
    letters = alphabet.letters
    return tuple(rng.choice(letters) for _ in range(n))


def sample_rng(seed: int, length: int, sample: int) -> random.Random:
    """Independent stream per (length, sample), so sweeps are order independent."""
    return random.Random(f"{seed}:{length}:{sample}")


@dataclass(frozen=True)
class Measurement:
    length: int
    sample: int
    report: SpaceReport

    def csv_row(self) -> str:
        r = self.report
        return f"{self.length},{self.sample},{r.peak_bits},{r.steps},{r.output_length}"


def sweep(t: Transducer, lengths: Sequence[int], samples: int, seed: int, *,
          mode: str = METERED, step_limit: int = DEFAULT_STEP_LIMIT,
          seconds_per_run: float | None = None) -> Iterator[Measurement]:
    for n in lengths:
        for k in range(samples):
            word = random_word(sample_rng(seed, n, k), t.alphabet_in, n)
            deadline = None if seconds_per_run is None else time.monotonic() + seconds_per_run
            _, report = run(t, word, mode=mode, step_limit=step_limit, deadline=deadline)
            yield Measurement(n, k, report)


def medians(rows: Sequence[Measurement], field: str) -> dict[int, float]:
    by_len: dict[int, list[int]] = {}
    for m in rows:
        by_len.setdefault(m.length, []).append(getattr(m.report, field))
    return {n: statistics.median(v) for n, v in sorted(by_len.items())}


def fit_log(points: dict[int, float]) -> tuple[float, float]:
    """Least squares ``y ≈ c log2(n) + d``; returns ``(c, d)``."""
    xs = [math.log2(n) for n in points]
    ys = list(points.values())
    if len(xs) < 2:
        return 0.0, ys[0] if ys else 0.0
    c, d = statistics.linear_regression(xs, ys)
    return c, d


def growth_exponent(points: dict[int, float]) -> float:
    """Slope of ``log y`` against ``log n`` (values below 1 are clamped to 1)."""
    xs = [math.log(n) for n in points]
    ys = [math.log(max(v, 1.0)) for v in points.values()]
    if len(xs) < 2:
        return 0.0
    return statistics.linear_regression(xs, ys)[0]
