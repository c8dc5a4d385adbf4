"""Acceptance criteria, one test per criterion.

Every test prints a single ``CRITERION k: PASS|FAIL ...`` line (visible even
under output capture) and then asserts.  Tolerances are pinned as module
constants.
"""
from __future__ import annotations

import math
import random
import time
from fractions import Fraction

import pytest

from lognf import (BUFFERED, Alphabet, METERED, BSMatrix, StepBudgetExceeded, free_wp_metered,
                   invert, invert_word, parse_group, parse_word, run)
from lognf.machine import WordTape, Workspace
from lognf.nf.bs import Approximation, bs_approximate, bs_nf
from lognf.nf.extensions import torus_rep
from lognf.nf.nilpotent import ut_entry_bound_check, ut_nf
from lognf.oracles import BSOracle, TorusOracle, UTOracle
from lognf.sampling import Measurement, fit_log, growth_exponent, medians, random_word, sample_rng

from support import FAMILIES, family, stack_reduce, word_pair

# pinned tolerances
BS_EXAMPLE_SECONDS = 1.0
BS_LENGTH_LAW_SECONDS = 1.0
BS_LENGTH_LAW_K = range(1, 13)
BIJECTIVITY_PAIRS = 1000
BIJECTIVITY_MAX_LEN = 48
BIJECTIVITY_SECONDS = 300.0
LOGSPACE_LENGTHS = [2 ** k for k in range(6, 14)]
LOGSPACE_SAMPLES = 20
LOGSPACE_BITS_PER_DOUBLING = 64
LOGSPACE_SECONDS = 600.0
GROWTH_BS_MAX = 2.2
GROWTH_GEODESIC_MAX = 1.0
UT_WORDS = 1000
UT_MAX_LEN = 100
BS_INVARIANT_WORDS = 1000
BS_INVARIANT_PRIMES = (2, 3, 5)
BS_INVARIANT_MAX_LEN = 40
TORUS_WORDS = 500
FREE_WP_WORDS = 10_000
FREE_WP_MAX_RANK = 4
FREE_WP_MAX_LEN = 128
FREE_WP_SECONDS = 120.0

SEED = 20240601


def verdict(capsys, k: int, ok: bool, detail: str) -> None:
    with capsys.disabled():
        print(f"\nCRITERION {k}: {'PASS' if ok else 'FAIL'} {detail}")


# ---------------------------------------------------------------------------
# 1. the worked BS(1,2) example


def test_criterion_01_bs_worked_example(capsys):
    start = time.perf_counter()
    # a^(t^2) a^(t) a^(t^-1) t^3 with x^y = y^-1 x y, spelled blockwise
    word = parse_word("t^-2 a t^2 t^-1 a t t a t^-1 t^3", parse_group("BS(1,2)").alphabet)
    target = BSMatrix(2, 3, Fraction(11, 4))
    oracle = BSOracle(2)
    nf = bs_nf(word, 2)
    ok = (oracle.value(word) == target and oracle.value(nf) == target
          and bs_nf(nf, 2) == nf)
    elapsed = time.perf_counter() - start
    ok = ok and elapsed < BS_EXAMPLE_SECONDS
    verdict(capsys, 1, ok, f"nf={' '.join(nf)!r} value=(2^{oracle.value(nf).i}, "
                           f"{oracle.value(nf).m}) {elapsed:.3f}s")
    assert ok


# ---------------------------------------------------------------------------
# 2. the BS length law


def test_criterion_02_bs_length_law(capsys):
    start = time.perf_counter()
    bad = []
    for k in BS_LENGTH_LAW_K:
        w = ("t",) * (k + 1) + ("a",) + ("t^-1",) * (k + 1) + ("a^-1",)
        n = len(bs_nf(w, 2))
        if n != k * k + 2 * k + 1:
            bad.append((k, n))
    elapsed = time.perf_counter() - start
    ok = not bad and elapsed < BS_LENGTH_LAW_SECONDS
    verdict(capsys, 2, ok, f"k=1..12 mismatches={bad} {elapsed:.3f}s")
    assert ok


# ---------------------------------------------------------------------------
# 3. bijectivity against the oracles


def _bijectivity(name: str, rng: random.Random) -> list:
    text = FAMILIES[name]
    _, nf, oracle = family(text)
    failures = []
    for _ in range(BIJECTIVITY_PAIRS):
        u, v = word_pair(text, rng, BIJECTIVITY_MAX_LEN)
        fu = run(nf, u, mode=BUFFERED)[0]
        fv = run(nf, v, mode=BUFFERED)[0]
        same = oracle.eval(u) == oracle.eval(v)
        if (fu == fv) != same:
            failures.append(("pair", u, v))
        for w, fw in ((u, fu), (v, fv)):
            if oracle.eval(fw) != oracle.eval(w):
                failures.append(("eval", w, fw))
    return failures


def test_criterion_03_oracle_bijectivity(capsys):
    start = time.perf_counter()
    rng = random.Random(SEED)
    per_family = {name: len(_bijectivity(name, rng)) for name in FAMILIES}
    elapsed = time.perf_counter() - start
    total = sum(per_family.values())
    ok = total == 0 and elapsed < BIJECTIVITY_SECONDS
    verdict(capsys, 3, ok, f"{len(FAMILIES)} families x {BIJECTIVITY_PAIRS} pairs, "
                           f"failures={total} {per_family if total else ''} {elapsed:.1f}s")
    assert ok


# ---------------------------------------------------------------------------
# 4. idempotence, identity, inverse


def test_criterion_04_idempotence_identity_inverse(capsys):
    rng = random.Random(SEED + 4)
    failures = []
    for name, text in FAMILIES.items():
        _, nf, _ = family(text)
        if run(nf, (), mode=BUFFERED)[0] != ():
            failures.append((name, "identity"))
        for _ in range(100):
            w = random_word(rng, nf.alphabet_in, rng.randint(0, 32))
            fw = run(nf, w, mode=BUFFERED)[0]
            if run(nf, fw, mode=BUFFERED)[0] != fw:
                failures.append((name, "idempotence", w))
            if run(nf, w + invert_word(w), mode=BUFFERED)[0] != ():
                failures.append((name, "inverse", w))
    ok = not failures
    verdict(capsys, 4, ok, f"{len(FAMILIES)} families x 100 words, failures={len(failures)}")
    assert ok


# ---------------------------------------------------------------------------
# 5 and 6. logspace certificate and output growth, from one sweep

# Each family gets an equal share of what is left of the budget and returns
# what it does not use.  A length is abandoned as soon as its first sample
# shows the remaining samples cannot fit, so slow families go first and the
# BS families, which need most of the range, inherit the savings.
SHIPPED = ["Z", "Cyclic(3)", "Direct(Z,Z)", "FiniteIndex(Z,@even_z.coset,sub)",
           "FiniteIndex(Z,@even_z.coset,super)", "UT(3)", "UT(4)",
           "FreeProd(Z,Z)", "FreeProd(Cyclic(2),Cyclic(3))", "Torus(2,3)",
           "Wreath(Z,Direct(Z,Z))", "Wreath(Cyclic(2),Z)", "Wreath(Z,Z)", "Free(2)",
           "BS(1,3)", "BS(1,2)"]


def _sweep_family(text: str, deadline: float) -> tuple[list[Measurement], int | None]:
    """Metered sweep until done or out of time; returns rows and the first unfinished length."""
    _, nf, _ = family(text)
    rows = []
    for n in LOGSPACE_LENGTHS:
        for k in range(LOGSPACE_SAMPLES):
            word = random_word(sample_rng(SEED, n, k), nf.alphabet_in, n)
            started = time.monotonic()
            try:
                _, report = run(nf, word, mode=METERED, deadline=deadline)
            except StepBudgetExceeded:
                return [m for m in rows if m.length < n], n
            rows.append(Measurement(n, k, report))
            spent = time.monotonic() - started
            if k == 0 and spent * (LOGSPACE_SAMPLES - 1) > deadline - time.monotonic():
                return [m for m in rows if m.length < n], n
    return rows, None


@pytest.fixture(scope="module")
def logspace_sweep():
    start = time.monotonic()
    stop = start + LOGSPACE_SECONDS - 5
    results = {}
    for i, text in enumerate(SHIPPED):
        share = (stop - time.monotonic()) / (len(SHIPPED) - i)
        rows, unfinished = _sweep_family(text, time.monotonic() + max(share, 0.0))
        results[text] = (rows, unfinished)
    return results, time.monotonic() - start


def test_criterion_05_logspace_certificate(capsys, logspace_sweep):
    results, elapsed = logspace_sweep
    lines = []
    ok = elapsed < LOGSPACE_SECONDS
    for text, (rows, unfinished) in results.items():
        peaks = medians(rows, "peak_bits")
        ns = sorted(peaks)
        jumps = [peaks[b] - peaks[a] for a, b in zip(ns, ns[1:])]
        slope, intercept = fit_log(peaks) if peaks else (math.nan, math.nan)
        fine = unfinished is None and all(j <= LOGSPACE_BITS_PER_DOUBLING for j in jumps)
        ok = ok and fine
        reach = f"reached n={ns[-1]}" if ns else "no length completed"
        if unfinished is not None:
            reach += f", out of time at n={unfinished}"
        lines.append(f"  {text}: {'ok' if fine else 'FAIL'} {reach}, max jump "
                     f"{max(jumps, default=0):g} bits, peak_bits ~ {slope:.1f} log2 n + "
                     f"{intercept:.1f}")
    verdict(capsys, 5, ok, f"{elapsed:.0f}s\n" + "\n".join(lines))
    assert ok


def test_criterion_06_output_growth(capsys, logspace_sweep):
    results, _ = logspace_sweep
    limits = {"BS(1,2)": GROWTH_BS_MAX, "Free(2)": GROWTH_GEODESIC_MAX,
              "Direct(Z,Z)": GROWTH_GEODESIC_MAX}
    ok = True
    parts = []
    for text, limit in limits.items():
        rows, _ = results[text]
        lengths = medians(rows, "output_length")
        if len(lengths) < 2:
            ok = False
            parts.append(f"{text}: too few lengths")
            continue
        g = growth_exponent(lengths)
        ok = ok and g <= limit
        parts.append(f"{text}: exponent {g:.3f} (<= {limit}) over n={min(lengths)}..{max(lengths)}")
    verdict(capsys, 6, ok, "; ".join(parts))
    assert ok


# ---------------------------------------------------------------------------
# 7. entry bounds for unitriangular words


def test_criterion_07_ut_entry_bounds(capsys):
    rng = random.Random(SEED + 7)
    failures = 0
    for i in range(UT_WORDS):
        r = 3 if i % 2 == 0 else 4
        _, nf, _ = family(f"UT({r})")
        n = rng.randint(1, UT_MAX_LEN)
        w = random_word(rng, nf.alphabet_in, n)
        m = UTOracle(r).value(w)
        direct = all(abs(m[a][b]) <= n ** (b - a) for a in range(r) for b in range(a + 1, r))
        # the normal form re-checks the bound on every intermediate matrix
        if not (direct and ut_entry_bound_check(w, r) and UTOracle(r).value(ut_nf(w, r)) == m):
            failures += 1
    ok = failures == 0
    verdict(capsys, 7, ok, f"{UT_WORDS} UT(3)/UT(4) words, n<= {UT_MAX_LEN}, failures={failures}")
    assert ok


# ---------------------------------------------------------------------------
# 8. the approximation loop invariant


def _zero_texp_word(rng: random.Random, n: int) -> tuple[str, ...]:
    """``n`` letters with as many ``t`` as ``t^-1``, in random order."""
    pairs = rng.randint(0, n // 2)
    w = ["t", "t^-1"] * pairs + [rng.choice(("a", "a^-1")) for _ in range(n - 2 * pairs)]
    rng.shuffle(w)
    return tuple(w)


def _above(word, level: int) -> tuple[str, ...]:
    """``[u]_l``: drop the a-letters read below ``level``."""
    out, walk = [], 0
    for x in word:
        if x[0] == "t":
            walk += 1 if x == "t" else -1
            out.append(x)
        elif walk >= level:
            out.append(x)
    return tuple(out)


def _conj_block(level: int, k: int) -> tuple[str, ...]:
    """``(a^k)^(t^-level) = t^level a^k t^-level``."""
    t = "t" if level >= 0 else "t^-1"
    a = "a" if k >= 0 else "a^-1"
    return (t,) * abs(level) + (a,) * abs(k) + (invert(t),) * abs(level)


def test_criterion_08_approximation_invariant(capsys):
    rng = random.Random(SEED + 8)
    failures = checks = 0
    for i in range(BS_INVARIANT_WORDS):
        p = BS_INVARIANT_PRIMES[i % len(BS_INVARIANT_PRIMES)]
        oracle = BSOracle(p)
        u = _zero_texp_word(rng, rng.randint(0, BS_INVARIANT_MAX_LEN))
        target = oracle.value(u)
        written: list[str] = []
        bad = []

        def hook(level, aexp):
            value = oracle.value(tuple(written) + _conj_block(level, aexp) + _above(u, level))
            if value != target:
                bad.append(level)

        ws = Workspace()
        written.extend(Approximation(p, hook).process(WordTape(ws, u), ws))
        checks += 1
        if bad or oracle.value(written) != target or tuple(written) != bs_approximate(u, p)[0]:
            failures += 1
    ok = failures == 0
    verdict(capsys, 8, ok, f"{checks} zero-texp words over p in {BS_INVARIANT_PRIMES}, "
                           f"failures={failures}")
    assert ok


# ---------------------------------------------------------------------------
# 9. the central representative in Torus(2,3)


def _central_word(rng: random.Random, m: int, n: int) -> tuple[str, ...]:
    alphabet = Alphabet(["a", "b"])
    letters = alphabet.letters
    pieces = [("a",) * m, ("a^-1",) * m, ("b",) * n, ("b^-1",) * n]
    w: list[str] = []
    for _ in range(rng.randint(0, 4)):
        g = random_word(rng, alphabet, rng.randint(0, 4))
        piece = g + rng.choice(pieces) + invert_word(g)
        i = rng.randint(0, len(w))
        w[i:i] = piece
    for _ in range(rng.randint(0, 3)):
        x = rng.choice(letters)
        i = rng.randint(0, len(w))
        w[i:i] = [x, invert(x)]
    return tuple(w)


def test_criterion_09_torus_central_formula(capsys):
    m, n = 2, 3
    rng = random.Random(SEED + 9)
    oracle = TorusOracle(m, n)
    failures = 0
    for _ in range(TORUS_WORDS):
        w = _central_word(rng, m, n)
        assert oracle.value(w)[1] == (), "sampler must stay in the centre"
        r = sum(1 if x == "a" else -1 for x in w if x[0] == "a")
        s = sum(1 if x == "b" else -1 for x in w if x[0] == "b")
        i = Fraction(r, m) + Fraction(s, n)
        rep = torus_rep(w, m, n)
        expected = ("a" if i >= 0 else "a^-1",) * abs(int(m * i))
        if i.denominator != 1 or rep != expected or oracle.value(rep) != oracle.value(w):
            failures += 1
    ok = failures == 0
    verdict(capsys, 9, ok, f"{TORUS_WORDS} central words in Torus(2,3), failures={failures}")
    assert ok


# ---------------------------------------------------------------------------
# 10. the metered free word problem against a stack


def _free_wp_sample(rng: random.Random) -> tuple[tuple[str, ...], int]:
    rank = rng.randint(1, FREE_WP_MAX_RANK)
    alphabet = parse_group(f"Free({rank})").alphabet
    letters = alphabet.letters
    n = rng.randint(0, FREE_WP_MAX_LEN)
    kind = rng.randrange(3)
    if kind == 0:
        return random_word(rng, alphabet, n), rank
    if kind == 1:
        # trivial by construction: nested cancelling insertions
        w: list[str] = []
        while len(w) + 2 <= n:
            x = rng.choice(letters)
            i = rng.randint(0, len(w))
            w[i:i] = [x, invert(x)]
        return tuple(w), rank
    # zero exponent sums, so the abelian filter cannot decide it
    half = list(random_word(rng, alphabet, n // 2))
    other = [invert(x) for x in half]
    rng.shuffle(other)
    w = half + other
    return tuple(w), rank


def test_criterion_10_free_wp_against_stack(capsys):
    rng = random.Random(SEED + 10)
    start = time.perf_counter()
    disagreements = trivial = 0
    for _ in range(FREE_WP_WORDS):
        w, rank = _free_wp_sample(rng)
        expected = stack_reduce(w) == ()
        trivial += expected
        if free_wp_metered(w, rank) != expected:
            disagreements += 1
    elapsed = time.perf_counter() - start
    ok = disagreements == 0 and elapsed < FREE_WP_SECONDS
    verdict(capsys, 10, ok, f"{FREE_WP_WORDS} words ({trivial} trivial), rank<= {FREE_WP_MAX_RANK}, "
                            f"disagreements={disagreements} {elapsed:.1f}s")
    assert ok
