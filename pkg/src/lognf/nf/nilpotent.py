"""Normal form for UT(r), the unitriangular integer matrices, by peeling superdiagonals."""
from __future__ import annotations

from typing import Sequence

from ..alphabet import split_token
from ..errors import BadIndex, EntryBoundViolation
from ..lang import MAX_UT_RANK, UT
from ..machine import METERED, Transducer, power, run, scan
from ..oracles import UTOracle


def ut_token(i: int, j: int, r: int) -> str:
    if not 1 <= i < j <= r:
        raise BadIndex(f"no generator e.{i}.{j} in UT({r})")
    return f"e.{i}.{j}"


def _indices(token: str) -> tuple[int, int]:
    _, i, j = split_token(token)[0].split(".")
    return int(i), int(j)


class UTNF(Transducer):
    """``E_12^b E_23^b ... E_(r-1)r^b  E_13^b ... E_1r^b``.

    One pass evaluates the matrix (entries above the diagonal are registers).
    Then, superdiagonal by superdiagonal, the entries are written as
    exponent blocks and cancelled by left multiplication with the inverse
    of the block product.  The matrix of every intermediate word is checked
    against the bound ``|entry on diagonal d| <= length**d``.
    """

    def __init__(self, r: int):
        if not 2 <= r <= MAX_UT_RANK:
            raise BadIndex(f"UT({r}) is outside 2..{MAX_UT_RANK}")
        self.r = r
        self.alphabet_in = self.alphabet_out = UT(r).alphabet
        self.columns = {x: _indices(x) for x in self.alphabet_in}
        self.name = f"ut{r}"

    def check_bounds(self, entries, length: int) -> None:
        r = self.r
        for i in range(1, r):
            for j in range(i + 1, r + 1):
                if abs(entries[i, j].v) > length ** (j - i):
                    raise EntryBoundViolation(
                        f"entry ({i},{j}) = {entries[i, j].v} exceeds {length}^{j - i}")

    def process(self, tape, ws):
        r = self.r
        with ws.frame() as fr:
            # entries[i, j] for i < j; the diagonal is 1 and below it 0
            entries = {(i, j): fr.int(0) for i in range(1, r + 1) for j in range(i + 1, r + 1)}

            def get(i, j):
                return 1 if i == j else (entries[i, j].v if i < j else 0)

            length = fr.int(0)
            for x in scan(tape, fr):
                # right multiplication by E_ab^s: column b += s * column a
                a, b = self.columns[x]
                s = split_token(x)[1]
                for i in range(1, a + 1):
                    entries[i, b].set(entries[i, b].v + s * get(i, a))
                length.set(length.v + 1)
            self.check_bounds(entries, length.v)
            for d in range(1, r):
                betas = [fr.int(entries[j, j + d].v) for j in range(1, r - d + 1)]
                for j, beta in zip(range(1, r - d + 1), betas):
                    yield from power(fr, ut_token(j, j + d, r), beta.v)
                    length.set(length.v + abs(beta.v))
                # left multiplication by E_(j, j+d)^(-beta_j), j = 1 first:
                # row j -= beta_j * row (j+d)
                for j, beta in zip(range(1, r - d + 1), betas):
                    if beta.v:
                        for col in range(j + d, r + 1):
                            entries[j, col].set(entries[j, col].v - beta.v * get(j + d, col))
                    fr.free(beta)
                self.check_bounds(entries, length.v)


def ut_nf(word: Sequence[str], r: int, mode: str = METERED) -> tuple[str, ...]:
    return run(UTNF(r), word, mode=mode)[0]


def ut_entry_bound_check(word: Sequence[str], r: int) -> bool:
    """Whether every entry on the d-th superdiagonal of the word's matrix is at most ``len**d``."""
    m = UTOracle(r).value(word)
    n = len(word)
    return all(abs(m[i][j]) <= n ** (j - i) for i in range(r) for j in range(i + 1, r))
