"""Exact evaluators for every group family, plus metered word problems.

The evaluators (``*Oracle`` classes) are ground truth for testing: they keep
exact big-integer and rational state and are deliberately not metered.

The word-problem classes at the bottom are different: they run inside
normal-form transducers and keep all of their state in workspace registers.
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Hashable, Sequence

from .alphabet import Alphabet, free_reduce, invert, split_token
from .errors import FamilyMismatch, UnknownToken
from .lang import (BS, UT, Cyclic, Direct, FiniteIndex, Free, FreeProd, GroupExpr, Torus,
                   Wreath, Z, check_freeprod_oracle)
from .machine import Tape, Workspace, WordTape, scan


@dataclass(frozen=True)
class GroupElement:
    family: str
    value: Hashable


def oracle_equal(a: GroupElement, b: GroupElement) -> bool:
    if a.family != b.family:
        raise FamilyMismatch(f"{a.family} vs {b.family}")
    return a.value == b.value


class Oracle:
    """Exact group arithmetic on canonical hashable values."""

    family = "?"
    alphabet: Alphabet

    def identity(self):
        raise NotImplementedError

    def letter(self, token: str):
        raise NotImplementedError

    def mul(self, x, y):
        raise NotImplementedError

    def value(self, word: Sequence[str]):
        acc = self.identity()
        for tok in word:
            if tok not in self.alphabet:
                raise UnknownToken(f"{tok!r} is not in {self.alphabet}")
            acc = self.mul(acc, self.letter(tok))
        return acc

    def eval(self, word: Sequence[str]) -> GroupElement:
        return GroupElement(self.family, self.value(word))

    def is_identity(self, word: Sequence[str]) -> bool:
        return self.value(word) == self.identity()


class FreeOracle(Oracle):
    """Free group on an arbitrary alphabet; values are freely reduced words."""

    def __init__(self, alphabet: Alphabet, family: str = "free"):
        self.alphabet = alphabet
        self.family = family

    def identity(self):
        return ()

    def letter(self, token):
        return (token,)

    def mul(self, x, y):
        i = 0
        while i < min(len(x), len(y)) and x[len(x) - 1 - i] == invert(y[i]):
            i += 1
        return x[:len(x) - i] + y[i:]

    def value(self, word):
        for tok in word:
            if tok not in self.alphabet:
                raise UnknownToken(tok)
        return free_reduce(word)


class ZOracle(Oracle):
    family = "Z"

    def __init__(self, modulus: int = 0, alphabet: Alphabet | None = None, family: str = "Z"):
        self.modulus = modulus
        self.alphabet = alphabet or Alphabet(["t"])
        self.family = family

    def identity(self):
        return 0

    def letter(self, token):
        return split_token(token)[1] % self.modulus if self.modulus else split_token(token)[1]

    def mul(self, x, y):
        return (x + y) % self.modulus if self.modulus else x + y


class DirectOracle(Oracle):
    def __init__(self, left: Oracle, right: Oracle, family: str):
        self.left, self.right = left, right
        self.family = family
        self.alphabet = left.alphabet.prefixed("0.") + right.alphabet.prefixed("1.")

    def identity(self):
        return (self.left.identity(), self.right.identity())

    def letter(self, token):
        if token.startswith("0."):
            return (self.left.letter(token[2:]), self.right.identity())
        return (self.left.identity(), self.right.letter(token[2:]))

    def mul(self, x, y):
        return (self.left.mul(x[0], y[0]), self.right.mul(x[1], y[1]))


@dataclass(frozen=True)
class BSMatrix:
    """The matrix ``[[p**i, m], [0, 1]]`` of BS(1,p) with ``m`` in Z[1/p]."""

    p: int
    i: int
    m: Fraction

    def __post_init__(self):
        d = self.m.denominator
        while d % self.p == 0:
            d //= self.p
        if d != 1:
            raise ValueError(f"{self.m} is not in Z[1/{self.p}]")

    @property
    def exponent(self) -> int:
        """The ``e`` with ``m = num / p**e``."""
        e, d = 0, self.m.denominator
        while d > 1:
            d //= self.p
            e += 1
        return e

    @property
    def numerator(self) -> int:
        return self.m.numerator * (self.m.denominator // self.p ** self.exponent)

    def is_canonical(self) -> bool:
        num, e = self.numerator, self.exponent
        if num == 0:
            return e == 0
        return e == 0 or num % self.p != 0

    def __mul__(self, other: "BSMatrix") -> "BSMatrix":
        scale = Fraction(self.p) ** self.i
        return BSMatrix(self.p, self.i + other.i, self.m + scale * other.m)


class BSOracle(Oracle):
    def __init__(self, p: int, family: str | None = None):
        self.p = p
        self.alphabet = Alphabet(["a", "t"])
        self.family = family or f"BS(1,{p})"

    def identity(self):
        return BSMatrix(self.p, 0, Fraction(0))

    def letter(self, token):
        name, sign = split_token(token)
        if name == "a":
            return BSMatrix(self.p, 0, Fraction(sign))
        return BSMatrix(self.p, sign, Fraction(0))

    def mul(self, x, y):
        return x * y

    def value(self, word):
        # one pass: levels and exponent sums, exact rational arithmetic
        level, m = 0, Fraction(0)
        for tok in word:
            if tok not in self.alphabet:
                raise UnknownToken(tok)
            name, sign = split_token(tok)
            if name == "t":
                level += sign
            else:
                m += sign * Fraction(self.p) ** level
        return BSMatrix(self.p, level, m)


def identity_matrix(r: int) -> tuple[tuple[int, ...], ...]:
    return tuple(tuple(int(i == j) for j in range(r)) for i in range(r))


def matmul(x, y):
    r = len(x)
    return tuple(tuple(sum(x[i][k] * y[k][j] for k in range(r)) for j in range(r))
                 for i in range(r))


class UTOracle(Oracle):
    def __init__(self, r: int, family: str | None = None):
        self.r = r
        self.alphabet = UT(r).alphabet
        self.family = family or f"UT({r})"

    def identity(self):
        return identity_matrix(self.r)

    def letter(self, token):
        name, sign = split_token(token)
        _, i, j = name.split(".")
        rows = [list(row) for row in identity_matrix(self.r)]
        rows[int(i) - 1][int(j) - 1] = sign
        return tuple(tuple(row) for row in rows)

    def mul(self, x, y):
        return matmul(x, y)

    def value(self, word):
        # right multiplication by E_ij^s adds s * column i to column j
        rows = [list(row) for row in identity_matrix(self.r)]
        for tok in word:
            if tok not in self.alphabet:
                raise UnknownToken(tok)
            name, sign = split_token(tok)
            _, i, j = name.split(".")
            i, j = int(i) - 1, int(j) - 1
            for row in rows:
                row[j] += sign * row[i]
        return tuple(tuple(row) for row in rows)


class WreathOracle(Oracle):
    """Lamp configurations over the base group plus a cursor.

    Values are ``(support, cursor)`` with ``support`` a frozenset of
    ``(position, lamp)`` pairs that never stores an identity lamp.
    """

    def __init__(self, lamp: Oracle, base: Oracle, family: str):
        self.lamp, self.base = lamp, base
        self.family = family
        self.alphabet = lamp.alphabet.prefixed("0.") + base.alphabet.prefixed("1.")

    def identity(self):
        return (frozenset(), self.base.identity())

    def letter(self, token):
        if token.startswith("0."):
            return (frozenset({(self.base.identity(), self.lamp.letter(token[2:]))}),
                    self.base.identity())
        return (frozenset(), self.base.letter(token[2:]))

    def mul(self, x, y):
        support = dict(x[0])
        cursor = x[1]
        one = self.lamp.identity()
        for pos, g in y[0]:
            key = self.base.mul(cursor, pos)
            v = self.lamp.mul(support.get(key, one), g)
            if v == one:
                support.pop(key, None)
            else:
                support[key] = v
        return (frozenset(support.items()), self.base.mul(cursor, y[1]))

    def lamp_at(self, value, position):
        return dict(value[0]).get(position, self.lamp.identity())


class FreeProdOracle(Oracle):
    """Syllable form: alternating tuple of ``(side, nonidentity value)``."""

    def __init__(self, left: Oracle, right: Oracle, family: str):
        self.factors = (left, right)
        self.family = family
        self.alphabet = left.alphabet.prefixed("0.") + right.alphabet.prefixed("1.")

    def identity(self):
        return ()

    def letter(self, token):
        side = int(token[0])
        return ((side, self.factors[side].letter(token[2:])),)

    def mul(self, x, y):
        out = list(x)
        for side, g in y:
            if out and out[-1][0] == side:
                f = self.factors[side]
                v = f.mul(out[-1][1], g)
                out.pop()
                if v != f.identity():
                    out.append((side, v))
            else:
                out.append((side, g))
        return tuple(out)


class TorusOracle(Oracle):
    """Amalgam normal form of ``<a, b | a^m = b^n>``.

    Values are ``(k, syllables)``: the central element ``z = a^m = b^n`` to
    the power ``k`` times an alternating product of ``a^i`` (``0 < i < m``)
    and ``b^j`` (``0 < j < n``).
    """

    def __init__(self, m: int, n: int, family: str | None = None):
        self.m, self.n = m, n
        self.alphabet = Alphabet(["a", "b"])
        self.family = family or f"Torus({m},{n})"

    def identity(self):
        return (0, ())

    def _times(self, value, side: int, sign: int):
        k, syl = value
        order = self.m if side == 0 else self.n
        syl = list(syl)
        if syl and syl[-1][0] == side:
            e = syl.pop()[1] + sign
        else:
            e = sign
        k += e // order
        e %= order
        if e:
            syl.append((side, e))
        return (k, tuple(syl))

    def letter(self, token):
        name, sign = split_token(token)
        return self._times(self.identity(), 0 if name == "a" else 1, sign)

    def mul(self, x, y):
        acc = (x[0] + y[0], x[1])
        for side, e in y[1]:
            for _ in range(e):
                acc = self._times(acc, side, 1)
        return acc

    def value(self, word):
        acc = self.identity()
        for tok in word:
            if tok not in self.alphabet:
                raise UnknownToken(tok)
            name, sign = split_token(tok)
            acc = self._times(acc, 0 if name == "a" else 1, sign)
        return acc


class SubgroupOracle(Oracle):
    """Subgroup given by Schreier generators, evaluated in the ambient group."""

    def __init__(self, ambient: Oracle, table, family: str):
        self.ambient = ambient
        self.table = table
        self.family = family
        self.alphabet = table.schreier_alphabet

    def identity(self):
        return self.ambient.identity()

    def letter(self, token):
        return self.ambient.value(self.table.expand((token,)))

    def mul(self, x, y):
        return self.ambient.mul(x, y)

    def value(self, word):
        for tok in word:
            if tok not in self.alphabet:
                raise UnknownToken(tok)
        return self.ambient.value(self.table.expand(word))


class Relabel(Oracle):
    """Same arithmetic under a different family tag."""

    def __init__(self, inner: Oracle, family: str):
        self.inner = inner
        self.family = family
        self.alphabet = inner.alphabet

    def identity(self):
        return self.inner.identity()

    def letter(self, token):
        return self.inner.letter(token)

    def mul(self, x, y):
        return self.inner.mul(x, y)

    def value(self, word):
        return self.inner.value(word)


def oracle_for(expr: GroupExpr) -> Oracle:
    fam = expr.text
    if isinstance(expr, Z):
        return ZOracle()
    if isinstance(expr, Free):
        return FreeOracle(expr.alphabet, fam)
    if isinstance(expr, Cyclic):
        return ZOracle(expr.order, Alphabet(["c"]), fam)
    if isinstance(expr, BS):
        return BSOracle(expr.p, fam)
    if isinstance(expr, UT):
        return UTOracle(expr.rank, fam)
    if isinstance(expr, Torus):
        return TorusOracle(expr.m, expr.n, fam)
    if isinstance(expr, Direct):
        return DirectOracle(oracle_for(expr.left), oracle_for(expr.right), fam)
    if isinstance(expr, Wreath):
        return WreathOracle(oracle_for(expr.lamp), oracle_for(expr.base), fam)
    if isinstance(expr, FreeProd):
        return FreeProdOracle(oracle_for(expr.left), oracle_for(expr.right), fam)
    if isinstance(expr, FiniteIndex):
        ambient = oracle_for(expr.ambient)
        if expr.direction == "sub":
            return SubgroupOracle(ambient, expr.table, fam)
        return Relabel(ambient, fam)
    raise TypeError(f"no oracle for {expr!r}")


def evaluate(expr: GroupExpr, word: Sequence[str]) -> GroupElement:
    return oracle_for(expr).eval(word)


# ---------------------------------------------------------------------------
# metered word problems


SANOV_A = ((1, 2), (0, 1))
SANOV_B = ((1, 0), (2, 1))


def _mat2(x, y):
    return ((x[0][0] * y[0][0] + x[0][1] * y[1][0], x[0][0] * y[0][1] + x[0][1] * y[1][1]),
            (x[1][0] * y[0][0] + x[1][1] * y[1][0], x[1][0] * y[0][1] + x[1][1] * y[1][1]))


def _inv2(x):
    # determinant one
    return ((x[1][1], -x[0][1]), (-x[1][0], x[0][0]))


def free_basis_matrix(i: int):
    """``B^i A B^-i``: a free basis of any finite rank inside the Sanov group."""
    bi = ((1, 0), (2 * i, 1))
    return _mat2(_mat2(bi, SANOV_A), _inv2(bi))


def _norm(x) -> int:
    return max(abs(x[0][0]) + abs(x[0][1]), abs(x[1][0]) + abs(x[1][1]))


class ModularWordProblem:
    """Decide triviality of a word by evaluating 2x2 integer matrices modulo primes.

    Each letter maps to an integer matrix of determinant one.  With ``rho``
    the largest row-sum norm of any letter matrix, entries of a product of
    ``n`` letters are bounded by ``rho**n``; primes ``q >= 3`` are tried one at
    a time until ``sum(bit_length(q) - 1) >= c*n + 1`` with ``2**c >= rho``,
    which certifies ``prod(q) > rho**n + 1``.  Only a handful of registers
    (length, prime, trial divisor, four residues, a bit accumulator) are
    alive at any time.

    With ``projective=True`` the word is trivial when the product is ``+I``
    or ``-I`` (used for PSL(2,Z) images).

    Before any modular pass, per-generator exponent sums (reduced by the
    given moduli, ``0`` meaning none) must all vanish; that is a necessary
    condition for triviality in every group this class is used for.
    """

    def __init__(self, matrices: dict[str, tuple], abelian: dict[str, tuple[int, int]],
                 moduli: Sequence[int], projective: bool = False):
        self.matrices = matrices
        self.abelian = abelian          # token -> (counter index, sign)
        self.moduli = list(moduli)
        self.projective = projective
        rho = max(_norm(x) for x in matrices.values())
        self.c = max(1, (rho - 1).bit_length())

    def trivial(self, tape: Tape, ws: Workspace) -> bool:
        with ws.frame() as fr:
            sums = [fr.int(0) for _ in self.moduli]
            n = fr.int(0)
            for x in scan(tape, fr):
                try:
                    idx, sign = self.abelian[x]
                except KeyError:
                    raise UnknownToken(x) from None
                mod = self.moduli[idx]
                v = sums[idx].v + sign
                sums[idx].set(v % mod if mod else v)
                n.set(n.v + 1)
            if any(s.v for s in sums):
                return False
            need = fr.int(self.c * n.v + 1)
            acc = fr.int(0)
            q = fr.int(2)
            plus = True
            minus = self.projective
            while acc.v < need.v:
                self._next_prime(q, fr, ws)
                m = self._product_mod(tape, q.v, fr, ws)
                plus = plus and m == (1, 0, 0, 1)
                minus = minus and m == (q.v - 1, 0, 0, q.v - 1)
                if not (plus or minus):
                    return False
                acc.set(acc.v + q.v.bit_length() - 1)
            return True

    @staticmethod
    def _next_prime(q, fr, ws) -> None:
        d = fr.int(2)
        while True:
            q.set(q.v + 1)
            d.set(2)
            while d.v * d.v <= q.v and q.v % d.v:
                ws.tick()
                d.set(d.v + 1)
            if d.v * d.v > q.v:
                break
        fr.free(d)

    def _product_mod(self, tape, q: int, fr, ws):
        a, b, c, d = fr.int(1), fr.int(0), fr.int(0), fr.int(1)
        mats = self.matrices
        for x in scan(tape, fr):
            (e, f), (g, h) = mats[x]
            na, nb = (a.v * e + b.v * g) % q, (a.v * f + b.v * h) % q
            nc, nd = (c.v * e + d.v * g) % q, (c.v * f + d.v * h) % q
            a.set(na)
            b.set(nb)
            c.set(nc)
            d.set(nd)
        out = (a.v, b.v, c.v, d.v)
        for reg in (a, b, c, d):
            fr.free(reg)
        return out


def free_word_problem(alphabet: Alphabet) -> ModularWordProblem:
    """Word problem of the free group on ``alphabet`` (any rank)."""
    matrices, abelian = {}, {}
    for i, g in enumerate(alphabet.generators):
        m = free_basis_matrix(i)
        matrices[g] = m
        matrices[invert(g)] = _inv2(m)
        abelian[g] = (i, 1)
        abelian[invert(g)] = (i, -1)
    return ModularWordProblem(matrices, abelian, [0] * alphabet.rank)


PSL_S = ((0, -1), (1, 0))
PSL_U = ((0, -1), (1, 1))


def modular_c2_c3_word_problem(alphabet: Alphabet, order2: str, order3: str) -> ModularWordProblem:
    """Word problem of C2 * C3 through its faithful image PSL(2,Z)."""
    matrices = {order2: PSL_S, invert(order2): _inv2(PSL_S),
                order3: PSL_U, invert(order3): _inv2(PSL_U)}
    abelian = {order2: (0, 1), invert(order2): (0, -1),
               order3: (1, 1), invert(order3): (1, -1)}
    return ModularWordProblem(matrices, abelian, [2, 3], projective=True)


class SyllableStackWordProblem:
    """Word problem of ``C_m * C_n`` by syllable cancellation.

    The syllable stack lives in registers, so its space is metered; it is
    linear in the worst case and is reported rather than claimed logspace.
    """

    def __init__(self, left_order: int, right_order: int):
        self.orders = (left_order, right_order)

    def trivial(self, tape: Tape, ws: Workspace) -> bool:
        with ws.frame() as fr:
            stack = []
            for x in scan(tape, fr):
                side = int(x[0])
                sign = split_token(x)[1]
                order = self.orders[side]
                if stack and stack[-1].v % 2 == side:
                    top = stack.pop()
                    e = (top.v // 2 + sign) % order
                    fr.free(top)
                else:
                    e = sign % order
                if e:
                    stack.append(fr.int(2 * e + side))
            return not stack


def product_word_problem(left: GroupExpr, right: GroupExpr):
    """Registered word problem for ``FreeProd(left, right)`` over its prefixed alphabet."""
    check_freeprod_oracle(left, right)
    if isinstance(left, Cyclic):
        return cyclic_product_word_problem(left.order, right.order)
    return free_word_problem(FreeProd(left, right).alphabet)


def cyclic_product_word_problem(m: int, n: int):
    if (m, n) == (2, 3):
        return modular_c2_c3_word_problem(Alphabet(["0.c", "1.c"]), "0.c", "1.c")
    if (m, n) == (3, 2):
        return modular_c2_c3_word_problem(Alphabet(["0.c", "1.c"]), "1.c", "0.c")
    return SyllableStackWordProblem(m, n)


def free_wp_metered(word: Sequence[str], rank: int, ws: Workspace | None = None) -> bool:
    """True iff ``word`` over ``x1..x<rank>`` is trivial in the free group."""
    alphabet = Free(rank).alphabet
    for x in word:
        if x not in alphabet:
            raise UnknownToken(x)
    ws = ws or Workspace()
    return free_word_problem(alphabet).trivial(WordTape(ws, word), ws)


__all__ = [
    "GroupElement", "oracle_equal", "Oracle", "FreeOracle", "ZOracle", "DirectOracle",
    "BSMatrix", "BSOracle", "UTOracle", "WreathOracle", "FreeProdOracle", "TorusOracle",
    "SubgroupOracle", "oracle_for", "evaluate", "ModularWordProblem", "free_word_problem",
    "SyllableStackWordProblem", "product_word_problem", "free_wp_metered",
]
