"""Weight-one Eisenstein series E_alpha of level N and products of them.

E_alpha is taken to be its q_N-expansion

    c_0 + sum_{m,n>=1, m=a} z^(bn) q_N^(mn) - sum_{m,n>=1, m=-a} z^(-bn) q_N^(mn)

for alpha = (a, b), z = zeta_N.  GL2(Z/N) acts by E_alpha * A = E_(alpha A).

Products are computed on packed integer polynomials.  A coefficient sum_e c_e z^e
of q_N^n (exponents e taken in [0, N)) becomes sum_e c_e X^(n*S + e).  With
S = k(N-1) + 1 a product of k packed series never carries one q_N slot into the
next, so a single flint multiplication does all the work and the z-exponents
are folded modulo N only at the end.
"""

from __future__ import annotations

import cmath
import math
import random
from dataclasses import dataclass
from functools import lru_cache
from typing import Iterable, Sequence

import flint

from .congruence import Mat, mat_det, mat_mul, row_times
from .cyclotomic import CycNum, _reduce_cyclic, degree
from .qexp import QExp

Index = tuple[int, int]


@dataclass(frozen=True)
class EisIndex:
    alpha: Index
    level: int

    def __post_init__(self):
        a, b = self.alpha
        object.__setattr__(self, "alpha", (a % self.level, b % self.level))

    def star(self, A: Mat) -> EisIndex:
        return EisIndex(row_times(self.alpha, A, self.level), self.level)

    def __neg__(self) -> EisIndex:
        return EisIndex((-self.alpha[0], -self.alpha[1]), self.level)


@dataclass(frozen=True)
class TraceTerm:
    """(2N)^k sum_{g in G} z^(j det g) E_(alpha_1 g) ... E_(alpha_k g)."""

    zeta_power: int
    indices: tuple[Index, ...]
    level: int

    @property
    def weight(self) -> int:
        return len(self.indices)

    def to_json(self) -> dict:
        return {"j": self.zeta_power, "alphas": [list(a) for a in self.indices]}

    @classmethod
    def from_json(cls, data: dict, level: int) -> TraceTerm:
        return cls(int(data["j"]), tuple((int(a) % level, int(b) % level) for a, b in data["alphas"]), level)


def star_on_index(alpha: EisIndex, A: Mat) -> EisIndex:
    return alpha.star(A)


def normalize_sign(beta: Index, N: int) -> tuple[Index, int]:
    """Return (beta', s) with E_beta = s E_beta' and beta' the lesser of +-beta."""
    neg = ((-beta[0]) % N, (-beta[1]) % N)
    if neg < beta:
        return neg, -1
    return beta, 1


def constant_term(beta: Index, N: int) -> CycNum:
    a, b = beta[0] % N, beta[1] % N
    if a == 0 and b == 0:
        return CycNum.zero(N)
    if a == 0:
        z = CycNum.zeta(N, b)
        return (1 + z) / (2 * (1 - z))
    return CycNum.rational(N, 1) / 2 - CycNum.rational(N, a) / N


@lru_cache(maxsize=None)
def _cyclic_coeffs(beta: Index, N: int, prec: int) -> tuple[tuple[int, ...], ...]:
    """Integer cyclic vectors (length N) of the q_N coefficients n = 1..prec-1 of E_beta."""
    a, b = beta
    out = [[0] * N for _ in range(prec)]
    for m in range(1, prec):
        plus = m % N == a
        minus = m % N == (-a) % N
        if not (plus or minus):
            continue
        for n in range(1, (prec - 1) // m + 1):
            row = out[m * n]
            if plus:
                row[(b * n) % N] += 1
            if minus:
                row[(-b * n) % N] -= 1
    return tuple(tuple(r) for r in out)


def eisenstein_qexp(alpha: EisIndex | Index, prec: int, N: int | None = None) -> QExp:
    """q_N-expansion of E_alpha modulo q_N^prec (width N)."""
    if isinstance(alpha, EisIndex):
        N, beta = alpha.level, alpha.alpha
    else:
        if N is None:
            raise ValueError("level required")
        beta = (alpha[0] % N, alpha[1] % N)
    if prec < 1:
        raise ValueError("prec must be at least 1")
    cyc = _cyclic_coeffs(beta, N, prec)
    coeffs = [constant_term(beta, N)] + [CycNum.from_cyclic(N, cyc[n]) for n in range(1, prec)]
    return QExp(N, N, 0, coeffs, prec)


# -- packed engine -----------------------------------------------------------------


@lru_cache(maxsize=None)
def _scaled_constant(beta: Index, N: int) -> tuple[int, ...]:
    c = constant_term(beta, N) * (2 * N)
    if not c.integral:
        raise ArithmeticError("2N E_beta has a non-integral constant term")
    return c.num


class PackedEngine:
    """Products of k scaled Eisenstein series (2N E_beta) modulo q_N^prec."""

    def __init__(self, N: int, k: int, prec: int):
        self.N = N
        self.k = k
        self.prec = prec
        self.slot = k * (N - 1) + 1
        self._single: dict[Index, flint.fmpz_poly] = {}
        self._prod: dict[tuple[Index, ...], flint.fmpz_poly] = {}

    def single(self, beta: Index) -> flint.fmpz_poly:
        p = self._single.get(beta)
        if p is None:
            N, S = self.N, self.slot
            vec = [0] * (self.prec * S)
            for e, c in enumerate(_scaled_constant(beta, self.N)):
                vec[e] = c
            cyc = _cyclic_coeffs(beta, N, self.prec)
            for n in range(1, self.prec):
                base = n * S
                for e, c in enumerate(cyc[n]):
                    if c:
                        vec[base + e] = 2 * N * c
            p = flint.fmpz_poly(vec)
            self._single[beta] = p
        return p

    def product(self, key: tuple[Index, ...]) -> flint.fmpz_poly:
        """Packed product for a sorted tuple of sign-normalized nonzero indices."""
        p = self._prod.get(key)
        if p is None:
            if len(key) == 1:
                p = self.single(key[0])
            else:
                p = self.product(key[:-1]).mul_low(self.single(key[-1]), self.prec * self.slot)
            self._prod[key] = p
        return p

    def signed_product(self, betas: Iterable[Index]) -> tuple[int, tuple[Index, ...] | None]:
        """(sign, key) with prod 2N E_beta = sign * product(key); key None for the zero product."""
        N = self.N
        sign = 1
        key = []
        for beta in betas:
            if beta == (0, 0):
                return 0, None
            nb, s = normalize_sign(beta, N)
            sign *= s
            key.append(nb)
        return sign, tuple(sorted(key))

    def unpack(self, poly: flint.fmpz_poly) -> list[list[int]]:
        """Fold a packed polynomial into cyclic vectors of length N, one per power of q_N."""
        N, S = self.N, self.slot
        raw = [int(x) for x in poly.coeffs()]
        out = []
        for n in range(self.prec):
            chunk = raw[n * S : (n + 1) * S]
            cyc = [0] * N
            for e, c in enumerate(chunk):
                if c:
                    cyc[e % N] += c
            out.append(cyc)
        return out


def cyclic_to_qexp(N: int, rows: Sequence[Sequence[int]], width: int | None = None, den: int = 1) -> QExp:
    coeffs = [CycNum(N, _reduce_cyclic(N, r), den) for r in rows]
    return QExp(N, width or N, 0, coeffs, len(rows))


@lru_cache(maxsize=32)
def _engine(N: int, k: int, prec: int) -> PackedEngine:
    return PackedEngine(N, k, prec)


def engine(N: int, k: int, prec: int) -> PackedEngine:
    return _engine(N, k, prec)


def scaled_product(indices: Sequence[EisIndex | Index], prec: int, N: int | None = None) -> QExp:
    """(2N)^k E_alpha_1 ... E_alpha_k modulo q_N^prec."""
    betas = []
    for a in indices:
        if isinstance(a, EisIndex):
            N = a.level
            betas.append(a.alpha)
        else:
            betas.append(a)
    if N is None or not betas:
        raise ValueError("need a level and at least one index")
    betas = [(a % N, b % N) for a, b in betas]
    eng = engine(N, len(betas), prec)
    sign, key = eng.signed_product(betas)
    if key is None:
        return QExp.zero(N, N, prec)
    rows = eng.unpack(eng.product(key))
    if sign < 0:
        rows = [[-x for x in r] for r in rows]
    return cyclic_to_qexp(N, rows)


def trace_cyclic(term: TraceTerm, group_elems: Sequence[Mat], A: Mat, prec: int) -> list[list[int]]:
    """Cyclic coefficient vectors of (trace form) * A modulo q_N^prec.

    group_elems must hold one element from each pair {g, -g} of G (the weight is
    even, so both members contribute the same product); the result includes the
    factor 2 for the pairing.
    """
    N, k = term.level, term.weight
    eng = engine(N, k, prec)
    detA = mat_det(A, N)
    by_det: dict[int, list[tuple[int, tuple[Index, ...]]]] = {}
    for g in group_elems:
        gA = mat_mul(g, A, N)
        sign, key = eng.signed_product(row_times(al, gA, N) for al in term.indices)
        if key is None:
            continue
        rot = (term.zeta_power * mat_det(g, N) * detA) % N
        by_det.setdefault(rot, []).append((sign, key))
    total = [[0] * N for _ in range(prec)]
    for rot, items in by_det.items():
        acc = flint.fmpz_poly([])
        for sign, key in items:
            if sign > 0:
                acc += eng.product(key)
            else:
                acc -= eng.product(key)
        rows = eng.unpack(acc)
        for n in range(prec):
            src = rows[n]
            dst = total[n]
            for e in range(N):
                if src[e]:
                    dst[(e + rot) % N] += 2 * src[e]
    return total


def half_group(elems: Iterable[Mat], N: int) -> list[Mat]:
    """One representative of each pair {g, -g}."""
    out = []
    for g in sorted(elems):
        ng = tuple((-x) % N for x in g)
        if g <= ng:
            out.append(g)
    return out


# -- numerical transformation check ---------------------------------------------------


def _embed(c: CycNum, zeta: complex) -> complex:
    total = 0j
    p = 1 + 0j
    for x in c.num:
        if x:
            total += x * p
        p *= zeta
    return total / c.den


def evaluate_qexp(f: QExp, tau: complex) -> complex:
    """Evaluate a q_N-series (width N) at tau under zeta_N -> exp(2 pi i / N)."""
    N = f.level
    zeta = cmath.exp(2j * math.pi / N)
    q = cmath.exp(2j * math.pi * tau / f.width)
    total = 0j
    for n, c in f.items():
        total += _embed(c, zeta) * q**n
    return total


def _tail_bound(r: float, prec: int) -> float:
    """Upper bound for sum_{n>=prec} 4 sqrt(n) r^n, using |c_n| <= 2 d(n) <= 4 sqrt(n)."""
    ratio = r * math.sqrt((prec + 1) / prec)
    if ratio >= 1:
        return math.inf
    return 4 * math.sqrt(prec) * r**prec / (1 - ratio)


def transformation_oracle(
    alpha: EisIndex,
    gamma: Sequence[int],
    tau: complex,
    prec: int = 400,
    tol: float = 1e-6,
) -> float:
    """|(c tau + d)^-1 E_alpha(gamma tau) - E_(alpha gamma)(tau)| from truncated expansions."""
    a, b, c, d = gamma
    if a * d - b * c != 1:
        raise ValueError("gamma must lie in SL2(Z)")
    N = alpha.level
    gtau = (a * tau + b) / (c * tau + d)
    for t in (tau, gtau):
        r = math.exp(-2 * math.pi * t.imag / N)
        if _tail_bound(r, prec) > tol / 10:
            raise ValueError("insufficient precision for requested tolerance")
    lhs = evaluate_qexp(eisenstein_qexp(alpha, prec), gtau) / (c * tau + d)
    rhs = evaluate_qexp(eisenstein_qexp(alpha.star((a % N, b % N, c % N, d % N)), prec), tau)
    return abs(lhs - rhs)


def random_sl2z(rng: random.Random, bound: int = 2) -> tuple[int, int, int, int]:
    """Random element of SL2(Z) with |c|, |d| <= bound."""
    while True:
        c = rng.randint(-bound, bound)
        d = rng.randint(-bound, bound)
        if math.gcd(c, d) != 1:
            continue
        # solve a d - b c = 1
        g, x, y = _ext_gcd(d, -c)
        a, b = x, y
        shift = rng.randint(-1, 1)
        a, b = a + shift * c, b + shift * d
        assert a * d - b * c == 1
        return a, b, c, d


def _ext_gcd(p: int, q: int) -> tuple[int, int, int]:
    if q == 0:
        return (p, 1, 0) if p >= 0 else (-p, -1, 0)
    g, x, y = _ext_gcd(q, p % q)
    return g, y, x - (p // q) * y
