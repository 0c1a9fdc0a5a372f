"""Truncated Laurent series in q_w = exp(2 pi i tau / w) with coefficients in Q(zeta_N).

A QExp stores the coefficients of q_w^start, ..., q_w^(prec-1).  Coefficients at
exponents >= prec are unknown unless the series is flagged exact, in which case
they are zero.  Products are computed by Kronecker substitution: a series whose
coefficients live in a degree-e power basis is packed into one integer
polynomial with slots of 2e-1 bits of exponent room per power of q, multiplied
with flint, and unpacked.
"""

from __future__ import annotations

import math
from fractions import Fraction
from functools import lru_cache, reduce
from typing import Sequence

import flint

from .cyclotomic import CycNum, _reduce_cyclic, degree, galois_apply

INF = math.inf


class UndeterminedError(ValueError):
    """Raised when a question about a series cannot be settled at its precision."""


def _lcm(a: int, b: int) -> int:
    return a * b // math.gcd(a, b)


class QExp:
    __slots__ = ("level", "width", "start", "coeffs", "prec", "exact")

    def __init__(
        self,
        level: int,
        width: int,
        start: int,
        coeffs: Sequence[CycNum],
        prec: int | None = None,
        exact: bool = False,
    ):
        if level % width:
            raise ValueError(f"width {width} does not divide level {level}")
        coeffs = list(coeffs)
        for c in coeffs:
            if c.level != level:
                raise ValueError("coefficient level mismatch")
        if exact:
            prec = start + len(coeffs)
        elif prec is None:
            raise ValueError("inexact series need an explicit precision")
        if prec < start:
            raise ValueError("start must not exceed prec")
        n = prec - start
        if len(coeffs) > n:
            coeffs = coeffs[:n]
        elif len(coeffs) < n:
            coeffs += [CycNum.zero(level)] * (n - len(coeffs))
        self.level = level
        self.width = width
        self.start = start
        self.coeffs = coeffs
        self.prec = prec
        self.exact = exact

    # -- constructors -------------------------------------------------------
    @classmethod
    def from_ints(cls, level: int, width: int, start: int, ints: Sequence[int], prec=None, exact=False) -> QExp:
        return cls(level, width, start, [CycNum.rational(level, x) for x in ints], prec, exact)

    @classmethod
    def zero(cls, level: int, width: int = 1, prec: int | None = None) -> QExp:
        if prec is None:
            return cls(level, width, 0, [], exact=True)
        return cls(level, width, 0, [], prec)

    @classmethod
    def monomial(cls, level: int, width: int, n: int, c: CycNum | int = 1) -> QExp:
        if not isinstance(c, CycNum):
            c = CycNum.rational(level, c)
        return cls(level, width, n, [c], exact=True)

    # -- access -------------------------------------------------------------
    @property
    def eff_prec(self) -> float:
        return INF if self.exact else self.prec

    def __getitem__(self, n: int) -> CycNum:
        if n < self.start:
            return CycNum.zero(self.level)
        if n >= self.prec:
            if self.exact:
                return CycNum.zero(self.level)
            raise UndeterminedError(f"coefficient {n} lies beyond precision {self.prec}")
        return self.coeffs[n - self.start]

    def items(self):
        for i, c in enumerate(self.coeffs):
            if not c.is_zero():
                yield self.start + i, c

    def __repr__(self) -> str:
        terms = [f"({c})*q{self.width}^{n}" for n, c in list(self.items())[:6]]
        tail = "exact" if self.exact else f"O(q{self.width}^{self.prec})"
        return f"QExp[N={self.level}](" + " + ".join(terms + [tail]) + ")"

    def __eq__(self, other) -> bool:
        if not isinstance(other, QExp):
            return NotImplemented
        if self.level != other.level:
            return False
        w = _lcm(self.width, other.width)
        a, b = self.change_width(w), other.change_width(w)
        if a.exact != b.exact or (not a.exact and a.prec != b.prec):
            return False
        lo = min(a.start, b.start)
        hi = max(a.prec, b.prec)
        return all(a[n] == b[n] for n in range(lo, hi))

    __hash__ = None

    def agrees_with(self, other: QExp) -> bool:
        """Coefficient equality up to the smaller of the two precisions."""
        w = _lcm(self.width, other.width)
        a, b = self.change_width(w), other.change_width(w)
        hi = min(a.eff_prec, b.eff_prec)
        if hi == INF:
            hi = max(a.prec, b.prec)
        lo = min(a.start, b.start)
        return all(a[n] == b[n] for n in range(lo, int(hi)))

    def is_integral(self) -> bool:
        return all(c.integral for c in self.coeffs)

    def is_zero_to_prec(self) -> bool:
        return all(c.is_zero() for c in self.coeffs)

    # -- reindexing ---------------------------------------------------------
    def change_width(self, w: int) -> QExp:
        """Rewrite in q_w for a multiple w of the current width."""
        if w == self.width:
            return self
        if w % self.width or self.level % w:
            raise ValueError(f"cannot refine width {self.width} to {w} at level {self.level}")
        r = w // self.width
        z = CycNum.zero(self.level)
        out = []
        for c in self.coeffs:
            out.append(c)
            out.extend([z] * (r - 1))
        if self.exact:
            return QExp(self.level, w, self.start * r, out, exact=True)
        return QExp(self.level, w, self.start * r, out[: (self.prec - self.start) * r], self.prec * r)

    def coarsen(self, w: int) -> QExp:
        """Rewrite in q_w for a divisor w of the width; all exponents must lie on the q_w grid."""
        if w == self.width:
            return self
        if self.width % w:
            raise ValueError(f"{w} does not divide width {self.width}")
        r = self.width // w
        for n, _ in self.items():
            if n % r:
                raise ValueError(f"exponent {n} of q_{self.width} is off the q_{w} grid")
        start = -((-self.start) // r)
        prec = -((-self.prec) // r)
        coeffs = [self[n * r] for n in range(start, prec)]
        return QExp(self.level, w, start, coeffs, prec, self.exact)

    def truncate(self, prec: int) -> QExp:
        prec = max(prec, self.start)
        if not self.exact and prec > self.prec:
            raise UndeterminedError("cannot raise precision by truncation")
        return QExp(self.level, self.width, self.start, self.coeffs[: prec - self.start], prec)

    def lift(self, level: int) -> QExp:
        """Same series viewed with coefficients in Q(zeta_level), self.level | level."""
        return QExp(level, self.width, self.start, [c.lift(level) for c in self.coeffs], self.prec, self.exact)

    def shift(self, k: int) -> QExp:
        """Multiply by q_w^k."""
        return QExp(self.level, self.width, self.start + k, self.coeffs, self.prec + k, self.exact)

    def galois(self, d: int) -> QExp:
        return QExp(self.level, self.width, self.start, [galois_apply(d, c) for c in self.coeffs], self.prec, self.exact)

    def map_coeffs(self, fn) -> QExp:
        return QExp(self.level, self.width, self.start, [fn(n, c) for n, c in zip(range(self.start, self.prec), self.coeffs)], self.prec, self.exact)

    # -- arithmetic ---------------------------------------------------------
    def _common(self, other: QExp) -> tuple[QExp, QExp]:
        if not isinstance(other, QExp):
            raise TypeError("expected a QExp")
        if self.level != other.level:
            raise ValueError(f"level mismatch: {self.level} vs {other.level}")
        w = _lcm(self.width, other.width)
        return self.change_width(w), other.change_width(w)

    def __neg__(self) -> QExp:
        return QExp(self.level, self.width, self.start, [-c for c in self.coeffs], self.prec, self.exact)

    def __add__(self, other) -> QExp:
        if isinstance(other, (int, Fraction, CycNum)):
            other = QExp.monomial(self.level, self.width, 0, other)
        a, b = self._common(other)
        prec = min(a.eff_prec, b.eff_prec)
        exact = prec == INF
        start = min(a.start, b.start)
        top = max(a.prec, b.prec) if exact else int(prec)
        coeffs = [a[n] + b[n] for n in range(start, top)]
        return QExp(a.level, a.width, start, coeffs, None if exact else top, exact)

    __radd__ = __add__

    def __sub__(self, other) -> QExp:
        if isinstance(other, (int, Fraction, CycNum)):
            return self + (-other)
        return self + (-other)

    def __rsub__(self, other) -> QExp:
        return (-self) + other

    def scale(self, c) -> QExp:
        if not isinstance(c, CycNum):
            if isinstance(c, int):
                return QExp(self.level, self.width, self.start, [x * c for x in self.coeffs], self.prec, self.exact)
            c = CycNum.rational(self.level, c)
        return QExp(self.level, self.width, self.start, [x * c for x in self.coeffs], self.prec, self.exact)

    def __mul__(self, other) -> QExp:
        if isinstance(other, (int, Fraction, CycNum)):
            return self.scale(other)
        a, b = self._common(other)
        start = a.start + b.start
        prec = min(a.eff_prec + b.start, b.eff_prec + a.start)
        exact = prec == INF
        if exact:
            n_terms = len(a.coeffs) + len(b.coeffs) - 1 if a.coeffs and b.coeffs else 0
        else:
            prec = int(prec)
            n_terms = prec - start
        coeffs = series_mul(a.level, a.coeffs, b.coeffs, max(n_terms, 0))
        return QExp(a.level, a.width, start, coeffs, None if exact else prec, exact)

    __rmul__ = __mul__

    def __pow__(self, e: int) -> QExp:
        if e < 0:
            raise ValueError("negative powers are not supported")
        result = QExp.monomial(self.level, self.width, 0, 1)
        base = self
        while e:
            if e & 1:
                result = result * base
            e >>= 1
            if e:
                base = base * base
        return result

    # -- analysis -----------------------------------------------------------
    def vanishing_order(self) -> float | int:
        return vanishing_order(self)

    def leading(self) -> tuple[int, CycNum]:
        n = vanishing_order(self)
        if n == INF:
            raise ValueError("zero series has no leading term")
        return n, self[n]

    # -- serialization ------------------------------------------------------
    def to_json(self) -> dict:
        return {
            "level": self.level,
            "width": self.width,
            "start": self.start,
            "prec": self.prec,
            "exact": self.exact,
            "coeffs": [c.to_json() for c in self.coeffs],
        }

    @classmethod
    def from_json(cls, data: dict) -> QExp:
        level = data["level"]
        coeffs = [CycNum.from_json(level, c) for c in data["coeffs"]]
        return cls(level, data["width"], data["start"], coeffs, data["prec"], data.get("exact", False))


def vanishing_order(f: QExp) -> float | int:
    """Least exponent (in q_w units) with a nonzero coefficient; inf for the exact zero series."""
    for i, c in enumerate(f.coeffs):
        if not c.is_zero():
            return f.start + i
    if f.exact:
        return INF
    raise UndeterminedError(f"all coefficients below q_{f.width}^{f.prec} vanish; undetermined at this precision")


def series_mul(level: int, a: Sequence[CycNum], b: Sequence[CycNum], n_terms: int) -> list[CycNum]:
    """First n_terms coefficients of the product of two coefficient lists."""
    if n_terms <= 0:
        return []
    deg = degree(level)
    if not a or not b:
        return [CycNum.zero(level)] * n_terms
    da = reduce(_lcm, (c.den for c in a), 1)
    db = reduce(_lcm, (c.den for c in b), 1)
    slot = 2 * deg - 1
    pa = _pack(a[:n_terms], da, slot)
    pb = _pack(b[:n_terms], db, slot)
    prod = pa.mul_low(pb, n_terms * slot)
    return _unpack(level, prod, n_terms, slot, da * db)


def _pack(coeffs: Sequence[CycNum], den: int, slot: int) -> flint.fmpz_poly:
    vec = [0] * (len(coeffs) * slot)
    for n, c in enumerate(coeffs):
        s = den // c.den
        base = n * slot
        for i, x in enumerate(c.num):
            if x:
                vec[base + i] = x * s
    return flint.fmpz_poly(vec)


def _unpack(level: int, poly: flint.fmpz_poly, n_terms: int, slot: int, den: int) -> list[CycNum]:
    raw = [int(x) for x in poly.coeffs()]
    raw += [0] * (n_terms * slot - len(raw))
    out = []
    for n in range(n_terms):
        chunk = raw[n * slot : (n + 1) * slot]
        out.append(CycNum(level, _reduce_cyclic(level, chunk), den))
    return out


# -- standard series over Z ------------------------------------------------------


@lru_cache(maxsize=None)
def _euler_product(prec: int) -> flint.fmpz_poly:
    """prod_{n>=1} (1 - q^n) modulo q^prec, by direct multiplication."""
    p = flint.fmpz_poly([1])
    for n in range(1, prec):
        p = p.mul_low(flint.fmpz_poly([1] + [0] * (n - 1) + [-1]), prec)
    return p


@lru_cache(maxsize=None)
def _partitions(prec: int) -> tuple[int, ...]:
    """Partition numbers p(0..prec-1) by Euler's pentagonal recurrence."""
    p = [1] + [0] * (prec - 1)
    for n in range(1, prec):
        total = 0
        k = 1
        while True:
            g1 = k * (3 * k - 1) // 2
            if g1 > n:
                break
            sign = 1 if k % 2 else -1
            total += sign * p[n - g1]
            g2 = k * (3 * k + 1) // 2
            if g2 <= n:
                total += sign * p[n - g2]
            k += 1
        p[n] = total
    return tuple(p)


def _int_series(poly: flint.fmpz_poly, start: int, prec: int, level: int) -> QExp:
    vals = [int(x) for x in poly.coeffs()]
    n = prec - start
    vals = (vals + [0] * n)[:n]
    return QExp.from_ints(level, 1, start, vals, prec)


def delta_coefficients(m: int, prec: int) -> list[int]:
    """Integer coefficients a_0..a_{prec-1} of Delta^m = q^m prod (1-q^n)^(24m)."""
    if prec <= m:
        return [0] * max(prec, 0)
    body = _euler_product(prec - m).pow_trunc(24 * m, prec - m)
    vals = [int(x) for x in body.coeffs()]
    vals += [0] * (prec - m - len(vals))
    return [0] * m + vals


def delta_power(m: int, prec: int, level: int = 1) -> QExp:
    """Delta^m in q = q_1, known modulo q^prec."""
    if m < 1:
        raise ValueError("m must be positive")
    if prec <= m:
        raise ValueError("prec must exceed m")
    return QExp.from_ints(level, 1, 0, delta_coefficients(m, prec), prec)


def h_coefficients(prec: int) -> list[int]:
    """Coefficients of h(q) = prod (1-q^n)^(-24) modulo q^prec."""
    part = flint.fmpz_poly(list(_partitions(prec)))
    vals = [int(x) for x in part.pow_trunc(24, prec).coeffs()]
    return vals + [0] * (prec - len(vals))


def h_series(prec: int, level: int = 1) -> QExp:
    if prec < 2:
        raise ValueError("prec must be at least 2")
    return QExp.from_ints(level, 1, 0, h_coefficients(prec), prec)


def sigma(n: int, k: int) -> int:
    return sum(d**k for d in range(1, n + 1) if n % d == 0)


@lru_cache(maxsize=None)
def j_coefficients(prec: int) -> tuple[int, ...]:
    """Coefficients of J = q^-1 + 744 + ... at exponents -1..prec-1."""
    n = prec + 1
    e4 = flint.fmpz_poly([1] + [240 * sigma(i, 3) for i in range(1, n)])
    h = flint.fmpz_poly(h_coefficients(n))
    body = e4.pow_trunc(3, n).mul_low(h, n)
    vals = [int(x) for x in body.coeffs()]
    return tuple(vals + [0] * (n - len(vals)))


def j_series(prec: int, level: int = 1) -> QExp:
    """The j-invariant in q, known modulo q^prec."""
    if prec < 2:
        raise ValueError("prec must be at least 2")
    return QExp.from_ints(level, 1, -1, list(j_coefficients(prec)), prec)
