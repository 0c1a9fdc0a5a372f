"""Exact arithmetic in Q(zeta_N) and rigorous absolute values at its infinite places.

Elements are stored in the power basis 1, z, ..., z^(phi(N)-1) modulo the N-th
cyclotomic polynomial, as an integer numerator vector over a positive common
denominator.  The power basis is an integral basis of Z[zeta_N], so an element is
an algebraic integer exactly when its reduced denominator is 1.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache, reduce
from typing import Iterable, Sequence

import flint


def euler_phi(n: int) -> int:
    result = n
    p = 2
    m = n
    while p * p <= m:
        if m % p == 0:
            while m % p == 0:
                m //= p
            result -= result // p
        p += 1
    if m > 1:
        result -= result // m
    return result


def units(n: int) -> tuple[int, ...]:
    """The units of Z/nZ in increasing order."""
    if n == 1:
        return (0,)
    return tuple(d for d in range(1, n) if math.gcd(d, n) == 1)


def unit_subgroup(n: int, gens: Iterable[int]) -> frozenset[int]:
    """Subgroup of (Z/nZ)^x generated by ``gens``."""
    out = {1 % n}
    frontier = [1 % n]
    gens = [g % n for g in gens]
    for g in gens:
        if math.gcd(g, n) != 1:
            raise ValueError(f"{g} is not a unit modulo {n}")
    while frontier:
        x = frontier.pop()
        for g in gens:
            y = x * g % n
            if y not in out:
                out.add(y)
                frontier.append(y)
    return frozenset(out)


@dataclass(frozen=True)
class _Field:
    level: int
    degree: int
    # reduction of z^e (0 <= e < 2*level) to the power basis
    red: tuple[tuple[int, ...], ...]


@lru_cache(maxsize=None)
def _field(n: int) -> _Field:
    if n < 1:
        raise ValueError("level must be positive")
    phi_poly = flint.fmpz_poly.cyclotomic(n)
    deg = phi_poly.degree()
    red = []
    for e in range(2 * n):
        r = (flint.fmpz_poly([0] * e + [1]) % phi_poly).coeffs()
        vec = [int(c) for c in r] + [0] * (deg - len(r))
        red.append(tuple(vec))
    return _Field(n, deg, tuple(red))


def degree(n: int) -> int:
    return _field(n).degree


def _reduce_cyclic(n: int, cyc: Sequence[int]) -> list[int]:
    """Reduce sum cyc[e] z^e (any length) into the power basis."""
    F = _field(n)
    out = [0] * F.degree
    red = F.red
    for e, c in enumerate(cyc):
        if c:
            r = red[e % n]
            for i, ri in enumerate(r):
                if ri:
                    out[i] += c * ri
    return out


class CycNum:
    """An element of Q(zeta_N), immutable and canonically reduced."""

    __slots__ = ("level", "num", "den")

    def __init__(self, level: int, num: Sequence[int], den: int = 1):
        deg = _field(level).degree
        num = [int(x) for x in num]
        if len(num) > deg:
            num = _reduce_cyclic(level, num)
        elif len(num) < deg:
            num = num + [0] * (deg - len(num))
        if den == 0:
            raise ZeroDivisionError("zero denominator")
        if den < 0:
            num = [-x for x in num]
            den = -den
        g = reduce(math.gcd, num, den)
        if g > 1:
            num = [x // g for x in num]
            den //= g
        self.level = level
        self.num = tuple(num)
        self.den = den

    # -- constructors -------------------------------------------------------
    @classmethod
    def rational(cls, level: int, value) -> CycNum:
        q = Fraction(value)
        deg = degree(level)
        return cls(level, [q.numerator] + [0] * (deg - 1), q.denominator)

    @classmethod
    def zero(cls, level: int) -> CycNum:
        return cls(level, [0] * degree(level))

    @classmethod
    def one(cls, level: int) -> CycNum:
        return cls.rational(level, 1)

    @classmethod
    def zeta(cls, level: int, e: int = 1) -> CycNum:
        return cls(level, _field(level).red[e % level])

    @classmethod
    def from_cyclic(cls, level: int, cyc: Sequence[int], den: int = 1) -> CycNum:
        """Element sum cyc[e] * zeta^e / den for an arbitrary integer vector."""
        return cls(level, _reduce_cyclic(level, cyc), den)

    @classmethod
    def from_fractions(cls, level: int, coeffs: Sequence) -> CycNum:
        fr = [Fraction(c) for c in coeffs]
        den = reduce(lambda a, b: a * b // math.gcd(a, b), (f.denominator for f in fr), 1)
        return cls(level, [int(f * den) for f in fr], den)

    # -- views --------------------------------------------------------------
    @property
    def coeffs(self) -> tuple[Fraction, ...]:
        return tuple(Fraction(x, self.den) for x in self.num)

    @property
    def integral(self) -> bool:
        return self.den == 1

    def is_zero(self) -> bool:
        return not any(self.num)

    def is_rational(self) -> bool:
        return not any(self.num[1:])

    def to_fraction(self) -> Fraction:
        if not self.is_rational():
            raise ValueError("element is not rational")
        return Fraction(self.num[0], self.den)

    def __repr__(self) -> str:
        terms = []
        for i, c in enumerate(self.coeffs):
            if c:
                terms.append(f"{c}" if i == 0 else f"{c}*z^{i}")
        return f"CycNum[{self.level}]({' + '.join(terms) or '0'})"

    # -- arithmetic ---------------------------------------------------------
    def _coerce(self, other) -> CycNum:
        if isinstance(other, CycNum):
            if other.level != self.level:
                raise ValueError(f"level mismatch: {self.level} vs {other.level}")
            return other
        if isinstance(other, (int, Fraction)):
            return CycNum.rational(self.level, other)
        return NotImplemented

    def __eq__(self, other) -> bool:
        if isinstance(other, (int, Fraction)):
            other = CycNum.rational(self.level, other)
        if not isinstance(other, CycNum):
            return NotImplemented
        return self.level == other.level and self.den == other.den and self.num == other.num

    def __hash__(self) -> int:
        return hash((self.level, self.num, self.den))

    def __neg__(self) -> CycNum:
        return CycNum(self.level, [-x for x in self.num], self.den)

    def __add__(self, other) -> CycNum:
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        if self.den == other.den:
            return CycNum(self.level, [a + b for a, b in zip(self.num, other.num)], self.den)
        return CycNum(
            self.level,
            [a * other.den + b * self.den for a, b in zip(self.num, other.num)],
            self.den * other.den,
        )

    __radd__ = __add__

    def __sub__(self, other) -> CycNum:
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return self + (-other)

    def __rsub__(self, other) -> CycNum:
        return (-self) + other

    def __mul__(self, other) -> CycNum:
        if isinstance(other, int):
            return CycNum(self.level, [a * other for a in self.num], self.den)
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        n = self.level
        deg = len(self.num)
        cyc = [0] * (2 * deg)
        for i, a in enumerate(self.num):
            if a:
                for j, b in enumerate(other.num):
                    if b:
                        cyc[i + j] += a * b
        return CycNum(self.level, _reduce_cyclic(n, cyc), self.den * other.den)

    __rmul__ = __mul__

    def __pow__(self, e: int) -> CycNum:
        if e < 0:
            return self.inverse() ** (-e)
        result = CycNum.one(self.level)
        base = self
        while e:
            if e & 1:
                result = result * base
            base = base * base
            e >>= 1
        return result

    def inverse(self) -> CycNum:
        if self.is_zero():
            raise ZeroDivisionError("inverse of zero in Q(zeta_N)")
        # x^-1 = (prod of the other conjugates) / norm(x)
        others = CycNum.one(self.level)
        for d in units(self.level):
            if d != 1 % self.level:
                others = others * galois_apply(d, self)
        nrm = (self * others).to_fraction()
        return others / nrm

    def __truediv__(self, other) -> CycNum:
        if isinstance(other, (int, Fraction)):
            if other == 0:
                raise ZeroDivisionError("division by zero")
            q = Fraction(other)
            return CycNum(self.level, [a * q.denominator for a in self.num], self.den * q.numerator)
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return self * other.inverse()

    def __rtruediv__(self, other) -> CycNum:
        return self._coerce(other) * self.inverse()

    def lift(self, level: int) -> CycNum:
        """Image under Q(zeta_M) -> Q(zeta_N), zeta_M -> zeta_N^(N/M), for M | N."""
        if level % self.level:
            raise ValueError(f"{self.level} does not divide {level}")
        step = level // self.level
        cyc = [0] * level
        for i, a in enumerate(self.num):
            cyc[(i * step) % level] += a
        return CycNum.from_cyclic(level, cyc, self.den)

    def to_json(self) -> list[str]:
        return [str(c) for c in self.coeffs]

    @classmethod
    def from_json(cls, level: int, data: Sequence[str]) -> CycNum:
        return cls.from_fractions(level, [Fraction(s) for s in data])


def cyc_arith(a: CycNum, b: CycNum, op: str) -> CycNum:
    if a.level != b.level:
        raise ValueError(f"level mismatch: {a.level} vs {b.level}")
    if op == "add":
        return a + b
    if op == "sub":
        return a - b
    if op == "mul":
        return a * b
    if op == "div":
        return a / b
    raise ValueError(f"unknown operation {op!r}")


def galois_apply(d: int, x: CycNum) -> CycNum:
    """sigma_d(x), where sigma_d(zeta_N) = zeta_N^d."""
    n = x.level
    if math.gcd(d, n) != 1:
        raise ValueError(f"{d} is not a unit modulo {n}")
    cyc = [0] * n
    for i, a in enumerate(x.num):
        cyc[(i * d) % n] += a
    return CycNum(n, _reduce_cyclic(n, cyc), x.den)


def field_norm(x: CycNum) -> Fraction:
    """Norm from Q(zeta_N) down to Q."""
    prod = CycNum.one(x.level)
    for d in units(x.level):
        prod = prod * galois_apply(d, x)
    return prod.to_fraction()


def norm_to_subfield(x: CycNum, D: Iterable[int], fixing: Iterable[int] | None = None) -> CycNum:
    """Product of sigma_d(x) over coset representatives of ``D`` modulo ``fixing``.

    ``fixing`` defaults to the stabilizer of ``x`` inside ``D``; passing the
    stabilizer of a larger field (for example the field of definition of a cusp)
    gives the norm from that field instead.
    """
    n = x.level
    D = frozenset(d % n for d in D)
    if fixing is None:
        fixing = frozenset(d for d in D if galois_apply(d, x) == x)
    else:
        fixing = frozenset(e % n for e in fixing)
    seen: set[int] = set()
    prod = CycNum.one(n)
    for d in sorted(D):
        if d in seen:
            continue
        seen.update(d * e % n for e in fixing)
        prod = prod * galois_apply(d, x)
    return prod


@dataclass(frozen=True, order=True)
class InfinitePlace:
    """Infinite place of Q(zeta_N) given by zeta_N -> exp(2 pi i k / N), k ~ -k."""

    level: int
    embedding_exponent: int

    def __post_init__(self):
        n, k = self.level, self.embedding_exponent % self.level
        if math.gcd(k, n) != 1:
            raise ValueError(f"{k} is not a unit modulo {n}")
        object.__setattr__(self, "embedding_exponent", min(k, (n - k) % n) if n > 2 else k)


def infinite_places(n: int) -> list[InfinitePlace]:
    return sorted({InfinitePlace(n, k) for k in units(n)})


def embed(x: CycNum, k: int, prec_bits: int = 64) -> flint.acb:
    """Ball enclosure of the complex embedding zeta_N -> exp(2 pi i k/N) of x."""
    old = flint.ctx.prec
    flint.ctx.prec = max(prec_bits, 32)
    try:
        n = x.level
        total = flint.acb(0)
        for i, a in enumerate(x.num):
            if a:
                # exp(2 pi i k i / n) via exact rational multiples of pi
                q = flint.fmpq(2 * k * i % (2 * n), n)
                s, c = flint.arb.sin_cos_pi_fmpq(q)
                total += a * flint.acb(c, s)
        return total / x.den
    finally:
        flint.ctx.prec = old


def abs_at_place(x: CycNum, v: InfinitePlace, prec_bits: int = 64) -> flint.arb:
    """Certified ball containing |x|_v (normalised so that |2|_v = 2)."""
    if v.level != x.level:
        raise ValueError("place and element have different levels")
    old = flint.ctx.prec
    flint.ctx.prec = max(prec_bits, 32)
    try:
        return abs(embed(x, v.embedding_exponent, prec_bits))
    finally:
        flint.ctx.prec = old


def abs_upper_all(x: CycNum, prec_bits: int = 64) -> float:
    """Upper bound (rounded up) of max_v |x|_v over all infinite places."""
    best = 0.0
    for v in infinite_places(x.level):
        best = max(best, arb_upper(abs_at_place(x, v, prec_bits)))
    return best


def arb_upper(x: flint.arb) -> float:
    return math.nextafter(float(x.upper()), math.inf)


def arb_lower(x: flint.arb) -> float:
    return math.nextafter(float(x.lower()), -math.inf)

