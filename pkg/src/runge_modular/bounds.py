"""Explicit constants of the Runge-method height bound and oracle checks of the supporting lemmas.

Constants such as beta are far too large for floating point, so everything is
carried as ball enclosures of logarithms (python-flint arb).  A reported upper
bound is the upper end of its ball rounded up to the next double; a one-sided
inequality x <= y is certified when upper(x) <= lower(y).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from typing import Iterable, Sequence

import flint

from .cyclotomic import arb_lower, arb_upper

PREC_BITS = 128


def _arb(x) -> flint.arb:
    """Exact rational (int, Fraction or decimal string) as an arb."""
    if isinstance(x, str):
        x = Fraction(x)
    if isinstance(x, Fraction):
        return flint.arb(flint.fmpq(x.numerator, x.denominator))
    return flint.arb(x)


def _log(x) -> flint.arb:
    return _arb(x).log()


class _prec:
    def __init__(self, bits: int = PREC_BITS):
        self.bits = bits

    def __enter__(self):
        self.old = flint.ctx.prec
        flint.ctx.prec = self.bits

    def __exit__(self, *exc):
        flint.ctx.prec = self.old


def up(x: flint.arb) -> float:
    return arb_upper(x)


def down(x: flint.arb) -> float:
    return arb_lower(x)


def certified_le(x: flint.arb, y: flint.arb) -> bool:
    return bool(x.upper() <= y.lower())


@dataclass(frozen=True)
class BoundInputs:
    N: int
    m: int
    mu: int
    absG: int
    sigma_profile: tuple[tuple[int, int], ...] = ()
    s: int = 1

    def __post_init__(self):
        if self.N <= 2:
            raise ValueError("N>2 required")
        if self.m < 1 or self.mu < 1:
            raise ValueError("m and mu must be positive")

    @property
    def k(self) -> int:
        return 12 * self.m


@dataclass
class BoundReport:
    inputs: BoundInputs
    log_beta: flint.arb
    log_C: flint.arb
    log_Cprime: flint.arb
    log_calB: flint.arb
    log_alpha_norm: flint.arb
    height_bound_exact: flint.arb | None = None
    height_bound_middle: flint.arb | None = None
    height_bound_poly: flint.arb | None = None
    height_bound_coarse: flint.arb | None = None
    bilu_parent: flint.arb | None = None
    checks: dict = field(default_factory=dict)

    def to_json(self) -> dict:
        def enc(x):
            if x is None:
                return None
            return {"lower": down(x), "upper": up(x)}

        i = self.inputs
        return {
            "inputs": {"N": i.N, "m": i.m, "mu": i.mu, "absG": i.absG, "k": i.k, "s": i.s, "sigma_profile": [list(p) for p in i.sigma_profile]},
            "rounding": "each value is an interval [lower, upper] rounded outward",
            "log_beta": enc(self.log_beta),
            "log_C": enc(self.log_C),
            "log_Cprime": enc(self.log_Cprime),
            "log_calB": enc(self.log_calB),
            "log_alpha_norm_bound": enc(self.log_alpha_norm),
            "height_bound_exact": enc(self.height_bound_exact),
            "height_bound_mu_d_logN": enc(self.height_bound_middle),
            "height_bound_poly": enc(self.height_bound_poly),
            "height_bound_coarse": enc(self.height_bound_coarse),
            "bilu_parent": enc(self.bilu_parent),
            "checks": self.checks,
        }


def log_beta(N: int, m: int, mu: int) -> flint.arb:
    with _prec():
        inner = 3 * _log(2) + 36 * m * _log("4.5") + (108 * m + 15) * _log(N) + (72 * m + 1) * _log(m)
        return _log(2) + (m * mu + 1) * inner + 12 * m * _log("4.5") + (36 * m + 4) * _log(N)


def log_C(N: int, m: int) -> flint.arb:
    with _prec():
        return _log("96.6") + 24 * m * _log("0.1") + (90 * m + 4) * _log(N)


def log_Cprime(N: int, m: int) -> flint.arb:
    with _prec():
        return _log("22.16") + (144 * m + 7) * _log(N) + 24 * m * _log("0.024")


def log_calB(N: int, m: int, mu: int) -> flint.arb:
    k = 12 * m
    with _prec():
        inner = 3 * _log(2) + 3 * k * _log("4.5") + (9 * k + 15) * _log(N) + (6 * k + 1) * _log(m)
        return (m * mu + 1) * inner


def log_alpha_norm(N: int, m: int, absG: int) -> flint.arb:
    k = 12 * m
    with _prec():
        return _log(2 * absG) + k * _log("4.5") + 3 * k * _log(N) + 2 * k * _log(m)


def constants(inputs: BoundInputs) -> BoundReport:
    N, m, mu = inputs.N, inputs.m, inputs.mu
    return BoundReport(
        inputs,
        log_beta(N, m, mu),
        log_C(N, m),
        log_Cprime(N, m),
        log_calB(N, m, mu),
        log_alpha_norm(N, m, inputs.absG),
    )


def chain_degree(m: int, mu: int) -> int:
    return (324 * m + 18) * (m * mu + 1) + (36 * m + 4) + (144 * m + 7)


def chain_poly(x: Fraction) -> Fraction:
    """(9x^4 + 222x^3 + 1536x^2 + 2132x)/4."""
    return (9 * x**4 + 222 * x**3 + 1536 * x**2 + 2132 * x) / 4


def poly_grid_check(N: int, points: int = 20000) -> bool:
    """f(x) <= 4(x+4)^4 on a grid of [0, N^3/2] (exact rational arithmetic)."""
    top = Fraction(N**3, 2)
    n = min(points, int(2 * top) + 1)
    for i in range(n + 1):
        x = top * i / n
        if chain_poly(x) > 4 * (x + 4) ** 4:
            return False
    return True


def height_bound_chain(inputs: BoundInputs, report: BoundReport | None = None) -> BoundReport:
    rep = report or constants(inputs)
    N, m, mu = inputs.N, inputs.m, inputs.mu
    with _prec():
        logN = _log(N)
        exact = mu * (rep.log_beta + rep.log_Cprime) + _log(3500)
        middle = mu * chain_degree(m, mu) * logN
        poly = 4 * _arb(mu + 4) ** 4 * logN
        coarse = _arb(N) ** 12 * logN
    rep.height_bound_exact = exact
    rep.height_bound_middle = middle
    rep.height_bound_poly = poly
    rep.height_bound_coarse = coarse
    rep.bilu_parent = bilu_parent_arb(N, inputs.absG, inputs.s)
    hyp = mu >= 2 and 12 * m <= mu + 12
    rep.checks.update(
        {
            "hypotheses_mu_ge_2_and_m_le_mu_over_12_plus_1": hyp,
            "exact_le_mu_d_logN": certified_le(exact, middle),
            "mu_d_le_poly_exact_integers": mu * chain_degree(m, mu) <= 4 * (mu + 4) ** 4,
            "exact_le_poly": certified_le(exact, poly),
            "poly_le_coarse": certified_le(poly, coarse),
            "poly_le_coarse_exact_integers": 4 * (2 * mu + 8) ** 4 <= 16 * N**12,
            "auxiliary_polynomial_grid": poly_grid_check(N),
            "mu_le_half_N_cubed": 2 * mu <= N**3,
            "m_le_N_cubed_over_24": 24 * m <= N**3,
        }
    )
    return rep


def bilu_parent_arb(N: int, absG: int, s: int) -> flint.arb:
    if s < 1:
        raise ValueError("s must be positive")
    with _prec():
        return 36 * _arb(s) ** (_arb(s) / 2 + 1) * _arb(Fraction(N * N * absG, 2)) ** s * _log(2 * N)


def bilu_parent_bound(N: int, absG: int, s: int) -> float:
    """36 s^(s/2+1) (N^2 |G| / 2)^s log(2N), rounded up."""
    return up(bilu_parent_arb(N, absG, s))


# -- divisor-sum lemma ---------------------------------------------------------------


def num_divisors(n: int) -> int:
    return sum(1 for d in range(1, n + 1) if n % d == 0)


@lru_cache(maxsize=None)
def _sjn_table(jmax: int, nmax: int) -> tuple[tuple[int, ...], ...]:
    d = [0] + [num_divisors(n) for n in range(1, nmax + 1)]
    rows = [tuple(d)]
    for _ in range(2, jmax + 1):
        prev = rows[-1]
        cur = [0] * (nmax + 1)
        for n in range(1, nmax + 1):
            cur[n] = sum(d[a] * prev[n - a] for a in range(1, n))
        rows.append(tuple(cur))
    return tuple(rows)


def sjn(j: int, n: int) -> int:
    """S_{j,n}: sum over compositions a_1 + ... + a_j = n of prod d(a_i)."""
    if j < 1 or n < 1:
        raise ValueError("j and n must be positive")
    return _sjn_table(j, n)[j - 1][n]


def sjn_bound(j: int, n: int) -> flint.arb:
    with _prec():
        return 2 * _arb(n) ** (_arb(2 * j - 1) / 2) * (_log(n) + 1) ** (j - 1)


def sjn_bound_check(j: int, n: int) -> bool:
    return certified_le(_arb(sjn(j, n)), sjn_bound(j, n))


# -- tail sums ---------------------------------------------------------------------


def u0() -> flint.arb:
    with _prec():
        return (-flint.arb.pi() * _arb(3).sqrt()).exp()


def _check_u(u: flint.arb) -> None:
    # u0 itself is passed as a ball, so compare upper ends
    if not (u.lower() >= 0 and u.upper() <= u0().upper()):
        raise ValueError("u must satisfy 0 <= u <= exp(-pi sqrt 3)")


def sum_cn_bound(m: int, w: int, B: int, u: flint.arb, part: str | None = None) -> flint.arb:
    """Bound for sum_{n>=B} c_n u^(n/w) with c_n <= max(1, (n/w)^(24m))."""
    _check_u(u)
    if part is None:
        part = "i" if B >= 5 * m * w else "ii"
    with _prec():
        if part == "i":
            if B < 5 * m * w:
                raise ValueError("part (i) needs B >= 5mw")
            x = _arb(Fraction(B, w))
            return _arb("230.8") * w * u ** x * x ** (24 * m + 1)
        if part == "ii":
            if not m * w <= B <= 5 * m * w:
                raise ValueError("part (ii) needs mw <= B <= 5mw")
            return _arb("231.6") * w * u ** _arb(Fraction(B, w)) * _arb(5 * m) ** (24 * m + 1)
    raise ValueError(f"unknown part {part!r}")


def sum_cn_oracle(m: int, w: int, B: int, u: flint.arb, rel_tail: float = 1e-6) -> flint.arb:
    """Upper enclosure of sum_{n>=B} max(1, (n/w)^(24m)) u^(n/w), truncated with a geometric tail."""
    with _prec():
        root = u ** (_arb(1) / w)
        total = _arb(0)
        n = B
        term = None
        while True:
            x = _arb(Fraction(n, w))
            c = x ** (24 * m) if n > w else _arb(1)
            term = c * root**n
            total += term
            n += 1
            if n > 2 * w:
                # for n' >= n the ratio of consecutive terms is at most rho
                rho = (_arb(Fraction(n + 1, n))) ** (24 * m) * root
                if rho.upper() < 1:
                    x = _arb(Fraction(n, w))
                    nxt = x ** (24 * m) * root**n
                    tail = nxt / (1 - rho)
                    if tail.upper() <= rel_tail * total.lower():
                        return total + tail


def delta_sum_bound(m: int, B: int, u: flint.arb, constant: int | None = None) -> flint.arb:
    """Bound for sum_{n>=B} |a_n| u^n over the coefficients a_n of Delta^m."""
    _check_u(u)
    with _prec():
        if B > 2 * m:
            return 463 * u**B * _arb(B - 1) ** (6 * m + 1)
        if m < B <= 2 * m:
            return (constant or 465) * u**B * _arb(2 * m) ** (6 * m + 1)
    raise ValueError("B must exceed m")


def delta_sum_oracle(m: int, B: int, u: flint.arb, rel_tail: float = 1e-6) -> flint.arb:
    """Upper enclosure of sum_{n>=B} |a_n| u^n with exact a_n and the tail bounded by 2 n^(6m) u^n."""
    from .qexp import delta_coefficients

    T = max(B + 20, 4 * m + 20)
    while True:
        coeffs = delta_coefficients(m, T)
        with _prec():
            total = _arb(0)
            for n in range(B, T):
                total += abs(coeffs[n]) * u**n
            rho = _arb(Fraction(T + 1, T)) ** (6 * m) * u
            if rho.upper() < 1:
                tail = 2 * _arb(T) ** (6 * m) * u**T / (1 - rho)
                if tail.upper() <= rel_tail * max(total.lower(), 1e-300):
                    return total + tail
        T *= 2


def delta_coeff_check(m: int, nmax: int) -> tuple[int, int]:
    """Count (checked, violations) of |a_n| <= 2 n^(6m) for 2 <= n <= nmax."""
    from .qexp import delta_coefficients

    a = delta_coefficients(m, nmax + 1)
    bad = sum(1 for n in range(2, nmax + 1) if abs(a[n]) > 2 * n ** (6 * m))
    return nmax - 1, bad


def tail_bounds(m: int, w: int, B: int, u: flint.arb | None = None) -> dict:
    """Every applicable lemma bound at (m, w, B) next to its oracle value."""
    u = u if u is not None else u0()
    out: dict = {}
    cn_oracle = None
    if B >= m * w:
        cn_oracle = sum_cn_oracle(m, w, B, u)
        out["sum_cn_oracle_upper"] = up(cn_oracle)
        for part in ("i", "ii"):
            try:
                b = sum_cn_bound(m, w, B, u, part)
            except ValueError:
                continue
            out[f"sum_cn_{part}_bound_lower"] = down(b)
            out[f"sum_cn_{part}_holds"] = certified_le(cn_oracle, b)
    if B > m:
        d_or = delta_sum_oracle(m, B, u)
        out["delta_oracle_upper"] = up(d_or)
        if B > 2 * m:
            b = delta_sum_bound(m, B, u)
            out["delta_ii_bound_lower"] = down(b)
            out["delta_ii_holds"] = certified_le(d_or, b)
        else:
            for const in (465, 464):
                b = delta_sum_bound(m, B, u, const)
                out[f"delta_iii_{const}_bound_lower"] = down(b)
                out[f"delta_iii_{const}_holds"] = certified_le(d_or, b)
    return out


def h_product_check(threshold: str = "1.1104") -> tuple[float, bool]:
    """Certified upper bound of prod_{n>=1} (1 - u0^n)^(-24) and whether it is below the threshold."""
    with _prec():
        x = u0()
        T = 40
        s = _arb(0)
        for n in range(1, T + 1):
            s += -(1 - x**n).log()
        # -log(1 - y) <= y / (1 - y), and sum_{n>T} u0^n / (1 - u0^n) <= u0^(T+1) / ((1 - u0)(1 - u0^(T+1)))
        tail = x ** (T + 1) / ((1 - x) * (1 - x ** (T + 1)))
        s_hi = s + tail
        value = (24 * s_hi).exp()
        val_hi = _arb(value.upper())
        return up(value), certified_le(val_hi, _arb(threshold))


# -- Eisenstein coefficient bounds ----------------------------------------------------


def eisenstein_product_bound(N: int, k: int, n: int) -> flint.arb:
    """2 n^(-1/2) (N/4 + 2n(log n + 1))^k for n >= 1 and (N/4)^k for n = 0."""
    with _prec():
        if n == 0:
            return _arb(Fraction(N, 4)) ** k
        return 2 / _arb(n).sqrt() * (_arb(Fraction(N, 4)) + 2 * n * (_log(n) + 1)) ** k


def _within(c, bound: flint.arb) -> bool:
    from .cyclotomic import abs_at_place, infinite_places

    if certified_le(_arb(Fraction(sum(abs(x) for x in c.num), c.den)), bound):
        return True
    return all(certified_le(abs_at_place(c, v, PREC_BITS), bound) for v in infinite_places(c.level))


def eisenstein_coeff_bound_check(N: int, k: int, samples: int, nmax: int = 100, seed: int = 0) -> dict:
    """Sample products E_alpha_1...E_alpha_k and test every coefficient a_n, n < nmax, against its bound."""
    import random

    from .eisenstein import eisenstein_qexp, scaled_product

    rng = random.Random(seed)
    checked = violations = 0
    c0_ok = True
    for _ in range(samples):
        alphas = [(rng.randrange(N), rng.randrange(N)) for _ in range(k)]
        if k == 1:
            ser = eisenstein_qexp(alphas[0], nmax, N)
            for n, c in enumerate(ser.coeffs):
                b = _arb(Fraction(N, 4)) if n == 0 else _arb(2 * num_divisors(n))
                checked += 1
                violations += not _within(c, b)
            continue
        ser = scaled_product(alphas, nmax, N)
        scale = (2 * N) ** k
        for n, c in enumerate(ser.coeffs):
            checked += 1
            ok = _within(c / scale, eisenstein_product_bound(N, k, n))
            violations += not ok
            if n == 0:
                c0_ok &= ok
    return {"checked": checked, "violations": violations, "constant_terms_ok": c0_ok}


def constant_term_check(N: int) -> bool:
    """|c_0(alpha)| <= N/4 for every alpha."""
    from .eisenstein import constant_term

    b = _arb(Fraction(N, 4))
    return all(_within(constant_term((a, c), N), b) for a in range(N) for c in range(N))


def height_of_rational(x) -> float:
    q = Fraction(x)
    return math.log(max(abs(q.numerator), abs(q.denominator)))


def c_ratio_sweep(Nmax: int = 50, mmax: int = 20) -> bool:
    """C'/C > 1 for 3 <= N <= Nmax, 1 <= m <= mmax (certified)."""
    for N in range(3, Nmax + 1):
        for m in range(1, mmax + 1):
            if not log_Cprime(N, m).lower() > log_C(N, m).upper():
                return False
    return True
