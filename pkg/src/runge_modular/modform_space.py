"""Spaces M_{k,G} of level-N modular forms fixed by G, built from traces of Eisenstein products.

Forms are described symbolically (integer combinations of trace terms, plus an
optional multiple of Delta^m) and expanded on demand at any matrix of GL2(Z/N).
The basis search draws trace terms from a seeded stream, keeps those that raise
the rank modulo a large prime and then confirms the final rank exactly.
"""

from __future__ import annotations

import math
import random
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Sequence

import flint

from .congruence import (
    CurveData,
    CuspData,
    Gl2Subgroup,
    Mat,
    adjoin_minus_identity,
    identity,
    mat_det,
    row_times,
    sl2_order,
)
from .cyclotomic import CycNum, galois_apply
from .eisenstein import TraceTerm, cyclic_to_qexp, half_group, normalize_sign, trace_cyclic
from .qexp import INF, QExp, UndeterminedError, delta_coefficients

PRIME = (1 << 61) - 1


def sturm_precision(N: int, k: int) -> int:
    """Number of q_N coefficients at infinity that determine a weight-k form on Gamma(N)."""
    mubar = sl2_order(N) // 2
    return k * mubar // 12 + 1


# -- forms ------------------------------------------------------------------------------


_TRACE_CACHE: dict[tuple, list[list[int]]] = {}


def _trace_rows(term: TraceTerm, half: tuple[Mat, ...], A: Mat, prec: int) -> list[list[int]]:
    key = (term, half, A)
    hit = _TRACE_CACHE.get(key)
    if hit is not None and len(hit) >= prec:
        return hit[:prec]
    rows = trace_cyclic(term, half, A, prec)
    _TRACE_CACHE[key] = rows
    return rows


def clear_cache() -> None:
    _TRACE_CACHE.clear()


@dataclass
class ModFormExpr:
    """sum u_i T_i + c Delta^m, with T_i trace terms over G (integral q-expansions)."""

    level: int
    weight: int
    terms: tuple[tuple[int, TraceTerm], ...]
    half: tuple[Mat, ...] = field(repr=False)
    delta_coeff: CycNum | None = None
    delta_power: int = 0
    cache: dict = field(default_factory=dict, repr=False, compare=False)

    def expansion_at(self, A: Mat, prec: int) -> QExp:
        """q_N-expansion of f * A modulo q_N^prec."""
        N = self.level
        key = A
        hit = self.cache.get(key)
        if hit is not None and hit.prec >= prec:
            return hit.truncate(prec)
        total = [[0] * N for _ in range(prec)]
        if self.weight % 2 == 0:
            for u, term in self.terms:
                if not u:
                    continue
                rows = _trace_rows(term, self.half, A, prec)
                for n in range(prec):
                    src, dst = rows[n], total[n]
                    for e in range(N):
                        if src[e]:
                            dst[e] += u * src[e]
        out = cyclic_to_qexp(N, total)
        if self.delta_coeff is not None and not self.delta_coeff.is_zero():
            c = galois_apply(mat_det(A, N), self.delta_coeff)
            out = out + delta_qn(N, self.delta_power, prec).scale(c)
        self.cache[key] = out
        return out

    def to_json(self) -> dict:
        data = {"weight": self.weight, "terms": [{"u": u, **t.to_json()} for u, t in self.terms]}
        if self.delta_coeff is not None:
            data["delta"] = {"m": self.delta_power, "coeff": self.delta_coeff.to_json()}
        return data


def delta_qn(N: int, m: int, prec: int) -> QExp:
    """Delta^m written in q_N, modulo q_N^prec."""
    top = -(-prec // N)
    vals = delta_coefficients(m, top + 1)
    coeffs = [0] * prec
    for n, a in enumerate(vals):
        if n * N < prec:
            coeffs[n * N] = a
    return QExp.from_ints(N, N, 0, coeffs, prec)


def trace_form(j: int, indices: Sequence[tuple[int, int]], G: Gl2Subgroup) -> ModFormExpr:
    """(2N)^k sum_{g in G} zeta^(j det g) E_(alpha_1 g) ... E_(alpha_k g), with -I in G."""
    N = G.level
    if not G.contains_minus_identity():
        raise ValueError("the group must contain -I")
    if len(indices) < 1:
        raise ValueError("need at least one index")
    term = TraceTerm(j % N, tuple((a % N, b % N) for a, b in indices), N)
    half = tuple(half_group(G.elements, N))
    return ModFormExpr(N, len(indices), ((1, term),), half)


def combine(forms: Sequence[ModFormExpr], u: Sequence[int]) -> ModFormExpr:
    if not forms:
        raise ValueError("empty combination")
    terms: list[tuple[int, TraceTerm]] = []
    for c, f in zip(u, forms):
        if c:
            if f.delta_coeff is not None:
                raise ValueError("cannot combine forms carrying a Delta part")
            terms.extend((c * v, t) for v, t in f.terms)
    f0 = forms[0]
    return ModFormExpr(f0.level, f0.weight, tuple(terms), f0.half)


def expansion_at_cusp(f: ModFormExpr, cusp: CuspData, prec: int) -> QExp:
    """f * A for the cusp representative A, in q_w (w the width), modulo q_w^prec."""
    N = f.level
    w = cusp.width
    ser = f.expansion_at(cusp.rep, prec * (N // w))
    try:
        return ser.coarsen(w)
    except ValueError as exc:
        raise ArithmeticError(f"grid violation at cusp {cusp.index}: {exc}") from exc


def nu_at_cusp(f: ModFormExpr, cusp: CuspData, mu: int) -> int | float:
    """Vanishing order at the cusp in q_w units, or inf for the zero form.

    A nonzero form of weight k has nu_c <= k mu / 12, so an expansion known past
    that exponent settles the question.
    """
    bound = f.weight * mu // 12
    prec = min(8, bound + 1)
    while True:
        ser = expansion_at_cusp(f, cusp, prec)
        try:
            return ser.vanishing_order()
        except UndeterminedError:
            if prec > bound:
                return INF
            prec = min(2 * prec, bound + 1)


# -- basis -----------------------------------------------------------------------------


class _ModEchelon:
    def __init__(self, p: int = PRIME):
        self.p = p
        self.pivots: dict[int, list[int]] = {}

    def reduce(self, vec: Sequence[int]) -> list[int]:
        p = self.p
        v = [x % p for x in vec]
        for col in sorted(self.pivots):
            c = v[col]
            if c:
                row = self.pivots[col]
                v = [(a - c * b) % p for a, b in zip(v, row)]
        return v

    def add(self, vec: Sequence[int]) -> bool:
        v = self.reduce(vec)
        for col, c in enumerate(v):
            if c:
                inv = pow(c, -1, self.p)
                v = [(x * inv) % self.p for x in v]
                # keep the pivot rows fully reduced
                for other_col, row in self.pivots.items():
                    e = row[col]
                    if e:
                        self.pivots[other_col] = [(a - e * b) % self.p for a, b in zip(row, v)]
                self.pivots[col] = v
                return True
        return False

    @property
    def rank(self) -> int:
        return len(self.pivots)


def row_vector(ser: QExp) -> list[int]:
    out = []
    for c in ser.coeffs:
        if not c.integral:
            raise ArithmeticError("non-integral coefficient in a scaled trace form")
        out.extend(c.num)
    return out


def dimension_formula(curve: CurveData, k: int) -> int:
    """dim_Q M_{k,G} = [K_G:Q] (m mu - g + 1) for k = 12m."""
    if k % 12:
        raise ValueError("only weights divisible by 12 are supported")
    m = k // 12
    return curve.field_degree * (m * curve.mu - curve.genus + 1)


def orbit_key(j: int, alphas: Sequence[tuple[int, int]], elems: Iterable[Mat], N: int) -> tuple:
    """Canonical label of the trace term (j, alphas) up to the substitution alphas -> alphas g, j -> j det g and signs."""
    best = None
    for g in elems:
        moved = tuple(sorted(normalize_sign(row_times(a, g, N), N)[0] for a in alphas))
        cand = ((j * mat_det(g, N)) % N, moved)
        if best is None or cand < best:
            best = cand
    return best


def candidate_stream(G: Gl2Subgroup, k: int, seed: int) -> Iterable[tuple[int, tuple[tuple[int, int], ...]]]:
    """Seeded stream of distinct trace-term descriptions (j, alphas).

    Indices with 2 alpha = 0 are left out since E_alpha = -E_alpha vanishes for them.
    """
    N = G.level
    rng = random.Random(seed)
    pool = [(a, b) for a in range(N) for b in range(N) if (2 * a % N, 2 * b % N) != (0, 0)]
    elems = sorted(G.elements)
    seen: set = set()
    misses = 0
    while misses < 10000:
        j = rng.randrange(N)
        alphas = tuple(sorted(rng.choice(pool) for _ in range(k)))
        key = orbit_key(j, alphas, elems, N)
        if key in seen:
            misses += 1
            continue
        misses = 0
        seen.add(key)
        yield j, alphas


@dataclass
class IntegralBasis:
    group: Gl2Subgroup
    curve: CurveData
    weight: int
    forms: list[ModFormExpr]
    prec: int
    matrix: list[list[int]] = field(repr=False)
    candidates_tried: int = 0
    extra_checked: int = 0
    seed: int = 0

    @property
    def d(self) -> int:
        return len(self.forms)

    @property
    def m(self) -> int:
        return self.weight // 12

    def cusp_expansions(self, cusp: CuspData, prec: int) -> list[QExp]:
        return [expansion_at_cusp(f, cusp, prec) for f in self.forms]

    def to_json(self, cusp_prec: int | None = None) -> dict:
        N = self.group.level
        out_forms = []
        for f in self.forms:
            entry = f.to_json()
            if cusp_prec is not None:
                entry["expansions"] = {
                    str(c.index): expansion_at_cusp(f, c, cusp_prec).to_json() for c in self.curve.cusps
                }
            out_forms.append(entry)
        return {"N": N, "weight": self.weight, "d": self.d, "prec": self.prec, "seed": self.seed, "forms": out_forms}


def build_basis(
    k: int,
    G: Gl2Subgroup,
    curve: CurveData,
    prec: int | None = None,
    seed: int = 0,
    extra: int = 4,
    max_candidates: int | None = None,
) -> IntegralBasis:
    """Select d = [K_G:Q](m mu - g + 1) trace forms independent over Q."""
    Gb = adjoin_minus_identity(G)
    N = G.level
    if k % 2 or k < 2:
        raise ValueError("weight must be even and at least 2")
    target = dimension_formula(curve, k)
    P = prec or sturm_precision(N, k)
    I = identity(N)
    half = tuple(half_group(Gb.elements, N))
    ech = _ModEchelon()
    chosen: list[ModFormExpr] = []
    rows: list[list[int]] = []
    extras: list[list[int]] = []
    limit = max_candidates or 40 * target + 400
    tried = 0
    for j, alphas in candidate_stream(Gb, k, seed):
        if tried >= limit:
            break
        tried += 1
        term = TraceTerm(j, alphas, N)
        f = ModFormExpr(N, k, ((1, term),), half)
        vec = row_vector(f.expansion_at(I, P))
        if not any(vec):
            continue
        if len(chosen) < target:
            if ech.add(vec):
                chosen.append(f)
                rows.append(vec)
        else:
            extras.append(vec)
            if len(extras) >= extra:
                break
    if len(chosen) < target:
        raise RuntimeError(f"dimension not reached: rank {len(chosen)} < {target} after {tried} candidates")
    exact_rank = flint.fmpz_mat(rows + extras).rank() if rows else 0
    if exact_rank != target:
        raise ArithmeticError(f"exact rank {exact_rank} differs from the dimension {target}")
    return IntegralBasis(Gb, curve, k, chosen, P, rows, tried, len(extras), seed)


def exact_rank(basis: IntegralBasis) -> int:
    return flint.fmpz_mat(basis.matrix).rank() if basis.matrix else 0


def dimension_rr(curve: CurveData, m: int, sigma: Iterable[int]) -> tuple[int, int]:
    """(dim M_{12m,G}, lower bound for dim W_m), both over K_G."""
    sigma = set(sigma)
    if not sigma:
        raise ValueError("the cusp set must be nonempty")
    if len(sigma) >= curve.n_cusps:
        raise ValueError("the cusp set must be proper")
    rest = curve.mu - curve.width_sum(sigma)
    full = m * curve.mu - curve.genus + 1
    lower = m * rest - curve.genus + 1
    if m * rest > curve.genus:
        assert lower >= 2
    return full, lower


def cusp_value_vectors(basis: IntegralBasis) -> dict[int, list[CycNum]]:
    """Constant terms of f_i * A at each cusp (a projective point per cusp)."""
    out = {}
    for c in basis.curve.cusps:
        out[c.index] = [f.expansion_at(c.rep, 1)[0] for f in basis.forms]
    return out


def small_basis_bound(N: int, k: int, order: int, n: int) -> Fraction:
    """2|G| 4.5^k N^k max(N^k, n^(2k))."""
    return 2 * order * Fraction(9, 2) ** k * N**k * max(N**k, n ** (2 * k))


def coefficient_within(c: CycNum, bound: Fraction, prec_bits: int = 128) -> bool:
    """Certified test |c|_v <= bound at every infinite place."""
    if Fraction(sum(abs(x) for x in c.num), c.den) <= bound:
        return True
    from .cyclotomic import abs_at_place, infinite_places

    b = flint.arb(flint.fmpq(bound.numerator, bound.denominator))
    for v in infinite_places(c.level):
        a = abs_at_place(c, v, prec_bits)
        if not a.upper() <= b.lower():
            return False
    return True


def small_basis_check(basis: IntegralBasis, prec: int | None = None) -> dict:
    """Check every coefficient a_n (q_N units, n < prec) of f_i * A_c against the small-basis bound."""
    N, k = basis.group.level, basis.weight
    P = prec or basis.prec
    order = basis.group.order
    checked = violations = 0
    for f in basis.forms:
        for c in basis.curve.cusps:
            ser = f.expansion_at(c.rep, P)
            for n, a in enumerate(ser.coeffs):
                checked += 1
                if not a.integral or not coefficient_within(a, small_basis_bound(N, k, order, n)):
                    violations += 1
    return {"checked": checked, "violations": violations}
