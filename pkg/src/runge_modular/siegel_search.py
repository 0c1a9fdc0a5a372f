"""Runge functions phi = f / Delta^m from short kernel vectors of the cusp-vanishing map.

The map psi sends u in Z^d to the first m w_c coefficients (in q_w) of
f = sum u_i f_i at every cusp c of Sigma, written over Q in the power basis of
Q(zeta_N).  Its integer kernel is LLL-reduced and a short vector whose form is
not a multiple of Delta^m is picked deterministically.  Everything asserted
about the resulting phi is recomputed from the certificate by ``verify_certificate``.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Mapping, Sequence

import flint

from .bounds import PREC_BITS, log_beta, log_calB, log_Cprime
from .congruence import (
    CuspData,
    CuspOrbits,
    CurveData,
    Gl2Subgroup,
    adjoin_minus_identity,
    curve_invariants,
    gl2_right_cosets,
    group_from_json,
    group_to_json,
    identity,
    mat_det,
)
from .cyclotomic import CycNum, abs_at_place, degree, galois_apply, infinite_places, norm_to_subfield
from .eisenstein import TraceTerm
from .modform_space import (
    IntegralBasis,
    ModFormExpr,
    combine,
    delta_qn,
    dimension_rr,
    expansion_at_cusp,
    nu_at_cusp,
    trace_form,
)
from .qexp import INF, QExp, UndeterminedError, delta_coefficients, h_coefficients, j_coefficients


# -- certified comparisons in log space --------------------------------------------


def _log_abs_le(c: CycNum, log_bound: flint.arb) -> bool:
    """Certified test log |c|_v <= log_bound at every infinite place."""
    if c.is_zero():
        return True
    old = flint.ctx.prec
    flint.ctx.prec = PREC_BITS
    try:
        l1 = flint.arb(flint.fmpq(sum(abs(x) for x in c.num), c.den))
        if l1.log().upper() <= log_bound.lower():
            return True
        limit = log_bound.exp()
        return all(abs_at_place(c, v, PREC_BITS).upper() <= limit.lower() for v in infinite_places(c.level))
    finally:
        flint.ctx.prec = old


def _log(x) -> flint.arb:
    old = flint.ctx.prec
    flint.ctx.prec = PREC_BITS
    try:
        if isinstance(x, Fraction):
            return flint.arb(flint.fmpq(x.numerator, x.denominator)).log()
        return flint.arb(x).log()
    finally:
        flint.ctx.prec = old


# -- psi ------------------------------------------------------------------------------


def _check_sigma(curve: CurveData, sigma: Iterable[int], orbits: CuspOrbits | None) -> tuple[int, ...]:
    sigma = tuple(sorted(set(sigma)))
    if not sigma:
        raise ValueError("the cusp set must be nonempty")
    if len(sigma) >= curve.n_cusps:
        raise ValueError("the cusp set must be proper")
    if any(not 0 <= c < curve.n_cusps for c in sigma):
        raise ValueError("unknown cusp index")
    if orbits is not None:
        for orb in orbits.orbits:
            inside = [c in sigma for c in orb]
            if any(inside) and not all(inside):
                raise ValueError("the cusp set is not Galois stable")
    return sigma


@dataclass
class PsiSystem:
    basis: IntegralBasis
    sigma: tuple[int, ...]
    m: int
    matrix: flint.fmpz_mat = field(repr=False)
    denominator: int
    kernel_basis: flint.fmpz_mat = field(repr=False)

    @property
    def a(self) -> int:
        return self.kernel_basis.nrows()

    @property
    def n_rows(self) -> int:
        return self.matrix.nrows()


def psi_rows(basis: IntegralBasis, sigma: Sequence[int], m: int) -> list[list[Fraction]]:
    """Rows (c, n, e): coordinate e of the q_w^n coefficient of f_i * A_c, for c in sigma and n < m w_c."""
    rows: list[list[Fraction]] = []
    for c in sigma:
        cusp = basis.curve.cusps[c]
        n_coef = m * cusp.width
        try:
            exps = basis.cusp_expansions(cusp, n_coef)
            block = [[e[n].coeffs for e in exps] for n in range(n_coef)]
        except UndeterminedError as exc:
            raise ArithmeticError(f"precision shortfall at cusp {c}: {exc}") from exc
        for n in range(n_coef):
            for e in range(degree(basis.group.level)):
                rows.append([block[n][i][e] for i in range(basis.d)])
    return rows


def integer_kernel(M: flint.fmpz_mat) -> flint.fmpz_mat:
    """Basis of {u in Z^d : M u = 0}, read off the Hermite form of [M^T | I]."""
    R, d = M.nrows(), M.ncols()
    Mt = M.transpose()
    aug = flint.fmpz_mat(d, R + d, [Mt[i, j] if j < R else int(j - R == i) for i in range(d) for j in range(R + d)])
    H = aug.hnf()
    ker = [[int(H[i, R + j]) for j in range(d)] for i in range(d) if all(H[i, j] == 0 for j in range(R))]
    if not ker:
        return flint.fmpz_mat(0, d)
    return flint.fmpz_mat(ker)


def is_saturated(K: flint.fmpz_mat) -> bool:
    """The row lattice equals its rational span intersected with Z^d (all elementary divisors 1)."""
    if K.nrows() == 0:
        return True
    S = K.snf()
    return all(abs(int(S[i, i])) == 1 for i in range(K.nrows()))


def assemble_psi(basis: IntegralBasis, sigma: Iterable[int], m: int | None = None, orbits: CuspOrbits | None = None) -> PsiSystem:
    m = basis.m if m is None else m
    if m != basis.m:
        raise ValueError(f"the basis has weight {basis.weight}, not 12m = {12 * m}")
    sigma = _check_sigma(basis.curve, sigma, orbits)
    rows = psi_rows(basis, sigma, m)
    W = 1
    for r in rows:
        for x in r:
            W = W * x.denominator // math.gcd(W, x.denominator)
    M = flint.fmpz_mat([[int(x * W) for x in r] for r in rows])
    K = integer_kernel(M)
    if K.nrows():
        K = K.lll()
    rank = M.rank()
    if K.nrows() != basis.d - rank:
        raise ArithmeticError("kernel dimension disagrees with the rank")
    if K.nrows() and not (M * K.transpose()).is_zero():
        raise ArithmeticError("kernel vectors do not satisfy the vanishing conditions")
    if not is_saturated(K):
        raise ArithmeticError("kernel lattice is not saturated")
    return PsiSystem(basis, sigma, m, M, W, K)


# -- short vector ----------------------------------------------------------------------


def _identity_vector(basis: IntegralBasis, u: Sequence[int]) -> list[int]:
    out = [0] * len(basis.matrix[0])
    for c, row in zip(u, basis.matrix):
        if c:
            for i, x in enumerate(row):
                if x:
                    out[i] += c * x
    return out


def proportional_to_delta(basis: IntegralBasis, u: Sequence[int]) -> bool:
    """Whether sum u_i f_i lies in K_G Delta^m, by the 2x2 minors a_n d_n0 - a_n0 d_n over the q_N expansion at infinity."""
    N, m = basis.group.level, basis.m
    phi = degree(N)
    vec = _identity_vector(basis, u)
    P = len(vec) // phi
    n0 = m * N
    if P <= n0:
        raise ArithmeticError("expansion too short to test proportionality")
    delta = delta_qn(N, m, P)
    a0 = vec[n0 * phi : (n0 + 1) * phi]
    for n in range(P):
        dn = delta[n].to_fraction()
        an = vec[n * phi : (n + 1) * phi]
        # Delta has leading coefficient 1 at n0, so the minor is a_n - d_n a_n0
        if any(an[e] - dn * a0[e] for e in range(phi)):
            return False
    return True


def _normalize(u: Sequence[int]) -> tuple[int, ...]:
    for x in u:
        if x:
            return tuple(u) if x > 0 else tuple(-y for y in u)
    return tuple(u)


def kernel_candidates(K: flint.fmpz_mat, full_limit: int = 8) -> list[tuple[int, ...]]:
    """Short combinations of the reduced kernel basis, ordered by (l1 norm, lex)."""
    a, d = K.nrows(), K.ncols()
    B = [[int(K[i, j]) for j in range(d)] for i in range(a)]
    combos: set[tuple[int, ...]] = set()
    if a <= full_limit:
        coeff_iter = itertools.product((-1, 0, 1), repeat=a)
    else:
        coeff_iter = itertools.chain(
            ((1 if t == i else 0 for t in range(a)) for i in range(a)),
            ((1 if t == i else (s if t == j else 0) for t in range(a)) for i in range(a) for j in range(i + 1, a) for s in (1, -1)),
        )
    for coeffs in coeff_iter:
        coeffs = tuple(coeffs)
        if not any(coeffs):
            continue
        u = [0] * d
        for c, b in zip(coeffs, B):
            if c:
                for j in range(d):
                    u[j] += c * b[j]
        if any(u):
            combos.add(_normalize(u))
    return sorted(combos, key=lambda v: (sum(abs(x) for x in v), v))


def short_kernel_vector(sys: PsiSystem) -> tuple[int, ...]:
    basis = sys.basis
    curve = basis.curve
    if sys.a <= curve.field_degree:
        raise ValueError("kernel dimension must exceed [K_G:Q]")
    bound = log_calB(curve.level, sys.m, curve.mu)
    for u in kernel_candidates(sys.kernel_basis):
        if proportional_to_delta(basis, u):
            continue
        if not _log(sum(abs(x) for x in u)).upper() <= bound.lower():
            break
        return u
    raise ArithmeticError("no admissible vector within calB")


# -- phi -------------------------------------------------------------------------------


@dataclass
class PhiCertificate:
    group: Gl2Subgroup
    curve: CurveData
    m: int
    sigma: tuple[int, ...]
    u: tuple[int, ...]
    generators: list[tuple[int, tuple[tuple[int, int], ...]]]
    f: ModFormExpr = field(repr=False)
    nu: dict[int, int]
    pole_data: dict[int, int]
    phi_values: dict[int, CycNum]
    Q_poly: list[list[int]] | None = None
    xi_data: list[dict] = field(default_factory=list)
    kernel_dim: int | None = None
    checks: dict = field(default_factory=dict)

    @property
    def pole_count(self) -> int:
        return sum(-o for o in self.pole_data.values() if o < 0)

    @property
    def u_norm(self) -> int:
        return sum(abs(x) for x in self.u)


def _generators(basis: IntegralBasis) -> list[tuple[int, tuple[tuple[int, int], ...]]]:
    out = []
    for f in basis.forms:
        ((c, term),) = f.terms
        assert c == 1
        out.append((term.zeta_power, term.indices))
    return out


def coefficient_bound_check(f: ModFormExpr, curve: CurveData, m: int, prec_w: int | None = None) -> dict:
    """|b_n|_v <= beta max(1, (n/w)^(24m)) for the q_w coefficients b_n, n < prec_w, at every cusp."""
    lb = log_beta(curve.level, m, curve.mu)
    checked = violations = 0
    for c in curve.cusps:
        P = prec_w or (m * curve.mu + m * c.width + 1)
        ser = expansion_at_cusp(f, c, P)
        for n, b in enumerate(ser.coeffs):
            extra = _log(Fraction(n, c.width)) * (24 * m) if n > c.width else flint.arb(0)
            checked += 1
            violations += not _log_abs_le(b, lb + extra)
    return {"checked": checked, "violations": violations}


def construct_phi(f: ModFormExpr, m: int, curve: CurveData, sigma: Iterable[int]) -> dict:
    """Vanishing orders, pole data and values on sigma of phi = f / Delta^m."""
    sigma = tuple(sorted(sigma))
    nu: dict[int, int] = {}
    ords: dict[int, int] = {}
    values: dict[int, CycNum] = {}
    for c in curve.cusps:
        v = nu_at_cusp(f, c, curve.mu)
        if v == INF:
            raise ArithmeticError("the form vanishes identically")
        nu[c.index] = v
        ords[c.index] = v - m * c.width
    log_val_bound = log_beta(curve.level, m, curve.mu) + _log(m) * (24 * m)
    for c in sigma:
        cusp = curve.cusps[c]
        if ords[c] < 0:
            raise ArithmeticError(f"phi has a pole at the cusp {c} of sigma")
        val = expansion_at_cusp(f, cusp, m * cusp.width + 1)[m * cusp.width]
        if not val.integral:
            raise ArithmeticError(f"phi({c}) is not integral")
        if not _log_abs_le(val, log_val_bound):
            raise ArithmeticError(f"phi({c}) exceeds beta m^(24m)")
        values[c] = val
    poles = sum(-o for o in ords.values() if o < 0)
    if poles == 0:
        raise ArithmeticError("phi is constant")
    if poles > m * curve.mu:
        raise ArithmeticError(f"phi has {poles} poles, more than m mu = {m * curve.mu}")
    return {"nu": nu, "ords": ords, "values": values, "poles": poles}


# -- integrality over Z[j] ------------------------------------------------------------


def phi_star(f: ModFormExpr, A, m: int, prec: int) -> QExp:
    """(f * A) / Delta^m as a Laurent series in q_N, known modulo q_N^prec."""
    N = f.level
    top = prec + m * N
    num = f.expansion_at(A, top)
    inv = h_coefficients(-(-top // N) + 1)
    # 1/Delta^m = q^-m h^m with h = prod (1 - q^n)^-24
    hm = QExp.from_ints(1, 1, 0, inv, len(inv)) ** m
    spread = [0] * (prec + m * N)
    for n, c in enumerate(hm.coeffs):
        if n * N < len(spread):
            spread[n * N] = int(c.to_fraction())
    inv_qn = QExp.from_ints(N, N, 0, spread, len(spread))
    return (num * inv_qn).shift(-m * N).truncate(prec)


def _j_power(t: int, prec: int) -> list[int]:
    """Coefficients of J^t at exponents -t .. prec-1."""
    n = prec + t
    body = flint.fmpz_poly(list(j_coefficients(n)))
    vals = [int(x) for x in body.pow_trunc(t, n).coeffs()] if t else [1]
    return vals + [0] * (n - len(vals))


def j_polynomial(ser: QExp, margin: int) -> list[int]:
    """Write an integral Laurent series in q as an integer polynomial in J.

    The series must be known at least to q^margin; the coefficients beyond the
    constant term must cancel exactly.
    """
    if ser.width != 1:
        raise ValueError("expected a series in q")
    lo = min(ser.start, 0)
    coeffs: dict[int, int] = {}
    for n in range(lo, margin + 1):
        c = ser[n]
        if not (c.is_rational() and c.to_fraction().denominator == 1):
            raise ArithmeticError(f"coefficient of q^{n} is not a rational integer")
        coeffs[n] = int(c.to_fraction())
    deg = -lo
    poly = [0] * (deg + 1)
    for t in range(deg, 0, -1):
        c = coeffs.get(-t, 0)
        poly[t] = c
        if c:
            jp = _j_power(t, margin + 1)
            for i, x in enumerate(jp):
                coeffs[i - t] = coeffs.get(i - t, 0) - c * x
    poly[0] = coeffs.get(0, 0)
    coeffs[0] = 0
    if any(coeffs.get(n, 0) for n in range(lo, margin + 1)):
        raise ArithmeticError("nonzero remainder after cancelling against powers of J")
    while len(poly) > 1 and poly[-1] == 0:
        poly.pop()
    return poly


def verify_integral_over_Zj(f: ModFormExpr, G: Gl2Subgroup, m: int, margin: int = 2) -> list[list[int]]:
    """Coefficients of Q(x) = prod_{A in R} (x - phi * A) as integer polynomials in j.

    Returns the list indexed by the power of x; entry i lists the j-coefficients
    from j^0 upward.
    """
    Gb = adjoin_minus_identity(G)
    N = G.level
    reps = gl2_right_cosets(Gb)
    R = len(reps)
    prec = (margin + 1) * N + (R - 1) * m * N
    one = QExp.monomial(N, N, 0, 1)
    poly: list[QExp] = [one]
    for A in reps:
        p = phi_star(f, A, m, prec)
        new = [None] * (len(poly) + 1)
        for i in range(len(poly) + 1):
            terms = []
            if i >= 1:
                terms.append(poly[i - 1])
            if i < len(poly):
                terms.append(-(poly[i] * p))
            new[i] = terms[0] if len(terms) == 1 else terms[0] + terms[1]
        poly = new
    out = []
    for i, ser in enumerate(poly):
        try:
            ser_q = ser.coarsen(1)
        except ValueError as exc:
            raise ArithmeticError(f"coefficient of x^{i} is not a series in q: {exc}") from exc
        if not ser_q.exact and ser_q.prec <= margin:
            raise ArithmeticError("insufficient precision")
        jp = j_polynomial(ser_q, margin)
        if len(jp) - 1 > (R - i) * m:
            raise ArithmeticError(f"coefficient of x^{i} has j-degree {len(jp) - 1} > {(R - i) * m}")
        out.append(jp)
    if out[-1] != [1]:
        raise ArithmeticError("Q is not monic")
    return out


# -- xi -------------------------------------------------------------------------------


def _cusp_stabilizer(orbits: CuspOrbits, c: int) -> frozenset[int]:
    return frozenset(d for d, p in orbits.permutations.items() if p[c] == c)


def xi_certificate(
    f: ModFormExpr,
    m: int,
    curve: CurveData,
    orbit: Sequence[int],
    phi_values: Mapping[int, CycNum],
    orbits: CuspOrbits,
) -> dict:
    """(r, gamma, xi) for one Galois orbit inside sigma; xi = 1 when phi(c) is not in K."""
    c = min(orbit)
    cusp = curve.cusps[c]
    w = cusp.width
    D = orbits.D
    val = phi_values[c]
    out: dict = {"orbit": sorted(orbit), "cusp": c}
    if any(galois_apply(d, val) != val for d in D):
        out.update({"in_K": False, "r": None, "gamma": None, "xi": CycNum.one(curve.level)})
        return out
    mw = m * w
    limit = mw + m * curve.mu + 1
    prec = min(mw + 8, limit)
    while True:
        b = expansion_at_cusp(f, cusp, prec)
        delta = delta_qn(curve.level, m, prec * (curve.level // w)).coarsen(w)
        diff = b - delta.scale(val)
        try:
            v = diff.vanishing_order()
            break
        except UndeterminedError:
            if prec >= limit:
                raise ArithmeticError("r exceeds m mu: phi - phi(c) vanishes to the tested order")
            prec = min(2 * prec, limit)
    r = v - mw
    if r > m * curve.mu:
        raise ArithmeticError("r exceeds m mu")
    if r % w == 0:
        a = delta_coefficients(m, m + r // w + 1)[m + r // w]
        gamma = b[mw + r] - val * a
    else:
        gamma = b[mw + r]
    if gamma != diff[v] or gamma.is_zero():
        raise ArithmeticError("gamma disagrees with the leading coefficient of phi - phi(c)")
    gw = gamma**w
    stab = _cusp_stabilizer(orbits, c)
    if any(galois_apply(d, gw) != gw for d in stab):
        raise ArithmeticError("gamma^w is not defined over the field of the cusp")
    xi = norm_to_subfield(gw, D, fixing=stab)
    if xi.is_zero() or not xi.integral:
        raise ArithmeticError("xi must be a nonzero algebraic integer")
    if any(galois_apply(d, xi) != xi for d in D):
        raise ArithmeticError("xi is not in K")
    N = curve.level
    lbc = log_beta(N, m, curve.mu) + log_Cprime(N, m)
    out.update(
        {
            "in_K": True,
            "r": r,
            "gamma": gamma,
            "xi": xi,
            "gamma_bound_ok": _log_abs_le(gamma, lbc),
            "xi_bound_ok": _log_abs_le(xi, lbc * (w * len(orbit))),
        }
    )
    if not (out["gamma_bound_ok"] and out["xi_bound_ok"]):
        raise ArithmeticError("gamma or xi exceeds its bound")
    return out


# -- pipeline and certificates -------------------------------------------------------------


def build_certificate(
    basis: IntegralBasis,
    sigma: Iterable[int],
    orbits: CuspOrbits,
    with_Q: bool = True,
) -> PhiCertificate:
    curve = basis.curve
    m = basis.m
    sys = assemble_psi(basis, sigma, m, orbits)
    full, lower = dimension_rr(curve, m, sys.sigma)
    if sys.a < curve.field_degree * lower:
        raise ArithmeticError(f"kernel dimension {sys.a} below the Riemann-Roch bound {curve.field_degree * lower}")
    u = short_kernel_vector(sys)
    f = combine(basis.forms, u)
    data = construct_phi(f, m, curve, sys.sigma)
    cert = PhiCertificate(
        basis.group,
        curve,
        m,
        sys.sigma,
        u,
        _generators(basis),
        f,
        data["nu"],
        data["ords"],
        data["values"],
        kernel_dim=sys.a,
    )
    _finish(cert, orbits, with_Q)
    return cert


def _finish(cert: PhiCertificate, orbits: CuspOrbits, with_Q: bool) -> None:
    curve, m = cert.curve, cert.m
    N = curve.level
    cert.checks["u_norm_le_calB"] = _log(max(cert.u_norm, 1)).upper() <= log_calB(N, m, curve.mu).lower()
    cert.checks["vanishing_on_sigma"] = all(cert.nu[c] >= m * curve.cusps[c].width for c in cert.sigma)
    cert.checks["not_proportional_to_delta"] = True
    cert.checks["phi_values_integral"] = all(v.integral for v in cert.phi_values.values())
    cert.checks["pole_count_le_m_mu"] = 0 < cert.pole_count <= m * curve.mu
    bc = coefficient_bound_check(cert.f, curve, m)
    cert.checks["coefficient_bound"] = bc["violations"] == 0
    cert.xi_data = [xi_certificate(cert.f, m, curve, orb, cert.phi_values, orbits) for orb in orbits.orbits if set(orb) <= set(cert.sigma)]
    if with_Q:
        cert.Q_poly = verify_integral_over_Zj(cert.f, cert.group, m)
        cert.checks["Q_integral_over_Zj"] = True


def certificate_to_json(cert: PhiCertificate, orbits: CuspOrbits) -> dict:
    curve, m = cert.curve, cert.m
    N = curve.level
    xi_json = []
    for x in cert.xi_data:
        xi_json.append(
            {
                "orbit": x["orbit"],
                "cusp": x["cusp"],
                "in_K": x["in_K"],
                "r": x["r"],
                "gamma": x["gamma"].to_json() if x["gamma"] is not None else None,
                "xi": x["xi"].to_json(),
            }
        )
    return {
        "group": group_to_json(cert.group),
        "K": sorted(orbits.D),
        "orbits": orbits.orbits,
        "m": m,
        "weight": 12 * m,
        "sigma": list(cert.sigma),
        "generators": [{"j": j, "alphas": [list(a) for a in al]} for j, al in cert.generators],
        "u": list(cert.u),
        "u_norm": cert.u_norm,
        "kernel_dim": cert.kernel_dim,
        "log_calB_upper": math.nextafter(float(log_calB(N, m, curve.mu).upper()), math.inf),
        "cusps": [
            {
                "index": c.index,
                "rep": list(c.rep),
                "width": c.width,
                "nu": cert.nu[c.index],
                "ord_phi": cert.pole_data[c.index],
                "value": cert.phi_values[c.index].to_json() if c.index in cert.phi_values else None,
            }
            for c in curve.cusps
        ],
        "pole_count": cert.pole_count,
        "Q_poly": cert.Q_poly,
        "xi_data": xi_json,
        "checks": cert.checks,
    }


def verify_certificate(data: Mapping, with_Q: bool = True) -> dict:
    """Re-check a certificate from its JSON alone: rebuild f from (u, generators) and recompute every claim."""
    from .congruence import galois_orbits_by_matrices

    G = group_from_json(data["group"])
    Gb = adjoin_minus_identity(G)
    curve = curve_invariants(G)
    N = G.level
    m = int(data["m"])
    gens = [trace_form(g["j"], [tuple(a) for a in g["alphas"]], Gb) for g in data["generators"]]
    u = tuple(int(x) for x in data["u"])
    if len(u) != len(gens):
        raise ValueError("u and the generator list differ in length")
    f = combine(gens, u)
    if f.weight != 12 * m:
        raise ValueError("generator weight differs from 12m")
    sigma = tuple(data["sigma"])
    orbits = galois_orbits_by_matrices(G, curve, data["K"])
    _check_sigma(curve, sigma, orbits)
    results: dict = {}
    phi_data = construct_phi(f, m, curve, sigma)
    results["vanishing_on_sigma"] = all(phi_data["nu"][c] >= m * curve.cusps[c].width for c in sigma)
    stored = {c["index"]: c for c in data["cusps"]}
    results["orders_match"] = all(stored[c]["ord_phi"] == phi_data["ords"][c] for c in stored)
    results["values_match"] = all(CycNum.from_json(N, stored[c]["value"]) == phi_data["values"][c] for c in sigma)
    results["pole_count_le_m_mu"] = 0 < phi_data["poles"] <= m * curve.mu
    results["u_norm_le_calB"] = _log(max(sum(abs(x) for x in u), 1)).upper() <= log_calB(N, m, curve.mu).lower()
    # Delta^m-proportionality from the expansion at infinity up to the Sturm bound
    from .modform_space import sturm_precision, row_vector

    P = sturm_precision(N, 12 * m)
    I = identity(N)
    ser = f.expansion_at(I, P)
    d = delta_qn(N, m, P)
    lead = ser[m * N]
    results["not_proportional_to_delta"] = any(ser[n] != lead * d[n] for n in range(P))
    xi = [xi_certificate(f, m, curve, orb, phi_data["values"], orbits) for orb in orbits.orbits if set(orb) <= set(sigma)]
    results["xi_match"] = len(xi) == len(data["xi_data"]) and all(
        CycNum.from_json(N, s["xi"]) == x["xi"] and s["r"] == x["r"] for s, x in zip(data["xi_data"], xi)
    )
    if with_Q and data.get("Q_poly") is not None:
        results["Q_match"] = verify_integral_over_Zj(f, G, m) == data["Q_poly"]
    results["all"] = all(results.values())
    return results
