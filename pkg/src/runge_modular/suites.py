"""Verification suites over the reference configurations, grouped by tag.

Each check returns a ``CheckResult``; ``run_suites`` filters by tag so that for
example ``--tags bounds`` only touches the constants and lemma oracles.
"""

from __future__ import annotations

import itertools
import random
import time
from fractions import Fraction
from dataclasses import dataclass, field
from typing import Callable, Iterable

from .bounds import (
    BoundInputs,
    delta_coeff_check,
    h_product_check,
    height_bound_chain,
    sjn,
    sjn_bound_check,
    tail_bounds,
)
from .congruence import (
    Gl2Subgroup,
    borel,
    compute_m,
    curve_invariants,
    full_gl2,
    full_level_group,
    galois_orbits_by_matrices,
    galois_orbits_of_cusps,
    runge_condition,
)
from .eisenstein import EisIndex, random_sl2z, transformation_oracle
from .modform_space import (
    build_basis,
    cusp_value_vectors,
    dimension_formula,
    exact_rank,
    small_basis_check,
)

REFERENCE_PAIRS: dict[str, tuple[str, Callable[[], Gl2Subgroup]]] = {
    "gl3": ("N=3, G=GL2(Z/3)", lambda: full_gl2(3)),
    "b4": ("N=4, G=Borel", lambda: borel(4)),
    "b5": ("N=5, G=Borel (X0(5)-type)", lambda: borel(5)),
    "g5": ("N=5, G={+-(1 0;0 *)} (Gamma(5)-type)", lambda: full_level_group(5)),
    "b6": ("N=6, G=Borel", lambda: borel(6)),
}


@dataclass
class CheckResult:
    name: str
    tags: tuple[str, ...]
    passed: bool
    detail: dict = field(default_factory=dict)
    seconds: float = 0.0

    def to_json(self) -> dict:
        return {"name": self.name, "tags": list(self.tags), "passed": self.passed, "seconds": round(self.seconds, 3), "detail": self.detail}


_BASES: dict = {}


def reference_basis(key: str, seed: int = 0):
    hit = _BASES.get((key, seed))
    if hit is None:
        G = REFERENCE_PAIRS[key][1]()
        curve = curve_invariants(G)
        hit = (G, curve, build_basis(12, G, curve, seed=seed))
        _BASES[(key, seed)] = hit
    return hit


# -- individual checks ---------------------------------------------------------------


def check_dimension(seed: int = 0) -> CheckResult:
    detail = {}
    ok = True
    for key in REFERENCE_PAIRS:
        G, curve, basis = reference_basis(key, seed)
        expected = curve.field_degree * (curve.mu - curve.genus + 1)
        rank = exact_rank(basis)
        detail[key] = {"rank": rank, "expected": expected, "formula": dimension_formula(curve, 12)}
        ok &= rank == expected == basis.d
    return CheckResult("dimension identity", ("dimension",), ok, detail)


def check_small_basis(seed: int = 0) -> CheckResult:
    detail = {}
    ok = True
    for key in REFERENCE_PAIRS:
        _, _, basis = reference_basis(key, seed)
        res = small_basis_check(basis)
        detail[key] = res
        ok &= res["violations"] == 0 and res["checked"] > 0
    return CheckResult("small-basis coefficient bound", ("small-basis",), ok, detail)


def check_eisenstein(seed: int = 0, pairs: int = 20) -> CheckResult:
    rng = random.Random(seed)
    detail = {}
    ok = True
    for N in (3, 4, 5):
        worst = 0.0
        for _ in range(pairs):
            alpha = EisIndex((rng.randrange(N), rng.randrange(N)), N)
            gamma = random_sl2z(rng)
            worst = max(worst, transformation_oracle(alpha, gamma, 2j, prec=400))
        detail[str(N)] = {"pairs": pairs, "max_defect": worst}
        ok &= worst < 1e-6
    return CheckResult("Eisenstein transformation oracle", ("eisenstein",), ok, detail)


def check_lemmas(seed: int = 0) -> CheckResult:
    detail: dict = {}
    sjn_ok = all(sjn_bound_check(j, n) for j in range(1, 5) for n in range(1, 201))
    detail["sjn"] = {"j_max": 4, "n_max": 200, "ok": sjn_ok, "S_2_4": sjn(2, 4), "S_1_12": sjn(1, 12)}
    delta_ok = True
    for m in (1, 2, 3):
        checked, bad = delta_coeff_check(m, 500)
        detail[f"delta_m{m}"] = {"checked": checked, "violations": bad}
        delta_ok &= bad == 0
    tail_ok = True
    tails = []
    for m, w in itertools.product((1, 2), (1, 2, 5)):
        for B in range(m * w, 8 * m * w + 1):
            res = tail_bounds(m, w, B)
            flags = {k: v for k, v in res.items() if k.endswith("_holds")}
            tails.append({"m": m, "w": w, "B": B, **flags})
            # the 464 variant is reported but not required
            tail_ok &= all(v for k, v in flags.items() if "464" not in k)
    detail["tails_checked"] = len(tails)
    detail["tail_464_all_hold"] = all(t.get("delta_iii_464_holds", True) for t in tails)
    val, h_ok = h_product_check()
    detail["h_product_upper"] = val
    ok = sjn_ok and delta_ok and tail_ok and h_ok
    detail.update({"sjn_ok": sjn_ok, "delta_ok": delta_ok, "tails_ok": tail_ok, "h_ok": h_ok})
    return CheckResult("combinatorial lemma oracles", ("bounds", "lemmas"), ok, detail)


def auto_sigma(curve, orbits, s: int, mode: str = "min") -> tuple[list[int], int]:
    """Union of s orbits with the least m (mode "min"), or the largest m over unions of at most s orbits ("max")."""
    best = None
    sizes = [s] if mode == "min" else range(1, s + 1)
    for r in sizes:
        for ids in itertools.combinations(range(orbits.count), r):
            sigma = sorted(c for i in ids for c in orbits.orbits[i])
            if len(sigma) >= curve.n_cusps:
                continue
            m = compute_m(curve, sigma)
            key = (m, ids) if mode == "min" else (-m, ids)
            if best is None or key < best[0]:
                best = (key, sigma, m)
    if best is None:
        raise ValueError("no proper cusp set of this size")
    return best[1], best[2]


def check_bound_chain(seed: int = 0, s: int = 1) -> CheckResult:
    detail = {}
    ok = True
    for key in REFERENCE_PAIRS:
        G = REFERENCE_PAIRS[key][1]()
        curve = curve_invariants(G)
        orbits = galois_orbits_by_matrices(G, curve, G.det_image)
        if not runge_condition(orbits.count, s):
            detail[key] = {"runge": False}
            continue
        _, m = auto_sigma(curve, orbits, s, "max")
        rep = height_bound_chain(BoundInputs(G.level, m, curve.mu, curve.group_order, s=s))
        chain = rep.checks["exact_le_poly"] and rep.checks["poly_le_coarse"]
        detail[key] = {"runge": True, "m": m, "mu": curve.mu, **rep.to_json()["checks"]}
        ok &= chain and all(rep.checks.values())
    spot = 4 * (Fraction(5**3, 2) + 4) ** 4 <= 5**12
    detail["spot_N5"] = spot
    return CheckResult("height bound chain", ("bounds", "chain"), ok and spot, detail)


def check_certificate(seed: int = 0) -> CheckResult:
    from .siegel_search import build_certificate, certificate_to_json, verify_certificate

    G, curve, basis = reference_basis("b5", seed)
    orbits = galois_orbits_by_matrices(G, curve, G.det_image)
    sigma, m = auto_sigma(curve, orbits, 1, "min")
    cert = build_certificate(basis, sigma, orbits)
    data = certificate_to_json(cert, orbits)
    values_rational = all(v.is_rational() and v.to_fraction().denominator == 1 for v in cert.phi_values.values())
    reverify = verify_certificate(data)
    detail = {
        "sigma": sigma,
        "m": m,
        "u_norm": cert.u_norm,
        "log_calB_upper": data["log_calB_upper"],
        "pole_count": cert.pole_count,
        "phi_values_rational_integers": values_rational,
        "checks": cert.checks,
        "reverify": reverify,
    }
    ok = (
        m == 1
        and len(sigma) == 1
        and values_rational
        and cert.pole_count <= m * curve.mu == 6
        and all(cert.checks.values())
        and reverify["all"]
    )
    return CheckResult("Runge function certificate (X0(5)-type)", ("certificate",), ok, detail)


def check_orbit_methods(seed: int = 0) -> CheckResult:
    from .cyclotomic import unit_subgroup, units

    detail = {}
    ok = True
    for key in REFERENCE_PAIRS:
        G, curve, basis = reference_basis(key, seed)
        vals = cusp_value_vectors(basis)
        N = G.level
        subgroups = {unit_subgroup(N, [d]) for d in units(N)} | {frozenset(G.det_image)}
        n = 0
        for D in subgroups:
            if not D <= G.det_image:
                continue
            try:
                a = galois_orbits_of_cusps(G, curve, D, vals)
            except ValueError as exc:
                detail[key] = {"error": str(exc)}
                ok = False
                break
            b = galois_orbits_by_matrices(G, curve, D)
            ok &= a.orbits == b.orbits and a.permutations == b.permutations
            n += 1
        detail.setdefault(key, {"subgroups_compared": n})
    return CheckResult("Galois orbits: values vs matrices", ("orbits",), ok, detail)


SUITES: list[tuple[tuple[str, ...], Callable[..., CheckResult]]] = [
    (("dimension",), check_dimension),
    (("small-basis",), check_small_basis),
    (("eisenstein",), check_eisenstein),
    (("bounds", "lemmas"), check_lemmas),
    (("certificate",), check_certificate),
    (("bounds", "chain"), check_bound_chain),
    (("orbits",), check_orbit_methods),
]

ALL_TAGS = sorted({t for tags, _ in SUITES for t in tags})


def run_suites(tags: Iterable[str] | None = None, seed: int = 0) -> list[CheckResult]:
    wanted = set(tags) if tags else None
    if wanted:
        unknown = wanted - set(ALL_TAGS)
        if unknown:
            raise ValueError(f"unknown tags: {sorted(unknown)}")
    out = []
    for suite_tags, fn in SUITES:
        if wanted and not wanted & set(suite_tags):
            continue
        t0 = time.perf_counter()
        try:
            res = fn(seed=seed)
        except Exception as exc:  # a crashing check is a failing check
            res = CheckResult(fn.__name__, suite_tags, False, {"error": f"{type(exc).__name__}: {exc}"})
        res.seconds = time.perf_counter() - t0
        out.append(res)
    return out
