"""Subgroups of GL2(Z/NZ) and the invariants of the modular curves X_G.

Matrices are tuples (a, b, c, d) with entries in [0, N), read row by row.  The
group acts on index vectors from the right, so every action below is a right
action.  Cusps are the orbits of <-I, T> acting by right multiplication on the
right cosets H\\SL2(Z/N) with H the intersection of G (with -I adjoined) and
SL2(Z/N); the width of a cusp is the size of its orbit.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Iterable, Mapping, Sequence

from .cyclotomic import CycNum, galois_apply, unit_subgroup, units

Mat = tuple[int, int, int, int]

T_MAT = (1, 1, 0, 1)
S_MAT = (0, -1, 1, 0)
R_MAT = (0, -1, 1, 1)


def mat(N: int, m: Sequence[int]) -> Mat:
    return tuple(x % N for x in m)  # type: ignore[return-value]


def mat_mul(A: Mat, B: Mat, N: int) -> Mat:
    a, b, c, d = A
    e, f, g, h = B
    return ((a * e + b * g) % N, (a * f + b * h) % N, (c * e + d * g) % N, (c * f + d * h) % N)


def mat_det(A: Mat, N: int) -> int:
    return (A[0] * A[3] - A[1] * A[2]) % N


def mat_inv(A: Mat, N: int) -> Mat:
    det = mat_det(A, N)
    if math.gcd(det, N) != 1:
        raise ValueError(f"matrix {A} is not invertible modulo {N}")
    di = pow(det, -1, N)
    a, b, c, d = A
    return ((d * di) % N, (-b * di) % N, (-c * di) % N, (a * di) % N)


def identity(N: int) -> Mat:
    return (1 % N, 0, 0, 1 % N)


def minus_identity(N: int) -> Mat:
    return ((-1) % N, 0, 0, (-1) % N)


def diag(N: int, a: int, d: int) -> Mat:
    return (a % N, 0, 0, d % N)


def row_times(alpha: tuple[int, int], A: Mat, N: int) -> tuple[int, int]:
    a, b = alpha
    return ((a * A[0] + b * A[2]) % N, (a * A[1] + b * A[3]) % N)


@lru_cache(maxsize=None)
def sl2_elements(N: int) -> tuple[Mat, ...]:
    out = []
    for a in range(N):
        for b in range(N):
            for c in range(N):
                for d in range(N):
                    if (a * d - b * c) % N == 1 % N:
                        out.append((a, b, c, d))
    return tuple(out)


@lru_cache(maxsize=None)
def gl2_elements(N: int) -> tuple[Mat, ...]:
    out = []
    for a in range(N):
        for b in range(N):
            for c in range(N):
                for d in range(N):
                    if math.gcd(a * d - b * c, N) == 1:
                        out.append((a, b, c, d))
    return tuple(out)


def sl2_order(N: int) -> int:
    out = N**3
    for p in _prime_factors(N):
        out = out * (p * p - 1) // (p * p)
    return out


def _prime_factors(n: int) -> list[int]:
    out = []
    p = 2
    while p * p <= n:
        if n % p == 0:
            out.append(p)
            while n % p == 0:
                n //= p
        p += 1
    if n > 1:
        out.append(n)
    return out


@dataclass(frozen=True)
class Gl2Subgroup:
    level: int
    generators: tuple[Mat, ...]
    elements: frozenset[Mat]
    det_image: frozenset[int]

    @property
    def order(self) -> int:
        return len(self.elements)

    def __contains__(self, A) -> bool:
        return mat(self.level, A) in self.elements

    def __len__(self) -> int:
        return len(self.elements)

    def sorted_elements(self) -> list[Mat]:
        return sorted(self.elements)

    def contains_minus_identity(self) -> bool:
        return minus_identity(self.level) in self.elements


def subgroup_closure(N: int, gens: Iterable[Sequence[int]]) -> Gl2Subgroup:
    """Subgroup of GL2(Z/N) generated by ``gens`` (full enumeration)."""
    if N <= 2:
        raise ValueError("N>2 required")
    gens = tuple(mat(N, g) for g in gens)
    for g in gens:
        if len(g) != 4:
            raise ValueError(f"generator {g} is not a 2x2 matrix")
        if math.gcd(mat_det(g, N), N) != 1:
            raise ValueError(f"generator {g} is not invertible modulo {N}")
    I = identity(N)
    elems = {I}
    frontier = [I]
    while frontier:
        x = frontier.pop()
        for g in gens:
            y = mat_mul(x, g, N)
            if y not in elems:
                elems.add(y)
                frontier.append(y)
    dets = frozenset(mat_det(x, N) for x in elems)
    return Gl2Subgroup(N, gens, frozenset(elems), dets)


def adjoin_minus_identity(G: Gl2Subgroup) -> Gl2Subgroup:
    N = G.level
    mI = minus_identity(N)
    if mI in G.elements:
        return G
    elems = G.elements | frozenset(mat_mul(mI, x, N) for x in G.elements)
    return Gl2Subgroup(N, G.generators + (mI,), frozenset(elems), G.det_image)


# -- standard groups ------------------------------------------------------------


def _unit_gens(N: int) -> list[int]:
    return [d for d in units(N) if d != 1]


def full_gl2(N: int) -> Gl2Subgroup:
    return subgroup_closure(N, [T_MAT, mat(N, S_MAT)] + [diag(N, 1, d) for d in _unit_gens(N)])


def borel(N: int) -> Gl2Subgroup:
    """Upper triangular matrices (the X_0(N) case)."""
    gens = [T_MAT] + [diag(N, 1, d) for d in _unit_gens(N)] + [diag(N, d, 1) for d in _unit_gens(N)]
    return subgroup_closure(N, gens)


def full_level_group(N: int) -> Gl2Subgroup:
    """{+-(1 0; 0 *)}: the curve X(N) with its model over Q."""
    return subgroup_closure(N, [minus_identity(N)] + [diag(N, 1, d) for d in _unit_gens(N)])


def split_sign_group(N: int) -> Gl2Subgroup:
    """{+-(1 b; 0 +-1)}: determinant image {+-1}."""
    return subgroup_closure(N, [T_MAT, diag(N, 1, -1), minus_identity(N)])


# -- curve invariants -------------------------------------------------------------


@dataclass
class CuspData:
    index: int
    rep: Mat
    width: int
    is_infinity: bool = False
    orbit_id: int | None = None

    def to_json(self) -> dict:
        return {"index": self.index, "rep": list(self.rep), "width": self.width, "infinity": self.is_infinity, "orbit": self.orbit_id}


@dataclass
class CurveData:
    level: int
    mu: int
    genus: int
    cusps: list[CuspData]
    e2: int
    e3: int
    det_image: frozenset[int]
    group_order: int
    # right cosets of H in SL2: representative per coset and coset id per matrix
    coset_reps: list[Mat] = field(repr=False, default_factory=list)
    coset_of: dict[Mat, int] = field(repr=False, default_factory=dict)
    cusp_of_coset: list[int] = field(repr=False, default_factory=list)

    @property
    def n_cusps(self) -> int:
        return len(self.cusps)

    @property
    def field_degree(self) -> int:
        """[K_G : Q] with K_G the fixed field of det(G)."""
        from .cyclotomic import euler_phi

        return euler_phi(self.level) // len(self.det_image)

    @property
    def infinity(self) -> CuspData:
        return next(c for c in self.cusps if c.is_infinity)

    def cusp_of(self, A: Sequence[int]) -> int:
        """Index of the cusp containing the SL2 matrix A."""
        A = mat(self.level, A)
        if A not in self.coset_of:
            raise ValueError(f"{A} is not in SL2(Z/{self.level})")
        return self.cusp_of_coset[self.coset_of[A]]

    def width_sum(self, indices: Iterable[int]) -> int:
        return sum(self.cusps[i].width for i in indices)

    def to_json(self) -> dict:
        return {
            "N": self.level,
            "mu": self.mu,
            "genus": self.genus,
            "e2": self.e2,
            "e3": self.e3,
            "group_order": self.group_order,
            "det_image": sorted(self.det_image),
            "det_image_generators": _unit_generators(self.level, self.det_image),
            "cusps": [c.to_json() for c in self.cusps],
        }


def _unit_generators(N: int, D: frozenset[int]) -> list[int]:
    gens: list[int] = []
    span = unit_subgroup(N, [])
    for d in sorted(D):
        if d not in span:
            gens.append(d)
            span = unit_subgroup(N, gens)
    return gens


def curve_invariants(G: Gl2Subgroup) -> CurveData:
    N = G.level
    if N <= 2:
        raise ValueError("N>2 required")
    Gb = adjoin_minus_identity(G)
    H = [x for x in Gb.elements if mat_det(x, N) == 1]
    sl2 = sl2_elements(N)
    coset_of: dict[Mat, int] = {}
    reps: list[Mat] = []
    least: list[Mat] = []
    for x in sl2:
        if x in coset_of:
            continue
        idx = len(reps)
        members = [mat_mul(h, x, N) for h in H]
        reps.append(x)
        least.append(min(members))
        for y in members:
            coset_of[y] = idx
    mu = len(reps)

    def perm(g: Mat) -> list[int]:
        return [coset_of[mat_mul(r, g, N)] for r in reps]

    pT, pS, pR = perm(T_MAT), perm(mat(N, S_MAT)), perm(mat(N, R_MAT))
    e2 = sum(1 for i in range(mu) if pS[i] == i)
    e3 = sum(1 for i in range(mu) if pR[i] == i)

    cusp_of_coset = [-1] * mu
    orbits: list[list[int]] = []
    for i in range(mu):
        if cusp_of_coset[i] >= 0:
            continue
        orb = [i]
        j = pT[i]
        while j != i:
            orb.append(j)
            j = pT[j]
        for j in orb:
            cusp_of_coset[j] = 0
        orbits.append(orb)
    # canonical representative: least matrix in the double coset
    raw = sorted((min(least[i] for i in orb), orb) for orb in orbits)
    cusps = []
    inf_coset = coset_of[identity(N)]
    for k, (rep, orb) in enumerate(raw):
        for i in orb:
            cusp_of_coset[i] = k
        cusps.append(CuspData(k, rep, len(orb), inf_coset in orb))
    c = len(cusps)
    twelve_g = 12 + mu - 3 * e2 - 4 * e3 - 6 * c
    if twelve_g % 12:
        raise ArithmeticError("genus formula gave a non-integer")
    genus = twelve_g // 12
    if sum(cu.width for cu in cusps) != mu:
        raise ArithmeticError("cusp widths do not sum to the index")
    return CurveData(N, mu, genus, cusps, e2, e3, G.det_image, Gb.order, reps, coset_of, cusp_of_coset)


def gl2_right_cosets(G: Gl2Subgroup) -> list[Mat]:
    """Representatives (least element) of the right cosets G\\GL2(Z/N)."""
    N = G.level
    seen: set[Mat] = set()
    reps = []
    elems = list(G.elements)
    for x in gl2_elements(N):
        if x in seen:
            continue
        members = [mat_mul(h, x, N) for h in elems]
        seen.update(members)
        reps.append(min(members))
    return sorted(reps)


def element_with_det(G: Gl2Subgroup, d: int) -> Mat:
    """Least element of G with determinant d."""
    N = G.level
    cands = [x for x in G.elements if mat_det(x, N) == d % N]
    if not cands:
        raise ValueError(f"{d} is not in det(G)")
    return min(cands)


# -- Galois action on cusps -------------------------------------------------------


@dataclass
class CuspOrbits:
    D: frozenset[int]
    orbits: list[list[int]]
    permutations: dict[int, list[int]]
    method: str

    @property
    def count(self) -> int:
        return len(self.orbits)

    def orbit_of(self, cusp: int) -> int:
        for k, orb in enumerate(self.orbits):
            if cusp in orb:
                return k
        raise KeyError(cusp)

    def to_json(self) -> dict:
        return {
            "D": sorted(self.D),
            "count": self.count,
            "orbits": self.orbits,
            "method": self.method,
        }


def _projective(vec: Sequence[CycNum]) -> tuple[CycNum, ...]:
    for x in vec:
        if not x.is_zero():
            inv = x.inverse()
            return tuple(y * inv for y in vec)
    raise ValueError("value vector is identically zero")


def _orbits_from_perms(n: int, perms: Mapping[int, Sequence[int]]) -> list[list[int]]:
    parent = list(range(n))

    def find(x: int) -> int:
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    for p in perms.values():
        for i, j in enumerate(p):
            a, b = find(i), find(j)
            if a != b:
                parent[max(a, b)] = min(a, b)
    groups: dict[int, list[int]] = {}
    for i in range(n):
        groups.setdefault(find(i), []).append(i)
    return sorted(groups.values())


def _check_action(N: int, D: frozenset[int], perms: Mapping[int, Sequence[int]], n: int) -> None:
    for d in D:
        for e in D:
            de = d * e % N
            # right action: c -> sigma_d(c) -> sigma_e(sigma_d(c))
            if any(perms[e][perms[d][i]] != perms[de][i] for i in range(n)):
                raise ArithmeticError("cusp permutations do not form a group action")
    if any(perms[1 % N][i] != i for i in range(n)):
        raise ArithmeticError("identity does not act trivially on cusps")


def check_field_subgroup(N: int, D: Iterable[int], det_image: frozenset[int]) -> frozenset[int]:
    D = frozenset(d % N for d in D)
    if not D <= det_image:
        raise ValueError("the chosen field must contain K_G: D has to lie inside det(G)")
    if unit_subgroup(N, D) != D:
        raise ValueError("D is not a subgroup of the units")
    return D


def galois_orbits_of_cusps(
    G: Gl2Subgroup,
    curve: CurveData,
    D: Iterable[int],
    separating_values: Mapping[int, Sequence[CycNum]],
) -> CuspOrbits:
    """Orbits of Gal(Qbar/K), K = Q(zeta_N)^D, on the cusps.

    ``separating_values[c]`` is a vector of values at the cusp c of functions
    defined over K_G; it is compared projectively, so the values of sections of a
    K_G-rational line bundle (constant terms of modular forms) are allowed.
    """
    N = G.level
    D = check_field_subgroup(N, D, G.det_image)
    n = curve.n_cusps
    proj = {c: _projective(separating_values[c]) for c in range(n)}
    lookup: dict[tuple, int] = {}
    for c, v in proj.items():
        key = tuple(v)
        if key in lookup:
            raise ValueError("values do not separate cusps")
        lookup[key] = c
    perms: dict[int, list[int]] = {}
    for d in sorted(D):
        p = []
        for c in range(n):
            image = tuple(galois_apply(d, x) for x in proj[c])
            if image not in lookup:
                raise ValueError("values do not separate cusps")
            p.append(lookup[image])
        perms[d] = p
    _check_action(N, D, perms, n)
    orbits = _orbits_from_perms(n, perms)
    return CuspOrbits(D, orbits, perms, "values")


def galois_orbits_by_matrices(G: Gl2Subgroup, curve: CurveData, D: Iterable[int]) -> CuspOrbits:
    """Same orbits from the group action: sigma_d sends the cusp of A to the cusp of g^-1 A diag(1, d), det g = d."""
    N = G.level
    D = check_field_subgroup(N, D, G.det_image)
    Gb = adjoin_minus_identity(G)
    n = curve.n_cusps
    perms: dict[int, list[int]] = {}
    for d in sorted(D):
        gi = mat_inv(element_with_det(Gb, d), N)
        dd = diag(N, 1, d)
        perms[d] = [curve.cusp_of(mat_mul(mat_mul(gi, c.rep, N), dd, N)) for c in curve.cusps]
    _check_action(N, D, perms, n)
    return CuspOrbits(D, _orbits_from_perms(n, perms), perms, "matrices")


def runge_condition(c: int, s: int) -> bool:
    if s < 1:
        raise ValueError("S contains every infinite place, so s >= 1")
    return s < c


def compute_m(curve: CurveData, sigma: Iterable[int]) -> int:
    sigma = set(sigma)
    if not sigma:
        raise ValueError("the cusp set must be nonempty")
    if len(sigma) >= curve.n_cusps:
        raise ValueError("the cusp set must leave at least one cusp out")
    rest = curve.mu - curve.width_sum(sigma)
    m = curve.genus // rest + 1
    N = curve.level
    assert 24 * m <= N**3, "m exceeds N^3/24"
    return m


# -- JSON ---------------------------------------------------------------------------


def group_from_json(data: Mapping) -> Gl2Subgroup:
    try:
        N = int(data["N"])
        gens = [tuple(int(x) for x in g) for g in data["generators"]]
    except (KeyError, TypeError, ValueError) as exc:
        raise ValueError(f"malformed group description: {exc}") from exc
    if N <= 2:
        raise ValueError("N>2 required")
    for g in gens:
        if len(g) != 4 or any(not 0 <= x < N for x in g):
            raise ValueError(f"generator {list(g)} must have four entries in [0, {N})")
    return subgroup_closure(N, gens)


def group_to_json(G: Gl2Subgroup) -> dict:
    return {"N": G.level, "generators": [list(g) for g in G.generators]}
