import math

import pytest
import sympy
from hypothesis import given
from hypothesis import strategies as st

from runge_modular.congruence import (
    borel,
    compute_m,
    curve_invariants,
    full_gl2,
    full_level_group,
    galois_orbits_by_matrices,
    gl2_elements,
    gl2_right_cosets,
    group_from_json,
    group_to_json,
    mat_det,
    mat_inv,
    mat_mul,
    runge_condition,
    sl2_order,
    split_sign_group,
    subgroup_closure,
)
from runge_modular.cyclotomic import unit_subgroup, units


def _kronecker(D, p):
    if p == 2:
        return 0 if D % 2 == 0 else (1 if D % 8 in (1, 7) else -1)
    return sympy.jacobi_symbol(D % p, p) if D % p else 0


def _gamma0(N):
    """Classical invariants of Gamma0(N): index, cusps, e2, e3, genus."""
    primes = sympy.primefactors(N)
    mu = N
    for p in primes:
        mu = mu * (p + 1) // p
    cusps = sum(sympy.totient(math.gcd(d, N // d)) for d in sympy.divisors(N))
    e2 = 0 if N % 4 == 0 else math.prod(1 + _kronecker(-4, p) for p in primes)
    e3 = 0 if N % 9 == 0 else math.prod(1 + _kronecker(-3, p) for p in primes)
    g = 1 + sympy.Rational(mu, 12) - sympy.Rational(e2, 4) - sympy.Rational(e3, 3) - sympy.Rational(cusps, 2)
    return mu, int(cusps), int(e2), int(e3), int(g)


@pytest.mark.parametrize("N", [3, 4, 5, 6, 7, 8])
def test_borel_matches_gamma0(N):
    c = curve_invariants(borel(N))
    mu, cusps, e2, e3, g = _gamma0(N)
    assert (c.mu, c.n_cusps, c.e2, c.e3, c.genus) == (mu, cusps, e2, e3, g)
    assert c.field_degree == 1
    assert sum(x.width for x in c.cusps) == c.mu


@pytest.mark.parametrize("N", [3, 4, 5, 6, 7, 8])
def test_full_level_genus(N):
    c = curve_invariants(full_level_group(N))
    assert c.mu == sl2_order(N) // 2
    assert c.genus == 1 + c.mu * (N - 6) // (12 * N)
    assert all(x.width == N for x in c.cusps)
    assert c.field_degree == 1  # det is surjective on this group


def test_gl2_is_the_j_line():
    c = curve_invariants(full_gl2(5))
    assert (c.mu, c.genus, c.n_cusps, c.e2, c.e3) == (1, 0, 1, 1, 1)


def test_group_orders():
    assert len(gl2_elements(3)) == 48
    assert full_gl2(4).order == 96
    assert borel(5).order == 5 * 16
    assert sl2_order(6) == 144


def test_level_two_rejected():
    with pytest.raises(ValueError, match="N>2"):
        curve_invariants(borel(2))
    with pytest.raises(ValueError, match="N>2"):
        group_from_json({"N": 2, "generators": [[1, 1, 0, 1]]})


@pytest.mark.parametrize(
    "data",
    [{}, {"N": 5}, {"N": "x", "generators": []}, {"N": 5, "generators": [[1, 2, 3]]}, {"N": 5, "generators": [[1, 0, 0, 7]]}],
)
def test_malformed_json(data):
    with pytest.raises(ValueError):
        group_from_json(data)


def test_json_roundtrip():
    G = split_sign_group(5)
    H = group_from_json(group_to_json(G))
    assert H.elements == G.elements


@given(st.sampled_from([3, 4, 5]), st.data())
def test_matrix_inverse(N, data):
    els = gl2_elements(N)
    A = data.draw(st.sampled_from(els))
    B = data.draw(st.sampled_from(els))
    assert mat_mul(A, mat_inv(A, N), N) == (1, 0, 0, 1)
    assert mat_det(mat_mul(A, B, N), N) == mat_det(A, N) * mat_det(B, N) % N


def test_closure_is_a_group():
    G = subgroup_closure(7, [(1, 1, 0, 1), (3, 0, 0, 1)])
    for a in G.elements:
        for b in G.elements:
            assert mat_mul(a, b, 7) in G.elements


def test_right_cosets_partition():
    G = borel(4)
    reps = gl2_right_cosets(G)
    assert len(reps) * G.order == len(gl2_elements(4))


def test_orbits_of_borel_are_singletons():
    G = borel(5)
    c = curve_invariants(G)
    orb = galois_orbits_by_matrices(G, c, G.det_image)
    assert orb.count == 2
    assert sorted(len(o) for o in orb.orbits) == [1, 1]


def test_full_level_orbits():
    G = full_level_group(5)
    c = curve_invariants(G)
    orb = galois_orbits_by_matrices(G, c, unit_subgroup(5, units(5)))
    assert sum(len(o) for o in orb.orbits) == c.n_cusps
    assert orb.count < c.n_cusps


def test_m_and_runge():
    c = curve_invariants(borel(5))
    assert compute_m(c, [c.infinity.index]) == 1
    assert runge_condition(2, 1) and not runge_condition(1, 1)
    with pytest.raises(ValueError):
        runge_condition(3, 0)
    with pytest.raises(ValueError):
        compute_m(c, [x.index for x in c.cusps])
    with pytest.raises(ValueError):
        compute_m(c, [])
