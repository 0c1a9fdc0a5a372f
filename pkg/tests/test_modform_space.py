from fractions import Fraction

import pytest

from runge_modular.congruence import borel, curve_invariants, identity, mat_det
from runge_modular.modform_space import (
    delta_qn,
    dimension_formula,
    dimension_rr,
    exact_rank,
    small_basis_bound,
    small_basis_check,
    sturm_precision,
    trace_form,
)
from runge_modular.qexp import delta_coefficients


def test_dimensions(gl3, b4):
    for G, curve, basis in (gl3, b4):
        assert basis.d == exact_rank(basis) == dimension_formula(curve, 12)
        assert basis.d == curve.field_degree * (curve.mu - curve.genus + 1)
    assert gl3[2].d == 2
    assert b4[2].d == 7


def test_invariance_under_group(b4):
    G, curve, basis = b4
    I = identity(G.level)
    for f in basis.forms[:3]:
        base = f.expansion_at(I, 20)
        for g in sorted(G.elements):
            if mat_det(g, G.level) == 1:
                assert f.expansion_at(g, 20) == base


def test_expansions_integral_at_every_cusp(b4):
    G, curve, basis = b4
    for f in basis.forms:
        for c in curve.cusps:
            ser = f.expansion_at(c.rep, 12)
            assert all(x.integral for x in ser.coeffs)


def test_gl3_forms_are_rational_combinations_of_e4_cubed_and_delta(gl3):
    # M_12(SL2(Z)) is spanned by Delta and E4^3, so every q_3-expansion lives on the q-grid
    G, curve, basis = gl3
    for f in basis.forms:
        ser = f.expansion_at(identity(3), 30)
        assert all(ser[n].is_zero() for n in range(30) if n % 3)
        assert all(ser[n].is_rational() for n in range(30))


def test_small_basis_on_gl3(gl3):
    res = small_basis_check(gl3[2])
    assert res["checked"] > 0 and res["violations"] == 0


def test_small_basis_bound_value():
    assert small_basis_bound(3, 12, 48, 0) == 2 * 48 * Fraction(9, 2) ** 12 * 3**24
    assert small_basis_bound(3, 1, 1, 5) == 2 * Fraction(9, 2) * 3 * 25


def test_dimension_rr():
    c = curve_invariants(borel(5))
    full, lower = dimension_rr(c, 1, [c.infinity.index])
    assert full == 7 and lower == 1 * 5 - 0 + 1
    with pytest.raises(ValueError):
        dimension_rr(c, 1, [])


def test_delta_on_finer_grid():
    d = delta_qn(4, 1, 20)
    assert [d[n] == 0 for n in range(20) if n % 4] and d[4].to_fraction() == 1
    assert d[8].to_fraction() == delta_coefficients(1, 3)[2]


def test_sturm():
    assert sturm_precision(5, 12) == 12 * 60 // 12 + 1


def test_trace_form_requires_minus_identity():
    from runge_modular.congruence import subgroup_closure

    with pytest.raises(ValueError):
        trace_form(0, [(1, 0)], subgroup_closure(5, [(1, 1, 0, 1)]))


@pytest.mark.parametrize("seed", range(5))
def test_basis_rank_independent_of_seed(seed):
    from runge_modular.modform_space import build_basis

    G = borel(4)
    curve = curve_invariants(G)
    basis = build_basis(12, G, curve, seed=seed)
    assert exact_rank(basis) == 7 and basis.seed == seed
