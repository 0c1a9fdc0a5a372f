import copy
import json

import flint
import pytest
from hypothesis import given
from hypothesis import strategies as st

from runge_modular.congruence import galois_orbits_by_matrices, identity
from runge_modular.cyclotomic import CycNum
from runge_modular.modform_space import combine
from runge_modular.qexp import QExp, j_coefficients
from runge_modular.siegel_search import (
    assemble_psi,
    build_certificate,
    certificate_to_json,
    integer_kernel,
    is_saturated,
    j_polynomial,
    kernel_candidates,
    proportional_to_delta,
    verify_certificate,
    verify_integral_over_Zj,
)
from runge_modular.suites import auto_sigma


@given(
    st.integers(1, 5).flatmap(
        lambda r: st.integers(1, 7).flatmap(
            lambda d: st.lists(st.lists(st.integers(-6, 6), min_size=d, max_size=d), min_size=r, max_size=r)
        )
    )
)
def test_integer_kernel(rows):
    M = flint.fmpz_mat(rows)
    K = integer_kernel(M)
    assert K.nrows() == M.ncols() - M.rank()
    if K.nrows():
        assert (M * K.transpose()).is_zero()
        assert K.rank() == K.nrows()
    assert is_saturated(K)


def test_saturation_detects_index():
    assert not is_saturated(flint.fmpz_mat([[2, 0], [0, 1]]))
    assert is_saturated(flint.fmpz_mat([[1, 2], [0, 1]]))


def test_candidates_are_sorted_and_normalized():
    K = flint.fmpz_mat([[1, 0, 2], [0, 1, -1]])
    cands = kernel_candidates(K)
    norms = [sum(abs(x) for x in u) for u in cands]
    assert norms == sorted(norms)
    assert all(next(x for x in u if x) > 0 for u in cands)
    assert (1, 0, 2) in cands and (1, 1, 1) in cands


def _jpow_series(poly, prec):
    """sum poly[i] J^i as integer coefficients at exponents -deg..prec-1."""
    deg = len(poly) - 1
    J = list(j_coefficients(prec + deg + 1))
    total = {}
    cur = {0: 1}
    for i, c in enumerate(poly):
        for e, x in cur.items():
            total[e] = total.get(e, 0) + c * x
        nxt = {}
        for e, x in cur.items():
            for t, y in enumerate(J):
                if e + t - 1 < prec + deg:
                    nxt[e + t - 1] = nxt.get(e + t - 1, 0) + x * y
        cur = nxt
    return {e: x for e, x in total.items() if e < prec}


@pytest.mark.parametrize("poly", [[7], [5, -3, 1], [0, 0, 0, 2], [-744, 1]])
def test_j_polynomial_roundtrip(poly):
    ser = _jpow_series(poly, 3)
    lo = min(ser)
    ints = [ser.get(n, 0) for n in range(lo, 3)]
    q = QExp.from_ints(1, 1, lo, ints, 3)
    assert j_polynomial(q, 2) == poly


def test_j_polynomial_rejects_non_polynomial():
    q = QExp.from_ints(1, 1, -1, [1, 744, 196885, 0], 3)
    with pytest.raises(ArithmeticError):
        j_polynomial(q, 2)


def test_level_one_forms_give_linear_q(gl3):
    # f = a E4^3 + b Delta with J = E4^3 / Delta, so Q(x) = x - (a J + b)
    G, curve, basis = gl3
    for form in basis.forms:
        ser = form.expansion_at(identity(3), 7)
        a = int(ser[0].to_fraction())
        b = int(ser[3].to_fraction()) - 720 * a
        Q = verify_integral_over_Zj(form, G, 1)
        assert Q == [[-b, -a], [1]]


def test_delta_lies_in_the_kernel(b4):
    # Delta^m vanishes to order m w_c at every cusp, so its coordinates solve every psi condition
    G, curve, basis = b4
    delta_vec = flint.fmpz_mat([[x] for x in _delta_coordinates(basis)])
    sigma = [curve.infinity.index]
    sys = assemble_psi(basis, sigma)
    assert (sys.matrix * delta_vec).is_zero()
    u = [int(delta_vec[i, 0]) for i in range(basis.d)]
    assert proportional_to_delta(basis, u)


def _delta_coordinates(basis):
    """Integer coordinates of a multiple of Delta in the basis, from the q_N rows."""
    from runge_modular.modform_space import delta_qn, row_vector

    d = row_vector(delta_qn(basis.group.level, basis.m, basis.prec))
    A = flint.fmpz_mat(basis.matrix).transpose()
    aug = flint.fmpz_mat([list(map(int, r)) + [x] for r, x in zip(A.tolist(), d)])
    K = integer_kernel(aug)
    assert K.nrows() == 1
    v = [int(K[0, j]) for j in range(basis.d + 1)]
    if v[-1] > 0:
        v = [-x for x in v]
    return v[:-1]


@pytest.fixture(scope="module")
def b4_certificate(b4):
    G, curve, basis = b4
    orbits = galois_orbits_by_matrices(G, curve, G.det_image)
    sigma, m = auto_sigma(curve, orbits, 1, "min")
    cert = build_certificate(basis, sigma, orbits)
    return cert, certificate_to_json(cert, orbits)


def test_b4_certificate(b4_certificate):
    cert, data = b4_certificate
    assert all(cert.checks.values())
    assert 0 < cert.pole_count <= cert.m * cert.curve.mu
    assert len(data["Q_poly"]) == 7  # degree [GL2 : G] = 6
    assert data["Q_poly"][-1] == [1]
    for v in cert.phi_values.values():
        assert v.is_rational() and v.to_fraction().denominator == 1
    assert json.loads(json.dumps(data)) == data


def test_b4_reverify(b4_certificate):
    _, data = b4_certificate
    res = verify_certificate(data)
    assert res["all"], res


def test_tampered_certificate_fails(b4_certificate):
    _, data = b4_certificate
    bad = copy.deepcopy(data)
    bad["u"][0] += 1
    try:
        res = verify_certificate(bad, with_Q=False)
    except (ArithmeticError, ValueError):
        return
    assert not res["all"]


def test_tampered_value_fails(b4_certificate):
    _, data = b4_certificate
    bad = copy.deepcopy(data)
    c = bad["sigma"][0]
    entry = next(x for x in bad["cusps"] if x["index"] == c)
    entry["value"] = (CycNum.from_json(4, entry["value"]) + 1).to_json()
    assert not verify_certificate(bad, with_Q=False)["values_match"]
