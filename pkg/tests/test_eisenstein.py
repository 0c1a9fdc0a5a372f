import cmath
import math
import random

import pytest
from hypothesis import given
from hypothesis import strategies as st

from runge_modular.cyclotomic import CycNum, embed
from runge_modular.eisenstein import (
    EisIndex,
    constant_term,
    eisenstein_qexp,
    evaluate_qexp,
    random_sl2z,
    scaled_product,
    transformation_oracle,
)

LEVELS = [3, 4, 5, 6, 8]


def _double_sum(a, b, N, prec):
    """sum over m,n >= 1 of zeta^(bn) q_N^(mn) [m = a] - zeta^(-bn) q_N^(mn) [m = -a], as dicts."""
    out = [dict() for _ in range(prec)]
    for m in range(1, prec):
        for n in range(1, prec):
            if m * n >= prec:
                break
            for sign, res, e in ((1, a, b * n), (-1, -a, -b * n)):
                if (m - res) % N == 0:
                    d = out[m * n]
                    d[e % N] = d.get(e % N, 0) + sign
    return [CycNum.from_cyclic(N, [d.get(e, 0) for e in range(N)]) for d in out]


@given(st.sampled_from(LEVELS), st.integers(0, 20), st.integers(0, 20))
def test_coefficients_match_double_sum(N, a, b):
    if (a % N, b % N) == (0, 0):
        return
    f = eisenstein_qexp(EisIndex((a, b), N), 40)
    assert f.coeffs[1:] == _double_sum(a % N, b % N, N, 40)[1:]


@pytest.mark.parametrize("N", LEVELS)
def test_constant_terms(N):
    for a in range(1, N):
        assert constant_term((a, 3), N) == CycNum.rational(N, 1) / 2 - CycNum.rational(N, a) / N
    for b in range(1, N):
        # (1 + z^b) / (2 (1 - z^b)) = (i/2) cot(pi b / N)
        v = embed(constant_term((0, b), N), 1, 80)
        want = 0.5j / math.tan(math.pi * b / N)
        assert abs(complex(float(v.real.mid()), float(v.imag.mid())) - want) < 1e-12
    assert constant_term((0, 0), N).is_zero()


@pytest.mark.parametrize("N", LEVELS)
def test_odd_under_negation(N):
    for a in range(N):
        for b in range(N):
            f = eisenstein_qexp(EisIndex((a, b), N), 30)
            g = eisenstein_qexp(EisIndex((-a, -b), N), 30)
            assert f == -g
            if (2 * a % N, 2 * b % N) == (0, 0):
                assert all(c.is_zero() for c in f.coeffs)


@given(st.sampled_from([3, 4, 5]), st.lists(st.tuples(st.integers(0, 7), st.integers(0, 7)), min_size=1, max_size=3))
def test_scaled_product(N, alphas):
    prec = 25
    got = scaled_product([EisIndex(a, N) for a in alphas], prec)
    want = eisenstein_qexp(EisIndex(alphas[0], N), prec)
    for a in alphas[1:]:
        want = want * eisenstein_qexp(EisIndex(a, N), prec)
    assert got == want.scale(CycNum.rational(N, (2 * N) ** len(alphas)))
    assert all(c.integral for c in got.coeffs)


@pytest.mark.parametrize("N", [3, 4, 5, 7])
def test_transformation_under_s_and_t(N):
    for alpha in [(1, 0), (0, 1), (1, 2), (2, 1)]:
        for gamma in [(0, -1, 1, 0), (1, 1, 0, 1), (2, 1, 1, 1)]:
            assert transformation_oracle(EisIndex(alpha, N), gamma, 1.5j + 0.2) < 1e-9


def test_transformation_random():
    rng = random.Random(7)
    for _ in range(10):
        N = rng.choice([3, 4, 5, 6])
        alpha = EisIndex((rng.randrange(N), rng.randrange(N)), N)
        assert transformation_oracle(alpha, random_sl2z(rng), 2j) < 1e-9


def test_wrong_index_fails_oracle():
    # the transformed index is the row vector alpha * gamma; the column convention must not pass
    N, alpha, gamma = 5, EisIndex((1, 2), 5), (1, 1, 0, 1)
    a, b, c, d = gamma
    wrong = EisIndex((a * 1 + b * 2, c * 1 + d * 2), N)
    tau = 2j
    gtau = (a * tau + b) / (c * tau + d)
    lhs = evaluate_qexp(eisenstein_qexp(alpha, 400), gtau) / (c * tau + d)
    rhs = evaluate_qexp(eisenstein_qexp(wrong, 400), tau)
    assert abs(lhs - rhs) > 1e-3


def test_not_in_sl2():
    with pytest.raises(ValueError):
        transformation_oracle(EisIndex((1, 0), 5), (2, 0, 0, 1), 2j)
