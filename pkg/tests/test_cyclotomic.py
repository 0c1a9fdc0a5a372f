from fractions import Fraction

import pytest
import sympy
from hypothesis import given
from hypothesis import strategies as st

from runge_modular.cyclotomic import (
    CycNum,
    InfinitePlace,
    abs_at_place,
    degree,
    embed,
    euler_phi,
    field_norm,
    galois_apply,
    infinite_places,
    norm_to_subfield,
    unit_subgroup,
    units,
)

LEVELS = [3, 4, 5, 6, 7, 8, 12]


def _prime_and_root(n):
    """A prime p = 1 mod n with a primitive n-th root of unity z mod p."""
    p = 100 * n + 1  # well above any denominator drawn below
    while not sympy.isprime(p):
        p += n
    g = sympy.primitive_root(p)
    return p, pow(g, (p - 1) // n, p)


def _reduce(x: CycNum, p: int, z: int) -> int:
    total = sum(a * pow(z, i, p) for i, a in enumerate(x.num)) % p
    return total * pow(x.den, -1, p) % p


def cyc(level):
    d = degree(level)
    return st.builds(
        lambda nums, den: CycNum(level, nums, den),
        st.lists(st.integers(-50, 50), min_size=d, max_size=d),
        st.integers(1, 9),
    )


@st.composite
def pair(draw):
    n = draw(st.sampled_from(LEVELS))
    return n, draw(cyc(n)), draw(cyc(n))


@given(pair())
def test_reduction_mod_p_is_a_ring_map(data):
    n, a, b = data
    p, z = _prime_and_root(n)
    assert _reduce(a + b, p, z) == (_reduce(a, p, z) + _reduce(b, p, z)) % p
    assert _reduce(a - b, p, z) == (_reduce(a, p, z) - _reduce(b, p, z)) % p
    assert _reduce(a * b, p, z) == _reduce(a, p, z) * _reduce(b, p, z) % p


@given(pair())
def test_inverse_and_division(data):
    n, a, b = data
    if b.is_zero():
        return
    assert b * b.inverse() == CycNum.one(n)
    assert (a / b) * b == a


@given(pair(), st.integers(0, 100))
def test_galois_is_substitution(data, k):
    n, a, b = data
    us = units(n)
    d = us[k % len(us)]
    p, z = _prime_and_root(n)
    assert _reduce(galois_apply(d, a), p, pow(z, 1, p)) == _reduce(a, p, pow(z, d, p))
    assert galois_apply(d, a * b) == galois_apply(d, a) * galois_apply(d, b)


def test_zeta_powers_wrap():
    for n in LEVELS:
        z = CycNum.zeta(n)
        assert z**n == CycNum.one(n)
        assert z ** (n // 2) != CycNum.one(n) or n == 1
        assert sum((CycNum.zeta(n, e) for e in range(n)), CycNum.zero(n)) == CycNum.zero(n)


@given(pair())
def test_norm_matches_resultant(data):
    n, a, _ = data
    if a.is_zero():
        return
    x = sympy.Symbol("x")
    poly = sum(sympy.Rational(c) * x**i for i, c in enumerate(a.coeffs))
    res = sympy.resultant(sympy.cyclotomic_poly(n, x), poly, x)
    assert field_norm(a) == Fraction(int(sympy.numer(res)), int(sympy.denom(res)))


@given(pair())
def test_relative_norm_is_invariant(data):
    n, a, _ = data
    for gens in ([], [units(n)[-1]], list(units(n))):
        D = unit_subgroup(n, gens)
        y = norm_to_subfield(a, D, fixing=[1])
        assert all(galois_apply(d, y) == y for d in D)


def test_norm_to_subfield_full_group_is_field_norm():
    a = CycNum(5, [1, 2, 0, 3])
    assert norm_to_subfield(a, units(5), fixing=[1]).to_fraction() == field_norm(a)


def test_embeddings_and_places():
    assert len(infinite_places(5)) == 2
    assert len(infinite_places(7)) == 3
    assert InfinitePlace(5, 4) == InfinitePlace(5, 1)
    z = CycNum.zeta(8)
    v = embed(z, 1, 80)
    assert abs(complex(v.real.mid(), v.imag.mid()) - complex(2**-0.5, 2**-0.5)) < 1e-15
    assert abs_at_place(CycNum.rational(5, -3), infinite_places(5)[0]).contains(3)


def test_json_roundtrip_and_rationals():
    a = CycNum.from_fractions(7, [Fraction(1, 3), 0, Fraction(-5, 2), 0, 0, 1])
    assert CycNum.from_json(7, a.to_json()) == a
    assert not a.integral
    assert CycNum.rational(7, Fraction(2, 3)).to_fraction() == Fraction(2, 3)
    with pytest.raises(ValueError):
        a.to_fraction()


def test_euler_phi():
    assert [euler_phi(n) for n in range(1, 13)] == [1, 1, 2, 2, 4, 2, 6, 4, 6, 4, 10, 4]
