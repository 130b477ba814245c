from math import isqrt

import pytest
from hypothesis import given, strategies as st
from sympy.solvers.diophantine.diophantine import diop_DN

from rank2tower.discriminants import (
    Case,
    OutOfScope,
    assign_roles,
    factor_into_prime_discriminants,
    is_fundamental_discriminant,
)
from rank2tower.forms import wide_class_number
from rank2tower.units import (
    QuadraticInteger,
    fundamental_unit,
    is_primary,
    principal_power_generator,
    primary_normalize,
)


def brute_unit(D):
    """Smallest y > 0 with x² - D·y² = ±4 (units (x + y√D)/2), then the smallest x."""
    y = 1
    while True:
        for s in (-4, 4):
            t = D * y * y + s
            if t > 0:
                x = isqrt(t)
                if x * x == t and (x - y * D) % 2 == 0:
                    return x, y, s // 4
        y += 1


def test_known_units():
    assert fundamental_unit(5).unit == QuadraticInteger(1, 1, 5)
    assert fundamental_unit(8).unit == QuadraticInteger(2, 1, 8)  # 1 + √2
    assert fundamental_unit(12).unit == QuadraticInteger(4, 1, 12)  # 2 + √3
    assert fundamental_unit(40).unit == QuadraticInteger(6, 1, 40)  # 3 + √10
    assert fundamental_unit(61).unit == QuadraticInteger(39, 5, 61)
    assert fundamental_unit(40).norm == -1 and fundamental_unit(12).norm == 1


@pytest.mark.parametrize("D", [D for D in range(5, 200) if is_fundamental_discriminant(D)])
def test_units_vs_brute_force(D):
    eps = fundamental_unit(D)
    x, y, n = brute_unit(D)
    assert (eps.unit.A, eps.unit.B, eps.norm) == (x, y, n)


def pell_unit(D):
    """Smallest solution of x² - D·y² = ±4 from sympy's generalized Pell solver."""
    neg = [s for s in diop_DN(D, -4) if s[1] > 0]
    if neg:
        x, y = min(neg, key=lambda s: s[1])
        return abs(x), y, -1
    x, y = min((s for s in diop_DN(D, 4) if s[1] > 0), key=lambda s: s[1])
    return abs(x), y, 1


@pytest.mark.parametrize("D", [D for D in range(200, 3000) if is_fundamental_discriminant(D)][::3])
def test_units_vs_pell_solver(D):
    eps = fundamental_unit(D)
    assert (eps.unit.A, eps.unit.B, eps.norm) == pell_unit(D)


def test_arithmetic():
    a = QuadraticInteger(3, 1, 5)  # (3 + √5)/2
    assert a.norm() == 1 and a.trace() == 3
    assert a * a.conj() == QuadraticInteger.rational(1, 5)
    e = fundamental_unit(5).unit
    assert e ** 2 == a
    assert e ** -1 * e == QuadraticInteger.rational(1, 5)
    assert str(QuadraticInteger(6, 2, 40)) == "3 + 2√10"
    with pytest.raises(ValueError):
        QuadraticInteger(1, 0, 5)


@given(st.integers(-50, 50), st.integers(-50, 50), st.sampled_from([5, 8, 12, 13, 40, -3, -4, -35, -20]))
def test_coords_roundtrip(u, v, D):
    z = QuadraticInteger.from_coords(u, v, D)
    assert z.coords() == (u, v)


@given(st.integers(-200, 200), st.integers(-200, 200), st.sampled_from([5, 40, 481, 1885]))
def test_exact_sign(a, b, D):
    if (a - b * D) % 2:
        a += 1
    z = QuadraticInteger(a, b, D)
    f = (a + b * D ** 0.5) / 2
    if abs(f) > 1e-6:
        assert z.sign() == (1 if f > 0 else -1)


def test_example_generator():
    """d = -31·5·8: the generator of the square of the prime above 31 in Q(√10) is ±(3 + 2√10)."""
    pi = principal_power_generator(40, 31)
    assert pi.norm() in (31, -31)
    assert primary_normalize(pi) == QuadraticInteger(6, 2, 40)
    assert is_primary(QuadraticInteger(6, 2, 40))
    assert not is_primary(QuadraticInteger(-6, -2, 40))


def test_squares_are_primary():
    for D in (5, 40, 13 * 37, 8 * 29, -35, -20, 5 * 17):
        for u in range(-4, 5):
            for v in range(-4, 5):
                z = QuadraticInteger.from_coords(u, v, D)
                if z.norm() % 2:
                    assert is_primary(z * z)


def _three_factor(d):
    return len(factor_into_prime_discriminants(d)) == 3


def test_case_b_unit_has_norm_minus_one():
    """For d1, d2 > 0 with (d1/p2) = -1, the fundamental unit of Q(√d1d2) has norm -1."""
    seen = 0
    for d in range(-3, -8000, -1):
        if not is_fundamental_discriminant(d) or not _three_factor(d):
            continue
        t = assign_roles(d)
        if isinstance(t, OutOfScope) or t.case is not Case.B:
            continue
        D = t.d1.value * t.d2.value
        assert fundamental_unit(D).norm == -1
        assert wide_class_number(D) % 2 == 0
        seen += 1
    assert seen >= 30
