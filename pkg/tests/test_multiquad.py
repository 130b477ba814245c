from fractions import Fraction
from math import sqrt

import pytest
from hypothesis import assume, given, settings, strategies as st
from sympy import factorint

from rank2tower.multiquad import MultiQuadField, hilbert_symbol_qp, hilbert_symbol_real

FIELDS = [MultiQuadField(()), MultiQuadField((5,)), MultiQuadField((-7,)), MultiQuadField((5, 29)),
          MultiQuadField((2, 3)), MultiQuadField((5, -7)), MultiQuadField((-1, -3))]

coef = st.fractions(min_value=-20, max_value=20, max_denominator=6)


def elems(F):
    return st.tuples(*[coef] * F.degree)


@settings(max_examples=40, deadline=None)
@given(st.data())
def test_field_axioms(data):
    F = data.draw(st.sampled_from(FIELDS))
    x, y, z = (data.draw(elems(F)) for _ in range(3))
    assert F.mul(x, y) == F.mul(y, x)
    assert F.mul(F.mul(x, y), z) == F.mul(x, F.mul(y, z))
    assert F.mul(x, F.add(y, z)) == F.add(F.mul(x, y), F.mul(x, z))
    assert F.norm(F.mul(x, y)) == F.norm(x) * F.norm(y)
    if not F.is_zero(x):
        assert F.mul(x, F.inv(x)) == F.one()


@settings(max_examples=40, deadline=None)
@given(st.data())
def test_sqrt_of_squares(data):
    F = data.draw(st.sampled_from(FIELDS))
    x = data.draw(elems(F))
    s = F.sqrt(F.mul(x, x))
    assert s is not None and F.mul(s, s) == F.mul(x, x)


def test_non_squares():
    F = MultiQuadField((5, 29))
    assert F.sqrt(F.rational(2)) is None
    assert F.sqrt(F.rational(145)) is not None
    assert F.sqrt(F.quadratic(1, 1, 5)) is None  # the golden ratio has norm -1
    G = MultiQuadField((2, 3))
    assert G.sqrt(G.quadratic(4, 1, 12)) is not None  # 2 + √3 = ((√2 + √6)/2)²


def _float(F, x, signs):
    roots = [s * sqrt(r) for s, r in zip(signs, F.radicands)]
    out = 0.0
    for i, c in enumerate(x):
        t = float(c)
        for j in range(F.n):
            if i >> j & 1:
                t *= roots[j]
        out += t
    return out


@settings(max_examples=60, deadline=None)
@given(st.data())
def test_exact_sign_matches_float(data):
    F = data.draw(st.sampled_from([f for f in FIELDS if f.is_totally_real()]))
    x = data.draw(elems(F))
    for s in F.real_embeddings():
        v = _float(F, x, s)
        assume(abs(v) > 1e-6)
        assert F.sign(x, s) == (1 if v > 0 else -1)


def test_padic_embeddings_are_ring_maps():
    F = MultiQuadField((5, 29))
    embs = F.padic_embeddings(59)
    assert len(embs) == 4
    x, y = F.elem([3, 1, Fraction(1, 2), 2]), F.elem([-1, 0, 7, 1])
    mod = 59 ** 40
    for e in embs:
        xy = e.value(F.mul(x, y)) - e.value(x) * e.value(y)
        assert xy.numerator % mod == 0


def _split(a, p):
    v = 0
    while a % p == 0:
        a //= p
        v += 1
    return v, a


def _all_places(a, b):
    return sorted(set(factorint(abs(a))) | set(factorint(abs(b))) | {2})


@given(st.integers(-300, 300), st.integers(-300, 300))
def test_hilbert_product_formula(a, b):
    assume(a != 0 and b != 0)
    prod = hilbert_symbol_real(1 if a > 0 else -1, 1 if b > 0 else -1)
    for p in _all_places(a, b):
        va, ua = _split(a, p)
        vb, ub = _split(b, p)
        prod *= hilbert_symbol_qp((va, ua), (vb, ub), p)
    assert prod == 1


@given(st.integers(-300, 300), st.sampled_from([2, 3, 5, 7, 11, 13]))
def test_hilbert_standard_identities(a, p):
    assume(a not in (0, 1))
    va, ua = _split(a, p)
    vn, un = _split(-a, p)
    assert hilbert_symbol_qp((va, ua), (vn, un), p) == 1  # (a, -a) = 1
    v1, u1 = _split(1 - a, p)
    assert hilbert_symbol_qp((va, ua), (v1, u1), p) == 1  # (a, 1 - a) = 1


def test_hilbert_values():
    assert hilbert_symbol_qp((0, -1), (0, -1), 2) == -1  # the quaternions ramify at 2
    assert hilbert_symbol_qp((0, 2), (1, 1), 3) == -1  # (2, 3)_3 = (2/3)
    assert hilbert_symbol_qp((0, -1), (1, 1), 3) == -1  # (-1, 3)_3
    assert hilbert_symbol_qp((0, -1), (1, 1), 5) == 1
