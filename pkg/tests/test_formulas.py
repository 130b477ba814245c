from fractions import Fraction

import pytest
from hypothesis import given, strategies as st

from rank2tower import oracle
from rank2tower.discriminants import is_fundamental_discriminant
from rank2tower.formulas import (
    BadInput,
    BoundInapplicable,
    DerivedRank,
    FormulaInconsistent,
    FormulaNotApplicable,
    GrasHypothesisFailed,
    ambiguous_report,
    biquadratic_class_number,
    blackburn_rank_cap,
    exponent_lower_bound,
    gras_structure,
    h2_L_kuroda,
    kuroda_unit_indices,
    rank_from_products,
    unit_group,
    unit_index_q,
    v4_class_number,
)
from rank2tower.groups import AbelianGroupStructure
from rank2tower.multiquad import MultiQuadField
from rank2tower.quartic import BiquadraticField


def test_unit_index_known_fields():
    # Q(√2, √3): 2 + √3 = ((√2 + √6)/2)², and ε2·ε6 = (1 + √2)(5 + 2√6) is a square as well
    assert unit_index_q(8, 12).q == 4
    # Q(√-1, √-3) = Q(ζ12): ζ12 is a square root of ζ6 but i·ε3 is not
    assert unit_index_q(-4, -3).q == 2
    # Q(√5, √-1): the classical Hasse index 1 field
    assert unit_index_q(5, -4).q == 1


def test_unit_group_witnesses_are_square_roots():
    F = MultiQuadField((2, 3))
    G = unit_group(F)
    assert len(G.extra) == G.report.q - 1
    for s in G.extra:
        assert F.norm(s) in (1, -1)


BIQUADRATIC = [(5, 29), (5, -7), (8, 13), (-3, 13), (-4, 5), (5, -203), (40, -31), (-7, 17), (12, 5), (-11, 8),
               (29, -35), (13, 37), (-19, 85), (8, -23), (89, -4)]


@pytest.mark.parametrize("a,b", BIQUADRATIC)
def test_biquadratic_class_number_vs_oracle(a, b):
    """The class number formula over Q against a direct class group computation."""
    got = biquadratic_class_number(a, b)
    poly = BiquadraticField.from_radicands(a, b).polynomial()
    assert got.h == oracle.class_group(poly).order


def test_v4_formula_skeleton():
    # K = Q(√5, √29): all subfields have class number 1, q = 1 would give h = 1/4
    with pytest.raises(FormulaInconsistent):
        v4_class_number(1, 1, 1, base_h=1, d_ramified_infinite=0, kappa_rank=0, q=1)
    assert v4_class_number(2, 4, 1, base_h=1, d_ramified_infinite=1, kappa_rank=0, q=1) == 4
    with pytest.raises(FormulaInconsistent):
        v4_class_number(1, 1, 1, 1, 0, 0, 1, v=1)
    with pytest.raises(ValueError):
        v4_class_number(0, 1, 1, 1, 0, 0, 1)


def _primes(n):
    return tuple(oracle.prime_factors(abs(n)))


QUAD = [D for D in range(-400, 400) if is_fundamental_discriminant(D)][::3]


@pytest.mark.parametrize("D", QUAD)
def test_ambiguous_classes_over_q(D):
    """For a quadratic field the ambiguous classes are the classes of order dividing 2."""
    Q = MultiQuadField(())
    rep = ambiguous_report(Q, Q.rational(D), _primes(D), 1)
    cl = oracle.class_group(oracle.quadratic_poly(D))
    assert rep.am2_order == 2 ** cl.p_rank(2)
    assert rep.rank_hint == cl.p_rank(2)
    assert rep.t == len(_primes(D)) + (D < 0)


def test_ambiguous_unramified_rejected():
    Q = MultiQuadField(())
    with pytest.raises(FormulaNotApplicable):
        ambiguous_report(Q, Q.rational(5), (), 1)


def test_gras_structure():
    c = gras_structure(2, 2, 2)
    assert c.admits(AbelianGroupStructure((2,))) and c.admits(AbelianGroupStructure((8,)))
    assert not c.admits(AbelianGroupStructure((2, 2)))
    c = gras_structure(2, 2, 1)
    assert c.admits(AbelianGroupStructure((2, 2))) and c.admits(AbelianGroupStructure((8,)))
    assert not c.admits(AbelianGroupStructure((4,)))
    with pytest.raises(GrasHypothesisFailed):
        gras_structure(4, 2, 1)
    with pytest.raises(GrasHypothesisFailed):
        gras_structure(2, 2, 4)


def test_rank_from_products():
    assert rank_from_products(2).d_G_prime is DerivedRank.ONE
    assert rank_from_products(4).rank_exact == 2
    assert rank_from_products(16).d_G_prime is DerivedRank.AT_LEAST_3
    assert rank_from_products(4).h2_L(2) == 8
    assert rank_from_products(8).h2_L(2) is None
    for bad in (0, 1, 3, 6):
        with pytest.raises(BadInput):
            rank_from_products(bad)


@given(st.integers(1, 12), st.integers(1, 10))
def test_exponent_lower_bound(e, m):
    if e - m >= 2:
        assert exponent_lower_bound(2 ** e, m) == e - m
    else:
        with pytest.raises(BoundInapplicable):
            exponent_lower_bound(2 ** e, m)


def test_exponent_bound_rejects_non_powers():
    with pytest.raises(BoundInapplicable):
        exponent_lower_bound(12, 1)


def test_blackburn_cap():
    assert blackburn_rank_cap(AbelianGroupStructure((2, 4))) == 3
    assert blackburn_rank_cap(AbelianGroupStructure((2, 8))) is None


def test_kuroda():
    assert h2_L_kuroda(4, 1, 2, -31) == 2
    assert h2_L_kuroda(8, 2, 4, -7) == 16
    with pytest.raises(FormulaNotApplicable):
        h2_L_kuroda(4, 1, 2, -4)
    with pytest.raises(FormulaInconsistent):
        h2_L_kuroda(2, 1, 1, -7)
    chk = kuroda_unit_indices(True, h2_L=4, h2_K=2, h2_K1=2, h2_K2=2, h2_k1=1, h2_k2=2)
    assert (chk.q1, chk.q2) == (Fraction(1), Fraction(8))
    assert not chk.consistent
    chk = kuroda_unit_indices(False, h2_L=4, h2_K=2, h2_K1=2, h2_K2=2, h2_k1=1, h2_k2=1)
    assert (chk.q1, chk.q2) == (2, 1) and chk.consistent
