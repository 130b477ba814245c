from math import prod

import pytest
from hypothesis import given, settings, strategies as st
from sympy import factorint, isprime

from rank2tower.discriminants import (
    Case,
    DiscriminantTriple,
    NotFundamental,
    OutOfScope,
    PrimeDiscriminant,
    SymbolUndefined,
    assign_roles,
    factor_into_prime_discriminants,
    is_fundamental_discriminant,
    kronecker,
    quartic_residue_symbol,
)


def brute_legendre(a, p):
    a %= p
    if a == 0:
        return 0
    return 1 if any(x * x % p == a for x in range(1, p)) else -1


def brute_kronecker(a, n):
    """Multiplicative extension over the factorization of n > 0."""
    out = 1
    for p, e in factorint(n).items():
        if p == 2:
            s = 0 if a % 2 == 0 else (1 if a % 8 in (1, 7) else -1)
        else:
            s = brute_legendre(a, p)
        out *= s ** e
    return out


@given(st.integers(-500, 500), st.integers(1, 300))
def test_kronecker_matches_brute_force(a, n):
    assert kronecker(a, n) == brute_kronecker(a, n)


def test_kronecker_values():
    assert kronecker(5, 2) == -1
    assert kronecker(17, 2) == 1
    assert kronecker(-7, 2) == 1
    assert kronecker(10, 31) == 1  # 14² = 196 ≡ 10
    assert kronecker(-31, 5) == 1
    assert kronecker(8, 5) == -1


def test_fundamental_discriminants():
    good = [-3, -4, -7, -8, 5, 8, 12, -1240, -2379, -84, 40]
    bad = [-1, 0, 1, -12 * 4, -10, 9, -16, 20 * 4, 2]
    assert all(is_fundamental_discriminant(d) for d in good)
    assert not any(is_fundamental_discriminant(d) for d in bad)


def test_factorization_examples():
    assert [q.value for q in factor_into_prime_discriminants(-1240)] == [8, 5, -31]
    assert [q.value for q in factor_into_prime_discriminants(-1780)] == [-4, 5, 89]
    assert [q.value for q in factor_into_prime_discriminants(-2379)] == [-3, 13, 61]
    assert [q.value for q in factor_into_prime_discriminants(-4)] == [-4]


@settings(max_examples=300)
@given(st.integers(-100000, 100000))
def test_factorization_product(d):
    if not is_fundamental_discriminant(d):
        with pytest.raises(NotFundamental):
            factor_into_prime_discriminants(d)
        return
    fs = factor_into_prime_discriminants(d)
    assert prod(q.value for q in fs) == d
    for q in fs:
        assert is_fundamental_discriminant(q.value)
        assert q.prime == 2 or (isprime(q.prime) and abs(q.value) == q.prime)
    assert len({q.prime for q in fs}) == len(fs)


def test_prime_discriminant_validation():
    PrimeDiscriminant.of(-7)
    PrimeDiscriminant.of(8)
    with pytest.raises(ValueError):
        PrimeDiscriminant.of(7)
    with pytest.raises(ValueError):
        PrimeDiscriminant(-3, 5)


def test_quartic_residue_symbol():
    # 2 ≡ 6² mod 17 and 2^4 = 16 ≡ -1 mod 17, so (2/17)_4 = -1
    assert quartic_residue_symbol(8, 17) == -1
    # 13 ≡ 8² mod 17? 8² = 64 ≡ 13, and 13^4 = 28561 ≡ 1 mod 17
    assert quartic_residue_symbol(13, 17) == 1
    with pytest.raises(SymbolUndefined):
        quartic_residue_symbol(3, 17)  # 3 is a nonresidue
    with pytest.raises(SymbolUndefined):
        quartic_residue_symbol(2, 7)
    with pytest.raises(SymbolUndefined):
        quartic_residue_symbol(8, 13)


# role assignment on the reference discriminants (factors and type read off the reference table)
ROLES = {
    -1015: ((29, 5, -7), Case.A),
    -1240: ((5, 8, -31), Case.B),
    -1443: ((13, 37, -3), Case.B),
    -1595: ((5, 29, -11), Case.A),
    -1615: ((5, 17, -19), Case.B),
    -1624: ((8, 29, -7), Case.B),
    -1780: ((89, 5, -4), Case.A),
    -2035: ((5, 37, -11), Case.B),
    -2067: ((13, 53, -3), Case.A),
    -2072: ((8, 37, -7), Case.B),
    -2392: ((8, 13, -23), Case.B),
}


@pytest.mark.parametrize("d", sorted(ROLES))
def test_assign_roles_reference(d):
    t = assign_roles(d)
    assert isinstance(t, DiscriminantTriple)
    assert (t.values, t.case) == ROLES[d]
    assert t.d == d


def test_assign_roles_out_of_scope():
    assert assign_roles(-84).reason == "sign_pattern"
    assert assign_roles(-3 * 5 * 13 * 8).reason == "factor_count"
    assert assign_roles(-4 * 5).reason == "factor_count"
    r = assign_roles(-2379)
    assert isinstance(r, OutOfScope) and r.reason == "symbol_pattern"
    with pytest.raises(NotFundamental):
        assign_roles(5 * 13 * 8)
    with pytest.raises(NotFundamental):
        assign_roles(-10)


def _three_factor_discs(limit):
    for d in range(-3, -limit, -1):
        if is_fundamental_discriminant(d) and len(factor_into_prime_discriminants(d)) == 3:
            yield d


def test_roles_satisfy_symbol_conditions():
    for d in _three_factor_discs(6000):
        t = assign_roles(d)
        if isinstance(t, OutOfScope):
            continue
        assert t.d3.value < 0 < t.d1.value and t.d2.value > 0
        if t.case is Case.A:
            assert (t.symbol(1, 2), t.symbol(1, 3), t.symbol(2, 3)) == (1, 1, -1)
        else:
            assert (t.symbol(1, 3), t.symbol(2, 3), t.symbol(1, 2)) == (1, 1, -1)
            assert t.d1.value < t.d2.value


def test_case_b_symmetric_in_d1_d2():
    """In case B the conditions are symmetric under d1 <-> d2 (reciprocity for positive discriminants)."""
    for d in _three_factor_discs(6000):
        t = assign_roles(d)
        if isinstance(t, OutOfScope) or t.case is not Case.B:
            continue
        assert kronecker(t.d2.value, t.d1.prime) == -1


def test_roles_agree_with_redei_type_check():
    """In scope iff Cl₂(k) ≃ (2, 2^m), checked for |d| < 20000."""
    from rank2tower.forms import check_cl2_type
    forward, converse = [], []
    for d in range(-3, -20000, -1):
        if not is_fundamental_discriminant(d):
            continue
        in_scope = not isinstance(assign_roles(d), OutOfScope)
        typed = check_cl2_type(d)[0]
        if in_scope and not typed:
            forward.append(d)
        if typed and not in_scope:
            converse.append(d)
    assert not forward
    assert not converse, f"{len(converse)} fields of type (2, 2^m) out of scope, e.g. {converse[:5]}"
