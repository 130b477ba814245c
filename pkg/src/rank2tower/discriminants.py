"""Prime discriminants, Kronecker and rational quartic symbols, A/B role assignment."""
from __future__ import annotations

from dataclasses import dataclass
from enum import Enum
from math import prod

from sympy import factorint
from sympy.functions.combinatorial.numbers import jacobi_symbol


class NotFundamental(ValueError):
    pass


class SymbolUndefined(ValueError):
    pass


def _squarefree(n: int) -> bool:
    return n != 0 and all(e == 1 for e in factorint(abs(n)).values())


def is_fundamental_discriminant(n: int) -> bool:
    if n in (0, 1, -1):
        return False
    if n % 4 == 1:
        return _squarefree(n)
    if n % 4 == 0:
        m = n // 4
        return m % 4 in (2, 3) and _squarefree(m)
    return False


def kronecker(a: int, n: int) -> int:
    """Kronecker symbol (a/n), with (a/2) = 0, +1, -1 for a even, ±1 mod 8, ±3 mod 8."""
    if n == 0:
        return 1 if a in (1, -1) else 0
    result = 1
    if n < 0:
        n = -n
        if a < 0:
            result = -result
    v = 0
    while n % 2 == 0:
        n //= 2
        v += 1
    if v:
        if a % 2 == 0:
            return 0
        if v % 2 and a % 8 in (3, 5):
            result = -result
    if n == 1:
        return result
    return result * int(jacobi_symbol(a % n, n))


@dataclass(frozen=True, order=True)
class PrimeDiscriminant:
    value: int
    prime: int

    def __post_init__(self):
        if self.value not in (-4, 8, -8):
            p = abs(self.value)
            if self.prime != p or p % 2 == 0 or self.value != (p if p % 4 == 1 else -p):
                raise ValueError(f"{self.value} is not a prime discriminant")
        elif self.prime != 2:
            raise ValueError("even prime discriminants sit over 2")

    @classmethod
    def of(cls, value: int) -> "PrimeDiscriminant":
        return cls(value, 2 if value % 2 == 0 else abs(value))

    def __int__(self) -> int:
        return self.value

    def __str__(self) -> str:
        return str(self.value)


def factor_into_prime_discriminants(d: int) -> tuple[PrimeDiscriminant, ...]:
    """Unique splitting of a fundamental discriminant; sorted by prime."""
    if not is_fundamental_discriminant(d):
        raise NotFundamental(d)
    out = []
    rest = d
    for p in sorted(factorint(abs(d))):
        if p == 2:
            continue
        v = p if p % 4 == 1 else -p
        out.append(PrimeDiscriminant(v, p))
        rest //= v
    if rest != 1:
        # the leftover is the 2-part: -4, 8 or -8
        out.append(PrimeDiscriminant(rest, 2))
    return tuple(sorted(out, key=lambda q: q.prime))


def quartic_residue_symbol(p: int, q: int) -> int:
    """(p/q)_4 = p^((q-1)/4) mod q for q ≡ 1 mod 4; p = 8 stands for the prime 2."""
    if q % 4 != 1:
        raise SymbolUndefined(f"q = {q} is not 1 mod 4")
    base = 2 if p == 8 else p
    if p == 8 and q % 8 != 1:
        raise SymbolUndefined(f"(2/{q})_4 needs q ≡ 1 mod 8")
    if base <= 0 or kronecker(base, q) != 1:
        raise SymbolUndefined(f"({p}/{q}) is not +1")
    r = pow(base, (q - 1) // 4, q)
    return 1 if r == 1 else -1


class Case(str, Enum):
    A = "A"
    B = "B"


@dataclass(frozen=True)
class DiscriminantTriple:
    d1: PrimeDiscriminant
    d2: PrimeDiscriminant
    d3: PrimeDiscriminant
    case: Case

    @property
    def d(self) -> int:
        return self.d1.value * self.d2.value * self.d3.value

    @property
    def values(self) -> tuple[int, int, int]:
        return self.d1.value, self.d2.value, self.d3.value

    def symbol(self, i: int, j: int) -> int:
        """(d_i / p_j) with 1-based role indices."""
        ds = (self.d1, self.d2, self.d3)
        return kronecker(ds[i - 1].value, ds[j - 1].prime)


@dataclass(frozen=True)
class OutOfScope:
    d: int
    reason: str  # "factor_count", "sign_pattern" or "symbol_pattern"
    detail: str = ""


def _is_case_a(d1, d2, d3) -> bool:
    return (kronecker(d1.value, d2.prime) == 1 and kronecker(d1.value, d3.prime) == 1
            and kronecker(d2.value, d3.prime) == -1)


def _is_case_b(d1, d2, d3) -> bool:
    return (kronecker(d1.value, d3.prime) == 1 and kronecker(d2.value, d3.prime) == 1
            and kronecker(d1.value, d2.prime) == -1)


def assign_roles(d: int) -> DiscriminantTriple | OutOfScope:
    if d >= 0 or not is_fundamental_discriminant(d):
        raise NotFundamental(d)
    factors = factor_into_prime_discriminants(d)
    if len(factors) != 3:
        return OutOfScope(d, "factor_count", f"{len(factors)} prime discriminants")
    neg = [q for q in factors if q.value < 0]
    pos = sorted((q for q in factors if q.value > 0), key=lambda q: q.value)
    if len(neg) != 1:
        return OutOfScope(d, "sign_pattern", f"{len(neg)} negative prime discriminants")
    d3 = neg[0]
    a, b = pos
    hits = []
    for d1, d2 in ((a, b), (b, a)):
        if _is_case_a(d1, d2, d3):
            hits.append(DiscriminantTriple(d1, d2, d3, Case.A))
    if _is_case_b(a, b, d3):
        hits.append(DiscriminantTriple(a, b, d3, Case.B))
    if len(hits) != 1:
        return OutOfScope(d, "symbol_pattern", _symbol_table(factors))
    return hits[0]


def _symbol_table(factors) -> str:
    return " ".join(f"({x.value}/{y.prime})={kronecker(x.value, y.prime):+d}"
                    for x in factors for y in factors if x is not y)


def product_of(factors) -> int:
    return prod(int(q) for q in factors)
