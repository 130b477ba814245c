"""Elements of quadratic orders, fundamental units, prime-power generators and primary normalization."""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from math import gcd, isqrt

from sympy.ntheory.residue_ntheory import sqrt_mod

from .discriminants import is_fundamental_discriminant, NotFundamental, PrimeDiscriminant
from .forms import (
    compose,
    prime_form,
    reduce_with_matrix,
    _rho_indefinite,
    wide_class_number,
)


class GeneratorNotFound(RuntimeError):
    pass


class NoPrimaryChoice(ValueError):
    pass


@dataclass(frozen=True)
class QuadraticInteger:
    """The integer (A + B·√D)/2 of the field of discriminant D; A ≡ B·D mod 2."""
    A: int
    B: int
    D: int

    def __post_init__(self):
        if (self.A - self.B * self.D) % 2:
            raise ValueError(f"({self.A} + {self.B}√{self.D})/2 is not integral")

    @classmethod
    def from_xy(cls, x, y, D: int) -> "QuadraticInteger":
        """x + y·√D with x, y integers or half-integers."""
        A, B = Fraction(x) * 2, Fraction(y) * 2
        if A.denominator != 1 or B.denominator != 1:
            raise ValueError("coordinates must be half-integers")
        return cls(int(A), int(B), D)

    @classmethod
    def rational(cls, n: int, D: int) -> "QuadraticInteger":
        return cls(2 * n, 0, D)

    @property
    def x(self) -> Fraction:
        return Fraction(self.A, 2)

    @property
    def y(self) -> Fraction:
        return Fraction(self.B, 2)

    def norm(self) -> int:
        return (self.A * self.A - self.D * self.B * self.B) // 4

    def trace(self) -> int:
        return self.A

    def conj(self) -> "QuadraticInteger":
        return QuadraticInteger(self.A, -self.B, self.D)

    def __neg__(self):
        return QuadraticInteger(-self.A, -self.B, self.D)

    def __add__(self, other):
        other = self._coerce(other)
        return QuadraticInteger(self.A + other.A, self.B + other.B, self.D)

    def __sub__(self, other):
        return self + (-self._coerce(other))

    def __mul__(self, other):
        other = self._coerce(other)
        A = (self.A * other.A + self.D * self.B * other.B) // 2
        B = (self.A * other.B + self.B * other.A) // 2
        return QuadraticInteger(A, B, self.D)

    __rmul__ = __mul__

    def __pow__(self, n: int):
        if n < 0:
            return self.unit_inverse() ** (-n)
        out = QuadraticInteger.rational(1, self.D)
        base = self
        while n:
            if n & 1:
                out = out * base
            base = base * base
            n >>= 1
        return out

    def unit_inverse(self) -> "QuadraticInteger":
        n = self.norm()
        if n not in (1, -1):
            raise ValueError("not a unit")
        c = self.conj()
        return c if n == 1 else -c

    def _coerce(self, other) -> "QuadraticInteger":
        if isinstance(other, int):
            return QuadraticInteger.rational(other, self.D)
        if other.D != self.D:
            raise ValueError("different fields")
        return other

    def divisible_by(self, n: int) -> bool:
        """True when self/n is again an integer of the field."""
        if self.A % n or self.B % n:
            return False
        A, B = self.A // n, self.B // n
        return (A - B * self.D) % 2 == 0

    def coords(self) -> tuple[int, int]:
        """Coordinates in the basis (1, ω), ω = (σ + √D)/2, σ = D mod 2."""
        s = self.D % 2
        return (self.A - self.B * s) // 2, self.B

    @classmethod
    def from_coords(cls, u: int, v: int, D: int) -> "QuadraticInteger":
        s = D % 2
        return cls(2 * u + v * s, v, D)

    def is_primitive(self) -> bool:
        u, v = self.coords()
        return gcd(u, v) == 1

    def sign(self) -> int:
        """Exact sign of (A + B√D)/2 in the real embedding with √D > 0 (D > 0)."""
        if self.D < 0:
            raise ValueError("imaginary field has no real embedding")
        sa = (self.A > 0) - (self.A < 0)
        sb = (self.B > 0) - (self.B < 0)
        if sa == sb or sb == 0:
            return sa
        if sa == 0:
            return sb
        return sa if self.A * self.A > self.D * self.B * self.B else sb

    def __float__(self):
        if self.D < 0:
            raise ValueError("imaginary")
        return (self.A + self.B * self.D ** 0.5) / 2

    def __str__(self) -> str:
        return format_quadratic(self)


def squarefree_kernel(D: int) -> tuple[int, int]:
    """D = g²·m with m squarefree; returns (g, m) for a fundamental discriminant."""
    return (2, D // 4) if D % 4 == 0 else (1, D)


def format_quadratic(a: QuadraticInteger) -> str:
    g, m = squarefree_kernel(a.D)
    # (A + B g √m)/2
    x = Fraction(a.A, 2)
    y = Fraction(a.B * g, 2)

    def fmt(q: Fraction) -> str:
        return str(q.numerator) if q.denominator == 1 else f"{q.numerator}/{q.denominator}"
    if y == 0:
        return fmt(x)
    rad = f"√{m}" if m != -1 else "i"
    coef = "" if abs(y) == 1 else fmt(abs(y))
    if x == 0:
        return ("-" if y < 0 else "") + coef + rad
    return f"{fmt(x)} {'-' if y < 0 else '+'} {coef}{rad}"


@dataclass(frozen=True)
class FundamentalUnit:
    unit: QuadraticInteger
    norm: int

    def __post_init__(self):
        if self.unit.norm() != self.norm or self.norm not in (1, -1):
            raise ValueError("inconsistent unit norm")
        if self.unit.sign() <= 0 or self.unit.A + self.unit.B <= 0:
            raise ValueError("unit must exceed 1")


def fundamental_unit(D: int) -> FundamentalUnit:
    """First convergent p/q of the continued fraction of ω with p - qω' of norm ±1."""
    if D <= 0 or not is_fundamental_discriminant(D):
        raise NotFundamental(D)
    s = D % 2
    r = isqrt(D)
    P, Q = s, 2  # ω = (P + √D)/Q
    p0, p1 = 0, 1
    q0, q1 = 1, 0
    while True:
        a = (P + r) // Q
        p0, p1 = p1, a * p1 + p0
        q0, q1 = q1, a * q1 + q0
        eps = QuadraticInteger(2 * p1 - q1 * s, q1, D)
        n = eps.norm()
        if n in (1, -1):
            return FundamentalUnit(eps, n)
        P = a * Q - P
        Q = (D - P * P) // Q


def _balance(alpha: QuadraticInteger, eps: QuadraticInteger) -> QuadraticInteger:
    """The associate alpha·eps^k minimizing A² + D·B² (both embeddings balanced)."""
    best = alpha
    size = lambda z: z.A * z.A + z.D * z.B * z.B
    for step in (eps, eps.unit_inverse()):
        cur = best
        while True:
            nxt = cur * step
            if size(nxt) < size(cur):
                cur = nxt
            else:
                break
        if size(cur) < size(best):
            best = cur
    return best


def principal_power_generator(k2_disc: int, p3: PrimeDiscriminant | int, u: int | None = None,
                              bound: int = 10 ** 6) -> QuadraticInteger:
    """A generator of 𝔭^u for a split prime 𝔭 over p; u defaults to h(k2)/2."""
    D = k2_disc
    p = p3.prime if isinstance(p3, PrimeDiscriminant) else int(p3)
    if u is None:
        h = wide_class_number(D)
        if h % 2:
            raise ValueError(f"h({D}) = {h} is odd")
        u = h // 2
    base = prime_form(D, p)
    if base is None or D % p == 0:
        raise ValueError(f"{p} does not split in Q(√{D})")
    # the unreduced form (p^u, B, C) represents the ideal 𝔭^u itself
    F = base
    for _ in range(u - 1):
        F = compose(F, base)
    G, M = reduce_with_matrix(F)
    start = G
    steps = 0
    while abs(G.a) != 1:
        G, M = _rho_indefinite(G, M)
        steps += 1
        if G == start or steps > bound:
            raise GeneratorNotFound(f"𝔭^{u} over {p} is not principal in Q(√{D})")
    m, n = M[0], M[2]
    assert F(m, n) == G.a
    pu = F.a
    alpha = QuadraticInteger(2 * pu * m + n * F.b, n, D)
    assert abs(alpha.norm()) == p ** u
    alpha = _balance(alpha, fundamental_unit(D).unit)
    if alpha.A * alpha.B < 0:
        # pass to the conjugate prime so that both coordinates carry the same sign
        alpha = alpha.conj()
    if abs(alpha.A) > 2 * bound or abs(alpha.B) > 2 * bound:
        raise GeneratorNotFound("generator exceeds the coordinate bound")
    return alpha


def _squares_mod4(D: int) -> set[tuple[int, int]]:
    out = set()
    for u in range(4):
        for v in range(4):
            z = QuadraticInteger.from_coords(u, v, D)
            c = (z * z).coords()
            out.add((c[0] % 4, c[1] % 4))
    return out


_SQ_CACHE: dict[int, frozenset] = {}


def is_square_mod4(alpha: QuadraticInteger) -> bool:
    key = alpha.D % 16
    if key not in _SQ_CACHE:
        _SQ_CACHE[key] = frozenset(_squares_mod4(alpha.D))
    u, v = alpha.coords()
    return (u % 4, v % 4) in _SQ_CACHE[key]


def is_primary(alpha: QuadraticInteger) -> bool:
    """Congruent to a square mod 4.

    For even norm (only when 2 splits) the 2-adapted reading is used: at each dyadic place
    alpha = 2^e·u with u ≡ 1 mod 4.
    """
    if alpha.norm() % 2:
        return is_square_mod4(alpha)
    return is_primary_over(alpha, 8)


# classes a = 2^e·u of Q2*/Q2*² that become unramified over Q2(√delta), as (e mod 2, u mod 4)
_DYADIC_OK = {
    8: {(0, 1), (1, 1)},
    -8: {(0, 1), (1, 3)},
    -4: {(0, 1), (0, 3)},
}


def is_primary_over(alpha: QuadraticInteger, delta: int) -> bool:
    """Primary, with the dyadic places read relative to the quadratic twist Q2(√delta).

    2 not split: congruent to a square mod 4. Otherwise each dyadic image 2^e·u must lie in a
    class of Q2*/Q2*² that becomes unramified over Q2(√delta) (delta odd: e even, u ≡ 1 mod 4).
    For units and delta != -4 this is again "congruent to a square mod 4".
    """
    n = alpha.norm()
    if alpha.D % 8 != 1:
        return is_square_mod4(alpha)
    allowed = _DYADIC_OK.get(delta, {(0, 1)})
    k = (abs(n) & -abs(n)).bit_length() + 4  # the unit part is read off below 2^k
    mod = 2 ** k
    for s in sqrt_mod(alpha.D % (2 * mod), 2 * mod, all_roots=True):
        img = (alpha.A + alpha.B * s) // 2 % mod
        e = (img & -img).bit_length() - 1
        if (e % 2, (img >> e) % 4) not in allowed:
            return False
    return True


def primary_normalize(pi: QuadraticInteger, unit: QuadraticInteger | None = None) -> QuadraticInteger:
    """±pi, whichever is primary; when both are, the one ≡ 1 mod 4, then the one with positive trace.

    With a unit ε supplied, ±ε·pi are tried when neither sign of pi is primary (ε² is a square,
    so these exhaust the associates up to squares).
    """
    for base in (pi,) if unit is None else (pi, pi * unit):
        cands = [z for z in (base, -base) if is_primary(z)]
        if len(cands) == 1:
            return cands[0]
        if len(cands) == 2:
            one = [z for z in cands if _is_one_mod4(z)]
            if len(one) == 1:
                return one[0]
            return max(cands, key=lambda z: (z.A, z.B))
    raise NoPrimaryChoice(str(pi))


def _is_one_mod4(z: QuadraticInteger) -> bool:
    u, v = z.coords()
    return u % 4 == 1 and v % 4 == 0


def unit_for_even_p3(k2_disc: int) -> QuadraticInteger:
    """For d3 = -4 the construction takes the fundamental unit of k2 in place of π3."""
    return fundamental_unit(k2_disc).unit
