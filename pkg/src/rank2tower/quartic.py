"""Unramified cyclic quartic extensions of k and their nonnormal quartic subfields K2, K2~, K1."""
from __future__ import annotations

from dataclasses import dataclass
from math import gcd, isqrt

from .discriminants import Case, DiscriminantTriple
from .forms import is_c4_split, redei_data
from .units import QuadraticInteger, is_primary, is_primary_over, primary_normalize


class ConicSearchExhausted(RuntimeError):
    pass


class NotC4(ValueError):
    pass


class DegenerateQuartic(ValueError):
    pass


@dataclass(frozen=True)
class ConicSolution:
    """A·x² + B·y² = z² with A > 0 > B.

    Case B: A = d1·d2, B = d3 and α = z + x√(d1·d2).
    Case A: A = d1, B = d2·d3 and α = z + y√(d2·d3).
    With half set, α is (z + c√D)/2 (the conic forces z ≡ c ≡ 1 mod 2 there).
    """
    x: int
    y: int
    z: int
    A: int
    B: int
    case: Case
    half: bool = False

    def __post_init__(self):
        if self.A * self.x ** 2 + self.B * self.y ** 2 != self.z ** 2:
            raise ValueError("not a solution")

    @property
    def k2_disc(self) -> int:
        return self.A if self.case is Case.B else self.B

    @property
    def alpha(self) -> QuadraticInteger:
        c = self.x if self.case is Case.B else self.y
        if self.half:
            return QuadraticInteger(self.z, c, self.k2_disc)
        return QuadraticInteger(2 * self.z, 2 * c, self.k2_disc)

    @property
    def beta4(self) -> QuadraticInteger:
        """4β with β = (z + c'√k1)/2 the companion element of k1 (case B: c' = y, k1 = d3).

        With half set α was divided by 2, so β is doubled to keep αβ a square in L.
        """
        m = 8 if self.half else 4
        if self.case is Case.B:
            return QuadraticInteger(m * self.z, m * self.y, self.B)
        return QuadraticInteger(m * self.z, m * self.x, self.A)


@dataclass(frozen=True)
class QuarticFieldSpec:
    """The field generated by a root of X⁴ + p·X² + q, i.e. by √(t·α) over Q(√k2_disc)."""
    p: int
    q: int
    alpha: QuadraticInteger
    k2_disc: int
    twist: int
    case: Case
    label: str = "K2"

    @property
    def coeffs(self) -> tuple[int, int, int, int, int]:
        return (1, 0, self.p, 0, self.q)

    def __str__(self) -> str:
        def term(c, s):
            if c == 0:
                return ""
            sign = "-" if c < 0 else "+"
            mag = abs(c)
            return f" {sign} {'' if mag == 1 and s else mag}{s}"
        return "x^4" + term(self.p, "x^2") + term(self.q, "")


def _quartic_from(gen: QuadraticInteger, alpha: QuadraticInteger, twist: int, case: Case,
                  label: str) -> QuarticFieldSpec:
    # √gen has minimal polynomial X⁴ - Tr(gen)·X² + N(gen)
    spec = QuarticFieldSpec(-gen.trace(), gen.norm(), alpha, gen.D, twist, case, label)
    if not quartic_is_irreducible(spec.p, spec.q):
        raise DegenerateQuartic(str(spec))
    return spec


def quartic_is_irreducible(p: int, q: int) -> bool:
    """X⁴ + pX² + q over Q: reducible iff it has a quadratic factor."""
    disc = p * p - 4 * q
    if disc >= 0 and isqrt(disc) ** 2 == disc:
        return False  # splits as a product of two quadratics in X²
    if q >= 0:
        s = isqrt(q)
        if s * s == q:
            # (X² + aX + s)(X² - aX + s) with a² = 2s - p, also with -s
            for c in (s, -s):
                a2 = 2 * c - p
                if a2 >= 0 and isqrt(a2) ** 2 == a2:
                    return False
    return True


def _choose(cands: list[QuadraticInteger], primitive, delta: int) -> QuadraticInteger | None:
    ok = [a for a in cands if primitive(a) and is_primary_over(a, delta)]
    if not ok:
        return None
    if len(ok) == 1:
        return ok[0]
    if is_primary(ok[0]) and is_primary(ok[1]):
        return primary_normalize(ok[0])
    return ok[0]  # both signs admissible but not both primary in the strict sense: keep z > 0


def solve_conic(triple: DiscriminantTriple, max_x: int = 10 ** 5) -> ConicSolution:
    """The canonical primitive solution with primary α.

    Scan the variable of the positive coefficient upward, then the other one; the first
    solution whose α (with either sign of z) is primitive and primary wins. A sign tie is
    broken by primary_normalize.
    """
    d1, d2, d3 = triple.values
    if triple.case is Case.B:
        A, B = d1 * d2, d3
    else:
        A, B = d1, d2 * d3
    if not is_c4_split(A, B) or (A, B) not in redei_data(triple.d).c4_factorizations:
        raise NotC4(f"{A}·{B} is not a C4-splitting of {triple.d}")
    nb = -B
    D, other = (A, B) if triple.case is Case.B else (B, A)
    delta = d1 if triple.case is Case.A else d3  # M = k2(√delta)
    # when the conic forces z ≡ c ≡ 1 mod 2, z + c√D is twice an integer: try the primitive
    # element (z + c√D)/2 first, then z + c√D itself with gcd(z, c) = 1
    forced_odd = other % 2 == 0 and D % 4 == 1
    for x in range(1, max_x + 1):
        ax2 = A * x * x
        ymax = isqrt(ax2 // nb)
        for y in range(1, ymax + 1):
            r = ax2 - nb * y * y
            z = isqrt(r)
            if z * z != r or z == 0:
                continue
            c = x if triple.case is Case.B else y
            if forced_odd:
                alpha = _choose([QuadraticInteger(s * z, c, D) for s in (1, -1)],
                                QuadraticInteger.is_primitive, delta)
                if alpha is not None:
                    return ConicSolution(x, y, alpha.A, A, B, triple.case, half=True)
                cands = [QuadraticInteger(2 * s * z, 2 * c, D) for s in (1, -1)]
                alpha = _choose(cands, lambda a: gcd(a.A // 2, a.B // 2) == 1, delta)
            else:
                cands = [QuadraticInteger(2 * s * z, 2 * c, D) for s in (1, -1)]
                alpha = _choose(cands, QuadraticInteger.is_primitive, delta)
            if alpha is not None:
                return ConicSolution(x, y, alpha.A // 2, A, B, triple.case)
    raise ConicSearchExhausted(f"no primitive primary solution with x <= {max_x}")


def build_quartic(triple: DiscriminantTriple, sol: ConicSolution | None = None
                  ) -> tuple[QuarticFieldSpec, QuarticFieldSpec]:
    """K2 = k2(√α) and its twin K2~ = k2(√(d2·α))."""
    sol = sol or solve_conic(triple)
    alpha = sol.alpha
    K2 = _quartic_from(alpha, alpha, 1, triple.case, "K2")
    t = triple.d2.value
    twin = _quartic_from(alpha * t, alpha, t, triple.case, "K2~")
    return K2, twin


def twin_L_quartic(triple: DiscriminantTriple, sol: ConicSolution | None = None) -> QuarticFieldSpec:
    """k2(√(d1·α)), the quartic subfield of the second cyclic quartic extension L~."""
    sol = sol or solve_conic(triple)
    t = triple.d1.value
    return _quartic_from(sol.alpha * t, sol.alpha, t, triple.case, "twin_L")


def k1_quartic(triple: DiscriminantTriple, sol: ConicSolution | None = None) -> QuarticFieldSpec:
    """K1 = k1(√β), generated by √(4β) = √(2z + 2c'√k1)."""
    sol = sol or solve_conic(triple)
    b4 = sol.beta4
    return _quartic_from(b4, b4, 1, triple.case, "K1")


def k1_twin_quartic(triple: DiscriminantTriple, sol: ConicSolution | None = None) -> QuarticFieldSpec:
    """The K1-type field of L~: twisting 4β by the same multiplier d2 used for K2~."""
    sol = sol or solve_conic(triple)
    t = triple.d2.value
    b4 = sol.beta4 * t
    return _quartic_from(b4, sol.beta4, t, triple.case, "K1~")


@dataclass(frozen=True)
class BiquadraticField:
    """Q(√a, √b) recorded by its three quadratic subfield discriminants."""
    discs: tuple[int, int, int]

    @classmethod
    def from_radicands(cls, a: int, b: int) -> "BiquadraticField":
        da, db = field_disc(a), field_disc(b)
        dc = field_disc(da * db)
        return cls(tuple(sorted((da, db, dc))))

    def polynomial(self) -> tuple[int, int, int, int, int]:
        """Minimal polynomial of √a + √b for two of the squarefree radicands."""
        a, b = (squarefree_part(x) for x in self.discs[:2])
        return (1, 0, -2 * (a + b), 0, (a - b) ** 2)

    @property
    def is_real(self) -> bool:
        return all(x > 0 for x in self.discs)

    def __str__(self) -> str:
        return "Q(" + ", ".join(f"√{squarefree_part(x)}" for x in self.discs[:2]) + ")"


def squarefree_part(n: int) -> int:
    s = 1 if n > 0 else -1
    n = abs(n)
    out = 1
    p = 2
    while p * p <= n:
        while n % (p * p) == 0:
            n //= p * p
        if n % p == 0:
            out *= p
            n //= p
        p += 1
    return s * out * n


def field_disc(n: int) -> int:
    m = squarefree_part(n)
    return m if m % 4 == 1 else 4 * m


@dataclass(frozen=True)
class DihedralData:
    """Subfield lattice of L = k(√(d1d2), √α) used by the class number formulas."""
    d: int
    case: Case
    k1_disc: int
    k2_disc: int
    k3_disc: int  # = d, the base field k
    K: BiquadraticField
    K1: QuarticFieldSpec
    K2: QuarticFieldSpec
    F: BiquadraticField  # the base of M = F(√α) in the ambiguous class count
    M_fields: tuple[BiquadraticField, BiquadraticField]


def dihedral_closure_data(triple: DiscriminantTriple, sol: ConicSolution | None = None) -> DihedralData:
    sol = sol or solve_conic(triple)
    d1, d2, d3 = triple.values
    if triple.case is Case.A:
        k1, k2 = field_disc(d1), field_disc(d2 * d3)
        F = BiquadraticField.from_radicands(d2, d3)
        others = (d2, d3)
    else:
        k1, k2 = field_disc(d3), field_disc(d1 * d2)
        F = BiquadraticField.from_radicands(d1, d2)
        others = (d1, d2)
    K = BiquadraticField.from_radicands(k1, k2)
    K2, _ = build_quartic(triple, sol)
    M = tuple(BiquadraticField.from_radicands(di, triple.d // di) for di in others)
    return DihedralData(triple.d, triple.case, k1, k2, triple.d, K, k1_quartic(triple, sol), K2, F, M)
