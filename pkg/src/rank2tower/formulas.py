"""Class number formulas for V4 fields, unit indices, ambiguous class counts and 2-group structure rules."""
from __future__ import annotations

from dataclasses import dataclass
from enum import Enum
from fractions import Fraction
from itertools import combinations

from .forms import wide_class_number
from .groups import AbelianGroupStructure
from .multiquad import (
    Elem,
    MultiQuadField,
    hilbert_symbol_qp,
    hilbert_symbol_real,
    local_ramified,
)
from .quartic import field_disc, squarefree_part
from .units import fundamental_unit


class FormulaInconsistent(ArithmeticError):
    pass


class FormulaNotApplicable(ValueError):
    pass


class BaseNotSupported(ValueError):
    pass


class GrasHypothesisFailed(ValueError):
    pass


class BadInput(ValueError):
    pass


class BoundInapplicable(ValueError):
    pass


def _is_pow2(n: int) -> bool:
    return n > 0 and n & (n - 1) == 0


def _log2(n: int) -> int:
    return n.bit_length() - 1


def two_part(n: int) -> int:
    return n & -n


# class number of a V4 field ------------------------------------------------------------------

def v4_class_number(k1_h: int, k2_h: int, k3_h: int, base_h: int, d_ramified_infinite: int,
                    kappa_rank: int, q: int, v: int = 0) -> int:
    """h(K) = 2^(d-κ-2-v)·q·h1·h2·h3/h(k)² for a V4 extension K/k."""
    if min(k1_h, k2_h, k3_h, base_h, q) <= 0:
        raise ValueError("class numbers and unit index must be positive")
    if v:
        raise FormulaInconsistent("v = 1 does not occur for the fields handled here")
    h = Fraction(2) ** (d_ramified_infinite - kappa_rank - 2 - v) * q * k1_h * k2_h * k3_h
    h /= base_h ** 2
    if h.denominator != 1:
        raise FormulaInconsistent(f"non-integral class number {h}")
    return int(h)


# unit groups of multiquadratic fields of degree <= 4 -----------------------------------------

@dataclass(frozen=True)
class UnitIndexReport:
    q: int
    witnesses: tuple[str, ...]  # products of basis units found to be squares

    def __post_init__(self):
        if self.q not in (1, 2, 4, 8) or len(self.witnesses) != self.q - 1:
            raise ValueError("inconsistent unit index report")


@dataclass(frozen=True)
class UnitGroup:
    """Generators of the unit group of a multiquadratic field, with the index over the subfield units."""
    field: MultiQuadField
    sub_basis: tuple[tuple[str, Elem], ...]  # named basis of (subfield units)/squares
    extra: tuple[Elem, ...]  # square roots adjoined to reach the full unit group
    report: UnitIndexReport

    @property
    def generators(self) -> tuple[Elem, ...]:
        return tuple(e for _, e in self.sub_basis) + self.extra


def _quadratic_subfield_discs(F: MultiQuadField) -> list[int]:
    out = []
    for mask in range(1, F.degree):
        m = 1
        for j in range(F.n):
            if mask >> j & 1:
                m *= F.radicands[j]
        out.append(field_disc(squarefree_part(m)))
    return out


def unit_group(F: MultiQuadField) -> UnitGroup:
    discs = _quadratic_subfield_discs(F)
    if -4 in discs:
        tors = ("i", F.sqrt_of(-1))
    elif -3 in discs:
        tors = ("ζ6", F.quadratic(1, 1, -3))
    else:
        tors = ("-1", F.rational(-1))
    basis = [tors]
    for D in sorted(x for x in discs if x > 0):
        eps = fundamental_unit(D).unit
        basis.append((f"ε{D}", F.quadratic(eps.A, eps.B, D)))
    witnesses, extra = [], []
    for r in range(1, len(basis) + 1):
        for combo in combinations(basis, r):
            u = F.prod(e for _, e in combo)
            s = F.sqrt(u)
            if s is not None:
                witnesses.append("·".join(n for n, _ in combo))
                extra.append(s)
    q = len(witnesses) + 1
    return UnitGroup(F, tuple(basis), tuple(extra), UnitIndexReport(q, tuple(witnesses)))


def unit_index_q(da: int, db: int) -> UnitIndexReport:
    """(E_K : E1E2E3) for K = Q(√da, √db)."""
    return unit_group(MultiQuadField((squarefree_part(da), squarefree_part(db)))).report


@dataclass(frozen=True)
class V4ClassNumber:
    h: int
    q: int
    subfield_discs: tuple[int, int, int]
    subfield_h: tuple[int, int, int]


def biquadratic_class_number(da: int, db: int) -> V4ClassNumber:
    """h(Q(√da, √db)) from the three quadratic class numbers and the unit index."""
    F = MultiQuadField((squarefree_part(da), squarefree_part(db)))
    discs = tuple(sorted(_quadratic_subfield_discs(F)))
    hs = tuple(wide_class_number(D) for D in discs)
    q = unit_group(F).report.q
    complex_ = 0 if F.is_totally_real() else 1
    h = v4_class_number(*hs, base_h=1, d_ramified_infinite=complex_, kappa_rank=0, q=q)
    return V4ClassNumber(h, q, discs, hs)


# ambiguous classes ----------------------------------------------------------------------------

@dataclass(frozen=True)
class AmbiguousReport:
    t: int
    e_h_index: int
    am2_order: int
    rank_hint: int | None
    ramified: tuple[str, ...]

    def __post_init__(self):
        if not (_is_pow2(self.e_h_index) and _is_pow2(self.am2_order)):
            raise ValueError("ambiguous data must be powers of 2")


def _f2_rank(rows: list[list[int]]) -> int:
    vecs = [int("".join(str(x) for x in r), 2) if r else 0 for r in rows]
    rank = 0
    while vecs:
        piv = max(vecs)
        vecs.remove(piv)
        if piv == 0:
            break
        rank += 1
        top = piv.bit_length() - 1
        vecs = [v ^ piv if v >> top & 1 else v for v in vecs]
    return rank


def ambiguous_report(F: MultiQuadField, theta: Elem, primes: tuple[int, ...], h2_base: int,
                     units: tuple[Elem, ...] | None = None) -> AmbiguousReport:
    """#Am₂ of F(√θ)/F from the ambiguous class number formula; h2_base is h₂(F).

    `primes` lists the rational primes below the finite places that may ramify; each must split
    completely in F so that its places are p-adic embeddings. Units default to generators of E_F.
    """
    if F.n > 2:
        raise BaseNotSupported(f"degree {F.degree} base")
    gens = units if units is not None else unit_group(F).generators
    places: list[tuple[str, object]] = []
    for s in F.real_embeddings():
        if F.sign(theta, s) < 0:
            places.append((f"∞{s}", s))
    for p in primes:
        if not F.splits_completely(p):
            raise BaseNotSupported(f"{p} does not split completely in the base")
        for i, emb in enumerate(F.padic_embeddings(p)):
            v, u = emb.split_value(theta)
            if local_ramified(v, u, p):
                places.append((f"{p}:{i}", emb))
    t = len(places)
    rows = []
    for g in gens:
        row = []
        for _, pl in places:
            if isinstance(pl, tuple):
                sym = hilbert_symbol_real(F.sign(g, pl), -1)
            else:
                sym = hilbert_symbol_qp(pl.split_value(g), pl.split_value(theta), pl.p)
            row.append(0 if sym == 1 else 1)
        rows.append(row)
    eh = 2 ** _f2_rank(rows)
    if t == 0:
        raise FormulaNotApplicable("unramified extension: the formula needs a ramified place")
    am = Fraction(h2_base * 2 ** (t - 1), eh)
    if am.denominator != 1:
        raise FormulaInconsistent(f"#Am₂ = {am}")
    am2 = int(am)
    hint = _log2(am2) if h2_base == 1 else None
    return AmbiguousReport(t, eh, am2, hint, tuple(n for n, _ in places))


# group-structure rules -------------------------------------------------------------------------

@dataclass(frozen=True)
class StructureConstraint:
    """Possible 2-class groups of K: (2, 2) and/or cyclic groups of order at least cyclic_min."""
    allows_2_2: bool
    cyclic_min: int

    def admits(self, g: AbelianGroupStructure) -> bool:
        if g.is_cyclic() and g.order >= self.cyclic_min:
            return True
        return self.allows_2_2 and g.elementary_divisors == (2, 2)


def gras_structure(h2_base: int, am2: int, capitulation_size: int) -> StructureConstraint:
    if h2_base != 2 or am2 != 2:
        raise GrasHypothesisFailed(f"h₂(base) = {h2_base}, #Am₂ = {am2}")
    if capitulation_size == 2:
        return StructureConstraint(False, 2)
    if capitulation_size == 1:
        return StructureConstraint(True, 8)
    raise GrasHypothesisFailed(f"capitulation kernel of order {capitulation_size}")


class DerivedRank(str, Enum):
    ONE = "1"
    TWO = "2"
    AT_LEAST_3 = ">=3"


@dataclass(frozen=True)
class TowerBounds:
    d_G_prime: DerivedRank
    rank_exact: int | None
    exponent_lower: int | None = None
    product: int = 0

    def h2_L(self, m: int) -> int | None:
        """h₂(L) = 2^m·product/2 when the table determines it."""
        if self.d_G_prime is DerivedRank.AT_LEAST_3:
            return None
        return 2 ** m * self.product // 2


def rank_from_products(h2K1_times_h2K2: int) -> TowerBounds:
    n = h2K1_times_h2K2
    if not _is_pow2(n) or n < 2:
        raise BadInput(f"{n} is not a power of 2 at least 2")
    if n == 2:
        return TowerBounds(DerivedRank.ONE, 1, product=n)
    if n == 4:
        return TowerBounds(DerivedRank.TWO, 2, product=n)
    return TowerBounds(DerivedRank.AT_LEAST_3, None, product=n)


def exponent_lower_bound(h2_M: int, m: int) -> int:
    if not _is_pow2(h2_M):
        raise BoundInapplicable(f"{h2_M} is not a power of 2")
    kappa = _log2(h2_M) - m
    if kappa < 2:
        raise BoundInapplicable(f"κ = {kappa} < 2")
    return kappa


def blackburn_rank_cap(cl2_k: AbelianGroupStructure) -> int | None:
    return 3 if cl2_k.elementary_divisors == (2, 4) else None


def h2_L_kuroda(h2_k: int, h2_K1: int, h2_K2: int, d3: int) -> int:
    if d3 == -4:
        raise FormulaNotApplicable("d3 = -4")
    n = Fraction(h2_k * h2_K1 * h2_K2, 4)
    if n.denominator != 1:
        raise FormulaInconsistent(f"h₂(L) = {n}")
    return int(n)


@dataclass(frozen=True)
class KurodaCheck:
    h2_L: int
    q1: Fraction
    q2: Fraction

    @property
    def consistent(self) -> bool:
        return self.q1 in (1, 2) and self.q2 in (1, 2) and self.q1 * self.q2 == 2


def kuroda_unit_indices(case_a: bool, h2_L: int, h2_K: int, h2_K1: int, h2_K2: int,
                        h2_k1: int, h2_k2: int) -> KurodaCheck:
    """Solve both V4 formulas for L over k1 and over k2 for the unit indices q1, q2.

    Case A: h₂(L) = q1·h₂(K1)²h₂(K)/(2h₂(k1)²) = q2·h₂(K2)²h₂(K)/(4h₂(k2)²); case B swaps 2 and 4.
    """
    c1, c2 = (2, 4) if case_a else (4, 2)
    q1 = Fraction(h2_L * c1 * h2_k1 ** 2, h2_K1 ** 2 * h2_K)
    q2 = Fraction(h2_L * c2 * h2_k2 ** 2, h2_K2 ** 2 * h2_K)
    return KurodaCheck(h2_L, q1, q2)
