"""From a discriminant d < 0 to the predicted rank of the 2-class group of the Hilbert 2-class field."""
from __future__ import annotations

import logging
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field, replace
from enum import Enum
from typing import Iterator

from .discriminants import (
    Case,
    DiscriminantTriple,
    NotFundamental,
    OutOfScope,
    SymbolUndefined,
    assign_roles,
    factor_into_prime_discriminants,
    is_fundamental_discriminant,
    quartic_residue_symbol,
)
from .formulas import (
    AmbiguousReport,
    DerivedRank,
    FormulaNotApplicable,
    KurodaCheck,
    ambiguous_report,
    biquadratic_class_number,
    blackburn_rank_cap,
    h2_L_kuroda,
    kuroda_unit_indices,
    rank_from_products,
    two_part,
)
from .forms import class_group, redei_data, wide_class_number
from .groups import AbelianGroupStructure, cl2_sylow
from .multiquad import MultiQuadField
from .quartic import (
    ConicSolution,
    build_quartic,
    k1_quartic,
    k1_twin_quartic,
    solve_conic,
    squarefree_part,
)
from . import oracle

log = logging.getLogger(__name__)


class OracleFormulaMismatch(AssertionError):
    """The oracle and the formula path disagree: the core validity alarm."""


class OracleMode(str, Enum):
    AUTO = "auto"
    ON = "on"
    OFF = "off"


class Rank(str, Enum):
    CYCLIC = "cyclic"
    EXACTLY_2 = "exactly_2"
    EXACTLY_3 = "exactly_3"
    AT_LEAST_3 = "at_least_3"

    @property
    def label(self) -> str:
        return {"cyclic": "1", "exactly_2": "2", "exactly_3": "3", "at_least_3": ">=3"}[self.value]


@dataclass(frozen=True)
class Options:
    oracle: OracleMode = OracleMode.AUTO
    oracle_bound: int = 10 ** 4
    certify: bool = True
    cache_path: str | None = None


@dataclass(frozen=True)
class ClassificationReport:
    d: int
    factors: tuple[int, ...]
    case: str  # "A", "B" or "OutOfScope"
    cl2_k: AbelianGroupStructure
    m: int | None = None
    reason: str | None = None
    four_rank: int | None = None
    roles: tuple[int, int, int] | None = None
    conic: tuple[int, int, int] | None = None  # (x, y, z)
    alpha: str | None = None
    f: tuple[int, ...] | None = None
    h2_K: int | None = None
    cl2_K: AbelianGroupStructure | None = None
    cl2_K_twin: AbelianGroupStructure | None = None
    h2_K1: int | None = None
    h2_K2: int | None = None
    h2_L: int | None = None
    h2_biquadratic: int | None = None
    q1: int | None = None
    q2: int | None = None
    am2_M: int | None = None
    am2_K2: int | None = None
    am2_K2_twin: int | None = None
    scholz: int | None = None
    rank: Rank | None = None
    rank_from_products: str | None = None
    provenance: dict = field(default_factory=dict)
    errors: tuple[str, ...] = ()

    @property
    def in_scope(self) -> bool:
        return self.case in ("A", "B")

    @property
    def is_hit(self) -> bool:
        """Rank of Cl₂(k¹) at least 2, or 4-rank 2 outside the A/B pattern."""
        if self.in_scope:
            return self.rank is not None and self.rank is not Rank.CYCLIC
        return self.four_rank == 2 and self.cl2_k.rank == 2


def _options_cache(opts: Options) -> oracle.OracleOptions:
    cache = _CACHES.get(opts.cache_path)
    if cache is None:
        cache = _CACHES[opts.cache_path] = oracle.ClassGroupCache(opts.cache_path)
    return oracle.OracleOptions(opts.oracle_bound, opts.certify, cache)


_CACHES: dict = {}


def _out_of_scope(d: int, reason: str, cl2k: AbelianGroupStructure, detail: str = "") -> ClassificationReport:
    factors = tuple(q.value for q in factor_into_prime_discriminants(d))
    rd = redei_data(d)
    return ClassificationReport(d, factors, "OutOfScope", cl2k, reason=f"{reason}: {detail}" if detail else reason,
                                four_rank=rd.four_rank, provenance={"cl2_k": "forms", "four_rank": "forms"})


def field_F(triple: DiscriminantTriple) -> tuple[MultiQuadField, int]:
    """The biquadratic field F = k2(√d2) and the rational prime below the ramification of M/F."""
    d1, d2, d3 = triple.values
    if triple.case is Case.A:
        return MultiQuadField((squarefree_part(d2), squarefree_part(d3))), triple.d1.prime
    return MultiQuadField((squarefree_part(d1), squarefree_part(d2))), triple.d3.prime


def formula_h2K_is_2(triple: DiscriminantTriple, sol: ConicSolution) -> tuple[bool, AmbiguousReport]:
    """h₂(K2) = 2 iff M = K2·K2~ has odd class number iff #Am₂(M/F) = 1 (F has odd class number)."""
    F, pc = field_F(triple)
    hF = biquadratic_class_number(*F.radicands)
    a = sol.alpha
    rep = ambiguous_report(F, F.quadratic(a.A, a.B, a.D), (pc,), two_part(hF.h))
    return rep.am2_order == 1, rep


def k2_ambiguous(triple: DiscriminantTriple, sol: ConicSolution, twist: int) -> AmbiguousReport:
    """#Am₂ of k2(√(twist·α))/k2."""
    k2 = sol.k2_disc
    B = MultiQuadField((squarefree_part(k2),))
    _, pc = field_F(triple)
    a = sol.alpha
    theta = B.scale(B.quadratic(a.A, a.B, a.D), twist)
    primes = tuple(sorted({pc} | {q.prime for q in factor_into_prime_discriminants(twist)} if twist != 1 else {pc}))
    primes = tuple(p for p in primes if B.splits_completely(p))
    return ambiguous_report(B, theta, primes, two_part(wide_class_number(k2)))


def scholz_product(triple: DiscriminantTriple) -> int | None:
    """(d1/p2)₄·(d2/p1)₄ for two odd positive prime discriminants; None when undefined."""
    try:
        return (quartic_residue_symbol(triple.d1.value, triple.d2.prime)
                * quartic_residue_symbol(triple.d2.value, triple.d1.prime))
    except SymbolUndefined:
        return None


def theorem_rank(case: Case, d3: int, h2K_is_2: bool) -> Rank:
    if case is Case.A:
        return Rank.CYCLIC if h2K_is_2 else Rank.AT_LEAST_3
    if d3 == -4:
        return Rank.AT_LEAST_3
    return Rank.EXACTLY_2 if h2K_is_2 else Rank.AT_LEAST_3


def _apply_cap(rank: Rank, cl2k: AbelianGroupStructure) -> Rank:
    if rank is Rank.AT_LEAST_3 and blackburn_rank_cap(cl2k) == 3:
        return Rank.EXACTLY_3
    return rank


def classify(d: int, options: Options = Options()) -> ClassificationReport:
    if d >= 0 or not is_fundamental_discriminant(d):
        raise NotFundamental(d)
    cl2k = cl2_sylow(class_group(d))
    roles = assign_roles(d)
    if isinstance(roles, OutOfScope):
        return _out_of_scope(d, roles.reason, cl2k, roles.detail)
    if cl2k.rank != 2 or cl2k.elementary_divisors[0] != 2:
        return _out_of_scope(d, "cl2_type", cl2k, f"Cl2(k) = {cl2k}")
    triple = roles
    m = cl2k.elementary_divisors[1].bit_length() - 1
    sol = solve_conic(triple)
    K2, K2t = build_quartic(triple, sol)
    K1, K1t = k1_quartic(triple, sol), k1_twin_quartic(triple, sol)
    d1, d2, d3 = triple.values
    prov = {"factors": "forms", "cl2_k": "forms", "case": "formula", "f": "formula", "m": "forms"}

    is2, amM = formula_h2K_is_2(triple, sol)
    am_K2 = k2_ambiguous(triple, sol, 1).am2_order
    am_K2t = k2_ambiguous(triple, sol, d2).am2_order
    k1d, k2d = (d1, d2 * d3) if triple.case is Case.A else (d3, d1 * d2)
    biq = biquadratic_class_number(k1d, k2d)
    h2_biq = two_part(biq.h)
    rank_formula = _apply_cap(theorem_rank(triple.case, d3, is2), cl2k)
    prov.update(am2_M="formula", am2_K2="formula", am2_K2_twin="formula", h2_biquadratic="formula")

    report = ClassificationReport(
        d=d, factors=tuple(q.value for q in factor_into_prime_discriminants(d)), case=triple.case.value,
        cl2_k=cl2k, m=m, four_rank=redei_data(d).four_rank, roles=(d1, d2, d3),
        conic=(sol.x, sol.y, sol.z), alpha=str(sol.alpha), f=K2.coeffs, h2_biquadratic=h2_biq,
        am2_M=amM.am2_order, am2_K2=am_K2, am2_K2_twin=am_K2t,
        scholz=scholz_product(triple) if triple.case is Case.A else None,
    )

    use_oracle = options.oracle is not OracleMode.OFF
    errors: list[str] = []
    oracle_data = None
    if use_oracle:
        try:
            oo = _options_cache(options)
            oracle_data = (oracle.cl2(K2.coeffs, oo), oracle.cl2(K2t.coeffs, oo), oracle.cl2(K1.coeffs, oo))
        except (oracle.OracleBoundExceeded, oracle.OracleStalled) as exc:
            if options.oracle is OracleMode.ON:
                raise
            errors.append(f"oracle: {exc}")
    if oracle_data is None:
        # formula path only
        prov.update(h2_K="formula", rank="formula")
        h2K = 2 if is2 else None
        if triple.case is Case.A and is2:
            report = replace(report, h2_K1=1, h2_K2=2)
            prov.update(h2_K1="formula", h2_K2="formula")
        return replace(report, h2_K=h2K, rank=rank_formula, provenance=prov, errors=tuple(errors))

    cK2, cK2t, cK1 = oracle_data
    h2K2, h2K1 = cK2.order, cK1.order
    if (h2K2 == 2) != is2:
        raise OracleFormulaMismatch(f"d = {d}: oracle Cl₂(K) = {cK2}, formula #Am₂(M/F) = {amM.am2_order}")
    rank = _apply_cap(theorem_rank(triple.case, d3, h2K2 == 2), cl2k)
    bounds = rank_from_products(h2K1 * h2K2)
    prov.update(h2_K="oracle", cl2_K="oracle", cl2_K_twin="oracle", h2_K1="oracle", h2_K2="oracle",
                rank="oracle+formula", rank_from_products="oracle")
    h2L = q1 = q2 = None
    if d3 != -4:
        h2L = h2_L_kuroda(2 ** (m + 1), h2K1, h2K2, d3)
        kc: KurodaCheck = kuroda_unit_indices(triple.case is Case.A, h2L, h2_biq, h2K1, h2K2,
                                              two_part(wide_class_number(k1d)), two_part(wide_class_number(k2d)))
        if kc.q1.denominator == 1 and kc.q2.denominator == 1:
            q1, q2 = int(kc.q1), int(kc.q2)
        if not kc.consistent:
            errors.append(f"kuroda: q1 = {kc.q1}, q2 = {kc.q2}")
        table = bounds.h2_L(m)
        if table is not None and table != h2L:
            errors.append(f"h2(L): Kuroda {h2L} vs table {table}")
        prov.update(h2_L="formula+oracle", q1="table-consistency", q2="table-consistency")
    return replace(report, h2_K=h2K2, cl2_K=cK2, cl2_K_twin=cK2t, h2_K1=h2K1, h2_K2=h2K2, h2_L=h2L,
                   q1=q1, q2=q2, rank=rank, rank_from_products=bounds.d_G_prime.value,
                   provenance=prov, errors=tuple(errors))


def scan_candidates(d_min: int, d_max: int) -> Iterator[int]:
    """Fundamental d in [d_min, d_max] with three prime discriminants, in decreasing order."""
    for d in range(min(d_max, -1), d_min - 1, -1):
        if not is_fundamental_discriminant(d):
            continue
        if len(factor_into_prime_discriminants(d)) != 3:
            continue
        yield d


def _scan_one(args) -> ClassificationReport | None:
    d, options = args
    if options.oracle is OracleMode.OFF:
        oracle.disable(True)
    cl2k = cl2_sylow(class_group(d))
    if cl2k.rank != 2:
        log.debug("skip %d: Cl2 = %s", d, cl2k)
        return None
    return classify(d, options)


def scan(d_min: int, d_max: int, options: Options = Options(), jobs: int = 1) -> Iterator[ClassificationReport]:
    if not d_min < d_max < 0 and not (d_min < 0 and d_max < 0 and d_min <= d_max):
        raise ValueError("need d_min <= d_max < 0")
    ds = list(scan_candidates(d_min, d_max))
    work = [(d, options) for d in ds]
    if jobs > 1:
        with ProcessPoolExecutor(jobs) as ex:
            for rep in ex.map(_scan_one, work, chunksize=8):
                if rep is not None:
                    yield rep
    else:
        for w in work:
            rep = _scan_one(w)
            if rep is not None:
                yield rep
