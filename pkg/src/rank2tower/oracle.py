"""Class groups of absolute number fields of degree <= 4, backed by PARI.

Class groups are computed with bnfinit and, by default, certified with bnfcertify so that the
result does not rest on GRH. Integral bases and prime decompositions come from PARI as well; the
Dedekind criterion is implemented here as an independent check on p-maximality.
"""
from __future__ import annotations

import math
import threading
from dataclasses import dataclass
from fractions import Fraction
from pathlib import Path

from sympy import Poly, factorint, symbols
from sympy.polys.domains import GF

from .groups import AbelianGroupStructure, cl2_sylow

_X = symbols("x")


class Reducible(ValueError):
    pass


class OracleBoundExceeded(RuntimeError):
    pass


class OracleStalled(RuntimeError):
    pass


class OracleDisabled(RuntimeError):
    pass


_pari = None
_pari_lock = threading.RLock()

# Instrumentation: every oracle entry point bumps this counter; no-oracle runs assert it stays 0.
CALLS = {"count": 0}
_DISABLED = {"flag": False}


def disable(flag: bool = True) -> None:
    _DISABLED["flag"] = flag


def _touch() -> None:
    if _DISABLED["flag"]:
        raise OracleDisabled("the number field oracle is switched off")
    CALLS["count"] += 1


def pari():
    global _pari
    with _pari_lock:
        if _pari is None:
            import cypari2
            _pari = cypari2.Pari()
            _pari.allocatemem(2 ** 28, 2 ** 32, silent=True)
            _pari.default("parisizemax", 2 ** 32)
        return _pari


def _member(name: str):
    return pari()(f"(z) -> z.{name}")


def _pol(coeffs: tuple[int, ...]):
    return pari().Pol(list(coeffs))


@dataclass(frozen=True)
class NumberFieldOrder:
    coeffs: tuple[int, ...]  # monic, highest degree first
    basis: tuple[tuple[Fraction, ...], ...]  # rows: coordinates in 1, θ, θ², ... (low degree first)
    disc: int
    signature: tuple[int, int]
    poly_disc: int

    @property
    def degree(self) -> int:
        return len(self.coeffs) - 1

    @property
    def index(self) -> int:
        return math.isqrt(self.poly_disc // self.disc)


@dataclass(frozen=True)
class PrimeIdealData:
    p: int
    generator: tuple[int, ...]  # coordinates on the integral basis; the ideal is (p, generator)
    f: int
    e: int


def _check_poly(coeffs: tuple[int, ...]) -> tuple[int, ...]:
    coeffs = tuple(int(c) for c in coeffs)
    if coeffs[0] != 1:
        raise ValueError("polynomial must be monic")
    if not 1 <= len(coeffs) - 1 <= 4:
        raise ValueError("degree must be between 1 and 4")
    if len(coeffs) > 2 and not Poly(list(coeffs), _X).is_irreducible:
        raise Reducible(str(coeffs))
    return coeffs


def integral_basis(coeffs: tuple[int, ...]) -> NumberFieldOrder:
    coeffs = _check_poly(coeffs)
    _touch()
    P = pari()
    with _pari_lock:
        f = _pol(coeffs)
        n = len(coeffs) - 1
        rows = []
        for b in P.nfbasis(f):
            c = [Fraction(str(P.polcoef(b, i))) for i in range(n)]
            rows.append(tuple(c))
        disc = int(P.nfdisc(f))
        r1 = int(P.polsturm(f))
        sig = (r1, (n - r1) // 2)
        pdisc = int(P.poldisc(f))
    order = NumberFieldOrder(coeffs, tuple(rows), disc, sig, pdisc)
    if order.index ** 2 * disc != pdisc:
        raise ArithmeticError("index and discriminants do not fit")
    return order


def dedekind_p_maximal(coeffs: tuple[int, ...], p: int) -> bool:
    """Dedekind's criterion: is Z[θ] maximal at p?"""
    f = Poly(list(coeffs), _X)
    fp = Poly(list(coeffs), _X, domain=GF(p))
    _, facs = fp.factor_list()
    g = Poly(1, _X)
    h = Poly(1, _X)
    for fac, e in facs:
        lift = Poly([int(c) % p for c in fac.all_coeffs()], _X)
        g *= lift
        h *= lift ** (e - 1)
    # F = (g·h - f)/p, reduced mod p
    F = (g * h - f)
    F = Poly([c // p for c in F.all_coeffs()], _X)
    Fp = Poly([int(c) % p for c in F.all_coeffs()], _X, domain=GF(p))
    gp = Poly([int(c) % p for c in g.all_coeffs()], _X, domain=GF(p))
    hp = Poly([int(c) % p for c in h.all_coeffs()], _X, domain=GF(p))
    common = Fp.gcd(gp).gcd(hp)
    return common.degree() <= 0


def factor_prime(order: NumberFieldOrder, p: int) -> list[PrimeIdealData]:
    _touch()
    P = pari()
    with _pari_lock:
        nf = P.nfinit(_pol(order.coeffs))
        out = []
        for pr in P.idealprimedec(nf, p):
            gen = tuple(int(x) for x in _member("gen")(pr)[1])
            out.append(PrimeIdealData(p, gen, int(_member("f")(pr)), int(_member("e")(pr))))
    if sum(q.e * q.f for q in out) != order.degree:
        raise ArithmeticError("Σ e·f differs from the degree")
    return sorted(out, key=lambda q: (q.f, q.e, q.generator))


def minkowski_bound(order: NumberFieldOrder) -> int:
    """⌈(n!/n^n)(4/π)^r2 √|disc|⌉, with √ rounded up and 4/π bounded above by 14/11."""
    n = order.degree
    r2 = order.signature[1]
    root = math.isqrt(abs(order.disc))
    if root * root < abs(order.disc):
        root += 1
    b = Fraction(math.factorial(n), n ** n) * Fraction(14, 11) ** r2 * root
    return math.ceil(b)


class ClassGroupCache:
    """Line format: `<poly coeffs csv> <disc> <divisors csv>`; an empty divisor list is written as `-`."""

    def __init__(self, path: str | Path | None = None):
        self.path = Path(path) if path else None
        self._lock = threading.Lock()
        self._data: dict[tuple[int, ...], tuple[int, AbelianGroupStructure]] = {}
        if self.path and self.path.exists():
            for line in self.path.read_text().splitlines():
                if line.strip():
                    k, d, g = self.parse(line)
                    self._data[k] = (d, g)

    @staticmethod
    def format(coeffs, disc: int, g: AbelianGroupStructure) -> str:
        divs = ",".join(map(str, g.elementary_divisors)) or "-"
        return f"{','.join(map(str, coeffs))} {disc} {divs}"

    @staticmethod
    def parse(line: str):
        c, d, g = line.split()
        divs = () if g == "-" else tuple(int(x) for x in g.split(","))
        return tuple(int(x) for x in c.split(",")), int(d), AbelianGroupStructure(divs)

    def get(self, coeffs):
        with self._lock:
            return self._data.get(tuple(coeffs))

    def put(self, coeffs, disc: int, g: AbelianGroupStructure) -> None:
        with self._lock:
            key = tuple(coeffs)
            if key in self._data:
                return
            self._data[key] = (disc, g)
            if self.path:
                with self.path.open("a") as fh:
                    fh.write(self.format(key, disc, g) + "\n")


_default_cache = ClassGroupCache()


@dataclass(frozen=True)
class OracleOptions:
    bound: int = 10 ** 4  # cap on the Minkowski bound
    certify: bool = True
    cache: ClassGroupCache | None = None


def class_group(order_or_coeffs, options: OracleOptions = OracleOptions()) -> AbelianGroupStructure:
    order = order_or_coeffs if isinstance(order_or_coeffs, NumberFieldOrder) else None
    coeffs = order.coeffs if order else _check_poly(tuple(order_or_coeffs))
    cache = options.cache or _default_cache
    hit = cache.get(coeffs)
    if hit is not None:
        _touch()
        return hit[1]
    order = order or integral_basis(coeffs)
    mb = minkowski_bound(order)
    if mb > options.bound:
        raise OracleBoundExceeded(f"Minkowski bound {mb} exceeds {options.bound}")
    _touch()
    P = pari()
    with _pari_lock:
        bnf = P.bnfinit(_pol(coeffs), 1)
        cyc = [int(c) for c in _member("cyc")(bnf)]
        if options.certify and order.degree > 1 and int(P.bnfcertify(bnf)) != 1:
            raise OracleStalled(f"class group of {coeffs} could not be certified: {cyc}")
    g = AbelianGroupStructure(tuple(sorted(c for c in cyc if c > 1)))
    cache.put(coeffs, order.disc, g)
    return g


def cl2(order_or_coeffs, options: OracleOptions = OracleOptions()) -> AbelianGroupStructure:
    return cl2_sylow(class_group(order_or_coeffs, options))


def quadratic_poly(d: int) -> tuple[int, int, int]:
    """X² - X + (1-d)/4 or X² - d/4, generating the maximal order of Q(√d)."""
    return (1, -1, (1 - d) // 4) if d % 4 == 1 else (1, 0, -d // 4)


def prime_factors(n: int) -> list[int]:
    return sorted(factorint(abs(n)))
