"""Finite abelian groups as elementary-divisor chains, plus the integer linear algebra behind them."""
from __future__ import annotations

from dataclasses import dataclass
from math import gcd, prod
from typing import Iterable, Sequence

from sympy import factorint


@dataclass(frozen=True)
class AbelianGroupStructure:
    """Invariant factors d1 | d2 | ... | dr, each >= 2; () is the trivial group."""
    elementary_divisors: tuple[int, ...] = ()

    def __post_init__(self):
        ds = tuple(int(x) for x in self.elementary_divisors)
        object.__setattr__(self, "elementary_divisors", ds)
        if any(x < 2 for x in ds):
            raise ValueError(f"bad invariant factor in {ds}")
        if any(b % a for a, b in zip(ds, ds[1:])):
            raise ValueError(f"{ds} is not a divisibility chain")

    @classmethod
    def from_cyclic_orders(cls, orders: Iterable[int]) -> "AbelianGroupStructure":
        """Canonical form of a direct sum of cyclic groups of the given orders."""
        by_prime: dict[int, list[int]] = {}
        for n in orders:
            for p, e in factorint(int(n)).items():
                by_prime.setdefault(p, []).append(p ** e)
        width = max((len(v) for v in by_prime.values()), default=0)
        cols = [1] * width
        for powers in by_prime.values():
            powers.sort(reverse=True)
            for i, q in enumerate(powers):
                cols[width - 1 - i] *= q
        return cls(tuple(c for c in cols if c > 1))

    @property
    def order(self) -> int:
        return prod(self.elementary_divisors)

    @property
    def rank(self) -> int:
        return len(self.elementary_divisors)

    def p_part(self, p: int) -> "AbelianGroupStructure":
        out = []
        for n in self.elementary_divisors:
            q = 1
            while n % p == 0:
                n //= p
                q *= p
            if q > 1:
                out.append(q)
        return AbelianGroupStructure(tuple(out))

    def p_rank(self, p: int, k: int = 1) -> int:
        """Number of invariant factors divisible by p^k (the p^k-rank)."""
        return sum(1 for n in self.elementary_divisors if n % p ** k == 0)

    def is_cyclic(self) -> bool:
        return self.rank <= 1

    def as_list(self) -> list[int]:
        return list(self.elementary_divisors)

    def __str__(self) -> str:
        if not self.elementary_divisors:
            return "1"
        return "(" + ", ".join(map(str, self.elementary_divisors)) + ")"


def cl2_sylow(g: AbelianGroupStructure) -> AbelianGroupStructure:
    return g.p_part(2)


class RelationLattice:
    """Integer row lattice kept in Hermite-like echelon form as rows are inserted."""

    def __init__(self, ncols: int):
        self.ncols = ncols
        self.rows: dict[int, list[int]] = {}  # pivot column -> row

    def insert(self, row: Sequence[int]) -> None:
        v = list(row)
        for col in range(self.ncols):
            if v[col] == 0:
                continue
            piv = self.rows.get(col)
            if piv is None:
                if v[col] < 0:
                    v = [-x for x in v]
                self.rows[col] = v
                self._reduce_above(col)
                return
            # gcd step between v and the pivot row on this column
            a, b = piv[col], v[col]
            g, s, t = _xgcd(a, b)
            new_piv = [s * x + t * y for x, y in zip(piv, v)]
            v = [(a // g) * y - (b // g) * x for x, y in zip(piv, v)]
            self.rows[col] = new_piv
            self._reduce_above(col)
        # v reduced to zero (or stored above)

    def _reduce_above(self, col: int) -> None:
        piv = self.rows[col]
        if piv[col] < 0:
            piv[:] = [-x for x in piv]
        for c, r in self.rows.items():
            if c < col and r[col]:
                q = r[col] // piv[col]
                if q:
                    r[:] = [x - q * y for x, y in zip(r, piv)]

    def full_rank(self) -> bool:
        return len(self.rows) == self.ncols

    def determinant(self) -> int:
        return prod(self.rows[c][c] for c in range(self.ncols)) if self.full_rank() else 0

    def matrix(self) -> list[list[int]]:
        return [list(self.rows[c]) for c in sorted(self.rows)]


def _xgcd(a: int, b: int) -> tuple[int, int, int]:
    x0, x1, y0, y1 = 1, 0, 0, 1
    while b:
        q, a, b = a // b, b, a % b
        x0, x1 = x1, x0 - q * x1
        y0, y1 = y1, y0 - q * y1
    if a < 0:
        a, x0, y0 = -a, -x0, -y0
    return a, x0, y0


def smith_invariants(matrix: Sequence[Sequence[int]]) -> list[int]:
    """Nonzero diagonal of the Smith normal form, in divisibility order."""
    m = [list(r) for r in matrix if any(r)]
    diag = []
    while m:
        nz = [(abs(x), i, j) for i, r in enumerate(m) for j, x in enumerate(r) if x]
        if not nz:
            break
        _, i, j = min(nz)
        _swap(m, 0, i, 0, j)
        while True:
            p = m[0][0]
            for i in range(1, len(m)):
                q = m[i][0] // p
                if q:
                    m[i] = [x - q * y for x, y in zip(m[i], m[0])]
            for j in range(1, len(m[0])):
                q = m[0][j] // p
                if q:
                    for r in m:
                        r[j] -= q * r[0]
            rest = [(abs(m[i][0]), i, 0) for i in range(1, len(m)) if m[i][0]]
            rest += [(abs(m[0][j]), 0, j) for j in range(1, len(m[0])) if m[0][j]]
            if rest:
                _, i, j = min(rest)
                _swap(m, 0, i, 0, j)
                continue
            bad = next((i for i in range(1, len(m)) if any(x % p for x in m[i][1:])), None)
            if bad is None:
                break
            m[0] = [x + y for x, y in zip(m[0], m[bad])]
        diag.append(abs(m[0][0]))
        m = [r[1:] for r in m[1:]]
        m = [r for r in m if any(r)]
    return diag


def _swap(m, r0, r1, c0, c1) -> None:
    m[r0], m[r1] = m[r1], m[r0]
    if c0 != c1:
        for r in m:
            r[c0], r[c1] = r[c1], r[c0]


def structure_from_relations(matrix: Sequence[Sequence[int]], ncols: int) -> AbelianGroupStructure:
    """Z^ncols modulo the row lattice; must be finite."""
    inv = smith_invariants(matrix)
    if len(inv) < ncols:
        raise ValueError("relation lattice is not of full rank")
    return AbelianGroupStructure(tuple(x for x in inv if x > 1))


def gcd_all(xs: Iterable[int]) -> int:
    g = 0
    for x in xs:
        g = gcd(g, x)
    return g
