"""Binary quadratic forms: reduction, composition, class groups, genus data and Rédei 4-ranks."""
from __future__ import annotations

from dataclasses import dataclass, field
from functools import lru_cache
from itertools import product
from math import gcd, isqrt
from threading import Lock

from sympy import divisors, primerange
from sympy.ntheory.residue_ntheory import sqrt_mod

from .discriminants import (
    NotFundamental,
    factor_into_prime_discriminants,
    is_fundamental_discriminant,
    kronecker,
)
from .groups import AbelianGroupStructure, RelationLattice, cl2_sylow, structure_from_relations


class ImprimitiveForm(ValueError):
    pass


Matrix = tuple[int, int, int, int]  # (m00, m01, m10, m11)
IDENTITY: Matrix = (1, 0, 0, 1)


def _mat_mul(s: Matrix, t: Matrix) -> Matrix:
    return (s[0] * t[0] + s[1] * t[2], s[0] * t[1] + s[1] * t[3],
            s[2] * t[0] + s[3] * t[2], s[2] * t[1] + s[3] * t[3])


@dataclass(frozen=True, order=True)
class QuadForm:
    a: int
    b: int
    c: int

    @property
    def disc(self) -> int:
        return self.b * self.b - 4 * self.a * self.c

    def is_primitive(self) -> bool:
        return gcd(gcd(self.a, self.b), self.c) == 1

    def __call__(self, x: int, y: int) -> int:
        return self.a * x * x + self.b * x * y + self.c * y * y

    def act(self, m: Matrix) -> "QuadForm":
        """The form f(m00 x + m01 y, m10 x + m11 y)."""
        p, q, r, s = m
        a = self(p, r)
        c = self(q, s)
        b = 2 * self.a * p * q + self.b * (p * s + q * r) + 2 * self.c * r * s
        return QuadForm(a, b, c)

    def is_reduced(self) -> bool:
        D = self.disc
        if D < 0:
            a, b, c = self.a, self.b, self.c
            if not (a > 0 and abs(b) <= a <= c):
                return False
            return b >= 0 if (abs(b) == a or a == c) else True
        r = isqrt(D)
        # sqrt(D) - b < 2|a| < sqrt(D) + b, D not a square
        return 0 < self.b <= r and r - self.b < 2 * abs(self.a) <= r + self.b

    def __str__(self) -> str:
        return f"({self.a}, {self.b}, {self.c})"


def principal_form(D: int) -> QuadForm:
    if D > 0:
        r = isqrt(D)
        b = r if (r - D) % 2 == 0 else r - 1
        return QuadForm(1, b, (b * b - D) // 4)
    b = D % 2
    return QuadForm(1, b, (b * b - D) // 4)


def _normalize_definite(f: QuadForm, m: Matrix) -> tuple[QuadForm, Matrix]:
    a, b = f.a, f.b
    # translate b into (-a, a]
    s = (a - b) // (2 * a)
    t = (1, s, 0, 1)
    return f.act(t), _mat_mul(m, t)


def _rho_indefinite(f: QuadForm, m: Matrix) -> tuple[QuadForm, Matrix]:
    D = f.disc
    r = isqrt(D)
    c = f.c
    ac = abs(c)
    # choose b' = -b + 2cs with b' ≡ -b mod 2|c| in the normalizing interval
    if ac > r:
        lo = -ac  # -|c| < b' <= |c|
        b_new = (-f.b - lo - 1) % (2 * ac) + lo + 1
    else:
        lo = r - 2 * ac  # r - 2|c| < b' <= r
        b_new = (-f.b - lo - 1) % (2 * ac) + lo + 1
    s = (b_new + f.b) // (2 * c)
    t = (0, -1, 1, s)
    g = f.act(t)
    assert g.b == b_new
    return g, _mat_mul(m, t)


def reduce_with_matrix(f: QuadForm) -> tuple[QuadForm, Matrix]:
    """Reduced form g with g = f.act(M); returns (g, M)."""
    if not f.is_primitive():
        raise ImprimitiveForm(str(f))
    D = f.disc
    m = IDENTITY
    if D < 0:
        if f.a < 0:
            raise ValueError("negative definite forms are not handled")
        f, m = _normalize_definite(f, m)
        while f.a > f.c or (f.a == f.c and f.b < 0):
            t = (0, -1, 1, 0)
            f, m = f.act(t), _mat_mul(m, t)
            f, m = _normalize_definite(f, m)
        return f, m
    if isqrt(D) ** 2 == D:
        raise ValueError("square discriminant")
    while not f.is_reduced():
        f, m = _rho_indefinite(f, m)
    return f, m


def reduce(f: QuadForm) -> QuadForm:
    return reduce_with_matrix(f)[0]


def rho(f: QuadForm) -> QuadForm:
    """One step of the indefinite reduction operator; maps reduced forms to reduced forms."""
    return _rho_indefinite(f, IDENTITY)[0]


def compose(f: QuadForm, g: QuadForm) -> QuadForm:
    """Dirichlet composition (not reduced)."""
    D = f.disc
    if g.disc != D:
        raise ValueError("discriminants differ")
    a1, b1 = f.a, f.b
    a2, b2 = g.a, g.b
    h = (b1 + b2) // 2
    e, u, v, w = _xgcd3(a1, a2, h)
    A = a1 * a2 // (e * e)
    B = (u * a1 * b2 + v * a2 * b1 + w * (b1 * b2 + D) // 2) // e
    B %= 2 * abs(A)
    C = (B * B - D) // (4 * A)
    return QuadForm(A, B, C)


def _xgcd3(a: int, b: int, c: int) -> tuple[int, int, int, int]:
    g1, x1, y1 = _xgcd(a, b)
    g, s, t = _xgcd(g1, c)
    return g, s * x1, s * y1, t


def _xgcd(a: int, b: int) -> tuple[int, int, int]:
    x0, x1, y0, y1 = 1, 0, 0, 1
    while b:
        q, a, b = a // b, b, a % b
        x0, x1 = x1, x0 - q * x1
        y0, y1 = y1, y0 - q * y1
    if a < 0:
        a, x0, y0 = -a, -x0, -y0
    return a, x0, y0


def inverse(f: QuadForm) -> QuadForm:
    return QuadForm(f.a, -f.b, f.c)


def power(f: QuadForm, n: int) -> QuadForm:
    result = principal_form(f.disc)
    base = f
    while n:
        if n & 1:
            result = reduce(compose(result, base))
        base = reduce(compose(base, base))
        n >>= 1
    return result


def prime_form(D: int, p: int) -> QuadForm | None:
    """The form (p, b, c) of discriminant D with 0 <= b <= p, or None if p is inert."""
    if kronecker(D, p) == -1:
        return None
    if p == 2:
        # b in {0, 1, 2} with b ≡ D mod 2 and b^2 ≡ D mod 8
        b = 1 if D % 2 else (0 if D % 8 == 0 else 2)
    else:
        r = sqrt_mod(D % p, p) or 0
        b = r if (r - D) % 2 == 0 else p - r
    return QuadForm(p, b, (b * b - D) // (4 * p))


def reduced_forms(D: int) -> list[QuadForm]:
    """All reduced primitive forms of discriminant D (for D > 0 every member of every cycle)."""
    out = []
    if D < 0:
        amax = isqrt(-D // 3)
        for a in range(1, amax + 1):
            for b in range(-a + 1, a + 1):
                if (b - D) % 2 or (b * b - D) % (4 * a):
                    continue
                c = (b * b - D) // (4 * a)
                f = QuadForm(a, b, c)
                if f.is_primitive() and f.is_reduced():
                    out.append(f)
        return out
    r = isqrt(D)
    for b in range(1, r + 1):
        if (b - D) % 2:
            continue
        n = (D - b * b) // 4  # = -ac > 0
        for a in divisors(n):
            if not (r - b < 2 * a <= r + b):
                continue
            for sa in (a, -a):
                f = QuadForm(sa, b, -n // sa)
                if f.is_primitive():
                    out.append(f)
    return out


@dataclass
class _CycleIndex:
    D: int
    cycle_of: dict[QuadForm, int] = field(default_factory=dict)
    cycles: list[list[QuadForm]] = field(default_factory=list)


@lru_cache(maxsize=256)
def _cycle_index(D: int) -> _CycleIndex:
    idx = _CycleIndex(D)
    for f in reduced_forms(D):
        if f in idx.cycle_of:
            continue
        cyc = [f]
        g = rho(f)
        while g != f:
            cyc.append(g)
            g = rho(g)
        n = len(idx.cycles)
        idx.cycles.append(cyc)
        for g in cyc:
            idx.cycle_of[g] = n
    return idx


def cycle(f: QuadForm) -> list[QuadForm]:
    """The rho-cycle of reduced forms containing reduce(f) (indefinite only)."""
    idx = _cycle_index(f.disc)
    return idx.cycles[idx.cycle_of[reduce(f)]]


def class_key(f: QuadForm):
    """A canonical label for the proper-equivalence class of f."""
    g = reduce(f)
    if f.disc < 0:
        return g
    return _cycle_index(f.disc).cycle_of[g]


def equivalent(f: QuadForm, g: QuadForm) -> bool:
    return class_key(f) == class_key(g)


@dataclass(frozen=True)
class ClassGroupData:
    D: int
    structure: AbelianGroupStructure
    generators: tuple[QuadForm, ...]
    logs: dict  # class key -> exponent vector over generators
    relations: tuple[tuple[int, ...], ...]


_memo: dict[int, ClassGroupData] = {}
_memo_lock = Lock()


def _generator_bound(D: int) -> int:
    return isqrt(abs(D) // 3) + 1 if D < 0 else isqrt(D) + 1


def class_group_data(D: int) -> ClassGroupData:
    """Form class group (narrow for D > 0) with discrete logs, by BFS relations and SNF."""
    with _memo_lock:
        hit = _memo.get(D)
    if hit is not None:
        return hit
    if not is_fundamental_discriminant(D):
        raise NotFundamental(D)
    gens = []
    for p in primerange(2, _generator_bound(D) + 1):
        f = prime_form(D, p)
        if f is not None:
            gens.append(f)
    one = principal_form(D)
    k0 = class_key(one)
    logs = {k0: (0,) * len(gens)}
    reps = {k0: reduce(one)}
    queue = [k0]
    lattice = RelationLattice(len(gens))
    rels = []
    while queue:
        nxt = []
        for k in queue:
            x = reps[k]
            for i, g in enumerate(gens):
                y = reduce(compose(x, g))
                ky = class_key(y)
                v = list(logs[k])
                v[i] += 1
                if ky not in logs:
                    logs[ky] = tuple(v)
                    reps[ky] = y
                    nxt.append(ky)
                else:
                    rel = tuple(a - b for a, b in zip(v, logs[ky]))
                    if any(rel):
                        lattice.insert(rel)
                        rels.append(rel)
        queue = nxt
    if gens:
        structure = structure_from_relations(lattice.matrix(), len(gens))
    else:
        structure = AbelianGroupStructure(())
    if structure.order != len(logs):
        raise AssertionError(f"class group of {D}: SNF order {structure.order} != {len(logs)} classes")
    data = ClassGroupData(D, structure, tuple(gens), logs, tuple(map(tuple, lattice.matrix())))
    with _memo_lock:
        _memo.setdefault(D, data)
    return data


def class_group(D: int) -> AbelianGroupStructure:
    return class_group_data(D).structure


def class_number(D: int) -> int:
    return class_group(D).order


def negative_principal_form(D: int) -> QuadForm:
    b = principal_form(D).b
    return QuadForm(-1, b, (D - b * b) // 4)


def narrow_equals_wide(D: int) -> bool:
    """For D > 0: the form (-1, b, c) lies in the principal cycle iff the fundamental unit has norm -1."""
    return equivalent(negative_principal_form(D), principal_form(D))


def wide_class_group(D: int) -> AbelianGroupStructure:
    if D < 0 or narrow_equals_wide(D):
        return class_group(D)
    data = class_group_data(D)
    v = data.logs[class_key(negative_principal_form(D))]
    rows = [list(r) for r in data.relations] + [list(v)]
    return structure_from_relations(rows, len(data.generators))


def wide_class_number(D: int) -> int:
    return wide_class_group(D).order


def check_cl2_type(d: int) -> tuple[bool, int | None]:
    """(True, m) iff Cl_2(k) is of type (2, 2^m) with m >= 1."""
    c2 = cl2_sylow(class_group(d)).elementary_divisors
    if len(c2) == 2 and c2[0] == 2:
        return True, c2[1].bit_length() - 1
    return False, None


@dataclass(frozen=True)
class RedeiData:
    factors: tuple[int, ...]
    matrix: tuple[tuple[int, ...], ...]
    four_rank: int
    c4_factorizations: tuple[tuple[int, int], ...]


def _f2_rank(rows: list[list[int]]) -> int:
    vecs = [int("".join(map(str, r)), 2) for r in rows]
    rank = 0
    basis: list[int] = []
    for v in vecs:
        for b in basis:
            v = min(v, v ^ b)
        if v:
            basis.append(v)
            rank += 1
    return rank


def redei_data(d: int) -> RedeiData:
    """Rédei matrix: row i belongs to the prime p_i, column j to d_j; entry 0 iff (d_j/p_i) = +1.

    Each row sums to zero, so a column subset D1 lies in the kernel exactly when d = D1 * D2
    is a C4-splitting.
    """
    fs = factor_into_prime_discriminants(d)
    t = len(fs)
    mat = []
    for i in range(t):
        row = [0 if j == i or kronecker(fs[j].value, fs[i].prime) == 1 else 1 for j in range(t)]
        row[i] = sum(row) % 2
        mat.append(row)
    rank = _f2_rank(mat)
    splits = []
    for x in product((0, 1), repeat=t):
        if not any(x) or all(x):
            continue
        if any(sum(mat[i][j] * x[j] for j in range(t)) % 2 for i in range(t)):
            continue
        d1 = 1
        for j in range(t):
            if x[j]:
                d1 *= fs[j].value
        d2 = d // d1
        pair = (d1, d2) if d1 > 0 else (d2, d1)
        if pair not in splits:
            splits.append(pair)
    return RedeiData(tuple(q.value for q in fs), tuple(map(tuple, mat)), t - 1 - rank,
                     tuple(sorted(splits)))


def is_c4_split(d1: int, d2: int) -> bool:
    """All cross symbols (D1/p) for p | D2 and (D2/q) for q | D1 equal +1."""
    f1 = factor_into_prime_discriminants(d1) if d1 != 1 else ()
    f2 = factor_into_prime_discriminants(d2) if d2 != 1 else ()
    return (all(kronecker(d1, q.prime) == 1 for q in f2)
            and all(kronecker(d2, q.prime) == 1 for q in f1))
