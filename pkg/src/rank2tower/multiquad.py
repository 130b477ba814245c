"""Exact arithmetic in multiquadratic fields Q(√r0, √r1, ...): square roots, real signs, p-adic images.

Elements are tuples of Fractions indexed by bitmasks: coordinate i multiplies ∏_{j in i} √r_j.
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from functools import reduce as _fold
from itertools import product
from math import isqrt

from sympy.ntheory.residue_ntheory import sqrt_mod

Elem = tuple  # tuple[Fraction, ...]


def _rational_sqrt(q: Fraction) -> Fraction | None:
    if q < 0:
        return None
    n, d = q.numerator, q.denominator
    a, b = isqrt(n), isqrt(d)
    if a * a == n and b * b == d:
        return Fraction(a, b)
    return None


@dataclass(frozen=True)
class MultiQuadField:
    radicands: tuple[int, ...]  # squarefree, multiplicatively independent mod squares

    @property
    def n(self) -> int:
        return len(self.radicands)

    @property
    def degree(self) -> int:
        return 1 << self.n

    # construction ------------------------------------------------------------------------
    def elem(self, coeffs) -> Elem:
        c = tuple(Fraction(x) for x in coeffs)
        if len(c) != self.degree:
            raise ValueError("wrong number of coordinates")
        return c

    def rational(self, q) -> Elem:
        return (Fraction(q),) + (Fraction(0),) * (self.degree - 1)

    def one(self) -> Elem:
        return self.rational(1)

    def sqrt_of(self, m: int) -> Elem:
        """√m for a squarefree m whose square class is generated by the radicands (positive root choice)."""
        for mask in range(self.degree):
            prod_r = 1
            for j in range(self.n):
                if mask >> j & 1:
                    prod_r *= self.radicands[j]
            # √(prod_r) = g·√m with prod_r = g²·m
            if prod_r % m == 0:
                g2 = prod_r // m
                g = isqrt(abs(g2))
                if g2 > 0 and g * g == g2:
                    c = [Fraction(0)] * self.degree
                    c[mask] = Fraction(1, g)
                    return tuple(c)
        raise ValueError(f"√{m} is not in Q{self.radicands}")

    def quadratic(self, A: int, B: int, D: int) -> Elem:
        """Embed (A + B√D)/2 from the quadratic field of discriminant D."""
        g, m = (2, D // 4) if D % 4 == 0 else (1, D)
        if m == 1:
            return self.rational(Fraction(A + B * g, 2))
        root = self.sqrt_of(m)
        return self.add(self.rational(Fraction(A, 2)), self.scale(root, Fraction(B * g, 2)))

    # arithmetic --------------------------------------------------------------------------
    def add(self, x: Elem, y: Elem) -> Elem:
        return tuple(a + b for a, b in zip(x, y))

    def neg(self, x: Elem) -> Elem:
        return tuple(-a for a in x)

    def sub(self, x: Elem, y: Elem) -> Elem:
        return tuple(a - b for a, b in zip(x, y))

    def scale(self, x: Elem, q) -> Elem:
        q = Fraction(q)
        return tuple(a * q for a in x)

    def mul(self, x: Elem, y: Elem) -> Elem:
        out = [Fraction(0)] * self.degree
        for i, a in enumerate(x):
            if not a:
                continue
            for j, b in enumerate(y):
                if not b:
                    continue
                f = a * b
                common = i & j
                k = 0
                while common:
                    if common & 1:
                        f *= self.radicands[k]
                    common >>= 1
                    k += 1
                out[i ^ j] += f
        return tuple(out)

    def prod(self, xs) -> Elem:
        return _fold(self.mul, xs, self.one())

    def power(self, x: Elem, e: int) -> Elem:
        if e < 0:
            return self.power(self.inv(x), -e)
        out, base = self.one(), x
        while e:
            if e & 1:
                out = self.mul(out, base)
            base = self.mul(base, base)
            e >>= 1
        return out

    def conj(self, x: Elem, j: int) -> Elem:
        """The automorphism √r_j ↦ -√r_j."""
        return tuple(-a if i >> j & 1 else a for i, a in enumerate(x))

    def is_zero(self, x: Elem) -> bool:
        return not any(x)

    def is_rational(self, x: Elem) -> bool:
        return not any(x[1:])

    # tower view --------------------------------------------------------------------------
    def base(self) -> "MultiQuadField":
        return MultiQuadField(self.radicands[:-1])

    def split(self, x: Elem) -> tuple[Elem, Elem]:
        h = self.degree // 2
        return x[:h], x[h:]

    def join(self, X: Elem, Y: Elem) -> Elem:
        return tuple(X) + tuple(Y)

    def inv(self, x: Elem) -> Elem:
        if self.is_zero(x):
            raise ZeroDivisionError
        if self.n == 0:
            return (1 / x[0],)
        B = self.base()
        X, Y = self.split(x)
        r = self.radicands[-1]
        # 1/(X + Y√r) = (X - Y√r)/(X² - rY²)
        N = B.sub(B.mul(X, X), B.scale(B.mul(Y, Y), r))
        Ni = B.inv(N)
        return self.join(B.mul(X, Ni), B.neg(B.mul(Y, Ni)))

    def div(self, x: Elem, y: Elem) -> Elem:
        return self.mul(x, self.inv(y))

    def norm_to_base(self, x: Elem) -> Elem:
        B = self.base()
        X, Y = self.split(x)
        return B.sub(B.mul(X, X), B.scale(B.mul(Y, Y), self.radicands[-1]))

    def norm(self, x: Elem) -> Fraction:
        """Absolute norm to Q."""
        F, y = self, x
        while F.n:
            y = F.norm_to_base(y)
            F = F.base()
        return y[0]

    def sqrt(self, x: Elem) -> Elem | None:
        """An exact square root in the field, or None."""
        if self.n == 0:
            s = _rational_sqrt(x[0])
            return None if s is None else (s,)
        B = self.base()
        X, Y = self.split(x)
        r = self.radicands[-1]
        zero = B.rational(0)
        if B.is_zero(Y):
            s = B.sqrt(X)
            if s is not None:
                return self.join(s, zero)
            t = B.sqrt(B.scale(X, Fraction(1, r)))
            return None if t is None else self.join(zero, t)
        N = B.sub(B.mul(X, X), B.scale(B.mul(Y, Y), r))
        s = B.sqrt(N)
        if s is None:
            return None
        for sg in (1, -1):
            t = B.scale(B.add(X, B.scale(s, sg)), Fraction(1, 2))
            u = B.sqrt(t)
            if u is None or B.is_zero(u):
                continue
            v = B.div(Y, B.scale(u, 2))
            cand = self.join(u, v)
            if self.mul(cand, cand) == tuple(x):
                return cand
        return None

    def is_square(self, x: Elem) -> bool:
        return self.sqrt(x) is not None

    # embeddings --------------------------------------------------------------------------
    def is_totally_real(self) -> bool:
        return all(r > 0 for r in self.radicands)

    def real_embeddings(self) -> list[tuple[int, ...]]:
        if not self.is_totally_real():
            return []
        return list(product((1, -1), repeat=self.n))

    def sign(self, x: Elem, signs: tuple[int, ...]) -> int:
        """Exact sign of x under the real embedding sending √r_j to signs[j]·|√r_j|."""
        if self.n == 0:
            return (x[0] > 0) - (x[0] < 0)
        B = self.base()
        X, Y = self.split(x)
        e = signs[-1]
        sX = B.sign(X, signs[:-1])
        sY = e * B.sign(Y, signs[:-1])
        if sY == 0 or sX == sY:
            return sX
        if sX == 0:
            return sY
        d = B.sign(B.sub(B.mul(X, X), B.scale(B.mul(Y, Y), self.radicands[-1])), signs[:-1])
        return sX if d > 0 else sY

    def splits_completely(self, p: int) -> bool:
        for r in self.radicands:
            if p == 2:
                if r % 8 != 1:
                    return False
            elif r % p == 0 or pow(r % p, (p - 1) // 2, p) != 1:
                return False
        return True

    def padic_embeddings(self, p: int, prec: int = 80) -> list["PadicEmbedding"]:
        """All embeddings into Q_p when p splits completely."""
        if not self.splits_completely(p):
            raise ValueError(f"{p} does not split completely in Q{self.radicands}")
        mod = p ** prec
        roots = []
        for r in self.radicands:
            rs = sqrt_mod(r % mod, mod, all_roots=True)
            # keep one root per sign class: s and -s (mod p^prec) give the two embeddings
            base = min(rs, key=lambda s: (s % (2 * p if p == 2 else p), s))
            roots.append((base, (-base) % mod))
        return [PadicEmbedding(self, p, prec, choice) for choice in product(*roots)]


@dataclass(frozen=True)
class PadicEmbedding:
    field: MultiQuadField
    p: int
    prec: int
    lifts: tuple[int, ...]

    def value(self, x: Elem) -> Fraction:
        F = self.field
        out = Fraction(0)
        for i, c in enumerate(x):
            if not c:
                continue
            t = c
            for j in range(F.n):
                if i >> j & 1:
                    t *= self.lifts[j]
            out += t
        return out

    def split_value(self, x: Elem, k: int = 8) -> tuple[int, int]:
        """(v, u mod p^k) with image = p^v·u, u a p-adic unit."""
        V = self.value(x)
        if V == 0:
            raise ValueError("element maps to 0 at working precision")
        v = 0
        num, den = V.numerator, V.denominator
        while num % self.p == 0:
            num //= self.p
            v += 1
        while den % self.p == 0:
            den //= self.p
            v -= 1
        if v > self.prec // 2:
            raise ValueError("p-adic precision exhausted")
        mod = self.p ** k
        return v, num * pow(den, -1, mod) % mod


def hilbert_symbol_qp(a: tuple[int, int], b: tuple[int, int], p: int) -> int:
    """(a, b)_p for a = p^α·u, b = p^β·v given as (α, u), (β, v) with u, v units (mod p or mod 8)."""
    al, u = a
    be, v = b
    if p == 2:
        eps = lambda w: ((w - 1) // 2) % 2
        omg = lambda w: ((w * w - 1) // 8) % 2
        u, v = u % 8, v % 8
        e = eps(u) * eps(v) + al * omg(v) + be * omg(u)
        return -1 if e % 2 else 1
    leg = lambda w: 1 if pow(w % p, (p - 1) // 2, p) == 1 else -1
    s = 1
    if (al * be) % 2 and p % 4 == 3:
        s = -s
    if be % 2:
        s *= leg(u)
    if al % 2:
        s *= leg(v)
    return s


def hilbert_symbol_real(a_sign: int, b_sign: int) -> int:
    return -1 if a_sign < 0 and b_sign < 0 else 1


def local_ramified(v: int, u: int, p: int) -> bool:
    """Is Q_p(√(p^v·u))/Q_p ramified? u given mod 8 for p = 2."""
    if v % 2:
        return True
    if p == 2:
        return u % 4 != 1
    return False
