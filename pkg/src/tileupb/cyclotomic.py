"""Exact arithmetic in cyclotomic fields Q(zeta_L).

An element is stored as its coefficient vector in the power basis
1, zeta, ..., zeta^(phi(L)-1) of Q[x]/Phi_L(x).  Binary operations between
elements of different orders promote both operands to the lcm order, so
callers can mix Fourier coefficients of several tile sizes freely.
"""

from __future__ import annotations

import cmath
from fractions import Fraction
from functools import lru_cache
from math import gcd
from numbers import Rational
from typing import Iterable, Sequence


class InvalidOrderError(ValueError):
    """A root of unity of order n does not live in Q(zeta_L)."""


def lcm(*values: int) -> int:
    out = 1
    for v in values:
        out = out * v // gcd(out, v)
    return out


@lru_cache(maxsize=None)
def totient(n: int) -> int:
    result, m, p = n, n, 2
    while p * p <= m:
        if m % p == 0:
            while m % p == 0:
                m //= p
            result -= result // p
        p += 1
    if m > 1:
        result -= result // m
    return result


@lru_cache(maxsize=None)
def mobius(n: int) -> int:
    result, m, p = 1, n, 2
    while p * p <= m:
        if m % p == 0:
            m //= p
            if m % p == 0:
                return 0
            result = -result
        p += 1
    if m > 1:
        result = -result
    return result


def _poly_divexact(num: list[int], den: Sequence[int]) -> list[int]:
    # integer polynomials, low degree first; den is monic
    num = list(num)
    out = [0] * (len(num) - len(den) + 1)
    for i in range(len(out) - 1, -1, -1):
        c = num[i + len(den) - 1]
        out[i] = c
        if c:
            for j, d in enumerate(den):
                num[i + j] -= c * d
    assert not any(num), "inexact cyclotomic division"
    return out


@lru_cache(maxsize=None)
def cyclotomic_poly(n: int) -> tuple[int, ...]:
    """Integer coefficients of Phi_n, lowest degree first.

    Obtained by dividing x^n - 1 by Phi_d for every proper divisor d of n.
    """
    if n < 1:
        raise InvalidOrderError(f"order must be positive, got {n}")
    poly = [-1] + [0] * (n - 1) + [1]
    for d in range(1, n):
        if n % d == 0:
            poly = _poly_divexact(poly, cyclotomic_poly(d))
    return tuple(poly)


@lru_cache(maxsize=None)
def _power_table(n: int) -> tuple[tuple[int, ...], ...]:
    """Row k holds x^k mod Phi_n in the power basis, for 0 <= k < max(n, 2*phi(n))."""
    phi = totient(n)
    cyc = cyclotomic_poly(n)
    rows: list[tuple[int, ...]] = []
    cur = [0] * phi
    cur[0] = 1
    for _ in range(max(n, 2 * phi)):
        rows.append(tuple(cur))
        # multiply by x, then eliminate x^phi using the monic Phi_n
        top = cur[-1]
        cur = [0] + cur[:-1]
        if top:
            for j in range(phi):
                cur[j] -= top * cyc[j]
    return tuple(rows)


def _reduce(order: int, poly: Sequence) -> tuple:
    """Reduce a coefficient list of any length modulo Phi_order."""
    phi = totient(order)
    if len(poly) <= phi:
        return tuple(poly) + (Fraction(0),) * (phi - len(poly))
    table = _power_table(order)
    out = list(poly[:phi])
    for k in range(phi, len(poly)):
        c = poly[k]
        if c:
            row = table[k % order] if k >= len(table) else table[k]
            for j, r in enumerate(row):
                if r:
                    out[j] += c * r
    return tuple(out)


def _as_fraction(x) -> Fraction:
    if isinstance(x, Fraction):
        return x
    if isinstance(x, (int, Rational)):
        return Fraction(x)
    if isinstance(x, str):
        return Fraction(x)
    raise TypeError(f"cannot interpret {x!r} as a rational")


class CycNumber:
    """An immutable element of Q(zeta_order)."""

    __slots__ = ("order", "coeffs")

    def __init__(self, order: int, coeffs: Iterable):
        coeffs = tuple(_as_fraction(c) for c in coeffs)
        if order < 1:
            raise InvalidOrderError(f"order must be positive, got {order}")
        if len(coeffs) != totient(order):
            raise ValueError(
                f"order {order} needs {totient(order)} coefficients, got {len(coeffs)}"
            )
        object.__setattr__(self, "order", order)
        object.__setattr__(self, "coeffs", coeffs)

    def __setattr__(self, name, value):
        raise AttributeError("CycNumber is immutable")

    @classmethod
    def _raw(cls, order: int, coeffs: tuple) -> "CycNumber":
        obj = object.__new__(cls)
        object.__setattr__(obj, "order", order)
        object.__setattr__(obj, "coeffs", coeffs)
        return obj

    # -- constructors -------------------------------------------------
    @classmethod
    def rational(cls, value, order: int = 1) -> "CycNumber":
        phi = totient(order)
        return cls._raw(order, (_as_fraction(value),) + (Fraction(0),) * (phi - 1))

    @classmethod
    def zero(cls, order: int = 1) -> "CycNumber":
        return cls.rational(0, order)

    @classmethod
    def one(cls, order: int = 1) -> "CycNumber":
        return cls.rational(1, order)

    @classmethod
    def zeta(cls, order: int, k: int = 1) -> "CycNumber":
        """zeta_order ** k in canonical form."""
        row = _power_table(order)[k % order]
        return cls._raw(order, tuple(Fraction(r) for r in row))

    # -- structure ----------------------------------------------------
    def promote(self, order: int) -> "CycNumber":
        """Re-express in Q(zeta_order); ``order`` must be a multiple of self.order."""
        if order == self.order:
            return self
        if order % self.order:
            raise InvalidOrderError(f"cannot embed Q(zeta_{self.order}) into Q(zeta_{order})")
        step = order // self.order
        poly = [Fraction(0)] * (step * (len(self.coeffs) - 1) + 1)
        for k, c in enumerate(self.coeffs):
            poly[k * step] = c
        return CycNumber._raw(order, _reduce(order, poly))

    def is_rational(self) -> bool:
        return not any(self.coeffs[1:])

    def as_fraction(self) -> Fraction:
        if not self.is_rational():
            raise ValueError(f"{self} is not rational")
        return self.coeffs[0]

    def conjugate(self) -> "CycNumber":
        # Galois map zeta -> zeta^(L-1)
        n = self.order
        if n <= 2:
            return self
        poly = [Fraction(0)] * n
        for k, c in enumerate(self.coeffs):
            if c:
                poly[(-k) % n] += c
        return CycNumber._raw(n, _reduce(n, poly))

    def norm_sq(self) -> "CycNumber":
        return self * self.conjugate()

    def to_complex(self) -> complex:
        n = self.order
        return sum(
            (float(c) * cmath.exp(2j * cmath.pi * k / n) for k, c in enumerate(self.coeffs) if c),
            0j,
        )

    def normalized_trace(self) -> Fraction:
        """Tr(x)/[Q(zeta):Q]; independent of which cyclotomic field holds x."""
        n = self.order
        total = Fraction(0)
        for k, c in enumerate(self.coeffs):
            if c:
                m = n // gcd(k, n)
                total += c * Fraction(mobius(m), totient(m))
        return total

    # -- arithmetic ---------------------------------------------------
    def _coerce(self, other):
        if isinstance(other, CycNumber):
            if other.order == self.order:
                return self, other
            m = lcm(self.order, other.order)
            return self.promote(m), other.promote(m)
        if isinstance(other, (int, Fraction, Rational)):
            return self, CycNumber.rational(other, self.order)
        return None

    def __add__(self, other):
        pair = self._coerce(other)
        if pair is None:
            return NotImplemented
        a, b = pair
        return CycNumber._raw(a.order, tuple(x + y for x, y in zip(a.coeffs, b.coeffs)))

    __radd__ = __add__

    def __neg__(self):
        return CycNumber._raw(self.order, tuple(-x for x in self.coeffs))

    def __sub__(self, other):
        pair = self._coerce(other)
        if pair is None:
            return NotImplemented
        a, b = pair
        return CycNumber._raw(a.order, tuple(x - y for x, y in zip(a.coeffs, b.coeffs)))

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if isinstance(other, (int, Fraction)):
            return CycNumber._raw(self.order, tuple(x * other for x in self.coeffs))
        pair = self._coerce(other)
        if pair is None:
            return NotImplemented
        a, b = pair
        ca, cb = a.coeffs, b.coeffs
        if len(ca) == 1:
            return CycNumber._raw(a.order, (ca[0] * cb[0],))
        prod = [Fraction(0)] * (2 * len(ca) - 1)
        for i, x in enumerate(ca):
            if x:
                for j, y in enumerate(cb):
                    if y:
                        prod[i + j] += x * y
        return CycNumber._raw(a.order, _reduce(a.order, prod))

    __rmul__ = __mul__

    def inverse(self) -> "CycNumber":
        if not self:
            raise ZeroDivisionError("inverse of zero in Q(zeta)")
        if len(self.coeffs) == 1:
            return CycNumber._raw(self.order, (1 / self.coeffs[0],))
        u = _poly_inverse_mod(list(self.coeffs), [Fraction(c) for c in cyclotomic_poly(self.order)])
        return CycNumber._raw(self.order, _reduce(self.order, u))

    def __truediv__(self, other):
        if isinstance(other, (int, Fraction)):
            if other == 0:
                raise ZeroDivisionError("division by zero")
            return CycNumber._raw(self.order, tuple(x / other for x in self.coeffs))
        pair = self._coerce(other)
        if pair is None:
            return NotImplemented
        a, b = pair
        return a * b.inverse()

    def __rtruediv__(self, other):
        return self.inverse() * other

    def __pow__(self, k: int):
        if not isinstance(k, int):
            return NotImplemented
        if k < 0:
            return self.inverse() ** (-k)
        result = CycNumber.one(self.order)
        base = self
        while k:
            if k & 1:
                result = result * base
            base = base * base
            k >>= 1
        return result

    # -- comparison ---------------------------------------------------
    def __bool__(self):
        return any(self.coeffs)

    def __eq__(self, other):
        pair = self._coerce(other)
        if pair is None:
            return NotImplemented
        a, b = pair
        return a.coeffs == b.coeffs

    def __hash__(self):
        return hash(self.normalized_trace())

    def __repr__(self):
        return f"CycNumber({self.order}, {[str(c) for c in self.coeffs]})"

    def __str__(self):
        if self.is_rational():
            return str(self.coeffs[0])
        terms = []
        for k, c in enumerate(self.coeffs):
            if not c:
                continue
            mono = "" if k == 0 else (f"z{self.order}" if k == 1 else f"z{self.order}^{k}")
            if not mono:
                terms.append(str(c))
            elif c == 1:
                terms.append(mono)
            elif c == -1:
                terms.append("-" + mono)
            else:
                terms.append(f"{c}*{mono}")
        return " + ".join(terms).replace("+ -", "- ")

    # -- serialization ------------------------------------------------
    def to_json(self) -> dict:
        return {"order": self.order, "coeffs": [str(c) for c in self.coeffs]}

    @classmethod
    def from_json(cls, data) -> "CycNumber":
        if isinstance(data, (int, str)):
            return cls.rational(Fraction(data))
        if not isinstance(data, dict) or "order" not in data or "coeffs" not in data:
            raise ValueError(f"malformed scalar: {data!r}")
        return cls(int(data["order"]), [Fraction(c) for c in data["coeffs"]])


def _poly_trim(p: list) -> list:
    while p and not p[-1]:
        p.pop()
    return p


def _poly_divmod(a: list, b: list) -> tuple[list, list]:
    a = list(a)
    q = [Fraction(0)] * max(len(a) - len(b) + 1, 1)
    lead = b[-1]
    while len(_poly_trim(a)) >= len(b):
        shift = len(a) - len(b)
        c = a[-1] / lead
        q[shift] = c
        for j, bj in enumerate(b):
            a[shift + j] -= c * bj
        a.pop()
    return q, a


def _poly_mul(a: list, b: list) -> list:
    if not a or not b:
        return []
    out = [Fraction(0)] * (len(a) + len(b) - 1)
    for i, x in enumerate(a):
        if x:
            for j, y in enumerate(b):
                out[i + j] += x * y
    return out


def _poly_sub(a: list, b: list) -> list:
    n = max(len(a), len(b))
    return [(a[i] if i < len(a) else 0) - (b[i] if i < len(b) else 0) for i in range(n)]


def _poly_inverse_mod(a: list, m: list) -> list:
    """u with a*u = 1 mod m, via the extended Euclidean algorithm over Q."""
    r0, r1 = _poly_trim(list(m)), _poly_trim(list(a))
    s0, s1 = [], [Fraction(1)]
    while len(r1) > 1:
        q, r = _poly_divmod(r0, r1)
        r0, r1 = r1, _poly_trim(r)
        s0, s1 = s1, _poly_trim(_poly_sub(s0, _poly_mul(q, s1)))
    if not r1:
        raise ZeroDivisionError("element is not invertible (shared factor with Phi)")
    c = r1[0]
    return [x / c for x in s1]


def embed_root(n: int, k: int, order: int) -> CycNumber:
    """w_n ** k as an element of Q(zeta_order); n must divide order."""
    if n < 1 or order % n:
        raise InvalidOrderError(f"w_{n} is not in Q(zeta_{order})")
    return CycNumber.zeta(order, (k * (order // n)) % order)


def as_cyc(x, order: int = 1) -> CycNumber:
    if isinstance(x, CycNumber):
        return x if x.order == order or order % x.order else x.promote(order)
    return CycNumber.rational(x, order)


def common_order(values: Iterable) -> int:
    out = 1
    for v in values:
        if isinstance(v, CycNumber):
            out = lcm(out, v.order)
    return out
