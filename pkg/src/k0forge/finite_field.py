"""Explicit finite fields GF(p^m) = GF(p)[x]/(f) and their elements."""

from __future__ import annotations

import random
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from . import linalg, polyfp
from .arith import factorint, require_prime
from .polyfp import Poly


@dataclass(frozen=True)
class FiniteField:
    """GF(p)[x]/(modulus) for a monic irreducible modulus."""

    p: int
    modulus: Poly

    def __post_init__(self):
        if not polyfp.is_irreducible(self.modulus, self.p) or self.modulus[-1] != 1:
            raise ValueError(f"modulus {self.modulus} is not monic irreducible mod {self.p}")

    @property
    def degree(self) -> int:
        return len(self.modulus) - 1

    @property
    def order(self) -> int:
        return self.p**self.degree

    def __call__(self, value) -> FieldElement:
        if isinstance(value, FieldElement):
            if value.field != self:
                raise ValueError("element belongs to a different field")
            return value
        if isinstance(value, int):
            return FieldElement(self, polyfp.normalize((value,), self.p))
        return FieldElement(self, polyfp.mod(polyfp.normalize(value, self.p), self.modulus, self.p))

    def zero(self) -> FieldElement:
        return FieldElement(self, ())

    def one(self) -> FieldElement:
        return FieldElement(self, (1,))

    def gen(self) -> FieldElement:
        return self((0, 1))

    def from_int(self, code: int) -> FieldElement:
        return self(polyfp.from_int(code, self.p))

    def elements(self):
        for code in range(self.order):
            yield self.from_int(code)

    def to_json(self) -> dict:
        return {"p": self.p, "modulus": list(self.modulus)}


@lru_cache(maxsize=None)
def conway_style_field(p: int, m: int) -> FiniteField:
    """GF(p^m) built on the lexicographically least irreducible of degree m."""
    require_prime(p, "p")
    return FiniteField(p, polyfp.least_irreducible(m, p))


@dataclass(frozen=True)
class FieldElement:
    field: FiniteField
    coeffs: Poly

    def _lift(self, other) -> FieldElement | None:
        if isinstance(other, FieldElement):
            if other.field != self.field:
                raise ValueError("elements of different fields")
            return other
        if isinstance(other, int):
            return self.field(other)
        return None

    def __add__(self, other):
        o = self._lift(other)
        if o is None:
            return NotImplemented
        return FieldElement(self.field, polyfp.add(self.coeffs, o.coeffs, self.field.p))

    __radd__ = __add__

    def __neg__(self):
        return FieldElement(self.field, polyfp.scale(self.coeffs, -1, self.field.p))

    def __sub__(self, other):
        o = self._lift(other)
        if o is None:
            return NotImplemented
        return FieldElement(self.field, polyfp.sub(self.coeffs, o.coeffs, self.field.p))

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        o = self._lift(other)
        if o is None:
            return NotImplemented
        f = self.field
        return FieldElement(f, polyfp.mulmod(self.coeffs, o.coeffs, f.modulus, f.p))

    __rmul__ = __mul__

    def __pow__(self, e: int):
        f = self.field
        if e < 0:
            return self.inverse() ** (-e)
        return FieldElement(f, polyfp.powmod(self.coeffs, e, f.modulus, f.p))

    def inverse(self) -> FieldElement:
        if not self.coeffs:
            raise ZeroDivisionError("zero has no inverse")
        f = self.field
        return FieldElement(f, polyfp.inverse_mod(self.coeffs, f.modulus, f.p))

    def __truediv__(self, other):
        o = self._lift(other)
        if o is None:
            return NotImplemented
        return self * o.inverse()

    def __bool__(self):
        return bool(self.coeffs)

    def __eq__(self, other):
        if isinstance(other, int):
            other = self.field(other)
        if not isinstance(other, FieldElement):
            return NotImplemented
        return self.field == other.field and self.coeffs == other.coeffs

    def __hash__(self):
        return hash((self.field, self.coeffs))

    def encode(self) -> int:
        """Integer code; orders elements lexicographically from the top coefficient."""
        return polyfp.to_int(self.coeffs, self.field.p)

    def frobenius(self, k: int = 1) -> FieldElement:
        return self ** (self.field.p**k)

    def subfield_degree(self) -> int:
        """Degree over GF(p) of the smallest subfield containing this element."""
        m = self.field.degree
        for e in sorted(d for d in range(1, m + 1) if m % d == 0):
            if self.frobenius(e) == self:
                return e
        return m  # unreachable: frobenius^m is the identity

    def multiplicative_order(self) -> int:
        if not self.coeffs:
            raise ZeroDivisionError("zero has no multiplicative order")
        order = self.field.order - 1
        for prime in factorint(order):
            while order % prime == 0 and (self ** (order // prime)) == 1:
                order //= prime
        return order

    def minimal_polynomial(self) -> Poly:
        """Minimal polynomial over GF(p), via a linear dependency among powers."""
        p, m = self.field.p, self.field.degree
        e = self.subfield_degree()
        powers = [self.field.one()]
        for _ in range(e):
            powers.append(powers[-1] * self)
        cols = [list(x.coeffs) + [0] * (m - len(x.coeffs)) for x in powers]
        a = linalg.as_matrix([[cols[j][i] for j in range(e)] for i in range(m)], p)
        b = linalg.as_matrix([[-c] for c in cols[e]], p).reshape(m)
        x = linalg.solve(a, b, p)
        if x is None:
            raise AssertionError("powers below the subfield degree are dependent")
        return polyfp.normalize([int(c) for c in x] + [1], p)

    def to_json(self) -> list[int]:
        return list(self.coeffs)

    def __repr__(self):
        return f"GF({self.field.p}^{self.field.degree})<{list(self.coeffs)}>"


# ---------------------------------------------------------------------------
# Root finding for GF(p)-polynomials inside an extension field


def _vector(x: FieldElement, d: int) -> np.ndarray:
    v = np.zeros(d, dtype=np.int64)
    v[: len(x.coeffs)] = x.coeffs
    return v


class _VectorField:
    """GF(p)[x]/(g) with elements as numpy vectors and multiplication as matrices."""

    def __init__(self, field: FiniteField):
        self.field = field
        p, d = field.p, field.degree
        self.p, self.d = p, d
        xpow = np.zeros((d, d, d), dtype=np.int64)
        for j in range(d):
            col = field((0,) * j + (1,))
            for i in range(d):
                xpow[j][:, i] = _vector(col, d)
                col = col * field.gen()
        self.xpow = xpow  # xpow[j] multiplies by x^j
        xp = field.gen() ** p
        frob = np.zeros((d, d), dtype=np.int64)
        col = field.one()
        for j in range(d):
            frob[:, j] = _vector(col, d)
            col = col * xp
        self.frob = frob

    def mul_matrix(self, a: np.ndarray) -> np.ndarray:
        return np.tensordot(a, self.xpow, axes=1) % self.p

    def inverse(self, a: np.ndarray) -> np.ndarray:
        inv = polyfp.inverse_mod(polyfp.normalize(a.tolist(), self.p), self.field.modulus, self.p)
        return _vector(FieldElement(self.field, inv), self.d)


def _trim(a: np.ndarray) -> np.ndarray:
    nz = np.nonzero(a.any(axis=1))[0]
    return a[: nz[-1] + 1] if nz.size else a[:0]


def _monic(a: np.ndarray, k: _VectorField) -> np.ndarray:
    return a @ k.mul_matrix(k.inverse(a[-1])).T % k.p


def _rem(a: np.ndarray, b: np.ndarray, k: _VectorField) -> np.ndarray:
    """Remainder of a by the monic b; both are polynomials with coefficients in k (rows)."""
    a = a.copy()
    m = len(b) - 1
    for i in range(len(a) - 1, m - 1, -1):
        if a[i].any():
            a[i - m : i + 1] = (a[i - m : i + 1] - b @ k.mul_matrix(a[i]).T) % k.p
    return _trim(a[:m])


def _gcd(a: np.ndarray, b: np.ndarray, k: _VectorField) -> np.ndarray:
    a, b = _trim(a), _trim(b)
    while len(b):
        b = _monic(b, k)
        a, b = b, _rem(a, b, k)
    return _monic(a, k)


def find_root(f: Poly, field: FiniteField, seed: int = 0) -> FieldElement | None:
    """A root of f (coefficients in GF(p)) inside ``field``, or None if it has none.

    The part of f with roots in the field is split by traces: for a in the
    field, w = Tr(a*y) mod f takes values in GF(p) at every root, so the
    factors gcd(f, w - c) separate roots.  Frobenius acts linearly on
    field[y]/(f) because f has prime-field coefficients.
    """
    p, d = field.p, field.degree
    f = polyfp.monic(polyfp.normalize(f, p), p)
    if polyfp.degree(f) < 1:
        raise ValueError("polynomial must be nonconstant")
    y = (0, 1)
    split = polyfp.gcd(f, polyfp.sub(polyfp.powmod(y, field.order, f, p), y, p), p)
    t = polyfp.degree(split)
    if t < 1:
        return None
    k = _VectorField(field)
    rng = random.Random(seed)
    current = np.zeros((t + 1, d), dtype=np.int64)
    current[:, 0] = split
    if t > 1:
        # y^(i p) mod split, as columns
        py = np.zeros((t, t), dtype=np.int64)
        yp = polyfp.powmod(y, p, split, p)
        col: Poly = (1,)
        for i in range(t):
            py[: len(col), i] = col
            col = polyfp.mulmod(col, yp, split, p)
    while len(current) > 2:
        m = np.zeros((t, d), dtype=np.int64)
        m[1] = [rng.randrange(p) for _ in range(d)]
        w = m.copy()
        for _ in range(d - 1):
            m = py @ m @ k.frob.T % p
            w = (w + m) % p
        w = _rem(w, current, k)
        if len(w) == 0:
            continue
        for c in range(p):
            shifted = w.copy()
            shifted[0, 0] = (shifted[0, 0] - c) % p
            g = _gcd(current, shifted, k)
            if 1 < len(g) < len(current):
                current = g
                break
    root = FieldElement(field, polyfp.normalize((-current[0]).tolist(), p))
    value = field.zero()
    for c in reversed(f):
        value = value * root + c
    if value:
        raise AssertionError("root finder returned a non-root")
    return root
