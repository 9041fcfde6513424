"""Exact arithmetic in Z[zeta_l] and its real subring Z[zeta_l + zeta_l^-1].

Elements of Z[zeta] are integer vectors in the power basis 1, zeta, ...,
zeta^(l-2), reduced modulo the l-th cyclotomic polynomial.  Elements of the
real subring are integer vectors in the power basis of c = zeta + zeta^-1.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

from . import polyfp
from .arith import is_prime_trial, multiplicative_order
from .finite_field import FieldElement, FiniteField, conway_style_field
from .polyfp import Poly


def check_level(ell: int) -> int:
    if not isinstance(ell, int) or ell <= 2 or not is_prime_trial(ell):
        raise ValueError(f"level must be an odd prime, got {ell!r}")
    return ell


def check_unramified(p: int, ell: int) -> None:
    check_level(ell)
    if not isinstance(p, int) or not is_prime_trial(p):
        raise ValueError(f"p={p!r} is not prime")
    if p == ell:
        raise ValueError(f"ramified prime p = l = {ell} is not supported")


def _fold(vec: list[int], ell: int) -> tuple[int, ...]:
    """Reduce a vector over Z[x]/(x^l - 1) to the power basis mod Phi_l."""
    top = vec[ell - 1]
    return tuple(c - top for c in vec[: ell - 1])


@dataclass(frozen=True)
class CyclotomicElement:
    level: int
    coeffs: tuple[int, ...]

    def __post_init__(self):
        if len(self.coeffs) != self.level - 1:
            raise ValueError(f"expected {self.level - 1} coefficients, got {len(self.coeffs)}")

    @classmethod
    def from_int(cls, ell: int, n: int) -> CyclotomicElement:
        return cls(ell, (n,) + (0,) * (ell - 2))

    @classmethod
    def zeta_power(cls, ell: int, k: int) -> CyclotomicElement:
        vec = [0] * ell
        vec[k % ell] = 1
        return cls(ell, _fold(vec, ell))

    @classmethod
    def zeta(cls, ell: int) -> CyclotomicElement:
        return cls.zeta_power(check_level(ell), 1)

    def _coerce(self, other) -> CyclotomicElement | None:
        if isinstance(other, CyclotomicElement):
            if other.level != self.level:
                raise ValueError("levels differ")
            return other
        if isinstance(other, int):
            return CyclotomicElement.from_int(self.level, other)
        if isinstance(other, RealCyclotomicElement):
            return other.embed()
        return None

    def __add__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return CyclotomicElement(self.level, tuple(a + b for a, b in zip(self.coeffs, o.coeffs)))

    __radd__ = __add__

    def __neg__(self):
        return CyclotomicElement(self.level, tuple(-a for a in self.coeffs))

    def __sub__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return CyclotomicElement(self.level, tuple(a - b for a, b in zip(self.coeffs, o.coeffs)))

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        ell = self.level
        vec = [0] * ell
        for i, a in enumerate(self.coeffs):
            if a:
                for j, b in enumerate(o.coeffs):
                    if b:
                        vec[(i + j) % ell] += a * b
        return CyclotomicElement(ell, _fold(vec, ell))

    __rmul__ = __mul__

    def __pow__(self, e: int):
        if e < 0:
            raise ValueError("negative powers are not supported")
        result = CyclotomicElement.from_int(self.level, 1)
        base = self
        while e:
            if e & 1:
                result = result * base
            base = base * base
            e >>= 1
        return result

    def __eq__(self, other):
        if isinstance(other, (int, RealCyclotomicElement)):
            other = self._coerce(other)
        if not isinstance(other, CyclotomicElement):
            return NotImplemented
        return self.level == other.level and self.coeffs == other.coeffs

    def __hash__(self):
        return hash((self.level, self.coeffs))

    def __bool__(self):
        return any(self.coeffs)

    def cyclic_vector(self) -> list[int]:
        """Length-l representative over Z[x]/(x^l - 1), last entry zero."""
        return list(self.coeffs) + [0]

    def galois(self, k: int) -> CyclotomicElement:
        """Image under the automorphism zeta -> zeta^k."""
        ell = self.level
        if k % ell == 0:
            raise ValueError("k must be a unit mod l")
        vec = [0] * ell
        for i, a in enumerate(self.cyclic_vector()):
            vec[(i * k) % ell] += a
        return CyclotomicElement(ell, _fold(vec, ell))

    def conjugate(self) -> CyclotomicElement:
        return self.galois(-1)

    def is_real(self) -> bool:
        return self.conjugate() == self

    def to_json(self) -> dict:
        return {"level": self.level, "coeffs": list(self.coeffs)}

    @classmethod
    def from_json(cls, data: dict) -> CyclotomicElement:
        return cls(check_level(int(data["level"])), tuple(int(c) for c in data["coeffs"]))


def _int_poly_mul(a, b):
    out = [0] * (len(a) + len(b) - 1)
    for i, x in enumerate(a):
        for j, y in enumerate(b):
            out[i + j] += x * y
    return out


@lru_cache(maxsize=None)
def _chebyshev_sums(ell: int) -> tuple[tuple[int, ...], ...]:
    """S_k with S_k(zeta + zeta^-1) = zeta^k + zeta^-k, for k = 0..(l-1)/2."""
    m = (ell - 1) // 2
    s = [(2,), (0, 1)]
    for _ in range(2, m + 1):
        nxt = [0] + list(s[-1])
        for i, c in enumerate(s[-2]):
            nxt[i] -= c
        s.append(tuple(nxt))
    return tuple(s[: m + 1])


@lru_cache(maxsize=None)
def real_minimal_polynomial(ell: int) -> tuple[int, ...]:
    """Minimal polynomial of zeta_l + zeta_l^-1 over Z, constant term first.

    Phi_l(zeta) / zeta^m = 1 + sum_{k=1}^m (zeta^k + zeta^-k), m = (l-1)/2.
    """
    check_level(ell)
    s = _chebyshev_sums(ell)
    m = (ell - 1) // 2
    out = [0] * (m + 1)
    out[0] = 1
    for k in range(1, m + 1):
        for i, c in enumerate(s[k]):
            out[i] += c
    return tuple(out)


def _reduce_real(poly: list[int], ell: int) -> tuple[int, ...]:
    """Remainder of an integer polynomial modulo the (monic) real minimal polynomial."""
    f = real_minimal_polynomial(ell)
    m = len(f) - 1
    poly = list(poly) + [0] * max(0, m - len(poly))
    for i in range(len(poly) - 1, m - 1, -1):
        c = poly[i]
        if c:
            for j in range(m + 1):
                poly[i - m + j] -= c * f[j]
    return tuple(poly[:m])


@dataclass(frozen=True)
class RealCyclotomicElement:
    level: int
    coeffs: tuple[int, ...]

    def __post_init__(self):
        if len(self.coeffs) != (self.level - 1) // 2:
            raise ValueError(f"expected {(self.level - 1) // 2} coefficients")

    @classmethod
    def from_int(cls, ell: int, n: int) -> RealCyclotomicElement:
        return cls(ell, (n,) + (0,) * ((ell - 1) // 2 - 1))

    @classmethod
    def generator(cls, ell: int) -> RealCyclotomicElement:
        """c = zeta + zeta^-1 (equal to -1 when l = 3)."""
        check_level(ell)
        if ell == 3:
            return cls(3, (-1,))
        return cls(ell, (0, 1) + (0,) * ((ell - 1) // 2 - 2))

    def _coerce(self, other):
        if isinstance(other, RealCyclotomicElement):
            if other.level != self.level:
                raise ValueError("levels differ")
            return other
        if isinstance(other, int):
            return RealCyclotomicElement.from_int(self.level, other)
        return None

    def __add__(self, other):
        if isinstance(other, CyclotomicElement):
            return self.embed() + other
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return RealCyclotomicElement(self.level, tuple(a + b for a, b in zip(self.coeffs, o.coeffs)))

    __radd__ = __add__

    def __neg__(self):
        return RealCyclotomicElement(self.level, tuple(-a for a in self.coeffs))

    def __sub__(self, other):
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if isinstance(other, CyclotomicElement):
            return self.embed() * other
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        prod = _int_poly_mul(self.coeffs, o.coeffs)
        return RealCyclotomicElement(self.level, _reduce_real(prod, self.level))

    __rmul__ = __mul__

    def __pow__(self, e: int):
        result = RealCyclotomicElement.from_int(self.level, 1)
        for _ in range(e):
            result = result * self
        return result

    def __eq__(self, other):
        if isinstance(other, CyclotomicElement):
            return self.embed() == other
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return self.level == o.level and self.coeffs == o.coeffs

    def __hash__(self):
        return hash((self.level, self.coeffs, "real"))

    def __bool__(self):
        return any(self.coeffs)

    def embed(self) -> CyclotomicElement:
        ell = self.level
        c = CyclotomicElement.zeta_power(ell, 1) + CyclotomicElement.zeta_power(ell, -1)
        acc = CyclotomicElement.from_int(ell, 0)
        for a in reversed(self.coeffs):
            acc = acc * c + a
        return acc

    @classmethod
    def project(cls, x: CyclotomicElement) -> RealCyclotomicElement:
        """Inverse of embed on the real subring; rejects non-real input."""
        ell = x.level
        v = x.cyclic_vector()
        if any(v[k] != v[ell - k] for k in range(1, ell)):
            raise ValueError("element is not fixed by complex conjugation")
        # x = v_0 + sum_k v_k (zeta^k + zeta^-k) = v_0 + sum_k v_k S_k(c)
        s = _chebyshev_sums(ell)
        poly = [v[0]] + [0] * (len(s) - 1)
        for k in range(1, len(s)):
            for i, cf in enumerate(s[k]):
                poly[i] += v[k] * cf
        return cls(ell, _reduce_real(poly, ell))

    def to_json(self) -> dict:
        return {"level": self.level, "real": True, "coeffs": list(self.coeffs)}


# ---------------------------------------------------------------------------
# Reduction modulo p


@lru_cache(maxsize=None)
def cyclotomic_polynomial_mod(ell: int, p: int) -> Poly:
    return polyfp.normalize([1] * ell, p)


@dataclass(frozen=True)
class ResidueFieldSplitting:
    p: int
    ell: int
    degree: int
    factor_count: int
    irreducible_factors: tuple[Poly, ...]

    def fields(self) -> tuple[FiniteField, ...]:
        return tuple(FiniteField(self.p, g) for g in self.irreducible_factors)

    def to_json(self) -> dict:
        return {
            "p": self.p,
            "ell": self.ell,
            "degree": self.degree,
            "factor_count": self.factor_count,
            "factors": [list(g) for g in self.irreducible_factors],
        }


@lru_cache(maxsize=None)
def splitting_data(p: int, ell: int) -> ResidueFieldSplitting:
    """Factor Phi_l mod p into its (l-1)/d irreducible factors of degree d = ord_l(p)."""
    check_unramified(p, ell)
    d = multiplicative_order(p, ell)
    phi = cyclotomic_polynomial_mod(ell, p)
    factors = tuple(polyfp.factor_squarefree(phi, p))
    if polyfp.product(factors, p) != phi:
        raise AssertionError("factor product differs from Phi_l mod p")
    for g in factors:
        if polyfp.degree(g) != d or not polyfp.is_irreducible(g, p):
            raise AssertionError(f"bad factor {g} of Phi_{ell} mod {p}")
    return ResidueFieldSplitting(p, ell, d, (ell - 1) // d, factors)


def reduce_mod_p(x: CyclotomicElement | RealCyclotomicElement, p: int) -> tuple[FieldElement, ...]:
    """Image of x in Z[zeta]/(p), one coordinate per residue field."""
    if isinstance(x, RealCyclotomicElement):
        x = x.embed()
    split = splitting_data(p, x.level)
    return tuple(field(x.coeffs) for field in split.fields())


def residue_field_factor(p: int, ell: int, degree: int) -> Poly:
    """One irreducible factor of Phi_l mod p, without factoring Phi_l.

    The factor is the minimal polynomial of an element of multiplicative
    order l inside GF(p^degree); this works for l far beyond the range where
    Phi_l itself could be written down.  ``degree`` must equal ord_l(p).
    """
    if p == ell:
        raise ValueError("ramified prime")
    if (p**degree - 1) % ell:
        raise ValueError(f"l={ell} does not divide p^{degree} - 1")
    field = conway_style_field(p, degree)
    cofactor = (field.order - 1) // ell
    for code in range(2, field.order):
        z = field.from_int(code) ** cofactor
        if z != 1:
            break
    g = z.minimal_polynomial()
    if polyfp.degree(g) != degree:
        raise ValueError(f"ord_l(p) is not {degree}")
    # g | x^l - 1 and g != x - 1, so g divides Phi_l
    x = (0, 1)
    if polyfp.powmod(x, ell, g, p) != (1,):
        raise AssertionError("factor does not divide x^l - 1")
    return g
