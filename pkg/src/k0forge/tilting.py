"""Semisimplified tilting modules of quantum sl_2 at an l-th root of unity in characteristic p.

The simple objects are T(0), ..., T(l-2) with truncated Clebsch-Gordan
fusion.  Quantum dimensions live in an explicit model GF(p^m), m = ord_l(p),
of the algebraic closure, with q the least primitive l-th root of unity there.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np

from . import linalg, polyfp
from .arith import multiplicative_order
from .cyclotomic import (
    CyclotomicElement,
    RealCyclotomicElement,
    check_unramified,
    real_minimal_polynomial,
    reduce_mod_p,
)
from .errors import VerificationError
from .finite_field import FieldElement, FiniteField, conway_style_field


@dataclass(frozen=True)
class TiltingLabel:
    v: int
    ell: int
    p: int

    @property
    def survives(self) -> bool:
        """Whether T(v) has nonzero categorical dimension."""
        return 0 <= self.v <= self.ell - 2


@dataclass(frozen=True)
class FusionRing:
    labels: tuple[str, ...]
    unit: int
    N: tuple
    dual: tuple[int, ...]
    dims: tuple[FieldElement, ...] = ()
    dim_field: FiniteField | None = None
    level: int | None = None

    @property
    def rank(self) -> int:
        return len(self.labels)

    def index(self, label: str) -> int:
        return self.labels.index(label)

    def fuse(self, a: str | int, b: str | int) -> dict[str, int]:
        i = a if isinstance(a, int) else self.index(a)
        j = b if isinstance(b, int) else self.index(b)
        return {self.labels[k]: n for k, n in enumerate(self.N[i][j]) if n}

    def tensor(self) -> np.ndarray:
        return np.array(self.N, dtype=np.int64).reshape(self.rank, self.rank, self.rank)

    def element(self, coeffs) -> FusionElement:
        return FusionElement(self, tuple(int(c) for c in coeffs))

    def basis_element(self, label: str | int) -> FusionElement:
        i = label if isinstance(label, int) else self.index(label)
        return self.element(1 if k == i else 0 for k in range(self.rank))

    def validate(self) -> None:
        """Check nonnegativity, unit, commutativity, associativity, duality and the dimension character."""
        r = self.rank
        n = self.tensor()
        if (n < 0).any():
            raise VerificationError("structure constants must be nonnegative")
        if not (n[self.unit] == np.eye(r, dtype=np.int64)).all():
            raise VerificationError("unit law fails")
        if not (n == n.transpose(1, 0, 2)).all():
            raise VerificationError("fusion is not commutative")
        left = np.einsum("ijm,mkn->ijkn", n, n)
        right = np.einsum("jkm,imn->ijkn", n, n)
        if not (left == right).all():
            raise VerificationError("fusion is not associative")
        if sorted(self.dual) != list(range(r)) or any(self.dual[self.dual[i]] != i for i in range(r)):
            raise VerificationError("dual is not an involution")
        for i in range(r):
            if n[i, self.dual[i], self.unit] != 1:
                raise VerificationError(f"{self.labels[i]} is not rigid with the stated dual")
        if self.dims:
            for i in range(r):
                for j in range(i, r):
                    rhs = self.dim_field.zero()
                    for k in np.nonzero(n[i, j])[0]:
                        rhs = rhs + int(n[i, j, k]) * self.dims[k]
                    if self.dims[i] * self.dims[j] != rhs:
                        raise VerificationError(
                            f"dimension character fails on {self.labels[i]} x {self.labels[j]}"
                        )

    def to_json(self) -> dict:
        out = {
            "labels": list(self.labels),
            "unit": self.unit,
            "N": [[list(row) for row in mat] for mat in self.N],
            "dual": list(self.dual),
            "dims": [d.to_json() for d in self.dims],
        }
        if self.dim_field is not None:
            out["field"] = self.dim_field.to_json()
        if self.level is not None:
            out["ell"] = self.level
        return out

    @classmethod
    def from_json(cls, data: dict) -> FusionRing:
        fld = None
        dims: tuple = ()
        if data.get("field"):
            fld = FiniteField(int(data["field"]["p"]), tuple(data["field"]["modulus"]))
            dims = tuple(fld(tuple(d)) for d in data.get("dims", []))
        return cls(
            labels=tuple(data["labels"]),
            unit=int(data["unit"]),
            N=tuple(tuple(tuple(int(c) for c in row) for row in mat) for mat in data["N"]),
            dual=tuple(int(d) for d in data["dual"]),
            dims=dims,
            dim_field=fld,
            level=data.get("ell"),
        )


@dataclass(frozen=True)
class FusionElement:
    """Element of K_0 of a fusion ring, as integer coordinates in the simple basis."""

    ring: FusionRing = field(repr=False)
    coeffs: tuple[int, ...]

    def _coerce(self, other):
        if isinstance(other, FusionElement):
            return other
        if isinstance(other, int):
            c = [0] * self.ring.rank
            c[self.ring.unit] = other
            return FusionElement(self.ring, tuple(c))
        return None

    def __add__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return FusionElement(self.ring, tuple(a + b for a, b in zip(self.coeffs, o.coeffs)))

    __radd__ = __add__

    def __neg__(self):
        return FusionElement(self.ring, tuple(-a for a in self.coeffs))

    def __sub__(self, other):
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        r = self.ring.rank
        out = [0] * r
        for i, a in enumerate(self.coeffs):
            if a:
                for j, b in enumerate(o.coeffs):
                    if b:
                        for k, n in enumerate(self.ring.N[i][j]):
                            if n:
                                out[k] += a * b * n
        return FusionElement(self.ring, tuple(out))

    __rmul__ = __mul__

    def __pow__(self, e: int):
        out = self._coerce(1)
        for _ in range(e):
            out = out * self
        return out

    def __eq__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return self.coeffs == o.coeffs

    def __hash__(self):
        return hash(self.coeffs)

    def __bool__(self):
        return any(self.coeffs)


# ---------------------------------------------------------------------------
# Quantum dimensions


@dataclass(frozen=True)
class QuantumModel:
    p: int
    ell: int
    field: FiniteField
    q: FieldElement


def least_primitive_root_of_unity(fld: FiniteField, ell: int) -> FieldElement:
    """Least (by coefficient encoding) element of multiplicative order exactly ell."""
    cofactor, rem = divmod(fld.order - 1, ell)
    if rem:
        raise ValueError(f"GF({fld.p}^{fld.degree}) has no primitive {ell}-th roots of unity")
    for code in range(2, fld.order):
        z = fld.from_int(code) ** cofactor
        if z != 1:
            break
    # the primitive roots are exactly the powers z^k, 0 < k < ell
    return min((z**k for k in range(1, ell)), key=FieldElement.encode)


@lru_cache(maxsize=None)
def quantum_model(p: int, ell: int) -> QuantumModel:
    check_unramified(p, ell)
    fld = conway_style_field(p, multiplicative_order(p, ell))
    return QuantumModel(p, ell, fld, least_primitive_root_of_unity(fld, ell))


def cyclotomic_quantum_integer(n: int, ell: int) -> CyclotomicElement:
    """[n]_zeta = zeta^(n-1) + zeta^(n-3) + ... + zeta^(1-n) in Z[zeta_l]."""
    total = CyclotomicElement.from_int(ell, 0)
    for j in range(n):
        total = total + CyclotomicElement.zeta_power(ell, n - 1 - 2 * j)
    return total


@lru_cache(maxsize=None)
def _q_powers(p: int, ell: int) -> tuple[FieldElement, ...]:
    model = quantum_model(p, ell)
    powers = [model.field.one()]
    for _ in range(ell - 1):
        powers.append(powers[-1] * model.q)
    return tuple(powers)


def quantum_dimension(v: int | TiltingLabel, p: int | None = None, ell: int | None = None) -> FieldElement:
    """Categorical dimension [v+1]_q of T(v) in the model of the algebraic closure."""
    if isinstance(v, TiltingLabel):
        v, p, ell = v.v, v.p, v.ell
    if v < 0:
        raise ValueError("highest weight must be nonnegative")
    powers = _q_powers(p, ell)
    total = powers[0] * 0
    for j in range(v + 1):
        total = total + powers[(v - 2 * j) % ell]
    return total


# ---------------------------------------------------------------------------
# Fusion rings


def truncated_cg(i: int, j: int, k: int, ell: int) -> int:
    """Multiplicity of T(k) in T(i) (x) T(j) in the semisimplification."""
    if abs(i - j) <= k <= min(i + j, 2 * (ell - 2) - i - j) and (k - i - j) % 2 == 0:
        return 1
    return 0


@lru_cache(maxsize=None)
def build_semisimple_fusion(p: int, ell: int) -> FusionRing:
    """Fusion ring of the semisimplified tilting category, simples T(0..l-2)."""
    check_unramified(p, ell)
    r = ell - 1
    N = tuple(tuple(tuple(truncated_cg(i, j, k, ell) for k in range(r)) for j in range(r)) for i in range(r))
    model = quantum_model(p, ell)
    dims = tuple(quantum_dimension(v, p, ell) for v in range(r))
    ring = FusionRing(
        labels=tuple(f"T{v}" for v in range(r)),
        unit=0,
        N=N,
        dual=tuple(range(r)),
        dims=dims,
        dim_field=model.field,
        level=ell,
    )
    ring.validate()
    return ring


def even_subring(ring: FusionRing) -> FusionRing:
    """Restriction to T(0), T(2), ..., checking closure of the even part."""
    idx = [i for i, lab in enumerate(ring.labels) if int(lab[1:]) % 2 == 0]
    odd = [i for i in range(ring.rank) if i not in idx]
    for i in idx:
        for j in idx:
            if any(ring.N[i][j][k] for k in odd):
                raise VerificationError(f"even part not closed: {ring.labels[i]} x {ring.labels[j]}")
    pos = {old: new for new, old in enumerate(idx)}
    if any(ring.dual[i] not in pos for i in idx):
        raise VerificationError("even part not closed under duals")
    sub = FusionRing(
        labels=tuple(ring.labels[i] for i in idx),
        unit=pos[ring.unit],
        N=tuple(tuple(tuple(ring.N[i][j][k] for k in idx) for j in idx) for i in idx),
        dual=tuple(pos[ring.dual[i]] for i in idx),
        dims=tuple(ring.dims[i] for i in idx) if ring.dims else (),
        dim_field=ring.dim_field,
        level=ring.level,
    )
    sub.validate()
    return sub


# ---------------------------------------------------------------------------
# K_0 isomorphism with Z[zeta + zeta^-1]


@dataclass(frozen=True)
class K0IsoCertificate:
    level: int
    labels: tuple[str, ...]
    images: tuple[CyclotomicElement, ...]
    real_coordinates: tuple[tuple[int, ...], ...]
    homomorphism: bool
    rank: int
    determinant: int
    generator_preimage: tuple[int, ...]

    @property
    def ok(self) -> bool:
        return self.homomorphism and self.rank == len(self.labels) and abs(self.determinant) == 1

    def to_json(self) -> dict:
        return {
            "ell": self.level,
            "labels": list(self.labels),
            "images": [x.to_json() for x in self.images],
            "real_coordinates": [list(r) for r in self.real_coordinates],
            "homomorphism": self.homomorphism,
            "rank": self.rank,
            "determinant": self.determinant,
            "generator_preimage": list(self.generator_preimage),
            "ok": self.ok,
        }


def label_weight(label: str) -> int:
    return int(label[1:])


def k0_isomorphism_certificate(even: FusionRing) -> K0IsoCertificate:
    """Certify [T(i)] -> [i+1]_zeta is a ring isomorphism onto Z[zeta + zeta^-1]."""
    ell = even.level
    if ell is None:
        raise ValueError("ring does not record its level")
    images = tuple(cyclotomic_quantum_integer(label_weight(lab) + 1, ell) for lab in even.labels)
    r = even.rank
    for i in range(r):
        for j in range(i, r):
            rhs = CyclotomicElement.from_int(ell, 0)
            for k, n in enumerate(even.N[i][j]):
                if n:
                    rhs = rhs + n * images[k]
            if images[i] * images[j] != rhs:
                raise VerificationError(
                    f"homomorphism law fails on {even.labels[i]} x {even.labels[j]} at l={ell}"
                )
    coords = tuple(RealCyclotomicElement.project(x).coeffs for x in images)
    rank = linalg.rational_rank(coords)
    if rank != r:
        raise VerificationError(f"images are not Z-independent at l={ell}")
    det = linalg.integer_determinant(coords)
    if abs(det) != 1:
        raise VerificationError(f"change of basis has determinant {det} at l={ell}")
    # c = zeta + zeta^-1 written in the basis [T(i)]; transpose: rows of coords are images
    c = RealCyclotomicElement.generator(ell).coeffs
    transposed = [[coords[j][i] for j in range(r)] for i in range(r)]
    preimage = tuple(linalg.integer_solve_unimodular(transposed, c))
    return K0IsoCertificate(ell, even.labels, images, coords, True, rank, det, preimage)


# ---------------------------------------------------------------------------
# Dimension field


@dataclass(frozen=True)
class DimensionField:
    p: int
    ell: int
    model_degree: int
    degree: int
    label_degrees: tuple[int, ...]
    n_star: int

    @property
    def within_bound(self) -> bool:
        """All dimensions lie in GF(p^n*), n* least with l^2 | p^n* - 1."""
        return self.n_star % self.degree == 0

    def to_json(self) -> dict:
        return {
            "p": self.p,
            "ell": self.ell,
            "model_degree": self.model_degree,
            "degree": self.degree,
            "label_degrees": list(self.label_degrees),
            "n_star": self.n_star,
            "within_bound": self.within_bound,
        }


def dimension_field(p: int, ell: int) -> DimensionField:
    """Smallest subfield of the model containing every quantum dimension [i+1]_q."""
    model = quantum_model(p, ell)
    degs = tuple(quantum_dimension(v, p, ell).subfield_degree() for v in range(ell - 1))
    e = 1
    for d in degs:
        e = e * d // _gcd(e, d)
    return DimensionField(p, ell, model.field.degree, e, degs, multiplicative_order(p, ell * ell))


def _gcd(a: int, b: int) -> int:
    while b:
        a, b = b, a % b
    return a


# ---------------------------------------------------------------------------
# Mod-p cross-check against cyclotomic reduction


@dataclass(frozen=True)
class ModPCrossCheck:
    p: int
    ell: int
    pairs_checked: int
    residue_rank: int
    field_degrees_cyclotomic: tuple[int, ...]

    def to_json(self) -> dict:
        return {
            "p": self.p,
            "ell": self.ell,
            "pairs_checked": self.pairs_checked,
            "residue_rank": self.residue_rank,
            "field_degrees": list(self.field_degrees_cyclotomic),
        }


def mod_p_cross_check(even: FusionRing, p: int) -> ModPCrossCheck:
    """Compare N mod p with multiplication of reduced images in Z[zeta]/(p).

    The reduced images must also be GF(p)-independent, so that K_0/(p) maps
    isomorphically onto Z[zeta + zeta^-1]/(p).
    """
    ell = even.level
    cert = k0_isomorphism_certificate(even)
    reduced = [reduce_mod_p(x, p) for x in cert.images]
    r = even.rank
    checked = 0
    for i in range(r):
        for j in range(r):
            lhs = tuple(a * b for a, b in zip(reduced[i], reduced[j]))
            rhs = tuple(
                sum((even.N[i][j][k] % p * reduced[k][c] for k in range(r)), reduced[0][c] * 0)
                for c in range(len(reduced[0]))
            )
            if lhs != rhs:
                raise VerificationError(f"mod {p} product mismatch on {even.labels[i]} x {even.labels[j]}")
            checked += 1
    flat = []
    for coords in reduced:
        row = []
        for elem in coords:
            d = elem.field.degree
            row += list(elem.coeffs) + [0] * (d - len(elem.coeffs))
        flat.append(row)
    residue_rank = linalg.rank(linalg.as_matrix(flat, p), p)
    if residue_rank != r:
        raise VerificationError(f"reduced images are dependent mod {p}")
    minpoly = polyfp.normalize(real_minimal_polynomial(ell), p)
    degrees = tuple(sorted(polyfp.degree(g) for g in polyfp.factor_squarefree(minpoly, p)))
    return ModPCrossCheck(p, ell, checked, residue_rank, degrees)
