"""Finite-dimensional GF(p)[C_p]-modules and the stable module category at desk scale.

A module is recorded by the Jordan type of the generator sigma of C_p: a
multiset of block sizes in 1..p, J_p being the free (projective) module.
Homomorphisms are dense matrices over GF(p) commuting with sigma.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np

from . import linalg, polyfp
from .arith import require_prime


@dataclass(frozen=True)
class JordanModule:
    p: int
    blocks: tuple[int, ...]

    def __post_init__(self):
        require_prime(self.p, "p")
        blocks = tuple(sorted(int(b) for b in self.blocks))
        if any(b < 1 or b > self.p for b in blocks):
            raise ValueError(f"block sizes must lie in 1..{self.p}: {blocks}")
        object.__setattr__(self, "blocks", blocks)

    @classmethod
    def block(cls, p: int, k: int) -> JordanModule:
        return cls(p, (k,))

    @property
    def dimension(self) -> int:
        return sum(self.blocks)

    def __add__(self, other: JordanModule) -> JordanModule:
        _same_p(self, other)
        return JordanModule(self.p, self.blocks + other.blocks)

    def __mul__(self, other: JordanModule) -> JordanModule:
        return tensor(self, other)

    def projective_free_part(self) -> JordanModule:
        return JordanModule(self.p, tuple(b for b in self.blocks if b < self.p))

    def sigma(self) -> np.ndarray:
        """Matrix of the generator: block-diagonal unipotent Jordan blocks."""
        n = self.dimension
        m = np.eye(n, dtype=np.int64)
        pos = 0
        for b in self.blocks:
            for i in range(b - 1):
                m[pos + i, pos + i + 1] = 1
            pos += b
        return m

    def dual(self) -> JordanModule:
        """Jordan type of the contragredient action sigma -> (sigma^-1)^T."""
        s = self.sigma()
        inv = linalg.matpow(s, self.p - 1, self.p)  # sigma^p = 1
        return JordanModule(self.p, jordan_type(inv.T, self.p))

    def to_json(self) -> dict:
        return {"p": self.p, "blocks": list(self.blocks)}

    @classmethod
    def from_json(cls, data: dict) -> JordanModule:
        return cls(int(data["p"]), tuple(int(b) for b in data["blocks"]))


def _same_p(a: JordanModule, b: JordanModule) -> None:
    if a.p != b.p:
        raise ValueError(f"characteristics differ: {a.p} vs {b.p}")


def jordan_type(u: np.ndarray, p: int) -> tuple[int, ...]:
    """Block sizes of a unipotent matrix over GF(p), from ranks of powers of u - 1."""
    n = u.shape[0]
    nil = (u - np.eye(n, dtype=u.dtype)) % p
    ranks = [n]
    power = np.eye(n, dtype=u.dtype)
    while ranks[-1] > 0:
        power = linalg.matmul(power, nil, p)
        r = linalg.rank(power, p)
        if r == ranks[-1]:
            raise ValueError("matrix is not unipotent")
        ranks.append(r)
    # blocks of size >= k: ranks[k-1] - ranks[k]
    at_least = [ranks[k - 1] - ranks[k] for k in range(1, len(ranks))] + [0]
    out: list[int] = []
    for k in range(1, len(at_least)):
        out += [k] * (at_least[k - 1] - at_least[k])
    return tuple(sorted(out))


@lru_cache(maxsize=None)
def _block_tensor(p: int, m: int, n: int) -> tuple[int, ...]:
    """J_m (x) J_n for 1 <= m <= n <= p."""
    if m > n:
        m, n = n, m
    if m + n <= p:
        return tuple(n - m + 2 * i - 1 for i in range(1, m + 1))
    return (p,) * (m + n - p) + tuple(n - m + 2 * i - 1 for i in range(1, p - n + 1))


def tensor(a: JordanModule, b: JordanModule) -> JordanModule:
    """Jordan type of the diagonal action on a (x) b (closed-form rule)."""
    _same_p(a, b)
    out: list[int] = []
    for x in a.blocks:
        for y in b.blocks:
            out += _block_tensor(a.p, x, y)
    return JordanModule(a.p, tuple(out))


def tensor_via_matrices(a: JordanModule, b: JordanModule) -> JordanModule:
    """Jordan type of kron(sigma_a, sigma_b), computed from explicit matrices."""
    _same_p(a, b)
    return JordanModule(a.p, jordan_type(np.kron(a.sigma(), b.sigma()) % a.p, a.p))


@dataclass(frozen=True)
class StableK0Class:
    p: int
    value: int

    def __add__(self, other: StableK0Class) -> StableK0Class:
        return StableK0Class(self.p, (self.value + other.value) % self.p)

    def __mul__(self, other: StableK0Class) -> StableK0Class:
        return StableK0Class(self.p, self.value * other.value % self.p)


def stable_k0(m: JordanModule) -> StableK0Class:
    """Class in K_0(StMod) = GF(p): dimension mod p, so J_p maps to 0."""
    return StableK0Class(m.p, m.dimension % m.p)


# ---------------------------------------------------------------------------
# Endomorphisms, traces and projective factorization


def _check_matrix(m: JordanModule, f) -> np.ndarray:
    f = linalg.as_matrix(f, m.p)
    if f.shape != (m.dimension, m.dimension):
        raise ValueError(f"endomorphism must be {m.dimension}x{m.dimension}")
    return f


def commutes(m: JordanModule, f: np.ndarray) -> bool:
    s = m.sigma()
    return not ((s @ f - f @ s) % m.p).any()


def categorical_trace(m: JordanModule, f) -> int:
    """Trace of a module endomorphism, reduced mod p."""
    f = _check_matrix(m, f)
    if not commutes(m, f):
        raise ValueError("endomorphism does not commute with the group action")
    return int(np.trace(f)) % m.p


@lru_cache(maxsize=None)
def hom_basis(src: JordanModule, dst: JordanModule) -> np.ndarray:
    """Basis of Hom_{GF(p)C_p}(src, dst) as an array of shape (k, dim dst, dim src)."""
    _same_p(src, dst)
    p = src.p
    n, k = dst.dimension, src.dimension
    s_src, s_dst = src.sigma(), dst.sigma()
    # vec(S_dst X - X S_src) = (I (x) S_dst - S_src^T (x) I) vec(X), column-major vec
    op = (np.kron(np.eye(k, dtype=np.int64), s_dst) - np.kron(s_src.T, np.eye(n, dtype=np.int64))) % p
    null = linalg.nullspace(op, p)
    return np.array([v.reshape(k, n).T for v in null], dtype=np.int64).reshape(len(null), n, k)


def norm_map(src: JordanModule, dst: JordanModule, t: np.ndarray) -> np.ndarray:
    """sum_i sigma^i t sigma^-i, the relative trace from the trivial subgroup."""
    p = src.p
    s_src_inv = linalg.matpow(src.sigma(), p - 1, p)
    s_dst = dst.sigma()
    out = np.zeros_like(t)
    left = np.eye(dst.dimension, dtype=np.int64)
    right = np.eye(src.dimension, dtype=np.int64)
    for _ in range(p):
        out = (out + left @ t @ right) % p
        left = linalg.matmul(left, s_dst, p)
        right = linalg.matmul(right, s_src_inv, p)
    return out


@lru_cache(maxsize=None)
def _projective_maps(src: JordanModule, dst: JordanModule) -> linalg.RowSpace:
    """Span of maps src -> dst factoring through a projective (image of the norm map)."""
    n, k = dst.dimension, src.dimension
    images = []
    for i in range(n):
        for j in range(k):
            t = np.zeros((n, k), dtype=np.int64)
            t[i, j] = 1
            images.append(norm_map(src, dst, t).reshape(-1))
    return linalg.RowSpace(np.array(images, dtype=np.int64).reshape(n * k, n * k), src.p)


def factors_through_projective(src: JordanModule, dst: JordanModule, h) -> np.ndarray | None:
    """A linear map t with norm_map(t) == h, or None if h does not factor through a projective.

    For GF(p)[C_p], h factors through a projective exactly when it lies in the
    image of the norm map.
    """
    h = linalg.as_matrix(h, src.p)
    n, k = dst.dimension, src.dimension
    if n * k == 0:
        return np.zeros((n, k), dtype=np.int64)
    if not _projective_maps(src, dst).contains(h.reshape(-1)):
        return None
    # solve for t: columns of the norm operator applied to elementary matrices
    cols = []
    for i in range(n):
        for j in range(k):
            t = np.zeros((n, k), dtype=np.int64)
            t[i, j] = 1
            cols.append(norm_map(src, dst, t).reshape(-1))
    a = np.array(cols, dtype=np.int64).T
    x = linalg.solve(a, h.reshape(-1), src.p)
    return None if x is None else np.array(x, dtype=np.int64).reshape(n, k)


@dataclass(frozen=True)
class ProjectiveFactorization:
    """h = out_map @ in_map with the middle object a free module GF(p)[C_p]^rank."""

    rank: int
    in_map: np.ndarray
    out_map: np.ndarray


def explicit_projective_factorization(src: JordanModule, dst: JordanModule, t: np.ndarray) -> ProjectiveFactorization:
    """Factor norm_map(t) through the induced module GF(p)C_p (x) dst, which is free.

    in_map: m -> sum_i g^i (x) t(g^-i m); out_map: g^i (x) n -> g^i n.
    Coordinates on the induced module are indexed by (i, basis vector of dst).
    """
    p = src.p
    n, k = dst.dimension, src.dimension
    s_src_inv = linalg.matpow(src.sigma(), p - 1, p)
    s_dst = dst.sigma()
    in_map = np.zeros((p * n, k), dtype=np.int64)
    out_map = np.zeros((n, p * n), dtype=np.int64)
    g_dst = np.eye(n, dtype=np.int64)
    g_src_inv = np.eye(k, dtype=np.int64)
    for i in range(p):
        in_map[i * n : (i + 1) * n] = (t @ g_src_inv) % p
        out_map[:, i * n : (i + 1) * n] = g_dst
        g_dst = linalg.matmul(g_dst, s_dst, p)
        g_src_inv = linalg.matmul(g_src_inv, s_src_inv, p)
    return ProjectiveFactorization(n, in_map % p, out_map % p)


def induced_sigma(p: int, n: int) -> np.ndarray:
    """Generator action on GF(p)C_p (x) V (dim V = n), permuting the p summands."""
    m = np.zeros((p * n, p * n), dtype=np.int64)
    for i in range(p):
        j = (i + 1) % p
        m[j * n : (j + 1) * n, i * n : (i + 1) * n] = np.eye(n, dtype=np.int64)
    return m


@lru_cache(maxsize=None)
def stable_endomorphism_dimension(m: JordanModule) -> int:
    return len(hom_basis(m, m)) - _projective_maps(m, m).dimension


def is_stably_nilpotent(m: JordanModule, f) -> bool:
    """Whether some power of f factors through a projective module.

    The stable endomorphism algebra has dimension D, so a nilpotent element
    of it satisfies f^D = 0 there; testing f^max(D,1) suffices.
    """
    f = _check_matrix(m, f)
    e = max(1, stable_endomorphism_dimension(m))
    power = linalg.matpow(f, e, m.p)
    if m.dimension == 0:
        return True
    return _projective_maps(m, m).contains(power.reshape(-1))


def random_endomorphism(m: JordanModule, rng: random.Random) -> np.ndarray:
    basis = hom_basis(m, m)
    coeffs = [rng.randrange(m.p) for _ in range(len(basis))]
    out = np.zeros((m.dimension, m.dimension), dtype=np.int64)
    for c, b in zip(coeffs, basis):
        out = (out + c * b) % m.p
    return out


@dataclass
class TraceZeroReport:
    p: int
    max_dimension: int
    samples: int = 0
    failures: list = field(default_factory=list)
    by_module: dict = field(default_factory=dict)

    @property
    def ok(self) -> bool:
        return not self.failures


def modules_up_to(p: int, max_dimension: int) -> list[JordanModule]:
    """All nonzero Jordan types of dimension <= max_dimension."""
    out = []

    def rec(remaining, smallest, acc):
        if acc:
            out.append(JordanModule(p, tuple(acc)))
        for b in range(smallest, min(p, remaining) + 1):
            rec(remaining - b, b, acc + [b])

    rec(max_dimension, 1, [])
    return out


def sample_trace_zero(p: int, max_dimension: int, samples: int, seed: int = 0) -> TraceZeroReport:
    """Randomized search for stably nilpotent endomorphisms with nonzero trace.

    Candidates mix three sources: random commuting endomorphisms, products
    with the central nilpotent sigma - 1, and such products shifted by a
    projective-factoring map.  Only candidates the stable-nilpotence test
    accepts are counted.
    """
    rng = random.Random(seed)
    report = TraceZeroReport(p, max_dimension)
    modules = modules_up_to(p, max_dimension)
    attempts = 0
    while report.samples < samples:
        attempts += 1
        if attempts > 50 * samples:
            raise RuntimeError("could not generate enough stably nilpotent samples")
        m = rng.choice(modules)
        f = random_endomorphism(m, rng)
        kind = rng.randrange(3)
        if kind >= 1:
            nil = (m.sigma() - np.eye(m.dimension, dtype=np.int64)) % p
            f = linalg.matmul(f, nil, p)
        if kind == 2:
            t = np.array(
                [[rng.randrange(p) for _ in range(m.dimension)] for _ in range(m.dimension)],
                dtype=np.int64,
            )
            f = (f + norm_map(m, m, t)) % p
        if not is_stably_nilpotent(m, f):
            continue
        report.samples += 1
        key = m.blocks
        report.by_module[key] = report.by_module.get(key, 0) + 1
        tr = categorical_trace(m, f)
        if tr != 0:
            report.failures.append((m, f, tr))
    return report


# ---------------------------------------------------------------------------
# Radical filtration and K_0(C)/(p)


@dataclass(frozen=True)
class FiltrationLayer:
    dimension: int
    trivial_action: bool


def radical_filtration(m: JordanModule) -> list[FiltrationLayer]:
    """Layers (sigma-1)^i M / (sigma-1)^(i+1) M, checking sigma acts trivially on each."""
    p, n = m.p, m.dimension
    nil = (m.sigma() - np.eye(n, dtype=np.int64)) % p
    spans = []
    power = np.eye(n, dtype=np.int64)
    while True:
        space = linalg.RowSpace(power.T.copy(), p)  # column space of power
        spans.append(space)
        if space.dimension == 0:
            break
        power = linalg.matmul(nil, power, p)
    layers = []
    for cur, nxt in zip(spans, spans[1:]):
        # (sigma - 1) must carry layer i into layer i+1
        trivial = all(nxt.contains(nil @ v % p) for v in cur.basis)
        layers.append(FiltrationLayer(cur.dimension - nxt.dimension, trivial))
    return layers


def _mult_matrix(structure, a, p):
    r = len(structure)
    out = np.zeros((r, r), dtype=np.int64)
    for i, ai in enumerate(a):
        if ai:
            out = (out + ai * np.array(structure[i], dtype=np.int64).T) % p
    return out


def _algebra_mul(structure, a, b, p):
    return _mult_matrix(structure, a, p) @ np.array(b, dtype=np.int64) % p


def _minimal_polynomial(structure, a, e, p):
    """Minimal polynomial of a inside the component with identity e."""
    powers = [np.array(e, dtype=np.int64) % p]
    space = linalg.RowSpace(powers[0].reshape(1, -1), p)
    while True:
        nxt = _algebra_mul(structure, a, powers[-1], p)
        if space.contains(nxt):
            mat = np.array(powers, dtype=np.int64).T
            x = linalg.solve(mat, nxt, p)
            return polyfp.normalize([-int(c) for c in x] + [1], p)
        powers.append(nxt)
        space = linalg.RowSpace(np.array(powers, dtype=np.int64), p)


def _poly_at(structure, poly, a, e, p):
    acc = np.zeros(len(e), dtype=np.int64)
    power = np.array(e, dtype=np.int64) % p
    for c in poly:
        acc = (acc + c * power) % p
        power = _algebra_mul(structure, a, power, p)
    return acc


def decompose_algebra(structure, unit: int, p: int, seed: int = 0) -> list[int]:
    """Residue-field degrees of a reduced commutative GF(p)-algebra.

    ``structure[i][j][k]`` gives e_i e_j = sum_k structure[i][j][k] e_k.
    Components are split with idempotents built from factored minimal
    polynomials until each is a field generated by one element.
    """
    r = len(structure)
    rng = random.Random(seed)
    one = [0] * r
    one[unit] = 1
    queue = [np.array(one, dtype=np.int64)]
    degrees = []
    while queue:
        e = queue.pop()
        dim = linalg.rank(_mult_matrix(structure, e, p), p)
        candidates = [np.eye(r, dtype=np.int64)[i] for i in range(r)]
        candidates += [np.array([rng.randrange(p) for _ in range(r)], dtype=np.int64) for _ in range(200)]
        for c in candidates:
            a = _algebra_mul(structure, c, e, p)
            mu = _minimal_polynomial(structure, a, e, p)
            if polyfp.degree(mu) == dim and polyfp.is_irreducible(mu, p):
                degrees.append(dim)
                break
            factors = polyfp.factor_squarefree(mu, p)
            if len(factors) > 1:
                for f in factors:
                    cof = polyfp.divmod_poly(mu, f, p)[0]
                    # idempotent: cof * (cof^-1 mod f)
                    inv = polyfp.inverse_mod(cof, f, p)
                    idem = polyfp.mulmod(cof, inv, mu, p)
                    queue.append(_poly_at(structure, idem, a, e, p))
                break
        else:
            raise RuntimeError("failed to split algebra component")
    return sorted(degrees)


@dataclass(frozen=True)
class ModPReduction:
    """K_0(F)/(p): reduced structure constants, field decomposition, filtration certificate."""

    p: int
    labels: tuple
    structure_constants: tuple
    field_degrees: tuple[int, ...]
    filtration_certificate: tuple[dict, ...]

    def description(self) -> str:
        return " x ".join(f"F_{self.p}" if d == 1 else f"F_{self.p}^{d}" for d in self.field_degrees)

    def to_json(self) -> dict:
        return {
            "p": self.p,
            "labels": list(self.labels),
            "N_mod_p": [[list(row) for row in mat] for mat in self.structure_constants],
            "fields": [{"p": self.p, "degree": d} for d in self.field_degrees],
            "filtration": list(self.filtration_certificate),
        }


def verify_mod_p_reduction(ring, p: int) -> ModPReduction:
    """Describe K_0(ring)/(p) and certify the divisibility step.

    For each basis object X, the free module GF(p)C_p (x) X is filtered by
    powers of the augmentation ideal; the p layers are trivial, so its
    underlying class is p[X], which lies in (p).
    """
    require_prime(p, "p")
    structure = tuple(tuple(tuple(int(c) % p for c in row) for row in mat) for mat in ring.N)
    free = JordanModule.block(p, p)
    layers = radical_filtration(free)
    if len(layers) != p or not all(L.dimension == 1 and L.trivial_action for L in layers):
        raise AssertionError("radical filtration of GF(p)C_p is not p trivial layers")
    certificate = []
    for i, label in enumerate(ring.labels):
        cls = [0] * len(ring.labels)
        cls[i] = sum(L.dimension for L in layers)
        certificate.append(
            {
                "label": label,
                "layers": len(layers),
                "underlying_class": cls,
                "in_ideal_p": all(c % p == 0 for c in cls),
            }
        )
    if not all(c["in_ideal_p"] for c in certificate):
        raise AssertionError("divisibility certificate failed")
    degrees = decompose_algebra(structure, ring.unit, p)
    if sum(degrees) != len(ring.labels):
        raise AssertionError("field decomposition does not account for the whole algebra")
    return ModPReduction(p, tuple(ring.labels), structure, tuple(degrees), tuple(certificate))
