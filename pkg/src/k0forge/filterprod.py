"""Prime-indexed families modulo the cofinite filter, and root densities across primes.

A family assigns to each prime p a value in GF(p), or in GF(p)[y]/(f) when
it carries a formal extension modulus f.  Two families are identified when
they agree outside a finite exception set; every verdict reports the
sample bound and the exceptions.  Anything that holds on a cofinite set
holds in every non-principal ultraproduct.
"""

from __future__ import annotations

import csv
import io
import math
from collections.abc import Callable, Iterable, Sequence
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from . import polyfp
from .arith import factorint, primes_up_to

DEFAULT_BOUND = 104729  # the 10^4-th prime
DEFAULT_SAMPLE = 1000

Value = int | tuple[int, ...] | None


@dataclass(frozen=True)
class PrimeFamilyElement:
    """p -> a_p, with a finite set of primes where the rule is overridden or undefined.

    ``modulus`` (integer coefficients, constant first, monic) makes values
    elements of GF(p)[y]/(modulus mod p), given as coefficient tuples.
    """

    evaluator: Callable[[int], Value] = field(compare=False)
    exceptions: frozenset[int] = frozenset()
    modulus: tuple[int, ...] | None = None
    overrides: tuple[tuple[int, Value], ...] = ()
    name: str = field(default="", compare=False)
    # set on families built by root_family: a chosen root of ``modulus``
    is_root: bool = field(default=False, compare=False)

    def __post_init__(self):
        object.__setattr__(self, "exceptions", frozenset(self.exceptions))
        if self.modulus is not None and (len(self.modulus) < 2 or self.modulus[-1] != 1):
            raise ValueError("extension modulus must be monic of positive degree")

    # -- constructors -----------------------------------------------------

    @classmethod
    def constant(cls, n: int) -> PrimeFamilyElement:
        return cls(lambda p: n % p, name=str(n))

    @classmethod
    def from_function(cls, fn: Callable[[int], Value], exceptions: Iterable[int] = (), name: str = "") -> PrimeFamilyElement:
        return cls(fn, frozenset(exceptions), name=name)

    @classmethod
    def inverse_of(cls, n: int) -> PrimeFamilyElement:
        """p -> n^-1 in GF(p), undefined at the primes dividing n."""
        bad = frozenset(factorint(abs(n))) if abs(n) > 1 else frozenset()
        return cls(lambda p: None if n % p == 0 else pow(n, -1, p), bad, name=f"1/{n}")

    # -- evaluation -------------------------------------------------------

    def _reduce(self, p: int, v: Value) -> Value:
        if v is None:
            return None
        if self.modulus is None:
            if isinstance(v, tuple):
                raise ValueError("extension value in a family without modulus")
            return v % p
        if isinstance(v, int):
            v = (v,)
        fp = polyfp.normalize(self.modulus, p)
        return _pad(polyfp.mod(polyfp.normalize(v, p), fp, p), len(self.modulus) - 1)

    def at(self, p: int) -> Value:
        for q, v in self.overrides:
            if q == p:
                return self._reduce(p, v)
        return self._reduce(p, self.evaluator(p))

    def lift(self, modulus: tuple[int, ...]) -> PrimeFamilyElement:
        """The same family viewed in GF(p)[y]/(modulus)."""
        if self.modulus == modulus:
            return self
        if self.modulus is not None:
            raise ValueError("families carry different extension moduli")
        ev = self.evaluator
        return PrimeFamilyElement(
            lambda p: None if (v := ev(p)) is None else (v,),
            self.exceptions,
            modulus,
            tuple((q, None if v is None else (v,)) for q, v in self.overrides),
            self.name,
        )

    def with_override(self, p: int, value: Value) -> PrimeFamilyElement:
        return PrimeFamilyElement(
            self.evaluator,
            self.exceptions | {p},
            self.modulus,
            self.overrides + ((p, value),),
            self.name,
            self.is_root,
        )

    def __add__(self, other):
        return family_arithmetic(self, _as_family(other), "+")

    __radd__ = __add__

    def __sub__(self, other):
        return family_arithmetic(self, _as_family(other), "-")

    def __rsub__(self, other):
        return family_arithmetic(_as_family(other), self, "-")

    def __mul__(self, other):
        return family_arithmetic(self, _as_family(other), "*")

    __rmul__ = __mul__

    def __neg__(self):
        return family_arithmetic(PrimeFamilyElement.constant(0), self, "-")

    def __pow__(self, e: int):
        out = PrimeFamilyElement.constant(1)
        for _ in range(e):
            out = out * self
        return out


def _pad(a: Sequence[int], n: int) -> tuple[int, ...]:
    return tuple(a) + (0,) * (n - len(a))


def _as_family(x) -> PrimeFamilyElement:
    if isinstance(x, PrimeFamilyElement):
        return x
    if isinstance(x, int):
        return PrimeFamilyElement.constant(x)
    raise TypeError(f"cannot treat {type(x).__name__} as a prime family")


_OPS = {"+": "+", "-": "-", "−": "-", "*": "*", "×": "*"}


def family_arithmetic(a: PrimeFamilyElement, b: PrimeFamilyElement, op: str) -> PrimeFamilyElement:
    """Componentwise a op b; the exception sets are unioned."""
    if op not in _OPS:
        raise ValueError(f"unknown operation {op!r}")
    op = _OPS[op]
    modulus = a.modulus if a.modulus is not None else b.modulus
    if modulus is not None:
        a, b = a.lift(modulus), b.lift(modulus)

    def ev(p: int) -> Value:
        x, y = a.at(p), b.at(p)
        if x is None or y is None:
            return None
        if modulus is None:
            return (x + y if op == "+" else x - y if op == "-" else x * y) % p
        if op == "+":
            return polyfp.add(x, y, p)
        if op == "-":
            return polyfp.sub(x, y, p)
        return polyfp.mulmod(x, y, polyfp.normalize(modulus, p), p)

    return PrimeFamilyElement(ev, a.exceptions | b.exceptions, modulus, name=f"({a.name} {op} {b.name})")


def sampled_primes(bound: int) -> tuple[int, ...]:
    return primes_up_to(bound)


@dataclass(frozen=True)
class FilterVerdict:
    """Agreement of two families on the sampled primes, relative to the certified exceptions."""

    equal: bool
    bound: int
    exceptions: tuple[int, ...]
    disagreements: tuple[int, ...]

    def __bool__(self) -> bool:
        return self.equal

    def to_json(self) -> dict:
        return {
            "equal": self.equal,
            "bound": self.bound,
            "exceptions": list(self.exceptions),
            "disagreements": list(self.disagreements),
        }


def filter_equal(a: PrimeFamilyElement, b: PrimeFamilyElement, bound: int = DEFAULT_SAMPLE) -> FilterVerdict:
    """Equal in the cofinite quotient iff every sampled disagreement lies in the exception set."""
    if a.modulus != b.modulus:
        modulus = a.modulus if a.modulus is not None else b.modulus
        a, b = a.lift(modulus), b.lift(modulus)
    exc = a.exceptions | b.exceptions
    bad = tuple(p for p in sampled_primes(bound) if a.at(p) != b.at(p))
    return FilterVerdict(
        all(p in exc for p in bad),
        bound,
        tuple(sorted(exc)),
        bad,
    )


# ---------------------------------------------------------------------------
# Characteristic zero


@dataclass(frozen=True)
class CharZeroCertificate:
    """n * 1 is invertible outside the primes dividing n, and only there."""

    n: int
    exceptions: tuple[int, ...]
    checked_up_to: int
    inverse: PrimeFamilyElement = field(repr=False, compare=False)

    def to_json(self) -> dict:
        return {"n": self.n, "exceptions": list(self.exceptions), "checked_up_to": self.checked_up_to}


def char_zero_certificate(n: int, bound: int = DEFAULT_SAMPLE) -> CharZeroCertificate:
    """Exception set of n * 1 in the product of the GF(p).

    Every prime up to max(n, bound) is checked, which covers all divisors of
    n, so the exception set is exact.
    """
    if n < 1:
        raise ValueError("n must be positive")
    top = max(n, bound)
    zero_at = tuple(p for p in sampled_primes(top) if n % p == 0)
    declared = tuple(sorted(factorint(n))) if n > 1 else ()
    if zero_at != declared:
        raise AssertionError(f"exception set mismatch for {n}: {zero_at} vs {declared}")
    inv = PrimeFamilyElement.inverse_of(n)
    for p in sampled_primes(top):
        if p not in zero_at and n * inv.at(p) % p != 1:
            raise AssertionError(f"inverse of {n} fails at {p}")
    return CharZeroCertificate(n, zero_at, top, inv)


# ---------------------------------------------------------------------------
# Choice oracles and root families


@dataclass
class ChoiceOracle:
    """Explicit record of choices only an ultrafilter could make, such as which root to pick.

    ``rule`` maps (prime, sorted candidates) to the chosen candidate; every
    call is logged.  The log covers finitely many primes and cannot certify
    that an infinite set of choices is coherent.
    """

    rule: Callable[[int, tuple[int, ...]], int]
    name: str = ""
    log: list = field(default_factory=list)

    def choose(self, p: int, candidates: Sequence[int]) -> int:
        cands = tuple(sorted(candidates))
        pick = self.rule(p, cands)
        if pick not in cands:
            raise ValueError(f"oracle chose {pick}, not among {cands}")
        self.log.append((p, cands, pick))
        return pick

    @classmethod
    def least(cls) -> ChoiceOracle:
        return cls(lambda p, c: c[0], "least")


def _roots_mod(f: Sequence[int], p: int) -> tuple[int, ...]:
    x = np.arange(p, dtype=np.int64)
    acc = np.zeros(p, dtype=np.int64)
    for c in reversed(f):
        acc = (acc * x + c % p) % p
    return tuple(int(r) for r in np.nonzero(acc == 0)[0])


def root_family(f: Sequence[int], oracle: ChoiceOracle) -> PrimeFamilyElement:
    """A family of roots of the monic integer polynomial f.

    Where f has a root mod p the oracle picks one; elsewhere the value is
    the formal root y of GF(p)[y]/(f).  The exceptions are the primes
    dividing the discriminant, where f mod p has repeated factors.
    """
    f = tuple(int(c) for c in f)
    if len(f) < 2 or f[-1] != 1:
        raise ValueError("f must be monic of positive degree")
    disc = _discriminant(f)
    bad = frozenset(factorint(abs(disc))) if abs(disc) > 1 else frozenset()

    def ev(p: int) -> Value:
        roots = _roots_mod(f, p)
        if roots:
            return (oracle.choose(p, roots),)
        return (0, 1)

    return PrimeFamilyElement(ev, bad, f, name=f"root{list(f)}", is_root=True)


def _discriminant(f: Sequence[int]) -> int:
    """Discriminant of a monic integer polynomial via the resultant with its derivative."""
    n = len(f) - 1
    df = [i * c for i, c in enumerate(f)][1:]
    res = _resultant(list(f), df)
    sign = -1 if (n * (n - 1) // 2) % 2 else 1
    return sign * res


def _resultant(a: list[int], b: list[int]) -> int:
    """Integer resultant from the Sylvester matrix (desk-scale degrees)."""
    from .linalg import integer_determinant

    m, n = len(a) - 1, len(b) - 1
    if n < 0:
        return 0
    size = m + n
    rows = []
    for i in range(n):
        rows.append([0] * i + list(reversed(a)) + [0] * (size - m - 1 - i))
    for i in range(m):
        rows.append([0] * i + list(reversed(b)) + [0] * (size - n - 1 - i))
    return integer_determinant(rows) if size else 1


# ---------------------------------------------------------------------------
# Root densities


@dataclass(frozen=True)
class DensityReport:
    polynomial: tuple[int, ...]
    bound: int
    primes: int
    hits: int
    rows: tuple[tuple[int, bool], ...] = field(repr=False)
    predicted: Fraction | None = None
    galois_order: int | None = None

    @property
    def empirical(self) -> float:
        return self.hits / self.primes if self.primes else 0.0

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["prime", "has_root"])
        for p, hit in self.rows:
            w.writerow([p, int(hit)])
        return buf.getvalue()

    def to_json(self) -> dict:
        return {
            "polynomial": list(self.polynomial),
            "bound": self.bound,
            "primes": self.primes,
            "hits": self.hits,
            "empirical": self.empirical,
            "predicted": None if self.predicted is None else str(self.predicted),
            "predicted_float": None if self.predicted is None else float(self.predicted),
            "galois_order": self.galois_order,
        }


EXHAUSTIVE_LIMIT = 1000


def has_root_mod(f: Sequence[int], p: int, exhaustive: bool | None = None) -> bool:
    """Whether f has a root in GF(p).

    Small primes are searched exhaustively; above EXHAUSTIVE_LIMIT the exact
    test gcd(f, x^p - x) != 1 is used instead.
    """
    if exhaustive is None:
        exhaustive = p <= EXHAUSTIVE_LIMIT
    if exhaustive:
        return bool(_roots_mod(f, p))
    fp = polyfp.normalize(f, p)
    if not fp:
        return True
    if polyfp.degree(fp) < 1:
        return False
    x = (0, 1)
    frob = polyfp.powmod(x, p, fp, p)
    return polyfp.degree(polyfp.gcd(fp, polyfp.sub(frob, x, p), p)) > 0


def predicted_density(f: Sequence[int]) -> tuple[Fraction | None, int | None]:
    """Chebotarev prediction: share of Galois elements fixing some root, for degree <= 4.

    Returns (density, group order); a rational root gives density 1.
    Reducible polynomials without rational roots are handled for products of
    two quadratics; other shapes return (None, None).
    """
    import sympy
    from sympy.polys.numberfields.galoisgroups import galois_group

    x = sympy.Symbol("x")
    poly = sympy.Poly(list(reversed([int(c) for c in f])), x)
    if poly.degree() < 1:
        raise ValueError("polynomial must be nonconstant")
    _, factors = poly.factor_list()
    irreducible = [g for g, _ in factors]
    if any(g.degree() == 1 for g in irreducible):
        return Fraction(1), None
    if poly.degree() > 4:
        return None, None
    if len(irreducible) == 1:
        group, _ = galois_group(irreducible[0], by_name=False)
        fixed = sum(1 for g in group.elements if any(g(i) == i for i in range(group.degree)))
        return Fraction(fixed, group.order()), int(group.order())
    if len(irreducible) == 2 and all(g.degree() == 2 for g in irreducible):
        d1, d2 = (int(g.discriminant()) for g in irreducible)
        same = _is_square(d1 * d2)
        return (Fraction(1, 2) if same else Fraction(3, 4)), (2 if same else 4)
    return None, None


def _is_square(n: int) -> bool:
    return n >= 0 and math.isqrt(n) ** 2 == n


def root_density(f: Sequence[int], bound: int = DEFAULT_BOUND, workers: int = 1, predict: bool = True) -> DensityReport:
    """Share of primes p <= bound at which f has a root mod p."""
    f = tuple(int(c) for c in f)
    while f and f[-1] == 0:
        f = f[:-1]
    if len(f) < 2:
        raise ValueError("f must be nonconstant")
    if bound < 100:
        raise ValueError("sample bound must be at least 100")
    primes = sampled_primes(bound)
    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            hits = list(pool.map(lambda p: has_root_mod(f, p), primes))
    else:
        hits = [has_root_mod(f, p) for p in primes]
    rows = tuple(zip(primes, hits))
    predicted, order = predicted_density(f) if predict else (None, None)
    return DensityReport(f, bound, len(primes), sum(hits), rows, predicted, order)


# ---------------------------------------------------------------------------
# Subring closure and Los


@dataclass(frozen=True)
class ClosureReport:
    generators: int
    pairs_checked: int
    bound: int
    exceptions: tuple[int, ...]
    char_zero_up_to: int
    relations_checked: int
    ok: bool

    def to_json(self) -> dict:
        return {
            "generators": self.generators,
            "pairs_checked": self.pairs_checked,
            "bound": self.bound,
            "exceptions": list(self.exceptions),
            "char_zero_up_to": self.char_zero_up_to,
            "relations_checked": self.relations_checked,
            "ok": self.ok,
        }


def filter_subring_closure(
    elements: Sequence[PrimeFamilyElement], bound: int = DEFAULT_SAMPLE, char_zero_up_to: int = 100
) -> ClosureReport:
    """Check that sums and products of the given families stay representable and satisfy the ring laws.

    The list must contain the unit family.  Root families are also checked
    against their defining polynomial.
    """
    if not elements:
        raise ValueError("the zero ring is excluded: a unit family is required")
    one = PrimeFamilyElement.constant(1)
    def is_unit(e: PrimeFamilyElement) -> bool:
        return filter_equal(e, one if e.modulus is None else one.lift(e.modulus), bound).equal

    if not any(is_unit(e) for e in elements):
        raise ValueError("the element list must contain the unit family")
    exc = frozenset().union(*(e.exceptions for e in elements))
    primes = [p for p in sampled_primes(bound) if p not in exc]
    pairs = 0
    for i, a in enumerate(elements):
        for b in elements[i:]:
            pairs += 1
            s, t = a + b, a * b
            ts = b * a
            for p in primes:
                if s.at(p) is None or t.at(p) is None:
                    raise AssertionError(f"sum or product undefined at {p} outside exceptions")
                if t.at(p) != ts.at(p):
                    raise AssertionError(f"products do not commute at {p}")
    for a in elements:
        for b in elements:
            for c in elements:
                lhs, rhs = a * (b + c), a * b + a * c
                if not filter_equal(lhs, rhs, bound):
                    raise AssertionError("distributivity fails")
    relations = 0
    for e in elements:
        if e.is_root:
            # the family is a root of its modulus: evaluate modulus(e) == 0
            value = PrimeFamilyElement.constant(0).lift(e.modulus)
            power = PrimeFamilyElement.constant(1).lift(e.modulus)
            for c in e.modulus:
                value = value + c * power
                power = power * e
            if not filter_equal(value, PrimeFamilyElement.constant(0).lift(e.modulus), bound):
                raise AssertionError("root family does not satisfy its polynomial")
            relations += 1
    for n in range(1, char_zero_up_to + 1):
        char_zero_certificate(n, 1)
    return ClosureReport(len(elements), pairs, bound, tuple(sorted(exc)), char_zero_up_to, relations, True)


@dataclass(frozen=True)
class LosReport:
    """Comparison of an identity in the quotient with its componentwise truth."""

    bound: int
    holds_in_quotient: bool
    componentwise_failures: tuple[int, ...]
    exceptions: tuple[int, ...]

    @property
    def consistent(self) -> bool:
        cofinite = all(p in self.exceptions for p in self.componentwise_failures)
        return cofinite == self.holds_in_quotient


IntPoly = dict  # exponent tuple -> integer coefficient


def _eval_family(poly: IntPoly, elems: Sequence[PrimeFamilyElement]) -> PrimeFamilyElement:
    out = PrimeFamilyElement.constant(0)
    for exps, c in poly.items():
        term = PrimeFamilyElement.constant(c)
        for e, x in zip(exps, elems):
            term = term * (x**e)
        out = out + term
    return out


def _eval_values(poly: IntPoly, values: Sequence[int], p: int) -> int:
    total = 0
    for exps, c in poly.items():
        term = c
        for e, v in zip(exps, values):
            term = term * pow(v, e, p)
        total += term
    return total % p


def los_check(
    lhs: IntPoly, rhs: IntPoly, elements: Sequence[PrimeFamilyElement], bound: int = DEFAULT_SAMPLE
) -> LosReport:
    """Test lhs(elements) == rhs(elements) in the quotient against the prime-by-prime truth.

    Polynomials map exponent tuples to integer coefficients.  The quotient
    verdict uses family arithmetic; the componentwise verdict evaluates the
    polynomials on the values at each prime.  Both must agree.
    """
    if any(e.modulus is not None for e in elements):
        raise ValueError("componentwise evaluation needs prime-field families")
    left, right = _eval_family(lhs, elements), _eval_family(rhs, elements)
    verdict = filter_equal(left, right, bound)
    exc = frozenset().union(*(e.exceptions for e in elements)) if elements else frozenset()
    failures = []
    for p in sampled_primes(bound):
        values = [e.at(p) for e in elements]
        if any(v is None for v in values):
            failures.append(p)
            continue
        if _eval_values(lhs, values, p) != _eval_values(rhs, values, p):
            failures.append(p)
    report = LosReport(bound, verdict.equal, tuple(failures), tuple(sorted(exc)))
    if not report.consistent:
        raise AssertionError("quotient verdict disagrees with the componentwise verdict")
    return report
