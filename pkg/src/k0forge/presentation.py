"""Rings presented by generators and relations over Z or over K_0 of a fusion ring.

Elements are decided equal by rewriting with relations whose leading
coefficient is a unit, completed by bounded critical-pair passes.  Relations
n*x - 1 make n invertible (the coefficients become Z[1/N]) and relations
without generators impose an integer modulus.  On localizations of Z, monic
one-generator quotients and quotients by an integer, the completed system is
confluent and equality is decided exactly.
"""

from __future__ import annotations

import dataclasses
import itertools
import math
from collections.abc import Callable, Iterable, Mapping, Sequence
from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property
from numbers import Rational

from .arith import factorint
from .tilting import FusionRing

DEFAULT_DEPTH = 10
COMMUTATIVE = "commutative"
ASSOCIATIVE = "associative"

Factor = int | str


class UndeclaredSymbol(ValueError):
    """A relation mentions a symbol that is neither a generator nor a base constant."""


class VersalFactorizationError(Exception):
    """A relation does not map to zero in the target ring."""

    def __init__(self, index: int, relation: FormalExpression, detail: str):
        super().__init__(f"relation {index} ({relation}) {detail}")
        self.index = index
        self.relation = relation
        self.detail = detail


# ---------------------------------------------------------------------------
# Formal expressions


def _factor_key(f: Factor):
    return (0, f, "") if isinstance(f, int) else (1, 0, f)


@dataclass(frozen=True)
class FormalExpression:
    """A sum of products; each factor is a generator name or an integer constant.

    Base constants of a fusion ring are written as their label strings.
    """

    terms: tuple[tuple[Factor, ...], ...]

    @classmethod
    def of(cls, terms: Iterable[Iterable[Factor]], commutative: bool = True) -> FormalExpression:
        out = []
        for term in terms:
            t = tuple(_check_factor(f) for f in term)
            out.append(tuple(sorted(t, key=_factor_key)) if commutative else t)
        return cls(tuple(out))

    def symbols(self) -> set[str]:
        return {f for term in self.terms for f in term if isinstance(f, str)}

    def to_json(self) -> list:
        return [list(term) for term in self.terms]

    def __str__(self) -> str:
        if not self.terms:
            return "0"
        out = ""
        for term in self.terms:
            c = math.prod(f for f in term if isinstance(f, int))
            syms = "*".join(f for f in term if isinstance(f, str))
            if not syms:
                body = str(abs(c))
            else:
                body = syms if abs(c) == 1 else f"{abs(c)}*{syms}"
            if not out:
                out = f"-{body}" if c < 0 else body
            else:
                out += f" - {body}" if c < 0 else f" + {body}"
        return out


def _parse_arrow(token: str) -> tuple[str, str, list[str]]:
    """'f: Y -> A (+) B' -> ('f', 'Y', ['A', 'B'])."""
    name, _, rest = token.partition(":")
    src, arrow, dst = rest.partition("->")
    if not arrow:
        raise ValueError(f"malformed arrow {token!r}")
    return name.strip(), src.strip(), [x.strip() for x in dst.split("(+)")]


def _check_factor(f) -> Factor:
    if isinstance(f, bool):
        raise TypeError("booleans are not factors")
    if isinstance(f, int | str):
        return f
    raise TypeError(f"factor must be an int or a symbol, not {type(f).__name__}")


# ---------------------------------------------------------------------------
# Heller witnesses


def _combine(*parts: tuple[int, dict[str, int]]) -> dict[str, int]:
    out: dict[str, int] = {}
    for sign, cls in parts:
        for k, v in cls.items():
            out[k] = out.get(k, 0) + sign * v
    return {k: v for k, v in out.items() if v}


@dataclass(frozen=True)
class HellerWitness:
    """Bookkeeping for one relation O = 0.

    Arrows f: Y -> O (+) Z and g: Y -> Z with cof(f) ~ cof(g) are opaque
    tokens; their only K_0 content is [O] + [Z] - [Y] = [Z] - [Y].
    """

    relation_index: int
    Y: str
    Z: str
    f: str
    g: str
    cofiber: str
    discharged: bool = False

    @classmethod
    def allocate(cls, index: int) -> HellerWitness:
        o, y, z = f"O{index}", f"Y{index}", f"Z{index}"
        return cls(
            index,
            y,
            z,
            f"f{index}: {y} -> {o} (+) {z}",
            f"g{index}: {y} -> {z}",
            f"cof(f{index}) ~ cof(g{index})",
        )

    @property
    def O(self) -> str:
        return f"O{self.relation_index}"

    def derivation(self) -> dict[str, int]:
        """[cof f] - [cof g] as a formal combination of classes, read off the recorded arrows."""
        _, src_f, dst_f = _parse_arrow(self.f)
        _, src_g, dst_g = _parse_arrow(self.g)
        cof_f = _combine(*[(1, {x: 1}) for x in dst_f], (-1, {src_f: 1}))
        cof_g = _combine(*[(1, {x: 1}) for x in dst_g], (-1, {src_g: 1}))
        return _combine((1, cof_f), (-1, cof_g))

    def check(self) -> bool:
        """The cofiber identification forces [O] = 0: the derivation cancels to exactly [O]."""
        try:
            name_f, src_f, _ = _parse_arrow(self.f)
            name_g, src_g, dst_g = _parse_arrow(self.g)
        except ValueError:
            return False
        shape = src_f == src_g == self.Y and dst_g == [self.Z]
        identified = self.cofiber == f"cof({name_f}) ~ cof({name_g})"
        return shape and identified and self.derivation() == {self.O: 1}

    def discharge(self) -> HellerWitness:
        if not self.check():
            raise AssertionError(f"Heller derivation for relation {self.relation_index} does not cancel")
        return HellerWitness(self.relation_index, self.Y, self.Z, self.f, self.g, self.cofiber, True)

    def to_json(self) -> dict:
        return {
            "relation": self.relation_index,
            "Y": self.Y,
            "Z": self.Z,
            "f": self.f,
            "g": self.g,
            "cofiber": self.cofiber,
            "derivation": self.derivation(),
            "discharged": self.discharged,
        }


# ---------------------------------------------------------------------------
# Coefficients: Z[1/N] or Z/m


@dataclass(frozen=True)
class _Coeffs:
    inverted: frozenset[int]  # primes made invertible
    modulus: int  # 0 for no modulus

    def norm(self, c):
        if self.modulus:
            c = Fraction(c)
            return c.numerator * pow(c.denominator, -1, self.modulus) % self.modulus
        return Fraction(c)

    def is_zero(self, c) -> bool:
        return c == 0

    def is_unit(self, c) -> bool:
        if self.modulus:
            return math.gcd(int(c), self.modulus) == 1
        if c == 0:
            return False
        num = abs(Fraction(c).numerator)
        for prime in self.inverted:
            while num % prime == 0:
                num //= prime
        return num == 1

    def inv(self, c):
        if self.modulus:
            return pow(int(c), -1, self.modulus)
        return 1 / Fraction(c)

    def strip(self, n: int) -> int:
        """|n| with the inverted primes removed."""
        n = abs(n)
        for prime in self.inverted:
            while n and n % prime == 0:
                n //= prime
        return n


# ---------------------------------------------------------------------------
# Monomials and polynomials


class _Monoid:
    """Commutative monomials are exponent tuples; associative ones are words of generator indices."""

    def __init__(self, k: int, commutative: bool):
        self.k = k
        self.commutative = commutative

    def one(self):
        return (0,) * self.k if self.commutative else ()

    def gen(self, i: int):
        if self.commutative:
            return tuple(1 if j == i else 0 for j in range(self.k))
        return (i,)

    def mul(self, a, b):
        if self.commutative:
            return tuple(x + y for x, y in zip(a, b))
        return a + b

    def degree(self, a) -> int:
        return sum(a) if self.commutative else len(a)

    def key(self, a):
        return (self.degree(a), a)

    def is_one(self, a) -> bool:
        return self.degree(a) == 0

    def letters(self, a) -> list[int]:
        if self.commutative:
            return [i for i, e in enumerate(a) for _ in range(e)]
        return list(a)


Poly = dict  # monomial -> coefficient


def _padd(a: Poly, b: Poly, coeffs: _Coeffs, scale=1) -> Poly:
    out = dict(a)
    for m, c in b.items():
        v = coeffs.norm(out.get(m, 0) + scale * c)
        if v == 0:
            out.pop(m, None)
        else:
            out[m] = v
    return out


def _pmul(a: Poly, b: Poly, mon: _Monoid, coeffs: _Coeffs) -> Poly:
    out: Poly = {}
    for m1, c1 in a.items():
        for m2, c2 in b.items():
            m = mon.mul(m1, m2)
            out[m] = out.get(m, 0) + c1 * c2
    return {m: v for m, c in out.items() if (v := coeffs.norm(c)) != 0}


def _leading(p: Poly, mon: _Monoid):
    return max(p, key=mon.key)


@dataclass
class _Rule:
    lhs: tuple
    rhs: Poly  # lhs = rhs, every monomial of rhs smaller than lhs


class _System:
    """Rewriting system for a presentation, completed up to a bounded number of passes."""

    def __init__(self, mon: _Monoid, relations: list[Poly], inverted: set[int], depth: int):
        self.mon = mon
        self.depth = depth
        self.coeffs = _Coeffs(frozenset(inverted), 0)
        self._raw = relations
        self.rules: list[_Rule] = []
        self.stuck: list[Poly] = []
        self.confluent = False
        self.passes = 0
        self._complete()

    @property
    def zero_ring(self) -> bool:
        return self.coeffs.modulus == 1

    # -- reduction --------------------------------------------------------

    def _match(self, m, lhs):
        """(left, right) cofactors with m = left*lhs*right, or None."""
        mon = self.mon
        if mon.commutative:
            if all(x >= y for x, y in zip(m, lhs)):
                return mon.one(), tuple(x - y for x, y in zip(m, lhs))
            return None
        n = len(lhs)
        for s in range(len(m) - n + 1):
            if m[s : s + n] == lhs:
                return m[:s], m[s + n :]
        return None

    def reduce(self, p: Poly) -> Poly:
        coeffs, mon = self.coeffs, self.mon
        p = {m: v for m, c in p.items() if (v := coeffs.norm(c)) != 0}
        if self.zero_ring:
            return {}
        done: Poly = {}
        while p:
            m = _leading(p, mon)
            c = p.pop(m)
            for rule in self.rules:
                hit = self._match(m, rule.lhs)
                if hit is not None:
                    left, right = hit
                    repl = {mon.mul(mon.mul(left, r), right): v for r, v in rule.rhs.items()}
                    p = _padd(p, repl, coeffs, c)
                    break
            else:
                done[m] = c
        return done

    # -- completion -------------------------------------------------------

    def _orient(self, p: Poly) -> str:
        """Add p as a rule; returns 'zero', 'rule', 'modulus' or 'stuck'."""
        p = self.reduce(p)
        if not p:
            return "zero"
        mon, coeffs = self.mon, self.coeffs
        lead = _leading(p, mon)
        if mon.is_one(lead):
            c = p[lead]
            new = coeffs.strip(Fraction(c).numerator) if not coeffs.modulus else math.gcd(int(c), coeffs.modulus)
            modulus = math.gcd(new, coeffs.modulus) if coeffs.modulus else new
            self.coeffs = _Coeffs(coeffs.inverted, modulus)
            return "modulus"
        lc = p[lead]
        if not coeffs.is_unit(lc):
            self.stuck.append(p)
            return "stuck"
        inv = coeffs.inv(lc)
        rhs = {m: coeffs.norm(-c * inv) for m, c in p.items() if m != lead}
        self.rules.append(_Rule(lead, {m: c for m, c in rhs.items() if c != 0}))
        return "rule"

    def _critical(self, r1: _Rule, r2: _Rule) -> list[Poly]:
        mon = self.mon
        out = []
        if mon.commutative:
            lcm = tuple(max(a, b) for a, b in zip(r1.lhs, r2.lhs))
            if all(min(a, b) == 0 for a, b in zip(r1.lhs, r2.lhs)):
                return []  # coprime leading monomials
            c1 = tuple(x - y for x, y in zip(lcm, r1.lhs))
            c2 = tuple(x - y for x, y in zip(lcm, r2.lhs))
            s1 = {mon.mul(c1, m): v for m, v in r1.rhs.items()}
            s2 = {mon.mul(c2, m): v for m, v in r2.rhs.items()}
            return [_padd(s1, s2, self.coeffs, -1)]
        u, v = r1.lhs, r2.lhs
        # proper overlaps: suffix of u equals prefix of v
        for s in range(1, min(len(u), len(v))):
            if u[-s:] == v[:s]:
                a, b = u[:-s], v[s:]
                s1 = {m + b: c for m, c in r1.rhs.items()}
                s2 = {a + m: c for m, c in r2.rhs.items()}
                out.append(_padd(s1, s2, self.coeffs, -1))
        # inclusion of u in v
        if r1 is not r2 and len(u) <= len(v):
            for s in range(len(v) - len(u) + 1):
                if v[s : s + len(u)] == u:
                    a, b = v[:s], v[s + len(u) :]
                    s1 = {a + m + b: c for m, c in r1.rhs.items()}
                    out.append(_padd(s1, r2.rhs, self.coeffs, -1))
        return out

    def _complete(self) -> None:
        while True:
            restart = False
            self.rules, self.stuck = [], []
            for rel in self._raw:
                if self._orient(rel) == "modulus":
                    restart = True
                    break
            if restart:
                continue
            done_pairs: set[tuple[int, int]] = set()
            self.passes = 0
            while True:
                pairs = [
                    (i, j)
                    for i in range(len(self.rules))
                    for j in range(len(self.rules))
                    if (i, j) not in done_pairs and (self.mon.commutative is False or i <= j)
                ]
                if not pairs:
                    self.confluent = not self.stuck
                    return
                if self.passes >= self.depth:
                    self.confluent = False
                    return
                self.passes += 1
                for i, j in pairs:
                    done_pairs.add((i, j))
                    for s in self._critical(self.rules[i], self.rules[j]):
                        if self._orient(s) == "modulus":
                            restart = True
                            break
                    if restart:
                        break
                if restart:
                    break
            if not restart:
                return


# ---------------------------------------------------------------------------
# Presentations


@dataclass(frozen=True)
class RingPresentation:
    """Generators and relations (each asserted = 0) over Z or over K_0 of a fusion ring."""

    base: str | FusionRing
    generators: tuple[str, ...]
    relations: tuple[FormalExpression, ...]
    mode: str
    witnesses: tuple[HellerWitness, ...] = field(default=(), compare=False)
    depth: int = field(default=DEFAULT_DEPTH, compare=False)

    @property
    def commutative(self) -> bool:
        return self.mode == COMMUTATIVE

    @property
    def base_constants(self) -> tuple[str, ...]:
        return () if isinstance(self.base, str) else self.base.labels

    # -- internal encoding -----------------------------------------------

    @cached_property
    def _symbols(self) -> tuple[str, ...]:
        """Base labels other than the unit come first, then generators."""
        if isinstance(self.base, str):
            return self.generators
        labels = tuple(x for i, x in enumerate(self.base.labels) if i != self.base.unit)
        return labels + self.generators

    @cached_property
    def _monoid(self) -> _Monoid:
        return _Monoid(len(self._symbols), self.commutative)

    def _encode(self, expr: FormalExpression) -> Poly:
        mon = self._monoid
        index = {s: i for i, s in enumerate(self._symbols)}
        unit_label = None if isinstance(self.base, str) else self.base.labels[self.base.unit]
        out: Poly = {}
        for term in expr.terms:
            c = 1
            m = mon.one()
            for f in term:
                if isinstance(f, int):
                    c *= f
                elif f == unit_label:
                    continue
                else:
                    m = mon.mul(m, mon.gen(index[f]))
            out[m] = out.get(m, 0) + c
        return {m: c for m, c in out.items() if c}

    @cached_property
    def _base_relations(self) -> list[Poly]:
        if isinstance(self.base, str):
            return []
        ring = self.base
        mon = self._monoid
        index = {s: i for i, s in enumerate(self._symbols)}

        def mono(label_index):
            if label_index == ring.unit:
                return mon.one()
            return mon.gen(index[ring.labels[label_index]])

        rels = []
        for i in range(ring.rank):
            for j in range(ring.rank):
                if ring.unit in (i, j) or (self.commutative and j < i):
                    continue
                p: Poly = {mon.mul(mono(i), mono(j)): 1}
                for k, n in enumerate(ring.N[i][j]):
                    if n:
                        p[mono(k)] = p.get(mono(k), 0) - n
                rels.append({m: c for m, c in p.items() if c})
        if not self.commutative:
            # base constants are central
            for lab in range(ring.rank):
                if lab == ring.unit:
                    continue
                for g in self.generators:
                    a, b = mono(lab), mon.gen(index[g])
                    rels.append({b + a: 1, a + b: -1})
        return rels

    @cached_property
    def _encoded_relations(self) -> list[Poly]:
        return [self._encode(r) for r in self.relations] + self._base_relations

    @cached_property
    def inverted_primes(self) -> frozenset[int]:
        """Primes made invertible by relations of the form n*x - 1."""
        primes: set[int] = set()
        for n, _ in _localization_generators(self):
            primes.update(factorint(n))
        return frozenset(primes)

    @cached_property
    def _system(self) -> _System:
        return _System(self._monoid, self._encoded_relations, set(self.inverted_primes), self.depth)

    @property
    def confluent(self) -> bool:
        return self._system.confluent

    # -- elements ---------------------------------------------------------

    def element(self, expr: FormalExpression | Iterable[Iterable[Factor]]) -> PresentedRingElement:
        if not isinstance(expr, FormalExpression):
            expr = FormalExpression.of(expr, self.commutative)
        _check_symbols(expr, self)
        return PresentedRingElement(self, _freeze(self._encode(expr)))

    def gen(self, name: str) -> PresentedRingElement:
        if name not in self.generators:
            raise UndeclaredSymbol(name)
        return self.element([[name]])

    def const(self, c: Factor) -> PresentedRingElement:
        return self.element([[c]])

    def zero(self) -> PresentedRingElement:
        return PresentedRingElement(self, ())

    def one(self) -> PresentedRingElement:
        return self.const(1)

    def relation_element(self, index: int) -> PresentedRingElement:
        return self.element(self.relations[index])

    def to_json(self) -> dict:
        return {
            "base": "Z" if isinstance(self.base, str) else self.base.to_json(),
            "gens": list(self.generators),
            "rels": [r.to_json() for r in self.relations],
            "mode": self.mode,
        }

    @classmethod
    def from_json(cls, data: Mapping) -> RingPresentation:
        base = data.get("base", "Z")
        if not isinstance(base, str):
            base = FusionRing.from_json(base)
        return present(base, data.get("gens", []), data.get("rels", []), data.get("mode", COMMUTATIVE))

    def __str__(self) -> str:
        base = "Z" if isinstance(self.base, str) else f"K0({', '.join(self.base.labels)})"
        rels = ", ".join(str(r) for r in self.relations)
        return f"{base}<{', '.join(self.generators)}> / ({rels}) [{self.mode}]"


def _freeze(p: Poly) -> tuple:
    return tuple(sorted(p.items()))


def _check_symbols(expr: FormalExpression, pres: RingPresentation) -> None:
    allowed = set(pres.generators) | set(pres.base_constants)
    bad = expr.symbols() - allowed
    if bad:
        raise UndeclaredSymbol(f"undeclared symbols {sorted(bad)} in {expr}")


def _mode(mode) -> str:
    if mode in (COMMUTATIVE, ASSOCIATIVE):
        return mode
    if isinstance(mode, int) and mode >= 1:
        # E_1 is associative; E_n for n >= 2 is already commutative on K_0
        return ASSOCIATIVE if mode == 1 else COMMUTATIVE
    raise ValueError(f"unknown mode {mode!r}")


def present(
    base: str | FusionRing,
    generators: Sequence[str],
    relations: Iterable[FormalExpression | Iterable[Iterable[Factor]]],
    mode: str | int = COMMUTATIVE,
    depth: int = DEFAULT_DEPTH,
) -> RingPresentation:
    """Validate a presentation and allocate one Heller witness per relation."""
    mode = _mode(mode)
    if isinstance(base, str) and base not in ("Z", "ZZ"):
        raise ValueError(f"unknown base ring {base!r}")
    if isinstance(base, str):
        base = "Z"
    gens = tuple(generators)
    if len(set(gens)) != len(gens):
        raise ValueError("duplicate generator names")
    if isinstance(base, FusionRing) and set(gens) & set(base.labels):
        raise ValueError("generator names collide with base labels")
    commutative = mode == COMMUTATIVE
    rels = tuple(
        r if isinstance(r, FormalExpression) and not commutative else FormalExpression.of(
            r.terms if isinstance(r, FormalExpression) else r, commutative
        )
        for r in relations
    )
    pres = RingPresentation(
        base,
        gens,
        rels,
        mode,
        tuple(HellerWitness.allocate(i) for i in range(len(rels))),
        depth,
    )
    for r in rels:
        _check_symbols(r, pres)
    return pres


def present_table(
    labels: Sequence[str],
    unit: int,
    table: Sequence[Sequence[Sequence[int]]],
    mode: str | int = COMMUTATIVE,
    depth: int = DEFAULT_DEPTH,
) -> RingPresentation:
    """Present a ring with Z-basis ``labels`` and products b_i*b_j = sum_k table[i][j][k] b_k.

    The unit basis element becomes the constant 1; every other basis element
    is a generator.  Structure constants may be negative.
    """
    labels = tuple(labels)
    r = len(labels)

    def factor(k):
        return [] if k == unit else [labels[k]]

    commutative = _mode(mode) == COMMUTATIVE
    rels = []
    for i in range(r):
        for j in range(r):
            if unit in (i, j) or (commutative and j < i):
                continue
            terms = [[labels[i], labels[j]]]
            terms += [[-c, *factor(k)] for k, c in enumerate(table[i][j]) if c]
            rels.append(terms)
    gens = [x for k, x in enumerate(labels) if k != unit]
    return present("Z", gens, rels, mode, depth)


# ---------------------------------------------------------------------------
# Elements


@dataclass(frozen=True)
class PresentedRingElement:
    """An element of a presented ring, stored as an unreduced polynomial."""

    presentation: RingPresentation = field(repr=False)
    poly: tuple

    def _coerce(self, other):
        if isinstance(other, PresentedRingElement):
            if other.presentation != self.presentation:
                raise ValueError("elements of different presentations")
            return other
        if isinstance(other, int):
            return self.presentation.const(other)
        return None

    def __add__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        out = dict(self.poly)
        for m, c in o.poly:
            out[m] = out.get(m, 0) + c
        return PresentedRingElement(self.presentation, _freeze({m: c for m, c in out.items() if c}))

    __radd__ = __add__

    def __neg__(self):
        return PresentedRingElement(self.presentation, tuple((m, -c) for m, c in self.poly))

    def __sub__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return self + (-o)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        mon = self.presentation._monoid
        out: Poly = {}
        for m1, c1 in self.poly:
            for m2, c2 in o.poly:
                m = mon.mul(m1, m2)
                out[m] = out.get(m, 0) + c1 * c2
        return PresentedRingElement(self.presentation, _freeze({m: c for m, c in out.items() if c}))

    def __rmul__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return o * self

    def __pow__(self, e: int):
        out = self.presentation.one()
        for _ in range(e):
            out = out * self
        return out

    def __eq__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        verdict = equal(self, o)
        if verdict.value is None:
            raise ValueError(f"equality undecided at depth {verdict.depth}")
        return verdict.value

    def __hash__(self):
        return hash(_freeze(self.presentation._system.reduce(dict(self.poly))))

    def reduced(self) -> Poly:
        return self.presentation._system.reduce(dict(self.poly))

    @property
    def normal_form(self) -> FormalExpression:
        return _to_expression(self.presentation, self.reduced())

    def evaluate(self, images: Mapping[str, object], base_map: Callable | Mapping | None = None, one=None):
        """Image under generators -> images; ``one`` places integer constants in the target."""
        return _evaluate_poly(self.presentation, dict(self.poly), images, base_map, one)

    def __str__(self):
        return str(self.normal_form)


def _to_expression(pres: RingPresentation, p: Poly) -> FormalExpression:
    """Integer-coefficient expression; denominators are rewritten through localization generators."""
    sys = pres._system
    mon = pres._monoid
    symbols = pres._symbols
    loc = _localization_generators(pres)
    terms = []
    for m in sorted(p, key=mon.key, reverse=True):
        c = Fraction(p[m])
        factors: list[Factor] = []
        if c.denominator != 1:
            prod = math.prod(n for n, _ in loc)
            k = 0
            while (prod**k) % c.denominator:
                k += 1
            factors.append(c.numerator * prod**k // c.denominator)
            for _, g in loc:
                factors += [g] * k
        elif c != 1 or mon.is_one(m):
            factors.append(int(c))
        factors += [symbols[i] for i in mon.letters(m)]
        if sys.coeffs.modulus and len(factors) and isinstance(factors[0], int):
            factors[0] %= sys.coeffs.modulus
        terms.append(factors)
    return FormalExpression.of(terms, pres.commutative)


def _localization_generators(pres: RingPresentation) -> list[tuple[int, str]]:
    """(n, x) for each relation of the form n*x - 1 (with n > 1 after a sign flip)."""
    out = []
    mon = pres._monoid
    for rel in pres._encoded_relations:
        one = rel.get(mon.one())
        if len(rel) != 2 or one not in (1, -1):
            continue
        (m,) = [m for m in rel if not mon.is_one(m)]
        n = -rel[m] * one
        if mon.degree(m) == 1 and n > 1:
            out.append((n, pres._symbols[mon.letters(m)[0]]))
    return out


# ---------------------------------------------------------------------------
# Homomorphisms to Z/m and equality


def _evaluate_poly(pres: RingPresentation, p: Poly, images: Mapping, base_map=None, one=None):
    mon = pres._monoid
    symbols = pres._symbols
    lookup = _image_lookup(pres, images, base_map)
    total = 0 if one is None else 0 * one
    for m, c in p.items():
        acc = c if one is None else c * one
        for i in mon.letters(m):
            acc = acc * lookup(symbols[i])
        total = total + acc
    return total


def _image_lookup(pres: RingPresentation, images: Mapping, base_map):
    def lookup(sym: str):
        if sym in images:
            return images[sym]
        if base_map is None:
            raise KeyError(f"no image for {sym}")
        return base_map[sym] if isinstance(base_map, Mapping) else base_map(sym)

    return lookup


def _eval_mod(pres: RingPresentation, p: Poly, values: Sequence[int], m: int) -> int | None:
    """Value mod m at the assignment (internal symbol order), or None if a denominator is not invertible."""
    mon = pres._monoid
    total = 0
    for mono, c in p.items():
        c = Fraction(c)
        if math.gcd(c.denominator, m) != 1:
            return None
        acc = c.numerator * pow(c.denominator, -1, m)
        for i, e in enumerate(mono) if mon.commutative else ((i, 1) for i in mono):
            if e:
                acc = acc * pow(values[i], e, m)
        total += acc
    return total % m


SEPARATION_SEARCH = 200_000


def homomorphisms_to_zmod(pres: RingPresentation, m: int, limit: int = SEPARATION_SEARCH):
    """All assignments of the (internal) symbols in Z/m killing every relation, by exhaustive search."""
    k = len(pres._symbols)
    if m**k > limit:
        return
    rels = pres._encoded_relations
    for values in itertools.product(range(m), repeat=k):
        if all(_eval_mod(pres, r, values, m) == 0 for r in rels):
            yield values


def _mat_mul(a, b, m):
    return (
        ((a[0][0] * b[0][0] + a[0][1] * b[1][0]) % m, (a[0][0] * b[0][1] + a[0][1] * b[1][1]) % m),
        ((a[1][0] * b[0][0] + a[1][1] * b[1][0]) % m, (a[1][0] * b[0][1] + a[1][1] * b[1][1]) % m),
    )


def _eval_matrix(pres: RingPresentation, p: Poly, values, m: int):
    """Value in 2x2 matrices over Z/m (words evaluated in order), or None on a bad denominator."""
    mon = pres._monoid
    total = ((0, 0), (0, 0))
    for mono, c in p.items():
        c = Fraction(c)
        if math.gcd(c.denominator, m) != 1:
            return None
        s = c.numerator * pow(c.denominator, -1, m) % m
        acc = ((s, 0), (0, s))
        for i in mon.letters(mono):
            acc = _mat_mul(acc, values[i], m)
        total = tuple(tuple((x + y) % m for x, y in zip(r1, r2)) for r1, r2 in zip(total, acc))
    return total


MATRIX_MODULI = (2, 3)


def homomorphisms_to_matrices(pres: RingPresentation, m: int, limit: int = SEPARATION_SEARCH):
    """Assignments of the symbols in M_2(Z/m) killing every relation (exhaustive, small cases only)."""
    k = len(pres._symbols)
    if m ** (4 * k) > limit:
        return
    zero = ((0, 0), (0, 0))
    mats = [((a, b), (c, d)) for a, b, c, d in itertools.product(range(m), repeat=4)]
    rels = pres._encoded_relations
    for values in itertools.product(mats, repeat=k):
        if all(_eval_matrix(pres, r, values, m) == zero for r in rels):
            yield values


@dataclass(frozen=True)
class SeparatingHomomorphism:
    """A ring map to Z/m (size 1) or to 2x2 matrices over Z/m, under which two elements differ."""

    modulus: int
    images: dict
    values: tuple
    size: int = 1

    def to_json(self) -> dict:
        def conv(v):
            return [list(r) for r in v] if isinstance(v, tuple) else v

        return {
            "modulus": self.modulus,
            "matrix_size": self.size,
            "images": {k: conv(v) for k, v in self.images.items()},
            "values": [conv(v) for v in self.values],
        }


SEPARATION_BUDGET = 40_000


def find_separating_homomorphism(
    a: PresentedRingElement,
    b: PresentedRingElement,
    max_modulus: int = 200,
    budget: int = SEPARATION_BUDGET,
) -> SeparatingHomomorphism | None:
    """Search ring maps to Z/m for m <= max_modulus, then (associative mode) to M_2(Z/m).

    Each of the two searches stops after ``budget`` candidate assignments.
    """
    pres = a.presentation
    pa, pb = dict(a.poly), dict(b.poly)
    k = len(pres._symbols)
    spent = 0
    for m in range(2, max_modulus + 1):
        spent += m**k
        if spent > budget:
            break
        for values in homomorphisms_to_zmod(pres, m):
            va, vb = _eval_mod(pres, pa, values, m), _eval_mod(pres, pb, values, m)
            if va is not None and vb is not None and va != vb:
                return SeparatingHomomorphism(m, dict(zip(pres._symbols, values)), (va, vb))
    if not pres.commutative:
        for m in MATRIX_MODULI:
            for values in homomorphisms_to_matrices(pres, m, budget):
                va, vb = _eval_matrix(pres, pa, values, m), _eval_matrix(pres, pb, values, m)
                if va is not None and vb is not None and va != vb:
                    return SeparatingHomomorphism(m, dict(zip(pres._symbols, values)), (va, vb), 2)
    return None


@dataclass(frozen=True)
class EqualityVerdict:
    """status is 'equal', 'distinct' or 'inconclusive'; ``value`` is True, False or None."""

    status: str
    depth: int
    confluent: bool
    normal_form_difference: FormalExpression
    separating: SeparatingHomomorphism | None = None

    @property
    def value(self) -> bool | None:
        return {"equal": True, "distinct": False}.get(self.status)

    def to_json(self) -> dict:
        return {
            "status": self.status,
            "depth": self.depth,
            "confluent": self.confluent,
            "normal_form_difference": self.normal_form_difference.to_json(),
            "separating": None if self.separating is None else self.separating.to_json(),
        }


def equal(a: PresentedRingElement | int, b: PresentedRingElement | int, search_separating: bool = True) -> EqualityVerdict:
    """Decide a == b in the presented ring.

    A zero normal form of a - b proves equality.  A nonzero normal form in a
    confluent system proves inequality; a ring map to some Z/m separating a
    and b is attached when the search finds one.  Otherwise the verdict is
    inconclusive at the completion depth.
    """
    if not isinstance(a, PresentedRingElement):
        a, b = b, a
    b = a._coerce(b)
    pres = a.presentation
    sys = pres._system
    diff = sys.reduce(dict((a - b).poly))
    nf = _to_expression(pres, diff)
    if not diff:
        return EqualityVerdict("equal", sys.passes, sys.confluent, nf)
    sep = find_separating_homomorphism(a, b) if search_separating else None
    if sep is not None or sys.confluent:
        return EqualityVerdict("distinct", sys.passes, sys.confluent, nf, sep)
    return EqualityVerdict("inconclusive", pres.depth, sys.confluent, nf)


# ---------------------------------------------------------------------------
# Versal factorization


@dataclass(frozen=True)
class VersalCertificate:
    presentation: RingPresentation
    images: dict
    relation_images: tuple
    witnesses: tuple[HellerWitness, ...]

    @property
    def ok(self) -> bool:
        return all(w.discharged and w.check() for w in self.witnesses)

    def to_json(self) -> dict:
        return {
            "presentation": self.presentation.to_json(),
            "images": {k: _json_value(v) for k, v in self.images.items()},
            "relation_images": [_json_value(v) for v in self.relation_images],
            "witnesses": [w.to_json() for w in self.witnesses],
            "ok": self.ok,
        }


def _json_value(v):
    if isinstance(v, int):
        return v
    if isinstance(v, Fraction):
        return str(v)
    if isinstance(v, PresentedRingElement):
        return v.normal_form.to_json()
    if hasattr(v, "to_json"):
        return v.to_json()
    if hasattr(v, "coeffs"):
        return list(v.coeffs)
    return str(v)


def _is_zero(x) -> bool:
    if isinstance(x, PresentedRingElement):
        verdict = equal(x, x.presentation.zero(), search_separating=False)
        if verdict.value is None:
            raise ValueError(f"cannot decide whether {x} vanishes (depth {verdict.depth})")
        return verdict.value
    return x == 0


def _divide_exact(x, n: int):
    """x / n inside the target ring, or None when n does not divide x there."""
    if isinstance(x, bool):
        return None
    if isinstance(x, int):
        return x // n if x % n == 0 else None
    if isinstance(x, Rational):
        return Fraction(x) / n
    coeffs = getattr(x, "coeffs", None)
    if coeffs is not None and all(isinstance(c, int) for c in coeffs):
        # coordinates in a Z-basis: divisible iff every coordinate is
        if any(c % n for c in coeffs):
            return None
        return dataclasses.replace(x, coeffs=tuple(c // n for c in coeffs))
    return None


def _solve_missing(pres: RingPresentation, images: dict, base_map, one) -> None:
    """Fill images of generators that occur in some relation as n*x + (terms without x)."""
    mon = pres._monoid
    changed = True
    while changed:
        changed = False
        for idx, rel in enumerate(pres.relations):
            p = pres._encode(rel)
            missing = {pres._symbols[i] for m in p for i in mon.letters(m)} - set(images)
            missing -= set(pres.base_constants)
            if len(missing) != 1:
                continue
            (x,) = missing
            xi = pres._symbols.index(x)
            linear = [m for m in p if xi in mon.letters(m)]
            if linear != [mon.gen(xi)]:
                continue
            n = p[mon.gen(xi)]
            rest = {m: c for m, c in p.items() if m != mon.gen(xi)}
            value = -_evaluate_poly(pres, rest, images, base_map, one)
            solved = _divide_exact(value, n)
            if solved is None:
                raise VersalFactorizationError(
                    idx, rel, f"has no solution for {x}: {n} does not divide {_json_value(value)} in the target"
                )
            images[x] = solved
            changed = True


def verify_versal_factorization(
    pres: RingPresentation,
    images: Mapping[str, object],
    base_map: Callable | Mapping | None = None,
    target_one=None,
) -> VersalCertificate:
    """Check that generator images send every relation to zero, discharging the Heller witnesses.

    Generators without an image are solved for when they occur linearly in a
    relation; if the target lacks the required quotient the offending
    relation is named.  ``target_one`` is the unit of the target ring, used
    to place integer constants there (plain integers otherwise).
    """
    images = dict(images)
    _solve_missing(pres, images, base_map, target_one)
    unknown = set(pres.generators) - set(images)
    if unknown:
        raise VersalFactorizationError(-1, FormalExpression(()), f"leaves generators {sorted(unknown)} unassigned")
    values = []
    for idx, rel in enumerate(pres.relations):
        v = _evaluate_poly(pres, pres._encode(rel), images, base_map, target_one)
        if not _is_zero(v):
            raise VersalFactorizationError(idx, rel, f"maps to {_json_value(v)}, not 0")
        values.append(v)
    if pres._base_relations:
        # the base ring must map by a ring homomorphism (central in associative mode)
        for rel in pres._base_relations:
            v = _evaluate_poly(pres, rel, images, base_map, target_one)
            if not _is_zero(v):
                expr = FormalExpression.of(
                    [[c] + [pres._symbols[i] for i in pres._monoid.letters(m)] for m, c in rel.items()],
                    pres.commutative,
                )
                raise VersalFactorizationError(-1, expr, f"base relation maps to {_json_value(v)}, not 0")
    witnesses = tuple(w.discharge() for w in pres.witnesses)
    return VersalCertificate(pres, images, tuple(values), witnesses)


# ---------------------------------------------------------------------------
# Duality


@dataclass(frozen=True)
class DualFixedSubring:
    """Quotient by the ideal generated by r - r*, and generators of the fixed subring."""

    presentation: RingPresentation
    quotient: RingPresentation
    fixed_generators: tuple[PresentedRingElement, ...]
    identity: bool

    def to_json(self) -> dict:
        return {
            "quotient": self.quotient.to_json(),
            "fixed_generators": [g.normal_form.to_json() for g in self.fixed_generators],
            "identity": self.identity,
        }


def dual_fixed_subring(
    pres: RingPresentation, involution: Mapping[str, PresentedRingElement | Iterable]
) -> DualFixedSubring:
    """Quotient by (r - r*) and the fixed subring, for an involution given on generators.

    The ideal generated by all r - r* is generated by g - g* for generators g.
    When the involution permutes generators, the fixed subring is generated by
    the fixed generators and, for each swapped pair u, v, by u + v and u*v.
    Otherwise the listed elements g + g*, g*g* are fixed but need not generate.
    """
    inv = {g: (v if isinstance(v, PresentedRingElement) else pres.element(v)) for g, v in involution.items()}
    for g in pres.generators:
        inv.setdefault(g, pres.gen(g))
    base_map = {c: pres.const(c) for c in pres.base_constants}
    verify_versal_factorization(pres, inv, base_map)
    for g in pres.generators:
        twice = inv[g].evaluate(inv, base_map)
        if not equal(twice, pres.gen(g), search_separating=False).value:
            raise ValueError(f"map is not an involution on {g}")
    identity = all(equal(inv[g], pres.gen(g), search_separating=False).value for g in pres.generators)
    quotient = pres
    if not identity:
        for g in pres.generators:
            diff = (pres.gen(g) - inv[g]).normal_form
            if not equal(quotient.element(diff), 0, search_separating=False).value:
                quotient = present(pres.base, pres.generators, list(quotient.relations) + [diff], pres.mode, pres.depth)
    fixed: list[PresentedRingElement] = []
    if identity:
        fixed = [pres.gen(g) for g in pres.generators]
    else:
        seen: set[str] = set()
        for g in pres.generators:
            if g in seen:
                continue
            image = inv[g]
            partner = next((h for h in pres.generators if equal(image, pres.gen(h), search_separating=False).value), None)
            if partner == g:
                fixed.append(pres.gen(g))
                seen.add(g)
            elif partner is not None:
                fixed += [pres.gen(g) + pres.gen(partner), pres.gen(g) * pres.gen(partner)]
                seen |= {g, partner}
            else:
                fixed += [pres.gen(g) + image, pres.gen(g) * image]
                seen.add(g)
    for f in fixed:
        if not equal(f.evaluate(inv, base_map), f, search_separating=False).value:
            raise AssertionError(f"{f} is not fixed by the involution")
    return DualFixedSubring(pres, quotient, tuple(fixed), identity)
