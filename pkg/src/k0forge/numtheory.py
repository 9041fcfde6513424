"""Primes l for which Z[zeta_l]/(p) contains GF(p^(q^n)), and the gcd/valuation lemma."""

from __future__ import annotations

import math
from dataclasses import dataclass, replace

from . import polyfp
from .arith import FactorizationIncomplete, factorint, is_prime, require_prime, valuation
from .cyclotomic import residue_field_factor, splitting_data
from .errors import VerificationError
from .finite_field import FieldElement, FiniteField, find_root
from .polyfp import Poly

# primes l up to this size are also checked against a full factorization of Phi_l mod p
SPLITTING_CROSS_CHECK_LIMIT = 300


class Inconclusive(Exception):
    """The search budget ran out before a prime could be certified."""

    def __init__(self, message: str, bound: int, cofactors: tuple[int, ...] = ()):
        super().__init__(message)
        self.bound = bound
        self.cofactors = cofactors


@dataclass(frozen=True)
class FieldTarget:
    """The finite field GF(p^(q^n))."""

    p: int
    q: int
    n: int

    def __post_init__(self):
        require_prime(self.p, "p")
        require_prime(self.q, "q")
        if self.n < 0:
            raise ValueError("n must be nonnegative")

    @property
    def degree(self) -> int:
        return self.q**self.n


def _levels(p: int, q: int, n: int) -> tuple[int, int]:
    """(p^(q^n) - 1, p^(q^(n-1)) - 1)."""
    if n < 1:
        raise ValueError("n must be at least 1")
    lower = p ** (q ** (n - 1)) - 1
    upper = p ** (q**n) - 1
    return upper, lower


@dataclass(frozen=True)
class GcdLemma:
    p: int
    q: int
    n: int
    value: int


def gcd_lemma_check(p: int, q: int, n: int) -> GcdLemma:
    """Check gcd((p^(q^n)-1)/(p^(q^(n-1))-1), p^(q^(n-1))-1) == gcd(q, p^(q^(n-1))-1)."""
    require_prime(p, "p")
    require_prime(q, "q")
    upper, lower = _levels(p, q, n)
    quotient, rem = divmod(upper, lower)
    if rem:
        raise VerificationError(f"p^(q^(n-1)) - 1 does not divide p^(q^n) - 1 at {(p, q, n)}")
    lhs = math.gcd(quotient, lower)
    rhs = math.gcd(q, lower)
    if lhs != rhs:
        raise VerificationError(f"gcd lemma fails at {(p, q, n)}: {lhs} != {rhs}")
    return GcdLemma(p, q, n, lhs)


@dataclass(frozen=True)
class EllCertificate:
    """A prime l with ord_l(p) = q^n, certified by l | p^(q^n)-1 and l not dividing p^(q^(n-1))-1."""

    p: int
    q: int
    n: int
    requested_n: int
    ell: int
    ord: int
    divides_upper: bool
    divides_lower: bool
    factorization_complete: bool

    def verify(self) -> bool:
        """Recompute every claim from scratch."""
        if not is_prime(self.ell) or self.ell <= 2 or self.ell == self.p:
            return False
        upper = pow(self.p, self.q**self.n, self.ell) == 1
        lower = pow(self.p, self.q ** (self.n - 1), self.ell) == 1
        # the order divides q^n but not q^(n-1), so it is exactly q^n
        return (
            upper
            and not lower
            and self.ord == self.q**self.n
            and (self.divides_upper, self.divides_lower) == (upper, lower)
        )

    def to_json(self) -> dict:
        return {
            "p": self.p,
            "q": self.q,
            "n": self.n,
            "requested_n": self.requested_n,
            "ell": self.ell,
            "ord": self.ord,
            "divides_upper": self.divides_upper,
            "divides_lower": self.divides_lower,
            "factorization_complete": self.factorization_complete,
        }


def primitive_part(p: int, q: int, n: int) -> int:
    """The quotient (p^(q^n)-1)/(p^(q^(n-1))-1) with every prime shared with p^(q^(n-1))-1 removed.

    Each remaining prime factor l has ord_l(p) = q^n exactly.
    """
    upper, lower = _levels(p, q, n)
    r = upper // lower
    g = math.gcd(r, lower)
    while g > 1:
        r //= g
        g = math.gcd(r, g)
    return r


def _least_prime_factor(r: int, search_bound: int) -> tuple[int, bool]:
    """(smallest prime factor found, whether the factorization was complete)."""
    if is_prime(r):
        return r, True
    try:
        factors = factorint(r, trial_bound=min(search_bound, 10**6), rho_iterations=search_bound)
        return min(factors), True
    except FactorizationIncomplete as exc:
        if exc.partial:
            return min(exc.partial), False
        raise Inconclusive(
            f"no prime factor of the primitive part found within bound {search_bound}",
            search_bound,
            tuple(exc.cofactors),
        ) from None


def _certificate_at(p: int, q: int, n: int, requested_n: int, search_bound: int) -> EllCertificate | None:
    r = primitive_part(p, q, n)
    if r == 1:
        return None
    ell, complete = _least_prime_factor(r, search_bound)
    cert = EllCertificate(p, q, n, requested_n, ell, q**n, True, False, complete)
    if not cert.verify():
        raise VerificationError(f"certificate for l={ell} at {(p, q, n)} does not verify")
    return cert


def quotient_valuation(p: int, q: int, n: int) -> int:
    upper, lower = _levels(p, q, n)
    return valuation(upper // lower, q)


def lte_quotient_valuation(p: int, q: int, n: int) -> int:
    """Prediction of v_q((p^(q^n)-1)/(p^(q^(n-1))-1)) for q | p-1 by lifting the exponent."""
    if (p - 1) % q:
        raise ValueError("q must divide p - 1")
    if q == 2 and n == 1:
        return valuation(p + 1, 2)
    return 1


MAX_ESCALATION = 64


def valuation_escalation(p: int, q: int, start_n: int, search_bound: int = 10**6) -> tuple[int, EllCertificate]:
    """Smallest n >= start_n where the quotient has q-adic valuation exactly 1, with a certificate prime.

    At such n, gcd(quotient, p^(q^(n-1))-1) = q, so any other prime factor of
    the quotient is a valid l.  Observed valuations are checked against the
    lifting-the-exponent prediction.
    """
    require_prime(p, "p")
    require_prime(q, "q")
    if (p - 1) % q:
        raise ValueError(f"q={q} does not divide p-1={p - 1}")
    for n in range(max(start_n, 1), max(start_n, 1) + MAX_ESCALATION):
        v = quotient_valuation(p, q, n)
        if v != lte_quotient_valuation(p, q, n):
            raise VerificationError(f"valuation {v} disagrees with lifting the exponent at {(p, q, n)}")
        if v == 1:
            cert = _certificate_at(p, q, n, start_n, search_bound)
            if cert is not None:
                return n, cert
    raise Inconclusive(f"no level found in {MAX_ESCALATION} steps from n={start_n}", MAX_ESCALATION)


def find_ell(target: FieldTarget, search_bound: int = 10**6) -> EllCertificate:
    """A prime l > 2 with ord_l(p) = q^m for the least workable m >= n.

    The least prime factor of the primitive part of the cyclotomic quotient is
    returned.  When that part is 1 (for instance p=3, q=2, n=1) the level is
    raised; the certificate records both the requested and the used n.
    ``search_bound`` caps the Pollard rho iterations per cofactor; exhausting
    it without any prime factor raises Inconclusive.
    """
    p, q, n = target.p, target.q, target.n
    if n < 1:
        raise ValueError("n must be at least 1")
    cert = _certificate_at(p, q, n, n, search_bound)
    if cert is not None:
        return cert
    if (p - 1) % q == 0:
        return replace(valuation_escalation(p, q, n + 1, search_bound)[1], requested_n=n)
    for m in range(n + 1, n + 1 + MAX_ESCALATION):
        cert = _certificate_at(p, q, m, n, search_bound)
        if cert is not None:
            return cert
    raise Inconclusive(f"no level found in {MAX_ESCALATION} steps from n={n}", MAX_ESCALATION)


@dataclass(frozen=True)
class ContainmentWitness:
    """Outcome of embedding GF(p^(q^n)) into a residue field of Z[zeta_l]/(p).

    When it holds, ``root`` is a root of ``target_modulus`` (the least
    irreducible of degree q^n) in GF(p)[x]/(residue_factor).
    """

    holds: bool
    p: int
    ell: int
    target_degree: int
    residue_degree: int
    residue_factor: Poly = ()
    target_modulus: Poly = ()
    root: Poly = ()

    def __bool__(self) -> bool:
        return self.holds

    def to_json(self) -> dict:
        return {
            "holds": self.holds,
            "p": self.p,
            "ell": self.ell,
            "target_degree": self.target_degree,
            "residue_degree": self.residue_degree,
            "residue_factor": list(self.residue_factor),
            "target_modulus": list(self.target_modulus),
            "root": list(self.root),
        }


def containment_check(cert: EllCertificate, target: FieldTarget) -> ContainmentWitness:
    """Decide whether GF(p^(q^n)) embeds in Z[zeta_l]/(p) and exhibit the embedding.

    The residue fields have degree ord_l(p); the target embeds iff its degree
    divides that.  An embedding is certified by an explicit root of the
    target's defining polynomial in one residue field.
    """
    if cert.p != target.p:
        raise ValueError("certificate and target have different characteristic")
    if not cert.verify():
        raise VerificationError(f"certificate for l={cert.ell} does not verify")
    p, ell, d, t = cert.p, cert.ell, cert.ord, target.degree
    if d % t:
        return ContainmentWitness(False, p, ell, t, d)
    g = residue_field_factor(p, ell, d)
    if ell <= SPLITTING_CROSS_CHECK_LIMIT:
        split = splitting_data(p, ell)
        if split.degree != d or g not in split.irreducible_factors:
            raise VerificationError(f"residue factor {g} disagrees with the factorization of Phi_{ell} mod {p}")
    h = polyfp.least_irreducible(t, p)
    root = find_root(h, FiniteField(p, g))
    if root is None:
        raise VerificationError(f"no root of {h} in GF({p})[x]/{g}; certificate falsified")
    return ContainmentWitness(True, p, ell, t, d, g, h, root.coeffs)


def verify_containment(w: ContainmentWitness) -> bool:
    """Re-check a positive witness: the target modulus vanishes at the root."""
    if not w.holds:
        return w.residue_degree % w.target_degree != 0
    field = FiniteField(w.p, w.residue_factor)
    if polyfp.powmod((0, 1), w.ell, w.residue_factor, w.p) != (1,):
        return False
    x = FieldElement(field, w.root)
    value = field.zero()
    for c in reversed(w.target_modulus):
        value = value * x + c
    return not value
