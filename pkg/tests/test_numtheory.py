import math

import pytest
import sympy

from k0forge import polyfp
from k0forge.arith import valuation
from k0forge.errors import VerificationError
from k0forge.numtheory import (
    EllCertificate,
    FieldTarget,
    Inconclusive,
    containment_check,
    find_ell,
    gcd_lemma_check,
    lte_quotient_valuation,
    primitive_part,
    quotient_valuation,
    valuation_escalation,
    verify_containment,
)

PRIMES_13 = [2, 3, 5, 7, 11, 13]
PRIMES_7 = [2, 3, 5, 7]


def test_gcd_lemma_examples():
    assert gcd_lemma_check(3, 2, 2).value == 2 == math.gcd(80 // 8, 8)
    assert gcd_lemma_check(2, 3, 1).value == 1
    assert gcd_lemma_check(5, 2, 3).value == 2


@pytest.mark.parametrize("p", PRIMES_13)
@pytest.mark.parametrize("q", PRIMES_13)
def test_gcd_lemma_grid(p, q):
    for n in range(1, 5):
        lower = p ** (q ** (n - 1)) - 1
        expected = math.gcd(q, lower)
        assert gcd_lemma_check(p, q, n).value == expected


def test_gcd_lemma_preconditions():
    with pytest.raises(ValueError):
        gcd_lemma_check(4, 2, 1)
    with pytest.raises(ValueError):
        gcd_lemma_check(2, 3, 0)


def test_find_ell_examples():
    cert = find_ell(FieldTarget(2, 3, 1))
    assert (cert.ell, cert.ord) == (7, 3)
    cert = find_ell(FieldTarget(2, 2, 2))
    assert (cert.ell, cert.ord) == (5, 4)


def test_find_ell_escalates_when_no_prime_exists():
    # 3^2 - 1 = 8 has no odd prime factor, so the level must rise
    assert primitive_part(3, 2, 1) == 1
    cert = find_ell(FieldTarget(3, 2, 1))
    assert cert.requested_n == 1 and cert.n == 2 and cert.ell == 5
    assert cert.verify()


def brute_order(p, ell):
    return next(k for k in range(1, ell) if pow(p, k, ell) == 1)


@pytest.mark.parametrize("p", PRIMES_7)
@pytest.mark.parametrize("q", PRIMES_7)
@pytest.mark.parametrize("n", [1, 2])
def test_find_ell_grid_and_containment(p, q, n):
    target = FieldTarget(p, q, n)
    cert = find_ell(target)
    assert cert.verify()
    assert sympy.isprime(cert.ell) and cert.ell > 2 and cert.ell != p
    assert sympy.n_order(p, cert.ell) == cert.ord == q**cert.n
    assert cert.n >= n
    w = containment_check(cert, target)
    assert w.holds and verify_containment(w)
    assert polyfp.is_irreducible(w.target_modulus, p) and polyfp.degree(w.target_modulus) == q**n


def test_find_ell_returns_least_primitive_prime():
    for p, q, n in [(2, 3, 1), (2, 5, 1), (3, 5, 1), (5, 3, 2), (2, 2, 3)]:
        cert = find_ell(FieldTarget(p, q, n))
        # no smaller prime has order exactly q^n
        for ell in sympy.primerange(3, cert.ell):
            if ell != p:
                assert sympy.n_order(p, ell) != q**cert.n


def test_certificate_rejects_tampering():
    cert = find_ell(FieldTarget(2, 3, 1))
    forged = EllCertificate(2, 3, 1, 1, 13, 3, True, False, True)
    assert cert.verify() and not forged.verify()


def test_inconclusive_on_tiny_budget():
    # primitive part 2047 = 23 * 89 cannot be split with a single rho step
    target = FieldTarget(2, 11, 1)
    with pytest.raises(Inconclusive) as info:
        find_ell(target, search_bound=1)
    assert info.value.bound == 1 and info.value.cofactors == (2047,)
    assert find_ell(target).ell == 23


@pytest.mark.parametrize("p,q,top", [(3, 2, 10), (5, 2, 10), (7, 3, 10), (7, 2, 10), (13, 3, 8), (11, 5, 4)])
def test_valuations_match_lifting_the_exponent(p, q, top):
    for n in range(1, top + 1):
        direct = valuation(p ** (q**n) - 1, q) - valuation(p ** (q ** (n - 1)) - 1, q)
        assert quotient_valuation(p, q, n) == direct == lte_quotient_valuation(p, q, n)
    if q == 2:
        assert all(quotient_valuation(p, q, n) == 1 for n in range(2, top + 1))
    else:
        assert all(quotient_valuation(p, q, n) == 1 for n in range(1, top + 1))


def test_valuation_escalation():
    n, cert = valuation_escalation(3, 2, 1)
    assert n == 2 and cert.ell == 5
    n, cert = valuation_escalation(7, 3, 1)
    assert n == 1 and cert.verify() and cert.ord == 3
    with pytest.raises(ValueError):
        valuation_escalation(5, 3, 1)


def test_containment_examples():
    cert7 = find_ell(FieldTarget(2, 3, 1))
    w = containment_check(cert7, FieldTarget(2, 3, 1))
    assert w.holds and w.target_modulus == (1, 1, 0, 1)
    field_elems = [tuple(int(b) for b in f"{code:03b}"[::-1]) for code in range(8)]
    roots = [
        x
        for x in field_elems
        if not polyfp.mod(
            polyfp.add(polyfp.add(polyfp.mul(polyfp.mul(x, x, 2), x, 2), x, 2), (1,), 2), w.residue_factor, 2
        )
    ]
    assert polyfp.normalize(w.root, 2) in [polyfp.normalize(r, 2) for r in roots]

    cert5 = find_ell(FieldTarget(2, 2, 2))
    assert containment_check(cert5, FieldTarget(2, 2, 0)).holds
    miss = containment_check(cert5, FieldTarget(2, 3, 1))
    assert not miss.holds and verify_containment(miss)


def test_containment_large_residue_field():
    target = FieldTarget(7, 7, 2)
    cert = find_ell(target)
    assert cert.ell == 3529
    w = containment_check(cert, target)
    assert w.holds and verify_containment(w)


def test_containment_rejects_forged_certificate():
    forged = EllCertificate(2, 3, 1, 1, 13, 3, True, False, True)
    with pytest.raises(VerificationError):
        containment_check(forged, FieldTarget(2, 3, 1))
