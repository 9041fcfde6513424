"""Integer arithmetic shared across the package: primality, factoring, orders."""

from __future__ import annotations

import math
import random
from functools import lru_cache

# Deterministic Miller-Rabin witness set; exact for n < 3.3e24.
_MR_BASES = (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41)
_MR_DETERMINISTIC_LIMIT = 3317044064679887385961981
_TRIAL_LIMIT = 1 << 20


def is_prime_trial(n: int) -> bool:
    """Trial division up to sqrt(n)."""
    if n < 2:
        return False
    if n % 2 == 0:
        return n == 2
    d = 3
    while d * d <= n:
        if n % d == 0:
            return False
        d += 2
    return True


def _miller_rabin(n: int, a: int) -> bool:
    d, s = n - 1, 0
    while d % 2 == 0:
        d //= 2
        s += 1
    x = pow(a, d, n)
    if x in (1, n - 1):
        return True
    for _ in range(s - 1):
        x = x * x % n
        if x == n - 1:
            return True
    return False


def is_prime(n: int) -> bool:
    """Primality test.

    Trial division for n < 2**20, deterministic Miller-Rabin below 3.3e24,
    and 40 extra seeded random bases above that (probabilistic).
    """
    if n < _TRIAL_LIMIT:
        return is_prime_trial(n)
    for a in _MR_BASES:
        if n % a == 0:
            return False
    if not all(_miller_rabin(n, a) for a in _MR_BASES):
        return False
    if n < _MR_DETERMINISTIC_LIMIT:
        return True
    rng = random.Random(n)
    return all(_miller_rabin(n, rng.randrange(2, n - 1)) for _ in range(40))


def require_prime(n: int, name: str = "n") -> int:
    if not isinstance(n, int) or not is_prime(n):
        raise ValueError(f"{name}={n!r} is not prime")
    return n


@lru_cache(maxsize=None)
def primes_up_to(n: int) -> tuple[int, ...]:
    """All primes <= n (sieve of Eratosthenes)."""
    if n < 2:
        return ()
    sieve = bytearray([1]) * (n + 1)
    sieve[0] = sieve[1] = 0
    for i in range(2, math.isqrt(n) + 1):
        if sieve[i]:
            sieve[i * i :: i] = bytearray(len(range(i * i, n + 1, i)))
    return tuple(i for i, flag in enumerate(sieve) if flag)


def valuation(n: int, q: int) -> int:
    """q-adic valuation of a nonzero integer."""
    if n == 0:
        raise ValueError("valuation of 0 is infinite")
    v = 0
    while n % q == 0:
        n //= q
        v += 1
    return v


def pollard_rho(n: int, max_iter: int, seed: int = 1) -> int | None:
    """Brent's variant of Pollard rho. Returns a nontrivial factor or None.

    Deterministic: the polynomial constants come from ``seed``.
    """
    if n % 2 == 0:
        return 2
    for c in range(seed, seed + 8):
        y, r, q, g = 2, 1, 1, 1
        x = ys = y
        steps = 0
        while g == 1 and steps < max_iter:
            x = y
            for _ in range(r):
                y = (y * y + c) % n
            k = 0
            while k < r and g == 1:
                ys = y
                for _ in range(min(128, r - k)):
                    y = (y * y + c) % n
                    q = q * abs(x - y) % n
                g = math.gcd(q, n)
                k += 128
            steps += r
            r *= 2
        if g == n:
            g = 1
            while g == 1:
                ys = (ys * ys + c) % n
                g = math.gcd(abs(x - ys), n)
        if 1 < g < n:
            return g
    return None


class FactorizationIncomplete(Exception):
    """Raised when a factorization could not be completed within its budget."""

    def __init__(self, n: int, partial: dict[int, int], cofactors: list[int]):
        super().__init__(f"could not fully factor {n}; unfactored cofactors {cofactors}")
        self.n = n
        self.partial = partial
        self.cofactors = cofactors


def factorint(n: int, trial_bound: int = 10**5, rho_iterations: int = 10**6) -> dict[int, int]:
    """Prime factorization {prime: exponent} by trial division then Pollard rho.

    Raises FactorizationIncomplete if some composite cofactor resists rho
    within ``rho_iterations``.
    """
    if n < 1:
        raise ValueError("factorint expects a positive integer")
    out: dict[int, int] = {}
    for d in (2, 3):
        while n % d == 0:
            out[d] = out.get(d, 0) + 1
            n //= d
    d = 5
    while d <= trial_bound and d * d <= n:
        for dd in (d, d + 2):
            while n % dd == 0:
                out[dd] = out.get(dd, 0) + 1
                n //= dd
        d += 6
    stack = [n] if n > 1 else []
    stuck: list[int] = []
    while stack:
        m = stack.pop()
        if is_prime(m):
            out[m] = out.get(m, 0) + 1
            continue
        r = math.isqrt(m)
        if r * r == m:
            stack += [r, r]
            continue
        f = pollard_rho(m, rho_iterations)
        if f is None:
            stuck.append(m)
        else:
            stack += [f, m // f]
    if stuck:
        raise FactorizationIncomplete(n, out, sorted(stuck))
    return dict(sorted(out.items()))


def multiplicative_order(a: int, n: int) -> int:
    """Least d >= 1 with a**d == 1 mod n; requires gcd(a, n) == 1."""
    if n < 2 or math.gcd(a, n) != 1:
        raise ValueError(f"{a} is not a unit modulo {n}")
    if is_prime(n):
        group_order = n - 1
    else:
        group_order = 1
        for prime, e in factorint(n).items():
            group_order *= (prime - 1) * prime ** (e - 1)
    order = group_order
    for prime in factorint(group_order):
        while order % prime == 0 and pow(a, order // prime, n) == 1:
            order //= prime
    return order
