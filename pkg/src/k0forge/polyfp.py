"""Dense polynomials over GF(p).

A polynomial a_0 + a_1 x + ... + a_n x^n is the tuple (a_0, ..., a_n) with
entries in range(p) and a_n != 0; the zero polynomial is ().  All functions
take the modulus p explicitly and return normalized tuples.
"""

from __future__ import annotations

import random
from collections.abc import Iterable, Sequence

Poly = tuple[int, ...]


def normalize(a: Iterable[int], p: int) -> Poly:
    out = [c % p for c in a]
    while out and out[-1] == 0:
        out.pop()
    return tuple(out)


def degree(a: Poly) -> int:
    return len(a) - 1


def add(a: Poly, b: Poly, p: int) -> Poly:
    if len(a) < len(b):
        a, b = b, a
    return normalize([x + (b[i] if i < len(b) else 0) for i, x in enumerate(a)], p)


def sub(a: Poly, b: Poly, p: int) -> Poly:
    n = max(len(a), len(b))
    return normalize(
        [(a[i] if i < len(a) else 0) - (b[i] if i < len(b) else 0) for i in range(n)], p
    )


def scale(a: Poly, c: int, p: int) -> Poly:
    return normalize([c * x for x in a], p)


def mul(a: Poly, b: Poly, p: int) -> Poly:
    if not a or not b:
        return ()
    out = [0] * (len(a) + len(b) - 1)
    for i, x in enumerate(a):
        if x:
            for j, y in enumerate(b):
                out[i + j] += x * y
    return normalize(out, p)


def divmod_poly(a: Poly, b: Poly, p: int) -> tuple[Poly, Poly]:
    if not b:
        raise ZeroDivisionError("polynomial division by zero")
    r = list(a)
    db = len(b) - 1
    inv = pow(b[-1], -1, p)
    if len(r) <= db:
        return (), tuple(r)
    q = [0] * (len(r) - db)
    for i in range(len(r) - 1, db - 1, -1):
        c = r[i] * inv % p
        if c:
            q[i - db] = c
            for j in range(db + 1):
                r[i - db + j] = (r[i - db + j] - c * b[j]) % p
    return normalize(q, p), normalize(r[:db], p)


def mod(a: Poly, b: Poly, p: int) -> Poly:
    return divmod_poly(a, b, p)[1]


def monic(a: Poly, p: int) -> Poly:
    if not a:
        return a
    return scale(a, pow(a[-1], -1, p), p)


def gcd(a: Poly, b: Poly, p: int) -> Poly:
    while b:
        a, b = b, mod(a, b, p)
    return monic(a, p)


def inverse_mod(a: Poly, m: Poly, p: int) -> Poly:
    """Inverse of a modulo m by the extended Euclidean algorithm."""
    r0, r1 = m, mod(a, m, p)
    s0, s1 = (), (1,)
    while r1:
        q, r = divmod_poly(r0, r1, p)
        r0, r1 = r1, r
        s0, s1 = s1, sub(s0, mul(q, s1, p), p)
    if degree(r0) != 0:
        raise ZeroDivisionError("polynomial is not invertible modulo m")
    return scale(s0, pow(r0[0], -1, p), p)


def mulmod(a: Poly, b: Poly, m: Poly, p: int) -> Poly:
    return mod(mul(a, b, p), m, p)


def powmod(a: Poly, e: int, m: Poly, p: int) -> Poly:
    result: Poly = (1,) if len(m) > 1 else ()
    base = mod(a, m, p)
    while e:
        if e & 1:
            result = mulmod(result, base, m, p)
        e >>= 1
        if e:
            base = mulmod(base, base, m, p)
    return result


def evaluate(a: Poly, x: int, p: int) -> int:
    acc = 0
    for c in reversed(a):
        acc = (acc * x + c) % p
    return acc


def derivative(a: Poly, p: int) -> Poly:
    return normalize([i * c for i, c in enumerate(a)][1:], p)


def roots(a: Poly, p: int) -> list[int]:
    """All roots in GF(p) by exhaustive evaluation."""
    return [x for x in range(p) if evaluate(a, x, p) == 0]


def _frobenius_power(x_pow: Poly, f: Poly, p: int) -> Poly:
    return powmod(x_pow, p, f, p)


def is_irreducible(f: Poly, p: int) -> bool:
    """Ben-Or test: f irreducible iff gcd(x^(p^i) - x, f) == 1 for i <= deg/2."""
    n = degree(f)
    if n < 1:
        return False
    if n == 1:
        return True
    f = monic(f, p)
    x = (0, 1)
    h = x
    for _ in range(n // 2):
        h = _frobenius_power(h, f, p)
        if gcd(sub(h, x, p), f, p) != (1,):
            return False
    return True


def distinct_degree(f: Poly, p: int) -> list[tuple[int, Poly]]:
    """Distinct-degree factorization of a monic squarefree f."""
    out = []
    f = monic(f, p)
    x = (0, 1)
    h = x
    d = 0
    while degree(f) >= 2 * (d + 1):
        d += 1
        h = _frobenius_power(h, f, p)
        g = gcd(sub(h, x, p), f, p)
        if degree(g) > 0:
            out.append((d, g))
            f = divmod_poly(f, g, p)[0]
            h = mod(h, f, p)
    if degree(f) > 0:
        out.append((degree(f), f))
    return out


def _split_element(a: Poly, d: int, f: Poly, p: int) -> Poly:
    if p == 2:
        # trace map a + a^2 + ... + a^(2^(d-1))
        t = a
        acc = a
        for _ in range(d - 1):
            t = mulmod(t, t, f, p)
            acc = add(acc, t, p)
        return acc
    return sub(powmod(a, (p**d - 1) // 2, f, p), (1,), p)


def equal_degree(f: Poly, d: int, p: int, rng: random.Random) -> list[Poly]:
    """Cantor-Zassenhaus splitting of a monic squarefree f whose factors all have degree d."""
    n = degree(f)
    if n == d:
        return [f]
    while True:
        a = normalize([rng.randrange(p) for _ in range(n)], p)
        if degree(a) < 1:
            continue
        g = gcd(a, f, p)
        if 0 < degree(g) < n:
            break
        g = gcd(_split_element(a, d, f, p), f, p)
        if 0 < degree(g) < n:
            break
    return equal_degree(g, d, p, rng) + equal_degree(divmod_poly(f, g, p)[0], d, p, rng)


def factor_squarefree(f: Poly, p: int, seed: int = 0) -> list[Poly]:
    """Monic irreducible factors of a squarefree polynomial, sorted by (degree, coefficients).

    Randomized splitting uses a seeded generator, and sorting makes the output
    canonical regardless of the random choices.
    """
    f = monic(f, p)
    if degree(f) < 1:
        return []
    if gcd(f, derivative(f, p), p) != (1,):
        raise ValueError("polynomial is not squarefree mod p")
    rng = random.Random(seed)
    factors: list[Poly] = []
    for d, g in distinct_degree(f, p):
        factors += equal_degree(g, d, p, rng)
    return sorted(factors, key=sort_key)


def sort_key(a: Poly) -> tuple:
    """Order by degree, then by coefficients from the top down."""
    return (len(a), tuple(reversed(a)))


def from_int(code: int, p: int) -> Poly:
    """Polynomial whose base-p digits (low first) are its coefficients."""
    digits = []
    while code:
        code, r = divmod(code, p)
        digits.append(r)
    return tuple(digits)


def to_int(a: Poly, p: int) -> int:
    return sum(c * p**i for i, c in enumerate(a))


def least_irreducible(d: int, p: int) -> Poly:
    """Lexicographically least monic irreducible of degree d.

    Candidates x^d + r(x) are scanned with r in increasing base-p encoding,
    which compares coefficients from the highest degree down.
    """
    if d < 1:
        raise ValueError("degree must be positive")
    lead = p**d
    for r in range(lead):
        f = from_int(lead + r, p)
        if is_irreducible(f, p):
            return f
    raise AssertionError("no irreducible polynomial found")  # unreachable


def product(polys: Sequence[Poly], p: int) -> Poly:
    out: Poly = (1,)
    for f in polys:
        out = mul(out, f, p)
    return out
