"""Small integer helpers (factorisation of desk-scale orders, CRT)."""

from __future__ import annotations

from math import gcd


def factorize(n: int) -> dict[int, int]:
    if n < 1:
        raise ValueError(f"cannot factorize {n}")
    out: dict[int, int] = {}
    d = 2
    while d * d <= n:
        while n % d == 0:
            out[d] = out.get(d, 0) + 1
            n //= d
        d += 1
    if n > 1:
        out[n] = out.get(n, 0) + 1
    return out


def prime_divisors(n: int) -> list[int]:
    return sorted(factorize(n))


def is_prime(n: int) -> bool:
    return n >= 2 and factorize(n) == {n: 1}


def p_part(n: int, p: int) -> int:
    out = 1
    while n % p == 0:
        n //= p
        out *= p
    return out


def valuation(n: int, p: int) -> int:
    """p-adic valuation; valuation(0, p) is reported as a large sentinel."""
    if n == 0:
        return 1 << 30
    v = 0
    while n % p == 0:
        n //= p
        v += 1
    return v


def is_p_power(n: int, p: int) -> bool:
    return p_part(n, p) == n


def prime_power_base(n: int) -> int | None:
    """The prime p with n = p^a (a >= 1), or None."""
    f = factorize(n) if n > 1 else {}
    if len(f) == 1:
        return next(iter(f))
    return None


def crt_pair(a: int, m: int, b: int, n: int) -> int:
    """x with x = a mod m and x = b mod n, for coprime m, n."""
    if gcd(m, n) != 1:
        raise ValueError("moduli must be coprime")
    return (a + m * ((b - a) * pow(m, -1, n) % n)) % (m * n)
