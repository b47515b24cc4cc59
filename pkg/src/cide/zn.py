"""Arithmetic over Z/nZ with factor-revealing failure semantics.

Residues are plain Python ints kept in canonical form 0 <= x < n at all
times; every function here assumes (and returns) canonical representatives.
When an operation that would be well defined over a field hits a zero
divisor, the non-trivial gcd with n is surfaced through FactorFound: for a
primality prover a revealed factor is a success, not an error.
"""

from __future__ import annotations

import hashlib
from dataclasses import dataclass
from math import gcd
from typing import Optional

DEFAULT_SEED = 0x1CEB00DA


class FactorFound(Exception):
    """A non-trivial factor of the ambient modulus was revealed."""

    def __init__(self, d: int, n: Optional[int] = None):
        self.d = d
        self.n = n
        super().__init__(f"nontrivial factor {d}" + (f" of {n}" if n else ""))


class CompositeWitness(Exception):
    """Definite evidence of compositeness that is not a factor."""

    def __init__(self, reason: str, data=None):
        self.reason = reason
        self.data = data
        super().__init__(reason)


class OpCounter:
    """Weighted count of base-ring work, shared by prover and verifier.

    Weights: one modular multiplication = 1, a modular exponentiation with
    e-bit exponent = 1.5 * e, one inversion = 2.  The absolute scale is
    arbitrary; only ratios between runs using the same weights are meaningful.
    """

    __slots__ = ("total",)

    def __init__(self):
        self.total = 0

    def add(self, k):
        self.total += k

    def snapshot(self) -> int:
        return self.total


OPS = OpCounter()


@dataclass(frozen=True)
class Modulus:
    """An odd test modulus n >= 2."""

    n: int

    def __post_init__(self):
        if self.n < 2:
            raise ValueError("modulus must be >= 2")


class Unit:
    __slots__ = ("inverse",)

    def __init__(self, inverse: int):
        self.inverse = inverse

    def __repr__(self):
        return f"Unit({self.inverse})"


class Factor:
    __slots__ = ("d",)

    def __init__(self, d: int):
        self.d = d

    def __repr__(self):
        return f"Factor({self.d})"


class Zero:
    def __repr__(self):
        return "Zero()"


def try_invert(x: int, n: int):
    """Classify x mod n: Unit(inverse), Factor(d) with 1 < d < n, or Zero()."""
    x %= n
    if x == 0:
        return Zero()
    try:
        OPS.add(2)
        return Unit(pow(x, -1, n))
    except ValueError:
        d = gcd(x, n)
        return Factor(d)


def invert(x: int, n: int) -> int:
    """Modular inverse; raises FactorFound on a zero divisor, ZeroDivisionError on 0."""
    x %= n
    if x == 0:
        raise ZeroDivisionError("inversion of zero residue")
    try:
        OPS.add(2)
        return pow(x, -1, n)
    except ValueError:
        raise FactorFound(gcd(x, n), n) from None


def powmod(a: int, e: int, n: int) -> int:
    """pow(a, e, n) with operation accounting."""
    OPS.add(1 + (3 * e.bit_length()) // 2)
    return pow(a, e, n)


def _witness_stream(seed: int, n: int):
    """Deterministic Miller-Rabin bases derived from a counter-based hash."""
    counter = 0
    width = (n.bit_length() + 15) // 8
    while True:
        h = hashlib.sha256(seed.to_bytes(16, "big", signed=False)
                           + counter.to_bytes(8, "big")).digest()
        a = 2 + int.from_bytes(h[:width], "big") % (n - 3)
        yield a
        counter += 1


def strong_pseudoprime(n: int, rounds: int = 20, seed: int = DEFAULT_SEED) -> bool:
    """Miller-Rabin with a deterministic seeded witness schedule.

    False is a proof of compositeness; True means n is a strong pseudoprime
    for all chosen bases (error probability < 4**-rounds for random input).
    """
    if n < 3 or n % 2 == 0:
        if n == 2:
            return True
        raise ValueError("strong_pseudoprime expects odd n >= 3")
    if n == 3:
        return True
    s, t = 0, n - 1
    while t % 2 == 0:
        s += 1
        t //= 2
    stream = _witness_stream(seed, n)
    for _ in range(rounds):
        a = next(stream)
        x = powmod(a, t, n)
        if x == 1 or x == n - 1:
            continue
        for _ in range(s - 1):
            x = x * x % n
            OPS.add(1)
            if x == n - 1:
                break
        else:
            return False
    return True


def miller_rabin_witness(n: int, rounds: int = 20, seed: int = DEFAULT_SEED) -> Optional[int]:
    """Return a witness base proving n composite, or None if none found."""
    if n % 2 == 0:
        return 2
    s, t = 0, n - 1
    while t % 2 == 0:
        s += 1
        t //= 2
    stream = _witness_stream(seed, n)
    for _ in range(rounds):
        a = next(stream)
        x = powmod(a, t, n)
        if x == 1 or x == n - 1:
            continue
        for _ in range(s - 1):
            x = x * x % n
            OPS.add(1)
            if x == n - 1:
                break
        else:
            return a
    return None


def jacobi(a: int, n: int) -> int:
    """Jacobi symbol (a/n) for odd positive n."""
    if n <= 0 or n % 2 == 0:
        raise ValueError("jacobi requires odd positive n")
    a %= n
    result = 1
    while a:
        while a % 2 == 0:
            a //= 2
            if n % 8 in (3, 5):
                result = -result
        a, n = n, a
        if a % 4 == 3 and n % 4 == 3:
            result = -result
        a %= n
    return result if n == 1 else 0


class NotSquare:
    def __repr__(self):
        return "NotSquare()"


def sqrt_mod(a: int, n: int):
    """Square root of a modulo n, treating n as prime (Tonelli-Shanks).

    Returns a root r with r*r == a (mod n), or NotSquare() when the Euler
    criterion fails.  n is usually only a strong pseudoprime here: any
    revealed zero divisor raises FactorFound and an internally inconsistent
    run (Euler test passed but no root emerges) raises CompositeWitness.
    """
    a %= n
    if a == 0:
        return 0
    if n == 2:
        return a
    g = gcd(a, n)
    if 1 < g < n:
        raise FactorFound(g, n)
    euler = powmod(a, (n - 1) // 2, n)
    if euler == n - 1:
        return NotSquare()
    if euler != 1:
        raise CompositeWitness("euler-criterion", (a, n, euler))
    if n % 4 == 3:
        r = powmod(a, (n + 1) // 4, n)
        if r * r % n != a:
            raise CompositeWitness("sqrt-inconsistent", (a, n, r))
        return r
    # Tonelli-Shanks; the non-residue search is deterministic.
    q, s = n - 1, 0
    while q % 2 == 0:
        q //= 2
        s += 1
    z = 2
    while jacobi(z, n) != -1:
        z += 1
        if z > 1000:
            raise CompositeWitness("no-nonresidue", (n,))
    c = powmod(z, q, n)
    r = powmod(a, (q + 1) // 2, n)
    t = powmod(a, q, n)
    m = s
    for _ in range(2 * n.bit_length() + 16):
        if t == 1:
            if r * r % n != a:
                raise CompositeWitness("sqrt-inconsistent", (a, n, r))
            return r
        t2 = t
        i = 0
        for i in range(1, m):
            t2 = t2 * t2 % n
            OPS.add(1)
            if t2 == 1:
                break
        else:
            raise CompositeWitness("sqrt-order", (a, n))
        b = powmod(c, 1 << (m - i - 1), n)
        r = r * b % n
        c = b * b % n
        t = t * c % n
        OPS.add(3)
        m = i
    raise CompositeWitness("sqrt-nontermination", (a, n))


def det_stream(seed: int, label: str):
    """Infinite deterministic integer stream keyed by (seed, label)."""
    counter = 0
    tag = label.encode()
    while True:
        h = hashlib.sha256(seed.to_bytes(16, "big", signed=False)
                           + tag + counter.to_bytes(8, "big")).digest()
        yield int.from_bytes(h, "big")
        counter += 1


def v_adic(p: int, m: int) -> int:
    """p-adic valuation of m > 0."""
    v = 0
    while m % p == 0:
        m //= p
        v += 1
    return v


def valuation_of_power(p: int, n: int, e: int) -> int:
    """v_p(n**e - 1) without forming the full power; requires p not dividing n."""
    k = 4
    while True:
        mod = p ** k
        r = pow(n, e, mod)
        if r == 1:
            k *= 2
            if k > 8 * 64:
                raise ValueError("valuation escalation ran away")
            continue
        return v_adic(p, (r - 1) % mod)


def iroot(x: int, k: int) -> int:
    """Floor of the k-th root of x >= 0, exact integer arithmetic."""
    if x < 0 or k < 1:
        raise ValueError("iroot domain")
    if x in (0, 1) or k == 1:
        return x
    r = 1 << ((x.bit_length() + k - 1) // k)
    while True:
        nr = ((k - 1) * r + x // r ** (k - 1)) // k
        if nr >= r:
            return r
        r = nr


def is_perfect_power(n: int):
    """Return (base, exponent) with base**exponent == n and exponent > 1, or None."""
    if n < 4:
        return None
    for k in range(2, n.bit_length() + 1):
        r = iroot(n, k)
        if r ** k == n:
            return (r, k)
        if r < 2:
            break
    return None


def small_primes(limit: int) -> list:
    """All primes <= limit by sieve."""
    if limit < 2:
        return []
    sieve = bytearray([1]) * (limit + 1)
    sieve[0:2] = b"\x00\x00"
    p = 2
    while p * p <= limit:
        if sieve[p]:
            sieve[p * p:limit + 1:p] = b"\x00" * len(range(p * p, limit + 1, p))
        p += 1
    return [i for i in range(limit + 1) if sieve[i]]


def factorize(m: int) -> dict:
    """Prime factorization of a small integer by trial division."""
    if m <= 0:
        raise ValueError("factorize expects positive input")
    out = {}
    for p in (2, 3):
        while m % p == 0:
            out[p] = out.get(p, 0) + 1
            m //= p
    d = 5
    while d * d <= m:
        for q in (d, d + 2):
            while m % q == 0:
                out[q] = out.get(q, 0) + 1
                m //= q
        d += 6
    if m > 1:
        out[m] = out.get(m, 0) + 1
    return out
