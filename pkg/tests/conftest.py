"""Shared test oracles.

The extension-field arithmetic here is deliberately written from scratch
(tuples and schoolbook loops) so torsion brute forces do not reuse the
package's polynomial kernels.
"""

import itertools

import pytest


class GF:
    """Small prime-power field F_{p^k} for oracle computations."""

    def __init__(self, p, k):
        self.p = p
        self.k = k
        self.modulus = self._find_irreducible()

    def _find_irreducible(self):
        p, k = self.p, self.k
        if k == 1:
            return (0, 1)
        for tail in itertools.product(range(p), repeat=k):
            poly = tuple(tail) + (1,)
            if self._is_irreducible(poly):
                return poly
        raise AssertionError("no irreducible polynomial found")

    def _is_irreducible(self, poly):
        # brute force: no roots in any proper subfield via gcd-free check:
        # poly is irreducible iff X^(p^k) = X mod poly and X^(p^d) != X for d|k, d<k
        p, k = self.p, self.k
        x = (0, 1)
        frob = x
        for d in range(1, k + 1):
            frob = self._pow_raw(frob, p, poly)
            if d < k and k % d == 0 and frob == self._reduce_raw(x, poly):
                return False
        return frob == self._reduce_raw(x, poly)

    def _reduce_raw(self, a, modulus):
        p = self.p
        a = list(a)
        d = len(modulus) - 1
        while len(a) > d:
            c = a[-1] % p
            a.pop()
            if c:
                for i in range(d):
                    a[-d + i] = (a[-d + i] - c * modulus[i]) % p
        while a and a[-1] % p == 0:
            a.pop()
        return tuple(c % p for c in a)

    def _mul_raw(self, a, b, modulus):
        if not a or not b:
            return ()
        out = [0] * (len(a) + len(b) - 1)
        for i, ai in enumerate(a):
            for j, bj in enumerate(b):
                out[i + j] += ai * bj
        return self._reduce_raw(out, modulus)

    def _pow_raw(self, a, e, modulus):
        result = (1,)
        base = self._reduce_raw(a, modulus)
        while e:
            if e & 1:
                result = self._mul_raw(result, base, modulus)
            e >>= 1
            base = self._mul_raw(base, base, modulus)
        return result

    # public interface on canonical tuples
    def make(self, value):
        if isinstance(value, int):
            return self._reduce_raw((value % self.p,), self.modulus)
        return self._reduce_raw(tuple(value), self.modulus)

    def add(self, a, b):
        out = [0] * max(len(a), len(b))
        for i, c in enumerate(a):
            out[i] += c
        for i, c in enumerate(b):
            out[i] += c
        return self._reduce_raw(out, self.modulus)

    def sub(self, a, b):
        out = [0] * max(len(a), len(b))
        for i, c in enumerate(a):
            out[i] += c
        for i, c in enumerate(b):
            out[i] -= c
        return self._reduce_raw(out, self.modulus)

    def mul(self, a, b):
        return self._mul_raw(a, b, self.modulus)

    def inv(self, a):
        order = self.p ** self.k - 1
        return self._pow_raw(a, order - 1, self.modulus)

    def zero(self):
        return ()

    def one(self):
        return (1,)

    def elements(self):
        for tup in itertools.product(range(self.p), repeat=self.k):
            yield self._reduce_raw(tup, self.modulus)


class OracleCurve:
    """Affine curve arithmetic over a GF oracle field."""

    def __init__(self, field: GF, a: int, b: int):
        self.F = field
        self.a = field.make(a)
        self.b = field.make(b)

    def on_curve(self, pt):
        if pt is None:
            return True
        x, y = pt
        F = self.F
        rhs = F.add(F.add(F.mul(F.mul(x, x), x), F.mul(self.a, x)), self.b)
        return F.mul(y, y) == rhs

    def add(self, p1, p2):
        F = self.F
        if p1 is None:
            return p2
        if p2 is None:
            return p1
        x1, y1 = p1
        x2, y2 = p2
        if x1 == x2 and F.add(y1, y2) == F.zero():
            return None
        if p1 == p2:
            num = F.add(F.mul(F.make(3), F.mul(x1, x1)), self.a)
            den = F.mul(F.make(2), y1)
        else:
            num = F.sub(y2, y1)
            den = F.sub(x2, x1)
        lam = F.mul(num, F.inv(den))
        x3 = F.sub(F.sub(F.mul(lam, lam), x1), x2)
        y3 = F.sub(F.mul(lam, F.sub(x1, x3)), y1)
        return (x3, y3)

    def scalar(self, k, pt):
        acc = None
        base = pt
        while k:
            if k & 1:
                acc = self.add(acc, base)
            k >>= 1
            base = self.add(base, base)
        return acc


@pytest.fixture(scope="session")
def gf():
    cache = {}

    def build(p, k):
        if (p, k) not in cache:
            cache[(p, k)] = GF(p, k)
        return cache[(p, k)]

    return build
