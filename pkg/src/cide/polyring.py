"""Dense univariate polynomial arithmetic over Z/nZ and quotient rings.

Polynomials are lists of canonical residues, lowest degree first, with no
trailing zeros; [] is the zero polynomial.  These flat-list kernels are the
computational substrate for torsion algebras and cyclotomic extensions, so
they stay class-free for speed.  QuotientRing wraps them with a fixed monic
modulus polynomial.
"""

from __future__ import annotations

from math import gcd

from .zn import OPS, FactorFound, invert

KARATSUBA_CUTOFF = 32  # schoolbook below this degree; tuning knob


def normalize(a: list) -> list:
    while a and a[-1] == 0:
        a.pop()
    return a


def canonical(a, n: int) -> list:
    return normalize([c % n for c in a])


def degree(a: list) -> int:
    return len(a) - 1


def poly_add(a, b, n):
    if len(a) < len(b):
        a, b = b, a
    out = list(a)
    for i, c in enumerate(b):
        out[i] = (out[i] + c) % n
    return normalize(out)


def poly_sub(a, b, n):
    out = list(a) + [0] * max(0, len(b) - len(a))
    for i, c in enumerate(b):
        out[i] = (out[i] - c) % n
    return normalize(out)


def poly_scale(a, k, n):
    k %= n
    if k == 0:
        return []
    OPS.add(len(a))
    return normalize([c * k % n for c in a])


def _mul_schoolbook(a, b, n):
    out = [0] * (len(a) + len(b) - 1)
    for i, ai in enumerate(a):
        if ai == 0:
            continue
        for j, bj in enumerate(b):
            out[i + j] += ai * bj
    OPS.add(len(a) * len(b))
    return normalize([c % n for c in out])


def poly_mul(a, b, n):
    if not a or not b:
        return []
    if len(a) < KARATSUBA_CUTOFF or len(b) < KARATSUBA_CUTOFF:
        return _mul_schoolbook(a, b, n)
    half = max(len(a), len(b)) // 2
    a0, a1 = a[:half], a[half:]
    b0, b1 = b[:half], b[half:]
    z0 = poly_mul(a0, b0, n)
    z2 = poly_mul(a1, b1, n)
    z1 = poly_mul(poly_add(a0, a1, n), poly_add(b0, b1, n), n)
    z1 = poly_sub(poly_sub(z1, z0, n), z2, n)
    out = [0] * (len(a) + len(b) - 1)
    for i, c in enumerate(z0):
        out[i] = (out[i] + c) % n
    for i, c in enumerate(z1):
        out[i + half] = (out[i + half] + c) % n
    for i, c in enumerate(z2):
        out[i + 2 * half] = (out[i + 2 * half] + c) % n
    return normalize(out)


def poly_divmod(a, f, n):
    """Quotient and remainder of a by f; f need not be monic but its leading
    coefficient must be a unit (otherwise FactorFound)."""
    if not f:
        raise ZeroDivisionError("polynomial division by zero")
    lead = f[-1]
    lead_inv = 1 if lead == 1 else invert(lead, n)
    a = list(a)
    df, da = len(f) - 1, len(a) - 1
    if da < df:
        return [], normalize(a)
    q = [0] * (da - df + 1)
    OPS.add((da - df + 1) * (df + 1))
    for i in range(da, df - 1, -1):
        c = a[i] % n
        if c == 0:
            continue
        c = c * lead_inv % n
        q[i - df] = c
        for j in range(df + 1):
            a[i - df + j] = (a[i - df + j] - c * f[j]) % n
    return normalize(q), normalize(a)


def poly_rem(a, f, n):
    return poly_divmod(a, f, n)[1]


def poly_mul_rem(a, b, f, n):
    """(a*b) rem f, canonical."""
    return poly_rem(poly_mul(a, b, n), f, n)


def monic_scale(a, n):
    """Monic multiple of a; FactorFound if the leading coefficient is a zero divisor."""
    if not a:
        return a
    if a[-1] == 1:
        return a
    return poly_scale(a, invert(a[-1], n), n)


def try_gcd(a, b, n):
    """Monic gcd by the Euclidean algorithm.

    Any leading coefficient that fails to invert raises FactorFound, which is
    a success path for the prover.
    """
    a, b = normalize(list(a)), normalize(list(b))
    if not a and not b:
        raise ValueError("gcd(0, 0) undefined")
    while b:
        a, b = b, poly_rem(a, b, n)
    return monic_scale(a, n)


def poly_ext_gcd(a, b, n):
    """(g, u, v) with u*a + v*b = g, g monic; FactorFound on zero divisors."""
    r0, r1 = normalize(list(a)), normalize(list(b))
    s0, s1 = [1], []
    t0, t1 = [], [1]
    while r1:
        q, r = poly_divmod(r0, r1, n)
        r0, r1 = r1, r
        s0, s1 = s1, poly_sub(s0, poly_mul(q, s1, n), n)
        t0, t1 = t1, poly_sub(t0, poly_mul(q, t1, n), n)
    if not r0:
        raise ValueError("ext gcd of zero polynomials")
    c = invert(r0[-1], n)
    return poly_scale(r0, c, n), poly_scale(s0, c, n), poly_scale(t0, c, n)


class FastMod:
    """Fixed-modulus remainder via a Newton-inverted reversed modulus.

    For repeated reduction by one monic f this replaces quadratic long
    division with two multiplications per reduction.
    """

    def __init__(self, f, n):
        f = canonical(f, n)
        if not f or len(f) < 2:
            raise ValueError("modulus must have degree >= 1")
        if f[-1] != 1:
            f = monic_scale(f, n)  # same ideal, identical remainders
        self.f = f
        self.n = n
        self.d = len(self.f) - 1
        rev = list(reversed(self.f))
        # inverse of rev mod X**(d-1), by Newton iteration
        prec = max(self.d - 1, 1)
        g = [invert(rev[0], n)]
        k = 1
        while k < prec:
            k = min(2 * k, prec)
            t = poly_mul(rev[:k], g, n)[:k]
            two_minus = poly_sub([2 % n], t, n)
            g = poly_mul(g, two_minus, n)[:k]
        self.ginv = g
        self.prec = prec

    def rem(self, a):
        a = normalize([c % self.n for c in a])
        if len(a) <= self.d:
            return a
        qlen = len(a) - self.d
        if qlen > self.prec:
            return poly_rem(a, self.f, self.n)
        ra = list(reversed(a))[:qlen]
        q_rev = poly_mul(ra, self.ginv, self.n)[:qlen]
        q = list(reversed(q_rev + [0] * (qlen - len(q_rev))))
        qf = poly_mul(q, self.f, self.n)
        out = [(a[i] - (qf[i] if i < len(qf) else 0)) % self.n for i in range(self.d)]
        return normalize(out)


FASTMOD_CUTOFF = 48  # use Newton reduction for moduli of at least this degree


def poly_pow_rem(base, e, f, n):
    """base**e rem f by square and multiply; e = 0 gives 1."""
    result = [1 % n]
    if len(f) - 1 >= FASTMOD_CUTOFF and e.bit_length() > 4:
        ctx = FastMod(f, n)
        b = ctx.rem(base)
        while e:
            if e & 1:
                result = ctx.rem(poly_mul(result, b, n))
            e >>= 1
            if e:
                b = ctx.rem(poly_mul(b, b, n))
        return result
    b = poly_rem(base, f, n)
    while e:
        if e & 1:
            result = poly_mul_rem(result, b, f, n)
        e >>= 1
        if e:
            b = poly_mul_rem(b, b, f, n)
    return result


def poly_eval(a, x, n):
    acc = 0
    for c in reversed(a):
        acc = (acc * x + c) % n
    OPS.add(len(a))
    return acc


def poly_compose_rem(a, g, f, n):
    """a(g(X)) rem f by Horner over the quotient ring."""
    acc = []
    for c in reversed(a):
        acc = poly_mul_rem(acc, g, f, n)
        acc = poly_add(acc, [c], n)
    return acc


def content_gcd_with_modulus(a, n):
    """gcd of all coefficients of a with n (the 'rational part' of a)."""
    g = n
    for c in a:
        g = gcd(g, c)
        if g == 1:
            return 1
    return g


class QuotientRing:
    """Z/nZ[X]/(f) for a monic modulus polynomial f of degree >= 1.

    Elements are canonical coefficient lists of degree < deg f.
    """

    def __init__(self, modulus_poly: list, n: int):
        modulus_poly = canonical(modulus_poly, n)
        if not modulus_poly or len(modulus_poly) < 2:
            raise ValueError("modulus polynomial must have degree >= 1")
        if modulus_poly[-1] != 1:
            raise ValueError("modulus polynomial must be monic")
        self.f = modulus_poly
        self.n = n
        self.degree = len(modulus_poly) - 1

    def __eq__(self, other):
        return isinstance(other, QuotientRing) and self.f == other.f and self.n == other.n

    def __repr__(self):
        return f"QuotientRing(deg={self.degree}, n={self.n})"

    def zero(self):
        return []

    def one(self):
        return [1 % self.n]

    def gen(self):
        """X mod f."""
        if self.degree == 1:
            return poly_rem([0, 1], self.f, self.n)
        return [0, 1]

    def embed(self, c: int):
        c %= self.n
        return [c] if c else []

    def reduce(self, coeffs):
        return poly_rem(canonical(coeffs, self.n), self.f, self.n)

    def add(self, a, b):
        return poly_add(a, b, self.n)

    def sub(self, a, b):
        return poly_sub(a, b, self.n)

    def mul(self, a, b):
        return poly_mul_rem(a, b, self.f, self.n)

    def pow(self, a, e):
        return poly_pow_rem(a, e, self.f, self.n)

    def inv(self, a):
        """Inverse in the quotient ring.

        Raises FactorFound when a coefficient gcd reveals a factor of n and
        ZeroDivisionError when the element is a zero divisor that reveals
        nothing rational (the caller decides what that means).
        """
        a = normalize(list(a))
        if not a:
            raise ZeroDivisionError("inversion of zero")
        g, u, _ = poly_ext_gcd(a, self.f, self.n)
        if len(g) != 1:
            raise ZeroDivisionError("zero divisor in quotient ring")
        c = g[0]
        if c != 1:
            u = poly_scale(u, invert(c, self.n), self.n)
        return poly_rem(u, self.f, self.n)

    def is_constant(self, a):
        return len(a) <= 1

    def constant_value(self, a) -> int:
        if len(a) > 1:
            raise ValueError("element is not a base-ring constant")
        return a[0] if a else 0


class TensorRing:
    """Quotient by a monic integer-coefficient polynomial, tensored over a
    coefficient QuotientRing: Z/nZ[X, Y] / (coeff_ring.f(X), f(Y)).

    Elements are lists of coefficient-ring elements (lowest Y-degree first,
    trailing zeros stripped).  This is the product-compatible representation
    used both for composing cyclotomic extensions and for evaluating
    character sums over a torsion algebra.
    """

    def __init__(self, f_int_coeffs, coeff_ring: QuotientRing):
        if f_int_coeffs[-1] % coeff_ring.n != 1:
            raise ValueError("tensor modulus must be monic")
        self.R = coeff_ring
        self.n = coeff_ring.n
        self.f = [coeff_ring.embed(c) for c in f_int_coeffs]
        self.deg = len(f_int_coeffs) - 1

    def zero(self):
        return []

    def one(self):
        return [self.R.one()]

    def gen(self):
        """Y mod f, as a tensor element."""
        if self.deg == 1:
            out = self.R.sub(self.R.zero(), self.f[0])
            return [out] if out else []
        return [self.R.zero(), self.R.one()]

    def embed_coeff(self, r_elem):
        r = normalize(list(r_elem))
        return [r] if r else []

    def embed_base(self, ints):
        out = [self.R.embed(c) for c in ints]
        return self._norm(out)

    def _norm(self, a):
        while a and not a[-1]:
            a.pop()
        return a

    def add(self, a, b):
        if len(a) < len(b):
            a, b = b, a
        out = list(a)
        for i, c in enumerate(b):
            out[i] = self.R.add(out[i], c)
        return self._norm(out)

    def sub(self, a, b):
        out = list(a) + [self.R.zero()] * max(0, len(b) - len(a))
        for i, c in enumerate(b):
            out[i] = self.R.sub(out[i], c)
        return self._norm(out)

    def scale(self, a, r_elem):
        return self._norm([self.R.mul(c, r_elem) for c in a])

    def mul(self, a, b):
        if not a or not b:
            return []
        prod = [self.R.zero() for _ in range(len(a) + len(b) - 1)]
        for i, ai in enumerate(a):
            if not ai:
                continue
            for j, bj in enumerate(b):
                if bj:
                    prod[i + j] = self.R.add(prod[i + j], self.R.mul(ai, bj))
        for i in range(len(prod) - 1, self.deg - 1, -1):
            c = prod[i]
            if not c:
                continue
            for j in range(self.deg):
                prod[i - self.deg + j] = self.R.sub(prod[i - self.deg + j],
                                                    self.R.mul(c, self.f[j]))
            prod[i] = self.R.zero()
        return self._norm(prod[: self.deg])

    def pow(self, a, e):
        result = self.one()
        base = a
        while e:
            if e & 1:
                result = self.mul(result, base)
            e >>= 1
            if e:
                base = self.mul(base, base)
        return result

    def _divmod(self, a, b):
        lead_inv = self.R.inv(b[-1])
        a = list(a)
        db, da = len(b) - 1, len(a) - 1
        if da < db:
            return [], self._norm(a)
        q = [self.R.zero() for _ in range(da - db + 1)]
        for i in range(da, db - 1, -1):
            c = a[i]
            if not c:
                continue
            c = self.R.mul(c, lead_inv)
            q[i - db] = c
            for j in range(db + 1):
                a[i - db + j] = self.R.sub(a[i - db + j], self.R.mul(c, b[j]))
        return self._norm(q), self._norm(a)

    def inv(self, a):
        """Inverse via extended Euclid over the coefficient ring.

        ZeroDivisionError marks a zero divisor with no rational factor
        surfaced; FactorFound propagates from coefficient arithmetic.
        """
        a = self._norm(list(a))
        if not a:
            raise ZeroDivisionError("inversion of zero")
        r0, r1 = list(self.f), a
        s0, s1 = [], [self.R.one()]
        while r1:
            q, r = self._divmod(r0, r1)
            r0, r1 = r1, r
            prod = []
            if q and s1:
                prod = [self.R.zero() for _ in range(len(q) + len(s1) - 1)]
                for i, qi in enumerate(q):
                    if not qi:
                        continue
                    for j, sj in enumerate(s1):
                        if sj:
                            prod[i + j] = self.R.add(prod[i + j], self.R.mul(qi, sj))
            s0, s1 = s1, self.sub(s0, self._norm(prod))
        if len(r0) != 1:
            raise ZeroDivisionError("zero divisor in tensor ring")
        c_inv = self.R.inv(r0[0])
        out = self.scale(s0, c_inv)
        return self.mul(out, self.one())

    def constant_part(self, a):
        """Coefficient-ring value of a Y-constant element, or None."""
        if len(a) > 1:
            return None
        return a[0] if a else self.R.zero()

    def base_constant(self, a):
        """Plain integer value when the element lies in Z/nZ, else None."""
        c = self.constant_part(a)
        if c is None or not self.R.is_constant(c):
            return None
        return self.R.constant_value(c)
