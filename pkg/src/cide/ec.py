"""Elliptic curves with partial addition over Z/nZ.

Affine coordinates only: the group law is evaluated through explicit slope
inversions so that every non-invertible denominator surfaces a factor of n,
which is the whole point of running curve arithmetic over a ring that may
not be a field.  Division polynomials are kept in the univariate form with
Y**2 eliminated; even indices carry an implicit factor 2Y that is tracked
through separate numerator and denominator tables.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from math import gcd

from .zn import OPS, CompositeWitness, FactorFound, invert
from .polyring import (
    QuotientRing,
    canonical,
    normalize,
    poly_add,
    poly_mul,
    poly_mul_rem,
    poly_rem,
    poly_scale,
    poly_sub,
    try_gcd,
)

INFINITY = None  # point at infinity

PASS = "pass"
COMPOSITE_WITNESS = "composite-witness"
DEGENERATE_POINT = "degenerate-point"


class NotADivisor(ValueError):
    """rho does not divide the requested division polynomial."""


@dataclass(frozen=True)
class CurveParams:
    """Parameters (A, B) of Y^2 = X^3 + A X + B over Z/nZ, discriminant a unit."""

    a: int
    b: int
    n: int

    def __post_init__(self):
        object.__setattr__(self, "a", self.a % self.n)
        object.__setattr__(self, "b", self.b % self.n)
        disc = (4 * self.a ** 3 + 27 * self.b ** 2) % self.n
        g = gcd(disc, self.n)
        if g == self.n:
            raise ValueError("singular curve: discriminant is zero mod n")
        if g != 1:
            raise FactorFound(g, self.n)

    def f(self, x: int) -> int:
        OPS.add(2)
        return (x * x % self.n * x + self.a * x + self.b) % self.n

    def f_poly(self) -> list:
        return canonical([self.b, self.a, 0, 1], self.n)

    def point(self, x: int, y: int) -> tuple:
        """Validated affine point."""
        x %= self.n
        y %= self.n
        if (y * y - self.f(x)) % self.n != 0:
            raise ValueError(f"({x}, {y}) is not on the curve")
        return (x, y)

    def on_curve(self, point) -> bool:
        if point is INFINITY:
            return True
        x, y = point
        return (y * y - self.f(x)) % self.n == 0

    def j_invariant(self) -> int:
        num = (1728 * 4 * pow(self.a, 3, self.n)) % self.n
        den = (4 * pow(self.a, 3, self.n) + 27 * pow(self.b, 2, self.n)) % self.n
        OPS.add(4)
        return num * invert(den, self.n) % self.n


def neg_point(point, n):
    if point is INFINITY:
        return INFINITY
    x, y = point
    return (x, (-y) % n)


def partial_add(p, q, curve: CurveParams):
    """Group-law sum when the slope denominator is a unit.

    Returns the sum point (or INFINITY); raises FactorFound when the
    denominator gcd is a proper factor of n.
    """
    n = curve.n
    if p is INFINITY:
        return q
    if q is INFINITY:
        return p
    px, py = p
    qx, qy = q
    if p != q:
        mu = (qx - px) % n
        if mu == 0:
            if (qy + py) % n == 0:
                return INFINITY
            # same abscissa, y-coordinates neither equal nor opposite
            raise FactorFound(gcd((qy - py) % n, n), n)
        lam = (qy - py) * invert(mu, n) % n
    else:
        mu = 2 * py % n
        if mu == 0:
            return INFINITY
        lam = (3 * px * px + curve.a) * invert(mu, n) % n
        OPS.add(1)
    rx = (lam * lam - px - qx) % n
    ry = (lam * (px - rx) - py) % n
    OPS.add(3)
    return (rx, ry)


def scalar_mul(k: int, p, curve: CurveParams):
    """[k]P by double-and-add; FactorFound propagates from undefined steps."""
    if k < 0:
        raise ValueError("scalar must be non-negative")
    acc = INFINITY
    base = p
    while k:
        if k & 1:
            acc = partial_add(acc, base, curve)
        k >>= 1
        if k:
            base = partial_add(base, base, curve)
    return acc


class DivisionPolynomials:
    """Cached univariate division polynomial tables for one curve.

    p(k) is the Y-free part: psi_k = p(k) for odd k and psi_k = 2Y * p(k)
    for even k.  Derived tables give torsion abscissa polynomials, the
    multiplication numerators phi_k, the squared denominators psi_k^2, and
    the Y-coordinate numerators w_hat(k), all with Y^2 already replaced by
    f(X).
    """

    def __init__(self, curve: CurveParams):
        self.curve = curve
        n = curve.n
        a, b = curve.a, curve.b
        self.f = curve.f_poly()
        self.f2 = poly_mul(self.f, self.f, n)
        self._p = {
            -1: canonical([-1], n),
            0: [],
            1: [1 % n],
            2: [1 % n],
            3: canonical([-a * a, 12 * b, 6 * a, 0, 3], n),
            4: canonical(
                [
                    -2 * (8 * b * b + a ** 3),
                    -8 * a * b,
                    -10 * a * a,
                    40 * b,
                    10 * a,
                    0,
                    2,
                ],
                n,
            ),
        }

    def p(self, k: int) -> list:
        """Y-free division polynomial part, defined for k >= -1."""
        tab = self._p
        if k in tab:
            return tab[k]
        n = self.curve.n
        m, r = divmod(k, 2)
        if r == 0:
            inner = poly_sub(
                poly_mul(self.p(m + 2), poly_mul(self.p(m - 1), self.p(m - 1), n), n),
                poly_mul(self.p(m - 2), poly_mul(self.p(m + 1), self.p(m + 1), n), n),
                n,
            )
            val = poly_mul(self.p(m), inner, n)
        else:
            cube = lambda q: poly_mul(q, poly_mul(q, q, n), n)
            t1 = poly_mul(self.p(m + 2), cube(self.p(m)), n)
            t2 = poly_mul(self.p(m - 1), cube(self.p(m + 1)), n)
            sixteen_f2 = poly_scale(self.f2, 16, n)
            if m % 2 == 0:
                val = poly_sub(poly_mul(sixteen_f2, t1, n), t2, n)
            else:
                val = poly_sub(t1, poly_mul(sixteen_f2, t2, n), n)
        tab[k] = val
        return val

    def torsion_poly(self, k: int) -> list:
        """Monic-free polynomial whose roots are abscissae of affine k-torsion."""
        if k < 1:
            raise ValueError("k must be >= 1")
        if k % 2 == 1:
            return self.p(k)
        return poly_mul(self.f, self.p(k), self.curve.n)

    def phi(self, k: int) -> list:
        n = self.curve.n
        psq = poly_mul(self.p(k), self.p(k), n)
        cross = poly_mul(self.p(k + 1), self.p(k - 1), n)
        if k % 2 == 1:
            x_psq = [0] + psq
            return poly_sub(x_psq, poly_scale(poly_mul(self.f, cross, n), 4, n), n)
        x_psq = [0] + poly_scale(poly_mul(self.f, psq, n), 4, n)
        return poly_sub(x_psq, cross, n)

    def psi_squared(self, k: int) -> list:
        n = self.curve.n
        psq = poly_mul(self.p(k), self.p(k), n)
        if k % 2 == 1:
            return psq
        return poly_scale(poly_mul(self.f, psq, n), 4, n)

    def w_hat(self, k: int) -> list:
        n = self.curve.n
        t1 = poly_mul(self.p(k + 2), poly_mul(self.p(k - 1), self.p(k - 1), n), n)
        t2 = poly_mul(self.p(k - 2), poly_mul(self.p(k + 1), self.p(k + 1), n), n)
        return poly_sub(t1, t2, n)

    def w_denominator(self, k: int) -> list:
        """psi_k^3 reduced to Y-free form: the Y-coordinate of [k]P is
        Y * w_hat(k) / w_denominator(k)."""
        n = self.curve.n
        pcube = poly_mul(self.p(k), poly_mul(self.p(k), self.p(k), n), n)
        if k % 2 == 1:
            return pcube
        return poly_scale(poly_mul(self.f2, pcube, n), 16, n)


_DIVPOLY_CACHE: dict = {}


def division_polys(curve: CurveParams) -> DivisionPolynomials:
    key = (curve.n, curve.a, curve.b)
    got = _DIVPOLY_CACHE.get(key)
    if got is None:
        got = DivisionPolynomials(curve)
        if len(_DIVPOLY_CACHE) > 64:
            _DIVPOLY_CACHE.clear()
        _DIVPOLY_CACHE[key] = got
    return got


def division_poly(k: int, curve: CurveParams) -> list:
    """Univariate torsion-abscissa polynomial for k-torsion."""
    return division_polys(curve).torsion_poly(k)


@dataclass(frozen=True)
class TorsionAlgebra:
    """Quotient ring Z/nZ[X]/(rho) with Theta = X acting as a torsion abscissa."""

    ring: QuotientRing
    k: int
    curve: CurveParams
    two_point: bool = False
    _g_cache: dict = field(default_factory=dict, repr=False, compare=False)

    @property
    def rho(self) -> list:
        return self.ring.f

    @property
    def theta(self) -> list:
        return self.ring.gen()

    def f_theta(self) -> list:
        return self.ring.reduce(self.curve.f_poly())


def build_torsion_algebra(rho, k: int, curve: CurveParams, two_point: bool = False) -> TorsionAlgebra:
    """Torsion algebra for a monic divisor rho of the k-th division polynomial."""
    n = curve.n
    rho = canonical(rho, n)
    if not rho or rho[-1] != 1:
        raise ValueError("rho must be monic")
    dp = division_polys(curve)
    if poly_rem(dp.torsion_poly(k), rho, n):
        raise NotADivisor(f"rho does not divide the {k}-torsion polynomial")
    # lower-torsion sanity: rho must share no root with 1- or 2-torsion
    if len(rho) > 1:
        g = try_gcd(rho, dp.f, n)
        if len(g) != 1:
            raise CompositeWitness("torsion-algebra-shares-2-torsion", (k,))
    ring = QuotientRing(rho, n)
    return TorsionAlgebra(ring=ring, k=k, curve=curve, two_point=two_point)


def mult_poly_g(i: int, alg: TorsionAlgebra) -> list:
    """g_i(Theta), the abscissa of [i]P in the algebra, with
    psi_i^2 * g_i = phi_i mod rho."""
    if not 1 <= i < alg.k:
        raise ValueError("need 1 <= i < k")
    got = alg._g_cache.get(i)
    if got is not None:
        return got
    ring = alg.ring
    dp = division_polys(alg.curve)
    denom = ring.reduce(dp.psi_squared(i))
    try:
        denom_inv = ring.inv(denom)
    except ZeroDivisionError:
        raise CompositeWitness("improper-torsion-denominator", (i, alg.k)) from None
    val = ring.mul(ring.reduce(dp.phi(i)), denom_inv)
    alg._g_cache[i] = val
    return val


def mult_poly_w(x: int, alg: TorsionAlgebra) -> list:
    """w_x(Theta) with ([x]P)_Y = Omega * w_x(Theta) in the two-point layer."""
    if not 1 <= x < alg.k:
        raise ValueError("need 1 <= x < k")
    ring = alg.ring
    dp = division_polys(alg.curve)
    denom = ring.reduce(dp.w_denominator(x))
    try:
        denom_inv = ring.inv(denom)
    except ZeroDivisionError:
        raise CompositeWitness("improper-torsion-w-denominator", (x, alg.k)) from None
    return ring.mul(ring.reduce(dp.w_hat(x)), denom_inv)


def elliptic_fermat_test(curve: CurveParams, point, m: int) -> str:
    """[m]P = O with every intermediate step defined.

    PASS means the point is annihilated by the claimed size; a failure is a
    composite witness once the curve data is trusted.  FactorFound
    propagates.
    """
    if point is INFINITY:
        return DEGENERATE_POINT
    if not curve.on_curve(point):
        raise ValueError("point not on curve")
    result = scalar_mul(m, point, curve)
    return PASS if result is INFINITY else COMPOSITE_WITNESS


def elliptic_lucas_lehmer_test(curve: CurveParams, point, q: int, m: int) -> str:
    """Proper q-torsion test for Q = [m/q]P.

    Pass requires [m/q]P affine with [q][m/q]P = O and the q-th torsion
    polynomial vanishing at its abscissa mod n; a nonzero non-unit value is
    an improper torsion point and reveals a factor.
    """
    if m % q:
        raise ValueError("q must divide m")
    if point is INFINITY:
        return DEGENERATE_POINT
    cofactor_point = scalar_mul(m // q, point, curve)
    if cofactor_point is INFINITY:
        return COMPOSITE_WITNESS
    if scalar_mul(q, cofactor_point, curve) is not INFINITY:
        return COMPOSITE_WITNESS
    n = curve.n
    from .polyring import poly_eval

    val = poly_eval(division_poly(q, curve), cofactor_point[0], n)
    if val == 0:
        return PASS
    g = gcd(val, n)
    if 1 < g < n:
        raise FactorFound(g, n)
    return COMPOSITE_WITNESS
