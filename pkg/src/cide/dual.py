"""Search for a dual elliptic pseudoprime partner.

Given a strong pseudoprime n, find an order in which n splits as nu*conj(nu)
and a partner m = N(nu -+ 1) that is itself a strong pseudoprime, then build
the two CM curves whose sizes are each other's modulus and exhibit
annihilated points on both.  This is one round of an elliptic curve
primality test, minus the descent.
"""

from __future__ import annotations

from dataclasses import dataclass
from math import gcd, isqrt

from .zn import CompositeWitness, FactorFound, jacobi, strong_pseudoprime, DEFAULT_SEED
from .ec import (
    COMPOSITE_WITNESS,
    DEGENERATE_POINT,
    INFINITY,
    PASS,
    CurveParams,
    elliptic_fermat_test,
)
from .cm import (
    NoSplit,
    QuadInt,
    QuadOrder,
    check_association,
    class_poly_root,
    cornacchia_split,
    curve_from_j,
)
from .cyclo import StageFailed


@dataclass(frozen=True)
class DualPair:
    """A dual elliptic pseudoprime pair: m = N(mu), n = N(mu + 1)."""

    m: int
    n: int
    order: QuadOrder
    mu: QuadInt
    epsilon_raw: int
    j_m: int
    j_n: int
    curve_m: CurveParams
    curve_n: CurveParams
    point_m: tuple
    point_n: tuple

    def validate(self) -> None:
        mu, nu = self.mu, self.mu + 1
        if mu.norm != self.m or nu.norm != self.n:
            raise ValueError("norm bookkeeping broken")
        if gcd(self.m, 6) != 1 or gcd(self.n, 6) != 1:
            raise ValueError("pair has a factor below 5")
        if gcd(self.m, abs(mu.trace) or self.m) != 1:
            raise ValueError("trace of mu shares a factor with m")
        if gcd(self.n, abs(nu.trace) or self.n) != 1:
            raise ValueError("trace of mu+1 shares a factor with n")
        if not self.curve_m.on_curve(self.point_m) or self.point_m is INFINITY:
            raise ValueError("bad point on the m-side curve")
        if not self.curve_n.on_curve(self.point_n) or self.point_n is INFINITY:
            raise ValueError("bad point on the n-side curve")

    def recheck_fermat(self) -> bool:
        return (elliptic_fermat_test(self.curve_m, self.point_m, self.n) == PASS
                and elliptic_fermat_test(self.curve_n, self.point_n, self.m) == PASS)


def find_point(curve: CurveParams, seed: int = 0, budget: int = 256):
    """A point on a quadratic twist of the curve, without square roots.

    Walks abscissa candidates until lambda = f(x0) has Jacobi symbol 1, then
    returns (twisted_curve, point) with the point (lambda*x0, lambda**2) on
    Y^2 = X^3 + A*lambda^2 X + B*lambda^3.  The twist is by a residue, so
    for prime n the twisted curve is isomorphic to the original.
    """
    n = curve.n
    x0 = 1 + (seed % 7)
    for _ in range(budget):
        lam = curve.f(x0)
        if lam != 0:
            g = gcd(lam, n)
            if 1 < g < n:
                raise FactorFound(g, n)
            if jacobi(lam, n) == 1:
                lam2 = lam * lam % n
                twisted = CurveParams(curve.a * lam2 % n,
                                      curve.b * lam2 % n * lam % n, n)
                point = twisted.point(lam * x0 % n, lam2)
                return twisted, point
        x0 += 1
    raise StageFailed("no usable abscissa for point construction")


def _twist_search(n: int, j0: int, target_size: int, seed: int,
                  twist_budget: int = 24):
    """Scan twist selectors until a curve with the target size shows up."""
    for c in range(1, twist_budget + 1):
        g = gcd(c, n)
        if g != 1:
            if g < n:
                raise FactorFound(g, n)
            continue
        try:
            base = curve_from_j(j0, c, n)
        except ValueError:
            continue
        try:
            curve, point = find_point(base, seed)
        except StageFailed:
            continue
        if point is INFINITY:
            continue
        verdict = elliptic_fermat_test(curve, point, target_size)
        if verdict == PASS:
            return curve, point
    return None


def search_dual(n: int, orders, budget: int = 64, seed: int = DEFAULT_SEED,
                mr_rounds: int = 20, disc_bound: int = 10 ** 6,
                max_class_number: int = 80):
    """Find a dual elliptic pseudoprime pair for n over the given orders.

    Returns a DualPair or None when the budget is exhausted.  FactorFound
    and CompositeWitness propagate: they decide n outright.  The epsilon
    sign is absorbed into mu so that always m = N(mu) and n = N(mu + 1).
    """
    if n < 7 or gcd(n, 6) != 1:
        raise ValueError("n must be >= 7 and coprime to 6")
    attempts = 0
    for order in orders:
        if attempts >= budget:
            return None
        split = cornacchia_split(n, order)
        if isinstance(split, NoSplit):
            continue
        nu = split if split.trace > 0 else -split
        j_n = None
        # every unit multiple of nu is a generator of the same ideal, so each
        # u*nu - 1 is a partner candidate (u = -1 recovers the epsilon = -1 case)
        for unit in order.units():
            attempts += 1
            if attempts > budget:
                return None
            generator = unit * nu
            mu = generator - 1
            eps = -1 if unit.a == -2 and unit.b == 0 else 1
            m = mu.norm
            if m < 7 or gcd(m, 6) != 1 or m == n:
                continue
            tr_m = mu.trace
            if tr_m == 0 or gcd(m, abs(tr_m)) != 1:
                continue
            if gcd(n, abs(generator.trace) or n) != 1:
                continue
            if not strong_pseudoprime(m, mr_rounds, seed):
                continue
            if j_n is None:
                from .cm import class_number

                if class_number(order.disc) > max_class_number:
                    break
                j_n = class_poly_root(order, n, seed, disc_bound)
                if j_n is None:
                    break
            try:
                j_m = class_poly_root(order, m, seed, disc_bound)
                if j_m is None:
                    continue
                got_m = _twist_search(m, j_m, n, seed)
            except (FactorFound, CompositeWitness) as exc:
                # evidence about the candidate partner only; n stays open
                if isinstance(exc, FactorFound) and exc.d > 1 and n % exc.d == 0:
                    raise
                continue
            if got_m is None:
                continue
            got_n = _twist_search(n, j_n, m, seed)
            if got_n is None:
                continue
            curve_m, point_m = got_m
            curve_n, point_n = got_n
            if check_association(curve_m, order, mu, j_m, disc_bound) is not None:
                continue
            if check_association(curve_n, order, mu + 1, j_n, disc_bound) is not None:
                continue
            pair = DualPair(m=m, n=n, order=order, mu=mu, epsilon_raw=eps,
                            j_m=j_m, j_n=j_n, curve_m=curve_m, curve_n=curve_n,
                            point_m=point_m, point_n=point_n)
            pair.validate()
            return pair
    return None
