"""Elkies factors, elliptic Gauss sums, and the elliptic extension test.

The eigenvalue-kernel factor F of the ell-th division polynomial is found by
the gcd of X**n - g_x(X) against the division polynomial, validated through
the product identity over the quotient algebra, and then used to form
character-weighted sums of torsion abscissae.  Those sums live in the tensor
of the Elkies ring with a small cyclotomic working extension; the n-power
ratio of a sum against its twisted partner must land inside the cyclic group
generated by the distinguished root of unity, and the collected roots pin
down the Frobenius eigenvalue modulo ell.

Y-coordinate sums for even-order characters never materialize the two-point
layer: the square root Omega cancels in the tested ratio, leaving the
explicit factor f(Theta)**((n-1)/2).
"""

from __future__ import annotations

from dataclasses import dataclass
from math import gcd

from .zn import CompositeWitness, FactorFound
from .polyring import (
    QuotientRing,
    TensorRing,
    canonical,
    normalize,
    poly_pow_rem,
    poly_rem,
    poly_sub,
    try_gcd,
)
from .ec import (
    CurveParams,
    TorsionAlgebra,
    build_torsion_algebra,
    division_polys,
    mult_poly_g,
    mult_poly_w,
)
from .cyclo import CharacterData, CycloExt, build_character
from .zn import factorize, v_adic


class ExceptionalConductor(Exception):
    """gcd(tau_e, n) = n: the whole Gauss sum is a zero divisor; replace ell."""

    def __init__(self, ell: int, q: int = 0):
        self.ell = ell
        self.q = q
        super().__init__(f"exceptional conductor {ell}")


@dataclass(frozen=True)
class ElkiesRing:
    """Torsion algebra cut out by an Elkies factor of psi_ell."""

    algebra: TorsionAlgebra
    ell: int
    x_eig: int

    @property
    def factor(self) -> list:
        return self.algebra.ring.f

    @property
    def curve(self) -> CurveParams:
        return self.algebra.curve

    def g_theta(self, x: int) -> list:
        x %= self.ell
        if x == 0:
            raise ValueError("multiplication by a multiple of ell")
        return mult_poly_g(min(x, self.ell - x), self.algebra)

    def w_theta(self, x: int) -> list:
        """Omega-coefficient of the Y-coordinate of [x]P; odd in x."""
        x %= self.ell
        if x == 0:
            raise ValueError("multiplication by a multiple of ell")
        if x <= self.ell - x:
            return mult_poly_w(x, self.algebra)
        ring = self.algebra.ring
        return ring.sub(ring.zero(), mult_poly_w(self.ell - x, self.algebra))


def elkies_factor(curve: CurveParams, ell: int, x_eig: int) -> list:
    """Degree-(ell-1)/2 eigenvalue factor of the ell-th division polynomial.

    x_eig is the expected Frobenius eigenvalue on the kernel, up to sign; the
    double-eigenvalue case x_eig**2 = n mod ell is rejected up front.  A gcd
    of the wrong degree is a composite witness once the preconditions hold.
    """
    n = curve.n
    if ell < 3 or n % ell == 0:
        raise ValueError("ell must be an odd prime not dividing n")
    x_eig %= ell
    if x_eig == 0:
        raise ValueError("eigenvalue candidate must be a unit mod ell")
    if (x_eig * x_eig - n) % ell == 0:
        raise ValueError("double eigenvalue: discard this ell")
    dp = division_polys(curve)
    psi = dp.torsion_poly(ell)
    h1 = poly_pow_rem([0, 1], n, psi, n)
    big = QuotientRing(_monic(psi, n), n)
    denom = big.reduce(dp.psi_squared(x_eig))
    try:
        denom_inv = big.inv(denom)
    except ZeroDivisionError:
        raise CompositeWitness("elkies-gx-denominator", (n, ell, x_eig)) from None
    gx = big.mul(big.reduce(dp.phi(x_eig)), denom_inv)
    factor = try_gcd(psi, poly_sub(big.reduce(h1), gx, n), n)
    if len(factor) - 1 != (ell - 1) // 2:
        raise CompositeWitness("elkies-degree", (n, ell, len(factor) - 1))
    return factor


def _monic(poly, n):
    from .polyring import monic_scale

    return monic_scale(list(poly), n)


def build_elkies_ring(curve: CurveParams, ell: int, factor, x_eig: int) -> ElkiesRing:
    """Validate an Elkies factor and wrap it in its quotient algebra.

    Checks: monic, degree (ell-1)/2, divides psi_ell, and the product
    identity F(T) = prod (T - g_i(Theta)) over the algebra.
    """
    n = curve.n
    factor = canonical(factor, n)
    if not factor or factor[-1] != 1:
        raise CompositeWitness("elkies-not-monic", (n, ell))
    if len(factor) - 1 != (ell - 1) // 2:
        raise CompositeWitness("elkies-degree", (n, ell, len(factor) - 1))
    dp = division_polys(curve)
    if poly_rem(dp.torsion_poly(ell), factor, n):
        raise CompositeWitness("elkies-not-a-divisor", (n, ell))
    algebra = build_torsion_algebra(factor, ell, curve)
    ring = algebra.ring
    prod = [ring.one()]
    for i in range(1, (ell - 1) // 2 + 1):
        gi = mult_poly_g(i, algebra)
        nxt = [ring.zero()] * (len(prod) + 1)
        for j, c in enumerate(prod):
            nxt[j] = ring.sub(nxt[j], ring.mul(c, gi))
            nxt[j + 1] = ring.add(nxt[j + 1], c)
        prod = nxt
    want = [ring.embed(c) for c in factor]
    if prod != want:
        raise CompositeWitness("elkies-product-identity", (n, ell))
    return ElkiesRing(algebra=algebra, ell=ell, x_eig=x_eig % ell)


def tensor_sigma(tensor: TensorRing, a, ext: CycloExt):
    """Coefficient-wise Frobenius of the working extension, on tensor elements."""
    return tensor._norm([ext.sigma(c) for c in a])


def elliptic_gauss_sum_odd(chi: CharacterData, elk: ElkiesRing, ext: CycloExt,
                           tensor: TensorRing = None):
    """tau_e(chi) = sum over x of chi(x) g_x(Theta), for odd-order chi."""
    if chi.order % 2 == 0:
        raise ValueError("use the even variant for even-order characters")
    return _weighted_sum(chi, elk, ext, elk.g_theta, tensor)


def elliptic_gauss_sum_even(chi: CharacterData, elk: ElkiesRing, ext: CycloExt,
                            tensor: TensorRing = None):
    """Omega-coefficient of tau'_e(chi) = sum of chi(x) ([x]P)_Y.

    The actual sum is Omega times the returned element; the square root never
    needs to be represented because it cancels in every tested ratio.
    """
    if chi.order % 2:
        raise ValueError("use the odd variant for odd-order characters")
    return _weighted_sum(chi, elk, ext, elk.w_theta, tensor)


def _weighted_sum(chi, elk, ext, table, tensor):
    if tensor is None:
        tensor = TensorRing(elk.factor, ext.ring)
    d = chi.order
    ell = elk.ell
    ring = elk.algebra.ring
    buckets = [ring.zero() for _ in range(d)]
    for x in range(1, ell):
        e = chi.exponent(x)
        buckets[e] = ring.add(buckets[e], table(x))
    zeta_d = ext.zeta_subgroup_gen(d)
    out = tensor.zero()
    zpow = ext.ring.one()
    for e in range(d):
        if buckets[e]:
            out = tensor.add(out, tensor.scale(tensor.embed_base(buckets[e]), zpow))
        zpow = ext.ring.mul(zpow, zeta_d)
    return out


@dataclass(frozen=True)
class EllipticExtensionWitness:
    """Per-ell transcript: eta exponents per prime power and the eigenvalue."""

    ell: int
    eta_map: dict  # prime power q -> (u, e): character chi**u gave eta = zeta**e
    lam: int       # eigenvalue of the extension, unit mod ell

    def eta_exponent(self, q: int) -> int:
        return self.eta_map[q][1]


def _rational_factor(tensor, elem):
    """gcd of all base coefficients with n, if it is proper."""
    n = tensor.n
    g = n
    for coeff in elem:
        for c in coeff:
            g = gcd(g, c)
    return g if 1 < g < n else None


def test_one_character(modulus: int, elk: ElkiesRing, ext, chi: CharacterData,
                       u: int):
    """Membership exponent of tau(chi**u)**n / tau(chi**(u n)) in <zeta_d>.

    The n-th power is taken through tau**d: that power is fixed by the
    torsion-side Frobenius, so when the modulus behaves like a prime it is a
    scalar of the working extension and the huge exponent lives in the small
    ring.  A non-scalar tau**d is itself a composite witness.

    Returns the exponent e of the ratio, None when a Gauss sum is a zero
    divisor (candidate character unusable), and raises on decisive outcomes:
    FactorFound for a rational factor, CompositeWitness when the ratio
    exists but leaves the cyclic group.
    """
    n = modulus
    d = chi.order
    even = chi.p == 2
    tensor = TensorRing(elk.factor, ext.ring)
    summer = elliptic_gauss_sum_even if even else elliptic_gauss_sum_odd
    base_sum = summer(_char_power(chi, u), elk, ext, tensor)
    try:
        tensor.inv(base_sum)
    except ZeroDivisionError:
        g = _rational_factor(tensor, base_sum)
        if g:
            raise FactorFound(g, n) from None
        return None
    twisted = summer(_char_power(chi, u * n % d), elk, ext, tensor)
    try:
        twisted_inv = tensor.inv(twisted)
    except ZeroDivisionError:
        g = _rational_factor(tensor, twisted)
        if g:
            raise FactorFound(g, n) from None
        return None
    b, r = divmod(n, d)
    e_ring = elk.algebra.ring
    f_theta = e_ring.reduce(elk.curve.f_poly())
    power_d = tensor.pow(base_sum, d)
    if even:
        # tau' carries Omega: Omega**d = f(Theta)**(d/2)
        power_d = tensor.mul(power_d, tensor.embed_base(e_ring.pow(f_theta, d // 2)))
    scalar = tensor.constant_part(power_d)
    if scalar is None:
        raise CompositeWitness("gauss-power-not-invariant", (n, elk.ell, d, u))
    big = ext.ring.pow(scalar, b)
    ratio = tensor.mul(tensor.embed_coeff(big), tensor.pow(base_sum, r))
    ratio = tensor.mul(ratio, twisted_inv)
    if even:
        ratio = tensor.mul(ratio, tensor.embed_base(e_ring.pow(f_theta, (r - 1) // 2)))
    exp = _membership_exponent(tensor, ratio, ext, d)
    if exp is None:
        raise CompositeWitness("elliptic-membership", (n, elk.ell, d, u))
    return exp


def elliptic_extension_test(modulus: int, elk: ElkiesRing, ext_for_prime,
                            trace: int) -> EllipticExtensionWitness:
    """Verify the n-power Gauss-sum conditions for every prime power q || ell-1.

    ext_for_prime(p, k) supplies a saturated working extension of the
    modulus.  For each prime power the characters chi**u of full order are
    scanned until one has both Gauss sums invertible; the membership
    exponents pin the eigenvalue by CRT over the character orders, and the
    Frobenius characteristic equation lam**2 - trace*lam + modulus = 0
    mod ell must hold.

    Raises CompositeWitness when a ratio leaves the cyclic group or the
    characteristic equation fails, ExceptionalConductor when every
    character's Gauss sum at some q is a zero divisor with no rational
    factor, FactorFound when one appears.
    """
    ell = elk.ell
    n = modulus
    eta_map = {}
    residues = []
    moduli = []
    for p, a in sorted(factorize(ell - 1).items()):
        q = p ** a
        ext = ext_for_prime(p, a)
        chi = build_character(ell, p, a)
        found = None
        for u in range(1, q):
            if u % p == 0:
                continue
            exp = test_one_character(n, elk, ext, chi, u)
            if exp is not None:
                found = (u, exp)
                break
        if found is None:
            raise ExceptionalConductor(ell, q)
        u, exp = found
        eta_u = (-exp * pow(n, -1, q)) % q
        eta_map[q] = (u, eta_u)
        # chi**u(lam) = zeta**eta_u, so ind(lam) = eta_u / u mod q
        residues.append(eta_u * pow(u, -1, q) % q)
        moduli.append(q)
    ind = _crt(residues, moduli)
    g = build_character(ell, sorted(factorize(ell - 1))[0], 1).generator
    lam = pow(g, ind, ell)
    if (lam * lam - trace * lam + n) % ell != 0:
        raise CompositeWitness("frobeq-consistency", (n, ell, lam))
    return EllipticExtensionWitness(ell=ell, eta_map=eta_map, lam=lam)


def _char_power(chi: CharacterData, e: int) -> CharacterData:
    """Character x -> chi(x)**e, represented over the same dlog table."""
    if e % chi.order == 0:
        # trivial character retains the table but maps everything to 1
        return CharacterData(q=chi.q, p=chi.p, k=chi.k, generator=chi.generator,
                             dlog=tuple(0 for _ in chi.dlog))
    scaled = tuple((v * e) for v in chi.dlog)
    return CharacterData(q=chi.q, p=chi.p, k=chi.k, generator=chi.generator,
                         dlog=scaled)


def _membership_exponent(tensor: TensorRing, value, ext: CycloExt, d: int):
    """e with value = zeta_d**e embedded in the tensor ring, else None."""
    const = tensor.constant_part(value)
    if const is None:
        return None
    zeta_d = ext.zeta_subgroup_gen(d)
    probe = ext.ring.one()
    for e in range(d):
        if probe == const:
            return e
        probe = ext.ring.mul(probe, zeta_d)
    return None


def _crt(residues, moduli):
    x, m = 0, 1
    for r, q in zip(residues, moduli):
        t = (r - x) * pow(m, -1, q) % q
        x += m * t
        m *= q
    return x % m


def check_ev_condition(lambda_m: int, lambda_n: int, mu, ell: int) -> bool:
    """Joint eigenvalue consistency for a dual pair.

    True iff for one common embedding of the order into Z/ell,
    lambda_m = mu + 1 and lambda_n = mu (both mod ell).
    """
    x, y = mu.residue_pair(ell)
    return ((lambda_m == (x + 1) % ell and lambda_n == x)
            or (lambda_m == (y + 1) % ell and lambda_n == y))
