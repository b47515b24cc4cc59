"""Independent certificate verification: re-check everything, search nothing.

Every clause recomputes its claim from the certificate data alone, in a
fixed order, and the first failure names the clause.  The expensive
constructions of the prover (partner search, twist scans, eigenvalue factor
gcds, extension searches) are replaced by validations of the stored objects,
which is what makes verification much cheaper than proving while covering
exactly the same algebraic content.
"""

from __future__ import annotations

from dataclasses import dataclass
from math import gcd

from .zn import (
    CompositeWitness,
    FactorFound,
    factorize,
    is_perfect_power,
    strong_pseudoprime,
)
from .polyring import QuotientRing, canonical, poly_eval
from .ec import INFINITY, PASS, CurveParams, elliptic_fermat_test
from .cm import QuadInt, QuadOrder, class_polynomial
from .cyclo import (
    CycloExt,
    build_character,
    cpp_character_test,
    saturation_exponent,
    verify_extension,
)
from .ace import (
    eigenvalue_collision,
    is_split,
    joint_solutions,
    only_trivial,
    residue_quadruple,
    solve_ellk_mod_prime,
    DegenerateResidue,
)
from .elkies import build_elkies_ring, check_ev_condition, test_one_character
from .certificate import Certificate, CertificateFormatError, parse_certificate
from .prover import character_plan


@dataclass
class VerifyResult:
    valid: bool
    reason: str = ""

    def __bool__(self):
        return self.valid


def _invalid(reason):
    return VerifyResult(valid=False, reason=reason)


def verify(cert) -> VerifyResult:
    """Re-check a certificate; Valid iff every clause passes.

    Accepts a Certificate or its canonical text.  Never searches: all
    recomputation is driven by stored data.
    """
    if isinstance(cert, str):
        try:
            cert = parse_certificate(cert)
        except CertificateFormatError as exc:
            return _invalid(f"Format: {exc}")
    try:
        return _verify_parsed(cert)
    except (FactorFound, CompositeWitness, ZeroDivisionError, ValueError,
            ArithmeticError) as exc:
        return _invalid(f"RecomputationFailure: {exc}")


def _verify_parsed(cert: Certificate) -> VerifyResult:
    n, m = cert.n, cert.m
    # pair arithmetic
    if n < 7 or m < 7 or n % 2 == 0 or m % 2 == 0:
        return _invalid("PairArithmetic")
    if gcd(n, 6) != 1 or gcd(m, 6) != 1:
        return _invalid("PairArithmetic")
    if cert.epsilon not in (1, -1):
        return _invalid("PairArithmetic")
    try:
        order = QuadOrder.from_disc(cert.disc)
        mu = QuadInt(cert.mu_a, cert.mu_b, order)
    except ValueError:
        return _invalid("PairArithmetic")
    nu = mu + 1
    if mu.norm != m or nu.norm != n:
        return _invalid("PairArithmetic")
    if mu.trace == 0 or gcd(m, abs(mu.trace)) != 1:
        return _invalid("TraceCoprimality")
    if nu.trace == 0 or gcd(n, abs(nu.trace)) != 1:
        return _invalid("TraceCoprimality")
    if is_perfect_power(n) or is_perfect_power(m):
        return _invalid("PerfectPower")
    if not strong_pseudoprime(n, seed=cert.seed) or not strong_pseudoprime(m, seed=cert.seed):
        return _invalid("StrongPseudoprime")

    # class polynomial and associations
    try:
        hilbert = class_polynomial(order, max(10 ** 6, -cert.disc)).coeffs
    except Exception:
        return _invalid("ClassPolynomial")
    if tuple(hilbert) != tuple(cert.hilbert):
        return _invalid("ClassPolynomial")
    for side, modulus, j0, curve_ab, point in (
        ("M", m, cert.j_m, cert.curve_m, cert.point_m),
        ("N", n, cert.j_n, cert.curve_n, cert.point_n),
    ):
        if poly_eval(canonical(list(hilbert), modulus), j0 % modulus, modulus):
            return _invalid(f"Association{side}")
        try:
            curve = CurveParams(curve_ab[0], curve_ab[1], modulus)
        except (ValueError, FactorFound):
            return _invalid(f"Association{side}")
        if curve.j_invariant() != j0 % modulus:
            return _invalid(f"Association{side}")
        if not curve.on_curve(point) or point is INFINITY:
            return _invalid(f"Association{side}")
    curve_m = CurveParams(cert.curve_m[0], cert.curve_m[1], m)
    curve_n = CurveParams(cert.curve_n[0], cert.curve_n[1], n)

    # annihilation of the points by the partner sizes
    try:
        if elliptic_fermat_test(curve_m, tuple(cert.point_m), n) != PASS:
            return _invalid("FermatM")
        if elliptic_fermat_test(curve_n, tuple(cert.point_n), m) != PASS:
            return _invalid("FermatN")
    except (FactorFound, CompositeWitness):
        return _invalid("FermatM")

    # parameters
    s, t = cert.s, cert.t
    s_factors = factorize(s)
    if any(e > 1 for e in s_factors.values()):
        return _invalid("Parameters")
    lam = 1
    for q in s_factors:
        if q != 2 and t % (q - 1):
            return _invalid("Parameters")
        part = 1 if q == 2 else q - 1
        lam = lam * part // gcd(lam, part)
    if lam != t:
        return _invalid("Parameters")
    if s ** 4 <= 16 * max(m, n):
        return _invalid("Parameters")
    L = 1
    for ell in cert.l_primes:
        L *= ell
    if len(set(cert.l_primes)) != len(cert.l_primes):
        return _invalid("Parameters")
    if s % cert.s_prime or gcd(cert.s_prime, L) != 1:
        return _invalid("Parameters")
    if cert.big_s != cert.s_prime * L:
        return _invalid("Parameters")

    # auxiliary L conditions, re-brute-forced
    phi_L = 1
    per_prime = {}
    for ell in cert.l_primes:
        if not is_split(order, ell):
            return _invalid("AceSplit")
        try:
            residue_quadruple(mu, ell)
            if eigenvalue_collision(mu, ell):
                return _invalid("AceSplit")
            per_prime[ell] = solve_ellk_mod_prime(mu, ell, order)
        except DegenerateResidue:
            return _invalid("AceSplit")
        if ell not in cert.ace_solutions:
            return _invalid("MissingCoverage")
        if [tuple(x) for x in cert.ace_solutions[ell]] != per_prime[ell]:
            return _invalid("AceSolutions")
        phi_L *= ell - 1
    if set(cert.ace_solutions) != set(cert.l_primes):
        return _invalid("AceSolutions")
    if phi_L % t:
        return _invalid("AceGood")
    joint, mod = joint_solutions(per_prime)
    if not only_trivial(joint, mod):
        return _invalid("AceGood")

    # residue-gap guard
    big_s = cert.big_s
    c = abs(m % big_s - n % big_s)
    bound4 = 16 * max(m, n)
    if c ** 4 <= bound4 or (big_s - c) ** 4 <= bound4:
        return _invalid("ResidueGap")

    # working extensions
    plan = character_plan(cert.s_prime, cert.l_primes)
    min_levels = {}
    for _, p, k in plan:
        min_levels[p] = max(min_levels.get(p, 0), k)
    exts = {"m": {}, "n": {}}
    for rec in cert.extensions:
        modulus = m if rec.side == "m" else n
        if rec.level < saturation_exponent(rec.p, modulus):
            return _invalid("ExtensionSaturation")
        try:
            ring = QuotientRing(canonical(list(rec.psi), modulus), modulus)
            ext = CycloExt(ring=ring, n=modulus, p=rec.p, k=rec.level)
            verify_extension(ext)
        except (ValueError, CompositeWitness, FactorFound):
            return _invalid("ExtensionAxioms")
        exts[rec.side][rec.p] = ext
    for side in ("m", "n"):
        for p, k in min_levels.items():
            ext = exts[side].get(p)
            if ext is None or ext.k < k:
                return _invalid("MissingCoverage")

    # main-stage memberships
    for side, modulus, entries in (("m", m, cert.cpp_m), ("n", n, cert.cpp_n)):
        want = {(q, p, k) for q, p, k in plan}
        got = {(e.q, e.p, e.k) for e in entries}
        if want != got or len(entries) != len(want):
            return _invalid("MissingCoverage")
        for e in entries:
            d = e.p ** e.k
            if (e.b, e.r) != divmod(modulus, d):
                return _invalid("CppDivision")
            chi = build_character(e.q, e.p, e.k)
            rec = cpp_character_test(modulus, chi, exts[side][e.p])
            if rec is None or rec.eta != e.eta:
                return _invalid("CppMembership")
        covered = {e.p for e in entries if e.eta % e.p}
        if any(p not in covered for p in factorize(t)):
            return _invalid("CppPrimitivity")

    # elliptic extensions
    recs = {(r.side, r.ell): r for r in cert.elkies}
    want_keys = {(side, ell) for side in ("m", "n") for ell in cert.l_primes}
    if set(recs) != want_keys or len(cert.elkies) != len(want_keys):
        return _invalid("MissingCoverage")
    lam_pairs = {}
    for (side, ell), rec in sorted(recs.items()):
        modulus, curve, gen = (m, curve_m, mu) if side == "m" else (n, curve_n, nu)
        x_expect, _ = gen.residue_pair(ell)
        if rec.x_eig != x_expect:
            return _invalid("ElkiesEigenvalueChoice")
        try:
            ring = build_elkies_ring(curve, ell, list(rec.factor), rec.x_eig)
        except (CompositeWitness, FactorFound):
            return _invalid("ElkiesFactor")
        qs = sorted(p ** a for p, a in factorize(ell - 1).items())
        if sorted(q for q, _, _ in rec.etas) != qs:
            return _invalid("MissingCoverage")
        trace = modulus + 1 - (n if side == "m" else m)
        lam = rec.lam
        if (lam * lam - trace * lam + modulus) % ell:
            return _invalid("FrobeqConsistency")
        residues, moduli = [], []
        for q, u, eta in sorted(rec.etas):
            p = min(factorize(q))
            a = factorize(q)[p]
            chi = build_character(ell, p, a)
            if u % p == 0 or not 1 <= u < q:
                return _invalid("ElkiesCharacter")
            try:
                exp = test_one_character(modulus, ring, exts[side][p], chi, u)
            except (CompositeWitness, FactorFound, ZeroDivisionError):
                return _invalid("ElkiesMembership")
            if exp is None or eta != (-exp * pow(modulus, -1, q)) % q:
                return _invalid("ElkiesMembership")
            residues.append(eta * pow(u, -1, q) % q)
            moduli.append(q)
        ind = 0
        mod_acc = 1
        for r_, q_ in zip(residues, moduli):
            t_ = (r_ - ind) * pow(mod_acc, -1, q_) % q_
            ind += mod_acc * t_
            mod_acc *= q_
        g = build_character(ell, min(factorize(ell - 1)), 1).generator
        if pow(g, ind % (ell - 1), ell) != lam:
            return _invalid("EtaLambdaConsistency")
        lam_pairs.setdefault(ell, {})[side] = lam
    for ell, sides in lam_pairs.items():
        lam_plus = sides["n"]
        lam_base = (-sides["m"]) % ell
        if not check_ev_condition(lam_plus, lam_base, mu, ell):
            return _invalid("EvConsistency")

    if cert.verdict != "prime-pair":
        return _invalid("Verdict")
    return VerifyResult(valid=True)
