"""Cyclotomic extensions of Z/nZ, Gauss and Jacobi sums, and the main-stage test.

A working extension for the prime power p**k is a quotient ring
Z/nZ[X]/(Psi(X)) whose generator zeta behaves like a primitive p**k-th root
of unity, with the n-power map acting as a Frobenius.  Nothing here assumes
n prime: the construction verifies the pseudo-field axioms explicitly and
treats verification failure as evidence of compositeness.

The main-stage membership test is computed through multiple Jacobi sums, so
only the small cyclotomic ring is ever touched; direct Gauss sums over the
conductor live in composed rings and are used by the test suite as the
independent route.
"""

from __future__ import annotations

from dataclasses import dataclass
from math import gcd

from .zn import (
    CompositeWitness,
    FactorFound,
    det_stream,
    factorize,
    v_adic,
    valuation_of_power,
)
from .polyring import (
    QuotientRing,
    TensorRing,
    canonical,
    normalize,
    poly_add,
    poly_mul,
    poly_rem,
    poly_sub,
)


class StageFailed(RuntimeError):
    """A bounded search inside one proof stage ran out of budget."""


class NotCoprime(ValueError):
    pass


def saturation_exponent(p: int, n: int) -> int:
    """Saturation exponent k(p) for the modulus n."""
    if n % p == 0:
        raise ValueError("p divides n")
    if p == 2 and n % 4 == 3:
        return valuation_of_power(2, n, 2)
    return valuation_of_power(p, n, p - 1)


def multiplicative_order(a: int, m: int) -> int:
    """Order of a in (Z/mZ)*, for small m."""
    a %= m
    if gcd(a, m) != 1:
        raise ValueError("element not a unit")
    phi = 1
    for q, e in factorize(m).items():
        phi *= (q - 1) * q ** (e - 1)
    order = phi
    for q in factorize(phi):
        while order % q == 0 and pow(a, order // q, m) == 1:
            order //= q
    return order


def least_primitive_root(q: int) -> int:
    """Least generator of (Z/qZ)* for prime q."""
    if q == 2:
        return 1
    phi = q - 1
    factors = list(factorize(phi))
    for g in range(2, q):
        if all(pow(g, phi // r, q) != 1 for r in factors):
            return g
    raise ValueError(f"{q} has no primitive root; is it prime?")


def cyclotomic_poly_prime_power(p: int, k: int, n: int) -> list:
    """Phi_{p**k}(X) mod n: 1 + X**e + X**(2e) + ... with e = p**(k-1)."""
    e = p ** (k - 1)
    out = [0] * ((p - 1) * e + 1)
    for i in range(p):
        out[i * e] = 1 % n
    return normalize(out)


@dataclass(frozen=True)
class CycloExt:
    """Quotient ring carrying a distinguished p**k-th root of unity zeta = X."""

    ring: QuotientRing
    n: int
    p: int
    k: int

    @property
    def s(self) -> int:
        return self.p ** self.k

    @property
    def t(self) -> int:
        return self.ring.degree

    @property
    def zeta(self) -> list:
        return self.ring.gen()

    def zeta_power(self, e: int) -> list:
        return self.ring.pow(self.zeta, e % self.s)

    def zeta_subgroup_gen(self, d: int) -> list:
        """zeta_d of exact order d, for d dividing p**k."""
        if self.s % d:
            raise ValueError("d must divide p**k")
        return self.ring.pow(self.zeta, self.s // d)

    def sigma(self, elem: list) -> list:
        """The Frobenius-like map zeta -> zeta**n applied to an element."""
        image = self.zeta_power(self.n % self.s)
        acc = []
        for c in reversed(elem):
            acc = self.ring.mul(acc, image)
            acc = self.ring.add(acc, [c])
        return acc


def verify_extension(ext: CycloExt) -> None:
    """Re-check the pseudo-field axioms; raises CompositeWitness on failure."""
    ring, n, p, k = ext.ring, ext.n, ext.p, ext.k
    s = p ** k
    zeta = ext.zeta
    # zeta is a primitive p**k-th root: Phi_{p**k}(zeta) = 0 and the
    # p**(k-1) power is not 1.
    w = ring.pow(zeta, p ** (k - 1))
    acc = ring.one()
    tot = ring.one()
    for _ in range(p - 1):
        tot = ring.mul(tot, w)
        acc = ring.add(acc, tot)
    if normalize(acc):
        raise CompositeWitness("cyclotomic-vanishing", (n, p, k))
    if ring.pow(zeta, s) != ring.one():
        raise CompositeWitness("root-order", (n, p, k))
    # F2: exponent orbit n**i mod s must cycle with exact length t
    t = ext.t
    e = n % s
    seen = []
    for i in range(1, t + 1):
        seen.append(e)
        e = e * n % s
    if len(set(seen)) != t or seen[-1] * n % s != seen[0]:
        raise CompositeWitness("frobenius-orbit", (n, p, k))
    # sigma well defined: Psi(zeta**n) = 0 in the ring
    img = ext.zeta_power(n % s)
    acc = []
    for c in reversed(ring.f):
        acc = ring.mul(acc, img)
        acc = ring.add(acc, [c])
    if normalize(acc):
        raise CompositeWitness("sigma-not-endomorphism", (n, p, k))
    # F1: the modulus polynomial is the product over the orbit
    prod = [ring.one()]
    for exp in seen:
        root = ext.zeta_power(exp)
        nxt = [ring.zero()] * (len(prod) + 1)
        for i, c in enumerate(prod):
            nxt[i] = ring.sub(nxt[i], ring.mul(c, root))
            nxt[i + 1] = ring.add(nxt[i + 1], c)
        prod = nxt
    want = [ring.embed(c) for c in ring.f]
    if prod != want:
        raise CompositeWitness("orbit-product", (n, p, k))


def build_working_extension(n: int, p: int, k: int, seed: int = 0) -> CycloExt:
    """Construct a verified p**k-th working extension of Z/nZ.

    The caller is responsible for passing a saturated level
    k >= saturation_exponent(p, n).  Raises CompositeWitness when the
    pseudo-field axioms fail to verify and StageFailed when the bounded
    random search finds no candidate (which for prime n is vanishingly
    unlikely).
    """
    s = p ** k
    if gcd(s, n) != 1:
        raise ValueError("p**k must be coprime to n")
    t = multiplicative_order(n % s, s) if s > 1 else 1
    stream = det_stream(seed, f"ext-{n}-{p}-{k}")
    if t == 1:
        exponent = (n - 1) // s
        for _ in range(64):
            u = 2 + next(stream) % (n - 3)
            z = pow(u, exponent, n)
            if pow(z, s, n) != 1:
                raise CompositeWitness("fermat-in-base", (n, u))
            if s > 1 and pow(z, s // p, n) == 1:
                continue
            ext = CycloExt(ring=QuotientRing([(-z) % n, 1], n), n=n, p=p, k=k)
            verify_extension(ext)
            return ext
        raise StageFailed(f"no order-{s} element mod {n}")
    exponent = (n ** t - 1) // s
    for attempt in range(48):
        h = [next(stream) % n for _ in range(t)] + [1]
        helper = QuotientRing(canonical(h, n), n)
        u = [next(stream) % n for _ in range(t)]
        u = normalize(u)
        if not u:
            continue
        try:
            z = helper.pow(u, exponent)
        except Exception:
            continue
        if helper.pow(z, s) != helper.one():
            continue
        if helper.pow(z, s // p) == helper.one():
            continue
        # product over the orbit must have base-ring coefficients
        orbit = []
        x = z
        ok = True
        for i in range(t):
            x = helper.pow(x, n)
            orbit.append(x)
        if orbit[-1] != z:
            continue
        if len({tuple(o) for o in orbit}) != t:
            continue
        prod = [helper.one()]
        for root in orbit:
            nxt = [helper.zero()] * (len(prod) + 1)
            for i, c in enumerate(prod):
                nxt[i] = helper.sub(nxt[i], helper.mul(c, root))
                nxt[i + 1] = helper.add(nxt[i + 1], c)
            prod = nxt
        psi = []
        for c in prod:
            if not helper.is_constant(c):
                ok = False
                break
            psi.append(helper.constant_value(c))
        if not ok:
            continue
        psi = canonical(psi, n)
        if len(psi) != t + 1 or psi[-1] != 1:
            continue
        if poly_rem(cyclotomic_poly_prime_power(p, k, n), psi, n):
            continue
        ext = CycloExt(ring=QuotientRing(psi, n), n=n, p=p, k=k)
        verify_extension(ext)
        return ext
    raise StageFailed(f"no degree-{t} working extension for {p}**{k} mod {n}")


def _flatten_tensor(tensor: TensorRing, elem, dim1: int) -> list:
    out = []
    padded = list(elem) + [tensor.R.zero()] * (tensor.deg - len(elem))
    for c in padded:
        cc = list(c) + [0] * (dim1 - len(c))
        out.extend(cc)
    return out


def _solve_linear(matrix, rhs, n):
    """Solve matrix * x = rhs over Z/nZ by Gaussian elimination.

    matrix is a list of column vectors.  Returns x or None when no pivot is
    available; FactorFound propagates from pivot inversion.
    """
    rows = len(rhs)
    cols = len(matrix)
    aug = [[matrix[j][i] % n for j in range(cols)] + [rhs[i] % n] for i in range(rows)]
    pivots = []
    r = 0
    for c in range(cols):
        pivot_row = None
        for i in range(r, rows):
            if aug[i][c] % n:
                g = gcd(aug[i][c], n)
                if 1 < g < n:
                    raise FactorFound(g, n)
                if g == 1:
                    pivot_row = i
                    break
        if pivot_row is None:
            return None
        aug[r], aug[pivot_row] = aug[pivot_row], aug[r]
        inv = pow(aug[r][c], -1, n)
        aug[r] = [v * inv % n for v in aug[r]]
        for i in range(rows):
            if i != r and aug[i][c]:
                f = aug[i][c]
                aug[i] = [(a - f * b) % n for a, b in zip(aug[i], aug[r])]
        pivots.append(c)
        r += 1
        if r == cols:
            break
    for i in range(r, rows):
        if aug[i][cols] % n:
            return None
    x = [0] * cols
    for idx, c in enumerate(pivots):
        x[c] = aug[idx][cols]
    return x


def compose_extensions(e1: CycloExt, e2: CycloExt) -> "ComposedExt":
    """Composite extension with a root of unity of order s1*s2, gcd(s1,s2)=1.

    The tensor of the two rings is repackaged as a simple quotient ring: a
    primitive element zeta1 + c*zeta2 whose powers span the tensor supplies
    the product-compatible modulus polynomial, and zeta1*zeta2 is expressed
    in that power basis as the distinguished root of unity.
    """
    if gcd(e1.s, e2.s) != 1:
        raise NotCoprime("component orders must be coprime")
    if e1.n != e2.n:
        raise ValueError("different base moduli")
    n = e1.n
    dim = e1.t * e2.t
    tensor = TensorRing(e2.ring.f, e1.ring)
    z1 = tensor.embed_coeff(e1.zeta)
    z2 = tensor.gen()
    z12 = tensor.mul(z1, z2)
    for c in range(1, 33):
        w = tensor.add(z1, tensor.scale(z2, e1.ring.embed(c)))
        powers = [tensor.one()]
        for _ in range(dim):
            powers.append(tensor.mul(powers[-1], w))
        cols = [_flatten_tensor(tensor, p, e1.t) for p in powers[:dim]]
        target = [(-v) % n for v in _flatten_tensor(tensor, powers[dim], e1.t)]
        coeffs = _solve_linear(cols, target, n)
        if coeffs is None:
            continue
        modulus = canonical(coeffs + [1], n)
        if len(modulus) != dim + 1:
            continue
        zeta_vec = _solve_linear(cols, _flatten_tensor(tensor, z12, e1.t), n)
        if zeta_vec is None:
            continue
        ring = QuotientRing(modulus, n)
        zeta = canonical(zeta_vec, n)
        out = ComposedExt(ring=ring, n=n, s=e1.s * e2.s, zeta_elem=tuple(zeta))
        if ring.pow(zeta, out.s) != ring.one():
            raise CompositeWitness("compose-order", (n, out.s))
        for p in factorize(out.s):
            if ring.pow(zeta, out.s // p) == ring.one():
                raise CompositeWitness("compose-order", (n, out.s, p))
        return out
    raise StageFailed("no primitive element for the composed extension")


@dataclass(frozen=True)
class ComposedExt:
    """Extension with a distinguished root of unity of composite order s."""

    ring: QuotientRing
    n: int
    s: int
    zeta_elem: tuple = None  # None means zeta is the ring generator X

    @property
    def zeta(self) -> list:
        if self.zeta_elem is not None:
            return list(self.zeta_elem)
        return self.ring.gen()

    def zeta_power(self, e: int) -> list:
        return self.ring.pow(self.zeta, e % self.s)

    def root_of_order(self, d: int) -> list:
        if self.s % d:
            raise ValueError("order must divide s")
        return self.ring.pow(self.zeta, self.s // d)


@dataclass(frozen=True)
class CharacterData:
    """Multiplicative character of prime conductor q and prime-power order."""

    q: int
    p: int
    k: int
    generator: int
    dlog: tuple  # dlog[x] = index of x base generator, for x in 1..q-1

    @property
    def order(self) -> int:
        return self.p ** self.k

    def exponent(self, x: int) -> int:
        """e with chi(x) = zeta_d**e."""
        x %= self.q
        if x == 0:
            raise ValueError("character undefined at 0")
        return self.dlog[x] % self.order

    def minus_one_exponent(self) -> int:
        return ((self.q - 1) // 2) % self.order


def build_character(q: int, p: int, k: int = 0) -> CharacterData:
    """Character of conductor q and order p**k; k defaults to v_p(q-1)."""
    if k == 0:
        k = v_adic(p, q - 1)
    if k == 0 or (q - 1) % p ** k:
        raise ValueError(f"no character of order {p}**{k} and conductor {q}")
    g = least_primitive_root(q)
    dlog = [0] * q
    acc = 1
    for i in range(q - 1):
        dlog[acc] = i
        acc = acc * g % q
    return CharacterData(q=q, p=p, k=k, generator=g, dlog=tuple(dlog))


def characters_for_conductor(q: int) -> list:
    """One character per prime-power part of q - 1 (full p-part each)."""
    return [build_character(q, p) for p in sorted(factorize(q - 1))]


def gauss_sum(chi: CharacterData, xi: list, ext) -> list:
    """tau(chi) = sum over units of chi(x) * xi**x, computed in O(q) ring ops.

    xi must be a primitive q-th root of unity in ext.ring, and ext must
    contain a root of unity of order chi.order.
    """
    ring = ext.ring
    zeta_d = ext.root_of_order(chi.order) if isinstance(ext, ComposedExt) \
        else ext.zeta_subgroup_gen(chi.order)
    zeta_pows = _power_table(ring, zeta_d, chi.order)
    total = ring.zero()
    xi_pow = ring.one()
    for x in range(1, chi.q):
        xi_pow = ring.mul(xi_pow, xi)
        total = ring.add(total, ring.mul(zeta_pows[chi.exponent(x)], xi_pow))
    return total


def _power_table(ring, base, count):
    out = [ring.one()]
    for _ in range(count - 1):
        out.append(ring.mul(out[-1], base))
    return out


def jacobi_sum_exponent_counts(chi: CharacterData, a: int, b: int) -> list:
    """Coefficient counts of j(chi**a, chi**b) relative to powers of zeta_d."""
    d = chi.order
    counts = [0] * d
    q = chi.q
    for x in range(2, q):
        e = (a * chi.dlog[x] + b * chi.dlog[(1 - x) % q]) % d
        counts[e] += 1
    return counts


def multiple_jacobi_sums(chi: CharacterData, ext: CycloExt) -> list:
    """[J_1, ..., J_d] with J_1 = 1, J_{v+1} = J_v * j(chi, chi**v) and the
    closing relation J_d = chi(-1) * q * J_{d-1}."""
    if chi.order == 1:
        raise ValueError("character must be nontrivial")
    ring = ext.ring
    d = chi.order
    zeta_d = ext.zeta_subgroup_gen(d)
    zeta_pows = _power_table(ring, zeta_d, d)
    sums = [ring.one()]
    for v in range(1, d - 1):
        counts = jacobi_sum_exponent_counts(chi, 1, v)
        jv = ring.zero()
        for e, c in enumerate(counts):
            if c:
                jv = ring.add(jv, [x * c % ring.n for x in zeta_pows[e]])
        sums.append(ring.mul(sums[-1], jv))
    if d >= 2:
        sign = zeta_pows[chi.minus_one_exponent()]
        closing = ring.mul(sign, [chi.q % ring.n])
        sums.append(ring.mul(closing, sums[-1]))
    return sums


@dataclass(frozen=True)
class CppRecord:
    """Transcript entry of one character's main-stage membership."""

    q: int
    p: int
    k: int
    b: int
    r: int
    eta: int  # eta = zeta_d**eta with tau**n / tau(chi**n) = eta**(-n)


def cpp_character_test(n: int, chi: CharacterData, ext: CycloExt):
    """Membership value T = tau(chi)**n / tau(chi**n) in <zeta_d>, via Jacobi sums.

    Returns a CppRecord or None when T is outside the cyclic group (the
    caller converts that into a composite witness).
    """
    ring = ext.ring
    d = chi.order
    b, r = divmod(n, d)
    assert r != 0, "conductor order shares a factor with n"
    sums = multiple_jacobi_sums(chi, ext)
    t_val = ring.mul(ring.pow(sums[d - 1], b), sums[r - 1])
    zeta_d = ext.zeta_subgroup_gen(d)
    probe = ring.one()
    exponent = None
    for e in range(d):
        if probe == t_val:
            exponent = e
            break
        probe = ring.mul(probe, zeta_d)
    if exponent is None:
        return None
    eta = (-exponent * pow(n, -1, d)) % d
    return CppRecord(q=chi.q, p=chi.p, k=chi.k, b=b, r=r, eta=eta)


@dataclass
class CppTranscript:
    records: list
    insufficient: bool = False


def cpp_main_stage(n: int, characters: list, ext_for_prime) -> CppTranscript:
    """Run the main-stage membership test for every character.

    ext_for_prime(p, k) must return a saturated working extension carrying a
    root of unity of order at least p**k.  A failed membership raises
    CompositeWitness; an empty character list is a vacuous pass flagged
    insufficient.
    """
    if not characters:
        return CppTranscript(records=[], insufficient=True)
    records = []
    for chi in characters:
        ext = ext_for_prime(chi.p, chi.k)
        rec = cpp_character_test(n, chi, ext)
        if rec is None:
            raise CompositeWitness("main-stage-membership", (n, chi.q, chi.order))
        records.append(rec)
    return CppTranscript(records=records)


def primitive_eta_primes(records) -> set:
    """Primes p for which some character produced a primitive p**k-th eta."""
    out = set()
    for rec in records:
        if rec.eta % rec.p != 0:
            out.add(rec.p)
    return out


_T_SCHEDULE = (2, 4, 6, 8, 12, 16, 24, 36, 48, 60, 72, 120, 180, 240, 360,
               504, 720, 840, 1080, 1260, 1680, 2520, 5040, 7560, 10080,
               15120, 25200, 55440, 110880, 720720)


def conductors_for_t(t: int) -> list:
    """Ascending primes q with q - 1 dividing t."""
    divisors = set()
    for e in range(1, t + 1):
        if t % e == 0:
            divisors.add(e)
    out = []
    for e in sorted(divisors):
        q = e + 1
        if q >= 2 and _is_small_prime(q):
            out.append(q)
    return out


def _is_small_prime(q: int) -> bool:
    if q < 2:
        return False
    if q < 4:
        return True
    if q % 2 == 0:
        return False
    d = 3
    while d * d <= q:
        if q % d == 0:
            return False
        d += 2
    return True


class ParameterSearchExhausted(StageFailed):
    pass


def select_parameters(n: int, floor4: int = None):
    """Choose (s, t, q_list) with s squarefree, q - 1 | t for q | s, t = lcm(q - 1),
    and s**4 > 16 * n  (that is, s > 2 * n**(1/4)).

    floor4, when given, replaces 16 * n as the fourth-power threshold.
    """
    threshold = 16 * n if floor4 is None else floor4
    for t_cap in _T_SCHEDULE:
        qs = conductors_for_t(t_cap)
        acc = []
        s = 1
        for q in qs:
            acc.append(q)
            s *= q
            if s ** 4 > threshold:
                break
        if s ** 4 <= threshold:
            continue
        t = 1
        for q in acc:
            part = 1 if q == 2 else q - 1
            t = t * part // gcd(t, part)
        return s, t, acc
    raise ParameterSearchExhausted(f"no parameter set reaches s**4 > {threshold}")
