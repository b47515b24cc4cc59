"""Search for a good squarefree L: only the trivial exponent pair survives.

For each split prime ell the congruence system
    x**k + delta = (x+1)**k'   and   y**k + delta = (y+1)**k'   (mod ell)
is brute forced over both embeddings simultaneously; per-prime solution
lists are then merged by CRT compatibility of the exponents.  L is good
when the merged list contains nothing but (k, k') = (1, 1) with delta = +1,
and the auxiliary requirement t | phi(L) makes the cyclotomic and elliptic
stages share their working extensions.
"""

from __future__ import annotations

from dataclasses import dataclass
from math import gcd

from .zn import jacobi
from .cm import QuadInt, QuadOrder


class DegenerateResidue(Exception):
    """One of x, y, x+1, y+1 vanishes mod ell, or the eigenvalues collide."""


def is_split(order: QuadOrder, ell: int) -> bool:
    D = order.disc
    if ell <= 3 or D % ell == 0 or not _is_prime(ell):
        return False
    return jacobi(D % ell, ell) == 1


def residue_quadruple(mu: QuadInt, ell: int):
    """(x, y, x+1, y+1) mod ell; DegenerateResidue when any of them vanishes."""
    x, y = mu.residue_pair(ell)
    x1, y1 = (x + 1) % ell, (y + 1) % ell
    if 0 in (x, y, x1, y1):
        raise DegenerateResidue(ell)
    return x, y, x1, y1


def eigenvalue_collision(mu: QuadInt, ell: int) -> bool:
    """True when the Frobenius eigenvalues collide mod ell on either side.

    Collisions x = +-y or x+1 = -+(y+1) make the eigenvalue factor capture
    ambiguous, so such ell are skipped when assembling L.
    """
    x, y, x1, y1 = residue_quadruple(mu, ell)
    if x == y or (x + y) % ell == 0:
        return True
    if x1 == y1 or (x1 + y1) % ell == 0:
        return True
    return False


def solve_ellk_mod_prime(mu: QuadInt, ell: int, order: QuadOrder = None):
    """All (k, k', delta) in [0, ell-2]^2 x {1, -1} satisfying both embeddings."""
    x, y, x1, y1 = residue_quadruple(mu, ell)
    period = ell - 1
    xp = _pow_table(x, ell)
    yp = _pow_table(y, ell)
    x1p = _pow_table(x1, ell)
    y1p = _pow_table(y1, ell)
    out = []
    for delta in (1, -1):
        for k in range(period):
            lhs_x = (xp[k] + delta) % ell
            lhs_y = (yp[k] + delta) % ell
            for kp in range(period):
                if x1p[kp] == lhs_x and y1p[kp] == lhs_y:
                    out.append((k, kp, delta))
    out.sort(key=lambda s: (s[2] != 1, s))
    return out


def _pow_table(a: int, ell: int):
    out = [1]
    for _ in range(ell - 2):
        out.append(out[-1] * a % ell)
    return out


def combine_solutions(merged, merged_mod: int, fresh, ell: int):
    """CRT-merge joint solutions mod merged_mod with per-prime ones mod ell-1."""
    period = ell - 1
    g = gcd(merged_mod, period)
    lcm = merged_mod * period // g
    out = []
    for k_a, kp_a, d_a in merged:
        for k_b, kp_b, d_b in fresh:
            if d_a != d_b:
                continue
            if (k_a - k_b) % g or (kp_a - kp_b) % g:
                continue
            k = _crt2(k_a, merged_mod, k_b, period)
            kp = _crt2(kp_a, merged_mod, kp_b, period)
            out.append((k, kp, d_a))
    return sorted(set(out)), lcm


def _crt2(r1, m1, r2, m2):
    g = gcd(m1, m2)
    lcm = m1 * m2 // g
    t = ((r2 - r1) // g) * pow(m1 // g, -1, m2 // g) % (m2 // g)
    return (r1 + m1 * t) % lcm


def joint_solutions(per_prime: dict):
    """CRT-compatible solution triples modulo lcm(ell - 1), given per-prime lists."""
    merged = None
    mod = 1
    for ell in sorted(per_prime):
        if merged is None:
            merged = sorted(set((k % (ell - 1), kp % (ell - 1), d)
                                for k, kp, d in per_prime[ell]))
            mod = ell - 1
        else:
            merged, mod = combine_solutions(merged, mod, per_prime[ell], ell)
    return merged or [], mod


def only_trivial(joint, mod: int) -> bool:
    return joint == [(1 % mod, 1 % mod, 1)]


@dataclass(frozen=True)
class GoodL:
    primes: tuple
    L: int
    phi_L: int
    solution_log: dict  # ell -> list of (k, k', delta)

    def recheck(self, mu: QuadInt, t: int, order: QuadOrder) -> bool:
        """Re-derive conditions (i)-(iii) from scratch."""
        if len(set(self.primes)) != len(self.primes):
            return False
        phi = 1
        per = {}
        for ell in self.primes:
            if not is_split(order, ell):
                return False
            try:
                if eigenvalue_collision(mu, ell):
                    return False
                per[ell] = solve_ellk_mod_prime(mu, ell, order)
            except DegenerateResidue:
                return False
            if per[ell] != self.solution_log[ell]:
                return False
            phi *= ell - 1
        if phi != self.phi_L or phi % t:
            return False
        joint, mod = joint_solutions(per)
        return only_trivial(joint, mod)


def find_good_L(mu: QuadInt, t: int, order: QuadOrder, prime_budget: int = 5,
                ell_cap: int = 200, blacklist=frozenset(), avoid=frozenset()):
    """Pick split primes whose product satisfies t | phi(L) with only the
    trivial joint solution.

    Candidate subsets of the usable pool are scanned in increasing cost
    (degree of the torsion polynomials that the elliptic stage will have to
    handle), so the cheapest good L wins; prime_budget caps the subset size.
    Returns a GoodL or None when no subset works.
    """
    from itertools import combinations

    pool = []
    for ell in range(5, ell_cap + 1, 2):
        if ell in blacklist or ell in avoid or not _is_prime(ell):
            continue
        if not is_split(order, ell):
            continue
        try:
            if eigenvalue_collision(mu, ell):
                continue
            sols = solve_ellk_mod_prime(mu, ell, order)
        except DegenerateResidue:
            continue
        pool.append((ell, sols))
    if not pool:
        return None
    candidates = []
    max_size = min(prime_budget, len(pool))
    for size in range(1, max_size + 1):
        for combo in combinations(pool, size):
            phi = 1
            for ell, _ in combo:
                phi *= ell - 1
            if phi % t:
                continue
            cost = sum(((ell * ell - 1) // 2) ** 2 for ell, _ in combo)
            candidates.append((cost, combo, phi))
    candidates.sort(key=lambda c: (c[0], [ell for ell, _ in c[1]]))
    for cost, combo, phi in candidates:
        per = {ell: sols for ell, sols in combo}
        joint, mod = joint_solutions(per)
        if not only_trivial(joint, mod):
            continue
        L = 1
        for ell in per:
            L *= ell
        good = GoodL(primes=tuple(sorted(per)), L=L, phi_L=phi,
                     solution_log=dict(per))
        if good.recheck(mu, t, order):
            return good
    return None


def solve_ellk_direct(mu: QuadInt, ells) -> tuple:
    """Oracle: brute force the joint system over the full exponent period.

    Enumerates k, k' modulo lcm(ell - 1) directly against every prime's pair
    of congruences; meant for fixtures with small phi(L) only.
    """
    data = []
    mod = 1
    for ell in sorted(ells):
        x, y, x1, y1 = residue_quadruple(mu, ell)
        data.append((ell, _pow_table(x, ell), _pow_table(y, ell),
                     _pow_table(x1, ell), _pow_table(y1, ell)))
        mod = mod * (ell - 1) // gcd(mod, ell - 1)
    out = []
    for delta in (1, -1):
        for k in range(mod):
            for kp in range(mod):
                ok = True
                for ell, xp, yp, x1p, y1p in data:
                    period = ell - 1
                    if ((xp[k % period] + delta) % ell != x1p[kp % period]
                            or (yp[k % period] + delta) % ell != y1p[kp % period]):
                        ok = False
                        break
                if ok:
                    out.append((k, kp, delta))
    return sorted(set(out)), mod


def _is_prime(q: int) -> bool:
    if q < 2:
        return False
    d = 2
    while d * d <= q:
        if q % d == 0:
            return False
        d += 1
    return True
