"""Polynomial kernels over Z/nZ: multiplication, gcd, powering, quotient rings."""

import random

import pytest
from hypothesis import given, settings, strategies as st

from cide import polyring as pr
from cide.zn import FactorFound


def test_mul_rem_examples():
    # X * X rem X^2+1 over Z/5 -> 4
    assert pr.poly_mul_rem([0, 1], [0, 1], [1, 0, 1], 5) == [4]
    # zero absorbs
    assert pr.poly_mul_rem([], [0, 1], [1, 0, 1], 5) == []
    # (X+1)^2 rem X^2+X+1 over Z/7 -> X
    assert pr.poly_mul_rem([1, 1], [1, 1], [1, 1, 1], 7) == [0, 1]


def test_powmod_examples():
    ring = pr.QuotientRing([1, 0, 1], 5)
    assert ring.pow(ring.gen(), 0) == [1]
    assert ring.pow(ring.gen(), 2) == [4]
    # Frobenius image: X^5 in Z/5[X]/(X^2+2) by naive repeated multiplication
    naive = [0, 1]
    for _ in range(4):
        naive = pr.poly_mul_rem(naive, [0, 1], [2, 0, 1], 5)
    assert pr.poly_pow_rem([0, 1], 5, [2, 0, 1], 5) == naive
    assert len(naive) <= 2


def test_try_gcd_examples():
    assert pr.try_gcd([6, 0, 1], [6, 1], 7) == [6, 1]          # X-1
    with pytest.raises(FactorFound) as exc:
        pr.try_gcd([14, 0, 1], [12, 3], 15)
    assert exc.value.d == 3
    # gcd with zero is the monic scaling
    assert pr.try_gcd([3, 6], [], 7) == [4, 1]


def test_gcd_agrees_with_root_sets():
    rng = random.Random(7)
    for p in (5, 7, 11, 13, 31, 97):
        for _ in range(12):
            a = [rng.randrange(p) for _ in range(rng.randint(2, 9))]
            b = [rng.randrange(p) for _ in range(rng.randint(2, 9))]
            a = pr.normalize(a)
            b = pr.normalize(b)
            if not a or not b:
                continue
            g = pr.try_gcd(a, b, p)
            roots_a = {x for x in range(p) if pr.poly_eval(a, x, p) == 0}
            roots_b = {x for x in range(p) if pr.poly_eval(b, x, p) == 0}
            roots_g = {x for x in range(p) if pr.poly_eval(g, x, p) == 0}
            assert roots_a & roots_b == roots_g & roots_a & roots_b
            # every common root of a and b is a root of g
            assert (roots_a & roots_b) <= roots_g


@given(st.integers(min_value=0, max_value=40), st.integers(min_value=0, max_value=40))
@settings(max_examples=60, deadline=None)
def test_powmod_additivity(e1, e2):
    f = [3, 1, 4, 1, 1]  # monic quartic over Z/7
    x = [2, 5, 1]
    left = pr.poly_pow_rem(x, e1 + e2, f, 7)
    right = pr.poly_mul_rem(pr.poly_pow_rem(x, e1, f, 7),
                            pr.poly_pow_rem(x, e2, f, 7), f, 7)
    assert left == right


def test_canonical_idempotent():
    assert pr.canonical([8, 15, 0, 0], 7) == [1, 1]
    assert pr.canonical([0, 0], 5) == []


def test_ext_gcd_bezout():
    rng = random.Random(3)
    p = 13
    for _ in range(20):
        a = pr.normalize([rng.randrange(p) for _ in range(rng.randint(1, 7))])
        b = pr.normalize([rng.randrange(p) for _ in range(rng.randint(1, 7))])
        if not a and not b:
            continue
        g, u, v = pr.poly_ext_gcd(a, b, p)
        lhs = pr.poly_add(pr.poly_mul(u, a, p), pr.poly_mul(v, b, p), p)
        assert lhs == g


def test_quotient_ring_inverse():
    ring = pr.QuotientRing([1, 1, 1], 7)   # X^2+X+1 over Z/7
    x = ring.gen()
    inv = ring.inv(x)
    assert ring.mul(x, inv) == ring.one()


def test_fastmod_matches_divmod():
    rng = random.Random(11)
    n = 2 ** 61 - 1
    for _ in range(10):
        d = rng.randint(48, 120)
        f = [rng.randrange(n) for _ in range(d)] + [1]
        a = [rng.randrange(n) for _ in range(2 * d - 1)]
        assert pr.FastMod(f, n).rem(a) == pr.poly_rem(a, f, n)


def test_fastmod_non_monic_modulus():
    n = 101
    f = [7, 3, 5]   # leading coefficient 5, a unit
    a = [1, 2, 3, 4, 5]
    assert pr.FastMod(f, n).rem(a) == pr.poly_rem(a, f, n)


def test_tensor_ring_basics():
    base = pr.QuotientRing([1, 0, 1], 13)         # Z/13[i]
    tensor = pr.TensorRing([2, 0, 1], base)       # adjoin Y with Y^2 = -2
    y = tensor.gen()
    assert tensor.mul(y, y) == tensor.embed_base([-2 % 13])
    i = tensor.embed_coeff(base.gen())
    prod = tensor.mul(i, y)
    inv = tensor.inv(prod)
    assert tensor.mul(prod, inv) == tensor.one()
