"""Arithmetic in Lambda at finite precision."""
import math

import pytest
from hypothesis import given, settings, strategies as st

from lambdamod.errors import InvalidInput, LevelTooDeep, PrecisionError
from lambdamod.ring import (
    INFINITE,
    DistPoly,
    PrecisionProfile,
    RingElem,
    classify_cyclo,
    cyclo_nu,
    divides_nu,
    iota_dist,
    iota_series,
    make_omega,
    profile_for,
    resultant_valuation,
    weierstrass_divide,
    weierstrass_prepare,
)

P5 = PrecisionProfile()
SMALL = PrecisionProfile(p=5, M=6, D=16, n_max=2)


def elem(coeffs, prof=P5):
    return RingElem.from_poly(coeffs, prof)


def poly(coeffs, p=5):
    return DistPoly(tuple(coeffs), p)


# ------------------------------------------------------------- strategies

def ring_elems(prof=SMALL):
    m = prof.modulus
    return st.lists(st.integers(0, m - 1), min_size=prof.D, max_size=prof.D).map(
        lambda c: RingElem(tuple(c), prof))


@st.composite
def dist_polys(draw, p=5, max_degree=8):
    d = draw(st.integers(1, max_degree))
    low = draw(st.lists(st.integers(-3, 3), min_size=d, max_size=d))
    return DistPoly(tuple(p * x for x in low) + (1,), p)


# ------------------------------------------------------------- profiles

def test_profile_defaults():
    assert (P5.p, P5.M, P5.D, P5.n_max) == (5, 16, 128, 4)


@pytest.mark.parametrize("kw", [dict(p=4), dict(p=2), dict(M=0), dict(D=1),
                                dict(p=5, D=100, n_max=4)])
def test_profile_rejects(kw):
    with pytest.raises(InvalidInput):
        PrecisionProfile(**kw)


def test_profile_for_raises_degree_for_deep_levels():
    assert profile_for(5, 4).D == 128
    assert profile_for(7, 4).D > 7 ** 3


# ------------------------------------------------------------- omega / nu

def test_omega_level_one_is_T():
    assert make_omega(1, P5).coeffs == (0, 1)


def test_omega_level_two():
    assert make_omega(2, P5).coeffs == (0, 5, 10, 10, 5, 1)


def test_omega_three_divisible_by_omega_two():
    w3 = make_omega(3, P5)
    assert w3.degree == 25
    _, r = weierstrass_divide(w3.to_ring(P5), make_omega(2, P5), P5)
    assert not any(r)


def test_omega_too_deep():
    with pytest.raises(LevelTooDeep):
        make_omega(5, P5)


def test_nu_values():
    assert cyclo_nu(0, P5).coeffs == (0, 1)
    assert cyclo_nu(1, P5).coeffs == (5, 10, 10, 5, 1)


@pytest.mark.parametrize("a", [1, 2, 3])
def test_nu_at_zero_is_p(a):
    nu = cyclo_nu(a, P5)
    assert nu(0) == 5
    assert nu.degree == 5 ** a - 5 ** (a - 1)


@pytest.mark.parametrize("n", [1, 2, 3])
def test_tower_divisibility(n):
    big = make_omega(n + 1, P5).to_ring(P5)
    _, r = weierstrass_divide(big, make_omega(n, P5), P5)
    assert not any(r)
    for a in range(4):
        w = make_omega(n, P5).to_ring(P5)
        _, r = weierstrass_divide(w, cyclo_nu(a, P5), P5)
        assert (not any(r)) == (a <= n - 1)


# ------------------------------------------------------------- division

def test_divide_examples():
    q, r = weierstrass_divide(make_omega(2, P5).to_ring(P5), poly([0, 1]), P5)
    assert q == cyclo_nu(1, P5).to_ring(P5) and r == (0,)
    q, r = weierstrass_divide(elem([0, 1]), poly([0, 1]), P5)
    assert q == RingElem.one(P5) and r == (0,)
    q, r = weierstrass_divide(elem([5]), poly([0, 1]), P5)
    assert q.is_zero() and r == (5,)


@settings(max_examples=60, deadline=None)
@given(ring_elems(), dist_polys(max_degree=8))
def test_division_identity(f, P):
    q, r = weierstrass_divide(f, P, SMALL)
    back = q * P.to_ring(SMALL) + elem(r, SMALL)
    assert back == f


# ------------------------------------------------------------- preparation

def test_prepare_examples():
    r = weierstrass_prepare(elem([0, 1, 1]), P5)
    assert (r.mu, r.unit, r.dist.coeffs) == (0, elem([1, 1]), (0, 1))
    r = weierstrass_prepare(elem([0, 5]), P5)
    assert (r.mu, r.unit, r.dist.coeffs) == (1, RingElem.one(P5), (0, 1))
    r = weierstrass_prepare(elem([5, 1]), P5)
    assert (r.mu, r.unit, r.dist.coeffs) == (0, RingElem.one(P5), (5, 1))


def test_prepare_zero_series():
    with pytest.raises(PrecisionError) as e:
        weierstrass_prepare(RingElem.zero(P5), P5)
    assert e.value.kind == "insufficient-p-precision"


@settings(max_examples=60, deadline=None)
@given(ring_elems())
def test_preparation_identity(f):
    if f.is_zero():
        return
    try:
        r = weierstrass_prepare(f, SMALL)
    except PrecisionError:
        return
    p = SMALL.p
    assert r.unit.coeffs[0] % p
    assert all(c % p == 0 for c in r.dist.coeffs[:-1])
    # the unit is only known mod T^(D - deg dist)
    L = SMALL.D - r.dist.degree
    back = (r.unit * r.dist.to_ring(SMALL) * p ** r.mu).coeffs[:L]
    assert back == f.coeffs[:L]


# ------------------------------------------------------------- iota

def test_iota_of_T_alternates():
    c = iota_series(elem([0, 1]), P5).coeffs
    m = P5.modulus
    assert c[:6] == (0, m - 1, 1, m - 1, 1, m - 1)


def test_iota_of_omega_same_ideal():
    w = make_omega(2, P5)
    _, r = weierstrass_divide(iota_series(w.to_ring(P5), P5), w, P5)
    assert not any(r)


@settings(max_examples=100, deadline=None)
@given(ring_elems())
def test_iota_involution(f):
    assert iota_series(iota_series(f, SMALL), SMALL) == f


@settings(max_examples=40, deadline=None)
@given(ring_elems(), ring_elems())
def test_iota_multiplicative(f, g):
    assert iota_series(f * g, SMALL) == iota_series(f, SMALL) * iota_series(g, SMALL)


def test_iota_dist_examples():
    assert iota_dist(poly([0, 1]), P5).coeffs == (0, 1)
    for a in (0, 1, 2):
        assert iota_dist(cyclo_nu(a, P5), P5).coeffs == cyclo_nu(a, P5).coeffs
    # root of the twist is -p/(1+p); constant term frozen from an exact computation
    assert iota_dist(poly([-5, 1]), P5).coeffs == (25431315105, 1)


@settings(max_examples=50, deadline=None)
@given(dist_polys())
def test_iota_dist_involution(P):
    once = iota_dist(P, P5)
    assert iota_dist(once, P5) == P.canonical(P5.modulus)


# ------------------------------------------------------------- resultants

def test_resultant_examples():
    assert resultant_valuation(poly([0, 1]), poly([-5, 1])) == 1
    for n in (1, 2, 3):
        assert resultant_valuation(poly([-5, 1]), make_omega(n, P5)) == n
    assert resultant_valuation(poly([0, 1]), make_omega(2, P5)) == INFINITE


@pytest.mark.parametrize("p", [5, 7])
def test_resultant_matches_norm(p):
    # Res(T - c, h) = h(c) up to sign, for monic linear g
    prof = profile_for(p, 3)
    for c in (p, -p, 2 * p, p * p):
        for n in (1, 2, 3):
            h = (1 + c) ** (p ** (n - 1)) - 1
            v = 0
            while h % p == 0:
                h //= p
                v += 1
            assert resultant_valuation(DistPoly((-c, 1), p), make_omega(n, prof)) == v


# ------------------------------------------------------------- classification

def test_classify():
    assert classify_cyclo(poly([0, 1]), P5) == 0
    assert classify_cyclo(cyclo_nu(2, P5), P5) == 2
    g = poly([-5, 1])
    assert classify_cyclo(g, P5) is None
    assert not any(divides_nu(g, a, P5) for a in range(P5.n_max + 1))


@settings(max_examples=30, deadline=None)
@given(ring_elems(), ring_elems(), ring_elems())
def test_ring_laws(a, b, c):
    assert (a + b) + c == a + (b + c)
    assert (a * b) * c == a * (b * c)
    assert a * b == b * a and a + b == b + a
    assert a * (b + c) == a * b + a * c


def test_ring_inverse():
    u = elem([1, 5, 3])
    assert u * u.inverse() == RingElem.one(P5)
    assert math.gcd(u.coeffs[0], 5) == 1


@pytest.mark.parametrize("a", [0, 1, 2, 3])
def test_iota_fixes_nu_ideals(a):
    nu = cyclo_nu(a, P5)
    # multiply by the unit (1+T)^d so the element is an exact polynomial
    f = iota_series(nu.to_ring(P5), P5) * elem([1, 1]) ** nu.degree
    _, r = weierstrass_divide(f, nu, P5)
    assert not any(r)
