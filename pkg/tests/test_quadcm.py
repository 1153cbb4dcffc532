import math
import random

import mpmath as mp
import pytest
import sympy
from hypothesis import given, settings, strategies as st

from cmmahler.errors import DomainError
from cmmahler.modular import t_P, t_Q
from cmmahler.numerics import working
from cmmahler.quadcm import (CMPoint, class_number, classify, cm_points_in_domain, in_FP, in_FQ,
                             reduce_to_FP, reduce_to_FQ, reduced_forms)


def brute_reduced(D):
    # every primitive reduced triple with |b| <= a <= c, boundary ties b >= 0
    out = set()
    amax = math.isqrt(-D // 3) + 1
    for a in range(1, amax + 1):
        for b in range(-a, a + 1):
            if (b * b - D) % (4 * a):
                continue
            c = (b * b - D) // (4 * a)
            if c < a or math.gcd(math.gcd(a, b), c) != 1:
                continue
            if b < 0 and (-b == a or a == c):
                continue
            out.add((a, b, c))
    return out


def test_reduced_forms_small():
    assert [tuple(p) for p in reduced_forms(-4)] == [(1, 0, 1)]
    assert {tuple(p) for p in reduced_forms(-20)} == {(1, 0, 5), (2, 2, 3)}
    assert len(reduced_forms(-163)) == 1


def test_class_numbers():
    assert class_number(-3) == 1
    assert class_number(-427) == 2
    assert class_number(-907) == 3
    assert class_number(-1555) == 4
    assert class_number(-928) == 4


def test_class_number_matches_brute_force():
    for absD in range(3, 501):
        if (-absD) % 4 in (0, 1):
            assert {tuple(p) for p in reduced_forms(-absD)} == brute_reduced(-absD), absD


def test_bad_discriminant_rejected():
    with pytest.raises(DomainError):
        reduced_forms(-5)
    with pytest.raises(DomainError):
        CMPoint(2, 2, 2)
    with pytest.raises(DomainError):
        CMPoint(1, 3, 1)


def test_cm_point_embedding():
    with working(30):
        tau = CMPoint(16, 0, 1).embed(30)
        assert abs(tau - 0.25j) < mp.mpf(10) ** -28
        assert tau.imag > 0


def test_reduction_fixed_points():
    assert reduce_to_FP(CMPoint(16, 0, 1)) == CMPoint(16, 0, 1)
    assert reduce_to_FQ(CMPoint(1, 0, 1)) == CMPoint(1, 0, 1)


def _gamma0(level, rng):
    # random word in T and the lower unipotent generator of Gamma0(level)
    g = ((1, 0), (0, 1))
    for _ in range(6):
        k = rng.randint(-3, 3)
        h = ((1, k), (0, 1)) if rng.random() < 0.5 else ((1, 0), (level * k, 1))
        (a, b), (c, d) = g
        (e, f), (p, q) = h
        g = ((a * e + b * p, a * f + b * q), (c * e + d * p, c * f + d * q))
    return g


def test_reduce_recovers_translated_point():
    rng = random.Random(5)
    base = CMPoint(16, 16, 5)
    for _ in range(20):
        moved = base.act(_gamma0(4, rng))
        assert reduce_to_FP(moved) == base


@settings(max_examples=60, deadline=None)
@given(st.integers(1, 40), st.integers(-40, 40), st.integers(1, 40), st.integers(0, 10 ** 6))
def test_reduction_lands_in_domain_and_is_idempotent(a, b, c, seed):
    if 4 * a * c - b * b <= 0 or math.gcd(math.gcd(a, b), c) != 1:
        return
    rng = random.Random(seed)
    for level, red, member in ((4, reduce_to_FP, in_FP), (3, reduce_to_FQ, in_FQ)):
        p = CMPoint(a, b, c).act(_gamma0(level, rng))
        r = red(p)
        assert member(r)
        assert red(r) == r
        assert r.disc == p.disc
        assert red(CMPoint(a, b, c)) == r


def test_hauptmodul_invariant_under_reduction():
    rng = random.Random(11)
    with working(30):
        for base, red, f, lvl in ((CMPoint(7, 7, 2), reduce_to_FP, t_P, 4),
                                  (CMPoint(3, 3, 13), reduce_to_FQ, t_Q, 3)):
            moved = base.act(_gamma0(lvl, rng))
            a = f(moved.embed(40), 30)
            b = f(red(moved).embed(40), 30)
            assert abs(a - b) < mp.mpf(10) ** -20 * abs(b)


def test_domain_points_of_disc_minus_4():
    # Gamma0(4) has index 6: i lifts to the points of the six cosets
    pts = cm_points_in_domain(-4, "P")
    assert all(in_FP(p) for p in pts)
    assert all(p.disc == -4 for p in pts)


@pytest.fixture(scope="module")
def classified():
    return {fam: classify(fam, 4, 60) for fam in ("P", "Q")}


def test_rational_parameters(classified):
    for fam, expected in (("P", {-16, 8, 32}), ("Q", {-216, 54, 24})):
        rat = {-o.minpoly[0] // o.minpoly[1] for o in classified[fam] if o.degree == 1}
        assert rat == expected


def test_orbit_invariants(classified):
    for fam, orbits in classified.items():
        for o in orbits:
            assert len(o.members) == o.degree
            for cp in o.members:
                assert o.degree >= class_number(cp.D)
                assert (in_FP if fam == "P" else in_FQ)(cp.cm)
            # irreducible over Q (independent factorisation oracle)
            x = sympy.Symbol("x")
            poly = sympy.Poly(list(reversed(o.minpoly)), x)
            assert len(sympy.factor_list(poly)[1]) == 1
            assert sympy.factor_list(poly)[1][0][1] == 1


def test_classified_values_recheck_at_double_precision(classified):
    with working(130):
        for fam, orbits in classified.items():
            f = t_P if fam == "P" else t_Q
            for o in orbits[::7]:
                cp = o.members[0]
                v = f(cp.cm.embed(130), 120)
                assert abs(v - cp.t.embedding) < mp.mpf(10) ** -60 * max(1, abs(v))


def test_degree_above_four_needs_bound():
    with pytest.raises(DomainError):
        classify("P", 5)
