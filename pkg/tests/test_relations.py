import random

import mpmath as mp
import pytest
import sympy
from hypothesis import given, settings, strategies as st

from cmmahler.errors import DomainError
from cmmahler.modular import j_fn, t_P, t_Q, tau_from_tP
from cmmahler.numerics import working
from cmmahler.quadcm import CMPoint
from cmmahler.relations import pslq, recognize_minpoly

MU_PLUS = "1.2009988725127329117648305174135557744691626198957"
MU_MINUS = "0.45766562586918117728466567574592742706771865095254"
L_OVER_PI4 = "0.0096323473958955184559425659563904945672448438650884"


def test_trivial_relation():
    rel = pslq([3, 1], 30)
    assert rel.coefficients == (1, -3)


def test_no_relation_certified_for_independent_constants():
    with working(40):
        assert pslq([mp.pi, mp.e, mp.euler], 40, max_coeff_bits=16) is None


def test_rejects_degenerate_input():
    with pytest.raises(DomainError):
        pslq([1], 20)
    with pytest.raises(DomainError):
        pslq([1, 0], 20)


def test_example_mahler_relation_from_printed_digits():
    with working(50):
        vec = [mp.mpf(MU_PLUS) ** 2, mp.mpf(MU_MINUS) ** 2, mp.mpf(L_OVER_PI4)]
        rel = pslq(vec, 45)
        assert rel.coefficients == (1, -1, -128)


def test_quartic_minpoly_with_doubled_precision_check():
    with working(60):
        t = t_P(CMPoint(16, 16, 7).embed(60), 60)
        vec = [mp.re(t) ** k for k in range(5)]
        rel = pslq(vec, 50)
    assert rel is not None and rel.coefficients[-1] != 0
    with working(120):
        t2 = t_P(CMPoint(16, 16, 7).embed(120), 120)
        res = abs(mp.polyval(list(reversed(rel.coefficients)), mp.re(t2)))
        assert res < mp.mpf(10) ** -90


def test_recognize_sqrt2():
    with working(30):
        alg = recognize_minpoly(mp.sqrt(2), 4, 30)
    assert alg.minpoly == (-2, 0, 1)


def test_recognize_conjugate_hauptmodul_value():
    with working(40):
        t = t_Q(CMPoint(2, 2, 1).embed(40), 40)
        alg = recognize_minpoly(t, 2, 40)
    x = sympy.Symbol("x")
    expected = sympy.Poly(sympy.expand((x - (270 + 162 * sympy.sqrt(3))) *
                                       (x - (270 - 162 * sympy.sqrt(3)))), x)
    assert alg.minpoly == tuple(int(c) for c in reversed(expected.all_coeffs()))


def test_recognize_j_of_curve():
    with working(40):
        alg = recognize_minpoly(j_fn(4 * tau_from_tP(8, 40), 40), 2, 40)
    assert alg.minpoly == (-1728, 1)


def test_recognize_complex_value():
    with working(40):
        z = 8 + 8j * mp.sqrt(3)
        alg = recognize_minpoly(z, 4, 40)
        assert alg.minpoly == (256, -16, 1)
        roots = alg.roots(40)
        assert min(abs(r - z) for r in roots) < mp.mpf(10) ** -30


def test_recognize_reproduces_input():
    with working(40):
        x = mp.cbrt(2) + mp.sqrt(3)
        alg = recognize_minpoly(x, 6, 40)
        assert alg is not None and alg.degree == 6
        assert min(abs(r - x) for r in alg.roots(40)) < mp.mpf(10) ** -30


def test_agrees_with_reference_pslq():
    with working(40):
        vec = [mp.log(2), mp.log(3), mp.log(6), mp.log(12)]
        ours = pslq(vec, 40)
        ref = mp.pslq(vec, maxcoeff=10 ** 6, maxsteps=10 ** 5)
        assert ours is not None and ref is not None
        assert abs(mp.fsum(c * v for c, v in zip(ours.coefficients, vec))) < mp.mpf(10) ** -30


@settings(max_examples=25, deadline=None)
@given(st.lists(st.integers(-50, 50), min_size=3, max_size=5), st.integers(0, 10 ** 6))
def test_planted_relation_found_and_rechecked(coeffs, seed):
    # x_last is forced so that the planted integer vector annihilates x
    if coeffs[-1] == 0 or all(c == 0 for c in coeffs[:-1]):
        return
    rng = random.Random(seed)
    with working(80):
        base = [mp.mpf(rng.random()) + k for k in range(1, len(coeffs))]
        last = -mp.fsum(c * v for c, v in zip(coeffs, base)) / coeffs[-1]
        if last == 0:
            return
        x40 = base + [last]
        rel = pslq(x40, 40, max_coeff_bits=20)
    assert rel is not None
    with working(80):
        # doubled precision: a genuine relation survives, a spurious one does not
        assert abs(mp.fsum(c * v for c, v in zip(rel.coefficients, x40))) < mp.mpf(10) ** -40


@settings(max_examples=15, deadline=None)
@given(st.permutations([0, 1, 2, 3]))
def test_permutation_invariance(perm):
    with working(40):
        vec = [mp.log(2), mp.log(3), mp.log(5), mp.log(30)]
        base = pslq(vec, 40)
        shuffled = pslq([vec[i] for i in perm], 40)
    unshuffled = [0] * 4
    for pos, i in enumerate(perm):
        unshuffled[i] = shuffled.coefficients[pos]
    assert tuple(unshuffled) in (base.coefficients, tuple(-c for c in base.coefficients))


def test_insignificant_relation_reported_not_returned():
    from cmmahler.errors import PrecisionExhausted
    with pytest.raises(PrecisionExhausted):
        pslq([3, 1], 15)
