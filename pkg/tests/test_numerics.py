from fractions import Fraction

import mpmath as mp
import pytest
from hypothesis import given, settings, strategies as st

from cmmahler.errors import DomainError
from cmmahler.numerics import (dedekind_eta, eta_product, hyp2f1, hyp2f1_series,
                               tanh_sinh_integrate, upper_incomplete_gamma, working)

HALF = Fraction(1, 2)


def test_hyp2f1_at_zero_is_one():
    assert hyp2f1(HALF, HALF, 1, 0, 30) == 1


def test_hyp2f1_symmetric_point_gives_tau_half_i():
    with working(30):
        ratio = hyp2f1(HALF, HALF, 1, 1 - HALF, 30) / hyp2f1(HALF, HALF, 1, HALF, 30)
        assert abs(ratio - 1) < mp.mpf(10) ** -28
        assert abs(mp.mpc(0, 0.5) * ratio - mp.mpc(0, 0.5)) < mp.mpf(10) ** -28


def test_hyp2f1_against_taylor_series():
    with working(60):
        t = 8 + 6 * mp.sqrt(2)
        z = 16 / t
        assert abs(hyp2f1(HALF, HALF, 1, z, 60) - hyp2f1_series(HALF, HALF, 1, z, 60)) \
            < mp.mpf(10) ** -55


@pytest.mark.parametrize("z", [mp.mpf("0.95"), mp.mpf("-3"), mp.mpc("0.7", "0.6"),
                               mp.mpf(-20), mp.mpc(2, 1)])
def test_hyp2f1_against_euler_integral(z):
    # 2F1(1/3, 2/3; 1; z) = 1/(G(1/3) G(2/3)) int t^(-1/3) (1-t)^(-2/3) (1-zt)^(-1/3) dt
    with working(30):
        z = mp.mpc(z)
        third = mp.mpf(1) / 3
        g = lambda t: (1 - z * t) ** -third
        # t = u^3 near 0 and 1 - t = v^3 near 1 remove the endpoint singularities
        left = lambda u: 3 * u * (1 - u ** 3) ** (-2 * third) * g(u ** 3)
        right = lambda v: 3 * (1 - v ** 3) ** -third * g(1 - v ** 3)
        cut = mp.mpf(2) ** -third
        ref = (mp.quad(left, [0, cut]) + mp.quad(right, [0, cut])) / (mp.gamma(third) * mp.gamma(2 * third))
        val = hyp2f1(Fraction(1, 3), Fraction(2, 3), 1, z, 30)
        assert abs(val - ref) < mp.mpf(10) ** -25


def test_hyp2f1_rejects_divergent_unit_argument():
    with pytest.raises(DomainError):
        hyp2f1(HALF, HALF, 1, 1, 30)


def test_eta_identity_and_T_multiplier():
    with working(40):
        e = dedekind_eta(1j, 40)
        assert abs(e * e / e ** 2 - 1) < mp.mpf(10) ** -38
        tau = mp.mpc(0.25, 2)
        lhs = dedekind_eta(tau + 1, 40)
        rhs = mp.expjpi(mp.mpf(1) / 12) * dedekind_eta(tau, 40)
        assert abs(lhs - rhs) < mp.mpf(10) ** -35


def test_eta_reduction_matches_raw_product_near_real_axis():
    # [236,4,1]: tau0 = (-4 + i sqrt(928)) / 472, Im tau0 ~ 0.0645
    with working(10):
        tau = (-4 + 1j * mp.sqrt(928)) / 472
        assert abs(dedekind_eta(tau, 10) - eta_product(tau, 10)) < mp.mpf(10) ** -9


def test_eta_at_i_closed_form():
    # eta(i) = Gamma(1/4) / (2 pi^(3/4))
    with working(40):
        ref = mp.gamma(mp.mpf(1) / 4) / (2 * mp.pi ** (mp.mpf(3) / 4))
        assert abs(dedekind_eta(1j, 40) - ref) < mp.mpf(10) ** -38


def test_eta_rejects_lower_half_plane():
    with pytest.raises(DomainError):
        dedekind_eta(mp.mpc(0, -1), 20)


@settings(max_examples=20, deadline=None)
@given(st.floats(-3, 3), st.floats(0.05, 5))
def test_eta_S_transform(x, y):
    with working(30):
        tau = mp.mpc(x, y)
        lhs = dedekind_eta(-1 / tau, 30)
        rhs = mp.sqrt(-1j * tau) * dedekind_eta(tau, 30)
        assert abs(lhs - rhs) < mp.mpf(10) ** -26 * max(1, abs(rhs))


@settings(max_examples=10, deadline=None)
@given(st.floats(-2, 2), st.floats(0.1, 3))
def test_eta_precision_doubling_stable(x, y):
    tau = mp.mpc(x, y)
    with working(60):
        a = dedekind_eta(tau, 25)
        b = dedekind_eta(tau, 50)
        assert abs(a - b) < mp.mpf(10) ** -21 * max(1, abs(b))


def test_tanh_sinh_basic_integrals():
    with working(40):
        assert abs(tanh_sinh_integrate(lambda x: 1, 0, 1, 40) - 1) < mp.mpf(10) ** -38
        assert abs(tanh_sinh_integrate(mp.log, 0, 1, 40) + 1) < mp.mpf(10) ** -38


def test_tanh_sinh_log_sine_vanishes():
    # int_0^pi log|2 sin(x/2)| dx = -sum cos(n x)/n integrated termwise = 0
    with working(30):
        val = tanh_sinh_integrate(lambda x: mp.log(abs(2 * mp.sin(x / 2))), 0, mp.pi, 30)
        assert abs(val) < mp.mpf(10) ** -27


@settings(max_examples=10, deadline=None)
@given(st.floats(0.05, 0.95))
def test_tanh_sinh_additive_over_splits(split):
    with working(30):
        f = lambda x: mp.log(x) * mp.cos(3 * x)
        whole = tanh_sinh_integrate(f, 0, 1, 30)
        parts = tanh_sinh_integrate(f, 0, split, 30) + tanh_sinh_integrate(f, split, 1, 30)
        assert abs(whole - parts) < mp.mpf(10) ** -26


def test_incomplete_gamma_values():
    with working(40):
        for x in (mp.mpf("0.3"), mp.mpf(7)):
            assert abs(upper_incomplete_gamma(1, x, 40) - mp.exp(-x)) < mp.mpf(10) ** -38
        assert abs(upper_incomplete_gamma(2, mp.mpf(10) ** -60, 40) - 1) < mp.mpf(10) ** -38
        direct = mp.quad(lambda u: u * mp.exp(-u), [5, mp.inf])
        assert abs(upper_incomplete_gamma(2, 5, 40) - 6 * mp.exp(-5)) < mp.mpf(10) ** -38
        assert abs(upper_incomplete_gamma(2, 5, 40) - direct) < mp.mpf(10) ** -35


def test_incomplete_gamma_negative_shift_recurrence():
    # Gamma(s+1, x) = s Gamma(s, x) + x^s e^-x
    with working(30):
        x = mp.mpf(3)
        rhs = x ** -1 * mp.exp(-x) - upper_incomplete_gamma(0, x, 30)
        assert abs(upper_incomplete_gamma(-1, x, 30) - rhs) < mp.mpf(10) ** -27
