import os

import mpmath as mp
import numpy as np
import pytest

from cmmahler.errors import DataError, DomainError, NotFrickeCompatible, TruncationError
from cmmahler.identities import L_value, data_dir, get_record, load_curves, theta_L_at_2
from cmmahler.lfun import (CurveLDescriptor, L_at_2, L_curve_at_2, conjugate_form,
                           derivative_at_0, dirichlet_partial_sum, eval_qexp, fricke_probe,
                           nth_derivative_at_0)
from cmmahler.numerics import working
from cmmahler.quadcm import CMPoint
from cmmahler.theta import QExpansion, loads, theta_series

L_PRODUCT_OVER_PI4 = "0.0096323473958955184559425659563904945672448438650884"
MU_PLUS = "1.2009988725127329117648305174135557744691626198957"


def load_form(name):
    with open(os.path.join(data_dir(), "forms", name)) as fh:
        return loads(fh.read())


@pytest.fixture(scope="module")
def f64():
    return load_form("f64aa1.txt")


@pytest.fixture(scope="module")
def f32():
    return load_form("f32aa1.txt")


@pytest.fixture(scope="module")
def level36():
    rec = get_record(15)
    _, factors = L_value(rec.cm_points, rec.family, rec.levels, 55)
    return [cf.form for cf in factors]


def lattice_dirichlet(a, b, c, X):
    """sum over the P-family lattice of chi(n)(2bm+an)/(v/l)^2 with v/l <= X (numpy)."""
    from math import gcd
    l = gcd(gcd(a, 4 * b), 16 * c)
    R = int(np.sqrt(4 * a * X * l / (64 * a * c - 16 * b * b))) + 2
    total = 0.0
    ns = np.arange(-(int(np.sqrt(4 * 16 * c * X * l / (64 * a * c - 16 * b * b))) + 2),
                   int(np.sqrt(4 * 16 * c * X * l / (64 * a * c - 16 * b * b))) + 3)
    chi = np.where(ns % 4 == 1, 1.0, np.where(ns % 4 == 3, -1.0, 0.0))
    for m in range(-R, R + 1):
        v = 16 * c * m * m + 4 * b * m * ns + a * ns * ns
        mask = (v > 0) & (v <= X * l) & (chi != 0)
        w = (2 * b * m + a * ns[mask]) * chi[mask]
        total += float(np.sum(w / (v[mask] / l) ** 2))
    return total


def test_eval_single_monomial():
    with working(30):
        f = QExpansion(1, 1, [0, 1] + [0] * 40)
        assert abs(eval_qexp(f, 1, 30) - mp.exp(-2 * mp.pi)) < mp.mpf(10) ** -40


def test_eval_theta_against_lattice_double_sum():
    with working(30):
        th = theta_series(CMPoint(16, 0, 1), "P", 40)
        direct = mp.mpf(0)
        for m in range(-10, 11):
            for n in range(-40, 41):
                # a = 16, b = 0, c = 1: exponent (16 m^2 + 16 n^2) / 16, weight 16 n
                v = m * m + n * n
                ch = (0, 1, 0, -1)[n % 4]
                if v and ch:
                    direct += ch * 16 * n * mp.exp(-2 * mp.pi * v)
        assert abs(eval_qexp(th, 1, 30) - direct) < mp.mpf(10) ** -27


def test_eval_linear(f32, f64):
    with working(30):
        y = mp.mpf("0.3")
        g = f64 + f32
        assert abs(eval_qexp(g, y, 30) - eval_qexp(f64, y, 30) - eval_qexp(f32, y, 30)) \
            < mp.mpf(10) ** -28


def test_eval_truncation_error(f64):
    with pytest.raises(TruncationError) as err:
        eval_qexp(f64.truncate(20), mp.mpf("0.01"), 30)
    assert err.value.required > 20
    with pytest.raises(DomainError):
        eval_qexp(f64, 0, 30)


def test_fricke_real_form(f64):
    with working(30):
        assert abs(fricke_probe(f64, 30) - 1) < mp.mpf(10) ** -15


def test_fricke_nebentypus_and_conjugation(level36):
    with working(30):
        etas = [fricke_probe(f, 30) for f in level36]
        for f, eta in zip(level36, etas):
            assert abs(abs(eta) - 1) < mp.mpf(10) ** -15
            assert abs(fricke_probe(conjugate_form(f, 30), 30) - mp.conj(eta)) < mp.mpf(10) ** -15
        assert abs(etas[0] - mp.conj(etas[1])) < mp.mpf(10) ** -15


def test_fricke_rejects_non_eigenform():
    th = theta_series(CMPoint(1, 0, 1), "Q", 400)
    with pytest.raises(NotFrickeCompatible):
        fricke_probe(th, 30)


def test_printed_L_product(f32, f64):
    with working(55):
        val = L_at_2(f32, 55) * L_at_2(f64, 55) / mp.pi ** 4
        assert abs(val - mp.mpf(L_PRODUCT_OVER_PI4)) < mp.mpf(10) ** -45


def test_theta_L_value_and_decomposition(f32, f64):
    with working(30):
        lt = theta_L_at_2(CMPoint(16, 0, 1), "P", 30)
        assert abs(lt - 4 * mp.pi ** 2 * mp.mpf(MU_PLUS)) < mp.mpf(10) ** -25
        combo = 16 * L_at_2(f32, 30) + 32 * L_at_2(f64, 30)
        assert abs(lt - combo) < mp.mpf(10) ** -25


@pytest.mark.parametrize("prec", [30, 45])
def test_split_point_independence(f64, level36, prec):
    for f in [f64] + level36:
        with working(prec):
            eta = fricke_probe(f, prec)
            a = L_at_2(f, prec, eta=eta, y0=1 / mp.sqrt(f.level), check=False)
            b = L_at_2(f, prec, eta=eta, y0=mp.mpf("1.7") / mp.sqrt(f.level), check=False)
            assert abs(a - b) < mp.mpf(10) ** (-prec + 6)


def test_dirichlet_oracle_level_64(f64):
    th1 = theta_series(CMPoint(16, 0, 1), "P", 10 ** 5)
    th2 = theta_series(CMPoint(16, 16, 5), "P", 10 ** 5)
    g = QExpansion(64, 16, [(x + y) // 64 for x, y in zip(th1.coeffs, th2.coeffs)])
    assert g.coeffs[:f64.truncation + 1] == list(f64.coeffs)
    with working(20):
        assert abs(dirichlet_partial_sum(g, 10 ** 5) - L_at_2(f64, 20)) < 1e-3


def test_dirichlet_oracle_theta_million(f32, f64):
    # the numpy lattice sum is independent of theta_series and the AFE
    direct = lattice_dirichlet(16, 0, 1, 10 ** 6)
    with working(20):
        afe = 16 * L_at_2(f32, 20) + 32 * L_at_2(f64, 20)
    assert abs(direct - float(mp.re(afe))) < 1e-3 * abs(direct)


def test_dirichlet_oracle_nebentypus(level36):
    th = theta_series(CMPoint(1, 0, 1), "Q", 10 ** 5)
    with working(20):
        direct = dirichlet_partial_sum(th, 10 ** 5)
        afe = 2 * (L_at_2(level36[0], 20) + L_at_2(level36[1], 20))
        assert abs(direct - afe) < 1e-3 * abs(afe)


def test_derivative_real_for_real_form(f64):
    with working(30):
        d = derivative_at_0(f64, 30)
        assert abs(mp.im(d)) < mp.mpf(10) ** -28
        assert abs(d - 64 / (4 * mp.pi ** 2) * L_at_2(f64, 30)) < mp.mpf(10) ** -27


def test_curve_L_and_second_derivative(f32, f64):
    desc = load_curves()[1]
    with working(30):
        L = L_curve_at_2([f32, f64], 30, degree=desc.degree)
        assert abs(L / mp.pi ** 4 - mp.mpf(L_PRODUCT_OVER_PI4)) < mp.mpf(10) ** -28
        d2 = nth_derivative_at_0(desc, L, 30)
        assert abs(d2 - 256 * L / mp.pi ** 4) < mp.mpf(10) ** -26
        # r / pi^4 L = s L'' with r = 128 and s = 1/2
        assert abs(128 * L / mp.pi ** 4 - d2 / 2) < mp.mpf(10) ** -26


def test_curve_L_product_nebentypus(level36):
    with working(30):
        L = L_curve_at_2(level36, 30, degree=2)
        assert mp.im(mp.mpc(L)) == 0 and L > 0


def test_descriptor_guards():
    with pytest.raises(DataError):
        nth_derivative_at_0(CurveLDescriptor(9, "P", (1, 0, 1), []), 1)
    with pytest.raises(DomainError):
        nth_derivative_at_0(CurveLDescriptor(9, "P", (-8, 1), [], 1, 1, 1), 1)
    with pytest.raises(DataError):
        L_curve_at_2([], 30)
    with pytest.raises(DataError):
        L_curve_at_2([QExpansion(1, 1, [0, 1])], 30, degree=2)
