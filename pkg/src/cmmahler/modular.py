"""Hauptmoduln for Gamma0(4) and Gamma0(3), lambda, j and period inversion."""

from __future__ import annotations

import mpmath as mp

from .errors import DomainError
from .numerics import dedekind_eta, hyp2f1, mpc, working


def _check_tau(tau):
    tau = mpc(tau)
    if tau.imag <= 0:
        raise DomainError("need Im(tau) > 0")
    return tau


def lambda_fn(tau, prec: int):
    """Modular lambda as 16 (eta(tau/2) eta(2 tau)^2 / eta(tau)^3)^8."""
    with working(prec):
        tau = _check_tau(tau)
        p = prec + 10
        r = dedekind_eta(tau / 2, p) * dedekind_eta(2 * tau, p) ** 2 / dedekind_eta(tau, p) ** 3
        val = 16 * r ** 8
    return val


def t_P(tau, prec: int):
    """Hauptmodul eta(2t)^24 / (eta(t)^8 eta(4t)^16) of Gamma0(4)."""
    with working(prec):
        tau = _check_tau(tau)
        p = prec + 10
        e1 = dedekind_eta(tau, p)
        e2 = dedekind_eta(2 * tau, p)
        e4 = dedekind_eta(4 * tau, p)
        val = (e2 ** 3 / (e1 * e4 ** 2)) ** 8
    return val


def t_Q(tau, prec: int):
    """Hauptmodul 27 + (eta(t)/eta(3t))^12 of Gamma0(3)."""
    with working(prec):
        tau = _check_tau(tau)
        p = prec + 10
        val = 27 + (dedekind_eta(tau, p) / dedekind_eta(3 * tau, p)) ** 12
    return val


def j_fn(tau, prec: int):
    """Klein j through lambda: 256 (1 - l + l^2)^3 / (l^2 (1 - l)^2)."""
    with working(prec):
        lam = lambda_fn(tau, prec + 10)
        den = lam ** 2 * (1 - lam) ** 2
        if abs(den) < mp.mpf(10) ** (-(prec + 5)):
            raise DomainError("lambda degenerate (cusp)")
        val = 256 * (1 - lam + lam ** 2) ** 3 / den
    return val


def j_from_tP(t):
    """Both j-expressions in a Gamma0(4) Hauptmodul value."""
    return (t ** 2 + 224 * t + 256) ** 3 / (t * (t - 16) ** 4)


def j_from_tQ(t):
    return t * (t + 216) ** 3 / (t - 27) ** 3


def j_of_F(t):
    """j-invariant of the Weierstrass model F_t."""
    if t == 0 or t == 16:
        raise DomainError("t must avoid {0, 16}")
    return (t ** 2 - 16 * t + 16) ** 3 / (t * (t - 16))


def j_of_C(t):
    """j-invariant of the Hesse-type model C_t."""
    if t == 0 or t == 27:
        raise DomainError("t must avoid {0, 27}")
    return t * (t + 216) ** 3 / (t - 27) ** 3


def tau_from_tP(t, prec: int):
    """Period ratio tau' with t_P(tau') = t (principal branch)."""
    with working(prec):
        t = mpc(t)
        if t == 0 or t == 16:
            raise DomainError("t must avoid {0, 16}")
        z = 16 / t
        p = prec + 10
        val = 0.5j * hyp2f1(0.5, 0.5, 1, 1 - z, p) / hyp2f1(0.5, 0.5, 1, z, p)
    return val


def tau_from_tQ(t, prec: int):
    """Period ratio tau' with t_Q(tau') = t (principal branch)."""
    with working(prec):
        t = mpc(t)
        if t == 0 or t == 27:
            raise DomainError("t must avoid {0, 27}")
        z = 27 / t
        p = prec + 10
        a, b = mp.mpf(1) / 3, mp.mpf(2) / 3
        val = 1j / mp.sqrt(3) * hyp2f1(a, b, 1, 1 - z, p) / hyp2f1(a, b, 1, z, p)
    return val
