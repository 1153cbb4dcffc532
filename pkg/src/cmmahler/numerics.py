"""Arbitrary-precision special functions used throughout the package.

Numbers are plain ``mpmath`` values.  Every public function takes the
requested number of correct decimal digits ``prec`` and works internally
with ``GUARD_DIGITS`` extra digits.
"""

from __future__ import annotations

from fractions import Fraction

import mpmath as mp

from .errors import AccuracyError, DomainError

GUARD_DIGITS = 10


def working(prec: int):
    """Context manager setting mpmath to ``prec`` digits plus the guard."""
    return mp.workdps(int(prec) + GUARD_DIGITS)


def mpc(x) -> mp.mpc:
    if isinstance(x, Fraction):
        return mp.mpc(mp.mpf(x.numerator) / x.denominator)
    return mp.mpc(x)


def _as_mpf(x):
    if isinstance(x, Fraction):
        return mp.mpf(x.numerator) / x.denominator
    return mp.mpf(x)


def hyp2f1(a, b, c, z, prec: int):
    """Gauss hypergeometric function 2F1(a, b; c; z), principal branch."""
    with working(prec):
        a, b, c = _as_mpf(a), _as_mpf(b), _as_mpf(c)
        z = mpc(z)
        if c <= 0 and c == mp.floor(c):
            raise DomainError("c must not be a non-positive integer")
        if z == 1 and (c - a - b) <= 0:
            raise DomainError("2F1 diverges at z = 1 when Re(c-a-b) <= 0")
        try:
            val = mp.hyp2f1(a, b, c, z)
        except (ValueError, ZeroDivisionError, mp.libmp.NoConvergence) as exc:
            raise DomainError(f"2F1 evaluation failed: {exc}") from exc
    return val


def hyp2f1_series(a, b, c, z, prec: int, max_terms: int = 100000):
    """Plain Taylor series of 2F1; only sensible for |z| well below 1."""
    with working(prec):
        a, b, c = _as_mpf(a), _as_mpf(b), _as_mpf(c)
        z = mpc(z)
        if abs(z) >= 1:
            raise DomainError("series needs |z| < 1")
        eps = mp.mpf(10) ** (-prec - 5)
        term = mp.mpc(1)
        total = mp.mpc(1)
        for k in range(max_terms):
            term *= (a + k) * (b + k) / ((c + k) * (k + 1)) * z
            total += term
            if abs(term) < eps * abs(total):
                return total
    raise AccuracyError("2F1 series did not converge", estimate=total)


def _eta_series(tau):
    # eta(tau) = e^{i pi tau/12} * sum_k (-1)^k q^{k(3k-1)/2}
    q = mp.expjpi(2 * tau)
    eps = mp.eps * 2
    total = mp.mpc(1)
    k = 1
    while True:
        e1 = k * (3 * k - 1) // 2
        e2 = k * (3 * k + 1) // 2
        t = q ** e1 + q ** e2
        if k % 2:
            total -= t
        else:
            total += t
        if abs(t) < eps:
            break
        k += 1
    return mp.expjpi(tau / 12) * total


def dedekind_eta(tau, prec: int):
    """Dedekind eta with reduction to the standard fundamental domain."""
    with working(prec):
        tau = mpc(tau)
        if tau.imag <= 0:
            raise DomainError("dedekind_eta needs Im(tau) > 0")
        factor = mp.mpc(1)
        # invariant: eta(original) = factor * eta(tau)
        for _ in range(100000):
            n = int(mp.nint(tau.real))
            if n:
                factor *= mp.expjpi(mp.mpf(n) / 12)
                tau -= n
            if abs(tau) >= 1 - mp.eps * 8:
                break
            # eta(tau) = eta(-1/tau) / sqrt(-i tau)
            factor /= mp.sqrt(-1j * tau)
            tau = -1 / tau
        val = factor * _eta_series(tau)
    return val


def eta_product(tau, prec: int, terms: int | None = None):
    """Unreduced q-product q^{1/24} prod(1 - q^n); slow reference version."""
    with working(prec):
        tau = mpc(tau)
        q = mp.expjpi(2 * tau)
        prod = mp.mpc(1)
        qn = mp.mpc(1)
        n = 0
        eps = mp.mpf(10) ** (-prec - 5)
        while True:
            n += 1
            qn *= q
            prod *= 1 - qn
            if terms is not None and n >= terms:
                break
            if terms is None and abs(qn) < eps:
                break
        return mp.expjpi(tau / 12) * prod


def tanh_sinh_integrate(f, a, b, prec: int, points=None, maxdegree: int | None = None):
    """Integrate ``f`` over [a, b] by double-exponential quadrature.

    ``points`` lists interior break points (singular angles); each panel is
    integrated separately so endpoint singularities stay at panel ends.
    Raises AccuracyError if the level-to-level difference stays above
    10^-prec.
    """
    with working(prec):
        a = _as_mpf(a)
        b = _as_mpf(b)
        nodes = [a] + sorted(_as_mpf(p) for p in (points or []) if a < p < b) + [b]
        if maxdegree is None:
            maxdegree = 6 + int(mp.log(prec + 20, 2)) + 2
        total = mp.mpf(0)
        err_total = mp.mpf(0)
        for lo, hi in zip(nodes, nodes[1:]):
            if hi == lo:
                continue
            val, err = mp.quad(f, [lo, hi], method="tanh-sinh", error=True,
                               maxdegree=maxdegree)
            total += val
            err_total += err
        tol = mp.mpf(10) ** (-prec)
        if err_total > tol * max(1, abs(total)):
            raise AccuracyError(
                f"tanh-sinh did not converge (error ~ {mp.nstr(err_total, 3)})",
                estimate=+total, error=+err_total)
    return total


def upper_incomplete_gamma(s, x, prec: int):
    """Upper incomplete gamma Gamma(s, x) for x > 0."""
    with working(prec):
        x = _as_mpf(x)
        if x <= 0:
            raise DomainError("upper_incomplete_gamma needs x > 0")
        if s == 0:
            val = mp.e1(x)
        elif s == 1:
            val = mp.exp(-x)
        elif s == 2:
            val = (1 + x) * mp.exp(-x)
        else:
            val = mp.gammainc(_as_mpf(s), x)
    return val


def digits_of_agreement(x, y) -> float:
    """Number of matching decimal digits, relative to max(1, |x|)."""
    d = abs(x - y)
    if d == 0:
        return float("inf")
    scale = max(mp.mpf(1), abs(x))
    return float(-mp.log10(d / scale))
