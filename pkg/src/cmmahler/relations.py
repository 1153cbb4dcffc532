"""Integer relation detection (PSLQ) and minimal-polynomial recognition.

The PSLQ loop runs in fixed point on Python integers: every real quantity
is stored as round(v * 2^bits).  That keeps a 12-term, 250-digit search
fast enough without leaning on an external relation finder.
"""

from __future__ import annotations

from dataclasses import dataclass
from math import gcd

import mpmath as mp

from .errors import DomainError, PrecisionExhausted
from .numerics import mpc, working
from .quadcm import AlgebraicNumber

GAMMA = mp.sqrt(mp.mpf(4) / 3)
MARGIN_DIGITS = 20


@dataclass(frozen=True)
class IntegerRelation:
    coefficients: tuple
    residual: mp.mpf

    def __iter__(self):
        return iter(self.coefficients)

    def __len__(self):
        return len(self.coefficients)


def _normalize(coeffs):
    g = 0
    for c in coeffs:
        g = gcd(g, int(c))
    coeffs = [int(c) // g for c in coeffs]
    for c in coeffs:
        if c:
            if c < 0:
                coeffs = [-v for v in coeffs]
            break
    return tuple(coeffs)


def _residual(x, coeffs):
    return abs(mp.fsum(c * v for c, v in zip(coeffs, x)))


def pslq(x, prec: int, max_coeff_bits: int = 64, maxsteps: int | None = None):
    """Find integers c, not all zero, with sum c_i x_i = 0 to ``prec`` digits.

    Returns an IntegerRelation, or None when the norm bound certifies that
    no relation with max |c_i| < 2^max_coeff_bits exists.  Raises
    PrecisionExhausted when the working precision can no longer separate
    a relation from round-off before that bound is reached.
    """
    n = len(x)
    if n < 2:
        raise DomainError("pslq needs at least two numbers")
    with working(prec):
        xs = [mp.mpf(v) for v in x]
        scale = max(abs(v) for v in xs)
        if scale == 0 or any(v == 0 for v in xs):
            raise DomainError("pslq inputs must be nonzero")
        xs = [v / scale for v in xs]
        tol = mp.mpf(10) ** (-prec + 12)
        bits = int(prec * 3.33) + 40
        one = 1 << bits

        def fix(v):
            return int(mp.nint(v * one))

        # partial sums s_k = sqrt(x_k^2 + ... + x_n^2)
        s = [mp.sqrt(mp.fsum(v * v for v in xs[k:])) for k in range(n)]
        y = [fix(v / s[0]) for v in xs]
        sf = [v / s[0] for v in s]
        yf = [v / s[0] for v in xs]
        H = [[0] * (n - 1) for _ in range(n)]
        for i in range(n):
            for j in range(n - 1):
                if i < j:
                    continue
                if i == j:
                    H[i][j] = fix(sf[i + 1] / sf[i])
                else:
                    H[i][j] = fix(-yf[i] * yf[j] / (sf[j] * sf[j + 1]))
        gamma_fix = fix(GAMMA)
        tol_fix = max(1, fix(tol))
        coeff_cap = mp.mpf(10) ** (prec - 12)
        A = [[int(i == j) for j in range(n)] for i in range(n)]
        B = [[int(i == j) for j in range(n)] for i in range(n)]

        def reduce_rows(rows, jmax_fn):
            for i in rows:
                for j in range(jmax_fn(i), -1, -1):
                    if H[j][j] == 0:
                        continue
                    t = (2 * H[i][j] + H[j][j]) // (2 * H[j][j])  # round(H_ij / H_jj)
                    if not t:
                        continue
                    y[j] += (t * y[i])
                    for k in range(j + 1):
                        H[i][k] -= t * H[j][k]
                    for k in range(n):
                        A[i][k] -= t * A[j][k]
                        B[k][j] += t * B[k][i]

        reduce_rows(range(1, n), lambda i: i - 1)
        if maxsteps is None:
            maxsteps = 200 * n * n + 20 * prec * n
        best_bound = mp.mpf(0)
        for step in range(maxsteps):
            # choose the row maximising gamma^i |H_ii|
            m, best = 0, -1
            g = one
            for i in range(n - 1):
                g = g * gamma_fix >> bits
                v = g * abs(H[i][i])
                if v > best:
                    m, best = i, v
            y[m], y[m + 1] = y[m + 1], y[m]
            H[m], H[m + 1] = H[m + 1], H[m]
            A[m], A[m + 1] = A[m + 1], A[m]
            for k in range(n):
                B[k][m], B[k][m + 1] = B[k][m + 1], B[k][m]
            if m < n - 2:
                a, b = H[m][m], H[m][m + 1]
                t0 = int(mp.nint(mp.sqrt(mp.mpf(a) ** 2 + mp.mpf(b) ** 2)))
                if t0 == 0:
                    break
                for i in range(m, n):
                    t3, t4 = H[i][m], H[i][m + 1]
                    H[i][m] = (a * t3 + b * t4) // t0
                    H[i][m + 1] = (-b * t3 + a * t4) // t0
            reduce_rows(range(m + 1, n), lambda i: min(i - 1, m + 1))

            # relation found?
            for j in range(n):
                if abs(y[j]) < tol_fix:
                    coeffs = _normalize([B[k][j] for k in range(n)])
                    if not any(coeffs):
                        continue
                    res = _residual(xs, coeffs)
                    if res < tol:
                        height = max(abs(c) for c in coeffs)
                        if height >= 2 ** max_coeff_bits:
                            return None
                        # n numbers admit chance relations of height about
                        # 10^(prec/(n-1)); demand a clear margin below that
                        if (n - 1) * mp.log10(height) + MARGIN_DIGITS > prec:
                            raise PrecisionExhausted(
                                f"relation of height {height} is not significant at {prec} digits",
                                estimate=mp.mpf(height))
                        return IntegerRelation(coeffs, _residual([mp.mpf(v) for v in x], coeffs))
            # any relation has norm >= 1 / max |H_jj|
            hmax = max(abs(H[j][j]) for j in range(n - 1))
            if hmax == 0:
                break
            bound = mp.mpf(one) / hmax
            best_bound = max(best_bound, bound)
            if best_bound >= 2 ** max_coeff_bits:
                return None
            amax = max(abs(v) for row in A for v in row)
            if amax > coeff_cap:
                raise PrecisionExhausted(
                    f"pslq needs more than {prec} digits (relation norm > {mp.nstr(best_bound, 5)})",
                    estimate=best_bound)
        raise PrecisionExhausted(f"pslq stalled after {maxsteps} steps at {prec} digits",
                                 estimate=best_bound)


def recognize_minpoly(x, maxdeg: int, prec: int, max_coeff_bits: int = 64):
    """Lowest-degree integer polynomial vanishing at ``x``, or None.

    For complex x the real and imaginary parts of 1, x, ..., x^d are folded
    into one real vector as Re + pi * Im; a relation is accepted only if it
    annihilates both parts.
    """
    if maxdeg < 1:
        raise DomainError("maxdeg must be at least 1")
    with working(prec):
        z = mpc(x)
        is_complex = abs(mp.im(z)) > mp.mpf(10) ** (-prec + 5) * max(1, abs(z))
        tol = mp.mpf(10) ** (-prec + 12)
        for d in range(1, maxdeg + 1):
            powers = [z ** k for k in range(d + 1)]
            if is_complex:
                vec = [mp.re(p) + mp.pi * mp.im(p) for p in powers]
            else:
                vec = [mp.re(p) for p in powers]
            if any(v == 0 for v in vec):
                continue
            try:
                rel = pslq(vec, prec, max_coeff_bits)
            except PrecisionExhausted:
                continue
            if rel is None:
                continue
            coeffs = list(rel.coefficients)
            if coeffs[-1] == 0:
                continue
            if coeffs[-1] < 0:
                coeffs = [-c for c in coeffs]
            val = mp.polyval(list(reversed(coeffs)), z)
            if abs(val) < tol * max(1, max(abs(c) for c in coeffs) * max(1, abs(z)) ** d):
                return AlgebraicNumber(tuple(coeffs), +z)
    return None
