"""Mahler measures of the P and Q families.

Quadrature: Jensen's formula reduces each two-variable measure to a
one-dimensional integral over x = e^{i theta}.  Lattice sums: the
Eisenstein-Kronecker double series at a CM point, accelerated by summing
the inner index in closed form.
"""

from __future__ import annotations

from dataclasses import dataclass

import mpmath as mp

from .errors import DomainError
from .numerics import mpc, tanh_sinh_integrate, working
from .quadcm import CMPoint, in_FP, in_FQ
from .modular import t_Q

# ---------------------------------------------------------------- helpers


def _clean(t, prec):
    """Drop an imaginary part that is pure round-off."""
    t = mpc(t)
    if abs(mp.im(t)) < mp.mpf(10) ** (-prec) * max(1, abs(t)):
        return mp.mpc(mp.re(t), 0)
    return t


def _larger_root_log(k_lin, k_const):
    """log|y| for the larger root of y^2 + k_lin*y + k_const."""
    disc = mp.sqrt(k_lin * k_lin - 4 * k_const)
    y1 = (-k_lin + disc) / 2
    y2 = (-k_lin - disc) / 2
    return mp.log(max(abs(y1), abs(y2)))


def _crossings(g, a, b, prec, grid=96):
    """Points in (a, b) where g switches between positive and non-positive.

    ``g`` is |y_big| - 1 along the circle; the curve meets the torus
    exactly where it drops to zero.  A coarse grid brackets each switch and
    bisection refines it to full working precision.
    """
    pts = []
    xs = [a + (b - a) * mp.mpf(i) / grid for i in range(grid + 1)]
    tol = mp.mpf(10) ** (-(prec // 2))
    vals = [g(x) > tol for x in xs]
    for (x0, v0), (x1, v1) in zip(zip(xs, vals), zip(xs[1:], vals[1:])):
        if v0 == v1:
            continue
        lo, hi = x0, x1
        for _ in range(int(prec * 3.4) + 20):
            mid = (lo + hi) / 2
            if (g(mid) > tol) == v0:
                lo = mid
            else:
                hi = mid
        pts.append((lo + hi) / 2)
    return pts


# ---------------------------------------------------------------- P family


def _mu_integrand(sqrt_t):
    def f(theta):
        k = sqrt_t + 2 * mp.cos(theta)
        # y^2 + k y + 1: the two roots multiply to 1
        return abs(_larger_root_log(k, 1))
    return f


def _mu_singular_angles(sqrt_t, prec):
    # |y| = 1 for both roots iff k = sqrt(t) + 2cos(theta) lies in [-2, 2]
    if abs(mp.im(sqrt_t)) > mp.mpf(10) ** (-prec):
        return []
    s = mp.re(sqrt_t)

    def g(theta):
        k = s + 2 * mp.cos(theta)
        return abs(k) - 2
    pts = _crossings(g, 0, mp.pi, prec)
    # analytic refinement: 2cos(theta) = 2 - s or -2 - s
    out = []
    for p in pts:
        for target in (2 - s, -2 - s):
            if abs(target) <= 2:
                th = mp.acos(target / 2)
                if abs(th - p) < mp.mpf(10) ** -3:
                    p = th
        out.append(p)
    return out


def mu(t, prec: int = 30):
    """m(x + 1/x + y + 1/y + sqrt(t)) by quadrature over theta in [0, pi]."""
    with working(prec):
        t = _clean(t, prec)
        if mp.im(t) < 0:
            t = mp.conj(t)          # mu(conj t) = mu(t)
        sqrt_t = mp.sqrt(t)
        f = _mu_integrand(sqrt_t)
        pts = _mu_singular_angles(sqrt_t, prec)
        val = tanh_sinh_integrate(f, 0, mp.pi, prec + 5, points=pts) / mp.pi
    return val


# ---------------------------------------------------------------- Q family


def in_deltoid(k) -> bool:
    """True iff k is in the open interior of the deltoid 2e^{it} + e^{-2it}.

    k lies in the closed region iff z^3 - k z^2 + conj(k) z - 1 has all its
    roots on the unit circle; the interior is where the (real) discriminant
    of that cubic is negative.
    """
    k = complex(k)
    r2 = abs(k) ** 2
    disc = r2 * r2 - 8 * (k ** 3).real + 18 * r2 - 27
    return disc < -1e-12


def _cube_root(t):
    t = mpc(t)
    if mp.im(t) == 0 and mp.re(t) < 0:
        return -mp.cbrt(-mp.re(t))
    if mp.im(t) == 0:
        return mp.cbrt(mp.re(t))
    # argument in (-pi/3, pi/3]
    return mp.root(t, 3)


def _ytilde_logs(k):
    """theta -> log|y_big(e^{i theta})| for y^2 + (x^2 - k x) y + x."""
    def f(theta):
        x = mp.expj(theta)
        return _larger_root_log(x * x - k * x, x)
    return f


def _q_singular_angles(k, prec):
    f = _ytilde_logs(k)
    return _crossings(lambda th: f(th), 0, mp.pi, prec)


def _branch_angles(k):
    """Arguments of branch points of y(x) lying close to the unit circle."""
    roots = mp.polyroots([1, -2 * k, k * k, -4], maxsteps=200, extraprec=2 * mp.mp.prec)
    return [abs(mp.arg(r)) for r in roots if abs(abs(r) - 1) < mp.mpf(1) / 2]


def _graded(centres):
    out = []
    for s in centres:
        if s <= 0:
            continue
        for j in range(1, 60):
            h = mp.mpf(2) ** -j
            out += [s * (1 + h), s * (1 - h), s * (1 + 1 / h)]
        out.append(s)
    return sorted(p for p in out if 0 < p < mp.pi)


def _IJ(t, prec):
    k = _cube_root(t)
    kr = mp.re(k)
    c = mp.acos((kr - 1) / 2)
    f = _ytilde_logs(k)
    # integrand is even in theta for real k; near t = 27 the touching angle
    # c and the branch points x (x - k)^2 = 4 crowd towards theta = 0, so
    # graded break points keep every panel well scaled
    pts = _graded([c] + _branch_angles(k))
    I = tanh_sinh_integrate(f, 0, c, prec + 5, points=pts) / mp.pi
    J = tanh_sinh_integrate(f, c, mp.pi, prec + 5, points=pts) / mp.pi
    return I, J


def n_classical(t, prec: int = 30):
    """m(Q_t) via the Jensen integral of the modified polynomial."""
    with working(prec):
        t = _clean(t, prec)
        k = _cube_root(t)
        if in_deltoid(k):
            raise DomainError("cube root of t lies inside the deltoid; use the modified measure")
        if mp.im(k) == 0 and -1 <= mp.re(k) <= 3:
            I, J = _IJ(t, prec)
            return (I + J)
        f = _ytilde_logs(k)
        # full circle; the integrand is not symmetric for complex k
        pts = _crossings(f, 0, 2 * mp.pi, prec)
        val = tanh_sinh_integrate(f, 0, 2 * mp.pi, prec + 5, points=pts) / (2 * mp.pi)
    return val


def n_modified(t, prec: int = 30):
    """I(t) - 2 J(t) for real t in (-1, 27)."""
    with working(prec):
        t = _clean(t, prec)
        if abs(mp.im(t)) > 0 or not (-1 < mp.re(t) < 27) or t == 0:
            raise DomainError("modified measure needs real t in (-1, 27), t != 0")
        I, J = _IJ(t, prec)
    return (I - 2 * J)


def IJ(t, prec: int = 30):
    with working(prec):
        I, J = _IJ(mpc(t), prec)
    return I, +J


def nu_branch(t) -> str:
    t = complex(t)
    if abs(t.imag) < 1e-25 * max(1.0, abs(t)) and -1 < t.real < 27:
        return "modified"
    return "classical"


def nu(t, prec: int = 30, branch: str = "auto"):
    """nu(t): classical measure, or the modified one for t in (-1, 27)."""
    if branch == "auto":
        branch = nu_branch(t)
    if branch == "modified":
        return n_modified(t, prec)
    if nu_branch(t) == "modified":
        raise DomainError("t in (-1, 27): the curve meets the torus; classical branch refused")
    return n_classical(t, prec)


# ---------------------------------------------------------------- lattice sums


@dataclass(frozen=True)
class EKParams:
    family: str
    tau0: CMPoint

    @property
    def f(self) -> int:
        return 4 if self.family == "P" else 3


def _chi(f, n):
    r = n % f
    if f == 4:
        return {1: 1, 3: -1}.get(r, 0)
    return {1: 1, 2: -1}.get(r, 0)


def _L_chi_3(f):
    if f == 4:
        return mp.pi ** 3 / 32
    return 4 * mp.pi ** 3 / (81 * mp.sqrt(3))


def _ek_line(f, z):
    """Re sum_n chi(n) / ((n+z)^2 (n+conj z)) for Im z > 0, in closed form."""
    zb = mp.conj(z)
    delta = (zb - z) / f
    total = mp.mpc(0)
    for r in range(1, f):
        ch = _chi(f, r)
        if not ch:
            continue
        alpha = (r + z) / f
        beta = (r + zb) / f
        s = mp.pi ** 2 / mp.sin(mp.pi * alpha) ** 2 / delta
        s += mp.pi * (mp.cot(mp.pi * beta) - mp.cot(mp.pi * alpha)) / delta ** 2
        total += ch * s
    return mp.re(total) / f ** 3


def ek_sum(params: EKParams, prec: int = 30, mmax: int | None = None):
    """Sum' chi(n) (f m Re tau0 + n) / |f m tau0 + n|^4 with fast convergence."""
    f = params.f
    with working(prec):
        tau0 = params.tau0.embed(prec + 10)
        y = mp.im(tau0)
        if y <= 0:
            raise DomainError("need Im(tau0) > 0")
        total = 2 * _L_chi_3(f)
        if mmax is None:
            # tail ~ exp(-2 pi m Im tau0)
            mmax = int((prec + 15) * mp.log(10) / (2 * mp.pi * y)) + 2
        for m in range(1, mmax + 1):
            total += 2 * _ek_line(f, f * m * tau0)
    return total


def ek_sum_bruteforce(params: EKParams, R: int):
    """Truncated raw double sum |m|, |n| <= R in double precision."""
    import numpy as np
    f = params.f
    tau0 = complex(params.tau0.embed(20))
    n = np.arange(-R, R + 1, dtype=float)
    chi = np.array([_chi(f, int(k)) for k in range(-R, R + 1)], dtype=float)
    total = 0.0
    for m in range(-R, R + 1):
        w = f * m * tau0 + n
        mod2 = (w.real ** 2 + w.imag ** 2)
        mask = mod2 > 0
        total += float(np.sum(chi[mask] * w.real[mask] / mod2[mask] ** 2))
    return total


def mu_via_ek(tau0: CMPoint, prec: int = 30):
    if not in_FP(tau0):
        raise DomainError(f"{tau0} is not in the Gamma0(4) domain")
    with working(prec):
        y = mp.im(tau0.embed(prec + 10))
        val = 16 * y / mp.pi ** 2 * ek_sum(EKParams("P", tau0), prec + 5)
    return val


def nu_via_ek(tau0: CMPoint, prec: int = 30):
    if not in_FQ(tau0):
        raise DomainError(f"{tau0} is not in the Gamma0(3) domain")
    with working(prec):
        tau = tau0.embed(prec + 10)
        y = mp.im(tau)
        s = ek_sum(EKParams("Q", tau0), prec + 5)
        t = t_Q(tau, 20)
        if nu_branch(t) == "modified":
            sgn = 1 if mp.re(t) > 0 else -1
            val = 27 * mp.sqrt(3) * y / ((1 - 3 * sgn) * mp.pi ** 2) * s
        else:
            val = 27 * mp.sqrt(3) * y / (4 * mp.pi ** 2) * s
    return val
