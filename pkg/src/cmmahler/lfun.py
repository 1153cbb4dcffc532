"""L-values of weight-2 forms at s = 2 and the functional-equation bridges.

Conventions.  For a form f of level N the Fricke pseudo-eigenvalue eta is
defined by

    f(i / (N u)) = eta * N * u^2 * conj(f)(i u)        (u > 0),

so that Lambda(f, s) = N^{s/2} (2 pi)^{-s} Gamma(s) L(f, s) satisfies
Lambda(f, s) = eta * Lambda(conj f, 2 - s); for a rational newform eta is
the root number.  Splitting the Mellin integral at y0 gives

    L(f, 2) = sum a_n n^-2 Gamma(2, 2 pi n y0)
              + (4 pi^2 eta / N) sum conj(a_n) E1(2 pi n / (N y0)).
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace
from fractions import Fraction
from math import gcd

import mpmath as mp
import sympy

from .errors import (AccuracyError, DataError, DomainError, NotFrickeCompatible,
                     TruncationError, VerificationFailure)
from .numberfield import RATIONALS, NFElement, NumberField, as_element, to_complex
from .numerics import upper_incomplete_gamma, working
from .relations import pslq
from .theta import QExpansion, kronecker

# ---------------------------------------------------------------- evaluation


def terms_needed(y, prec: int) -> int:
    """Smallest n_max with exp(-2 pi y n_max) < 10^-(prec + 5)."""
    return int((prec + 5) * mp.log(10) / (2 * mp.pi * y)) + 2


def _numeric(f: QExpansion, prec: int):
    cache = f.meta.setdefault("_numeric", {})
    hit = cache.get(prec)
    if hit is None or len(hit) < len(f.coeffs):
        hit = f.numeric(prec)
        cache[prec] = hit
    return hit


def eval_qexp(f: QExpansion, y, prec: int = 30, conjugate: bool = False):
    """sum a_n exp(-2 pi n y)."""
    with working(prec):
        y = mp.mpf(y)
        if y <= 0:
            raise DomainError("need y > 0")
        need = terms_needed(y, prec)
        if need > f.truncation:
            raise TruncationError(f"need {need} coefficients at y = {mp.nstr(y, 5)}, "
                                  f"have {f.truncation}", required=need)
        coeffs = _numeric(f, prec)
        q = mp.exp(-2 * mp.pi * y)
        total = mp.mpc(0)
        qn = mp.mpf(1)
        for n in range(1, need + 1):
            qn *= q
            c = coeffs[n]
            if c:
                total += (mp.conj(c) if conjugate else c) * qn
    return total


def _probe_at(f, u, N, prec):
    lhs = eval_qexp(f, 1 / (N * u), prec)
    rhs = eval_qexp(f, u, prec, conjugate=True)
    return lhs / (N * u * u * rhs)


def fricke_probe(f: QExpansion, prec: int = 30):
    """Pseudo-eigenvalue eta from two probe points, cross-checked."""
    N = f.level
    with working(prec):
        u0 = mp.mpf("1.37") / mp.sqrt(N)
        u1 = mp.mpf("2.11") / mp.sqrt(N)
        e0 = _probe_at(f, u0, N, prec)
        e1 = _probe_at(f, u1, N, prec)
        tol = mp.mpf(10) ** (-(prec // 2))
        if abs(e0 - e1) > tol or abs(abs(e0) - 1) > tol:
            raise NotFrickeCompatible(
                f"Fricke probes disagree: {mp.nstr(e0, 10)} vs {mp.nstr(e1, 10)}",
                estimate=e0, error=abs(e0 - e1))
    return e0


def _afe(coeffs, N, eta, y0, prec):
    with working(prec):
        c2 = 2 * mp.pi * y0
        cr = 2 * mp.pi / (N * y0)
        s1 = mp.mpc(0)
        s2 = mp.mpc(0)
        for n in range(1, len(coeffs)):
            a = coeffs[n]
            if not a:
                continue
            x1 = c2 * n
            if x1 < (prec + 15) * 2.31:
                s1 += a * (1 + x1) * mp.exp(-x1) / (n * n)
            x2 = cr * n
            if x2 < (prec + 15) * 2.31:
                s2 += mp.conj(a) * mp.e1(x2)
        return s1 + 4 * mp.pi ** 2 * eta / N * s2


def L_at_2(f: QExpansion, prec: int = 30, eta=None, y0=None, check: bool = True):
    """L(f, 2) by the approximate functional equation."""
    N = f.level
    with working(prec + 5):
        if eta is None:
            eta = f.meta.get("eta")
        if eta is None:
            eta = fricke_probe(f, prec)
        if y0 is None:
            y0 = 1 / mp.sqrt(N)
        need = max(terms_needed(y0, prec + 5), terms_needed(1 / (N * y0), prec + 5))
        if need > f.truncation:
            raise TruncationError(f"L(f,2) at {prec} digits needs {need} coefficients",
                                  required=need)
        coeffs = _numeric(f, prec + 5)[: need + 1]
        val = _afe(coeffs, N, eta, y0, prec + 5)
        if check:
            y1 = mp.mpf("1.7") / mp.sqrt(N)
            need1 = max(terms_needed(y1, prec + 5), terms_needed(1 / (N * y1), prec + 5))
            if need1 <= f.truncation:
                alt = _afe(_numeric(f, prec + 5)[: need1 + 1], N, eta, y1, prec + 5)
                if abs(alt - val) > mp.mpf(10) ** (-prec + 6) * max(1, abs(val)):
                    raise AccuracyError(
                        f"L(f,2) depends on the split point: {mp.nstr(val, 15)} vs {mp.nstr(alt, 15)}",
                        estimate=val, error=abs(alt - val))
    return val


def dirichlet_partial_sum(f: QExpansion, n_max: int, prec: int = 20):
    """Plain sum_{n <= n_max} a_n / n^2, the slow reference."""
    coeffs = _numeric(f, prec)
    if n_max > f.truncation:
        raise TruncationError("not enough coefficients", required=n_max)
    with working(prec):
        return mp.fsum(coeffs[n] / mp.mpf(n) ** 2 for n in range(1, n_max + 1) if coeffs[n])


def derivative_at_0(f: QExpansion, prec: int = 30, eta=None):
    """L'(f, 0) = eta N (2 pi)^-2 L(conj f, 2)."""
    with working(prec + 5):
        if eta is None:
            eta = f.meta.get("eta")
        if eta is None:
            eta = fricke_probe(f, prec)
        fbar = conjugate_form(f, prec + 5)
        # conj f has pseudo-eigenvalue conj(eta)
        val = eta * f.level / (4 * mp.pi ** 2) * L_at_2(fbar, prec, eta=mp.conj(eta))
    return val


def conjugate_form(f: QExpansion, prec: int = 30) -> QExpansion:
    with working(prec):
        coeffs = [mp.conj(c) for c in _numeric(f, prec)]
    g = QExpansion(f.level, f.char_disc, coeffs, label=(f.label + "bar") if f.label else "")
    if "eta" in f.meta:
        g.meta["eta"] = mp.conj(f.meta["eta"])
    return g


# ---------------------------------------------------------------- newform completion


def _smooth_numbers(primes, bound):
    out = [1]
    for p in primes:
        nxt = []
        for s in out:
            v = s
            while v <= bound:
                nxt.append(v)
                v *= p
        out = nxt
    return sorted(out)


def primitive_character_value(D: int, p: int) -> int:
    """Value at p of the primitive character behind (D/.)."""
    sign = 1 if D > 0 else -1
    core = sign
    for q, e in sympy.factorint(abs(D)).items():
        if e % 2:
            core *= q
    D0 = core if core % 4 == 1 else 4 * core
    return kronecker(D0, p)


@dataclass
class CompletedNewform:
    """A newform rebuilt from an eigen-component g of a theta span.

    ``form`` carries its pseudo-eigenvalue in ``form.meta['eta']``; its
    coefficients are exact when every a_p at a prime of the span level was
    recognised in the coefficient field, numeric otherwise.  ``bad`` holds
    the solved a_p and ``consistency`` the worst check residual.
    """

    form: QExpansion
    eta: object
    bad: dict
    exact_bad: dict = field(default_factory=dict)
    consistency: object = None

    @property
    def exact(self) -> bool:
        return self.form.is_exact()


def good_coefficients(g: QExpansion, n_max: int, coprime_to: int | None = None):
    """a_m(f) = g_{m lead} / g_lead for m coprime to ``coprime_to``.

    g is a combination of f(d tau) over d | span level / newform level, so
    the ratio is exact for every m coprime to that index (the default
    is the span level itself).
    """
    lead = g.leading_index()
    N = g.level if coprime_to is None else coprime_to
    if lead * n_max > g.truncation:
        raise TruncationError(f"need span coefficients through {lead * n_max}",
                              required=lead * n_max)
    base = g.coeffs[lead]
    out = {}
    for m in range(1, n_max + 1):
        if gcd(m, N) == 1:
            c = g.coeffs[lead * m]
            if c != 0:
                out[m] = _divide(c, base)
    return out


def _divide(a, b):
    if isinstance(a, int) and isinstance(b, int):
        return Fraction(a, b)
    if isinstance(b, NFElement):
        return b.inverse() * a
    return a / b


def _powers(q, n):
    out = [mp.mpf(1)] * (n + 1)
    v = mp.mpf(1)
    for k in range(1, n + 1):
        v *= q
        out[k] = v
    return out


def _completion_budget(level: int, span_level: int, prec: int):
    """(working digits, coefficients read) for completing at ``level``."""
    S = sorted(sympy.primefactors(span_level // level))
    ymin = mp.exp(-mp.mpf("0.45")) / mp.sqrt(level)
    # exponential fitting loses roughly one digit per unknown
    nunk_est = 2 * len(_smooth_numbers(S, terms_needed(ymin, prec + 5)))
    work = prec + 40 + nunk_est // 2
    # the wider Fricke probe point sits at y = 1 / (2.11 sqrt(level))
    probe = terms_needed(1 / (mp.mpf("2.11") * mp.sqrt(level)), prec + 5)
    return work, max(terms_needed(ymin, work - 10), probe)


def span_truncation_for(level: int, prec: int, lead: int = 1, span_level: int | None = None) -> int:
    """Span coefficients needed to complete a level-``level`` newform at prec."""
    _, n_max = _completion_budget(level, span_level or level, prec)
    return lead * max(n_max, terms_needed(1 / mp.sqrt(level), prec + 10))


def complete_newform(g: QExpansion, level: int, prec: int = 40, samples: float = 2.5,
                     label: str = "", exact: bool = True) -> CompletedNewform:
    """Recover the level-``level`` newform behind the eigen-component g.

    For n = s m with s supported on the primes of the oldform index
    (span level / level) and m coprime to it, a_n = X_s a_m.  The a_m come from g; the X_s, together
    with Y_s = eta conj(X_s), solve the Fricke relation
    f(i/(N u)) = eta N u^2 conj(f)(i u) sampled at points u near 1/sqrt(N).
    A level that does not carry a newform with these Hecke eigenvalues
    leaves the system inconsistent and raises NotFrickeCompatible.
    """
    if g.level % level:
        raise DomainError(f"newform level {level} does not divide span level {g.level}")
    # only primes of the oldform index are unknown
    S = sorted(sympy.primefactors(g.level // level))
    spread = mp.mpf("0.45")
    work, n_max = _completion_budget(level, g.level, prec)
    with working(work):
        sq = mp.sqrt(level)
        ymin = mp.exp(-spread) / sq
        good = good_coefficients(g, n_max, coprime_to=g.level // level)
        good_num = [(m, mp.mpc(to_complex(c, g.embedding))) for m, c in sorted(good.items())]
        # unknowns whose whole contribution stays below the target accuracy
        # are left out
        smooth = _smooth_numbers(S, terms_needed(ymin, prec + 5))
        unknown_x = smooth[1:]
        unknown_y = smooth
        nunk = len(unknown_x) + len(unknown_y)
        nsamp = int(samples * nunk) + 4
        us = [mp.exp(spread * (2 * mp.mpf(k) / (nsamp - 1) - 1)) / sq for k in range(nsamp)]

        def sums(pw, s, conj):
            tot = mp.mpc(0)
            lim = n_max // s
            for m, a in good_num:
                if m > lim:
                    break
                tot += (mp.conj(a) if conj else a) * pw[s * m]
            return tot

        A = mp.matrix(nsamp, nunk)
        b = mp.matrix(nsamp, 1)
        for i, u in enumerate(us):
            pl = _powers(mp.exp(-2 * mp.pi / (level * u)), n_max)
            pr = _powers(mp.exp(-2 * mp.pi * u), n_max)
            w = level * u * u
            row = [sums(pl, s, False) for s in unknown_x]
            row += [-w * sums(pr, s, True) for s in unknown_y]
            rhs = -sums(pl, 1, False)
            sc = max(abs(v) for v in row)
            for j, v in enumerate(row):
                A[i, j] = v / sc
            b[i] = rhs / sc
        # equilibrate columns: high-order unknowns carry tiny columns
        colscale = []
        for j in range(nunk):
            sc = mp.sqrt(mp.fsum(abs(A[i, j]) ** 2 for i in range(nsamp)))
            colscale.append(sc)
            for i in range(nsamp):
                A[i, j] /= sc
        sol, res = mp.qr_solve(A, b)
        sol = [sol[j] / colscale[j] for j in range(nunk)]
        X = {1: mp.mpc(1)}
        X.update({s: sol[i] for i, s in enumerate(unknown_x)})
        Y = {s: sol[len(unknown_x) + i] for i, s in enumerate(unknown_y)}
        eta = Y[1]

    def weight(s):
        return mp.exp(-2 * mp.pi * s * ymin)

    with working(prec):
        tol = mp.mpf(10) ** (-(prec // 2))
        errs = [abs(abs(eta) - 1)]
        for s in unknown_x:
            errs.append(abs(Y[s] - eta * mp.conj(X[s])) * weight(s))
        # multiplicativity across distinct primes
        for s in unknown_x:
            fac = sympy.factorint(s)
            if len(fac) > 1:
                prod = mp.mpc(1)
                for p, e in fac.items():
                    prod *= X[p ** e]
                errs.append(abs(prod - X[s]) * weight(s))
        consistency = max(errs)
        if consistency > tol:
            raise NotFrickeCompatible(
                f"no level-{level} newform behind this component "
                f"(consistency {mp.nstr(consistency, 3)})", estimate=eta, error=consistency)

    bad = {p: X[p] for p in S if p in X}
    result = None
    if exact:
        # digits actually resolved by the fit, for recognition only; the
        # exact rebuild is then checked at full precision
        acc = min(prec, int(-mp.log10(consistency + mp.mpf(10) ** (-work))) - 6)
        result = _exact_rebuild(g, level, good, bad, X, weight, acc, label)
        if result is not None:
            probe = _fricke_exact(result[0], eta, prec)
            if probe is None:
                result = None
            else:
                eta = probe
    if result is None:
        with working(work):
            bad, eta = _refine_bad(good_num, level, g.char_disc, bad, eta, n_max, work)
            xs = _smooth_values(bad, level, g.char_disc, n_max)
            coeffs = [mp.mpc(0)] * (n_max + 1)
            for s, xv in xs.items():
                for m, a in good_num:
                    if s * m > n_max:
                        break
                    coeffs[s * m] = xv * a
        form = QExpansion(level, g.char_disc, coeffs, label=label)
        with working(prec):
            probe = fricke_probe(form, prec)
        if abs(probe - eta) > mp.mpf(10) ** (-(prec // 2)):
            raise NotFrickeCompatible(f"refined level-{level} form fails the Fricke check",
                                      estimate=probe)
        eta = probe
        exact_bad = {}
    else:
        form, exact_bad = result
    form.meta["eta"] = eta
    return CompletedNewform(form, eta, bad, exact_bad, consistency)


def _smooth_values(bad, level, char_disc, n_max, conj=False):
    """a_s for S-smooth s from a_p, p in S (numeric)."""
    def prime_power(p, k):
        ap = bad[p]
        if level % p == 0:
            return ap ** k
        chi = primitive_character_value(char_disc, p)
        seq = [mp.mpc(1), ap]
        for _ in range(2, k + 1):
            seq.append(ap * seq[-1] - chi * p * seq[-2])
        return seq[k]

    out = {}
    for s in _smooth_numbers(sorted(bad), n_max):
        val = mp.mpc(1)
        for p, e in sympy.factorint(s).items():
            val *= prime_power(p, e)
        out[s] = val
    return out


def _refine_bad(good_num, level, char_disc, bad, eta, n_max, work):
    """Newton refinement of the bad-prime coefficients and eta.

    a_p and conj(a_p) are separate unknowns so the Fricke residual is
    holomorphic in every unknown; one equation per unknown, sampled near
    the symmetric point.
    """
    primes = sorted(bad)
    if not primes:
        return {}, eta
    k = len(primes)
    nunk = 2 * k + 1
    sq = mp.sqrt(level)
    us = [mp.exp(mp.mpf("0.3") * (2 * mp.mpf(i) / max(1, nunk - 1) - 1)) / sq for i in range(nunk)]
    pws = [(_powers(mp.exp(-2 * mp.pi / (level * u)), n_max), _powers(mp.exp(-2 * mp.pi * u), n_max))
           for u in us]
    good_conj = [(m, mp.conj(a)) for m, a in good_num]

    def series(xs, coeffs, pw):
        tot = mp.mpc(0)
        for s, xv in xs.items():
            lim = n_max // s
            for m, a in coeffs:
                if m > lim:
                    break
                tot += xv * a * pw[s * m]
        return tot

    def residuals(*z):
        a = dict(zip(primes, z[:k]))
        ab = dict(zip(primes, z[k:2 * k]))
        et = z[2 * k]
        xa = _smooth_values(a, level, char_disc, n_max)
        xb = _smooth_values(ab, level, char_disc, n_max)
        out = []
        for u, (pl, pr) in zip(us, pws):
            out.append(series(xa, good_num, pl) - et * level * u * u * series(xb, good_conj, pr))
        return out

    x0 = [bad[p] for p in primes] + [mp.conj(bad[p]) for p in primes] + [eta]
    try:
        sol = mp.findroot(residuals, x0, tol=mp.mpf(10) ** (-work + 15), maxsteps=30)
    except (ValueError, ZeroDivisionError) as exc:
        raise NotFrickeCompatible(f"bad-prime refinement did not converge: {exc}") from exc
    if nunk == 1:
        sol = [sol]
    sol = list(sol)
    return dict(zip(primes, sol[:k])), sol[2 * k]


def _fricke_exact(form, eta, prec):
    """Full-precision pseudo-eigenvalue of an exact rebuild, or None."""
    with working(prec):
        try:
            probe = fricke_probe(form, prec)
        except (NotFrickeCompatible, TruncationError):
            return None
        if abs(probe - eta) < mp.mpf(10) ** (-(prec // 2)):
            return probe
        return None


def _exact_rebuild(g, level, good, bad, X, weight, prec, label):
    K = g.field if g.field is not None else RATIONALS
    root = g.embedding if g.embedding is not None else mp.mpf(0)
    exact_bad = {}
    for p, v in bad.items():
        e = recognize_in_field(v, K, root, prec)
        if e is None:
            return None
        exact_bad[p] = e
    n_max = max(good) if good else 1
    T = n_max

    def prime_power(p, k):
        ap = exact_bad[p]
        if level % p == 0:
            return ap ** k if k else K.one()
        chi = primitive_character_value(g.char_disc, p)
        seq = [K.one(), ap]
        for j in range(2, k + 1):
            seq.append(ap * seq[-1] - chi * p * seq[-2])
        return seq[k]

    S = sorted(bad)
    smooth = _smooth_numbers(S, T)
    xs = {}
    for s in smooth:
        val = K.one()
        for p, e in sympy.factorint(s).items():
            val = val * prime_power(p, e)
        xs[s] = val
    # the exact values must reproduce every solved X_s
    with working(prec):
        tol = mp.mpf(10) ** (-(prec // 2))
        for s, v in X.items():
            if s in xs and abs(xs[s].embed(root) - v) * weight(s) > tol:
                return None
    coeffs = [K.zero()] * (T + 1)
    for s in smooth:
        if xs[s].is_zero():
            continue
        for m, a in good.items():
            if s * m > T:
                continue
            coeffs[s * m] = xs[s] * as_element(a, K)
    if K.is_rational:
        coeffs = [c.c[0] for c in coeffs]
        form = QExpansion(level, g.char_disc, coeffs, label=label, field=RATIONALS)
    else:
        form = QExpansion(level, g.char_disc, coeffs, label=label, field=K, embedding=root)
    return form, exact_bad


def recognize_in_field(value, K: NumberField, root, prec: int = 30, max_coeff_bits: int = 40):
    """Exact element of K whose image under x -> root equals value, or None."""
    with working(prec):
        powers = [mp.mpc(root) ** i for i in range(K.degree)]
        vals = [mp.mpc(value)] + powers
        for fold in (mp.pi, mp.e):
            vec = [mp.re(v) + fold * mp.im(v) for v in vals]
            if any(v == 0 for v in vec):
                vec = [v + 0 for v in vec]
            nz = [i for i, v in enumerate(vec) if v != 0]
            if 0 not in nz:
                return K.zero()
            try:
                rel = pslq([vec[i] for i in nz], prec - 5, max_coeff_bits)
            except Exception:
                continue
            if rel is None:
                continue
            full = [0] * len(vec)
            for i, c in zip(nz, rel.coefficients):
                full[i] = c
            if full[0] == 0:
                continue
            elt = K([Fraction(-c, full[0]) for c in full[1:]])
            if abs(elt.embed(root) - value) < mp.mpf(10) ** (-prec + 8) * max(1, abs(value)):
                return elt
    return None


# ---------------------------------------------------------------- curve level


@dataclass
class CurveLDescriptor:
    id: int
    family: str
    minpoly: tuple
    labels: list
    conductor_norm: int | None = None
    field_disc: int | None = None
    w: int | None = None

    @property
    def degree(self) -> int:
        return len(self.minpoly) - 1


def L_curve_at_2(factors: list, prec: int = 30, degree: int | None = None):
    """Product of the factor L-values at 2; the imaginary part must vanish."""
    if not factors:
        raise DataError("no factor forms")
    if degree is not None and len(factors) != degree:
        raise DataError(f"{len(factors)} factors for a degree-{degree} curve")
    with working(prec + 5):
        prod = mp.mpc(1)
        for f in factors:
            prod *= L_at_2(f, prec + 5)
        if abs(mp.im(prod)) > mp.mpf(10) ** (-prec + 8) * max(1, abs(prod)):
            raise AccuracyError(f"L(E,2) has imaginary part {mp.nstr(mp.im(prod), 5)}",
                                estimate=prod)
    return mp.re(prod)


def nth_derivative_at_0(desc: CurveLDescriptor, L_value, prec: int = 30):
    """L^(n)(E, 0) = n! w Norm d_K^2 (2 pi)^(-2n) L(E, 2)."""
    n = desc.degree
    if n < 2:
        raise DomainError("only n >= 2 is in scope")
    if desc.conductor_norm is None or desc.field_disc is None or desc.w is None:
        raise DataError(f"row {desc.id}: conductor data missing")
    with working(prec):
        val = (mp.factorial(n) * desc.w * desc.conductor_norm * desc.field_disc ** 2
               * (2 * mp.pi) ** (-2 * n) * L_value)
    return val


def newform_factors(span: list, levels: list, prec: int = 40, probe_primes=None) -> list:
    """Newforms behind a Hecke-stable theta span, one per eigen-component.

    ``levels`` lists the candidate newform levels (with multiplicity, as in
    the factorisation data); each component is completed at the smallest
    candidate that admits a consistent Fricke relation.  Galois-conjugate
    components are completed once and re-embedded.
    """
    from .theta import eigenform_split
    N = span[0].level
    if probe_primes is not None:
        comps = eigenform_split(span, probe_primes, prec + 10)
    else:
        # CM forms vanish at inert primes, so small probe sets can fail to
        # separate them; widen until they do
        from .theta import independence_rows
        rows = independence_rows(span)
        T = min(f.truncation for f in span)
        coprime = [p for p in sympy.primerange(3, 400) if N % p]
        pool = [p for p in coprime if T // p + 1 >= rows]
        counts = [c for c in (4, 8, 16) if c < len(pool)] + [len(pool)]
        for count in counts:
            try:
                comps = eigenform_split(span, pool[:count], prec + 10)
                break
            except VerificationFailure:
                if count < len(pool):
                    continue
                if len(pool) < len(coprime) and len(pool) < 24:
                    # the truncation cut the pool short; ask for a longer span
                    top = coprime[min(len(coprime) - 1, max(2 * len(pool), 16))]
                    raise TruncationError("probe primes that fit the truncation do not "
                                          "separate the eigenforms", required=top * rows)
                raise
    cands = sorted({lv for lv in levels if N % lv == 0})
    if not cands:
        raise DataError(f"no candidate level divides the span level {N}")
    done = {}
    out = []
    for c in comps:
        key = id(c.coeffs)
        prev = done.get(key)
        if prev is not None and prev.exact:
            form = replace(prev.form, embedding=c.embedding, meta={})
            with working(prec + 10):
                form.meta["eta"] = fricke_probe(form, prec)
            out.append(CompletedNewform(form, form.meta["eta"], prev.bad, prev.exact_bad,
                                        prev.consistency))
            continue
        last = None
        for lv in cands:
            try:
                cf = complete_newform(c, lv, prec)
                break
            except NotFrickeCompatible as exc:
                last = exc
        else:
            raise NotFrickeCompatible(f"no candidate level {cands} fits an eigen-component: {last}")
        done[key] = cf
        out.append(cf)
    got = sorted(cf.form.level for cf in out)
    if len(levels) == len(out) and got != sorted(levels):
        raise VerificationFailure(f"newform levels {got} differ from the expected {sorted(levels)}")
    return out


def L_product_at_2(factors: list, prec: int = 30):
    """prod L(f, 2) over completed factors; the result must be real."""
    return L_curve_at_2([cf.form for cf in factors], prec)
