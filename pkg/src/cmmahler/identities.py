"""Determinant identities between Mahler measures and L-values.

Rows are bundled as JSON lines under ``cmmahler/data``.  A 2x2 row asserts

    a m1^2 - eps b m2^2 = r / pi^4 L(E, 2),

a 4x4 row asserts that the signed determinant below equals r / pi^8 L(E, 2):

    [ sa m1  sb m2  sc m3  sd m4 ]
    [ sb m2  sa m1  sd m4  sc m3 ]      (sx = sqrt(x), entry signs from
    [ sc m3  sd m4  sa m1  sb m2 ]       one of six fixed patterns)
    [ sd m4  sc m3  sb m2  sa m1 ]
"""

from __future__ import annotations

import itertools
import json
import os
import time
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from importlib import resources
from math import isqrt

import mpmath as mp
import sympy

from .errors import (DataError, DomainError, PrecisionExhausted, SpanUnstable, TruncationError,
                     VerificationFailure)
from .lfun import (CurveLDescriptor, L_at_2, L_curve_at_2, derivative_at_0, newform_factors,
                   nth_derivative_at_0, span_truncation_for)
from .mahler import mu, mu_via_ek, nu, nu_branch, nu_via_ek
from .modular import t_P, t_Q
from .numerics import working
from .quadcm import CMPoint, cm_points_in_domain, reduce_to_FP, reduce_to_FQ
from .relations import pslq
from .theta import (decompose, embed_oldform, hecke_closure, sturm_bound, theta_params,
                    theta_series)

# ---------------------------------------------------------------- sign patterns

SIGN_PATTERNS = {
    1: ("++++", "++++", "++--", "++--"),
    2: ("++++", "+--+", "+-+-", "++--"),
    3: ("++++", "+-+-", "++++", "+-+-"),
    4: ("++++", "+-+-", "++--", "+--+"),
    5: ("++++", "+--+", "+--+", "++++"),
    6: ("++++", "++--", "+-+-", "+--+"),
}

# entry (i, k) of the base matrix holds sqrt(coeff[idx]) * m[idx]
_BASE_INDEX = ((0, 1, 2, 3), (1, 0, 3, 2), (2, 3, 0, 1), (3, 2, 1, 0))

MONOMIALS = ("m1^4", "m2^4", "m3^4", "m4^4", "m1^2m2^2", "m1^2m3^2", "m1^2m4^2",
             "m2^2m3^2", "m2^2m4^2", "m3^2m4^2", "m1m2m3m4")

# signs of (a12, a13, a14, a23, a24, a34, a1234) in the expansion
_EXPANSION_SIGNS = {
    1: (-1, 1, 1, 1, 1, -1, -1),
    2: (1, -1, 1, 1, -1, 1, 1),
    3: (1, -1, 1, 1, -1, 1, -1),
    4: (1, 1, -1, -1, 1, 1, 1),
    5: (1, 1, -1, -1, 1, 1, -1),
    6: (-1, -1, -1, -1, -1, -1, -1),
}


@dataclass(frozen=True)
class SignPattern:
    j: int
    matrix: tuple

    @classmethod
    def get(cls, j: int) -> "SignPattern":
        if j not in SIGN_PATTERNS:
            raise DomainError(f"sign pattern must be 1..6, got {j}")
        rows = tuple(tuple(1 if ch == "+" else -1 for ch in row) for row in SIGN_PATTERNS[j])
        return cls(j, rows)


def det2x2(m1, m2, a, b, eps):
    """det [[a m1, b m2], [eps m2, m1]] = a m1^2 - eps b m2^2."""
    return a * m1 * m1 - eps * b * m2 * m2


def det4x4(m, coeffs, pattern) -> mp.mpf:
    """Signed 4x4 determinant of the Mahler entries."""
    if not isinstance(pattern, SignPattern):
        pattern = SignPattern.get(pattern)
    roots = [mp.sqrt(c) for c in coeffs]
    M = mp.matrix(4, 4)
    for i in range(4):
        for k in range(4):
            idx = _BASE_INDEX[i][k]
            M[i, k] = pattern.matrix[i][k] * roots[idx] * m[idx]
    return mp.det(M)


def pattern_expansion(coeffs, j: int) -> tuple:
    """The 11 integer coefficients of det4x4 as a polynomial in m1..m4."""
    a, b, c, d = coeffs
    s = _EXPANSION_SIGNS[j]
    prod = a * b * c * d
    r = isqrt(prod)
    if r * r != prod:
        raise DomainError(f"abcd = {prod} is not a square; expansion is not integral")
    return (a * a, b * b, c * c, d * d,
            2 * s[0] * a * b, 2 * s[1] * a * c, 2 * s[2] * a * d,
            2 * s[3] * b * c, 2 * s[4] * b * d, 2 * s[5] * c * d, 8 * s[6] * r)


def monomial_values(m) -> list:
    m1, m2, m3, m4 = m
    return [m1 ** 4, m2 ** 4, m3 ** 4, m4 ** 4, m1 ** 2 * m2 ** 2, m1 ** 2 * m3 ** 2,
            m1 ** 2 * m4 ** 2, m2 ** 2 * m3 ** 2, m2 ** 2 * m4 ** 2, m3 ** 2 * m4 ** 2,
            m1 * m2 * m3 * m4]


def _squarefree(n: int) -> int:
    out, p = 1, 2
    while p * p <= n:
        while n % (p * p) == 0:
            n //= p * p
        if n % p == 0:
            out *= p
            n //= p
        p += 1
    return out * n


def match_patterns(vector) -> list:
    """(coeffs, j, scale) whose expansion is scale * vector (first 11 entries)."""
    v = [int(x) for x in vector[:11]]
    if any(x <= 0 for x in v[:4]):
        return []
    cores = {_squarefree(x) for x in v[:4]}
    if len(cores) != 1:
        return []
    k = cores.pop()
    coeffs = []
    for x in v[:4]:
        r = isqrt(k * x)
        if r * r != k * x:
            return []
        coeffs.append(r)
    out = []
    for j in SIGN_PATTERNS:
        try:
            exp = pattern_expansion(coeffs, j)
        except DomainError:
            continue
        if all(e == k * x for e, x in zip(exp, v)):
            out.append((tuple(coeffs), j, k))
    return out


# ---------------------------------------------------------------- records


@dataclass
class IdentityRecord:
    id: int
    family: str
    n: int
    cm_points: list
    eps: int | None = None            # 2x2 rows
    pattern: int | None = None        # 4x4 rows
    coeffs: tuple = ()
    r: Fraction = Fraction(0)
    s: Fraction = Fraction(0)
    labels: list = field(default_factory=list)
    modified: list = field(default_factory=list)
    minpoly: tuple = ()

    @property
    def levels(self) -> list:
        return [label_level(lb) for lb in self.labels]


def label_level(label: str) -> int:
    digits = ""
    for ch in label:
        if not ch.isdigit():
            break
        digits += ch
    if not digits:
        raise DataError(f"malformed newform label {label!r}")
    return int(digits)


def data_dir() -> str:
    env = os.environ.get("CMMAHLER_DATA")
    if env:
        return env
    return str(resources.files("cmmahler") / "data")


def _read_jsonl(name: str, directory: str | None = None) -> list:
    path = os.path.join(directory or data_dir(), name)
    if not os.path.exists(path):
        raise DataError(f"missing data file {path}")
    with open(path) as fh:
        return [json.loads(ln) for ln in fh if ln.strip()]


def _reduce(points, family):
    red = reduce_to_FP if family == "P" else reduce_to_FQ
    return [red(CMPoint(*p)) for p in points]


def _record(row) -> IdentityRecord:
    fam = row["family"]
    pts = _reduce(row["points"], fam) if row.get("points") else []
    n = 2 if "eps" in row else 4
    return IdentityRecord(
        id=row["id"], family=fam, n=n, cm_points=pts,
        eps=row.get("eps"), pattern=row.get("j"),
        coeffs=tuple(row["coeffs"]) if "coeffs" in row else (row["a"], row["b"]),
        r=Fraction(row["r"]), s=Fraction(row["s"]), labels=list(row["labels"]),
        modified=list(row.get("modified", [False] * n)),
        minpoly=tuple(row.get("minpoly") or ()))


@lru_cache(maxsize=4)
def load_records(directory: str | None = None) -> dict:
    rows = _read_jsonl("tables1.jsonl", directory) + _read_jsonl("tables34.jsonl", directory)
    return {row["id"]: _record(row) for row in rows}


def get_record(rid: int, directory: str | None = None) -> IdentityRecord:
    recs = load_records(directory)
    if rid not in recs:
        raise DataError(f"no identity #{rid}")
    return recs[rid]


def load_curves(directory: str | None = None) -> dict:
    out = {}
    for row in _read_jsonl("curves.jsonl", directory):
        out[row["id"]] = CurveLDescriptor(row["id"], row["family"], tuple(row["minpoly"]),
                                          list(row["labels"]), row.get("conductor_norm"),
                                          row.get("field_disc"), row.get("w"))
    return out


# ---------------------------------------------------------------- evaluation


def mahler_entry(point: CMPoint, family: str, modified: bool, prec: int, method: str = "ek"):
    """mu or nu at t(point), on the branch the record asks for."""
    with working(prec + 10):
        tau = point.embed(prec + 10)
        t = t_P(tau, prec + 10) if family == "P" else t_Q(tau, prec + 10)
        if family == "Q":
            want = "modified" if modified else "classical"
            if nu_branch(t) != want:
                raise DomainError(f"{point}: record asks for the {want} branch, "
                                  f"t = {mp.nstr(t, 12)} lies on the {nu_branch(t)} one")
        elif modified:
            raise DomainError("the P family has no modified branch")
        if method == "ek":
            return mu_via_ek(point, prec) if family == "P" else nu_via_ek(point, prec)
        if method == "quad":
            return mu(t, prec) if family == "P" else nu(t, prec)
    raise DomainError(f"unknown method {method!r}")


def theta_span(points, family, levels, prec, min_length: int = 0, closure_n: int = 30):
    """Hecke-stable span of the orbit's theta series, long enough to
    complete each factor newform."""
    N = theta_params(points[0], family)[3]
    T = 0
    for lv in set(levels):
        if N % lv:
            raise DataError(f"newform level {lv} does not divide theta level {N}")
        T = max(T, span_truncation_for(lv, prec, lead=N // lv, span_level=N))
    T = max(T, sturm_bound(N) + 16, min_length)
    # room for the closure to scan T_n up to n = closure_n
    length = max(T, closure_n * (sturm_bound(N) + 8))
    for _ in range(6):
        base = [theta_series(p, family, length) for p in points]
        if any(f.level != N for f in base):
            raise DataError("orbit members have different theta levels")
        try:
            span = hecke_closure(base, n_max=closure_n)
        except TruncationError as exc:
            length = max(2 * length, exc.required)
            continue
        got = span[0].truncation
        if got >= T:
            return [f.truncate(T) for f in span]
        # each adjoined T_n image divides the truncation by n; regrow
        length = -(-length * T // got) + 1
    raise TruncationError("Hecke closure keeps outrunning the theta truncation", required=length)


def L_value(points, family, levels, prec: int):
    """L(E, 2) as the product of the completed factor newforms."""
    factors = _factors(points, family, levels, levels, prec)
    with working(prec + 10):
        return L_curve_at_2([cf.form for cf in factors], prec, degree=len(points)), factors


def _factors(points, family, span_levels, levels, prec):
    # the probe primes that separate CM eigenforms can exceed what the
    # first truncation supports; regrow the span when they do
    need, closure_n = 0, 30
    for _ in range(6):
        span = theta_span(points, family, span_levels, prec, min_length=need,
                          closure_n=closure_n)
        try:
            return newform_factors(span, levels, prec)
        except TruncationError as exc:
            if exc.required is None or exc.required <= need:
                raise
            need = exc.required
        except SpanUnstable as exc:
            # an operator beyond the scanned range leaves the span
            if exc.prime <= closure_n or closure_n >= 240:
                raise
            closure_n = 2 * exc.prime
    raise TruncationError("eigenform separation keeps outrunning the span", required=need)


@dataclass
class SturmCertificate:
    """Exact decomposition of each orbit theta into newforms f(d tau)."""

    level: int
    bound: int
    basis: list                 # QExpansions at the theta level
    decompositions: list        # one Decomposition per orbit point

    @property
    def ok(self) -> bool:
        return all(d.ok and d.verified_through >= self.bound for d in self.decompositions)


def oldform_basis(factors, level: int) -> list:
    """f(d tau) for every completed newform f and every d | level / level(f)."""
    basis = []
    for cf in factors:
        f = cf.form
        if not f.is_exact():
            raise VerificationFailure(f"level-{f.level} newform has inexact coefficients")
        for d in sympy.divisors(level // f.level):
            g = embed_oldform(f, d, target_level=level)
            basis.append(g.truncate(min(g.truncation, 4 * sturm_bound(level) + 64)))
    return basis


def sturm_certificate(points, family: str, levels: list, prec: int = 30) -> SturmCertificate:
    """Decompose every orbit theta exactly through the Sturm bound."""
    factors = _factors(points, family, levels, levels, prec)
    N = theta_params(points[0], family)[3]
    B = sturm_bound(N)
    basis = oldform_basis(factors, N)
    T = min(g.truncation for g in basis)
    decs = [decompose(theta_series(p, family, T), basis, bound=B) for p in points]
    return SturmCertificate(N, B, basis, decs)


def candidate_levels(point: CMPoint, family: str, max_index: int = 16) -> list:
    """Newform levels to try for a bare CM point: the levels listed by a
    bundled row containing it, else divisors M of the theta level with
    oldform index N / M <= max_index."""
    for rec in load_records().values():
        if rec.family == family and point in rec.cm_points:
            return sorted(set(rec.levels))
    N = theta_params(point, family)[3]
    return [M for M in sympy.divisors(N) if N // M <= max_index]


def companion_points(point: CMPoint, family: str) -> list:
    """CM points of the same discriminant whose thetas share the level and
    character of ``point``'s; their span is Hecke stable."""
    _, _, D, N = theta_params(point, family)
    disc = point.b ** 2 - 4 * point.a * point.c
    out = [point]
    for q in cm_points_in_domain(disc, family):
        if q != point and theta_params(q, family)[2:] == (D, N):
            out.append(q)
    return out


def theta_L_at_2(point: CMPoint, family: str, prec: int, levels: list | None = None):
    """L(Theta, 2) for one theta series, through its newform decomposition."""
    levels = levels or candidate_levels(point, family)
    factors = _factors(companion_points(point, family), family, levels, levels, prec)
    N = theta_params(point, family)[3]
    B = sturm_bound(N) + 8
    with working(prec + 20):
        Ls = [L_at_2(cf.form, prec + 10) for cf in factors]
        divs = [sympy.divisors(N // cf.form.level) for cf in factors]
        if all(cf.form.is_exact() for cf in factors):
            basis = oldform_basis(factors, N)
            T = min(g.truncation for g in basis)
            dec = decompose(theta_series(point, family, T), basis, bound=sturm_bound(N))
            if not dec.ok:
                raise VerificationFailure(f"theta is not in the span of its newforms "
                                          f"(fails at q^{dec.witness})")
            x = [c.numeric(prec + 20) if hasattr(c, "numeric") else mp.mpf(c.numerator) / c.denominator
                 for c in dec.coefficients]
        else:
            cols = []
            for cf, ds in zip(factors, divs):
                num = cf.form.numeric(prec + 20)
                for d in ds:
                    cols.append([num[n // d] if n % d == 0 else 0 for n in range(1, B + 1)])
            theta = theta_series(point, family, B)
            k = len(cols)
            A = mp.matrix(k, k)
            rhs = mp.matrix(k, 1)
            for a in range(k):
                for b in range(k):
                    A[a, b] = mp.fsum(mp.conj(cols[a][n]) * cols[b][n] for n in range(B))
                rhs[a] = mp.fsum(mp.conj(cols[a][n]) * theta.coeffs[n + 1] for n in range(B))
            sol = mp.lu_solve(A, rhs)
            x = [sol[a] for a in range(k)]
            res = max(abs(mp.fsum(x[a] * cols[a][n] for a in range(k)) - theta.coeffs[n + 1])
                      for n in range(B))
            if res > mp.mpf(10) ** (-prec):
                raise VerificationFailure(f"theta is not in the span of its newforms "
                                          f"(residual {mp.nstr(res, 3)})")
        scales = [L / d ** 2 for L, ds in zip(Ls, divs) for d in ds]
        return mp.fsum(xi * sc for xi, sc in zip(x, scales))


def mahler_via_theta(point: CMPoint, family: str, prec: int = 30, levels: list | None = None):
    """mu or nu at t(point) from L(Theta, 2) and the lattice constant."""
    l, _, _, _ = theta_params(point, family)
    disc = 4 * point.a * point.c - point.b ** 2
    with working(prec + 10):
        L = theta_L_at_2(point, family, prec + 5, levels)
        if family == "P":
            val = 8 * mp.sqrt(disc) / (l * l * mp.pi ** 2) * L
        else:
            t = t_Q(point.embed(prec + 10), prec + 10)
            if nu_branch(t) == "modified":
                sgn = 1 if mp.re(t) > 0 else -1
                val = 27 * mp.sqrt(3 * disc) / (4 * (1 - 3 * sgn) * l * l * mp.pi ** 2) * L
            else:
                val = 27 * mp.sqrt(3 * disc) / (16 * l * l * mp.pi ** 2) * L
        if abs(mp.im(val)) > mp.mpf(10) ** (-prec) * max(1, abs(val)):
            raise VerificationFailure(f"theta route gave a non-real value {mp.nstr(val, 10)}")
    return +mp.re(val)


def _lhs(rec: IdentityRecord, m):
    if rec.n == 2:
        return det2x2(m[0], m[1], rec.coeffs[0], rec.coeffs[1], rec.eps)
    return det4x4(m, rec.coeffs, rec.pattern)


def verify(rid: int, prec: int = 30, method: str = "ek", directory: str | None = None,
           record: IdentityRecord | None = None) -> dict:
    """Evaluate both sides of an identity; pass iff |lhs - rhs| < 10^(-prec+12)."""
    rec = record or get_record(rid, directory)
    if not rec.cm_points:
        raise DataError(f"#{rec.id}: no CM points stored for this orbit")
    if len(rec.cm_points) != rec.n:
        raise DataError(f"#{rec.id}: {len(rec.cm_points)} points for an n = {rec.n} row")
    timings = {}
    t0 = time.perf_counter()
    with working(prec + 10):
        m = [mahler_entry(p, rec.family, fl, prec + 5, method)
             for p, fl in zip(rec.cm_points, rec.modified)]
        timings["mahler"] = time.perf_counter() - t0
        t1 = time.perf_counter()
        L, factors = L_value(rec.cm_points, rec.family, rec.levels, prec + 5)
        timings["lvalue"] = time.perf_counter() - t1
        lhs = _lhs(rec, m)
        rhs = mp.mpf(rec.r.numerator) / rec.r.denominator / mp.pi ** (2 * rec.n) * L
        residual = abs(lhs - rhs)
        digits = float(-mp.log10(residual / abs(rhs))) if residual else float(prec + 10)
        ok = residual < mp.mpf(10) ** (-prec + 12)
    report = {
        "id": rec.id, "family": rec.family, "n": rec.n,
        "residual": mp.nstr(residual, 5), "digits_matched": round(digits, 1),
        "pass": bool(ok), "lhs": mp.nstr(lhs, prec), "rhs": mp.nstr(rhs, prec),
        "L": mp.nstr(L, prec), "timings": {k: round(v, 3) for k, v in timings.items()},
    }
    curves = _curves_or_empty(directory)
    desc = curves.get(rec.id)
    if desc is not None and desc.conductor_norm is not None:
        with working(prec + 10):
            deriv = nth_derivative_at_0(desc, L, prec)
            s_val = mp.mpf(rec.s.numerator) / rec.s.denominator
            s_res = abs(s_val * deriv - rhs)
            report["s_residual"] = mp.nstr(s_res, 5)
            report["pass"] = report["pass"] and bool(s_res < mp.mpf(10) ** (-prec + 12))
    return report


def _curves_or_empty(directory):
    try:
        return load_curves(directory)
    except DataError:
        return {}


def integrality(rec: IdentityRecord) -> Fraction:
    """2^(2n) r / (n! s); a positive integer when the row is consistent."""
    fact = 2 if rec.n == 2 else 24
    return Fraction(2 ** (2 * rec.n)) * rec.r / (fact * rec.s)


# ---------------------------------------------------------------- discovery


@dataclass
class Candidate:
    n: int
    relation: tuple          # PSLQ output, normalised so the first entry is positive
    eps: int | None = None
    coeffs: tuple = ()
    pattern: int | None = None
    r: Fraction | None = None
    matches: list = field(default_factory=list)


def discover_from_values(m, L, prec: int) -> Candidate:
    """PSLQ on the squared/quartic Mahler monomials and pi^(-2n) L."""
    n = len(m)
    with working(prec):
        if n == 2:
            vec = [m[0] ** 2, m[1] ** 2, L / mp.pi ** 4]
        elif n == 4:
            vec = monomial_values(m) + [L / mp.pi ** 8]
        else:
            raise DomainError("discovery handles n = 2 and n = 4")
        rel = pslq(vec, prec, max_coeff_bits=int(prec * 3.32 / 2))
    if rel is None:
        raise VerificationFailure("no relation with small coefficients")
    c = list(rel.coefficients)
    if c[0] < 0:
        c = [-x for x in c]
    cand = Candidate(n, tuple(c))
    if n == 2:
        a, neg_eb, neg_r = c
        if a <= 0 or neg_eb == 0:
            return cand
        cand.eps = 1 if neg_eb < 0 else -1
        cand.coeffs = (a, abs(neg_eb))
        cand.r = Fraction(-neg_r)
        return cand
    cand.matches = match_patterns(c)
    if cand.matches:
        coeffs, j, k = cand.matches[0]
        cand.coeffs, cand.pattern = coeffs, j
        cand.r = Fraction(-c[-1] * k)
    return cand


def discover(points, family: str, levels: list, prec: int = 50, modified=None,
             method: str = "ek") -> Candidate:
    """Recover the identity for an ordered orbit from high-precision values."""
    n = len(points)
    if modified is None:
        modified = [False] * n
        if family == "Q":
            modified = [_is_modified(p, prec) for p in points]
    with working(prec + 10):
        m = [mahler_entry(p, family, fl, prec + 5, method) for p, fl in zip(points, modified)]
        L, _ = L_value(points, family, levels, prec + 5)
        return discover_from_values(m, L, prec)


def _is_modified(point: CMPoint, prec: int) -> bool:
    with working(30):
        return nu_branch(t_Q(point.embed(30), 30)) == "modified"


def order_orbit(points, family, rec: IdentityRecord, m, L, prec: int):
    """Permutations of the orbit under which the 4x4 row holds."""
    out = []
    with working(prec):
        rhs = mp.mpf(rec.r.numerator) / rec.r.denominator / mp.pi ** (2 * rec.n) * L
        tol = mp.mpf(10) ** (-prec + 12)
        for perm in itertools.permutations(range(len(points))):
            mm = [m[i] for i in perm]
            if abs(_lhs(rec, mm) - rhs) < tol:
                out.append(perm)
    return out


# ---------------------------------------------------------------- linear identities


@dataclass
class LinearIdentity:
    id: str
    family: str
    point: CMPoint
    orbit: list
    labels: list
    assignment: list          # canonical component index per label
    coefficients: list        # complex rationals as (re, im, sqrt_radicand) triples
    modified: bool = False


def _complex_coeff(spec):
    re, im, rad = Fraction(spec[0]), Fraction(spec[1]), spec[2]
    return mp.mpf(re.numerator) / re.denominator + 1j * (mp.mpf(im.numerator) / im.denominator) * mp.sqrt(rad)


def load_linear(directory: str | None = None) -> dict:
    out = {}
    for row in _read_jsonl("linear_ids.jsonl", directory):
        fam = row["family"]
        out[row["id"]] = LinearIdentity(
            row["id"], fam, CMPoint(*row["point"]),
            [CMPoint(*p) for p in row["orbit"]], row["labels"], row.get("assignment", []),
            row["coefficients"], row.get("modified", False))
    return out


def canonical_order(factors) -> list:
    """Deterministic ordering of completed factors: by level, then coefficients."""
    def key(cf):
        nums = cf.form.numeric(20)[1:40]
        return (cf.form.level, tuple((round(float(mp.re(v)), 6), round(float(mp.im(v)), 6))
                                     for v in nums))
    return sorted(factors, key=key)


def linear_terms(lid: LinearIdentity, prec: int):
    levels = [label_level(lb) for lb in lid.labels]
    span_levels = levels if len(lid.labels) == len(lid.orbit) else _levels_padded(lid)
    factors = canonical_order(_factors(lid.orbit, lid.family, span_levels, levels, prec))
    with working(prec + 10):
        derivs = [derivative_at_0(cf.form, prec) for cf in factors]
    return factors, derivs


def _levels_padded(lid):
    return [label_level(lb) for lb in lid.labels]


def verify_linear(key: str, prec: int = 30, directory: str | None = None,
                  record: LinearIdentity | None = None) -> dict:
    lid = record or load_linear(directory).get(key)
    if lid is None:
        raise DataError(f"no linear identity {key!r}")
    if len(lid.assignment) != len(lid.labels):
        raise DataError(f"{key}: label assignment missing; run the discovery step")
    t0 = time.perf_counter()
    with working(prec + 10):
        factors, derivs = linear_terms(lid, prec + 5)
        rhs = mp.mpc(0)
        for spec, idx in zip(lid.coefficients, lid.assignment):
            rhs += _complex_coeff(spec) * derivs[idx]
        tau = lid.point.embed(prec + 10)
        if lid.family == "P":
            lhs = mu(t_P(tau, prec + 10), prec + 5)
        else:
            lhs = nu(t_Q(tau, prec + 10), prec + 5)
        residual = abs(lhs - rhs)
        ok = residual < mp.mpf(10) ** (-prec + 12)
    return {"id": key, "residual": mp.nstr(residual, 5), "pass": bool(ok),
            "lhs": mp.nstr(lhs, prec), "rhs": mp.nstr(mp.re(rhs), prec),
            "timings": {"total": round(time.perf_counter() - t0, 3)}}


def assign_labels(lid: LinearIdentity, prec: int = 30):
    """All label -> component assignments (respecting levels) that satisfy the identity."""
    factors, derivs = linear_terms(lid, prec + 5)
    levels = [label_level(lb) for lb in lid.labels]
    with working(prec + 10):
        tau = lid.point.embed(prec + 10)
        lhs = mu(t_P(tau, prec + 10), prec) if lid.family == "P" else nu(t_Q(tau, prec + 10), prec)
        found = []
        for perm in itertools.permutations(range(len(factors)), len(levels)):
            if any(factors[i].form.level != lv for i, lv in zip(perm, levels)):
                continue
            val = sum((_complex_coeff(sp) * derivs[i] for sp, i in zip(lid.coefficients, perm)),
                      mp.mpc(0))
            if abs(val - lhs) < mp.mpf(10) ** (-prec + 12):
                found.append(list(perm))
    return found
