"""Binary quadratic forms, CM points and the classification of CM parameters.

A CM point [a, b, c] stands for the root tau = (-b + i sqrt(4ac - b^2)) / (2a)
of a tau^2 + b tau + c in the upper half plane.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable

import mpmath as mp

from .errors import DomainError
from .modular import t_P, t_Q
from .numerics import working


@dataclass(frozen=True, order=True)
class CMPoint:
    a: int
    b: int
    c: int

    def __post_init__(self):
        if self.a <= 0:
            raise DomainError(f"a must be positive in {self}")
        if 4 * self.a * self.c - self.b ** 2 <= 0:
            raise DomainError(f"{list(self)} is not positive definite")
        if math.gcd(math.gcd(self.a, self.b), self.c) != 1:
            raise DomainError(f"{list(self)} is not primitive")

    def __iter__(self):
        yield self.a
        yield self.b
        yield self.c

    def __repr__(self):
        return f"[{self.a},{self.b},{self.c}]"

    @property
    def disc(self) -> int:
        return self.b ** 2 - 4 * self.a * self.c

    def embed(self, prec: int = 30):
        with working(prec):
            return mp.mpc(-self.b, mp.sqrt(-self.disc)) / (2 * self.a)

    def act(self, g) -> "CMPoint":
        """The point g*tau for g = ((p, q), (r, s)) in SL2(Z)."""
        (p, q), (r, s) = g
        a, b, c = self
        A = a * s * s - b * s * r + c * r * r
        B = -2 * a * s * q + b * (s * p + q * r) - 2 * c * r * p
        C = a * q * q - b * q * p + c * p * p
        return CMPoint(A, B, C)

    @classmethod
    def parse(cls, text: str) -> "CMPoint":
        parts = [int(x) for x in text.replace("[", "").replace("]", "").split(",")]
        if len(parts) != 3:
            raise DomainError(f"cannot parse CM point {text!r}")
        return cls(*parts)


def _check_disc(D: int):
    if D >= 0 or D % 4 not in (0, 1):
        raise DomainError(f"{D} is not a negative discriminant")


def reduced_forms(D: int) -> list[CMPoint]:
    """Primitive reduced forms of discriminant D (points of the SL2 domain)."""
    _check_disc(D)
    out = []
    amax = math.isqrt(-D // 3)
    for a in range(1, amax + 1):
        for b in range(-a + 1, a + 1):
            if (b * b - D) % (4 * a):
                continue
            c = (b * b - D) // (4 * a)
            if c < a:
                continue
            if c == a and b < 0:
                continue
            if math.gcd(math.gcd(a, b), c) != 1:
                continue
            out.append(CMPoint(a, b, c))
    return out


def class_number(D: int) -> int:
    return len(reduced_forms(D))


# membership in the Gamma0(4) and Gamma0(3) domains; see reduce_to_domain
def in_FP(p: CMPoint) -> bool:
    a, b, c = p
    return -a < b <= a and -4 * c < b <= 4 * c


def in_FQ(p: CMPoint) -> bool:
    a, b, c = p
    return -a < b <= a and -3 * c < b <= 3 * c


def _reduce(p: CMPoint, level: int) -> CMPoint:
    # Ford-domain reduction: translate into the strip, then leave any
    # isometric circle |level*tau +- 1| < 1 (each step raises Im tau)
    for _ in range(100000):
        a, b, c = p
        # translate so that -a < b <= a
        k = -((a - b) // (2 * a))
        if k:
            p = p.act(((1, k), (0, 1)))
            a, b, c = p
        if b > level * c:
            p = p.act(((1, 0), (level, 1)))
        elif b <= -level * c:
            p = p.act(((1, 0), (-level, 1)))
        else:
            return p
    raise RuntimeError("reduction did not terminate")


def reduce_to_FP(p: CMPoint) -> CMPoint:
    """Gamma0(4)-equivalent point in the domain of the P family."""
    return _reduce(p, 4)


def reduce_to_FQ(p: CMPoint) -> CMPoint:
    """Gamma0(3)-equivalent point in the domain of the Q family."""
    return _reduce(p, 3)


COSETS_4 = [((1, 0), (0, 1))] + [((0, -1), (1, k)) for k in range(4)] + [((1, 0), (2, 1))]
COSETS_3 = [((1, 0), (0, 1))] + [((0, -1), (1, k)) for k in range(3)]


def family_info(family: str):
    """(domain reducer, hauptmodul, coset representatives, excluded t)."""
    fam = family.upper()
    if fam == "P":
        return reduce_to_FP, t_P, COSETS_4, (0, 16)
    if fam == "Q":
        return reduce_to_FQ, t_Q, COSETS_3, (0, 27)
    raise DomainError(f"unknown family {family!r}")


def cm_points_in_domain(D: int, family: str) -> list[CMPoint]:
    """All CM points of discriminant D in the family's fundamental domain."""
    reduce, _, cosets, _ = family_info(family)
    pts = set()
    for f in reduced_forms(D):
        for g in cosets:
            pts.add(reduce(f.act(g)))
    return sorted(pts)


@dataclass
class AlgebraicNumber:
    """Integer minimal polynomial (constant term first) and one root."""

    minpoly: tuple
    embedding: mp.mpc

    @property
    def degree(self) -> int:
        return len(self.minpoly) - 1

    def roots(self, prec: int = 30):
        with working(prec):
            return mp.polyroots(list(reversed(self.minpoly)), maxsteps=200, extraprec=4 * prec)

    def residual(self, value, prec: int):
        with working(prec):
            return abs(mp.polyval(list(reversed(self.minpoly)), value))

    def is_real(self) -> bool:
        return abs(mp.im(self.embedding)) < mp.mpf(10) ** (-10) * max(1, abs(self.embedding))


@dataclass
class ClassifiedPoint:
    family: str
    D: int
    cm: CMPoint
    t: AlgebraicNumber

    def to_json(self) -> dict:
        e = self.t.embedding
        return {
            "family": self.family,
            "D": self.D,
            "cm": list(self.cm),
            "minpoly": [int(c) for c in self.t.minpoly],
            "embedding": f"{mp.nstr(mp.re(e), 30)},{mp.nstr(mp.im(e), 30)}",
            "degree": self.t.degree,
        }


@dataclass
class Orbit:
    family: str
    minpoly: tuple
    members: list = field(default_factory=list)  # ClassifiedPoint, canonical order

    @property
    def degree(self) -> int:
        return len(self.minpoly) - 1

    @property
    def kind(self) -> str:
        n = self.degree
        real = all(m.t.is_real() for m in self.members)
        if n == 1:
            return "rational"
        if n == 2:
            return "real quadratic" if real else "imaginary quadratic"
        if n == 3:
            return "cubic"
        return "totally real quartic" if real else "non-totally-real quartic"


def _is_near_rational(z, tol) -> Fraction | None:
    if abs(mp.im(z)) > tol:
        return None
    x = mp.re(z)
    n = int(mp.nint(x))
    if abs(x - n) < tol:
        return Fraction(n)
    # allow small denominators (the values met in practice are integral)
    for d in range(2, 65):
        m = int(mp.nint(x * d))
        if abs(x * d - m) < tol * d:
            return Fraction(m, d)
    return None


def _poly_from_roots(vals):
    coeffs = [mp.mpc(1)]
    for v in vals:
        new = [mp.mpc(0)] * (len(coeffs) + 1)
        for i, c in enumerate(coeffs):
            new[i] += c
            new[i + 1] -= c * v
        coeffs = new
    return coeffs  # leading coefficient first


def _rational_poly(vals, tol):
    coeffs = _poly_from_roots(vals)
    out = []
    for c in coeffs[1:]:
        r = _is_near_rational(c, tol)
        if r is None:
            return None
        out.append(r)
    den = 1
    for r in out:
        den = den * r.denominator // math.gcd(den, r.denominator)
    ints = [den] + [int(r * den) for r in out]
    g = 0
    for x in ints:
        g = math.gcd(g, x)
    ints = [x // g for x in ints]
    return tuple(reversed(ints))  # constant term first


def _orbits_for_disc(D: int, family: str, prec: int):
    """Split the CM values of discriminant D into Galois orbits of degree <= 4.

    Galois conjugates of t at a CM point are values of t at CM points of the
    same discriminant, and conjugates of j(tau) run over the form classes, so
    an orbit of degree k*h takes k points above each reduced form.  Candidate
    orbits are tested by rounding their elementary symmetric functions.
    """
    reduce, hauptmodul, cosets, excluded = family_info(family)
    forms = reduced_forms(D)
    h = len(forms)
    per_class = []
    for f in forms:
        pts = sorted({reduce(f.act(g)) for g in cosets})
        per_class.append(pts)
    allpts = [p for cls in per_class for p in cls]

    # magnitude estimate, then evaluation at sufficient precision
    with working(20):
        rough = {p: t_val for p, t_val in ((p, hauptmodul(p.embed(30), 20)) for p in allpts)}
    mags = sorted((float(mp.log10(max(1, abs(v)))) for v in rough.values()), reverse=True)
    need = int(sum(mags[:4]))
    wprec = max(prec, need + 40)
    values = {}
    with working(wprec):
        for p in allpts:
            values[p] = hauptmodul(p.embed(wprec + 10), wprec)
    tol = mp.mpf(10) ** (-(wprec - need - 15)) * 1
    tol = min(tol, mp.mpf(10) ** -20)

    results = []
    used = set()
    for cls_idx, cls in enumerate(per_class):
        for p in cls:
            if p in used:
                continue
            v = values[p]
            if any(abs(v - e) < mp.mpf(10) ** -20 for e in excluded):
                used.add(p)
                continue
            found = None
            for k in range(1, 5):
                if k % h and h > 1:
                    continue
                if k < h:
                    continue
                per = k // h
                # choose `per` points from each class; p itself from its own class
                choices = []
                for j, other in enumerate(per_class):
                    avail = [x for x in other if x not in used and x != p]
                    if j == cls_idx:
                        choices.append([(p,) + c for c in itertools.combinations(avail, per - 1)])
                    else:
                        choices.append(list(itertools.combinations(avail, per)))
                for combo in itertools.product(*choices):
                    members = [x for part in combo for x in part]
                    vals = [values[x] for x in members]
                    if not _conj_closed(vals):
                        continue
                    with working(wprec):
                        poly = _rational_poly(vals, tol)
                    if poly is not None:
                        found = (members, poly)
                        break
                if found:
                    break
            if found is None:
                continue
            members, poly = found
            used.update(members)
            results.append((members, poly, [values[x] for x in members]))
    return results, values


def _conj_closed(vals) -> bool:
    cs = [complex(v) for v in vals]
    for z in cs:
        scale = max(1.0, abs(z))
        if abs(z.imag) < 1e-9 * scale:
            continue
        if not any(abs(w - z.conjugate()) < 1e-9 * scale for w in cs):
            return False
    return True


def classify(family: str, n: int = 4, prec: int = 60, disc_bound: int | None = None,
             verify: bool = True) -> list[Orbit]:
    """CM parameters t of the family with [Q(t):Q] <= n, grouped into orbits."""
    fam = family.upper()
    family_info(fam)
    if n > 4 and disc_bound is None:
        raise DomainError("degree bound above 4 needs an explicit discriminant bound")
    bound = disc_bound if disc_bound is not None else 1555
    orbits = []
    for absD in range(3, bound + 1):
        D = -absD
        if D % 4 not in (0, 1):
            continue
        h = class_number(D)
        if h > n:
            continue
        found, _ = _orbits_for_disc(D, fam, prec)
        for members, poly, vals in found:
            if len(poly) - 1 > n:
                continue
            pts = []
            for p, v in zip(members, vals):
                pts.append(ClassifiedPoint(fam, D, p, AlgebraicNumber(poly, v)))
            pts.sort(key=lambda cp: (-float(mp.re(cp.t.embedding)), -float(mp.im(cp.t.embedding))))
            if verify:
                _verify_orbit(pts, fam, prec)
            orbits.append(Orbit(fam, poly, pts))
    orbits.sort(key=lambda o: (o.members[0].D, list(o.members[0].cm)))
    return orbits


def _verify_orbit(pts, family, prec):
    _, hauptmodul, _, _ = family_info(family)
    p2 = 2 * prec
    for cp in pts:
        mag = max(1, abs(cp.t.embedding))
        extra = int(mp.log10(mag) * cp.t.degree) + 10
        with working(p2 + extra):
            v = hauptmodul(cp.cm.embed(p2 + extra), p2 + extra)
            res = cp.t.residual(v, p2 + extra)
            scale = sum(abs(mp.mpf(c)) * mag ** i for i, c in enumerate(cp.t.minpoly))
            if res > mp.mpf(10) ** (-p2 + 5) * scale:
                raise DomainError(f"minpoly verification failed for {cp.cm}")
            cp.t.embedding = v


def census(orbits: Iterable[Orbit]) -> dict:
    counts: dict = {}
    for o in orbits:
        counts[o.kind] = counts.get(o.kind, 0) + 1
    return counts
