"""Weight-2 theta series attached to CM points, and q-expansion algebra.

The two lattice sums are

    P:  sum chi_{-4}(n) (2bm + an)  q^{(16cm^2 + 4bmn + an^2)/l}
    Q:  sum chi_{-3}(n) (3bm + 2an) q^{(9cm^2 + 3bmn + an^2)/l}

over (m, n) in Z^2.  Everything here is exact: theta coefficients are
integers, Hecke matrices on a theta span are rational, and eigenforms live
in a number field handled by ``numberfield``.
"""

from __future__ import annotations

from dataclasses import dataclass, replace
from dataclasses import field as dc_field
from fractions import Fraction
from math import gcd, isqrt

import mpmath as mp
import sympy
from sympy.functions.combinatorial.numbers import kronecker_symbol

from .errors import (DataError, DomainError, RankError, SpanUnstable, TruncationError,
                     VerificationFailure)
from .numberfield import RATIONALS, NFElement, NumberField, as_element, to_complex
from .quadcm import CMPoint, in_FP, in_FQ


# ---------------------------------------------------------------- q-expansions


@dataclass
class QExpansion:
    """a_0 + a_1 q + ... + a_T q^T for a weight-2 form on Gamma0(N) with (D/.).

    Coefficients are ints/Fractions, NFElements of ``field`` (exact), or
    mpmath numbers.  When the coefficients lie in a number field,
    ``embedding`` is the complex image of its generator that fixes which
    conjugate form this is.
    """

    level: int
    char_disc: int
    coeffs: list
    label: str = ""
    field: NumberField | None = None
    embedding: object = None
    weight: int = 2
    meta: dict = dc_field(default_factory=dict)

    @property
    def truncation(self) -> int:
        return len(self.coeffs) - 1

    def __getitem__(self, n):
        return self.coeffs[n]

    def is_exact(self) -> bool:
        return all(isinstance(c, (int, Fraction, NFElement)) for c in self.coeffs)

    def truncate(self, T: int) -> "QExpansion":
        if T > self.truncation:
            raise TruncationError(f"need {T} coefficients, have {self.truncation}", required=T)
        return replace(self, coeffs=self.coeffs[: T + 1])

    def _combine(self, other, sign):
        T = min(self.truncation, other.truncation)
        fld = self.field if self.field is not None else other.field
        emb = self.embedding if self.embedding is not None else other.embedding
        return QExpansion(self.level, self.char_disc,
                          [self.coeffs[n] + sign * other.coeffs[n] for n in range(T + 1)],
                          field=fld, embedding=emb)

    def __add__(self, other):
        return self._combine(other, 1)

    def __sub__(self, other):
        return self._combine(other, -1)

    def scale(self, c) -> "QExpansion":
        fld = c.field if isinstance(c, NFElement) and not c.field.is_rational else self.field
        return replace(self, coeffs=[c * a for a in self.coeffs], field=fld, label="")

    def numeric(self, prec: int = 30) -> list:
        """Coefficients as complex numbers under the chosen embedding."""
        with mp.workdps(prec + 10):
            return [to_complex(c, self.embedding) for c in self.coeffs]

    def conjugate_numeric(self, prec: int = 30) -> list:
        return [mp.conj(c) for c in self.numeric(prec)]

    def leading_index(self) -> int | None:
        for n, c in enumerate(self.coeffs):
            if c != 0:
                return n
        return None


def _chi4(n):
    return (0, 1, 0, -1)[n % 4]


def _chi3(n):
    return (0, 1, -1)[n % 3]


def kronecker(D: int, n: int) -> int:
    return int(kronecker_symbol(D, n))


def character_value(f: QExpansion, p: int) -> int:
    """(D/p) for p coprime to the level, else 0."""
    if f.level % p == 0:
        return 0
    return kronecker(f.char_disc, p)


# ---------------------------------------------------------------- theta data


def _family_data(tau0: CMPoint, family: str):
    a, b, c = tau0.a, tau0.b, tau0.c
    if family == "P":
        if not in_FP(tau0):
            raise DomainError(f"{tau0} is not in the Gamma0(4) domain")
        l = gcd(gcd(a, 4 * b), 16 * c)
        A = ((32 * c // l, 16 * b // l), (16 * b // l, 32 * a // l))
        D = 64 * (4 * a * c - b * b) // (l * l)
        # exponent form (16c, 4b, a) in (m, n), weight 2bm + an, chi_{-4}(n)
        shape = (16 * c, 4 * b, a, 2 * b, a, _chi4)
    elif family == "Q":
        if not in_FQ(tau0):
            raise DomainError(f"{tau0} is not in the Gamma0(3) domain")
        l = gcd(gcd(a, 3 * b), 9 * c)
        A = ((18 * c // l, 9 * b // l), (9 * b // l, 18 * a // l))
        D = 27 * (4 * a * c - b * b) // (l * l)
        shape = (9 * c, 3 * b, a, 3 * b, 2 * a, _chi3)
    else:
        raise DomainError(f"unknown family {family!r}")
    return l, A, D, shape


def _min_even_level(A) -> int:
    (p, q), (_, r) = A
    det = p * r - q * q
    N = 1
    while True:
        # N * A^{-1} = (N / det) [[r, -q], [-q, p]]
        if (N * r) % (2 * det) == 0 and (N * p) % (2 * det) == 0 and (N * q) % det == 0:
            return N
        N += 1


def theta_params(tau0: CMPoint, family: str):
    """(l, A, D, N): scaling gcd, Gram matrix, character discriminant, level."""
    l, A, D, _ = _family_data(tau0, family)
    return l, A, D, _min_even_level(A)


def theta_series(tau0: CMPoint, family: str, max_exponent: int) -> QExpansion:
    """Exact integer coefficients of the theta series through q^max_exponent."""
    if max_exponent < 1:
        raise DomainError("max_exponent must be >= 1")
    l, A, D, shape = _family_data(tau0, family)
    N = _min_even_level(A)
    fa, fb, fc, wm, wn, chi = shape
    X = max_exponent * l
    coeffs = [0] * (max_exponent + 1)
    disc = 4 * fa * fc - fb * fb
    # fa m^2 + fb m n + fc n^2 <= X forces n^2 <= 4 fa X / disc
    nmax = isqrt(4 * fa * X // disc) + 1
    for n in range(-nmax, nmax + 1):
        ch = chi(n)
        if not ch:
            continue
        # m-range from fa m^2 + fb n m + (fc n^2 - X) <= 0
        dd = fb * fb * n * n - 4 * fa * (fc * n * n - X)
        if dd < 0:
            continue
        s = isqrt(dd)
        lo = (-fb * n - s) // (2 * fa) - 1
        hi = (-fb * n + s) // (2 * fa) + 1
        for m in range(lo, hi + 1):
            v = fa * m * m + fb * m * n + fc * n * n
            if v > X:
                continue
            w = wm * m + wn * n
            if w:
                coeffs[v // l] += ch * w
    return QExpansion(N, D, coeffs, label=f"Theta_{family}{tau0}")


def sturm_bound(N: int, weight: int = 2) -> int:
    """floor(k [SL2(Z) : Gamma0(N)] / 12)."""
    if N < 1:
        raise DomainError("level must be positive")
    index = Fraction(N)
    for p in sympy.primefactors(N):
        index *= Fraction(p + 1, p)
    return int(weight * index / 12)


def embed_oldform(f: QExpansion, d: int, target_level: int | None = None) -> QExpansion:
    """f(d tau): coefficient n -> a_{n/d}."""
    if d < 1:
        raise DomainError("d must be positive")
    level = f.level * d if target_level is None else target_level
    if level % (f.level * d):
        raise DomainError(f"{d} * {f.level} does not divide {level}")
    T = f.truncation * d
    zero = 0 * f.coeffs[0] if f.coeffs else 0
    coeffs = [zero] * (T + 1)
    for n in range(f.truncation + 1):
        coeffs[n * d] = f.coeffs[n]
    return replace(f, level=level, coeffs=coeffs,
                   label=f"{f.label}({d}tau)" if f.label else "")


# ---------------------------------------------------------------- Hecke operators


def hecke_Tp(f: QExpansion, p: int) -> QExpansion:
    """a_n -> a_{np} + chi(p) p a_{n/p} on weight 2."""
    if not sympy.isprime(p):
        raise DomainError(f"{p} is not prime")
    T = f.truncation // p
    if T < 1:
        raise TruncationError(f"T_{p} needs at least {p} coefficients", required=p)
    chi = character_value(f, p)
    out = []
    for n in range(T + 1):
        v = f.coeffs[n * p]
        if chi and n % p == 0:
            v = v + chi * p * f.coeffs[n // p]
        out.append(v)
    return replace(f, coeffs=out, label="")


# ---------------------------------------------------------------- linear algebra


def _rref(rows, ncols):
    """Reduced row echelon form over a field; returns (rows, pivot columns)."""
    m = [list(r) for r in rows]
    pivots = []
    r = 0
    for col in range(ncols):
        piv = next((i for i in range(r, len(m)) if m[i][col] != 0), None)
        if piv is None:
            continue
        m[r], m[piv] = m[piv], m[r]
        inv = 1 / m[r][col] if not isinstance(m[r][col], int) else Fraction(1, m[r][col])
        m[r] = [v * inv for v in m[r]]
        for i in range(len(m)):
            if i != r and m[i][col] != 0:
                fac = m[i][col]
                m[i] = [a - fac * b for a, b in zip(m[i], m[r])]
        pivots.append(col)
        r += 1
        if r == len(m):
            break
    return m[:r], pivots


def _solve_exact(columns, target, nrows):
    """Solve sum x_j columns[j] = target (rows 0..nrows-1) exactly.

    Returns (x, rank, first_bad_row) where first_bad_row is None on success.
    """
    k = len(columns)
    aug = [[columns[j][i] for j in range(k)] + [target[i]] for i in range(nrows)]
    red, piv = _rref(aug, k + 1)
    if k in piv:
        # inconsistent: find the first row that breaks the system
        return None, len(piv) - 1, None
    if len(piv) < k:
        return None, len(piv), None
    x = [Fraction(0)] * k
    for row, col in zip(red, piv):
        x[col] = row[k]
    return x, k, None


# ---------------------------------------------------------------- decomposition


@dataclass
class Decomposition:
    coefficients: list          # one entry per basis element (exact or numeric)
    verified_through: int
    witness: int | None = None  # first exponent where the identity fails

    @property
    def ok(self) -> bool:
        return self.witness is None


def _orbit_groups(basis):
    """Group Galois conjugates (same exact coefficients, same field)."""
    groups = []
    for i, f in enumerate(basis):
        key = None
        if f.field is not None and not f.field.is_rational:
            key = (f.field, tuple(f.coeffs[: min(40, len(f.coeffs))]))
        for g in groups:
            if key is not None and g["key"] == key and len(g["members"]) < f.field.degree:
                g["members"].append(i)
                break
        else:
            groups.append({"key": key, "members": [i], "field": f.field})
    return groups


def decompose(target: QExpansion, basis: list, bound: int | None = None, margin: int = 8):
    """Exact coefficients c with target = sum c_i basis_i.

    Galois-conjugate basis members are handled together: their combined
    contribution is Tr_{K/Q}(c f) with c in K, which makes the linear system
    rational.  Solved on the first bound + margin exponents, then checked
    on every common exponent.  Rank deficiency raises RankError; an
    inconsistent system returns a Decomposition with the witness exponent.
    """
    if not basis:
        raise DomainError("empty basis")
    for f in basis:
        if f.level != target.level:
            raise DomainError(f"level mismatch: {f.level} vs {target.level}")
    if bound is None:
        bound = sturm_bound(target.level)
    T = min([target.truncation] + [f.truncation for f in basis])
    rows = min(T, bound + margin)
    if rows < bound:
        raise TruncationError(f"need coefficients through {bound}, have {T}", required=bound)
    groups = _orbit_groups(basis)
    # rational unknowns: for an orbit over K of degree d, the coordinates of c
    columns, layout = [], []
    for g in groups:
        f0 = basis[g["members"][0]]
        K = g["field"]
        if K is None or K.is_rational or len(g["members"]) == 1 and (K is None or K.is_rational):
            col = [Fraction(_rat(f0.coeffs[n])) for n in range(T + 1)]
            columns.append(col)
            layout.append((g, None))
            continue
        if len(g["members"]) != K.degree:
            raise DataError(f"incomplete Galois orbit in basis for {f0.label}")
        for j in range(K.degree):
            e = K([0] * j + [1])
            col = [(e * as_element(f0.coeffs[n], K)).trace() for n in range(T + 1)]
            columns.append(col)
            layout.append((g, j))
    tgt = [Fraction(_rat(target.coeffs[n])) for n in range(T + 1)]
    x, rank, _ = _solve_exact([c[: rows + 1] for c in columns], tgt[: rows + 1], rows + 1)
    if x is None:
        if rank < len(columns):
            # distinguish rank deficiency from inconsistency
            _, piv = _rref([[c[i] for c in columns] for i in range(rows + 1)], len(columns))
            if len(piv) < len(columns):
                raise RankError(f"basis has rank {len(piv)} < {len(columns)} below exponent {rows}")
        witness = _first_mismatch_lstsq(columns, tgt, rows)
        return Decomposition(None, rows, witness)
    # full check on every available exponent
    for n in range(T + 1):
        s = sum((xi * col[n] for xi, col in zip(x, columns)), Fraction(0))
        if s != tgt[n]:
            return Decomposition(None, n - 1, n)
    coeffs = [None] * len(basis)
    k = 0
    for g in groups:
        K = g["field"]
        if K is None or K.is_rational or len(g["members"]) == 1:
            coeffs[g["members"][0]] = x[k]
            k += 1
            continue
        c = K(x[k: k + K.degree])
        k += K.degree
        for i in g["members"]:
            coeffs[i] = ConjugateCoefficient(c, basis[i].embedding)
    return Decomposition(coeffs, T)


def _first_mismatch_lstsq(columns, tgt, rows):
    # exponent at which the prefix system first becomes inconsistent
    for r in range(rows + 1):
        aug = [[c[i] for c in columns] + [tgt[i]] for i in range(r + 1)]
        _, piv = _rref(aug, len(columns) + 1)
        if len(columns) in piv:
            return r
    return rows


def _rat(v):
    if isinstance(v, NFElement):
        if not v.is_rational():
            raise DomainError("expected a rational coefficient")
        return v.c[0]
    return v


@dataclass(frozen=True)
class ConjugateCoefficient:
    """An exact coefficient c in K together with the embedding it is read in."""

    value: NFElement
    embedding: object

    def numeric(self, prec: int = 30):
        with mp.workdps(prec + 10):
            return self.value.embed(self.embedding)

    def __repr__(self):
        return f"{self.value} @ {mp.nstr(self.embedding, 8)}"


def reconstruct(coeffs, basis) -> list:
    """sum c_i basis_i, exactly; conjugate groups contribute traces."""
    groups = _orbit_groups(basis)
    T = min(f.truncation for f in basis)
    out = [Fraction(0)] * (T + 1)
    for g in groups:
        members = g["members"]
        K = g["field"]
        if K is None or K.is_rational or len(members) == 1:
            c = coeffs[members[0]]
            f = basis[members[0]]
            for n in range(T + 1):
                out[n] += c * _rat(f.coeffs[n])
            continue
        c = coeffs[members[0]].value
        f = basis[members[0]]
        for n in range(T + 1):
            out[n] += (c * as_element(f.coeffs[n], K)).trace()
    return out


# ---------------------------------------------------------------- eigenforms


def _span_coordinates(vectors, T):
    """Echelon data to read coordinates of a vector in span(vectors)."""
    red, piv = _rref([[Fraction(v) for v in vec[: T + 1]] for vec in vectors], T + 1)
    if len(piv) < len(vectors):
        raise RankError("span vectors are linearly dependent")
    return red, piv


def _coords_in_span(vec, vectors, T, diag_prime):
    cols = [[Fraction(v) for v in w[: T + 1]] for w in vectors]
    x, rank, _ = _solve_exact(cols, [Fraction(v) for v in vec[: T + 1]], T + 1)
    if x is None:
        raise SpanUnstable(f"span is not stable under T_{diag_prime}", prime=diag_prime)
    return x


def independence_rows(span: list) -> int:
    """Fewest leading exponents on which the span members are independent."""
    T = min(f.truncation for f in span)
    _, piv = _rref([[Fraction(v) for v in f.coeffs[: T + 1]] for f in span], T + 1)
    if len(piv) < len(span):
        raise RankError("span vectors are linearly dependent")
    return piv[-1] + 1 if piv else 0


def hecke_matrix(span: list, p: int):
    """Matrix of T_p on span (columns = images), checked on every exponent."""
    images = [hecke_Tp(f, p) for f in span]
    T = images[0].truncation
    R = independence_rows(span)
    if T + 1 < R:
        raise TruncationError(f"T_{p} images are too short to read coordinates",
                              required=p * R)
    cols = [_coords_in_span(img.coeffs, [f.coeffs for f in span], T, p) for img in images]
    k = len(span)
    return [[cols[j][i] for j in range(k)] for i in range(k)]


def hecke_Tn(f: QExpansion, n: int) -> QExpansion:
    """T_n for n coprime to the level: a_k -> sum_{d | (n, k)} chi(d) d a_{nk/d^2}."""
    if gcd(n, f.level) != 1:
        raise DomainError(f"T_{n} needs n coprime to the level {f.level}")
    T = f.truncation // n
    if T < 1:
        raise TruncationError(f"T_{n} needs at least {n} coefficients", required=n)
    divs = sympy.divisors(n)
    chis = {d: kronecker(f.char_disc, d) for d in divs}
    out = []
    for k in range(T + 1):
        v = 0
        for d in divs:
            if k % d == 0:
                v = v + chis[d] * d * f.coeffs[n * k // (d * d)]
        out.append(v)
    return replace(f, coeffs=out, label="")


def _in_span(vec, vectors, T):
    if not vectors:
        return not any(vec[: T + 1])
    k = len(vectors)
    aug = [[Fraction(w[i]) for w in vectors] + [Fraction(vec[i])] for i in range(T + 1)]
    _, piv = _rref(aug, k + 1)
    return k not in piv


def independent_subset(span: list) -> list:
    """Drop members that are combinations of earlier ones (exact through
    the Sturm bound)."""
    out = []
    B = sturm_bound(span[0].level) + 8
    for f in span:
        T = min([f.truncation, B] + [g.truncation for g in out])
        if not _in_span(f.coeffs, [g.coeffs for g in out], T):
            out.append(f)
    return out


def hecke_closure(span: list, n_max: int = 30, max_dim: int = 24) -> list:
    """Hecke module generated by ``span``: adjoin T_n of the generators for
    n <= n_max coprime to the level.

    Membership is decided through the Sturm bound, which is exact for
    forms of the span's level and character.  An image T_n f only has
    truncation // n coefficients, so adding one shortens the whole span,
    and only n with truncation // n past the Sturm bound are scanned.
    Stability under the remaining operators is checked later, by
    ``hecke_matrix``.
    """
    base = independent_subset(span)
    vecs = list(base)
    N = base[0].level
    B = sturm_bound(N) + 8
    n_top = min(n_max, min(f.truncation for f in base) // B)
    if n_top < 2:
        raise TruncationError(f"closure needs {2 * B} coefficients", required=2 * B)
    for n in range(2, n_top + 1):
        if gcd(n, N) != 1:
            continue
        for f in base:
            img = hecke_Tn(f, n)
            if not _in_span(img.coeffs, [g.coeffs for g in vecs], B):
                T = min(img.truncation, vecs[0].truncation)
                vecs = [g.truncate(T) for g in vecs] + [img.truncate(T)]
                if len(vecs) > max_dim:
                    raise VerificationFailure(f"Hecke closure exceeds dimension {max_dim}")
    return vecs


def _charpoly(M):
    x = sympy.Symbol("x")
    mat = sympy.Matrix([[sympy.Rational(v.numerator, v.denominator) for v in row] for row in M])
    return mat.charpoly(x).as_expr(), x


def _nullspace_over(K: NumberField, M, theta: NFElement):
    k = len(M)
    rows = [[as_element(M[i][j], K) - (theta if i == j else 0) for j in range(k)] for i in range(k)]
    red, piv = _rref(rows, k)
    free = [j for j in range(k) if j not in piv]
    if len(free) != 1:
        raise VerificationFailure(f"eigenspace has dimension {len(free)}")
    fj = free[0]
    v = [K.zero() for _ in range(k)]
    v[fj] = K.one()
    for row, col in zip(red, piv):
        v[col] = -row[fj]
    return v


def eigenform_split(span: list, probe_primes: list, prec: int = 40) -> list:
    """Simultaneous Hecke eigenvectors of a Hecke-stable span.

    Returns one QExpansion per complex embedding; conjugates share their
    exact coefficients (over the field cut out by an irreducible factor of
    the characteristic polynomial) and differ in ``embedding``.  Each form
    is scaled so its first nonzero coefficient is 1.
    """
    if not span:
        return []
    N, D = span[0].level, span[0].char_disc
    for f in span:
        if (f.level, f.char_disc) != (N, D):
            raise DomainError("span members must share level and character")
    good = [p for p in probe_primes if N % p]
    if not good:
        raise DomainError("need probe primes coprime to the level")
    mats = {p: hecke_matrix(span, p) for p in good}
    k = len(span)
    if k == 1:
        f = span[0]
        lead = f.coeffs[f.leading_index()]
        return [replace(f, coeffs=[Fraction(c) / lead for c in f.coeffs], field=RATIONALS)]
    # a combination of the T_p with squarefree characteristic polynomial
    weights_list = [[1] * len(good)] + [[(i * 7 + j * 3) % 11 + 1 for j in range(len(good))]
                                        for i in range(1, 40)]
    for weights in weights_list:
        M = [[sum(w * mats[p][i][j] for w, p in zip(weights, good)) for j in range(k)]
             for i in range(k)]
        poly, x = _charpoly(M)
        if sympy.degree(sympy.gcd(poly, sympy.diff(poly, x)), x) == 0:
            break
    else:
        raise VerificationFailure(
            f"probe primes {good} do not separate the eigenforms (repeated eigenvalues)")
    _, factors = sympy.factor_list(poly, x)
    out = []
    for fac, _mult in factors:
        coeffs = [sympy.Rational(c) for c in reversed(sympy.Poly(fac, x).all_coeffs())]
        K = NumberField([Fraction(int(c.p), int(c.q)) for c in coeffs])
        theta = K.gen()
        w = _nullspace_over(K, M, theta)
        T = span[0].truncation
        g = [sum((w[i] * as_element(span[i].coeffs[n], K) for i in range(k)), K.zero())
             for n in range(T + 1)]
        lead_n = next(n for n, c in enumerate(g) if not c.is_zero())
        inv = g[lead_n].inverse()
        g = [c * inv for c in g]
        if K.is_rational:
            g = [c.c[0] for c in g]
            out.append(QExpansion(N, D, g, field=RATIONALS, meta={"lead": lead_n}))
            continue
        for root in K.roots(prec):
            out.append(QExpansion(N, D, g, field=K, embedding=root, meta={"lead": lead_n}))
    return out


def eigenvalue(f: QExpansion, m: int):
    """a_{m * lead} / a_lead: the T_m eigenvalue for m coprime to the level."""
    lead = f.leading_index()
    if lead * m > f.truncation:
        raise TruncationError(f"need coefficient {lead * m}", required=lead * m)
    return f.coeffs[lead * m] / f.coeffs[lead] if not isinstance(f.coeffs[lead], int) \
        else Fraction(f.coeffs[lead * m]) / f.coeffs[lead] if isinstance(f.coeffs[lead * m], int) \
        else f.coeffs[lead * m] * Fraction(1, f.coeffs[lead])


# ---------------------------------------------------------------- text format


def _format_coeff(c, root, digits):
    if isinstance(c, int):
        return str(c)
    if isinstance(c, Fraction):
        return str(c)
    if isinstance(c, NFElement) and c.is_rational():
        return str(c.c[0])
    with mp.workdps(digits + 10):
        v = mp.mpc(to_complex(c, root))
        return f"{mp.nstr(mp.re(v), digits)},{mp.nstr(mp.im(v), digits)}"


def dumps(f: QExpansion, digits: int = 40) -> str:
    lines = [f"{f.label or 'form'} {f.level} {f.weight} {f.char_disc}"]
    for n in range(1, f.truncation + 1):
        c = f.coeffs[n]
        if c == 0:
            continue
        lines.append(f"{n} {_format_coeff(c, f.embedding, digits)}")
    lines.append(f"# truncation {f.truncation}")
    return "\n".join(lines) + "\n"


def loads(text: str, digits: int = 40) -> QExpansion:
    lines = [ln.strip() for ln in text.splitlines() if ln.strip()]
    if not lines:
        raise DataError("empty q-expansion file")
    head = lines[0].split()
    if len(head) != 4:
        raise DataError("header must be 'LABEL N k D'")
    label, N, k, D = head[0], int(head[1]), int(head[2]), int(head[3])
    entries = {}
    trunc = 0
    for ln in lines[1:]:
        if ln.startswith("#"):
            parts = ln[1:].split()
            if len(parts) == 2 and parts[0] == "truncation":
                trunc = int(parts[1])
            continue
        n_str, c_str = ln.split(None, 1)
        n = int(n_str)
        if "," in c_str:
            re_s, im_s = c_str.split(",")
            with mp.workdps(digits + 10):
                c = mp.mpc(mp.mpf(re_s), mp.mpf(im_s))
        else:
            c = Fraction(c_str)
            if c.denominator == 1:
                c = int(c)
        entries[n] = c
        trunc = max(trunc, n)
    coeffs = [0] * (trunc + 1)
    for n, c in entries.items():
        coeffs[n] = c
    return QExpansion(N, D, coeffs, label=label, weight=k)
