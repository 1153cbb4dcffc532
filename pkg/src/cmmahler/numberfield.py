"""Exact arithmetic in small number fields Q[x]/(h(x)).

Elements are coordinate vectors of Fractions over the power basis
1, x, ..., x^(d-1).  Only what the Hecke and decomposition code needs is
implemented: field operations, traces and numerical embeddings.
"""

from __future__ import annotations

from fractions import Fraction

import mpmath as mp

from .numerics import working


def _frac(v) -> Fraction:
    if isinstance(v, Fraction):
        return v
    return Fraction(v)


class NumberField:
    """Q[x]/(h) for an irreducible h, given constant term first."""

    def __init__(self, minpoly, name: str = "x"):
        coeffs = [_frac(c) for c in minpoly]
        while len(coeffs) > 1 and coeffs[-1] == 0:
            coeffs.pop()
        lead = coeffs[-1]
        self.minpoly = tuple(c / lead for c in coeffs)
        self.degree = len(self.minpoly) - 1
        self.name = name
        if self.degree < 1:
            raise ValueError("minimal polynomial must have degree >= 1")
        # x^(d+k) reduced to the power basis, for k = 0..d-2
        self._reduction = []
        top = [-c for c in self.minpoly[:-1]]
        cur = top
        for _ in range(max(0, self.degree - 1)):
            self._reduction.append(cur)
            cur = self._shift(cur)
        self._reduction.append(cur)

    def _shift(self, v):
        # multiply a reduced vector by x
        d = self.degree
        out = [Fraction(0)] + list(v[:-1])
        carry = v[-1]
        if carry:
            for i in range(d):
                out[i] += carry * (-self.minpoly[i])
        return out

    def __eq__(self, other):
        return isinstance(other, NumberField) and self.minpoly == other.minpoly

    def __hash__(self):
        return hash(self.minpoly)

    def __repr__(self):
        return f"NumberField({[str(c) for c in self.minpoly]})"

    @property
    def is_rational(self) -> bool:
        return self.degree == 1

    def __call__(self, coords) -> "NFElement":
        c = [_frac(v) for v in coords]
        c += [Fraction(0)] * (self.degree - len(c))
        return NFElement(self, tuple(c[: self.degree]))

    def zero(self):
        return self([0])

    def one(self):
        return self([1])

    def gen(self):
        if self.degree == 1:
            return self([-self.minpoly[0]])
        return self([0, 1])

    def roots(self, prec: int = 30):
        """Complex embeddings of the generator, sorted by (Re, Im)."""
        with working(prec):
            rts = mp.polyroots(list(reversed([mp.mpf(c.numerator) / c.denominator
                                              for c in self.minpoly])),
                               maxsteps=400, extraprec=4 * prec + 50)
            rts = [mp.mpc(r) for r in rts]
            return sorted(rts, key=lambda r: (float(mp.re(r)), float(mp.im(r))))

    def mul_vectors(self, a, b):
        d = self.degree
        prod = [Fraction(0)] * (2 * d - 1)
        for i, x in enumerate(a):
            if not x:
                continue
            for j, y in enumerate(b):
                if y:
                    prod[i + j] += x * y
        out = prod[:d]
        for k in range(d, 2 * d - 1):
            c = prod[k]
            if c:
                red = self._reduction[k - d]
                for i in range(d):
                    out[i] += c * red[i]
        return out


RATIONALS = NumberField((0, 1))


class NFElement:
    __slots__ = ("field", "c")

    def __init__(self, field: NumberField, coords: tuple):
        self.field = field
        self.c = coords

    # -- coercion
    def _lift(self, other):
        if isinstance(other, NFElement):
            if other.field != self.field:
                if other.field.is_rational:
                    return self.field([other.c[0]])
                if self.field.is_rational:
                    raise TypeError("mixed fields")
                raise TypeError("elements of different number fields")
            return other
        if isinstance(other, (int, Fraction)):
            return self.field([other])
        return NotImplemented

    def __add__(self, other):
        o = self._lift(other)
        if o is NotImplemented:
            return o
        if self.field.is_rational and o.field is not self.field and not o.field.is_rational:
            return o + self
        return NFElement(self.field, tuple(x + y for x, y in zip(self.c, o.c)))

    __radd__ = __add__

    def __neg__(self):
        return NFElement(self.field, tuple(-x for x in self.c))

    def __sub__(self, other):
        o = self._lift(other)
        if o is NotImplemented:
            return o
        return self + (-o)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if isinstance(other, (int, Fraction)):
            return NFElement(self.field, tuple(x * other for x in self.c))
        o = self._lift(other)
        if o is NotImplemented:
            return o
        return NFElement(self.field, tuple(self.field.mul_vectors(self.c, o.c)))

    __rmul__ = __mul__

    def inverse(self):
        if self.is_zero():
            raise ZeroDivisionError("inverse of zero in a number field")
        d = self.field.degree
        # columns: self * x^j
        cols = []
        cur = list(self.c)
        for _ in range(d):
            cols.append(cur)
            cur = self.field._shift(cur)
        mat = [[cols[j][i] for j in range(d)] + [Fraction(int(i == 0))] for i in range(d)]
        sol = _solve_rational(mat, d)
        return NFElement(self.field, tuple(sol))

    def __truediv__(self, other):
        if isinstance(other, (int, Fraction)):
            return NFElement(self.field, tuple(x / other for x in self.c))
        o = self._lift(other)
        if o is NotImplemented:
            return o
        return self * o.inverse()

    def __rtruediv__(self, other):
        return self.inverse() * other

    def __pow__(self, k: int):
        out = self.field.one()
        base = self
        if k < 0:
            base, k = self.inverse(), -k
        while k:
            if k & 1:
                out = out * base
            base = base * base
            k >>= 1
        return out

    def __eq__(self, other):
        if isinstance(other, (int, Fraction)):
            return self.c[0] == other and not any(self.c[1:])
        if isinstance(other, NFElement):
            if other.field != self.field:
                return self.is_rational() and other.is_rational() and self.c[0] == other.c[0]
            return self.c == other.c
        return NotImplemented

    def __hash__(self):
        if self.is_rational():
            return hash(self.c[0])
        return hash((self.field, self.c))

    def is_zero(self) -> bool:
        return not any(self.c)

    def __bool__(self):
        return not self.is_zero()

    def is_rational(self) -> bool:
        return not any(self.c[1:])

    def trace(self) -> Fraction:
        """Trace to Q: sum of the diagonal of multiplication by self."""
        d = self.field.degree
        tot = Fraction(0)
        cur = [Fraction(int(i == 0)) for i in range(d)]
        for j in range(d):
            col = self.field.mul_vectors(self.c, cur)
            tot += col[j]
            cur = self.field._shift(cur)
        return tot

    def embed(self, root):
        """Numerical value under x -> root."""
        val = mp.mpf(0)
        for coef in reversed(self.c):
            val = val * root + mp.mpf(coef.numerator) / coef.denominator
        return val

    def __repr__(self):
        if self.is_rational():
            return str(self.c[0])
        terms = []
        for i, v in enumerate(self.c):
            if v:
                terms.append(f"{v}*{self.field.name}^{i}" if i else str(v))
        return " + ".join(terms) or "0"


def _solve_rational(mat, d):
    """Solve a square augmented system over Q by Gaussian elimination."""
    m = [row[:] for row in mat]
    for col in range(d):
        piv = next((r for r in range(col, d) if m[r][col] != 0), None)
        if piv is None:
            raise ZeroDivisionError("singular system")
        m[col], m[piv] = m[piv], m[col]
        inv = 1 / m[col][col]
        m[col] = [v * inv for v in m[col]]
        for r in range(d):
            if r != col and m[r][col] != 0:
                f = m[r][col]
                m[r] = [a - f * b for a, b in zip(m[r], m[col])]
    return [m[r][d] for r in range(d)]


def as_element(v, field: NumberField | None = None):
    """Coerce an int/Fraction/NFElement to an NFElement of ``field``."""
    if isinstance(v, NFElement):
        if field is None or v.field == field:
            return v
        if v.is_rational():
            return field([v.c[0]])
        raise TypeError("element lies in a different field")
    field = field or RATIONALS
    return field([v])


def to_complex(v, root=None):
    """Numerical value of an exact or inexact coefficient."""
    if isinstance(v, NFElement):
        if v.field.is_rational:
            return mp.mpf(v.c[0].numerator) / v.c[0].denominator
        return v.embed(root)
    if isinstance(v, Fraction):
        return mp.mpf(v.numerator) / v.denominator
    return mp.mpmathify(v)
