"""Locate the CM orbits behind the linear L'(f,0) identities and fix labels.

Each identity names its newforms by database label.  The orbit's theta
span yields the same newforms as canonically ordered components, and the
label -> component assignment is resolved once by trying every
level-compatible assignment against a 30-digit evaluation.
"""

from __future__ import annotations

import json
import os
import sys

import mpmath as mp
import sympy as sp

sys.path.insert(0, os.path.join(os.path.dirname(__file__), "..", "src"))

from cmmahler.identities import LinearIdentity, assign_labels  # noqa: E402
from cmmahler.numerics import working  # noqa: E402
from cmmahler.quadcm import classify  # noqa: E402

DATA = os.path.join(os.path.dirname(__file__), "..", "src", "cmmahler", "data")

I = sp.I
c2, c4 = sp.root(2, 3), sp.root(4, 3)
c3, c9 = sp.root(3, 3), sp.root(9, 3)
q2, q8 = sp.root(2, 4), sp.root(8, 4)
rho = sp.exp(2 * sp.pi * I / 3)


def cf(re, im=0, rad=1):
    return [str(sp.Rational(re)), str(sp.Rational(im)), rad]


# key, family, t, labels, coefficients (re, im, radicand) per label
LINEAR = [
    ("mu-8+8i3", "P", 8 + 8 * I * sp.sqrt(3), ["48ca1", "48ca2"],
     [cf("1/2", "1/6", 3), cf("1/2", "-1/6", 3)]),
    ("mu-8+24i7", "P", 8 + 24 * I * sp.sqrt(7), ["28da1", "28da2"],
     [cf("3/2", "5/14", 7), cf("3/2", "-5/14", 7)]),
    ("mu-1/2+3i7/2", "P", sp.Rational(1, 2) + sp.Rational(3, 2) * I * sp.sqrt(7), ["28da1", "28da2"],
     [cf("1/2", "3/14", 7), cf("1/2", "-3/14", 7)]),
    ("mu-31/2+3i7/2", "P", sp.Rational(31, 2) + sp.Rational(3, 2) * I * sp.sqrt(7),
     ["28da1", "28da2"], [cf(1, "1/7", 7), cf(1, "-1/7", 7)]),
    ("nu-4+10i2", "Q", 4 + 10 * I * sp.sqrt(2), ["24fa1", "24fa2"],
     [cf("3/4", "3/8", 2), cf("3/4", "-3/8", 2)]),
    ("nu-32+8i11", "Q", 32 + 8 * I * sp.sqrt(11), ["33da1", "33da2"],
     [cf("3/4", "3/44", 11), cf("3/4", "-3/44", 11)]),
    ("nu-cubic-2-real", "Q", 6 - 6 * c2 + 18 * c4, ["27aa1", "36aa1", "108aa1"],
     [cf("-3/2"), cf("1/2"), cf("1/2")]),
    ("nu-cubic-2-complex", "Q", 6 - 6 * rho * c2 + 18 * sp.conjugate(rho) * c4,
     ["27aa1", "36aa1", "108aa1"], [cf("3/4"), cf(0), cf("1/4")]),
    ("nu-cubic-2b-real", "Q", 17766 + 14094 * c2 + 11178 * c4, ["27aa1", "36aa1", "108aa1"],
     [cf("3/2"), cf("3/2"), cf("1/2")]),
    ("nu-cubic-2b-complex", "Q", 17766 + 14094 * rho * c2 + 11178 * sp.conjugate(rho) * c4,
     ["27aa1", "36aa1", "108aa1"], [cf(-3), cf("3/2"), cf("1/2")]),
    ("nu-cubic-3-real", "Q", 96 + 56 * c3 - 72 * c9, ["27aa1", "243aa1", "243ab1"],
     [cf(-1), cf(-1), cf(-1)]),
    ("nu-cubic-3-complex", "Q", 96 + 56 * rho * c3 - 72 * sp.conjugate(rho) * c9,
     ["27aa1", "243aa1", "243ab1"], [cf(0), cf("-1/6"), cf("1/6")]),
    ("nu-cubic-3b-real", "Q", 216 * (-18964 - 13149 * c3 - 9117 * c9), ["27aa1", "243aa1", "243ab1"],
     [cf(3), cf("-1/3"), cf("1/3")]),
    ("nu-cubic-3b-complex", "Q", 216 * (-18964 - 13149 * rho * c3 - 9117 * sp.conjugate(rho) * c9),
     ["27aa1", "243aa1", "243ab1"], [cf("-3/2"), cf("2/3"), cf("5/6")]),
    ("mu-quartic-real-a", "P", 8 + 6 * q2 - 9 * q8, ["32aa1", "64aa1", "256ab1", "256ac1"],
     [cf("1/4"), cf("1/4"), cf("-1/4"), cf("-1/4")]),
    ("mu-quartic-real-b", "P", 8 - 6 * q2 + 9 * q8, ["32aa1", "64aa1", "256ab1", "256ac1"],
     [cf("1/4"), cf("1/4"), cf("1/4"), cf("1/4")]),
    ("mu-quartic-complex", "P", 8 + 6 * I * q2 + 9 * I * q8, ["32aa1", "64aa1", "256ab1", "256ac1"],
     [cf(0), cf(0), cf("-1/8"), cf("1/8")]),
    ("nu-quartic-a", "Q", -73 - 70 * sp.sqrt(2) + I * (161 + 115 * sp.sqrt(2)),
     ["24fa1", "24fa2", "96fa1", "96fa2"],
     [cf("3/4", "3/32", 2), cf("3/4", "-3/32", 2), cf("3/16", "3/32", 2), cf("3/16", "-3/32", 2)]),
    ("nu-quartic-b", "Q", -73 + 70 * sp.sqrt(2) + I * (161 - 115 * sp.sqrt(2)),
     ["24fa1", "24fa2", "96fa1", "96fa2"],
     [cf("-15/16", "21/32", 2), cf("-15/16", "-21/32", 2), cf("3/8", "-3/32", 2), cf("3/8", "3/32", 2)]),
]


def _find(orbits, value):
    for orb in orbits:
        for m in orb.members:
            if abs(m.t.embedding - value) < mp.mpf(10) ** -30 * max(1, abs(value)):
                return orb, m
    return None, None


def build_linear(prec: int = 30):
    orbits = {fam: classify(fam, 4, 60) for fam in ("P", "Q")}
    rows = []
    for key, fam, t, labels, coeffs in LINEAR:
        with working(60):
            val = mp.mpc(str(sp.N(sp.re(t), 70)), str(sp.N(sp.im(t), 70)))
        orb, member = _find(orbits[fam], val)
        if orb is None:
            print(f"{key}: t not found among classified orbits", flush=True)
            continue
        # mu and nu are invariant under complex conjugation of t; the upper
        # half-plane representative is the one stored
        row = {"id": key, "family": fam, "point": list(member.cm),
               "orbit": [list(m.cm) for m in orb.members], "labels": labels,
               "coefficients": coeffs, "t": str(t)}
        lid = LinearIdentity(key, fam, member.cm, [m.cm for m in orb.members], labels, [],
                             coeffs)
        try:
            found = assign_labels(lid, prec)
        except Exception as exc:  # noqa: BLE001
            print(f"{key}: assignment failed ({type(exc).__name__}: {exc})", flush=True)
            row["assignment"] = []
            rows.append(row)
            continue
        row["assignment"] = found[0] if found else []
        print(f"{key}: {len(found)} assignments {found[:4]}", flush=True)
        rows.append(row)
    with open(os.path.join(DATA, "linear_ids.jsonl"), "w") as fh:
        for row in rows:
            fh.write(json.dumps(row) + "\n")


if __name__ == "__main__":
    build_linear()
