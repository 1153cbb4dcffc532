"""Build the bundled identity tables under src/cmmahler/data.

    python3 tools/build_tables.py rows      # 2x2 rows, curve data
    python3 tools/build_tables.py quartic   # match 4x4 rows to orbits (slow)
    python3 tools/build_tables.py linear    # label assignment for linear identities

The quartic step classifies the totally real quartic orbits, then for each
row tries every orbit of the right family whose theta level is divisible by
the row's newform levels, and every ordering of its four points, keeping
the one where the determinant identity holds.  The chosen ordering is
stored so that later runs need no search.
"""

from __future__ import annotations

import json
import os
import sys
import time
from fractions import Fraction

import mpmath as mp

sys.path.insert(0, os.path.join(os.path.dirname(__file__), "..", "src"))

from cmmahler.identities import (IdentityRecord, L_value, _record, label_level,  # noqa: E402
                                 mahler_entry, order_orbit)
from cmmahler.modular import t_P, t_Q  # noqa: E402
from cmmahler.numerics import working  # noqa: E402
from cmmahler.quadcm import (CMPoint, _rational_poly, classify, reduce_to_FP,  # noqa: E402
                             reduce_to_FQ)
from cmmahler.theta import theta_params  # noqa: E402

DATA = os.path.join(os.path.dirname(__file__), "..", "src", "cmmahler", "data")


def pair(a, b):
    return [f"{a}a{i}" for i in (1, 2)] if b is None else [a, b]


def four(stem):
    return [f"{stem}{i}" for i in (1, 2, 3, 4)]


# id, family, point, conjugate point, conjugate uses modified measure, eps, a, b, r, s, labels
ROWS_2 = [
    (1, "P", [16, 0, 1], [16, 16, 5], False, 1, 1, 1, "128", "1/2", ["32aa1", "64aa1"]),
    (2, "P", [8, 0, 1], [8, 8, 3], False, -1, 1, 1, "256", "1/2", pair("64b", None)),
    (3, "P", [12, 4, 1], [4, -4, 3], False, -1, 1, 2, "1024", "1/2", pair("128b", None)),
    (4, "P", [2, 0, 1], [6, -4, 1], False, -1, 1, 1, "512", "1", pair("64b", None)),
    (5, "P", [20, 4, 1], [4, -4, 5], False, 1, 1, 4, "-4096", "1/2", ["256ab1", "256ac1"]),
    (6, "P", [1, 0, 1], [5, 4, 1], False, 1, 1, 1, "1024", "4", ["32aa1", "64aa1"]),
    (7, "P", [16, 4, 1], [16, 12, 3], False, -1, 1, 3, "144", "1/2", pair("48c", None)),
    (8, "P", [3, 3, 1], [1, -1, 1], False, -1, 1, 3, "2304", "8", pair("48c", None)),
    (9, "P", [4, 0, 3], [12, 0, 1], False, -1, 3, 1, "2304", "1/2", pair("192c", None)),
    (10, "P", [32, 4, 1], [32, 28, 7], False, -1, 1, 7, "196", "2", pair("28d", None)),
    (11, "P", [7, 7, 2], [1, -1, 2], False, -1, 1, 7, "17248", "176", pair("28d", None)),
    (12, "P", [4, 0, 7], [28, 0, 1], False, -1, 7, 1, "12544", "1/2", pair("448fb", None)),
    (13, "Q", [3, 0, 2], [6, 0, 1], False, -1, 2, 1, "729", "9/8", pair("72d", None)),
    (14, "Q", [9, 0, 1], [9, 6, 2], True, -1, 2, 1, "729/2", "9/4", pair("36b", None)),
    (15, "Q", [1, 0, 1], [2, 2, 1], False, -1, 2, 1, "2187/2", "27/4", pair("36b", None)),
    (16, "Q", [3, 0, 4], [12, 0, 1], False, 1, 4, 1, "2187", "27/8", ["36aa1", "144aa1"]),
    (17, "Q", [3, -3, 2], [6, 3, 1], True, -1, 5, 1, "18225/16", "9/2", pair("45b", None)),
    (18, "Q", [3, 0, 5], [15, 0, 1], False, -1, 5, 1, "127575/32", "63/4", pair("45b", None)),
    (19, "Q", [3, -3, 7], [21, 3, 1], True, 1, 25, 1, "455625/16", "-9/2", ["225ac1", "225ad1"]),
    (20, "Q", [9, 0, 2], [18, 0, 1], False, -1, 2, 1, "486", "27/4", pair("24f", None)),
    (21, "Q", [1, 0, 2], [2, 0, 1], False, -1, 2, 1, "2754", "153/4", pair("24f", None)),
    (22, "Q", [3, -3, 5], [15, 3, 1], True, -1, 17, 1, "210681/16", "9/2", pair("153db", None)),
    (23, "Q", [3, -3, 13], [39, 3, 1], True, 1, 49, 1, "1750329/16", "-9/2", ["441ad1", "441ae1"]),
    (24, "Q", [9, -9, 5], [27, 3, 1], True, -1, 11, 1, "29403/16", "27/2", pair("33d", None)),
    (25, "Q", [1, -1, 3], [5, 3, 1], True, -1, 11, 1, "245025/16", "225/2", pair("33d", None)),
    (26, "Q", [3, -3, 11], [33, 3, 1], True, -1, 41, 1, "1225449/16", "9/2", pair("369db", None)),
    (27, "Q", [3, -3, 23], [69, 3, 1], True, -1, 89, 1, "5774409/16", "9/2", pair("801d", None)),
]

# id, j, (a, b, c, d), r, s, labels; rows 28-51 are the P family, 52-75 the Q family
ROWS_4 = [
    (28, 5, (3, 1, 1, 3), "331776", "1/24", pair("48c", None) + pair("192c", None)),
    (29, 2, (3, 1, 1, 3), "5308416", "1/24", four("192fa")),
    (30, 1, (9, 1, 1, 9), "360972288", "17/6", pair("64b", None) + pair("576d", None)),
    (31, 3, (6, 2, 3, 1), "84934656", "1/24", four("384fa")),
    (32, 2, (3, 1, 1, 3), "21233664", "1/6", four("192fa")),
    (33, 4, (12, 4, 3, 1), "1358954496", "1/24", four("768cg")),
    (34, 5, (3, 1, 1, 3), "84934656", "32/3", pair("48c", None) + pair("192c", None)),
    (35, 1, (18, 2, 9, 1), "6115295232", "3", pair("128b", None) + pair("1152dc", None)),
    (36, 1, (9, 1, 1, 9), "1443889152", "34/3", pair("64b", None) + pair("576d", None)),
    (37, 1, (5, 1, 1, 5), "40960000", "1/24", four("320fa")),
    (38, 1, (10, 2, 5, 1), "655360000", "1/24", four("640fd")),
    (39, 1, (5, 1, 1, 5), "163840000", "1/6", four("320fa")),
    (40, 3, (15, 5, 3, 1), "202500", "1/6", four("60hb")),
    (41, 3, (1, 3, 5, 15), "3317760000", "1/24", four("960oa")),
    (42, 3, (15, 5, 3, 1), "3162240000", "7808/3", four("60hb")),
    (43, 5, (7, 1, 1, 7), "2458624", "1/6", pair("28d", None) + pair("448fb", None)),
    (44, 4, (28, 4, 7, 1), "40282095616", "1/24", four("1792fd")),
    (45, 5, (7, 1, 1, 7), "3461742592", "704/3", pair("28d", None) + pair("448fb", None)),
    (46, 2, (11, 1, 1, 11), "959512576", "1/24", four("704ga")),
    (47, 3, (22, 2, 11, 1), "15352201216", "1/24", four("1408gb")),
    (48, 2, (11, 1, 1, 11), "3838050304", "1/6", four("704ga")),
    (49, 1, (29, 1, 1, 29), "46352367616", "1/24", four("1856ga")),
    (50, 1, (58, 2, 29, 1), "741637881856", "1/24", four("3712g")),
    (51, 1, (29, 1, 1, 29), "185409470464", "1/6", four("1856ga")),
    (52, 4, (2, 1, 1, 8), "13856832", "891/32", pair("24f", None) + pair("96f", None)),
    (53, 4, (2, 1, 1, 8), "93533616", "297/128", pair("72d", None) + pair("288d", None)),
    (54, 6, (4, 1, 1, 16), "1326476736", "-1053/128", ["36aa1", "144aa1", "576ae1", "576af1"]),
    (55, 4, (2, 1, 1, 8), "863742528", "55539/32", pair("24f", None) + pair("96f", None)),
    (56, 4, (1, 2, 5, 10), "332150625", "27/128", four("360da")),
    (57, 2, (5, 1, 2, 10), "12301875/2", "81/16", four("60ha")),
    (58, 2, (5, 1, 2, 10), "1422916875/2", "9369/16", four("60ha")),
    (59, 1, (1, 4, 5, 20), "27568501875/8", "2241/64", pair("45b", None) + pair("720fd", None)),
    (60, 1, (7, 1, 2, 14), "1275989841/4", "27/32", four("252bb")),
    (61, 2, (11, 1, 2, 22), "7780827681/4", "27/32", four("396ha")),
    (62, 3, (1, 2, 13, 26), "15178486401", "27/128", four("936me")),
    (63, 3, (65, 13, 5, 1), "9486554000625/256", "27/8", four("585he")),
    (64, 4, (1, 2, 17, 34), "44386483761", "27/128", four("1224la")),
    (65, 3, (1, 2, 7, 14), "1275989841", "27/128", four("504pc")),
    (66, 1, (19, 1, 2, 38), "69257922561/4", "27/32", four("684fa")),
    (67, 3, (35, 7, 5, 1), "88610405625/256", "243/8", four("105gb")),
    (68, 3, (35, 7, 5, 1), "7098678050625/256", "19467/8", four("105gb")),
    (69, 4, (145, 29, 5, 1), "234923826200625/256", "27/8", four("1305fg")),
    (70, 1, (31, 1, 2, 62), "490796923761/4", "27/32", four("1116gc")),
    (71, 3, (185, 37, 5, 1), "622503747500625/256", "27/8", four("1665ga")),
    (72, 4, (265, 53, 5, 1), "2620828195700625/256", "27/8", four("2385g")),
    (73, 2, (59, 1, 2, 118), "6439662447201/4", "27/32", four("2124g")),
    (74, 1, (161, 23, 7, 1), "357074273095281/256", "27/8", four("1449hb")),
    (75, 3, (209, 19, 11, 1), "1014005244215601/256", "27/8", four("1881hb")),
]

# orderings stated explicitly in the source tables
PRINTED_4 = {
    28: [[16, 16, 7], [48, 48, 13], [48, 0, 1], [16, 0, 3]],
    50: [[4, -4, 59], [116, 116, 31], [124, 116, 29], [236, 4, 1]],
    54: [[12, -12, 7], [21, 12, 4], [48, 0, 1], [3, 0, 16]],
    71: [[3, -3, 47], [15, -15, 13], [39, 15, 5], [141, 3, 1]],
}

# conductor data for the rows where it is known: norm of the conductor,
# discriminant of the field of definition, sign of the functional equation
CURVES = {
    1: (32, 8, 1),
    28: (16, 2304, 1),
}


def _t_minpoly(points, family, prec=60):
    with working(prec):
        h = t_P if family == "P" else t_Q
        vals = [h(p.embed(prec), prec) for p in points]
        poly = _rational_poly(vals, mp.mpf(10) ** (-prec + 15))
    if poly is None:
        raise RuntimeError(f"orbit {points} is not Galois stable")
    return [int(c) for c in poly]


def build_rows():
    out = []
    for (rid, fam, p1, p2, mod2, eps, a, b, r, s, labels) in ROWS_2:
        red = reduce_to_FP if fam == "P" else reduce_to_FQ
        pts = [red(CMPoint(*p1)), red(CMPoint(*p2))]
        out.append({"id": rid, "family": fam, "points": [list(p) for p in pts],
                    "printed": [p1, p2], "modified": [False, mod2], "eps": eps,
                    "a": a, "b": b, "r": r, "s": s, "labels": labels,
                    "minpoly": _t_minpoly(pts, fam)})
    with open(os.path.join(DATA, "tables1.jsonl"), "w") as fh:
        for row in out:
            fh.write(json.dumps(row) + "\n")
    # 4x4 skeleton; orderings are filled in by the quartic step
    path4 = os.path.join(DATA, "tables34.jsonl")
    known = {}
    if os.path.exists(path4):
        with open(path4) as fh:
            for ln in fh:
                row = json.loads(ln)
                known[row["id"]] = row
    rows4 = []
    for (rid, j, coeffs, r, s, labels) in ROWS_4:
        fam = "P" if rid <= 51 else "Q"
        row = {"id": rid, "family": fam, "j": j, "coeffs": list(coeffs), "r": r, "s": s,
               "labels": labels, "points": None, "modified": [False] * 4, "minpoly": None}
        if rid in PRINTED_4:
            red = reduce_to_FP if fam == "P" else reduce_to_FQ
            pts = [red(CMPoint(*p)) for p in PRINTED_4[rid]]
            row["points"] = [list(p) for p in pts]
            row["modified"] = _modified_flags(pts, fam)
            row["minpoly"] = _t_minpoly(pts, fam)
            row["matched"] = "printed"
        elif rid in known and known[rid].get("points"):
            for k in ("points", "modified", "minpoly", "matched"):
                if k in known[rid]:
                    row[k] = known[rid][k]
        rows4.append(row)
    _write4(rows4)
    with open(os.path.join(DATA, "curves.jsonl"), "w") as fh:
        for rid, (norm, disc, w) in CURVES.items():
            rec = next(r for r in out + rows4 if r["id"] == rid)
            fh.write(json.dumps({"id": rid, "family": rec["family"], "minpoly": rec["minpoly"],
                                 "labels": rec["labels"], "conductor_norm": norm,
                                 "field_disc": disc, "w": w}) + "\n")


def _write4(rows4):
    with open(os.path.join(DATA, "tables34.jsonl"), "w") as fh:
        for row in rows4:
            fh.write(json.dumps(row) + "\n")


def _modified_flags(points, fam):
    from cmmahler.mahler import nu_branch
    if fam == "P":
        return [False] * 4
    with working(30):
        return [nu_branch(t_Q(p.embed(30), 30)) == "modified" for p in points]


def match_quartic(prec=30, only=None):
    path4 = os.path.join(DATA, "tables34.jsonl")
    with open(path4) as fh:
        rows4 = [json.loads(ln) for ln in fh]
    orbits = {}
    for fam in ("P", "Q"):
        orbits[fam] = [o for o in classify(fam, 4, 60) if o.kind == "totally real quartic"]
        print(f"{fam}: {len(orbits[fam])} totally real quartic orbits", flush=True)
    used = {tuple(tuple(p) for p in r["points"]) for r in rows4 if r.get("points")}
    cache = {}
    for row in rows4:
        if row.get("points") or (only and row["id"] not in only):
            continue
        fam = row["family"]
        levels = [label_level(lb) for lb in row["labels"]]
        t0 = time.perf_counter()
        for orb in orbits[fam]:
            pts = [m.cm for m in orb.members]
            key = tuple(tuple(p) for p in pts)
            N = theta_params(pts[0], fam)[3]
            if any(N % lv for lv in levels):
                continue
            if any(key == tuple(sorted(u)) or set(key) == set(u) for u in used):
                continue
            mods = _modified_flags(pts, fam)
            try:
                if key not in cache:
                    with working(prec + 10):
                        m = [mahler_entry(p, fam, fl, prec + 5) for p, fl in zip(pts, mods)]
                        L, _ = L_value(pts, fam, levels, prec + 5)
                    cache[key] = (m, L)
                m, L = cache[key]
            except Exception as exc:  # noqa: BLE001
                print(f"  #{row['id']}: orbit {pts} skipped ({type(exc).__name__}: {exc})", flush=True)
                continue
            rec = _record({**row, "points": [list(p) for p in pts], "modified": mods})
            perms = order_orbit(pts, fam, rec, m, L, prec)
            if perms:
                perm = perms[0]
                ordered = [pts[i] for i in perm]
                row["points"] = [list(p) for p in ordered]
                row["modified"] = [mods[i] for i in perm]
                row["minpoly"] = [int(c) for c in orb.minpoly]
                row["matched"] = "search"
                used.add(tuple(tuple(p) for p in ordered))
                print(f"#{row['id']}: {row['points']} ({time.perf_counter() - t0:.1f}s, "
                      f"{len(perms)} orderings)", flush=True)
                _write4(rows4)
                break
        else:
            print(f"#{row['id']}: no orbit matched", flush=True)
    _write4(rows4)


def main(argv):
    step = argv[1] if len(argv) > 1 else "rows"
    if step == "rows":
        build_rows()
    elif step == "quartic":
        only = {int(x) for x in argv[2:]} or None
        match_quartic(only=only)
    elif step == "linear":
        sys.path.insert(0, os.path.dirname(__file__))
        from build_linear import build_linear  # noqa: E402
        build_linear()
    else:
        raise SystemExit(f"unknown step {step!r}")


if __name__ == "__main__":
    main(sys.argv)
