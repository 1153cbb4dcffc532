"""Command line: classify, mahler, verify, discover, theta, lvalue.

Every command prints text by default and one JSON object per line with
``--format json``.  Exit status is 0 when everything requested succeeded;
failures map to the ``exit_code`` of the raised error (2 usage or domain,
3 data, 4 precision, 5 verification).
"""

from __future__ import annotations

import argparse
import json
import os
import re
import sys
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass

import mpmath as mp
import sympy

from .errors import CMMahlerError, DataError, UsageError, VerificationFailure
from .numerics import working
from .quadcm import CMPoint, census, classify, reduce_to_FP, reduce_to_FQ

DATA_ENV = "CMMAHLER_DATA"
EXIT_VERIFY = VerificationFailure.exit_code


@dataclass
class Config:
    digits: int = 40
    threads: int = 1
    data_dir: str | None = None
    format: str = "text"

    def __post_init__(self):
        if self.digits < 20:
            raise UsageError("--digits must be at least 20")
        if self.threads < 1:
            raise UsageError("--threads must be positive")


def _emit(cfg: Config, obj: dict, text: str | None = None):
    if cfg.format == "json":
        print(json.dumps(obj, sort_keys=True), flush=True)
    else:
        print(text if text is not None else _as_text(obj), flush=True)


def _as_text(obj: dict) -> str:
    return "  ".join(f"{k}={v}" for k, v in obj.items())


def _family(args) -> str:
    fam = (args.family_opt or args.family or "").upper()
    if fam not in ("P", "Q"):
        raise UsageError("family must be P or Q")
    return fam


# ---------------------------------------------------------------- algebraic input


def parse_cm(text: str) -> CMPoint:
    parts = [p.strip() for p in text.split(",")]
    if len(parts) != 3:
        raise UsageError(f"CM point {text!r} must be a,b,c")
    try:
        return CMPoint(*(int(p) for p in parts))
    except ValueError as exc:
        raise UsageError(f"CM point {text!r}: {exc}") from None


def _to_sympy(text: str):
    expr = re.sub(r"(?<![A-Za-z])i(?![A-Za-z])", "I", text.replace(" ", ""))
    expr = re.sub(r"√(\d+)", r"sqrt(\1)", expr)
    expr = expr.replace("√", "sqrt")
    # implicit products: 8I, 3sqrt(7), I(1+...), )(
    expr = re.sub(r"(?<=[\dI)])(?=[A-Za-z(])", "*", expr)
    try:
        return sympy.sympify(expr, locals={"I": sympy.I, "sqrt": sympy.sqrt})
    except (sympy.SympifyError, SyntaxError, TypeError) as exc:
        raise UsageError(f"cannot parse t = {text!r}") from exc


def parse_t(text: str, prec: int):
    """A decimal or algebraic literal, or minpoly:c0,...,cn:k (k-th root by
    (Re, Im)).  Returns (t as mpc, CMPoint or None)."""
    if text.startswith("cm:"):
        return None, parse_cm(text[3:])
    with working(prec + 10):
        if text.startswith("minpoly:"):
            try:
                _, coeffs, k = text.split(":")
                cs = [int(c) for c in coeffs.split(",")]
                k = int(k)
            except ValueError:
                raise UsageError("minpoly syntax is minpoly:c0,c1,...,cn:k") from None
            roots = mp.polyroots(list(reversed(cs)), maxsteps=200, extraprec=4 * prec)
            roots = sorted((mp.mpc(r) for r in roots), key=lambda z: (mp.re(z), mp.im(z)))
            if not 0 <= k < len(roots):
                raise UsageError(f"root index {k} out of range 0..{len(roots) - 1}")
            return roots[k], None
        try:
            return mp.mpc(mp.mpf(text)), None
        except (ValueError, TypeError):
            pass
        expr = _to_sympy(text)
        val = sympy.N(expr, prec + 10)
        re_, im_ = sympy.re(val), sympy.im(val)
        return mp.mpc(mp.mpf(str(re_)), mp.mpf(str(im_))), None


# ---------------------------------------------------------------- commands


def cmd_classify(args, cfg: Config) -> int:
    fam = _family(args)
    orbits = classify(fam, args.max_degree, cfg.digits, args.disc_bound)
    counts = census(orbits)
    for o in orbits:
        pts = [list(m.cm) for m in o.members]
        row = {"family": fam, "degree": o.degree, "kind": o.kind,
               "minpoly": [int(c) for c in o.minpoly], "points": pts, "D": o.members[0].D}
        _emit(cfg, row, f"{o.kind:<26} D={o.members[0].D:<6} minpoly={row['minpoly']} "
                        f"points={pts}")
    _emit(cfg, {"family": fam, "census": counts, "orbits": len(orbits)},
          "census: " + ", ".join(f"{k} {v}" for k, v in counts.items()))
    return 0


def _mahler_values(fam, t, point, methods, prec):
    from .identities import mahler_via_theta
    from .mahler import mu, mu_via_ek, nu, nu_branch, nu_via_ek
    from .modular import t_P, t_Q
    with working(prec + 10):
        if point is not None:
            reduce = reduce_to_FP if fam == "P" else reduce_to_FQ
            point = reduce(point)
            t = (t_P if fam == "P" else t_Q)(point.embed(prec + 10), prec + 10)
        out = {}
        for m in methods:
            if m == "quad":
                out[m] = mu(t, prec) if fam == "P" else nu(t, prec)
            elif m in ("ek", "theta"):
                if point is None:
                    raise UsageError(f"--method {m} needs a CM point (--cm or cm:a,b,c)")
                if m == "ek":
                    out[m] = mu_via_ek(point, prec) if fam == "P" else nu_via_ek(point, prec)
                else:
                    out[m] = mahler_via_theta(point, fam, prec)
        branch = nu_branch(t) if fam == "Q" else "classical"
    return t, point, out, branch


def cmd_mahler(args, cfg: Config) -> int:
    fam = _family(args)
    if (args.t is None) == (args.cm is None):
        raise UsageError("give exactly one of --t and --cm")
    t, point = parse_t(args.t, cfg.digits) if args.t is not None else (None, parse_cm(args.cm))
    methods = ["quad", "ek", "theta"] if args.method == "all" else [args.method]
    t, point, vals, branch = _mahler_values(fam, t, point, methods, cfg.digits)
    with working(cfg.digits + 10):
        row = {"family": fam, "t": mp.nstr(t, cfg.digits), "branch": branch,
               "values": {k: mp.nstr(v, cfg.digits) for k, v in vals.items()}}
        if point is not None:
            row["cm"] = list(point)
        if len(vals) > 1:
            vs = list(vals.values())
            dev = max(abs(a - b) for i, a in enumerate(vs) for b in vs[i + 1:])
            row["max_deviation"] = mp.nstr(dev, 5)
    lines = [f"{k:<6} {v}" for k, v in row["values"].items()]
    if branch == "modified":
        lines.append("note: t lies in (-1, 27); the modified measure is reported")
    if "max_deviation" in row:
        lines.append(f"max pairwise deviation {row['max_deviation']}")
    _emit(cfg, row, "\n".join(lines))
    return 0


def _verify_one(rid, digits, method, data_dir):
    from .identities import verify
    try:
        rep = verify(rid, digits, method, data_dir)
        if not rep["pass"] and _near_miss(rep, digits):
            # one escalation separates a precision shortfall from a failure
            rep = verify(rid, 2 * digits, method, data_dir)
            rep["escalated"] = True
        return rep
    except CMMahlerError as exc:
        return {"id": rid, "pass": False, "error": f"{type(exc).__name__}: {exc}",
                "exit_code": exc.exit_code}


def _near_miss(rep, digits) -> bool:
    return 0 < float(rep["digits_matched"]) and float(rep["residual"]) < 10 ** (-digits / 2)


def cmd_verify(args, cfg: Config) -> int:
    from .identities import load_records
    if args.all == (args.id is not None):
        raise UsageError("give exactly one of --id and --all")
    ids = sorted(load_records(cfg.data_dir)) if args.all else [args.id]
    if cfg.threads > 1 and len(ids) > 1:
        with ProcessPoolExecutor(cfg.threads) as pool:
            reports = pool.map(_verify_one, ids, [cfg.digits] * len(ids),
                               [args.method] * len(ids), [cfg.data_dir] * len(ids))
            reports = list(reports)
    else:
        reports = (_verify_one(i, cfg.digits, args.method, cfg.data_dir) for i in ids)
    code = 0
    for rep in reports:
        _emit(cfg, rep, _verify_text(rep))
        if not rep["pass"]:
            code = max(code, rep.get("exit_code", EXIT_VERIFY))
    return code


def _verify_text(rep) -> str:
    if "error" in rep:
        return f"#{rep['id']}: FAIL ({rep['error']})"
    status = "pass" if rep["pass"] else "FAIL"
    extra = f", s-form residual {rep['s_residual']}" if "s_residual" in rep else ""
    return (f"#{rep['id']}: {status}  residual {rep['residual']}  "
            f"({rep['digits_matched']} digits{extra})")


MIN_DISCOVERY_DIGITS = {2: 50, 4: 250}


def cmd_discover(args, cfg: Config) -> int:
    from .identities import discover, get_record
    rec = get_record(args.id, cfg.data_dir)
    if not rec.cm_points:
        raise DataError(f"#{rec.id} has no stored CM points")
    digits = max(cfg.digits, MIN_DISCOVERY_DIGITS[rec.n])
    cand = discover(rec.cm_points, rec.family, rec.levels, digits, rec.modified)
    row = {"id": rec.id, "digits": digits, "relation": list(cand.relation)}
    if rec.n == 2:
        row.update(eps=cand.eps, coeffs=list(cand.coeffs or ()),
                   r=str(cand.r) if cand.r is not None else None)
    else:
        row["coefficients"] = dict(zip(
            ["a1", "a2", "a3", "a4", "a12", "a13", "a14", "a23", "a24", "a34", "a1234", "r"],
            [cand.relation[i] for i in range(11)] + [-cand.relation[11]]))
        row.update(coeffs=list(cand.coeffs or ()), pattern=cand.pattern,
                   r=str(cand.r) if cand.r is not None else None)
    matched = cand.r is not None and cand.r == rec.r and tuple(cand.coeffs) == tuple(rec.coeffs)
    row["matches_record"] = bool(matched)
    _emit(cfg, row)
    return 0 if matched else EXIT_VERIFY


def cmd_theta(args, cfg: Config) -> int:
    from .theta import dumps, theta_series
    fam = _family(args)
    point = parse_cm(args.cm)
    reduce = reduce_to_FP if fam == "P" else reduce_to_FQ
    f = theta_series(reduce(point), fam, args.coeffs)
    if cfg.format == "json":
        _emit(cfg, {"family": fam, "cm": list(point), "level": f.level, "char_disc": f.char_disc,
                    "coeffs": [int(c) for c in f.coeffs]})
    else:
        sys.stdout.write(dumps(f, cfg.digits))
    return 0


def cmd_lvalue(args, cfg: Config) -> int:
    from .lfun import L_at_2, fricke_probe
    from .theta import loads
    if (args.theta is None) == (args.form is None):
        raise UsageError("give exactly one of --theta and --form")
    with working(cfg.digits + 10):
        if args.form is not None:
            path = _form_path(args.form, cfg.data_dir)
            with open(path) as fh:
                f = loads(fh.read(), cfg.digits)
            eta = fricke_probe(f, cfg.digits)
            val = L_at_2(f, cfg.digits, eta=eta)
            if abs(mp.im(val)) < mp.mpf(10) ** (-cfg.digits + 5) * max(1, abs(val)):
                val = mp.re(val)
            row = {"form": f.label, "level": f.level, "eta": mp.nstr(eta, 10),
                   "L2": mp.nstr(val, cfg.digits)}
        else:
            from .identities import theta_L_at_2
            fam, _, abc = args.theta.partition(":")
            fam = fam.upper()
            if fam not in ("P", "Q") or not abc:
                raise UsageError("--theta takes FAMILY:a,b,c")
            reduce = reduce_to_FP if fam == "P" else reduce_to_FQ
            point = reduce(parse_cm(abc))
            val = theta_L_at_2(point, fam, cfg.digits)
            row = {"theta": f"{fam}:{','.join(map(str, point))}",
                   "L2": mp.nstr(mp.re(val), cfg.digits)}
    _emit(cfg, row, f"L(f, 2) = {row['L2']}")
    return 0


def _form_path(name: str, data_dir: str | None) -> str:
    if os.path.exists(name):
        return name
    from .identities import data_dir as default_dir
    path = os.path.join(data_dir or default_dir(), "forms", name)
    if not os.path.exists(path):
        raise DataError(f"no q-expansion file {name!r}")
    return path


# ---------------------------------------------------------------- entry point


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--digits", type=int, default=40, help="working precision")
    common.add_argument("--threads", type=int, default=1)
    common.add_argument("--data-dir", default=os.environ.get(DATA_ENV),
                        help=f"bundled tables and forms (default ${DATA_ENV} or the package data)")
    common.add_argument("--format", choices=("text", "json"), default="text")

    p = argparse.ArgumentParser(prog="cmmahler", description=__doc__.splitlines()[0])
    sub = p.add_subparsers(dest="command", required=True)

    def with_family(sp):
        sp.add_argument("family", nargs="?", help="P or Q")
        sp.add_argument("--family", dest="family_opt")

    c = sub.add_parser("classify", parents=[common], help="CM parameters of bounded degree")
    with_family(c)
    c.add_argument("max_degree_pos", nargs="?", type=int, metavar="max_degree")
    c.add_argument("--max-degree", type=int)
    c.add_argument("--disc-bound", type=int)
    c.set_defaults(func=cmd_classify)

    m = sub.add_parser("mahler", parents=[common], help="mu(t) or nu(t)")
    with_family(m)
    m.add_argument("--t")
    m.add_argument("--cm")
    m.add_argument("--method", choices=("quad", "ek", "theta", "all"), default="quad")
    m.set_defaults(func=cmd_mahler)

    v = sub.add_parser("verify", parents=[common], help="check bundled identities")
    v.add_argument("--id", type=int)
    v.add_argument("--all", action="store_true")
    v.add_argument("--method", choices=("ek", "quad"), default="ek")
    v.set_defaults(func=cmd_verify)

    d = sub.add_parser("discover", parents=[common], help="recover a row by PSLQ")
    d.add_argument("--id", type=int, required=True)
    d.set_defaults(func=cmd_discover)

    t = sub.add_parser("theta", parents=[common], help="theta q-expansion")
    with_family(t)
    t.add_argument("--cm", required=True)
    t.add_argument("--coeffs", type=int, default=50)
    t.set_defaults(func=cmd_theta)

    lv = sub.add_parser("lvalue", parents=[common], help="L(f, 2) of a theta or a form file")
    lv.add_argument("--theta")
    lv.add_argument("--form")
    lv.set_defaults(func=cmd_lvalue)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        cfg = Config(args.digits, args.threads, args.data_dir, args.format)
        if args.command == "classify":
            args.max_degree = args.max_degree or args.max_degree_pos or 4
        if cfg.data_dir:
            os.environ[DATA_ENV] = cfg.data_dir
        return args.func(args, cfg)
    except CMMahlerError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return exc.exit_code


if __name__ == "__main__":
    sys.exit(main())
