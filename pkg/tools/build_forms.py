"""Write exact q-expansions of the rational newforms behind row #1."""

from __future__ import annotations

import os
import sys

sys.path.insert(0, os.path.join(os.path.dirname(__file__), "..", "src"))

from cmmahler.identities import _factors, get_record  # noqa: E402
from cmmahler.theta import dumps  # noqa: E402

DATA = os.path.join(os.path.dirname(__file__), "..", "src", "cmmahler", "data", "forms")


def main(coeffs: int = 800):
    os.makedirs(DATA, exist_ok=True)
    rec = get_record(1)
    factors = _factors(rec.cm_points, rec.family, rec.levels, rec.levels, 80)
    for cf in factors:
        f = cf.form
        label = next(lb for lb in rec.labels if lb.startswith(str(f.level)))
        if not f.is_exact():
            raise SystemExit(f"{label}: inexact coefficients")
        f = f.truncate(min(coeffs, f.truncation))
        f.label = label
        path = os.path.join(DATA, f"f{label}.txt")
        with open(path, "w") as fh:
            fh.write(dumps(f))
        print(path, f.truncation)


if __name__ == "__main__":
    main()
