"""Reference Cauchy problem: solve, then report conserved quantities, sign of m and curvature.

    python3 scripts/reference_run.py --out runs/reference
"""
import argparse
import json
import warnings
from pathlib import Path

import numpy as np

from novikov import characteristics as chars
from novikov import conservation as cons
from novikov import geometry as geo
from novikov.jets import DecayWarning
from novikov.solver import CauchyProblem, reference_config, run


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--out", default="runs/reference")
    ap.add_argument("--amplitude", type=float, default=0.5)
    ap.add_argument("--n", type=int, default=2048)
    ap.add_argument("--dt", type=float, default=1e-3)
    ap.add_argument("--t-end", type=float, default=1.0)
    args = ap.parse_args()
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)

    with warnings.catch_warnings():
        warnings.simplefilter("ignore", DecayWarning)
        h = run(CauchyProblem.gaussian(args.amplitude), reference_config(args.n, args.dt, args.t_end))
        drifts = {cp.name: cons.drift_monitor(cp, h).relative_drift
                  for cp in cons.standard_currents()}

    cm = chars.evolve_characteristics(h, np.linspace(-12, 12, 97))
    sign = chars.sign_preservation_report(h, cm)
    idx = np.arange(0, len(h), 10)
    curv = {}
    for p in geo.acceptance_params():
        if p.m1 != -2:
            continue
        cf = geo.gauss_curvature(geo.metric_from_history(h, p, idx), w_min=0.1)
        curv[p.label()] = cf.max_deviation()

    np.savez_compressed(out / "history.npz", t=h.times, x=h.grid.x, u=h.values)
    cm.to_csv(out / "charmap.csv")
    summary = {"snapshots": len(h), "max_abs_u": float(np.abs(h.values).max()),
               "relative_drift": drifts, "sign_report": sign.as_dict(),
               "curvature_max_deviation": curv}
    (out / "summary.json").write_text(json.dumps(summary, indent=2, sort_keys=True) + "\n")
    print(json.dumps(summary, indent=2, sort_keys=True))


if __name__ == "__main__":
    main()
