"""Observed orders of the solver in dt and dx, and the gap between the two formulations.

    python3 scripts/convergence_study.py
"""
import argparse
import json

from novikov.acceptance import cross_formulation, self_convergence_dt, self_convergence_dx


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--t-end", type=float, default=1.0)
    args = ap.parse_args()
    p_dt, e_dt = self_convergence_dt(t_end=args.t_end)
    p_dx, e_dx = self_convergence_dx(t_end=args.t_end)
    gap = cross_formulation(t_end=min(args.t_end, 0.5))
    print(json.dumps({"order_dt": p_dt, "diffs_dt": e_dt, "order_dx": p_dx, "diffs_dx": e_dx,
                      "cross_formulation_sup_diff": gap}, indent=2))


if __name__ == "__main__":
    main()
