"""Command-line entry point.

Exit codes: 0 success, 1 a check failed, 2 bad configuration or input,
3 blow-up detected by the solver.
"""
from __future__ import annotations

import argparse
import csv
import json
import logging
import os
import sys
import warnings
from pathlib import Path

import numpy as np

from . import acceptance
from . import characteristics as chars
from . import conservation as cons
from . import continuation as cont
from . import geometry as geo
from . import solutions as sol
from . import symmetry as sym
from .config import (CharacteristicsConfig, ConfigError, ConserveConfig, ContinuationConfig,
                     GeometryConfig, SimulationConfig, VerifyConfig, load, to_dict)
from .jets import DecayWarning, GridError, history_jets, interior_mask
from .solver import BlowUp, CFLViolation, run

EXIT_OK, EXIT_FAIL, EXIT_CONFIG, EXIT_BLOWUP = 0, 1, 2, 3
log = logging.getLogger("novikov")


def out_dir(arg: str | None) -> Path:
    root = Path(arg or os.environ.get("NOVIKOV_OUT") or "novikov_out")
    root.mkdir(parents=True, exist_ok=True)
    return root


def write_json(path: Path, obj) -> None:
    path.write_text(json.dumps(acceptance._plain(obj), indent=2, sort_keys=True) + "\n")


def write_rows(path: Path, header, rows) -> None:
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(header)
        for row in rows:
            w.writerow([repr(float(v)) for v in row])


def _simulate(sim: SimulationConfig):
    grid = sim.grid()
    cfg = sim.solver_config()
    with warnings.catch_warnings(record=True) as caught:
        warnings.simplefilter("always", DecayWarning)
        h = run(sim.initial.problem(grid), cfg)
    notes = [str(w.message) for w in caught]
    for n in notes:
        log.warning(n)
    return h, notes


# ---------------------------------------------------------------------------


def cmd_verify_exact(args) -> int:
    cfg = load(VerifyConfig, args.config)
    tol = args.tol if args.tol is not None else cfg.tol
    try:
        specs = ([sol.from_dict(d) for d in cfg.catalog] if cfg.catalog is not None
                 else sol.default_catalog())
    except (TypeError, ValueError) as exc:
        raise ConfigError(f"catalog: {exc}") from exc
    reports = []
    for s in specs:
        T, X = sol.sample_grid(s, cfg.n_x, cfg.n_t)
        reports.append(sol.verify_residual(s, (T, X), tol))
    ok = all(r.passed for r in reports)
    summary = {"tol": tol, "all_pass": ok, "families": sorted({s.kind for s in specs}),
               "reports": [r.as_dict() for r in reports]}
    write_json(out_dir(args.out) / "verify_exact.json", summary)
    for r in reports:
        print(f"{'PASS' if r.passed else 'FAIL'} {r.max_abs_residual:.3e} {r.label}")
    return EXIT_OK if ok else EXIT_FAIL


def cmd_simulate(args) -> int:
    sim = load(SimulationConfig, args.config)
    out = out_dir(args.out)
    h, notes = _simulate(sim)
    write_rows(out / "history.csv", ["t"] + [f"x{i}" for i in range(h.grid.n)],
               (np.concatenate([[t], v]) for t, v in zip(h.times, h.values)))
    write_json(out / "simulate.json", {
        "config": to_dict(sim), "snapshots": len(h), "t_final": float(h.times[-1]),
        "max_abs_u": float(np.abs(h.values).max()), "warnings": notes})
    print(f"completed {len(h)} snapshots up to t={h.times[-1]:g}")
    return EXIT_OK


def cmd_conserve(args) -> int:
    cfg = load(ConserveConfig, args.config)
    tol = args.tol if args.tol is not None else cfg.tol
    out = out_dir(args.out)
    h, notes = _simulate(cfg.simulation)
    currents = [cons.CurrentPair("current1"), cons.CurrentPair("current2"),
                cons.CurrentPair("current3", label="f=1"), cons.CurrentPair.exp_weighted(cfg.exp_rate)]
    names = ["H1", "H2", "H3[f=1]", f"H3[f=exp({cfg.exp_rate:g}t)]"]
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", DecayWarning)
        reps = [cons.drift_monitor(cp, h) for cp in currents]
    write_rows(out / "drift.csv", ["time"] + names,
               zip(h.times, *(r.values for r in reps)))
    summary = {n: r.summary() for n, r in zip(names, reps)}
    ok = all(r.relative_drift < tol for r in reps)
    write_json(out / "conserve.json", {"tol": tol, "all_pass": ok, "quantities": summary,
                                       "warnings": notes})
    for n, r in zip(names, reps):
        print(f"{'PASS' if r.relative_drift < tol else 'FAIL'} {n} relative drift {r.relative_drift:.3e}")
    return EXIT_OK if ok else EXIT_FAIL


def cmd_characteristics(args) -> int:
    cfg = load(CharacteristicsConfig, args.config)
    out = out_dir(args.out)
    h, _ = _simulate(cfg.simulation)
    try:
        cm = chars.evolve_characteristics(h, acceptance.reference_seeds(cfg.seeds, cfg.reach))
    except chars.CharacteristicExit as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_FAIL
    rep = chars.sign_preservation_report(h, cm)
    cm.to_csv(out / "charmap.csv")
    ok = rep.passed(cfg.m_tol, cfg.bound_tol)
    write_json(out / "sign_report.json", {**rep.as_dict(), "pass": ok})
    print(json.dumps(acceptance._plain(rep.as_dict()), sort_keys=True))
    return EXIT_OK if ok else EXIT_FAIL


def cmd_geometry(args) -> int:
    cfg = load(GeometryConfig, args.config)
    out = out_dir(args.out)
    try:
        p = geo.PSSParams(cfg.pss.m1, float(cfg.pss.mu), cfg.pss.sigma)
    except ValueError as exc:
        raise ConfigError(f"pss: {exc}") from exc
    if cfg.solution is not None:
        spec = sol.from_dict(cfg.solution)
        t = np.linspace(*cfg.t_range, cfg.points)
        x = np.linspace(*cfg.x_range, cfg.points)
        T, X = np.meshgrid(t, x, indexing="ij")
        jets = spec.jet(T, X)
        mf = geo.metric_from_jets(jets, p, t, x)
        inner = np.ones(x.size, dtype=bool)
    else:
        h, _ = _simulate(cfg.simulation)
        idx = np.arange(0, len(h), cfg.every)
        jets = history_jets(h, idx)
        mf = geo.metric_from_jets(jets, p, h.times[idx], h.grid.x)
        inner = interior_mask(h.grid.n)
    cf = geo.gauss_curvature(mf, w_min=cfg.w_min)
    structure = [float(np.abs(r[..., inner]).max()) for r in geo.structure_residuals(jets, p)]
    zc = float(geo.zero_curvature_residual(jets, p)[..., inner].max())
    mf.to_csv(out / "metric.csv")
    cf.to_csv(out / "curvature.csv")
    summary = {"params": p.label(), "max_abs_K_plus_1": cf.max_deviation(),
               "masked_points": int(cf.mask.sum()), "structure_residual_max": structure,
               "zero_curvature_residual_max": zc}
    write_json(out / "geometry.json", summary)
    print(json.dumps(summary, sort_keys=True))
    return EXIT_OK


def cmd_continuation(args) -> int:
    cfg = load(ContinuationConfig, args.config)
    out = out_dir(args.out)
    h, _ = _simulate(cfg.simulation)
    k = range(len(h))[cfg.snapshot]
    results = []
    for a, b in cfg.windows:
        iv = cont.ProbeInterval(float(a), float(b))
        rep = cont.representation_check(h, k, iv)
        diag = cont.continuation_diagnostic(h, k, iv, cfg.eps0)
        results.append({"a": a, "b": b, "representation": rep.as_dict(),
                        "diagnostic": diag.as_dict(), "S_l1": cont.WindowKernel(iv).l1_norm})
    summary = {"snapshot": k, "t": float(h.times[k]), "windows": results}
    if len(h) >= 3:
        F = cont.F_of(h, k).values
        ident = cont.F_identity(h, k).values
        inner = interior_mask(h.grid.n)
        summary["F_identity_sup_diff"] = float(np.abs(F - ident)[inner].max())
    write_json(out / "continuation.json", summary)
    for r in results:
        print(f"[{r['a']}, {r['b']}] relative residual {r['representation']['relative']:.3e} "
              f"verdict {r['diagnostic']['verdict']}")
    return EXIT_OK


def cmd_algebra(args) -> int:
    out = out_dir(args.out)
    text = sym.format_tables()
    if args.table:
        print(text)
    payload = {"commutators": [[v.coords for v in row] for row in sym.commutator_table()],
               "adjoint": sym.adjoint_table()}
    if args.vector is not None:
        rep = sym.optimal_representative(sym.AlgebraVec(*args.vector))
        payload["representative"] = {"input": list(args.vector), "vec": list(rep.vec.coords),
                                     "label": rep.label, "steps": [list(s) for s in rep.steps],
                                     "scale": rep.scale}
        print(f"{rep.label}: {rep.vec.coords}")
    write_json(out / "algebra.json", payload)
    (out / "tables.txt").write_text(text + "\n")
    return EXIT_OK


def cmd_acceptance(args) -> int:
    numbers = [args.criterion] if args.criterion is not None else list(acceptance.CRITERIA)
    out = out_dir(args.out)
    seeded = {3, 6, 9}
    results = []
    for k in numbers:
        fn = acceptance.CRITERIA.get(k)
        if fn is None:
            raise ConfigError(f"no criterion {k}")
        r = fn(seed=args.seed) if (k in seeded and args.seed is not None) else fn()
        results.append(r)
        print(r.line())
        write_json(out / f"criterion_{k:02d}.json", r.as_dict())
    return EXIT_OK if all(r.ok for r in results) else EXIT_FAIL


# ---------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="JSON configuration file")
    common.add_argument("--out", help="output directory (default $NOVIKOV_OUT or ./novikov_out)")
    common.add_argument("--seed", type=int, default=None, help="seed for randomized checks")
    common.add_argument("--tol", type=float, default=None, help="override the pass tolerance")
    common.add_argument("-v", "--verbose", action="store_true")

    ap = argparse.ArgumentParser(prog="novikov", description=__doc__.splitlines()[0])
    sub = ap.add_subparsers(dest="command", required=True)
    sub.add_parser("verify-exact", parents=[common], help="residuals of the exact-solution catalog")
    sub.add_parser("simulate", parents=[common], help="run the Cauchy problem, write history.csv")
    sub.add_parser("conserve", parents=[common], help="conserved-quantity drift")
    sub.add_parser("characteristics", parents=[common], help="characteristics and sign of m")
    sub.add_parser("geometry", parents=[common], help="frames, metric, curvature")
    sub.add_parser("continuation", parents=[common], help="window-kernel probes")
    alg = sub.add_parser("algebra", parents=[common], help="symmetry algebra tables")
    alg.add_argument("--table", action="store_true", help="print the commutator and adjoint tables")
    alg.add_argument("--vector", type=float, nargs=3, metavar=("A1", "A2", "A3"),
                     help="reduce a1 X1 + a2 X2 + a3 X3 to its optimal-system representative")
    acc = sub.add_parser("acceptance", parents=[common], help="run acceptance criteria")
    acc.add_argument("--criterion", type=int, default=None, help="criterion number (default: all)")
    return ap


COMMANDS = {
    "verify-exact": cmd_verify_exact, "simulate": cmd_simulate, "conserve": cmd_conserve,
    "characteristics": cmd_characteristics, "geometry": cmd_geometry,
    "continuation": cmd_continuation, "algebra": cmd_algebra, "acceptance": cmd_acceptance,
}


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        return COMMANDS[args.command](args)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except BlowUp as exc:
        print(str(exc), file=sys.stderr)
        return EXIT_BLOWUP
    except (CFLViolation, GridError, sol.DomainError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG


if __name__ == "__main__":
    sys.exit(main())
