"""Command-line front end.

    frame-transport run CONFIG [CONFIG ...] [--out DIR] [--pairs SPEC]
                        [--format csv,json] [--batch]

Each run writes ``frames.csv``, ``defects.csv`` and ``summary.json`` and
exits non-zero when any invariant check fails.
"""
from __future__ import annotations

import argparse
import csv
import json
import sys
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from . import scenarios as sc
from .config import ConfigError, RunConfig, parse_config, parse_mix_spec, parse_pair_spec
from .frame import defect_table, frame_history, orthogonality_defect
from .lie_algebra import cartan_pairs, non_cartan_pairs
from .transport import IntegratorConfig, TransportError, evolve, unitary_exp

UNITARITY_TOL = 1e-10
HORIZONTALITY_TOL = 1e-12
ORTHOGONALITY_TOL = 1e-10
CARTAN_DEFECT_TOL = 1e-9
ORDER_RATIO = (3.5, 4.5)
# discrepancies below this are roundoff and carry no order information
ORDER_FLOOR = 1e-11


@dataclass
class RunReport:
    config: dict
    defects: list
    holonomy: dict | None
    nonlinearity: float | None
    checks: dict
    values: dict
    duration: float

    @property
    def ok(self) -> bool:
        return all(self.checks.values())

    @property
    def failed(self) -> list:
        return [k for k, v in self.checks.items() if not v]

    def summary(self) -> dict:
        """Deterministic part of the report (no timing)."""
        return {
            "config": self.config,
            "defects": self.defects,
            "holonomy": self.holonomy,
            "nonlinearity_defect": self.nonlinearity,
            "values": self.values,
            "checks": self.checks,
            "passed": self.ok,
        }


def _fmt(x):
    return f"{x:.17g}"


def build_scenario(cfg: RunConfig, dt=None):
    p = cfg.params
    dt = cfg.dt if dt is None else dt
    if cfg.scenario == "su2_cone":
        return sc.su2_cone(p["theta"], p["omega"], dt)
    return sc.random_horizontal(p["n"], p["seed"], p["K"], p["T"], dt)


def resolve_pairs(spec, basis):
    spec = parse_pair_spec(spec, basis.d)
    if spec == "cartan":
        return [c.pair for c in cartan_pairs(basis)]
    if spec == "non-cartan":
        return non_cartan_pairs(basis)
    if spec == "all":
        return [(a, b) for a in range(basis.d) for b in range(a + 1, basis.d)]
    return spec


def mixing_matrix(spec, basis):
    parsed = parse_mix_spec(spec, basis.n)
    if parsed is None:
        return None
    kind, args = parsed
    n = basis.n
    if kind == "identity":
        return np.eye(n, dtype=complex)
    if kind == "phases":
        return np.diag(np.exp(1j * np.array(args)))
    if kind == "rotation":
        # antisymmetric generator of the (0, 1) pair is always at index 1
        return unitary_exp(basis.generators[1], 0.5 * args[0])
    rng = np.random.default_rng(args[0])
    Z = rng.normal(size=(n, n)) + 1j * rng.normal(size=(n, n))
    Q, R = np.linalg.qr(Z)
    return Q * (np.diag(R) / np.abs(np.diag(R)))


def _evolve(scenario, cfg):
    icfg = IntegratorConfig(scenario.dt, cfg.corrector_iterations)
    return evolve(scenario.U0, scenario.path, icfg)


def _order_check(coarse, fine):
    top = max((s.max_discrepancy for s in coarse), default=0.0)
    bottom = max((s.max_discrepancy for s in fine), default=0.0)
    if bottom < ORDER_FLOOR:
        return True, None
    ratio = top / bottom
    return ORDER_RATIO[0] <= ratio <= ORDER_RATIO[1], ratio


def run(cfg: RunConfig, out_dir=None, formats=None) -> RunReport:
    """Execute one configured experiment and write its outputs."""
    start = time.perf_counter()
    scenario = build_scenario(cfg)
    basis = scenario.basis
    pairs = resolve_pairs(cfg.pairs, basis)
    cartan = {c.pair for c in cartan_pairs(basis)}
    u_mix = mixing_matrix(cfg.mix, basis)

    run_states = _evolve(scenario, cfg)
    half = build_scenario(cfg, dt=scenario.dt / 2)
    half_states = _evolve(half, cfg)

    frames = frame_history(basis, run_states)
    table = defect_table(basis, run_states, pairs, frames=frames)
    half_table = defect_table(basis, half_states, pairs)

    order_ok, ratio = _order_check(table, half_table)
    endpoint_err = float(np.max(np.abs(run_states[-1].U - half_states[-1].U)) * 4 / 3)
    values = {
        "dt": scenario.dt,
        "steps": len(run_states) - 1,
        "max_unitarity_defect": max(s.unitarity_defect for s in run_states),
        "max_horizontal_residual": max(s.horizontal_residual for s in run_states),
        "max_orthogonality_defect": max(orthogonality_defect(R) for R in frames),
        "max_cartan_defect_commutator": max(
            (s.max_abs_commutator for s in table if tuple(sorted(s.pair)) in cartan), default=0.0),
        "discrepancy_ratio": ratio,
        "endpoint_error_estimate": endpoint_err,
    }
    checks = {
        "unitarity": values["max_unitarity_defect"] <= UNITARITY_TOL,
        "horizontality": values["max_horizontal_residual"] <= HORIZONTALITY_TOL,
        "orthogonality": values["max_orthogonality_defect"] <= ORTHOGONALITY_TOL,
        "cartan_transport": values["max_cartan_defect_commutator"] <= CARTAN_DEFECT_TOL,
        "convergence": bool(order_ok and endpoint_err <= cfg.convergence_tol),
    }

    hol = None
    if scenario.loop_flag:
        res = sc.holonomy(scenario, run_states)
        hol = {
            "phases": [float(x) for x in res.phases],
            "expected_phases": [float(x) for x in sc.cone_geometric_phases(cfg.params["theta"])],
            "off_diagonal_leak": res.off_diagonal_leak,
        }
    nonlin = None if u_mix is None else sc.nonlinearity_defect(basis, run_states, u_mix)

    defects = [
        {
            "a": s.pair[0] + 1,
            "b": s.pair[1] + 1,
            "cartan": tuple(sorted(s.pair)) in cartan,
            "max_abs_commutator": s.max_abs_commutator,
            "max_abs_fd": s.max_abs_fd,
            "max_discrepancy": s.max_discrepancy,
        }
        for s in table
    ]
    report = RunReport(
        config=cfg.echo(), defects=defects, holonomy=hol, nonlinearity=nonlin,
        checks=checks, values=values, duration=0.0,
    )
    out_dir = Path(cfg.out if out_dir is None else out_dir)
    write_outputs(report, run_states, frames, table, out_dir,
                  cfg.formats if formats is None else formats)
    report.duration = time.perf_counter() - start
    return report


def write_outputs(report, states, frames, table, out_dir: Path, formats):
    out_dir.mkdir(parents=True, exist_ok=True)
    if "csv" in formats:
        d = frames.shape[1]
        with open(out_dir / "frames.csv", "w", newline="") as fh:
            w = csv.writer(fh, lineterminator="\n")
            w.writerow(["t", "a"] + [f"e_{j + 1}" for j in range(d)])
            for s, R in zip(states, frames):
                for a in range(d):
                    w.writerow([_fmt(s.t), a + 1] + [_fmt(x) for x in R[a]])
        with open(out_dir / "defects.csv", "w", newline="") as fh:
            w = csv.writer(fh, lineterminator="\n")
            w.writerow(["t", "a", "b", "defect_commutator", "defect_fd"])
            for s in table:
                for t, dc, df in zip(s.times, s.defect_commutator, s.defect_fd):
                    w.writerow([_fmt(t), s.pair[0] + 1, s.pair[1] + 1, _fmt(dc), _fmt(df)])
    if "json" in formats:
        with open(out_dir / "summary.json", "w") as fh:
            json.dump(report.summary(), fh, indent=2, sort_keys=True)
            fh.write("\n")


def _run_file(path, out, pairs, formats):
    cfg = parse_config(Path(path).read_text(encoding="utf-8"))
    if pairs is not None:
        cfg = cfg.with_overrides(pairs=pairs)
    return run(cfg, out_dir=out, formats=formats)


def _run_one(path, out, pairs, formats):
    """Returns (exit code, message) so it can cross a process boundary."""
    try:
        report = _run_file(path, out, pairs, formats)
    except ConfigError as exc:
        return 2, f"{path}: config error in {exc}"
    except (TransportError, ValueError) as exc:
        return 3, f"{path}: pipeline error: {exc}"
    if report.ok:
        return 0, f"{path}: all checks passed ({report.duration:.2f} s)"
    return 1, f"{path}: failed invariant(s): {', '.join(report.failed)}"


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(prog="frame-transport", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)
    p = sub.add_parser("run", help="run one or more configuration files")
    p.add_argument("configs", nargs="+", metavar="CONFIG")
    p.add_argument("--out", default=None, help="output directory (default: config 'out')")
    p.add_argument("--pairs", default=None,
                   help="cartan | non-cartan | all | a,b;c,d (one-based)")
    p.add_argument("--format", default=None, help="comma list from csv,json")
    p.add_argument("--batch", action="store_true",
                   help="run configs concurrently, one output subdirectory each")
    args = parser.parse_args(argv)

    formats = None
    if args.format is not None:
        formats = tuple(f.strip() for f in args.format.split(",") if f.strip())
        if not formats or any(f not in ("csv", "json") for f in formats):
            parser.error(f"--format must be a subset of csv,json, got {args.format!r}")

    if len(args.configs) > 1 and not args.batch:
        parser.error("several configs need --batch")
    if args.batch:
        base = Path(args.out or "out")
        jobs = [(c, base / Path(c).stem, args.pairs, formats) for c in args.configs]
        with ProcessPoolExecutor() as pool:
            results = list(pool.map(_run_one, *zip(*jobs)))
    else:
        results = [_run_one(args.configs[0], args.out, args.pairs, formats)]

    for code, msg in results:
        print(msg, file=sys.stderr if code else sys.stdout)
    return max(code for code, _ in results)


if __name__ == "__main__":
    sys.exit(main())
