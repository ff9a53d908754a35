"""Command line front end: sweeps, trajectories, backflow scans, fits.

Commands
--------
sweep        work records over an (E, n, k) grid for one quantity
trajectory   intra-collision work values on a fine time grid, per delta_t
blp          non-Markovianity measure per delta_t (coupling forced to 1
             unless overridden)
fit          least-squares fit of a sweep CSV to one of the model families

Configuration comes from an INI file (sections [model], [optimizer],
[sweep], [trajectory], [blp]); command line flags override file values.
Every simulation command requires a seed; there is no entropy default.
Outputs are CSV/JSON with full double precision, and each run writes a
manifest recording the resolved configuration, so identical config + seed
reproduce byte-identical data files regardless of --threads.

Exit codes: 0 success, 2 usage or configuration error, 3 numerical
contract violation.
"""

from __future__ import annotations

import argparse
import configparser
import csv
import json
import os
import sys
import time
from dataclasses import replace

import numpy as np

from . import __version__
from .collision import fine_trajectory
from .ergotropy import (
    QUANTITIES,
    global_ergotropy,
    local_ergotropy,
    max_work_fixed_entanglement,
)
from .fitting import MODELS, fit_curve
from .linalg import ContractViolation
from .model import ModelParams, battery_hamiltonian
from .nonmarkov import blp_measure
from .optimize import OptimizerSettings
from .states import fixed_entanglement_state, locally_passive_state, projector


class UsageError(Exception):
    """Bad flags or configuration; maps to exit code 2."""


# ---------------------------------------------------------------------------
# configuration


DEFAULTS = {
    "model": {"e1": 2.0, "e2": 1.0, "h": 1.0, "k": 1.0, "beta": 10.0, "delta_t": 0.2},
    "optimizer": {"starts": 24, "max_evals": 2000},
    "sweep": {
        "entanglements": "0.0,0.2,0.4,0.6,0.8",
        "collisions": "0:30",
        "couplings": "",
        "quantity": "G_p",
        "phase_sweep": False,
    },
    "trajectory": {
        "entanglement": 0.6,
        "delta_ts": "0.4,1.2,1.4,1.6",
        "collisions": 5,
        "substeps": 200,
        "quantity": "G_p",
    },
    "blp": {"delta_ts": "0.2:1.8:0.2", "grid_points": 200, "k": 1.0, "collisions": 1},
}


def parse_number_list(text: str, integer: bool = False) -> list:
    """Comma-separated numbers; an item 'lo:hi' or 'lo:hi:step' expands to an
    inclusive range (default step 1)."""
    out: list = []
    for item in (t.strip() for t in str(text).split(",")):
        if not item:
            continue
        try:
            if ":" in item:
                parts = item.split(":")
                if len(parts) not in (2, 3):
                    raise ValueError(item)
                lo, hi = float(parts[0]), float(parts[1])
                step = float(parts[2]) if len(parts) == 3 else 1.0
                if step <= 0 or hi < lo:
                    raise ValueError(item)
                count = int(np.floor((hi - lo) / step + 1e-9))
                out.extend(lo + i * step for i in range(count + 1))
            else:
                out.append(float(item))
        except ValueError:
            raise UsageError(f"cannot parse list item {item!r}")
    if integer:
        ints = [int(round(v)) for v in out]
        if any(abs(v - i) > 1e-9 for v, i in zip(out, ints)):
            raise UsageError(f"expected integers in list {text!r}")
        return ints
    return out


def _read_ini(path: str) -> configparser.ConfigParser:
    ini = configparser.ConfigParser()
    if not os.path.exists(path):
        raise UsageError(f"config file not found: {path}")
    try:
        ini.read(path)
    except configparser.Error as exc:
        raise UsageError(f"cannot parse config file {path}: {exc}")
    return ini


def resolve_config(args) -> dict:
    """Merge defaults, INI file and command line flags (flags win)."""
    cfg = {section: dict(values) for section, values in DEFAULTS.items()}
    if getattr(args, "config", None):
        ini = _read_ini(args.config)
        for section in cfg:
            if ini.has_section(section):
                for key, raw in ini.items(section):
                    if key not in cfg[section] and not (section == "optimizer" and key == "seed"):
                        raise UsageError(f"unknown config option [{section}] {key}")
                    base = cfg[section].get(key)
                    if isinstance(base, bool):
                        cfg[section][key] = raw.strip().lower() in ("1", "true", "yes", "on")
                    elif isinstance(base, int):
                        cfg[section][key] = int(raw)
                    elif isinstance(base, float):
                        cfg[section][key] = float(raw)
                    else:
                        cfg[section][key] = raw
        if ini.has_option("optimizer", "seed"):
            cfg["optimizer"]["seed"] = ini.getint("optimizer", "seed")

    overrides = {
        ("sweep", "quantity"): getattr(args, "quantity", None),
        ("sweep", "entanglements"): getattr(args, "entanglements", None),
        ("sweep", "collisions"): getattr(args, "collisions", None),
        ("sweep", "couplings"): getattr(args, "couplings", None),
        ("trajectory", "quantity"): getattr(args, "quantity", None),
        ("trajectory", "entanglement"): getattr(args, "entanglement", None),
        ("trajectory", "delta_ts"): getattr(args, "delta_ts", None),
        ("trajectory", "collisions"): getattr(args, "n_collisions", None),
        ("trajectory", "substeps"): getattr(args, "substeps", None),
        ("blp", "delta_ts"): getattr(args, "delta_ts", None),
        ("blp", "grid_points"): getattr(args, "grid_points", None),
        ("blp", "k"): getattr(args, "k", None),
        ("blp", "collisions"): getattr(args, "n_collisions", None),
        ("optimizer", "starts"): getattr(args, "starts", None),
        ("optimizer", "max_evals"): getattr(args, "max_evals", None),
        ("optimizer", "seed"): getattr(args, "seed", None),
    }
    for (section, key), value in overrides.items():
        if value is not None:
            cfg[section][key] = value
    if getattr(args, "phase_sweep", False):
        cfg["sweep"]["phase_sweep"] = True

    try:
        cfg["params"] = ModelParams(**cfg["model"])
    except ValueError as exc:
        raise UsageError(f"invalid model parameters: {exc}")
    if args.command in ("sweep", "trajectory", "blp") and "seed" not in cfg["optimizer"]:
        raise UsageError("a seed is required (flag --seed or [optimizer] seed)")
    return cfg


def optimizer_settings(cfg: dict) -> OptimizerSettings:
    opt = cfg["optimizer"]
    return OptimizerSettings(
        starts=int(opt["starts"]),
        seed=int(opt["seed"]),
        max_evals=int(opt["max_evals"]),
    )


# ---------------------------------------------------------------------------
# output helpers


def _csv_cell(value) -> str:
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    if isinstance(value, (float, np.floating)):
        return "%.17g" % value
    return str(value)


def write_csv(path: str, header: list[str], rows) -> None:
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(header)
        for row in rows:
            writer.writerow([_csv_cell(v) for v in row])


def write_manifest(output: str, command: str, cfg: dict, threads: int, started: float, outputs: list[str]) -> str:
    manifest = {
        "command": command,
        "version": __version__,
        "seed": cfg["optimizer"].get("seed"),
        "threads": threads,
        "config": {
            "model": cfg["model"],
            "optimizer": cfg["optimizer"],
            "sweep": cfg["sweep"],
            "trajectory": cfg["trajectory"],
            "blp": cfg["blp"],
        },
        "outputs": outputs,
        "wall_time_s": time.time() - started,
    }
    path = output + ".manifest.json"
    with open(path, "w") as fh:
        json.dump(manifest, fh, indent=2, sort_keys=True)
        fh.write("\n")
    return path


def _parallel_map(func, items, threads: int) -> list:
    if threads <= 1 or len(items) <= 1:
        return [func(item) for item in items]
    from concurrent.futures import ThreadPoolExecutor

    with ThreadPoolExecutor(max_workers=threads) as pool:
        return list(pool.map(func, items))


# ---------------------------------------------------------------------------
# commands


def cmd_sweep(args) -> int:
    started = time.time()
    cfg = resolve_config(args)
    params: ModelParams = cfg["params"]
    quantity = cfg["sweep"]["quantity"]
    if quantity not in QUANTITIES:
        raise UsageError(f"quantity must be one of {QUANTITIES}, got {quantity!r}")
    e_list = parse_number_list(cfg["sweep"]["entanglements"])
    n_list = parse_number_list(cfg["sweep"]["collisions"], integer=True)
    k_list = parse_number_list(cfg["sweep"]["couplings"]) or [params.k]
    if not e_list:
        raise UsageError("empty entanglement list")
    if not n_list:
        raise UsageError("empty collision list")
    base_settings = optimizer_settings(cfg)
    phase_sweep = bool(cfg["sweep"]["phase_sweep"])

    grid = [
        (idx, e, n, k)
        for idx, (e, n, k) in enumerate(
            (e, n, k) for e in e_list for n in n_list for k in k_list
        )
    ]

    def run_point(point):
        idx, e, n, k = point
        record = max_work_fixed_entanglement(
            e,
            n,
            replace(params, k=k),
            quantity,
            settings=base_settings.for_grid_index(idx),
            phase_sweep=phase_sweep,
        )
        rep = record.report
        return (
            record.quantity,
            record.entanglement,
            record.n,
            record.coupling,
            record.delta_t,
            record.value,
            rep.n_starts if rep else 0,
            rep.best_start if rep else 0,
            rep.converged if rep else True,
        )

    rows = _parallel_map(run_point, grid, args.threads)
    header = ["quantity", "E", "n", "k", "delta_t", "value", "starts", "best_start", "converged"]
    write_csv(args.output, header, rows)
    write_manifest(args.output, "sweep", cfg, args.threads, started, [args.output])
    return 0


def _trajectory_initial_state(quantity: str, entanglement: float) -> np.ndarray:
    if quantity == "G_p":
        return locally_passive_state(entanglement)
    # For G and L the trajectory follows the noiseless maximizer of the
    # fixed-entanglement family (the Schmidt state with the larger weight on
    # the upper level, i.e. the zero-angle chart point).
    return fixed_entanglement_state(entanglement, np.zeros(6))


def cmd_trajectory(args) -> int:
    started = time.time()
    cfg = resolve_config(args)
    params: ModelParams = cfg["params"]
    tcfg = cfg["trajectory"]
    quantity = tcfg["quantity"]
    if quantity not in QUANTITIES:
        raise UsageError(f"quantity must be one of {QUANTITIES}, got {quantity!r}")
    dt_list = parse_number_list(tcfg["delta_ts"])
    if not dt_list:
        raise UsageError("empty delta_t list")
    n = int(tcfg["collisions"])
    substeps = int(tcfg["substeps"])
    entanglement = float(tcfg["entanglement"])
    if substeps < 1:
        raise UsageError(f"substeps must be >= 1, got {substeps}")
    if n < 0:
        raise UsageError(f"collisions must be >= 0, got {n}")
    rho0 = projector(_trajectory_initial_state(quantity, entanglement))

    def run_dt(dt):
        p_dt = replace(params, delta_t=float(dt))
        traj = fine_trajectory(rho0, n, substeps, p_dt)
        if quantity == "L":
            values = [local_ergotropy(s, p_dt) for s in traj.states]
        else:
            h12 = battery_hamiltonian(p_dt)
            values = [global_ergotropy(s, h12) for s in traj.states]
        return [
            (float(dt), t, int(ci), v)
            for t, ci, v in zip(traj.times, traj.collision_index, values)
        ]

    blocks = _parallel_map(run_dt, dt_list, args.threads)
    rows = [row for block in blocks for row in block]
    write_csv(args.output, ["delta_t", "t", "collision_index", "value"], rows)
    write_manifest(args.output, "trajectory", cfg, args.threads, started, [args.output])
    return 0


def cmd_blp(args) -> int:
    started = time.time()
    cfg = resolve_config(args)
    params: ModelParams = cfg["params"]
    bcfg = cfg["blp"]
    dt_list = parse_number_list(bcfg["delta_ts"])
    if not dt_list:
        raise UsageError("empty delta_t list")
    grid_points = int(bcfg["grid_points"])
    if grid_points < 2:
        raise UsageError(f"grid_points must be >= 2, got {grid_points}")
    collisions = int(bcfg["collisions"])
    if collisions < 1:
        raise UsageError(f"collisions must be >= 1, got {collisions}")
    run_params = replace(params, k=float(bcfg["k"]))
    base_settings = optimizer_settings(cfg)

    def run_dt(point):
        idx, dt = point
        result = blp_measure(
            float(dt),
            run_params,
            settings=base_settings.for_grid_index(idx),
            grid_points=grid_points,
            collisions=collisions,
        )
        return result

    results = _parallel_map(run_dt, list(enumerate(dt_list)), args.threads)
    rows = [
        (r.delta_t, r.q_n, grid_points, r.report.n_starts, r.report.converged)
        for r in results
    ]
    write_csv(args.output, ["delta_t", "Q_N", "grid_points", "starts", "converged"], rows)
    outputs = [args.output]
    if args.trace_output:
        stem, ext = os.path.splitext(args.trace_output)
        for r in results:
            path = f"{stem}_dt_{r.delta_t:g}{ext or '.csv'}"
            write_csv(path, ["t", "D"], [(t, d) for t, d in r.lambda_trace])
            outputs.append(path)
    write_manifest(args.output, "blp", cfg, args.threads, started, outputs)
    return 0


def _load_fit_data(path: str, n_filter, quantity_filter) -> list[tuple[float, float]]:
    if not os.path.exists(path):
        raise UsageError(f"input file not found: {path}")
    data = []
    with open(path, newline="") as fh:
        reader = csv.DictReader(fh)
        missing = {"E", "value"} - set(reader.fieldnames or ())
        if missing:
            raise UsageError(f"input CSV lacks required columns: {sorted(missing)}")
        for row in reader:
            try:
                if n_filter is not None and int(float(row.get("n", "nan"))) != n_filter:
                    continue
                if quantity_filter is not None and row.get("quantity") != quantity_filter:
                    continue
                data.append((float(row["E"]), float(row["value"])))
            except (TypeError, ValueError):
                raise UsageError(f"malformed CSV value near line {reader.line_num} of {path}")
    if not data:
        raise UsageError("no data rows left after filtering")
    return data


def cmd_fit(args) -> int:
    started = time.time()
    if args.model not in MODELS:
        raise UsageError(f"unknown model {args.model!r}; choose from {sorted(MODELS)}")
    data = _load_fit_data(args.input, args.n, args.quantity)
    try:
        result = fit_curve(args.model, data, bootstrap=args.bootstrap)
    except ValueError as exc:
        raise UsageError(str(exc))
    payload = {
        "model": result.model,
        "params": result.params,
        "confidence95": result.confidence95,
        "residual": result.residual,
        "converged": result.converged,
    }
    with open(args.output, "w") as fh:
        json.dump(payload, fh, indent=2)
        fh.write("\n")
    manifest = {
        "command": "fit",
        "version": __version__,
        "model": args.model,
        "input": args.input,
        "filters": {"n": args.n, "quantity": args.quantity},
        "outputs": [args.output],
        "wall_time_s": time.time() - started,
    }
    with open(args.output + ".manifest.json", "w") as fh:
        json.dump(manifest, fh, indent=2, sort_keys=True)
        fh.write("\n")
    return 0


# ---------------------------------------------------------------------------
# argument parsing


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="qbattery",
        description="Deterministic two-qubit battery simulator with collision noise.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def add_common(p, with_optimizer=True):
        p.add_argument("--config", help="INI configuration file")
        p.add_argument("--seed", type=int, help="base RNG seed (required)")
        p.add_argument("--threads", type=int, default=os.cpu_count() or 1)
        p.add_argument("--output", required=True, help="output CSV path")
        if with_optimizer:
            p.add_argument("--starts", type=int, help="multi-start count")
            p.add_argument("--max-evals", dest="max_evals", type=int)

    p_sweep = sub.add_parser("sweep", help="work records over an (E, n, k) grid")
    add_common(p_sweep)
    p_sweep.add_argument("--quantity", choices=QUANTITIES)
    p_sweep.add_argument("--entanglements", help="E list, e.g. '0:1:0.1'")
    p_sweep.add_argument("--collisions", help="n list, e.g. '0:30' or '0,2,4,7,30'")
    p_sweep.add_argument("--couplings", help="k list; empty uses the model k")
    p_sweep.add_argument("--phase-sweep", dest="phase_sweep", action="store_true")
    p_sweep.set_defaults(func=cmd_sweep)

    p_traj = sub.add_parser("trajectory", help="fine-grained work trajectory per delta_t")
    add_common(p_traj, with_optimizer=False)
    p_traj.add_argument("--quantity", choices=QUANTITIES)
    p_traj.add_argument("--entanglement", type=float)
    p_traj.add_argument("--delta-ts", dest="delta_ts", help="delta_t list")
    p_traj.add_argument("--collisions", dest="n_collisions", type=int)
    p_traj.add_argument("--substeps", type=int)
    p_traj.set_defaults(func=cmd_trajectory)

    p_blp = sub.add_parser("blp", help="non-Markovianity per delta_t")
    add_common(p_blp)
    p_blp.add_argument("--delta-ts", dest="delta_ts", help="delta_t list")
    p_blp.add_argument("--grid-points", dest="grid_points", type=int)
    p_blp.add_argument("--k", type=float, help="coupling (default 1)")
    p_blp.add_argument(
        "--collisions", dest="n_collisions", type=int,
        help="extension: scan backflow across this many collisions (default 1)",
    )
    p_blp.add_argument("--trace-output", dest="trace_output", help="per-pair (t, D) dump stem")
    p_blp.set_defaults(func=cmd_blp)

    p_fit = sub.add_parser("fit", help="fit a sweep CSV to a model family")
    p_fit.add_argument("--model", required=True)
    p_fit.add_argument("--input", required=True, help="sweep CSV to fit")
    p_fit.add_argument("--output", required=True, help="result JSON path")
    p_fit.add_argument("--n", type=int, help="keep only rows with this collision count")
    p_fit.add_argument("--quantity", help="keep only rows with this quantity tag")
    p_fit.add_argument(
        "--bootstrap", type=int, default=0,
        help="confidence from this many residual-resampling refits instead of "
        "the linearized covariance",
    )
    p_fit.set_defaults(func=cmd_fit)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except ContractViolation as exc:
        print(f"numerical contract violation: {exc}", file=sys.stderr)
        return 3
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
