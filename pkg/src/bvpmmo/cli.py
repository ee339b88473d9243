"""Command-line front end: simulation runs, parameter sweeps, and JSON reports.

Configuration comes from an optional JSON file (``--config``) merged with
command-line flags (flags win).  All numeric file output uses 17 significant
digits so doubles round-trip losslessly, and no timestamps are written:
identical configurations produce byte-identical outputs.

Exit codes: 0 success, 1 runtime/numerical failure, 2 validation failure.
"""

from __future__ import annotations

import argparse
import copy
import json
import math
import sys
from concurrent.futures import ProcessPoolExecutor
from pathlib import Path

import numpy as np

from . import analysis, canard, slowfast
from .errors import BvpError, IntegrationError
from .integrate import EventSpec, IntegratorConfig, integrate
from .models import (
    ParameterSet,
    PrototypeParams,
    jac_autonomous,
    jac_forced,
    jac_rescaled,
    jac_standard,
    rhs_autonomous,
    rhs_forced,
    rhs_generalized,
    rhs_prototype,
    rhs_rescaled,
    rhs_standard,
)

EXIT_OK = 0
EXIT_RUNTIME = 1
EXIT_VALIDATION = 2

DEFAULT_CONFIG = {
    "model": "autonomous",
    "params": {"epsilon": 0.1, "omega": 0.1, "k1": 0.9, "b0": 0.2, "b1": 0.1},
    "prototype": {},
    "initial_state": None,
    "t_span": [0.0, 200.0],
    "integrator": {"rtol": 1e-8, "atol": 1e-10, "event_tol": 1e-10, "max_steps": 5_000_000},
    "analysis": {
        "transient_periods": 20.0,
        "collect_periods": 8.0,
        "large_threshold": 1.0,
        "recurrence_tol": 1e-4,
        "burst_threshold": 5,
        "torus_min_points": 200,
    },
    "output": {"dir": ".", "format": "csv"},
}

MODEL_COLUMNS = {
    "forced": ("t", "x", "y"),
    "autonomous": ("t", "x", "y", "p", "z"),
    "standard": ("t", "X", "Y", "P", "Z"),
    "rescaled": ("t", "Xb", "Yb", "Pb", "Zb"),
    "prototype": ("t", "v", "z", "w"),
    "generalized": ("t", "x", "y", "z"),
}


def _fmt(v: float) -> str:
    return f"{float(v):.17g}"


def _deep_merge(base: dict, extra: dict) -> dict:
    out = copy.deepcopy(base)
    for k, v in extra.items():
        if isinstance(v, dict) and isinstance(out.get(k), dict):
            out[k] = _deep_merge(out[k], v)
        else:
            out[k] = copy.deepcopy(v)
    return out


def load_config(path: str | None, overrides: dict) -> dict:
    cfg = copy.deepcopy(DEFAULT_CONFIG)
    if path:
        with open(path) as fh:
            loaded = json.load(fh)
        loaded.pop("derived", None)  # metadata echoes are valid configs
        cfg = _deep_merge(cfg, loaded)
    return _deep_merge(cfg, overrides)


def _params_from(cfg: dict) -> ParameterSet:
    p = cfg["params"]
    return ParameterSet(
        epsilon=float(p["epsilon"]),
        omega=float(p["omega"]),
        k1=float(p["k1"]),
        b0=float(p["b0"]),
        b1=float(p["b1"]),
    )


def _integrator_config(cfg: dict) -> IntegratorConfig:
    icfg = cfg["integrator"]
    kwargs = {
        k: icfg[k]
        for k in ("rtol", "atol", "max_step", "event_tol", "max_steps")
        if k in icfg
    }
    if "max_steps" in kwargs:
        kwargs["max_steps"] = int(kwargs["max_steps"])
    return IntegratorConfig(**kwargs)


def _signature_config(cfg: dict) -> analysis.SignatureConfig:
    a = cfg["analysis"]
    return analysis.SignatureConfig(
        large_threshold=float(a["large_threshold"]),
        recurrence_tol=float(a["recurrence_tol"]),
        burst_threshold=int(a["burst_threshold"]),
    )


def _model_functions(cfg: dict, params: ParameterSet | None):
    name = cfg["model"]
    if name == "forced":
        return (lambda t, y: rhs_forced(t, y, params)), (lambda t, y: jac_forced(t, y, params))
    if name == "autonomous":
        return (lambda t, y: rhs_autonomous(t, y, params)), (
            lambda t, y: jac_autonomous(t, y, params)
        )
    if name == "standard":
        return (lambda t, y: rhs_standard(t, y, params)), (
            lambda t, y: jac_standard(t, y, params)
        )
    if name == "rescaled":
        return (lambda t, y: rhs_rescaled(t, y, params)), (
            lambda t, y: jac_rescaled(t, y, params)
        )
    proto = PrototypeParams(**cfg.get("prototype", {}))
    if name == "prototype":
        return (lambda t, y: rhs_prototype(t, y, proto)), None
    if name == "generalized":
        return (lambda t, y: rhs_generalized(t, y, proto)), None
    raise ValueError(f"unknown model {name!r}")


def _initial_state(cfg: dict, params: ParameterSet | None) -> np.ndarray:
    if cfg["initial_state"] is not None:
        return np.asarray(cfg["initial_state"], dtype=float)
    name = cfg["model"]
    if name == "forced":
        return np.array([-1.0, 0.0])
    if name == "autonomous":
        return analysis.default_initial_state(params, "original")
    if name == "standard":
        return analysis.default_initial_state(params, "standard")
    raise ValueError(f"model {name!r} needs an explicit initial_state")


def _write_trajectory(traj, columns, out_dir: Path, fmt: str) -> None:
    out_dir.mkdir(parents=True, exist_ok=True)
    if fmt == "csv":
        with open(out_dir / "trajectory.csv", "w") as fh:
            fh.write("# columns: " + ",".join(columns) + "\n")
            for t, row in zip(traj.t, traj.y):
                fh.write(",".join([_fmt(t)] + [_fmt(v) for v in row]) + "\n")
        with open(out_dir / "events.csv", "w") as fh:
            fh.write("# columns: t,kind,direction," + ",".join(columns[1:]) + "\n")
            for e in traj.events:
                fh.write(
                    ",".join(
                        [_fmt(e.t), e.kind, str(e.direction)] + [_fmt(v) for v in e.state]
                    )
                    + "\n"
                )
    else:
        payload = {
            "columns": list(columns),
            "t": [float(v) for v in traj.t],
            "states": [[float(v) for v in row] for row in traj.y],
            "events": [
                {
                    "t": float(e.t),
                    "kind": e.kind,
                    "direction": e.direction,
                    "state": [float(v) for v in e.state],
                }
                for e in traj.events
            ],
        }
        (out_dir / "trajectory.json").write_text(json.dumps(payload, indent=1))


def _write_metadata(cfg, out_dir: Path, derived: dict) -> None:
    meta = copy.deepcopy(cfg)
    meta["derived"] = derived
    (out_dir / "metadata.json").write_text(json.dumps(meta, indent=1, sort_keys=True))


def cmd_simulate(cfg: dict) -> int:
    span = cfg["t_span"]
    if len(span) != 2 or not float(span[1]) > float(span[0]):
        raise ValueError("t_span must be [t0, t1] with t1 > t0")
    name = cfg["model"]
    if name not in MODEL_COLUMNS:
        raise ValueError(f"unknown model {name!r}")
    params = _params_from(cfg) if name not in ("prototype", "generalized") else None
    fun, jac = _model_functions(cfg, params)
    y0 = _initial_state(cfg, params)
    columns = MODEL_COLUMNS[name]
    if len(y0) != len(columns) - 1:
        raise ValueError(f"initial state must have {len(columns) - 1} components")
    icfg = _integrator_config(cfg)
    events = [EventSpec(lambda t, y: fun(t, y)[0], kind="local-extremum", direction=0)]
    if name == "autonomous":
        events.append(EventSpec(lambda t, y: y[3], kind="section-crossing", direction=+1))
    elif name == "standard":
        events.append(
            EventSpec(lambda t, y: y[3] - params.mu, kind="section-crossing", direction=+1)
        )

    out_dir = Path(cfg["output"]["dir"])
    fmt = cfg["output"]["format"]
    derived = {"version": 1, "truncated": False}
    if params is not None:
        derived["mu"] = params.mu
    try:
        traj = integrate(
            fun, y0, (float(span[0]), float(span[1])), icfg, events=events, jac=jac,
            chart=name, params=params,
        )
    except IntegrationError as err:
        traj = err.trajectory
        derived["truncated"] = True
        derived["failure"] = str(err)
        if traj is not None:
            _write_trajectory(traj, columns, out_dir, fmt)
            derived["n_steps"] = len(traj.t)
        out_dir.mkdir(parents=True, exist_ok=True)
        _write_metadata(cfg, out_dir, derived)
        print(json.dumps({"error": {"type": type(err).__name__, "message": str(err)}}))
        return EXIT_RUNTIME
    derived["n_steps"] = len(traj.t)
    derived["n_events"] = len(traj.events)
    derived["grazings"] = traj.grazings
    _write_trajectory(traj, columns, out_dir, fmt)
    _write_metadata(cfg, out_dir, derived)
    print(json.dumps({"ok": True, "out": str(out_dir), "n_steps": len(traj.t)}))
    return EXIT_OK


def _sweep_row(cfg_json: str, param: str, value: float) -> dict:
    """Worker for one sweep point; a pure function of its JSON-encoded config."""
    cfg = json.loads(cfg_json)
    cfg["params"][param] = value
    row = {"param": param, "value": value}
    try:
        params = _params_from(cfg)
        row["mu"] = params.mu
        a = cfg["analysis"]
        traj = analysis.attractor_trajectory(
            params,
            _integrator_config(cfg),
            transient_periods=float(a["transient_periods"]),
            collect_periods=float(a["collect_periods"]),
            y0=cfg["initial_state"],
        )
        sig = analysis.extract_signature(traj, _signature_config(cfg))
        row["signature"] = sig.compact()
        row["n_large"] = sig.n_large
        row["n_small"] = sig.n_small
        row["period_time"] = sig.period_time if sig.period_time is not None else ""
        row["bursting"] = analysis.detect_bursting(sig, int(a["burst_threshold"]))
        pts = analysis.section_points(traj)
        if len(pts) >= int(a["torus_min_points"]):
            row["torus"] = bool(
                analysis.detect_torus(pts, int(a["torus_min_points"])).is_torus
            )
        else:
            row["torus"] = False
        row["error"] = ""
    except Exception as err:  # per-row failures leave the sweep running
        row.setdefault("signature", "")
        row.setdefault("mu", "")
        row["error"] = f"{type(err).__name__}: {err}"
    return row


SWEEP_COLUMNS = (
    "param", "value", "mu", "signature", "n_large", "n_small",
    "period_time", "torus", "bursting", "error",
)


def cmd_sweep(cfg: dict, param: str, values: list[float], jobs: int) -> int:
    if not values:
        raise ValueError("sweep needs a non-empty list of values")
    if len(set(values)) != len(values) or not all(math.isfinite(v) for v in values):
        raise ValueError("sweep values must be finite and distinct")
    if param not in cfg["params"]:
        raise ValueError(f"unknown sweep parameter {param!r}")
    values = sorted(values)
    cfg_json = json.dumps(cfg)
    if jobs > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            rows = list(pool.map(_sweep_row, [cfg_json] * len(values), [param] * len(values), values))
    else:
        rows = [_sweep_row(cfg_json, param, v) for v in values]

    out_dir = Path(cfg["output"]["dir"])
    out_dir.mkdir(parents=True, exist_ok=True)
    with open(out_dir / "summary.csv", "w") as fh:
        fh.write("# columns: " + ",".join(SWEEP_COLUMNS) + "\n")
        for row in rows:
            cells = []
            for c in SWEEP_COLUMNS:
                v = row.get(c, "")
                cells.append(_fmt(v) if isinstance(v, float) else str(v))
            fh.write(",".join(cells) + "\n")
    for row in rows:
        print(
            f"{row['param']}={row['value']:g} mu={row['mu'] if row['mu'] != '' else '?'} "
            f"signature={row.get('signature', '')} torus={row.get('torus', '')} "
            f"bursting={row.get('bursting', '')}"
            + (f" ERROR: {row['error']}" if row.get("error") else "")
        )
    failed = sum(1 for r in rows if r.get("error"))
    print(json.dumps({"ok": failed == 0, "rows": len(rows), "failed": failed, "out": str(out_dir)}))
    return EXIT_OK if failed == 0 else EXIT_RUNTIME


def _complexify(eigs):
    return [[z.real, z.imag] for z in eigs]


def cmd_folds(cfg: dict) -> int:
    params = _params_from(cfg)
    eqs = slowfast.folded_equilibria(params)
    print(
        json.dumps(
            {
                "mu": params.mu,
                "count": len(eqs),
                "equilibria": [
                    {
                        "location": list(e.location),
                        "branch": e.branch,
                        "eigenvalues": _complexify(e.eigenvalues),
                        "classification": e.classification,
                    }
                    for e in eqs
                ],
            },
            indent=1,
        )
    )
    return EXIT_OK


def cmd_canard(cfg: dict, numeric: bool, oracle_epsilon: float | None) -> int:
    params = _params_from(cfg)
    zb, z = canard.z_critical(params)
    pc = canard.p_critical(params)
    report = {
        "z_bar_critical": zb,
        "z_critical": z,
        "p_critical": list(pc) if pc is not None else None,
        "in_domain": pc is not None,
    }
    if numeric:
        eps = oracle_epsilon if oracle_epsilon is not None else params.epsilon
        res = canard.numeric_canard_split(params.k1, eps)
        report["oracle"] = {
            "epsilon": res.epsilon,
            "z_bar_analytic": res.z_bar_cr_analytic,
            "z_bar_numeric": res.z_bar_cr_numeric,
            "ratio": res.ratio,
        }
    print(json.dumps(report, indent=1))
    return EXIT_OK


def cmd_returnmap(cfg: dict, p0: float | None, increasing: bool, offset: float) -> int:
    params = _params_from(cfg)
    if p0 is None:
        p0 = 0.5 * params.b1
    sample = analysis.return_map_numeric(
        params, p0, increasing=increasing, section_offset=offset,
        config=_integrator_config(cfg),
    )
    print(
        json.dumps(
            {
                "w0": sample.w0,
                "p0": sample.p0,
                "w1_numeric": sample.w1_numeric,
                "w1_analytic": sample.w1_analytic,
                "p1_numeric": sample.p1_numeric,
                "p1_analytic": sample.p1_analytic,
                "walls_crossed": sample.walls_crossed,
                "t_return": sample.t_return,
                "delta_w": analysis.delta_w(params.k1, params.omega),
            },
            indent=1,
        )
    )
    return EXIT_OK


def cmd_hopf(k1: float, epsilon: float) -> int:
    h = analysis.hopf_locate(k1, epsilon)
    print(
        json.dumps(
            {
                "k1": h.k1,
                "epsilon": h.epsilon,
                "B0": h.b0,
                "x_eq": h.x_eq,
                "omega0": h.omega0,
                "l1": h.l1,
                "criticality": h.criticality,
            },
            indent=1,
        )
    )
    return EXIT_OK


def cmd_bautin(epsilon: float) -> int:
    k1_star, b0_star = analysis.bautin_locate(epsilon)
    print(json.dumps({"k1": k1_star, "B0": b0_star, "epsilon": epsilon}, indent=1))
    return EXIT_OK


def cmd_classify(cfg: dict, path: str) -> int:
    data = np.loadtxt(path, delimiter=",", comments="#", ndmin=2)
    if data.shape[1] < 2:
        raise ValueError("classify expects a CSV with t,x columns")
    sig = analysis.signature_from_series(data[:, 0], data[:, 1], _signature_config(cfg))
    print(
        json.dumps(
            {
                "kind": sig.kind,
                "signature": sig.compact(),
                "pairs": [list(p) for p in sig.pairs],
                "periodic": sig.periodic,
                "n_large": sig.n_large,
                "n_small": sig.n_small,
            },
            indent=1,
        )
    )
    return EXIT_OK


def _add_common(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--config", help="JSON configuration file")
    parser.add_argument("--out", help="output directory")
    parser.add_argument("--format", choices=("csv", "json"), help="trajectory file format")
    parser.add_argument("--rtol", type=float, help="relative tolerance")
    parser.add_argument("--atol", type=float, help="absolute tolerance")
    parser.add_argument("--transient-periods", type=float, help="forcing periods to discard")
    parser.add_argument("--large-threshold", type=float, help="LAO/SAO span threshold")
    for name in ("epsilon", "omega", "k1", "b0", "b1"):
        parser.add_argument(f"--{name}", type=float, help=f"model parameter {name}")


def _overrides_from(args: argparse.Namespace) -> dict:
    o: dict = {"params": {}, "integrator": {}, "analysis": {}, "output": {}}
    for name in ("epsilon", "omega", "k1", "b0", "b1"):
        v = getattr(args, name, None)
        if v is not None:
            o["params"][name] = v
    if getattr(args, "rtol", None) is not None:
        o["integrator"]["rtol"] = args.rtol
    if getattr(args, "atol", None) is not None:
        o["integrator"]["atol"] = args.atol
    if getattr(args, "transient_periods", None) is not None:
        o["analysis"]["transient_periods"] = args.transient_periods
    if getattr(args, "large_threshold", None) is not None:
        o["analysis"]["large_threshold"] = args.large_threshold
    if getattr(args, "out", None) is not None:
        o["output"]["dir"] = args.out
    if getattr(args, "format", None) is not None:
        o["output"]["format"] = args.format
    if getattr(args, "model", None) is not None:
        o["model"] = args.model
    if getattr(args, "t_span", None) is not None:
        o["t_span"] = args.t_span
    if getattr(args, "initial_state", None) is not None:
        o["initial_state"] = args.initial_state
    return {k: v for k, v in o.items() if v or not isinstance(v, dict)}


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="bvpmmo",
        description="Forced Bonhoeffer-van der Pol oscillator: simulation and analysis",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("simulate", help="integrate one run and write trajectory files")
    _add_common(p)
    p.add_argument("--model", choices=sorted(MODEL_COLUMNS), help="vector field to integrate")
    p.add_argument("--t-span", type=float, nargs=2, metavar=("T0", "T1"))
    p.add_argument("--initial-state", type=float, nargs="+", metavar="X")

    p = sub.add_parser("sweep", help="classify attractors along a parameter range")
    _add_common(p)
    p.add_argument("--param", default="b0", help="swept parameter name")
    p.add_argument("--values", help="comma-separated list of values")
    p.add_argument("--start", type=float)
    p.add_argument("--stop", type=float)
    p.add_argument("--count", type=int)
    p.add_argument("--jobs", type=int, default=1, help="parallel workers")
    p.add_argument("--collect-periods", type=float, help="forcing periods to classify")

    p = sub.add_parser("folds", help="folded equilibria of the desingularized slow flow")
    _add_common(p)

    p = sub.add_parser("canard", help="canard-critical values (and optional shooting oracle)")
    _add_common(p)
    p.add_argument("--numeric", action="store_true", help="also run the splitting oracle")
    p.add_argument("--oracle-epsilon", type=float, help="epsilon for the oracle run")

    p = sub.add_parser("returnmap", help="one numeric global return vs the analytic map")
    _add_common(p)
    p.add_argument("--p0", type=float, help="starting P on the forcing circle")
    p.add_argument("--increasing", action="store_true", help="P increasing at start")
    p.add_argument("--offset", type=float, default=-0.2, help="section X offset")

    p = sub.add_parser("hopf", help="planar Hopf point for k1, epsilon")
    p.add_argument("k1", type=float)
    p.add_argument("epsilon", type=float)

    p = sub.add_parser("bautin", help="degenerate-Hopf point for epsilon")
    p.add_argument("epsilon", type=float)

    p = sub.add_parser("classify", help="signature of an external t,x CSV")
    _add_common(p)
    p.add_argument("csv", help="input CSV with t,x columns")

    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        if args.command in ("hopf", "bautin"):
            if args.command == "hopf":
                return cmd_hopf(args.k1, args.epsilon)
            return cmd_bautin(args.epsilon)
        cfg = load_config(args.config, _overrides_from(args))
        if getattr(args, "collect_periods", None) is not None:
            cfg["analysis"]["collect_periods"] = args.collect_periods
        if args.command == "simulate":
            return cmd_simulate(cfg)
        if args.command == "sweep":
            if args.values:
                values = [float(v) for v in args.values.split(",") if v.strip()]
            elif args.count:
                if args.start is None or args.stop is None:
                    raise ValueError("sweep needs --values or --start/--stop/--count")
                values = list(np.linspace(args.start, args.stop, args.count))
            else:
                raise ValueError("sweep needs --values or --start/--stop/--count")
            return cmd_sweep(cfg, args.param, values, args.jobs)
        if args.command == "folds":
            return cmd_folds(cfg)
        if args.command == "canard":
            return cmd_canard(cfg, args.numeric, args.oracle_epsilon)
        if args.command == "returnmap":
            return cmd_returnmap(cfg, args.p0, args.increasing, args.offset)
        if args.command == "classify":
            return cmd_classify(cfg, args.csv)
        raise ValueError(f"unknown command {args.command!r}")
    except (ValueError, OSError, json.JSONDecodeError) as err:
        print(json.dumps({"error": {"type": type(err).__name__, "message": str(err)}}))
        return EXIT_VALIDATION
    except BvpError as err:
        print(json.dumps({"error": {"type": type(err).__name__, "message": str(err)}}))
        return EXIT_RUNTIME


if __name__ == "__main__":
    sys.exit(main())
