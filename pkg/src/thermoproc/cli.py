"""Reproducible experiment runner.

Subcommands:

  thermoproc run <config.json>      run one experiment from a config file
  thermoproc validate [...]         run the validation checks, write a report
  thermoproc fig <fig2|fig3|cooling> [...]  shorthand with flags mirroring
                                    the config fields

Configs are JSON with a versioned schema; all physical inputs are
dimensionless products (beta*E, beta*W, ...).  Runs are fully deterministic:
identical configs produce byte-identical data files (the manifest echoes
per-file SHA-256 digests; only its wall-clock field varies between runs).
CSV floats carry 17 significant digits so they round-trip exactly.

``THERMOPROC_THREADS`` (positive integer) caps the worker pool used for
independent grid points; results are assembled in grid order either way.

Exit codes: 0 success, 2 config error, 3 validation failure, 4 I/O error.
"""

from __future__ import annotations

import argparse
import hashlib
import json
import math
import os
import sys
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from . import __version__, cooling, reachable, validation, workx
from .memory import closed_form_p_d, simulate_memory_beta_swap
from .combinatorics import catalan_tail_bound, delta_d

SCHEMA_VERSION = 1

EXPERIMENTS = ("fig2", "fig3", "cooling-coherent", "cooling-incoherent",
               "beta-swap-sweep", "validate")

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_VALIDATION = 3
EXIT_IO = 4


class ConfigError(ValueError):
    """Invalid configuration; carries the offending field path."""

    def __init__(self, path, message):
        self.path = path
        super().__init__(f"{path}: {message}")


def _need(params, path, key, kind, default=None, check=None, describe=""):
    value = params.get(key, default)
    if value is None:
        raise ConfigError(f"{path}.{key}", "required field missing")
    if kind is float and isinstance(value, (int, float)) and not isinstance(value, bool):
        value = float(value)
    if not isinstance(value, kind) or isinstance(value, bool):
        raise ConfigError(f"{path}.{key}", f"expected {kind.__name__}")
    if check is not None and not check(value):
        raise ConfigError(f"{path}.{key}", describe or "out of range")
    return value


def _need_int_list(params, path, key, default):
    value = params.get(key, default)
    if (not isinstance(value, list) or not value
            or not all(isinstance(v, int) and not isinstance(v, bool) and v >= 1
                       for v in value)):
        raise ConfigError(f"{path}.{key}", "expected a non-empty list of integers >= 1")
    return list(value)


_DEFAULTS = {
    "fig2": lambda p: {
        "beta_E": _need(p, "params", "beta_E", float, math.log(2.0),
                        lambda v: v > 0, "must be > 0"),
        "w_min": _need(p, "params", "w_min", float, 0.05, lambda v: v > 0, "must be > 0"),
        "w_max": _need(p, "params", "w_max", float, 3.0, lambda v: v > 0, "must be > 0"),
        "w_points": _need(p, "params", "w_points", int, 200,
                          lambda v: v >= 2, "need at least 2 grid points"),
        "d_list": _need_int_list(p, "params", "d_list", [1, 2, 5, 20]),
    },
    "fig3": lambda p: {
        "gamma": _need(p, "params", "gamma", float, 0.75,
                       lambda v: 0.5 < v < 1.0, "must lie in (1/2, 1)"),
        "depth": _need(p, "params", "depth", int, 8, lambda v: v >= 1, "must be >= 1"),
    },
    "cooling-coherent": lambda p: {
        "gamma": _need(p, "params", "gamma", float, 0.75,
                       lambda v: 0.5 < v < 1.0, "must lie in (1/2, 1)"),
        "rounds": _need(p, "params", "rounds", int, 20, lambda v: v >= 1, "must be >= 1"),
        "d_list": _need_int_list(p, "params", "d_list", [1, 2, 4, 8]),
    },
    "cooling-incoherent": lambda p: {
        "beta": _need(p, "params", "beta", float, 1.0, lambda v: v > 0, "must be > 0"),
        "E": _need(p, "params", "E", float, 1.0, lambda v: v > 0, "must be > 0"),
        "script_E": _need(p, "params", "script_E", float, 2.0,
                          lambda v: v > 0, "must be > 0"),
        "beta_hot": _need(p, "params", "beta_hot", float, 0.2,
                          lambda v: v >= 0, "must be >= 0"),
        "rounds": _need(p, "params", "rounds", int, 50, lambda v: v >= 1, "must be >= 1"),
        "d_list": _need_int_list(p, "params", "d_list", [1, 2, 4, 8]),
    },
    "beta-swap-sweep": lambda p: {
        "gamma": _need(p, "params", "gamma", float, 0.75,
                       lambda v: 0.5 < v < 1.0, "must lie in (1/2, 1)"),
        "p0": _need(p, "params", "p0", float, 0.0,
                    lambda v: 0.0 <= v <= 1.0, "must lie in [0, 1]"),
        "d_max": _need(p, "params", "d_max", int, 30, lambda v: v >= 1, "must be >= 1"),
    },
    "validate": lambda p: {
        "only": p.get("only"),
        "tolerance_scale": _need(p, "params", "tolerance_scale", float, 1.0,
                                 lambda v: v >= 0, "must be >= 0"),
    },
}


@dataclass(frozen=True)
class ExperimentConfig:
    """One validated experiment request."""

    experiment: str
    params: dict
    output_dir: Path

    @classmethod
    def from_dict(cls, raw: dict) -> "ExperimentConfig":
        if not isinstance(raw, dict):
            raise ConfigError("<root>", "config must be a JSON object")
        version = raw.get("schema_version", SCHEMA_VERSION)
        if version != SCHEMA_VERSION:
            raise ConfigError("schema_version", f"unsupported version {version}")
        experiment = raw.get("experiment")
        if experiment not in EXPERIMENTS:
            raise ConfigError("experiment", f"must be one of {EXPERIMENTS}")
        params_in = raw.get("params", {})
        if not isinstance(params_in, dict):
            raise ConfigError("params", "expected a JSON object")
        params = _DEFAULTS[experiment](params_in)
        if experiment == "cooling-incoherent":
            if not params["script_E"] > params["E"]:
                raise ConfigError("params.script_E", "must exceed E")
            if not params["beta_hot"] < params["beta"]:
                raise ConfigError("params.beta_hot", "must be below beta")
        if experiment == "validate" and params["only"] is not None \
                and params["only"] not in validation.MODULES:
            raise ConfigError("params.only",
                              f"must be one of {validation.MODULES}")
        outdir = raw.get("output_dir", "thermoproc-out")
        if not isinstance(outdir, str) or not outdir:
            raise ConfigError("output_dir", "expected a non-empty string")
        return cls(experiment=experiment, params=params, output_dir=Path(outdir))

    def echo(self) -> dict:
        params = {k: v for k, v in sorted(self.params.items())}
        return {"schema_version": SCHEMA_VERSION, "experiment": self.experiment,
                "params": params, "output_dir": str(self.output_dir)}


@dataclass
class RunManifest:
    """What a run produced: config echo, file digests, timing."""

    experiment: str
    config: dict
    artifact_version: str
    files: list = field(default_factory=list)
    wall_clock_s: float = 0.0
    validation_passed: bool | None = None

    def to_dict(self):
        out = {
            "experiment": self.experiment,
            "config": self.config,
            "artifact_version": self.artifact_version,
            "files": self.files,
            "wall_clock_s": self.wall_clock_s,
        }
        if self.validation_passed is not None:
            out["validation_passed"] = self.validation_passed
        return out


def _fmt(value) -> str:
    if isinstance(value, (float, np.floating)):
        return f"{float(value):.17g}"
    return str(value)


def _write_csv(path: Path, header_meta: dict, columns, rows):
    lines = [f"# thermoproc {path.stem} v{SCHEMA_VERSION}"]
    for key in sorted(header_meta):
        lines.append(f"# {key}={_fmt(header_meta[key])}")
    lines.append(",".join(columns))
    for row in rows:
        lines.append(",".join(_fmt(v) for v in row))
    path.write_text("\n".join(lines) + "\n", encoding="utf-8")
    return path


def _thread_count() -> int:
    raw = os.environ.get("THERMOPROC_THREADS", "1")
    try:
        n = int(raw)
    except ValueError:
        raise ConfigError("THERMOPROC_THREADS", f"not an integer: {raw!r}")
    if n < 1:
        raise ConfigError("THERMOPROC_THREADS", "must be >= 1")
    return n


def _grid_map(fn, items):
    """Map a pure function over grid points, preserving order."""
    threads = _thread_count()
    items = list(items)
    if threads == 1 or len(items) <= 1:
        return [fn(x) for x in items]
    with ThreadPoolExecutor(max_workers=threads) as pool:
        return list(pool.map(fn, items))


def _emit_fig2(cfg: ExperimentConfig, outdir: Path):
    p = cfg.params
    grid = np.linspace(p["w_min"], p["w_max"], p["w_points"])
    d_list = p["d_list"]

    def row(bw):
        st = workx.ExtractionSetup(p["beta_E"], float(bw), 1.0)
        vals = [bw, workx.epsilon_tp(st), workx.epsilon_etp(st), workx.epsilon_mtp(st)]
        vals += [workx.epsilon_d_closed(st, d) for d in d_list]
        return vals

    columns = ["W", "eps_tp", "eps_etp", "eps_mtp"] + [f"eps_d{d}" for d in d_list]
    path = _write_csv(outdir / "fig2.csv", cfg.echo()["params"], columns,
                      _grid_map(row, grid))
    return [path]


def _emit_fig3(cfg: ExperimentConfig, outdir: Path):
    p = cfg.params
    gamma, depth = p["gamma"], p["depth"]
    regions = [
        reachable.tp_region(gamma),
        reachable.etp_orbit_hull(gamma, depth),
        reachable.mtp_mixing_path(gamma),
        *reachable.mmtp2_point_regions(gamma),
    ]
    path = reachable.region_export(regions, outdir / "fig3_regions.csv",
                                   meta=cfg.echo()["params"])
    return [Path(path)]


def _emit_cooling_coherent(cfg: ExperimentConfig, outdir: Path):
    p = cfg.params
    gamma, rounds, d_list = p["gamma"], p["rounds"], p["d_list"]
    columns = ["round", "p_tp", "p_tp_closed", "p_mtp", "p_mtp_closed"]
    series = [cooling.cool_coherent("TP", rounds, gamma).populations,
              cooling.cool_coherent("MTP", rounds, gamma).populations]
    closed = [[cooling.coherent_closed_form("TP", n, gamma) for n in range(1, rounds + 1)],
              [cooling.coherent_closed_form("MTP", n, gamma) for n in range(1, rounds + 1)]]
    for d in d_list:
        columns += [f"p_mmtp_d{d}", f"p_mmtp_d{d}_closed"]
        series.append(cooling.cool_coherent("MMTP", rounds, gamma, d).populations)
        closed.append([cooling.coherent_closed_form("MMTP", n, gamma, d)
                       for n in range(1, rounds + 1)])
    rows = []
    for n in range(rounds):
        row = [n + 1]
        for sim, cl in zip(series, closed):
            row += [sim[n], cl[n]]
        rows.append(row)
    path = _write_csv(outdir / "cooling_coherent.csv", cfg.echo()["params"],
                      columns, rows)
    return [path]


def _emit_cooling_incoherent(cfg: ExperimentConfig, outdir: Path):
    p = cfg.params
    rounds, d_list = p["rounds"], p["d_list"]
    kw = dict(E=p["E"], script_E=p["script_E"], beta=p["beta"], beta_hot=p["beta_hot"])
    columns = ["round", "p_tp", "p_tp_closed", "p_mtp", "p_mtp_closed"]
    series = [cooling.cool_incoherent("TP", rounds, **kw).populations,
              cooling.cool_incoherent("MTP", rounds, **kw).populations]
    closed = [[cooling.incoherent_closed_form("TP", n, **kw) for n in range(1, rounds + 1)],
              [cooling.incoherent_closed_form("MTP", n, **kw) for n in range(1, rounds + 1)]]
    for d in d_list:
        columns += [f"p_mmtp_d{d}", f"p_mmtp_d{d}_closed"]
        series.append(cooling.cool_incoherent("MMTP", rounds, d=d, **kw).populations)
        closed.append([cooling.incoherent_closed_form("MMTP", n, d=d, **kw)
                       for n in range(1, rounds + 1)])
    rows = []
    for n in range(rounds):
        row = [n + 1]
        for sim, cl in zip(series, closed):
            row += [sim[n], cl[n]]
        rows.append(row)
    meta = dict(cfg.echo()["params"],
                p_star=cooling.p_star_incoherent(**kw))
    path = _write_csv(outdir / "cooling_incoherent.csv", meta, columns, rows)
    return [path]


def _emit_beta_swap_sweep(cfg: ExperimentConfig, outdir: Path):
    p = cfg.params
    gamma, p0 = p["gamma"], p["p0"]
    rows = []
    for d in range(1, p["d_max"] + 1):
        sim, _ = simulate_memory_beta_swap(d, p0, gamma)
        closed = closed_form_p_d(d, p0, gamma)
        rows.append([d, sim, closed, abs(sim - closed), float(delta_d(d, gamma)),
                     catalan_tail_bound(d, gamma)])
    columns = ["d", "p_sim", "p_closed", "abs_dev", "delta_d", "tail_bound"]
    path = _write_csv(outdir / "beta_swap_sweep.csv", cfg.echo()["params"],
                      columns, rows)
    return [path]


def _emit_validate(cfg: ExperimentConfig, outdir: Path):
    results = validation.run_checks(only=cfg.params["only"],
                                    tolerance_scale=cfg.params["tolerance_scale"])
    summary = validation.summarize(results)
    path = outdir / "validation_report.json"
    path.write_text(json.dumps(summary, indent=2, sort_keys=True) + "\n",
                    encoding="utf-8")
    return [path], summary["passed"]


_EMITTERS = {
    "fig2": _emit_fig2,
    "fig3": _emit_fig3,
    "cooling-coherent": _emit_cooling_coherent,
    "cooling-incoherent": _emit_cooling_incoherent,
    "beta-swap-sweep": _emit_beta_swap_sweep,
}


def _sha256(path: Path) -> str:
    return hashlib.sha256(path.read_bytes()).hexdigest()


def run_experiment(cfg: ExperimentConfig) -> RunManifest:
    """Dispatch one experiment and write its outputs plus the manifest."""
    t0 = time.monotonic()
    outdir = cfg.output_dir
    outdir.mkdir(parents=True, exist_ok=True)
    validation_passed = None
    if cfg.experiment == "validate":
        paths, validation_passed = _emit_validate(cfg, outdir)
    else:
        paths = _EMITTERS[cfg.experiment](cfg, outdir)
    manifest = RunManifest(
        experiment=cfg.experiment,
        config=cfg.echo(),
        artifact_version=__version__,
        files=[{"name": p.name, "sha256": _sha256(p), "bytes": p.stat().st_size}
               for p in paths],
        wall_clock_s=round(time.monotonic() - t0, 6),
        validation_passed=validation_passed,
    )
    (outdir / "run_manifest.json").write_text(
        json.dumps(manifest.to_dict(), indent=2, sort_keys=True) + "\n",
        encoding="utf-8")
    return manifest


def emit_figure_data(kind: str, params: dict, output_dir) -> RunManifest:
    """Programmatic shorthand: build a config for ``kind`` and run it."""
    cfg = ExperimentConfig.from_dict({
        "schema_version": SCHEMA_VERSION,
        "experiment": kind,
        "params": params,
        "output_dir": str(output_dir),
    })
    return run_experiment(cfg)


def _print_validation(results) -> bool:
    width = max(len(r.name) for r in results)
    for r in results:
        status = "PASS" if r.passed else "FAIL"
        print(f"[{status}] {r.name:<{width}}  dev={r.deviation:.3e}  "
              f"tol={r.tolerance:.3e}  ({r.module}) {r.detail}")
    passed = all(r.passed for r in results)
    print(f"{sum(r.passed for r in results)}/{len(results)} checks passed")
    return passed


def _cmd_run(args) -> int:
    try:
        raw = json.loads(Path(args.config).read_text(encoding="utf-8"))
    except OSError as exc:
        print(f"config error: cannot read {args.config}: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except json.JSONDecodeError as exc:
        print(f"config error: invalid JSON: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    cfg = ExperimentConfig.from_dict(raw)
    manifest = run_experiment(cfg)
    for entry in manifest.files:
        print(f"wrote {cfg.output_dir / entry['name']} ({entry['bytes']} bytes)")
    if manifest.validation_passed is False:
        return EXIT_VALIDATION
    return EXIT_OK


def _cmd_validate(args) -> int:
    results = validation.run_checks(only=args.only,
                                    tolerance_scale=args.tolerance_scale)
    passed = _print_validation(results)
    if args.json:
        Path(args.json).write_text(
            json.dumps(validation.summarize(results), indent=2, sort_keys=True) + "\n",
            encoding="utf-8")
    return EXIT_OK if passed else EXIT_VALIDATION


def _cmd_fig(args) -> int:
    if args.kind == "fig2":
        params = {"beta_E": args.beta_e, "w_min": args.w_min, "w_max": args.w_max,
                  "w_points": args.w_points,
                  "d_list": [int(v) for v in args.d_list.split(",")]}
        experiment = "fig2"
    elif args.kind == "fig3":
        params = {"gamma": args.gamma, "depth": args.depth}
        experiment = "fig3"
    else:
        if args.paradigm == "coherent":
            params = {"gamma": args.gamma, "rounds": args.rounds,
                      "d_list": [int(v) for v in args.d_list.split(",")]}
            experiment = "cooling-coherent"
        else:
            params = {"beta": args.beta, "E": args.E, "script_E": args.script_E,
                      "beta_hot": args.beta_hot, "rounds": args.rounds,
                      "d_list": [int(v) for v in args.d_list.split(",")]}
            experiment = "cooling-incoherent"
    manifest = emit_figure_data(experiment, params, args.out)
    for entry in manifest.files:
        print(f"wrote {Path(args.out) / entry['name']} ({entry['bytes']} bytes)")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="thermoproc",
        description="Thermal-process simulations with finite memories: "
                    "figure data, sweeps, and validation.")
    sub = parser.add_subparsers(dest="command", required=True)

    p_run = sub.add_parser("run", help="run an experiment from a JSON config")
    p_run.add_argument("config", help="path to the config file")

    p_val = sub.add_parser("validate", help="run the validation checks")
    p_val.add_argument("--only", choices=validation.MODULES, default=None,
                       help="restrict to one module's checks")
    p_val.add_argument("--json", default=None, help="also write a JSON report")
    p_val.add_argument("--tolerance-scale", type=float, default=1.0,
                       dest="tolerance_scale",
                       help="multiply all tolerances (0 forces failures)")

    p_fig = sub.add_parser("fig", help="emit figure data")
    fig_sub = p_fig.add_subparsers(dest="kind", required=True)

    f2 = fig_sub.add_parser("fig2", help="work-extraction error curves")
    f2.add_argument("--beta-e", dest="beta_e", type=float, default=math.log(2.0))
    f2.add_argument("--w-min", dest="w_min", type=float, default=0.05)
    f2.add_argument("--w-max", dest="w_max", type=float, default=3.0)
    f2.add_argument("--w-points", dest="w_points", type=int, default=200)
    f2.add_argument("--d-list", dest="d_list", default="1,2,5,20")
    f2.add_argument("--out", default="thermoproc-out")

    f3 = fig_sub.add_parser("fig3", help="qutrit reachable regions")
    f3.add_argument("--gamma", type=float, default=0.75)
    f3.add_argument("--depth", type=int, default=8)
    f3.add_argument("--out", default="thermoproc-out")

    fc = fig_sub.add_parser("cooling", help="cooling round curves")
    fc.add_argument("--paradigm", choices=("coherent", "incoherent"),
                    default="coherent")
    fc.add_argument("--gamma", type=float, default=0.75)
    fc.add_argument("--rounds", type=int, default=20)
    fc.add_argument("--d-list", dest="d_list", default="1,2,4,8")
    fc.add_argument("--beta", type=float, default=1.0)
    fc.add_argument("--E", type=float, default=1.0)
    fc.add_argument("--script-E", dest="script_E", type=float, default=2.0)
    fc.add_argument("--beta-hot", dest="beta_hot", type=float, default=0.2)
    fc.add_argument("--out", default="thermoproc-out")

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        if args.command == "run":
            return _cmd_run(args)
        if args.command == "validate":
            return _cmd_validate(args)
        return _cmd_fig(args)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except OSError as exc:
        print(f"i/o error: {exc}", file=sys.stderr)
        return EXIT_IO


if __name__ == "__main__":
    sys.exit(main())
