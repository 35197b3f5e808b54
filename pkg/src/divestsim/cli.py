"""Command-line front end: single runs, ensembles, and parameter sweeps,
persisted as CSV/JSON with a digest manifest.

Every invocation writes a ``manifest.json`` listing the produced files with
their sha256 digests plus an echo of the effective configuration; the echo
is also written as ``config.json`` and can be fed back via ``--config`` to
reproduce the outputs byte for byte.
"""

from __future__ import annotations

import argparse
import hashlib
import json
import os
import sys
import time
from dataclasses import replace
from pathlib import Path

from . import __version__, analysis, config as config_mod, engine
from .config import ConfigError

RUN_CSV_HEADER = "month,price,fci,cce,reserve,budget,policy,held_shares"
SWEEP_CSV_FIELDS = [
    "mean_cce",
    "q1",
    "median",
    "q3",
    "n_runs",
    "crash_fraction",
    "type_A",
    "type_B",
    "type_C",
    "type_D",
    "type_E",
    "type_F",
    "bimodal",
]
OUT_DIR_ENV = "DIVESTSIM_OUT"


def _fmt(value: float) -> str:
    """Floats with 6 significant digits; integers exact."""
    if isinstance(value, bool):
        return "1" if value else "0"
    if isinstance(value, int):
        return str(value)
    return f"{value:.6g}"


def write_run_csv(path: Path, record: engine.RunRecord) -> None:
    lines = [RUN_CSV_HEADER]
    for t in range(len(record)):
        lines.append(
            ",".join(
                (
                    str(t),
                    _fmt(record.price[t]),
                    _fmt(record.fci[t]),
                    _fmt(record.cce[t]),
                    _fmt(record.reserve[t]),
                    _fmt(record.budget[t]),
                    str(record.policy_flag[t]),
                    _fmt(record.held_shares[t]),
                )
            )
        )
    path.write_text("\n".join(lines) + "\n")


def write_graph(path: Path, edges: list[tuple[int, int]]) -> None:
    path.write_text("".join(f"{u} {v}\n" for u, v in edges))


def summary_payload(summary: analysis.EnsembleSummary, cfg: engine.SimConfig) -> dict:
    return {
        "config": config_mod.flat_dict(cfg),
        "n_runs": summary.n_runs,
        "mean_cce": summary.mean_cce,
        "q1": summary.q1,
        "median": summary.median,
        "q3": summary.q3,
        "types": summary.type_counts,
        "crash_fraction": summary.crash_fraction,
    }


def write_summary_json(path: Path, summary: analysis.EnsembleSummary, cfg: engine.SimConfig) -> None:
    path.write_text(json.dumps(summary_payload(summary, cfg), indent=2, sort_keys=True) + "\n")


def write_sweep_csv(path: Path, result: analysis.SweepResult) -> None:
    axis_names = [name for name, _ in result.axes]
    lines = [",".join(axis_names + SWEEP_CSV_FIELDS)]
    for cell in result.cells:
        s = cell.summary
        row = [_fmt(cell.coords[name]) for name in axis_names]
        row += [
            _fmt(s.mean_cce),
            _fmt(s.q1),
            _fmt(s.median),
            _fmt(s.q3),
            str(s.n_runs),
            _fmt(s.crash_fraction),
        ]
        row += [str(s.type_counts[t.value]) for t in analysis.BehaviorType]
        row.append("1" if s.bimodal else "0")
        lines.append(",".join(row))
    path.write_text("\n".join(lines) + "\n")


def write_config_echo(path: Path, cfg: engine.SimConfig) -> None:
    path.write_text(json.dumps(config_mod.flat_dict(cfg), indent=2, sort_keys=True) + "\n")


def _sha256(path: Path) -> str:
    return hashlib.sha256(path.read_bytes()).hexdigest()


def write_manifest(out_dir: Path, cfg: engine.SimConfig, files: list[Path]) -> Path:
    manifest = {
        "tool": "divestsim",
        "version": __version__,
        "created_utc": time.strftime("%Y-%m-%dT%H:%M:%SZ", time.gmtime()),
        "seed": cfg.seed,
        "config": config_mod.flat_dict(cfg),
        "outputs": [
            {"path": f.name, "sha256": _sha256(f)} for f in sorted(files, key=lambda p: p.name)
        ],
    }
    path = out_dir / "manifest.json"
    path.write_text(json.dumps(manifest, indent=2, sort_keys=True) + "\n")
    return path


def build_config(args: argparse.Namespace, *, extra_keys: tuple[str, ...] = ()) -> tuple[engine.SimConfig, dict[str, str]]:
    """Assemble the effective config: defaults, then file, then --set/--seed.

    Returns the config plus any --set entries named in ``extra_keys`` (used
    by the sweep commands for their ``axes`` pseudo-key).
    """
    cfg = config_mod.defaults()
    if args.config:
        cfg = config_mod.with_overrides(cfg, config_mod.load_file(args.config))
    extras: dict[str, str] = {}
    for item in args.set or []:
        key, value = config_mod.parse_set_arg(item)
        if key in extra_keys:
            extras[key] = value
        else:
            cfg = config_mod.with_field(cfg, key, value)
    if args.seed is not None:
        cfg = replace(cfg, seed=args.seed)
    cfg.validate()
    return cfg, extras


def _out_dir(args: argparse.Namespace) -> Path:
    out = args.out or os.environ.get(OUT_DIR_ENV) or "."
    path = Path(out)
    try:
        path.mkdir(parents=True, exist_ok=True)
        probe = path / ".write_probe"
        probe.write_text("")
        probe.unlink()
    except OSError as exc:
        raise ConfigError(f"output directory {path} is not writable: {exc}") from None
    return path


def _progress(done: int, total: int) -> None:
    if total >= 20 and done % max(1, total // 10) == 0:
        print(f"divestsim: {done}/{total} runs done", file=sys.stderr)


def cmd_run(args: argparse.Namespace) -> int:
    cfg, _ = build_config(args)
    out = _out_dir(args)
    record = engine.run(cfg, record_graph=args.emit_graph)
    files = []
    run_csv = out / "run.csv"
    write_run_csv(run_csv, record)
    files.append(run_csv)
    if args.emit_graph:
        graph_path = out / "graph.txt"
        write_graph(graph_path, record.graph_edges or [])
        files.append(graph_path)
    echo = out / "config.json"
    write_config_echo(echo, cfg)
    files.append(echo)
    write_manifest(out, cfg, files)
    return 0


def cmd_ensemble(args: argparse.Namespace) -> int:
    cfg, _ = build_config(args)
    out = _out_dir(args)
    records = engine.run_many(cfg, args.runs, threads=args.threads)
    _progress(len(records), len(records))
    summary = analysis.summarize(records, cfg)
    files = []
    summary_path = out / "summary.json"
    write_summary_json(summary_path, summary, cfg)
    files.append(summary_path)
    if args.save_runs:
        for r, record in enumerate(records):
            p = out / f"run_{r:04d}.csv"
            write_run_csv(p, record)
            files.append(p)
    echo = out / "config.json"
    write_config_echo(echo, cfg)
    files.append(echo)
    write_manifest(out, cfg, files)
    return 0


def _cmd_sweep(args: argparse.Namespace, n_axes: int) -> int:
    cfg, extras = build_config(args, extra_keys=("axes",))
    spec = args.axes or extras.get("axes")
    if not spec:
        raise ConfigError("sweep needs an axis spec via --axes or --set axes=...")
    axes = config_mod.parse_axes(spec, n_axes)
    out = _out_dir(args)
    result = analysis.sweep(axes, cfg, args.runs, threads=args.threads)
    files = []
    grid_path = out / "sweep.csv"
    write_sweep_csv(grid_path, result)
    files.append(grid_path)
    echo = out / "config.json"
    write_config_echo(echo, cfg)
    files.append(echo)
    write_manifest(out, cfg, files)
    print(f"divestsim: wrote {len(result.cells)} cells to {grid_path}", file=sys.stderr)
    return 0


def _add_common(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--config", help="config file (key=value lines or JSON)")
    parser.add_argument(
        "--set",
        action="append",
        metavar="KEY=VALUE",
        help="override one config field (repeatable)",
    )
    parser.add_argument("--seed", type=int, help="override the base seed")
    parser.add_argument("--out", help=f"output directory (default: ${OUT_DIR_ENV} or '.')")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="divestsim",
        description="Agent-based fossil-divestment market simulator",
    )
    parser.add_argument("--version", action="version", version=f"divestsim {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p_run = sub.add_parser("run", help="single trajectory -> per-month CSV")
    _add_common(p_run)
    p_run.add_argument("--emit-graph", action="store_true", help="dump the final social graph")
    p_run.set_defaults(func=cmd_run)

    p_ens = sub.add_parser("ensemble", help="n independent runs -> summary JSON")
    _add_common(p_ens)
    p_ens.add_argument("--runs", type=int, default=100, help="number of runs (default 100)")
    p_ens.add_argument("--threads", type=int, default=1, help="worker processes (default 1)")
    p_ens.add_argument("--save-runs", action="store_true", help="also write per-run CSVs")
    p_ens.set_defaults(func=cmd_ensemble)

    for name, n_axes in (("sweep1d", 1), ("sweep2d", 2)):
        p = sub.add_parser(name, help=f"{n_axes}D parameter sweep -> grid CSV")
        _add_common(p)
        p.add_argument("--axes", help="axis spec field:start:stop:count[,field:start:stop:count]")
        p.add_argument("--runs", type=int, default=50, help="runs per cell (default 50)")
        p.add_argument("--threads", type=int, default=1, help="worker processes (default 1)")
        p.set_defaults(func=lambda a, n=n_axes: _cmd_sweep(a, n))

    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (ConfigError, ValueError) as exc:
        print(f"divestsim: error: {exc}", file=sys.stderr)
        return 2


def entrypoint() -> None:
    sys.exit(main())


if __name__ == "__main__":
    entrypoint()
