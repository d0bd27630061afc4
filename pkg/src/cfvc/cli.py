"""Command-line entry point: ``cfvc run <config>``, ``cfvc demo``, ``cfvc validate <config>``.

Verbosity comes from ``-v``/``-q`` or the ``CFVC_VERBOSITY`` environment
variable (``quiet``, ``info`` or ``debug``; default ``warning``).

Exit codes: 0 success, 1 at least one pipeline stage errored, 2 invalid config
or inputs.
"""

from __future__ import annotations

import argparse
import logging
import os
import sys
from pathlib import Path

import yaml

from . import __version__
from .errors import CfvcError, ConfigInvalid
from .pipeline import load_config, run_pipeline
from .report import emit_plot_data, emit_report
from .simulate import DEMO_WINDOW, synthetic_transactions, write_transactions_csv

log = logging.getLogger("cfvc")

_LEVELS = {"quiet": logging.ERROR, "warning": logging.WARNING, "info": logging.INFO, "debug": logging.DEBUG}


def _configure_logging(verbose: int, quiet: bool) -> None:
    level = _LEVELS.get(os.environ.get("CFVC_VERBOSITY", "warning").strip().lower(), logging.WARNING)
    if quiet:
        level = logging.ERROR
    elif verbose:
        level = logging.INFO if verbose == 1 else logging.DEBUG
    logging.basicConfig(level=level, format="%(levelname)s %(name)s: %(message)s", stream=sys.stderr, force=True)


def write_outputs(report: dict, out_dir: Path) -> list[Path]:
    out_dir.mkdir(parents=True, exist_ok=True)
    written = [emit_report(report, "json", out_dir / "report.json"), emit_report(report, "text", out_dir / "report.txt")]
    written += emit_plot_data(report, out_dir / "plots")
    return written


def _run(config_path, out=None) -> int:
    config = load_config(config_path)
    report = run_pipeline(config)
    out_dir = Path(out) if out else config.output
    write_outputs(report, out_dir)
    for err in report["errors"]:
        log.warning("stage error: %s / %s: %s: %s", err["pair"], err["stage"], err["error"], err["message"])
    print(f"report written to {out_dir}")
    return 1 if report["errors"] else 0


def demo_config(directory: Path, seed: int, replications: int) -> Path:
    """Write the synthetic transaction pair and a config analysing it; return the config path."""
    directory.mkdir(parents=True, exist_ok=True)
    rows = synthetic_transactions(seed)
    write_transactions_csv(rows["crowdfunding"], directory / "cf_transactions.csv")
    write_transactions_csv(rows["venture_capital"], directory / "vc_transactions.csv")
    config = {
        "inputs": {"crowdfunding": "cf_transactions.csv", "venture_capital": "vc_transactions.csv"},
        "window": list(DEMO_WINDOW),
        "keep_quantile": 0.99,
        "max_lag": 6,
        "d_max": 1,
        "spec": "constant_and_trend",
        "irf": {"horizon": 10, "replications": replications, "level": 0.9, "seed": seed, "shock_size": 0.01},
        "output": "output",
    }
    path = directory / "demo_config.yaml"
    path.write_text(yaml.safe_dump(config, sort_keys=True), encoding="utf-8")
    return path


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="cfvc", description="Crowdfunding / venture-capital time-series pipeline")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    parser.add_argument("-v", "--verbose", action="count", default=0, help="more log output (-vv for debug)")
    parser.add_argument("-q", "--quiet", action="store_true", help="errors only")
    sub = parser.add_subparsers(dest="command", required=True)

    run = sub.add_parser("run", help="run the pipeline described by a YAML config")
    run.add_argument("config", type=Path)
    run.add_argument("--out", type=Path, help="output directory (overrides the config)")

    demo = sub.add_parser("demo", help="generate the synthetic dataset and analyse it")
    demo.add_argument("--dir", type=Path, default=Path("cfvc_demo"), help="working directory for data and outputs")
    demo.add_argument("--seed", type=int, default=2016)
    demo.add_argument("--replications", type=int, default=500)

    val = sub.add_parser("validate", help="check a config and its input files without running")
    val.add_argument("config", type=Path)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    _configure_logging(args.verbose, args.quiet)
    try:
        if args.command == "run":
            return _run(args.config, args.out)
        if args.command == "demo":
            return _run(demo_config(args.dir, args.seed, args.replications))
        config = load_config(args.config)
        config.check_inputs()
        print(f"{args.config}: OK ({len(config.pairs)} pairs)")
        return 0
    except ConfigInvalid as exc:
        print(f"invalid config: {exc}", file=sys.stderr)
        return 2
    except (CfvcError, FileNotFoundError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
