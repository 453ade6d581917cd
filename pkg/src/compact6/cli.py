"""Command line entry point: ``compact6 <subcommand> --config cfg.json [--out dir]``.

Exit codes: 0 all verdicts pass, 1 numerical divergence or failed verdict,
2 configuration error.
"""

from __future__ import annotations

import argparse
import logging
import sys
from pathlib import Path

from . import experiments as ex
from .config import ConfigError, bundled_configs, parse_config
from .models import analytic_bore_rates

EXIT_OK, EXIT_DIVERGED, EXIT_CONFIG = 0, 1, 2

SUBCOMMAND_KINDS = {
    "convergence": ("convergence_space", "convergence_time", "bbmb", "custom"),
    "stability": ("stability_sweep", "decay_check"),
    "invariants": ("solitary", "interaction", "bore"),
    "simulate": None,  # any kind
    "analyze": None,
}


def _resolve(path: str) -> Path:
    """A path on disk, or the name of a bundled config (``example1``)."""
    p = Path(path)
    if p.exists() or p.suffix:
        return p
    bundled = bundled_configs()
    return bundled.get(path, p)


def _write(out_dir: Path, name: str, text: str) -> Path:
    out_dir.mkdir(parents=True, exist_ok=True)
    p = out_dir / name
    p.write_text(text)
    return p


def cmd_convergence(cfg, out_dir: Path) -> int:
    rows = ex.run_convergence(cfg)
    text = ex.convergence_csv(rows, temporal=cfg.experiment == "convergence_time")
    _write(out_dir, "convergence.csv", text)
    print(text, end="")
    return EXIT_OK


def cmd_stability(cfg, out_dir: Path) -> int:
    if cfg.experiment == "decay_check":
        rows = ex.run_decay_check(cfg)
        _write(out_dir, "decay.csv", ex.decay_csv(rows))
        bad = [r for r in rows if not r.ok]
        print(f"decay envelope respected at {len(rows) - len(bad)}/{len(rows)} sample times")
        return EXIT_OK if not bad else EXIT_DIVERGED
    rows, bound = ex.run_stability_sweep(cfg)
    verdicts = ex.sweep_verdicts(cfg, rows)
    text = ex.sweep_csv(rows, verdicts)
    _write(out_dir, "stability.csv", text)
    print(text, end="")
    if bound.unconditionally_unstable:
        print("max_stable_tau: 0 (unconditionally unstable without dissipation)")
    else:
        print(f"max_stable_tau: {bound.tau:.6f} (attained at theta={bound.theta:.6f})")
    return EXIT_OK if all(verdicts) else EXIT_DIVERGED


def cmd_invariants(cfg, out_dir: Path) -> int:
    res = ex.run_invariants(cfg)
    text = ex.invariants_csv(res)
    _write(out_dir, "invariants.csv", text)
    print(text, end="")
    if res.bore is not None:
        rates = ex.bore_csv(res.bore, analytic_bore_rates(cfg.model["data"]["u0"]))
        _write(out_dir, "bore_rates.csv", rates)
        print(rates, end="")
    return EXIT_OK


def cmd_simulate(cfg, out_dir: Path) -> int:
    paths = ex.emit_series(cfg, out_dir)
    for p in paths:
        print(p)
    return EXIT_OK


def cmd_analyze(cfg, out_dir: Path) -> int:
    rows, bound = ex.run_analyze(cfg)
    _write(out_dir, "symbols.csv", ex.analyze_csv(rows))
    if bound.unconditionally_unstable:
        print("max_stable_tau: 0 (unconditionally unstable without dissipation)")
    else:
        print(f"max_stable_tau: {bound.tau:.6f}")
    return EXIT_OK


COMMANDS = {
    "convergence": cmd_convergence,
    "stability": cmd_stability,
    "invariants": cmd_invariants,
    "simulate": cmd_simulate,
    "analyze": cmd_analyze,
}


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="compact6", description=__doc__.splitlines()[0])
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)
    for name in COMMANDS:
        sp = sub.add_parser(name)
        sp.add_argument("--config", required=True, help="JSON config path or bundled name (e.g. example1)")
        sp.add_argument("--out", default=None, help="output directory (overrides the config)")
    sub.add_parser("list", help="list bundled configs")
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    if args.command == "list":
        for name in sorted(bundled_configs()):
            print(name)
        return EXIT_OK
    try:
        cfg = parse_config(_resolve(args.config))
        kinds = SUBCOMMAND_KINDS[args.command]
        if kinds is not None and cfg.experiment not in kinds:
            raise ConfigError([
                f"/experiment: {cfg.experiment!r} cannot run under '{args.command}' "
                f"(expects one of {', '.join(kinds)})"
            ])
        out_dir = Path(args.out) if args.out else cfg.out_dir
        ex.worker_count(1)  # validates COMPACT6_THREADS up front
        return COMMANDS[args.command](cfg, out_dir)
    except ConfigError as exc:
        for msg in exc.errors:
            print(f"config error: {msg}", file=sys.stderr)
        return EXIT_CONFIG
    except ex.DivergedRun as exc:
        print(f"diverged: {exc}", file=sys.stderr)
        return EXIT_DIVERGED


if __name__ == "__main__":
    sys.exit(main())
