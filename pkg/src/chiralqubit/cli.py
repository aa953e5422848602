"""Command line interface: run, validate and list scenarios."""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from .errors import ChiralQubitError, ConfigError, IntegratorFailure, QuadratureFailure
from .scenarios import SCENARIOS, parse_config_text, run_scenario, validate_config

_EXIT_CODES = (
    (ConfigError, 2),
    (QuadratureFailure, 3),
    (IntegratorFailure, 4),
    (ChiralQubitError, 5),
)

_SCENARIO_NOTES = {
    "fig1": "trimer level scheme, D/J = 0.1",
    "fig2": "polarization vs drive strength ratio, near-resonant cavity",
    "fig3": "time-dependent decay rates for two detunings and temperatures",
    "fig4": "polarization under the cavity-filtered effective bath",
    "fig5a": "entropy growth over initial angles, T = 0, near resonant",
    "fig5b": "entropy growth over initial angles, T = 1, detuned",
    "fig6": "pointer angle vs cavity detuning",
    "custom": "user-specified parameter grid",
}


def _load_config(target: str, overrides: dict):
    path = Path(target)
    if target in SCENARIOS:
        text = f"scenario = {target}"
    elif path.is_file():
        text = path.read_text(encoding="utf-8")
    else:
        raise ConfigError(f"'{target}' is neither a known scenario nor a config file")
    return validate_config(text, overrides)


def _overrides_from_args(args) -> dict:
    pairs = []
    for item in args.set or []:
        if "=" not in item:
            raise ConfigError(f"--set expects key=value, got '{item}'")
        pairs.append(tuple(s.strip() for s in item.split("=", 1)))
    text = "\n".join(f"{k} = {v}" for k, v in pairs)
    parsed, errors = parse_config_text(text)
    if errors:
        raise ConfigError(errors)
    if args.outdir:
        parsed["outdir"] = args.outdir
    if args.no_plot:
        parsed["plot"] = False
    if args.workers is not None:
        parsed["workers"] = args.workers
    return parsed


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(
        prog="chiralqubit",
        description="Decoherence scenarios for a driven chirality qubit in a bosonic bath.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_run = sub.add_parser("run", help="run a scenario or a config file")
    p_run.add_argument("target", help="scenario name or path to a key=value config file")
    p_run.add_argument("--set", action="append", metavar="KEY=VALUE",
                       help="override a config key (repeatable)")
    p_run.add_argument("--outdir", help="output directory")
    p_run.add_argument("--no-plot", action="store_true", help="skip figure rendering")
    p_run.add_argument("--workers", type=int, help="worker pool size")

    p_val = sub.add_parser("validate", help="check a config file and echo the resolved values")
    p_val.add_argument("target", help="scenario name or path to a config file")
    p_val.add_argument("--set", action="append", metavar="KEY=VALUE")
    p_val.add_argument("--outdir", help=argparse.SUPPRESS)
    p_val.add_argument("--no-plot", action="store_true", help=argparse.SUPPRESS)
    p_val.add_argument("--workers", type=int, help=argparse.SUPPRESS)

    sub.add_parser("list-scenarios", help="list known scenarios")

    args = parser.parse_args(argv)
    try:
        if args.command == "list-scenarios":
            for name in sorted(SCENARIOS):
                print(f"{name:8s}  {_SCENARIO_NOTES.get(name, '')}")
            return 0
        overrides = _overrides_from_args(args)
        cfg = _load_config(args.target, overrides)
        if args.command == "validate":
            from dataclasses import asdict

            from .scenarios import resolve_scenario

            echo = {"config": asdict(cfg)}
            if cfg.scenario != "fig1":
                echo["points"] = [pt.derived for pt in resolve_scenario(cfg)]
            print(json.dumps(echo, indent=2, sort_keys=True, default=str))
            return 0
        manifest = run_scenario(cfg)
        for out in manifest["outputs"]:
            print(f"wrote {Path(cfg.outdir) / out['path']}")
        return 0
    except ChiralQubitError as exc:
        print(f"error: {exc}", file=sys.stderr)
        if isinstance(exc, ConfigError):
            for line, msg in exc.diagnostics:
                loc = f"line {line}: " if line else ""
                print(f"  {loc}{msg}", file=sys.stderr)
        for cls, code in _EXIT_CODES:
            if isinstance(exc, cls):
                return code
        return 1


if __name__ == "__main__":
    raise SystemExit(main())
