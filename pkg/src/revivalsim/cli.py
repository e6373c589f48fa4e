"""Command line entry point."""

from __future__ import annotations

import argparse
import json
import sys

from . import config as config_mod, manifest as manifest_mod, runner
from .errors import ConfigError, RevivalSimError


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="revivalsim",
        description="Visibility revival curves for a qubit coupled to a thermal oscillator.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    run = sub.add_parser("run", help="execute a configured run and write outputs + manifest")
    run.add_argument("config", nargs="?", help="TOML config file (defaults apply if omitted)")
    run.add_argument("--from-manifest", metavar="PATH", help="re-execute a recorded run")
    run.add_argument("--out", metavar="DIR", help="output directory (overrides output.directory)")
    run.add_argument("--force", action="store_true", help="overwrite an existing manifest")
    run.add_argument(
        "--set",
        metavar="KEY=VALUE",
        action="append",
        default=[],
        dest="overrides",
        help="dotted config override, e.g. --set mc.seed=7 (repeatable)",
    )

    val = sub.add_parser("validate", help="check a config and print diagnostics")
    val.add_argument("config", nargs="?", help="TOML config file")
    val.add_argument("--set", metavar="KEY=VALUE", action="append", default=[], dest="overrides")

    show = sub.add_parser("show-manifest", help="pretty-print a run manifest")
    show.add_argument("path", help="manifest file or the directory holding it")

    return parser


def _load(config_path: str | None, overrides: list[str]) -> dict:
    if config_path:
        config = config_mod.load_config(config_path)
    else:
        config = config_mod.resolve_config({})
    return config_mod.apply_overrides(config, overrides)


def _cmd_run(args: argparse.Namespace) -> int:
    if args.from_manifest and args.config:
        raise ConfigError("pass either a config file or --from-manifest, not both")
    if args.from_manifest:
        data = manifest_mod.load_manifest(args.from_manifest)
        config = config_mod.resolve_config(data["config"])
        config = config_mod.apply_overrides(config, args.overrides)
    else:
        config = _load(args.config, args.overrides)
    result = runner.run_config(config, out_dir=args.out, force=args.force)
    for line in result.summary:
        print(line)
    return result.exit_code


def _cmd_validate(args: argparse.Namespace) -> int:
    config = _load(args.config, args.overrides)
    diags = config_mod.validate(config)
    for diag in diags:
        print(diag)
    if config_mod.has_errors(diags):
        return 2
    print("config OK")
    return 0


def _cmd_show_manifest(args: argparse.Namespace) -> int:
    data = manifest_mod.load_manifest(args.path)
    print(json.dumps(data, indent=2, sort_keys=True))
    return 0


def main(argv: list[str] | None = None) -> int:
    parser = _build_parser()
    args = parser.parse_args(argv)
    try:
        if args.command == "run":
            return _cmd_run(args)
        if args.command == "validate":
            return _cmd_validate(args)
        if args.command == "show-manifest":
            return _cmd_show_manifest(args)
    except ConfigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except RevivalSimError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    raise AssertionError("unreachable")  # pragma: no cover


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
