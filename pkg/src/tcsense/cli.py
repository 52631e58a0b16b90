"""Command-line interface.

    tcsense <command> [--config file.json] [--out path] [--format csv|json]
                      [--threads n] [--seed u64] [--plot|--no-plot]
                      [--dotted.path value ...]

Commands: qfi, precision, scan, fig2, fig3, fig4a, fig4b, validate.
Any other --flag is treated as a config override whose kebab-case dotted path
mirrors the JSON structure (e.g. --params.g-hz 2.1e6, --grid.n-bar.max 1e5).

Exit codes: 0 success, 1 config error, 2 numerical-tolerance failure
(validate), 3 internal error.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from .model import ZeroDetuningError
from .scan import (
    ConfigError,
    NonFiniteResultError,
    ScanConfig,
    cmd_fig2,
    cmd_fig3,
    cmd_fig4a,
    cmd_fig4b,
    cmd_precision,
    cmd_qfi,
    cmd_scan,
    cmd_validate,
    fig2_defaults,
    fig3_defaults,
    fig4a_defaults,
    fig4b_defaults,
    parse_config,
)

_COMMANDS = ("qfi", "precision", "scan", "fig2", "fig3", "fig4a", "fig4b", "validate")

EXIT_OK = 0
EXIT_CONFIG = 1
EXIT_TOLERANCE = 2
EXIT_INTERNAL = 3


def _defaults_for(command: str) -> ScanConfig:
    if command == "fig2":
        return fig2_defaults()
    if command == "fig3":
        return fig3_defaults()
    if command == "fig4a":
        return fig4a_defaults()
    if command == "fig4b":
        return fig4b_defaults()
    return ScanConfig()


def _parse_overrides(tokens: list[str]) -> dict:
    """--dotted.path value pairs -> nested dict (kebab-case -> snake_case)."""
    doc: dict = {}
    i = 0
    while i < len(tokens):
        tok = tokens[i]
        if not tok.startswith("--"):
            raise ConfigError(f"unexpected argument {tok!r}")
        path = tok[2:]
        if "=" in path:
            path, raw = path.split("=", 1)
            i += 1
        else:
            if i + 1 >= len(tokens):
                raise ConfigError(f"override {tok!r} is missing a value")
            raw = tokens[i + 1]
            i += 2
        keys = [seg.replace("-", "_") for seg in path.split(".")]
        try:
            value = json.loads(raw)
        except json.JSONDecodeError:
            value = raw
        node = doc
        for key in keys[:-1]:
            node = node.setdefault(key, {})
            if not isinstance(node, dict):
                raise ConfigError(f"override path {path!r} conflicts with a scalar")
        node[keys[-1]] = value
    return doc


def _deep_merge(base: dict, extra: dict) -> dict:
    out = dict(base)
    for key, val in extra.items():
        if isinstance(val, dict) and isinstance(out.get(key), dict):
            out[key] = _deep_merge(out[key], val)
        else:
            out[key] = val
    return out


def _load_config(args, overrides: dict) -> ScanConfig:
    doc: dict = {}
    if args.config:
        try:
            with open(args.config, encoding="utf-8") as fh:
                doc = json.load(fh)
        except (OSError, json.JSONDecodeError) as exc:
            raise ConfigError(f"cannot read config {args.config}: {exc}") from exc
        if not isinstance(doc, dict):
            raise ConfigError("config document must be a JSON object")
    doc = _deep_merge(doc, overrides)
    if args.seed is not None:
        doc["seed"] = args.seed
    if args.threads is not None:
        doc["threads"] = args.threads
    if args.plot is not None:
        doc["plot"] = args.plot
    return parse_config(doc, defaults=_defaults_for(args.command))


def _write_tables(args, cfg: ScanConfig, tables: list, command: str) -> None:
    out = Path(args.out) if args.out else Path(f"{command}.{args.format}")
    out.parent.mkdir(parents=True, exist_ok=True)
    paths = [out]
    for extra in tables[1:]:
        suffix = extra.name.removeprefix(command).lstrip("_") or "extra"
        paths.append(out.with_name(f"{out.stem}.{suffix}{out.suffix}"))
    for table, path in zip(tables, paths):
        if args.format == "csv":
            table.write_csv(path)
        else:
            table.write_json(path)
        print(f"wrote {path} ({table.n_rows} rows)")
    if cfg.plot:
        from .plotting import render

        png = render(command, tables, out.with_suffix(".png"))
        if png:
            print(f"wrote {png}")


def main(argv: list[str] | None = None) -> int:
    parser = argparse.ArgumentParser(
        prog="tcsense",
        description="QFI and measurement-precision sweeps for cavity-ensemble field sensing",
    )
    parser.add_argument("command", choices=_COMMANDS)
    parser.add_argument("--config", help="JSON config file")
    parser.add_argument("--out", help="output path (default <command>.<format>)")
    parser.add_argument("--format", choices=("csv", "json"), default="csv")
    parser.add_argument("--threads", type=int, default=None)
    parser.add_argument("--seed", type=int, default=None)
    parser.add_argument("--plot", dest="plot", action="store_true", default=None,
                        help="render a PNG alongside the table (default for fig commands)")
    parser.add_argument("--no-plot", dest="plot", action="store_false")
    args, rest = parser.parse_known_args(argv)

    try:
        overrides = _parse_overrides(rest)
        cfg = _load_config(args, overrides)
    except (ConfigError, ZeroDetuningError) as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG

    try:
        if args.command == "validate":
            try:
                table, report = cmd_validate(cfg)
            except ZeroDetuningError as exc:
                print(f"config error: {exc}", file=sys.stderr)
                return EXIT_CONFIG
            out = Path(args.out) if args.out else Path("validate.report.json")
            out.parent.mkdir(parents=True, exist_ok=True)
            with open(out, "w", encoding="utf-8") as fh:
                json.dump(report, fh, indent=2)
                fh.write("\n")
            for row in report["checks"]:
                status = "PASS" if row["passed"] else "FAIL"
                print(f"{status}  {row['name']}: residual={row['residual']:.3e} "
                      f"tolerance={row['tolerance']:.3e}")
            print(f"wrote {out}")
            if not report["passed"]:
                print("validation failed", file=sys.stderr)
                return EXIT_TOLERANCE
            return EXIT_OK

        runner = {
            "qfi": cmd_qfi,
            "precision": cmd_precision,
            "scan": cmd_scan,
            "fig2": cmd_fig2,
            "fig3": cmd_fig3,
            "fig4a": cmd_fig4a,
            "fig4b": cmd_fig4b,
        }[args.command]
        try:
            result = runner(cfg)
        except (ConfigError, ZeroDetuningError) as exc:
            print(f"config error: {exc}", file=sys.stderr)
            return EXIT_CONFIG
        tables = list(result) if isinstance(result, tuple) else [result]
        _write_tables(args, cfg, tables, args.command)
        return EXIT_OK
    except NonFiniteResultError as exc:
        print(f"internal error: {exc}", file=sys.stderr)
        return EXIT_INTERNAL
    except Exception as exc:  # noqa: BLE001 - the CLI boundary
        print(f"internal error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_INTERNAL


if __name__ == "__main__":
    sys.exit(main())
