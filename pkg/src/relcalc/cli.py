"""Batch driver: ``relcalc <subcommand> --config PATH [--seed S] [--force] [--out DIR]``.

Each subcommand runs one verification suite (``all`` runs every suite)
and writes ``<subcommand>_report.json`` to the output directory, plus CSV
files for tabular sweeps.  Exit codes: 0 all checks pass, 1 at least one
check failed, 2 configuration or runtime error.

The output directory is taken from ``--out``, else the ``RELCALC_OUT``
environment variable, else ``output.dir`` of the configuration.
"""
from __future__ import annotations

import argparse
import copy
import csv
import json
import logging
import os
import sys
import time
from pathlib import Path
from typing import Optional, Sequence

from .errors import ConfigError, RelcalcError
from .suites import SUITES, jsonable

log = logging.getLogger("relcalc")

ENV_OUT = "RELCALC_OUT"

DEFAULTS = {
    "geometry": {"n": 2, "d": 1, "N": [16, 32, 64]},
    "orders": {"m_g": -0.75, "k_g": 1.0, "k_c": 1.0, "k_b": 1.0, "kappa": None},
    "tolerances": {
        "roundtrip": 1e-10,
        "restriction": 1e-12,
        "twisted": 0.10,
        "slope": 0.15,
        "norm_ratio": 1.10,
        "identity": 1e-8,
        "adjoint": 1e-12,
        "associativity": 1e-10,
        "antihomomorphism": 1e-12,
        "axioms": 1e-12,
        "blowup": 0.05,
        "estimate_constant": 10.0,
        "b_constant": 4.0,
    },
    "sampling": {"seed": 0, "trials": 10_000, "count": 1000, "pairs": 5},
    "output": {"dir": "relcalc-out", "formats": ["json", "csv"]},
}

SUBCOMMANDS = tuple(SUITES) + ("all",)
FORMATS = ("json", "csv")


def _merge(defaults: dict, given: dict, path: str = "") -> dict:
    out = copy.deepcopy(defaults)
    for key, value in given.items():
        where = f"{path}{key}"
        if key not in defaults:
            raise ConfigError(f"unknown configuration key {where!r}")
        if isinstance(defaults[key], dict):
            if not isinstance(value, dict):
                raise ConfigError(f"{where!r} must be an object")
            out[key] = _merge(defaults[key], value, where + ".")
        else:
            out[key] = value
    return out


def _is_number(v) -> bool:
    return isinstance(v, (int, float)) and not isinstance(v, bool)


def validate(cfg: dict) -> dict:
    """Type and range checks; returns ``cfg`` or raises ``ConfigError``."""
    g = cfg["geometry"]
    for key in ("n", "d"):
        if not isinstance(g[key], int) or isinstance(g[key], bool) or g[key] < 1:
            raise ConfigError(f"geometry.{key} must be a positive integer")
    if g["d"] >= g["n"]:
        raise ConfigError("geometry.d must be smaller than geometry.n")
    Ns = [g["N"]] if isinstance(g["N"], int) else g["N"]
    if (not isinstance(Ns, list) or not Ns
            or not all(isinstance(N, int) and not isinstance(N, bool) and N > 0 and N % 2 == 0 for N in Ns)):
        raise ConfigError("geometry.N must be a positive even integer or a nonempty list of them")
    for key, v in cfg["orders"].items():
        if not (_is_number(v) or (key == "kappa" and v is None)):
            raise ConfigError(f"orders.{key} must be a number")
    for key, v in cfg["tolerances"].items():
        if not _is_number(v) or v <= 0:
            raise ConfigError(f"tolerances.{key} must be a positive number")
    s = cfg["sampling"]
    for key in ("seed", "trials", "count", "pairs"):
        v = s[key]
        if not isinstance(v, int) or isinstance(v, bool) or v < (0 if key == "seed" else 1):
            raise ConfigError(f"sampling.{key} must be a {'non-negative' if key == 'seed' else 'positive'} integer")
    o = cfg["output"]
    if not isinstance(o["dir"], str) or not o["dir"]:
        raise ConfigError("output.dir must be a nonempty string")
    if not isinstance(o["formats"], list) or not set(o["formats"]) <= set(FORMATS):
        raise ConfigError(f"output.formats must be a list drawn from {FORMATS}")
    return cfg


def load_config(path: Optional[str]) -> dict:
    """Read a JSON configuration and fill in defaults."""
    if path is None:
        return validate(copy.deepcopy(DEFAULTS))
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc.strerror}") from exc
    try:
        given = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigError(f"config {path} is not valid JSON: {exc}") from exc
    if not isinstance(given, dict):
        raise ConfigError("config must be a JSON object")
    return validate(_merge(DEFAULTS, given))


def run_suites(names: Sequence[str], cfg: dict, force: bool = False) -> dict:
    """Run the named suites; returns the report payload and CSV tables."""
    checks, tables = [], {}
    for name in names:
        log.info("running %s", name)
        res = SUITES[name](cfg, force=force) if name == "norms" else SUITES[name](cfg)
        checks.extend(c.as_dict() for c in res.checks)
        tables.update(res.tables)
    checks.sort(key=lambda c: c["name"])
    counts = {s: sum(c["status"] == s for c in checks) for s in ("pass", "fail", "info")}
    return {
        "payload": {
            "config": jsonable(cfg),
            "suites": list(names),
            "summary": counts,
            "status": "fail" if counts["fail"] else "pass",
            "checks": checks,
        },
        "tables": tables,
    }


def _write_csv(path: Path, rows: list) -> None:
    with path.open("w", newline="", encoding="utf-8") as fh:
        writer = csv.DictWriter(fh, fieldnames=list(rows[0]), quoting=csv.QUOTE_MINIMAL)
        writer.writeheader()
        for row in rows:
            writer.writerow({k: jsonable(v) for k, v in row.items()})


def write_outputs(subcommand: str, result: dict, cfg: dict, out_dir: Path, elapsed: float) -> list:
    out_dir.mkdir(parents=True, exist_ok=True)
    written = []
    formats = cfg["output"]["formats"]
    if "json" in formats:
        report = {"subcommand": subcommand, **result["payload"],
                  "meta": {"created": time.strftime("%Y-%m-%dT%H:%M:%S%z"), "elapsed_s": round(elapsed, 3)}}
        path = out_dir / f"{subcommand}_report.json"
        path.write_text(json.dumps(report, indent=2, sort_keys=True) + "\n", encoding="utf-8")
        written.append(path)
    if "csv" in formats:
        for name, rows in sorted(result["tables"].items()):
            if isinstance(rows, list) and rows:
                path = out_dir / f"{name}.csv"
                _write_csv(path, rows)
                written.append(path)
    return written


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="relcalc",
                                description="Run verification suites of the relative calculus.")
    p.add_argument("subcommand", help="one of: " + ", ".join(SUBCOMMANDS))
    p.add_argument("--config", help="JSON configuration file (defaults are used for missing keys)")
    p.add_argument("--seed", type=int, help="override sampling.seed")
    p.add_argument("--force", action="store_true", help="run the norm sweep even if orders violate constraints")
    p.add_argument("--out", help=f"output directory (overrides ${ENV_OUT} and output.dir)")
    p.add_argument("-v", "--verbose", action="store_true", help="log progress to stderr")
    return p


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return 0 if exc.code == 0 else 2
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    if args.subcommand not in SUBCOMMANDS:
        print(f"relcalc: unknown subcommand {args.subcommand!r}; choose from {', '.join(SUBCOMMANDS)}",
              file=sys.stderr)
        return 2
    try:
        cfg = load_config(args.config)
        if args.seed is not None:
            if args.seed < 0:
                raise ConfigError("--seed must be non-negative")
            cfg["sampling"]["seed"] = args.seed
        out_dir = Path(args.out or os.environ.get(ENV_OUT) or cfg["output"]["dir"])
        names = list(SUITES) if args.subcommand == "all" else [args.subcommand]
        start = time.perf_counter()
        result = run_suites(names, cfg, force=args.force)
        written = write_outputs(args.subcommand, result, cfg, out_dir, time.perf_counter() - start)
    except (RelcalcError, OSError) as exc:
        print(f"relcalc: error: {exc}", file=sys.stderr)
        return 2
    summary = result["payload"]["summary"]
    for chk in result["payload"]["checks"]:
        if chk["status"] == "fail":
            print(f"FAIL {chk['name']}: measured {chk['measured']}", file=sys.stderr)
    print(f"{args.subcommand}: {summary['pass']} pass, {summary['fail']} fail, {summary['info']} info")
    for path in written:
        print(f"wrote {path}")
    return 1 if summary["fail"] else 0


if __name__ == "__main__":
    sys.exit(main())
