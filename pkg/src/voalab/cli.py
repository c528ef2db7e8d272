"""Command line entry point: config parsing, suite execution and report emission."""
from __future__ import annotations

import argparse
import csv
import hashlib
import io
import json
import logging
import os
import sys
import time
from concurrent.futures import ProcessPoolExecutor
from typing import List, Optional

import tomli

from . import __version__
from .exactmath import as_scalar
from .fockspace import LatticeContext, graded_dimension
from .suites import FAIL, PASS, SUITES, UNSTABLE

log = logging.getLogger("voalab")

SCHEMA_VERSION = 1
DEFAULT_SEED = 20240229
EXIT_OK, EXIT_FAIL, EXIT_USAGE = 0, 1, 2

TOP_KEYS = {"lattice", "suites", "maxWeight", "generatorBudget", "output", "format", "seed", "threads", "params"}
LATTICE_KEYS = {"type", "p", "pprime"}


class ConfigError(Exception):
    pass


def _rational(value, where: str) -> str:
    if isinstance(value, bool) or isinstance(value, float):
        raise ConfigError(f"{where}: expected an integer or a rational string like '3/8', got {value!r}")
    try:
        return str(as_scalar(value))
    except (TypeError, ValueError) as exc:
        raise ConfigError(f"{where}: {exc}") from None


def _normalize_param(value, where: str):
    if isinstance(value, float):
        raise ConfigError(f"{where}: floats are not allowed, write rationals as strings")
    if isinstance(value, list):
        return [_normalize_param(v, where) for v in value]
    if isinstance(value, str):
        return _rational(value, where)
    return value


def load_config(text: str) -> dict:
    """Parse and validate a TOML config; returns the normalized config."""
    try:
        raw = tomli.loads(text)
    except tomli.TOMLDecodeError as exc:
        raise ConfigError(f"config is not valid TOML: {exc}") from None
    unknown = set(raw) - TOP_KEYS
    if unknown:
        raise ConfigError(f"unknown config keys: {', '.join(sorted(unknown))}")
    lat = raw.get("lattice")
    if not isinstance(lat, dict) or "p" not in lat:
        raise ConfigError("config needs a [lattice] table with an integer p")
    if set(lat) - LATTICE_KEYS:
        raise ConfigError(f"unknown lattice keys: {', '.join(sorted(set(lat) - LATTICE_KEYS))}")
    if lat.get("type", "A1") != "A1":
        raise ConfigError("only lattice type 'A1' is supported")
    p, pprime = lat["p"], lat.get("pprime")
    if not isinstance(p, int) or isinstance(p, bool) or (pprime is not None and not isinstance(pprime, int)):
        raise ConfigError("lattice p and pprime must be integers")
    try:
        LatticeContext.a1(p, pprime)
    except ValueError as exc:
        raise ConfigError(f"lattice: {exc}") from None
    if p < 2:
        raise ConfigError("lattice p must be at least 2")
    lattice = {"type": "A1", "p": p}
    if pprime is not None:
        lattice["pprime"] = pprime

    names = raw.get("suites")
    if not isinstance(names, list) or not names or not all(isinstance(n, str) for n in names):
        raise ConfigError("suites must be a non-empty list of suite names")
    bad = [n for n in names if n not in SUITES]
    if bad:
        raise ConfigError(f"unknown suites: {', '.join(bad)} (see 'voalab suites')")
    if len(set(names)) != len(names):
        raise ConfigError("suite names must not repeat")
    for n in names:
        mode = SUITES[n].lattice_mode
        if mode == "single" and pprime is not None:
            raise ConfigError(f"suite {n} needs a single-parameter lattice (drop pprime)")
        if mode == "pair2" and pprime != 2:
            raise ConfigError(f"suite {n} needs pprime = 2")

    fmt_ = raw.get("format", "json")
    if fmt_ not in ("json", "csv"):
        raise ConfigError("format must be json or csv")
    seed = raw.get("seed", DEFAULT_SEED)
    if not isinstance(seed, int) or isinstance(seed, bool):
        raise ConfigError("seed must be an integer")
    threads = raw.get("threads", 1)
    if not isinstance(threads, int) or threads < 1:
        raise ConfigError("threads must be a positive integer")
    output = raw.get("output")
    if output is not None and not isinstance(output, str):
        raise ConfigError("output must be a path string")

    overrides = {}
    for key in ("maxWeight", "generatorBudget"):
        if key in raw:
            overrides[key] = _rational(raw[key], key)
    per_suite = raw.get("params", {})
    if not isinstance(per_suite, dict):
        raise ConfigError("params must be a table of per-suite tables")
    if set(per_suite) - set(names):
        raise ConfigError(f"params given for suites not selected: {', '.join(sorted(set(per_suite) - set(names)))}")
    resolved = {}
    for n in names:
        params = dict(SUITES[n].defaults)
        for key, v in overrides.items():
            if key in params:
                params[key] = v
        extra = per_suite.get(n, {})
        if not isinstance(extra, dict):
            raise ConfigError(f"params.{n} must be a table")
        for key, v in extra.items():
            if key not in params:
                raise ConfigError(f"unknown parameter {key!r} for suite {n}")
            params[key] = _normalize_param(v, f"params.{n}.{key}")
        resolved[n] = params

    cfg = {"lattice": lattice, "suites": names, "seed": seed, "format": fmt_, "threads": threads,
           "params": resolved}
    cfg.update(overrides)
    if output is not None:
        cfg["output"] = output
    return cfg


def worker_count(cfg: dict) -> int:
    env = os.environ.get("VOALAB_THREADS")
    if env:
        try:
            n = int(env)
        except ValueError:
            raise ConfigError("VOALAB_THREADS must be a positive integer") from None
        if n < 1:
            raise ConfigError("VOALAB_THREADS must be a positive integer")
        return n
    return cfg.get("threads", 1)


def _run_one(name: str, lattice: dict, params: dict, seed: int):
    start = time.perf_counter()
    try:
        result = SUITES[name].run(lattice, params, seed)
    except Exception as exc:  # a crashing suite is a failed check, not a usage error
        log.exception("suite %s raised", name)
        result = {"checks": [{"name": "suite execution", "anchor": "suite completes", "status": FAIL,
                              "details": {}, "counterexample": {"error": f"{type(exc).__name__}: {exc}"}}],
                  "tables": {}, "solvedConstants": {}}
    return result, time.perf_counter() - start


def _suite_status(checks: List[dict]) -> str:
    statuses = {c["status"] for c in checks}
    if FAIL in statuses:
        return FAIL
    if UNSTABLE in statuses:
        return UNSTABLE
    return PASS


def run_suites(cfg: dict, workers: int = 1):
    """Execute the configured suites; returns (report body, timings)."""
    names = cfg["suites"]
    jobs = [(n, cfg["lattice"], cfg["params"][n], cfg["seed"]) for n in names]
    if workers > 1 and len(jobs) > 1:
        with ProcessPoolExecutor(max_workers=min(workers, len(jobs))) as pool:
            results = list(pool.map(_run_one, *zip(*jobs)))
    else:
        results = [_run_one(*job) for job in jobs]
    suites, timings, constants = [], {}, {}
    counts = {PASS: 0, FAIL: 0, UNSTABLE: 0}
    for (name, _, params, _), (res, secs) in zip(jobs, results):
        timings[name] = round(secs, 3)
        for c in res["checks"]:
            counts[c["status"]] += 1
        constants.update(res["solvedConstants"])
        suites.append({
            "name": name,
            "anchor": SUITES[name].anchor,
            "parameters": params,
            "status": _suite_status(res["checks"]),
            "checks": res["checks"],
            "tables": res["tables"],
            "solvedConstants": res["solvedConstants"],
        })
    overall = _suite_status([{"status": s["status"]} for s in suites])
    body = {
        "schemaVersion": SCHEMA_VERSION,
        "toolVersion": __version__,
        "config": cfg,
        "status": overall,
        "summary": {"checks": sum(counts.values()), "pass": counts[PASS], "fail": counts[FAIL],
                    "unstable": counts[UNSTABLE]},
        "solvedConstants": {k: constants[k] for k in sorted(constants)},
        "suites": suites,
    }
    return body, timings


def canonical_json(body: dict) -> str:
    return json.dumps(body, indent=2, ensure_ascii=True) + "\n"


def dimension_csv(body: dict) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["suite", "table", "weight", "dim"])
    for s in body["suites"]:
        for table, rows in s["tables"].items():
            for weight, dim in rows:
                w.writerow([s["name"], table, weight, dim])
    return buf.getvalue()


def exit_code(body: dict) -> int:
    return EXIT_OK if body["status"] == PASS else EXIT_FAIL


def _write(path: Optional[str], text: str):
    if path is None:
        sys.stdout.write(text)
    else:
        with open(path, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)


def cmd_run(args) -> int:
    try:
        with open(args.config, "rb") as fh:
            text = fh.read().decode("utf-8")
    except OSError as exc:
        raise ConfigError(f"cannot read config: {exc}") from None
    cfg = load_config(text)
    if args.format:
        cfg["format"] = args.format
    workers = worker_count(cfg)
    body, timings = run_suites(cfg, workers)
    text = canonical_json(body) if cfg["format"] == "json" else dimension_csv(body)
    # --out is a delivery choice, not part of the echoed config
    out = args.out or cfg.get("output")
    _write(out, text)
    # wall-clock data lives beside the report so the report itself stays byte-identical
    side = {"canonicalSha256": hashlib.sha256(canonical_json(body).encode()).hexdigest(),
            "workers": workers, "seconds": timings}
    if out is not None:
        _write(out + ".timings.json", json.dumps(side, indent=2) + "\n")
    else:
        log.info("timings: %s", json.dumps(side))
    for s in body["suites"]:
        for c in s["checks"]:
            if c["status"] != PASS:
                log.warning("%s: %s -> %s", s["name"], c["name"], c["status"])
    return exit_code(body)


def cmd_suites(args) -> int:
    catalog = [{"name": s.name, "anchor": s.anchor, "lattice": s.lattice_mode, "defaults": s.defaults}
               for s in SUITES.values()]
    sys.stdout.write(json.dumps(catalog, indent=2) + "\n")
    return EXIT_OK


def cmd_char(args) -> int:
    try:
        ctx = LatticeContext.a1(args.p, args.pprime)
        coset = (as_scalar(args.coset),)
        cutoff = as_scalar(args.max_weight)
    except (TypeError, ValueError) as exc:
        raise ConfigError(str(exc)) from None
    rows = graded_dimension(ctx, coset, cutoff, single_charge=args.fock_only)
    w = csv.writer(sys.stdout, lineterminator="\n")
    w.writerow(["weight", "dim"])
    for weight, dim in rows:
        w.writerow([str(weight), dim])
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="voalab", description="Exact checks for rank-one lattice vertex algebras.")
    ap.add_argument("--version", action="version", version=f"voalab {__version__}")
    ap.add_argument("-v", "--verbose", action="store_true", help="log progress to stderr")
    sub = ap.add_subparsers(dest="command", required=True)
    r = sub.add_parser("run", help="run the suites named in a config file")
    r.add_argument("--config", required=True)
    r.add_argument("--out", help="report path (default: config output, else stdout)")
    r.add_argument("--format", choices=("json", "csv"))
    r.set_defaults(func=cmd_run)
    s = sub.add_parser("suites", help="list the suite catalog")
    s.set_defaults(func=cmd_suites)
    c = sub.add_parser("char", help="graded dimensions of a lattice coset module")
    c.add_argument("--p", type=int, required=True)
    c.add_argument("--pprime", type=int)
    c.add_argument("--coset", required=True, help="coset representative as a multiple of alpha, e.g. 3/4")
    c.add_argument("--max-weight", required=True)
    c.add_argument("--fock-only", action="store_true", help="restrict to the charge of the representative")
    c.set_defaults(func=cmd_char)
    return ap


def main(argv: Optional[List[str]] = None) -> int:
    ap = build_parser()
    args = ap.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.ERROR,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        return args.func(args)
    except ConfigError as exc:
        sys.stderr.write(f"voalab: error: {exc}\n")
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
