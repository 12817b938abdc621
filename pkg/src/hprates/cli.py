"""Command-line front end.

    hprates solve|rates|equilibrium|check --config <path> [--out <dir>] [--digits <n>] [--force]

The configuration is a JSON file; see ``load_config`` for the fields. Outputs
go to the output directory as JSON documents and CSV tables with decimal
strings. On any error a JSON error record is printed to stderr and the exit
status is nonzero.
"""

from __future__ import annotations

import argparse
import json
import logging
import os
import sys
import time
from concurrent.futures import ThreadPoolExecutor

import mpmath
import numpy as np
from mpmath import mp, mpf

from . import __version__, hp_solver
from . import model as model_mod
from . import serialize as ser
from .equilibrium import (
    MIN_NODES,
    mixture_field_solution,
    mixture_prediction,
    solve_equilibrium,
)
from .errors import HPRatesError, ParameterDomainError
from .model import make_model, mp_to_str
from .potential import balayage_onto_segment, green_segment
from .rates import (
    RATE_KINDS,
    approximant,
    denominator_zeros,
    empirical_error,
    fit_slope,
    n_of,
    predicted_slope,
)

log = logging.getLogger("hprates")

KIND_NAMES = ("pade", "hp2", "hp3", "type1")
POWERS_FOR = {"pade": (1,), "hp2": (1, 2), "hp3": (1, 2, 3), "type1": (1, 2, 3)}
EXIT_ERROR = 2
EXIT_CHECK_FAILED = 1

DEFAULTS = {
    "digits": None,
    "kinds": [],
    "index_ranges": {},
    "theta": [],
    "probe_points": [],
    "node_count": 256,
    "output_dir": "hprates_out",
}


class ConfigError(ParameterDomainError):
    pass


# ---------------------------------------------------------------------------
# configuration


def load_config(path, overrides=None):
    """Read and validate a configuration file.

    Fields: A, B (decimal strings, 1 < A < B), digits (int >= 50), kinds (subset of
    pade/hp2/hp3/type1), index_ranges ({kind: [first, last]}), theta (list of
    decimal strings >= 0), probe_points (list of [re, im] decimal strings, off E),
    node_count (int >= 32), output_dir. Everything is validated before any
    computation starts.
    """
    try:
        with open(path, encoding="utf-8") as fh:
            raw = json.load(fh)
    except (OSError, json.JSONDecodeError) as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from exc
    if not isinstance(raw, dict):
        raise ConfigError("config must be a JSON object")
    cfg = dict(DEFAULTS)
    cfg.update(raw)
    for k, v in (overrides or {}).items():
        if v is not None:
            cfg[k] = v
    return validate_config(cfg)


def _decimal(value, name):
    if isinstance(value, bool) or not isinstance(value, (str, int, float)):
        raise ConfigError(f"{name} must be a decimal string")
    text = value.strip() if isinstance(value, str) else repr(value)
    try:
        mpf(text)
    except (ValueError, TypeError) as exc:
        raise ConfigError(f"{name}={value!r} is not a decimal number") from exc
    return text


def validate_config(cfg):
    unknown = set(cfg) - set(DEFAULTS) - {"A", "B"}
    if unknown:
        raise ConfigError(f"unknown config fields: {sorted(unknown)}")
    for key in ("A", "B"):
        if key not in cfg:
            raise ConfigError(f"missing required field {key}")
    out = {}
    out["A"] = _decimal(cfg["A"], "A")
    out["B"] = _decimal(cfg["B"], "B")
    digits = cfg["digits"]
    if digits is not None and (isinstance(digits, bool) or not isinstance(digits, int)):
        raise ConfigError("digits must be an integer")
    kinds = cfg["kinds"]
    if not isinstance(kinds, list) or any(k not in KIND_NAMES for k in kinds):
        raise ConfigError(f"kinds must be a list drawn from {KIND_NAMES}")
    if len(set(kinds)) != len(kinds):
        raise ConfigError("kinds contains duplicates")
    out["kinds"] = [k for k in KIND_NAMES if k in kinds]
    ranges = cfg["index_ranges"]
    if not isinstance(ranges, dict):
        raise ConfigError("index_ranges must be an object")
    out["index_ranges"] = {}
    for k in out["kinds"]:
        r = ranges.get(k)
        if (
            not isinstance(r, list)
            or len(r) != 2
            or not all(isinstance(i, int) and not isinstance(i, bool) for i in r)
            or not 1 <= r[0] <= r[1]
        ):
            raise ConfigError(f"index_ranges.{k} must be [first, last] with 1 <= first <= last")
        out["index_ranges"][k] = [r[0], r[1]]
    if digits is None:
        # HP systems lose O(N) digits
        digits = max(200, 4 * max(_needed_coefficients(out).values(), default=0))
    out["digits"] = digits
    # raises ParameterDomainError naming the precondition (1 < A < B, digits >= 50)
    make_model(out["A"], out["B"], digits)
    thetas = cfg["theta"]
    if not isinstance(thetas, list):
        raise ConfigError("theta must be a list")
    out["theta"] = []
    for t in thetas:
        text = _decimal(t, "theta")
        if not mpf(text) >= 0:
            raise ConfigError(f"theta={text} must be >= 0")
        out["theta"].append(text)
    pts = cfg["probe_points"]
    if not isinstance(pts, list):
        raise ConfigError("probe_points must be a list of [re, im] pairs")
    out["probe_points"] = []
    for p in pts:
        if not isinstance(p, list) or len(p) != 2:
            raise ConfigError("each probe point must be a [re, im] pair")
        re_, im_ = _decimal(p[0], "probe re"), _decimal(p[1], "probe im")
        if mpf(im_) == 0 and -1 <= mpf(re_) <= 1:
            raise ConfigError(f"probe point ({re_}, {im_}) lies on E = [-1, 1]")
        out["probe_points"].append([re_, im_])
    nodes = cfg["node_count"]
    if isinstance(nodes, bool) or not isinstance(nodes, int) or nodes < MIN_NODES:
        raise ConfigError(f"node_count must be an integer >= {MIN_NODES}, got {nodes!r}")
    out["node_count"] = nodes
    if not isinstance(cfg["output_dir"], str) or not cfg["output_dir"]:
        raise ConfigError("output_dir must be a non-empty string")
    out["output_dir"] = cfg["output_dir"]
    return out


def _model(cfg):
    return make_model(cfg["A"], cfg["B"], cfg["digits"])


# ---------------------------------------------------------------------------
# Laurent cache files


def _needed_coefficients(cfg):
    need = {}
    for kind in cfg["kinds"]:
        last = cfg["index_ranges"][kind][1]
        if kind == "type1":
            N = hp_solver.required_coefficients("type1_triple", last)
        else:
            N = n_of(kind, last)
        for p in POWERS_FOR[kind]:
            need[p] = max(need.get(p, 0), N)
    return need


def cache_path(cfg):
    A, B, d = make_model(cfg["A"], cfg["B"], cfg["digits"]).key()
    name = f"laurent_A{A}_B{B}_d{d}.json".replace("/", "_")
    return os.path.join(cfg["output_dir"], "cache", name)


def ensure_laurent_cache(cfg, force=False):
    """Load or compute the coefficient blocks the configuration needs; returns the cache path."""
    need = _needed_coefficients(cfg)
    model = _model(cfg)
    path = cache_path(cfg)
    if not need:
        return None
    os.makedirs(os.path.dirname(path), exist_ok=True)
    doc = None
    if os.path.exists(path) and not force:
        doc = ser.load_json(path)
        header = doc.get("index", {})
        ok = doc.get("A") == model.key()[0] and doc.get("B") == model.key()[1] and doc.get("digits") == cfg["digits"]
        if ok and all(header.get(f"f{p}", 0) >= N for p, N in need.items()):
            with mp.workdps(cfg["digits"]):
                for p in need:
                    model_mod.seed_laurent_cache(model, p, [mpf(s) for s in doc[f"f{p}"]])
            log.info("laurent cache hit: %s (recomputation skipped)", path)
            return path
        log.info("laurent cache at %s does not cover this config; recomputing", path)
    t0 = time.perf_counter()
    arrays = {}
    for p, N in sorted(need.items()):
        block = model_mod.coefficient_block(model, p, N)
        arrays[p] = [mp_to_str(c, cfg["digits"]) for c in block]
    log.info("laurent coefficients computed in %.1f s", time.perf_counter() - t0)
    out = ser.stamp("laurent_cache", cfg)
    out.update(
        {
            "A": model.key()[0],
            "B": model.key()[1],
            "digits": cfg["digits"],
            "contour_radius": model_mod.CONTOUR_RADIUS,
            "index": {f"f{p}": len(v) for p, v in sorted(arrays.items())},
        }
    )
    for p, v in sorted(arrays.items()):
        out[f"f{p}"] = v
    ser.write_json(path, out)
    return path


# ---------------------------------------------------------------------------
# commands


def _poly_strings(P, digits):
    return [mp_to_str(c, digits) for c in P.coefficients]


def _result_doc(res, digits):
    order = res.residual_order
    return {
        "kind": res.kind,
        "index": res.index,
        "N": res.N,
        "polynomials": [_poly_strings(P, digits) for P in res.polynomials],
        "residual_order": "inf" if order == hp_solver.INFINITE_ORDER else str(int(order)),
        "condition_estimate": mp_to_str(res.condition_estimate, 6),
        "rank_deficiency": res.rank_deficiency,
        "notes": list(res.notes),
    }


def _type1_result(model, order, m):
    kind = "type1_pair" if order == 2 else "type1_triple"
    N = hp_solver.required_coefficients(kind, m)
    with model.precision.workdps():
        series = [model_mod.laurent_coeffs_power(model, N, p) for p in range(1, order + 1)]
        return hp_solver.hp_type1(series, order=order, m=m)


def _parallel_map(fn, items, jobs):
    if jobs <= 1:
        return [fn(x) for x in items]
    with ThreadPoolExecutor(max_workers=jobs) as ex:
        return list(ex.map(fn, items))  # preserves input order


def cmd_solve(cfg, force=False, jobs=1):
    if not cfg["kinds"] and not cfg["theta"]:
        log.warning("nothing to do: kinds and theta are empty")
        return []
    os.makedirs(cfg["output_dir"], exist_ok=True)
    written = []
    cpath = ensure_laurent_cache(cfg, force)
    if cpath:
        written.append(cpath)
    model = _model(cfg)
    digits = cfg["digits"]
    for kind in cfg["kinds"]:
        lo, hi = cfg["index_ranges"][kind]
        idx = list(range(lo, hi + 1))
        if kind == "type1":
            results = _parallel_map(lambda i: (_type1_result(model, 2, i), _type1_result(model, 3, i)), idx, jobs)
            entries = [_result_doc(r, digits) for pair in results for r in pair]
        else:
            results = _parallel_map(lambda i: approximant(model, kind, i), idx, jobs)
            entries = [_result_doc(r, digits) for r in results]
        doc = ser.stamp("polynomials", cfg)
        doc.update({"kind": kind, "index_range": [lo, hi], "results": entries})
        written.append(ser.write_json(os.path.join(cfg["output_dir"], f"polynomials_{kind}.json"), doc))
    for t in cfg["theta"]:
        written += _write_equilibrium(cfg, t)
    written.append(_write_manifest(cfg, "solve", written))
    return written


def _measure_doc(mu):
    return {
        "segment": [ser.num(mu.segment[0]), ser.num(mu.segment[1])],
        "reference": "arcsine",
        "nodes": [ser.num(x) for x in mu.density_nodes],
        "values": [ser.num(v) for v in mu.density_values],
        "mass": ser.num(mu.mass),
    }


def _write_equilibrium(cfg, theta_text):
    model = _model(cfg)
    sol = solve_equilibrium(model, float(theta_text), cfg["node_count"])
    doc = ser.stamp("equilibrium", cfg)
    ids = {
        name: {"residual": ser.num(r), "location": None if loc is None else ser.complex_pair(loc)}
        for name, (r, loc) in sol.identity_residuals.items()
    }
    doc.update(
        {
            "theta": theta_text,
            "node_count": cfg["node_count"],
            "c_E": ser.num(sol.c_E),
            "c_F": ser.num(sol.c_F),
            "residual_E": ser.num(sol.residual_E),
            "residual_F": ser.num(sol.residual_F),
            "identity_residuals": ids,
            "lambda_E": _measure_doc(sol.lambda_E),
            "lambda_F": _measure_doc(sol.lambda_F),
        }
    )
    tag = theta_text.replace("/", "_")
    out_json = ser.write_json(os.path.join(cfg["output_dir"], f"equilibrium_theta{tag}.json"), doc)
    rows = []
    for seg_name, mu in (("E", sol.lambda_E), ("F", sol.lambda_F)):
        x = mu.density_nodes[::-1]
        dens = mu.density(x)
        for xi, di, hi in zip(x, dens, mu.reference_density(x)):
            rows.append((seg_name, ser.num(xi), ser.num(di), ser.num(hi)))
    out_csv = ser.write_csv(
        os.path.join(cfg["output_dir"], f"equilibrium_theta{tag}_density.csv"),
        rows,
        columns=("segment", "x", "density", "arcsine_relative_density"),
    )
    return [out_json, out_csv]


def cmd_equilibrium(cfg, force=False, jobs=1):
    if not cfg["theta"]:
        log.warning("nothing to do: theta list is empty")
        return []
    os.makedirs(cfg["output_dir"], exist_ok=True)
    written = []
    for t in cfg["theta"]:
        written += _write_equilibrium(cfg, t)
    written.append(_write_manifest(cfg, "equilibrium", written))
    return written


def cmd_rates(cfg, force=False, jobs=1):
    kinds = [k for k in cfg["kinds"] if k in RATE_KINDS]
    if not kinds:
        log.warning("nothing to do: no rate kinds (pade, hp2, hp3) in config")
        return []
    if "type1" in cfg["kinds"]:
        log.warning("type1 has no rate statement; skipped in rates")
    if not cfg["probe_points"]:
        raise ConfigError("rates needs at least one probe point")
    os.makedirs(cfg["output_dir"], exist_ok=True)
    written = []
    cpath = ensure_laurent_cache(cfg, force)
    if cpath:
        written.append(cpath)
    model = _model(cfg)
    digits = cfg["digits"]
    summary = ser.stamp("rates_summary", cfg)
    entries = []
    for pi, (re_, im_) in enumerate(cfg["probe_points"]):
        with mp.workdps(digits):
            z = mpmath.mpc(mpf(re_), mpf(im_))
        zc = complex(float(mpf(re_)), float(mpf(im_)))
        rows = []
        for kind in kinds:
            lo, hi = cfg["index_ranges"][kind]
            table, skipped = [], []

            def one(i):
                try:
                    return i, empirical_error(model, kind, i, z), None
                except HPRatesError as exc:
                    return i, None, str(exc)

            for i, err, note in _parallel_map(one, range(lo, hi + 1), jobs):
                if err is None:
                    skipped.append(note)
                    continue
                with mp.workdps(digits):
                    le = mpmath.log(err)
                table.append((n_of(kind, i), float(le)))
                rows.append((str(n_of(kind, i)), mp_to_str(le, digits), kind, re_, im_))
            entry = {"probe_index": pi, "z": [re_, im_], "kind": kind, "index_range": [lo, hi]}
            if len(table) >= 2:
                fitted = fit_slope(table)
                pred = predicted_slope(model, kind, zc, cfg["node_count"])
                entry.update(
                    {
                        "fitted_slope": ser.num(fitted),
                        "predicted_slope": ser.num(pred),
                        "relative_gap": ser.num(abs(fitted - pred) / abs(pred)),
                    }
                )
                if len(table) < 8:
                    entry["warning"] = "fewer than 8 usable indices; slope is indicative only"
            else:
                entry["warning"] = "fewer than 2 usable indices; no fit"
            entry["skipped"] = skipped
            entries.append(entry)
        written.append(ser.write_csv(os.path.join(cfg["output_dir"], f"rates_z{pi}.csv"), rows))
    summary["tolerances_note"] = "slopes are least-squares fits of log|error| against N; tolerances are artifact decisions"
    summary["entries"] = entries
    written.append(ser.write_json(os.path.join(cfg["output_dir"], "rates_summary.json"), summary))
    written.append(_write_manifest(cfg, "rates", written))
    return written


def cmd_check(cfg, force=False, jobs=1):
    """Invariant suite at desk scale; writes check_report.json, exit 1 on any failure."""
    os.makedirs(cfg["output_dir"], exist_ok=True)
    model = _model(cfg)
    checks = []

    def record(name, value, limit, ok=None):
        ok = (value < limit) if ok is None else ok
        checks.append({"name": name, "value": ser.num(float(value)), "limit": ser.num(float(limit)), "pass": bool(ok)})

    rng = np.random.default_rng(7)
    z = rng.uniform(-3, 3, 20) + 1j * rng.uniform(0.2, 3, 20)
    w = rng.uniform(-3, 3, 20) + 1j * rng.uniform(0.2, 3, 20)
    sym = np.max(np.abs(green_segment(z, w, (-1, 1)) - green_segment(w, z, (-1, 1))))
    record("green_symmetry", sym, 1e-12)
    thetas = [float(t) for t in cfg["theta"]] or [1.0, 3.0]
    for t in thetas:
        sol = solve_equilibrium(model, t, cfg["node_count"], check_identities=False)
        record(f"residual_E theta={t:g}", sol.residual_E, 1e-8)
        record(f"residual_F theta={t:g}", sol.residual_F, 1e-8)
        for name, (r, _) in sol.identity_residuals.items():
            record(f"{name} theta={t:g}", r, 1e-7)
        if t > 0:
            b = balayage_onto_segment(sol.lambda_E, sol.lambda_F.segment, n=cfg["node_count"])
            record(f"balayage theta={t:g}", np.max(np.abs(b.density_values - sol.lambda_F.density_values)), 1e-6)
    for t in (0.25, 0.5):
        a = mixture_field_solution(model, t, node_count=cfg["node_count"]).measure
        b = mixture_prediction(model, t, node_count=cfg["node_count"])
        record(f"mixture t={t:g}", np.max(np.abs(a.density_values - b.density_values)), 1e-6)
    for kind in cfg["kinds"]:
        if kind not in ("hp2", "hp3"):
            continue
        ensure_laurent_cache(cfg, force)
        last = cfg["index_ranges"][kind][1]
        _, all_real = denominator_zeros(model, kind, last)
        record(f"zeros in (-1,1) {kind} index={last}", 0.0 if all_real else 1.0, 0.5)
    doc = ser.stamp("check_report", cfg)
    doc["checks"] = checks
    doc["passed"] = all(c["pass"] for c in checks)
    path = ser.write_json(os.path.join(cfg["output_dir"], "check_report.json"), doc)
    if not doc["passed"]:
        failed = [c["name"] for c in checks if not c["pass"]]
        raise CheckFailed(f"{len(failed)} checks failed: {failed}", [path])
    return [path]


class CheckFailed(Exception):
    def __init__(self, message, written):
        super().__init__(message)
        self.written = written


def _write_manifest(cfg, command, written):
    doc = ser.stamp("manifest", cfg)
    doc.update(
        {
            "command": command,
            "config": {k: v for k, v in cfg.items() if k != "output_dir"},
            "files": sorted(os.path.relpath(p, cfg["output_dir"]) for p in written),
        }
    )
    return ser.write_json(os.path.join(cfg["output_dir"], f"manifest_{command}.json"), doc)


COMMANDS = {
    "solve": cmd_solve,
    "rates": cmd_rates,
    "equilibrium": cmd_equilibrium,
    "check": cmd_check,
}


def _error_record(exc):
    return {
        "schema_version": ser.SCHEMA_VERSION,
        "document": "error",
        "tool_version": __version__,
        "error": type(exc).__name__,
        "message": str(exc),
    }


def build_parser():
    p = argparse.ArgumentParser(prog="hprates", description=__doc__.splitlines()[0])
    p.add_argument("command", choices=sorted(COMMANDS))
    p.add_argument("--config", required=True, help="JSON configuration file")
    p.add_argument("--out", help="output directory (overrides output_dir)")
    p.add_argument("--digits", type=int, help="working precision in decimal digits")
    p.add_argument("--force", action="store_true", help="recompute cached Laurent coefficients")
    p.add_argument("--jobs", type=int, default=1, help="worker threads for (kind, index) tasks")
    p.add_argument("-v", "--verbose", action="store_true")
    return p


def main(argv=None):
    args = build_parser().parse_args(argv)
    logging.basicConfig(
        level=logging.INFO if args.verbose else logging.WARNING,
        format="%(levelname)s %(name)s: %(message)s",
        stream=sys.stderr,
    )
    try:
        cfg = load_config(args.config, {"output_dir": args.out, "digits": args.digits})
        written = COMMANDS[args.command](cfg, force=args.force, jobs=max(1, args.jobs))
    except CheckFailed as exc:
        print(json.dumps(_error_record(exc)), file=sys.stderr)
        return EXIT_CHECK_FAILED
    except (HPRatesError, ValueError, OSError) as exc:
        print(json.dumps(_error_record(exc)), file=sys.stderr)
        return EXIT_ERROR
    for path in written:
        print(path)
    return 0


if __name__ == "__main__":
    sys.exit(main())
