"""Command-line entry point: report, suite, converge, flow, falsify.

Exit codes: 0 all checks pass, 1 a check failed, 2 usage or configuration
error, 3 numerical validity failure.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import os
import sys
import tempfile

import numpy as np

from .body import (BodyValidationError, evaluate_fields, linear_image, make_ellipsoid,
                   make_fourier, make_sphharm, translate)
from .flowcheck import FlowStabilityError, integrate_flow, stable_dt, variation_check
from .geometry import PolarRefinementError
from .invariants import SEQUENCE_KINDS, entropy_omega_K, invariant_report, lambda_K, limit_sequence
from .sphere import build_grid
from .suite import (DEFAULT_RESOLUTIONS, SuiteConfig, center, default_p_list, default_tolerance,
                    random_fourier_body, random_sphharm_body, run_suite)

SCHEMA = "centroaffine.config/1"
EXIT_OK, EXIT_FAIL, EXIT_USAGE, EXIT_NUMERIC = 0, 1, 2, 3
CONFIG_KEYS = {"schema", "body", "resolutions", "p_list", "p_max", "chain_p_max", "tolerance",
               "seed", "flow", "falsify"}


class ConfigError(ValueError):
    pass


# ------------------------------------------------------------------ output


def _fmt(x) -> str:
    return format(float(x), ".17g")


def _encode(obj, indent=0) -> str:
    compact = indent is None
    pad = "" if compact else "  " * (indent + 1)
    end = "" if compact else "  " * indent
    nl = "" if compact else "\n"
    deeper = None if compact else indent + 1
    if isinstance(obj, dict):
        if not obj:
            return "{}"
        items = [f"{pad}{json.dumps(str(k))}: {_encode(v, deeper)}" for k, v in obj.items()]
        return "{" + nl + ("," + nl if nl else ", ").join(items) + nl + end + "}"
    if isinstance(obj, (list, tuple, np.ndarray)):
        seq = list(obj)
        if not seq:
            return "[]"
        if compact or all(not isinstance(v, (dict, list, tuple, np.ndarray)) for v in seq):
            return "[" + ", ".join(_encode(v, deeper) for v in seq) + "]"
        return "[" + nl + ("," + nl).join(pad + _encode(v, deeper) for v in seq) + nl + end + "]"
    if isinstance(obj, (bool, np.bool_)):
        return "true" if obj else "false"
    if obj is None:
        return "null"
    if isinstance(obj, (int, np.integer)):
        return str(int(obj))
    if isinstance(obj, (float, np.floating)):
        return _fmt(obj) if math.isfinite(obj) else "null"
    return json.dumps(str(obj))


def dumps(obj, compact: bool = False) -> str:
    """JSON text with every float written to 17 significant digits.

    ``compact`` puts the whole document on one line (for NDJSON logs).
    """
    return _encode(obj, None if compact else 0) + "\n"


def _csv_text(header, rows) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    for row in rows:
        w.writerow([_fmt(v) if isinstance(v, (float, np.floating)) else
                    ("" if v is None else v) for v in row])
    return buf.getvalue()


def write_atomic(path, text: str) -> None:
    """Write ``text`` to ``path`` through a temporary file and a rename."""
    directory = os.path.dirname(os.path.abspath(path))
    os.makedirs(directory, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=directory, prefix=".tmp-")
    try:
        with os.fdopen(fd, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


# ------------------------------------------------------------------ config


def parse_resolution(text, dim=None):
    parts = tuple(int(p) for p in str(text).split(","))
    if dim is not None and len(parts) != (1 if dim == 2 else 2):
        raise ConfigError(f"resolution {text!r} does not match dimension {dim}")
    return parts


def build_body(spec, seed=0):
    """Body from a configuration mapping."""
    if not isinstance(spec, dict) or "family" not in spec:
        raise ConfigError("body spec must be an object with a 'family' field")
    fam = spec["family"]
    try:
        if fam == "ellipsoid":
            body = make_ellipsoid(spec["axes"])
        elif fam in ("fourier", "fourier2d"):
            body = make_fourier(spec.get("c0", 1.0), [tuple(c) for c in spec.get("coeffs", [])])
        elif fam in ("sphharm", "sphharm3d"):
            body = make_sphharm(spec.get("c0", 1.0), [tuple(c) for c in spec.get("coeffs", [])])
        elif fam == "linear_image":
            body = linear_image(build_body(spec["base"], seed), spec["matrix"])
        elif fam == "translate":
            body = translate(build_body(spec["base"], seed), spec["t"])
        elif fam == "random_fourier":
            body = random_fourier_body(np.random.default_rng(spec.get("seed", seed)))
        elif fam == "random_sphharm":
            body = random_sphharm_body(np.random.default_rng(spec.get("seed", seed)))
        else:
            raise ConfigError(f"unknown body family {fam!r}")
    except KeyError as exc:
        raise ConfigError(f"body spec for {fam!r} is missing {exc}") from exc
    except (TypeError, ValueError) as exc:
        if isinstance(exc, BodyValidationError):
            raise
        raise ConfigError(f"invalid body spec: {exc}") from exc
    if spec.get("centered", False):
        body = center(body)
    return body


def load_config(path, args):
    try:
        with open(path, encoding="utf-8") as fh:
            cfg = json.load(fh)
    except OSError as exc:
        raise ConfigError(f"cannot read config: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise ConfigError(f"config is not valid JSON: {exc}") from exc
    if not isinstance(cfg, dict):
        raise ConfigError("config must be a JSON object")
    if cfg.get("schema") != SCHEMA:
        raise ConfigError(f"config schema must be {SCHEMA!r}")
    unknown = set(cfg) - CONFIG_KEYS
    if unknown:
        raise ConfigError(f"unknown config keys: {sorted(unknown)}")
    if args.seed is not None:
        cfg["seed"] = args.seed
    cfg.setdefault("seed", 0)
    if args.pmax is not None:
        cfg["p_max"] = args.pmax
    cfg.setdefault("p_max", 20)
    if not isinstance(cfg["p_max"], int) or not 1 <= cfg["p_max"] <= 48:
        raise ConfigError("p_max must be an integer in 1..48")
    return cfg


def _dim_of(cfg):
    body = cfg.get("body") or {}
    if "dim" in body:
        return int(body["dim"])
    fam = body.get("family")
    if fam == "ellipsoid":
        return len(body.get("axes", []))
    if fam in ("sphharm", "sphharm3d", "random_sphharm"):
        return 3
    if fam in ("linear_image", "translate"):
        return _dim_of({"body": body.get("base", {})})
    fal = cfg.get("falsify") or {}
    return int(fal.get("dim", 2))


def resolutions(cfg, args, dim):
    coarse, fine = DEFAULT_RESOLUTIONS[dim]
    res = cfg.get("resolutions")
    if res is not None:
        try:
            coarse = tuple(int(r) for r in np.atleast_1d(res["coarse"]))
            fine = tuple(int(r) for r in np.atleast_1d(res["fine"]))
        except (KeyError, TypeError, ValueError) as exc:
            raise ConfigError("resolutions must be {'coarse': ..., 'fine': ...}") from exc
    if args.resolution is not None:
        fine = parse_resolution(args.resolution, dim)
        coarse = tuple(max(8, 2 * (r // 4)) for r in fine)
    if len(fine) != (1 if dim == 2 else 2) or len(coarse) != len(fine):
        raise ConfigError(f"resolutions do not match dimension {dim}")
    if not all(c < f for c, f in zip(coarse, fine)):
        raise ConfigError("resolutions must be ordered coarse < fine")
    return coarse, fine


def _meta(cfg, coarse, fine, dim):
    tol = cfg.get("tolerance")
    return {
        "schema": SCHEMA,
        "seed": cfg["seed"],
        "resolution": list(fine),
        "coarse_resolution": list(coarse),
        "tolerance": default_tolerance(dim) if tol is None else tol,
    }


# ---------------------------------------------------------------- commands


def cmd_report(cfg, args):
    dim = _dim_of(cfg)
    coarse, fine = resolutions(cfg, args, dim)
    body = build_body(cfg["body"], cfg["seed"])
    p_list = cfg.get("p_list") or default_p_list(dim)
    rep = invariant_report(body, coarse, fine, p_list, cfg["p_max"])
    out = {**_meta(cfg, coarse, fine, dim), "report": rep.to_dict()}
    write_atomic(os.path.join(args.out, "report.json"), dumps(out))
    return EXIT_OK


SUITE_HEADER = ["id", "status", "lhs", "rhs", "slack", "relative_slack", "pass", "equality",
                "equality_expected", "hypothesis_flags", "drift", "tol", "resolution"]


def _suite_rows(results, body_label=""):
    rows = []
    for r in results:
        flags = ";".join(f"{k}={_flag(v)}" for k, v in r.hypothesis_flags.items())
        rows.append([r.check_id if not body_label else f"{body_label}:{r.check_id}", r.status,
                     min(r.lhs) if r.lhs else None, min(r.rhs) if r.rhs else None,
                     r.slack if r.applicable else None,
                     r.relative_slack if r.applicable else None,
                     "" if r.passed is None else str(bool(r.passed)).lower(),
                     str(r.equality).lower(), str(r.equality_expected).lower(), flags,
                     r.drift, r.tol, "x".join(str(v) for v in r.resolution)])
    return rows


def _flag(v):
    if isinstance(v, (bool, np.bool_)):
        return str(bool(v)).lower()
    if isinstance(v, (float, np.floating)):
        return _fmt(v)
    return str(v)


def _suite_config(cfg, coarse, fine):
    return SuiteConfig(resolutions=(coarse, fine), p_list=cfg.get("p_list"),
                       chain_p_max=int(cfg.get("chain_p_max", 8)), seed=int(cfg["seed"]),
                       tol=cfg.get("tolerance"))


def cmd_suite(cfg, args):
    dim = _dim_of(cfg)
    coarse, fine = resolutions(cfg, args, dim)
    body = build_body(cfg["body"], cfg["seed"])
    results = run_suite(body, _suite_config(cfg, coarse, fine))
    write_atomic(os.path.join(args.out, "suite.csv"), _csv_text(SUITE_HEADER, _suite_rows(results)))
    out = {**_meta(cfg, coarse, fine, dim), "body": body.descriptor(),
           "checks": [r.to_dict() for r in results]}
    write_atomic(os.path.join(args.out, "suite.json"), dumps(out))
    return EXIT_FAIL if any(r.status == "fail" for r in results) else EXIT_OK


CONVERGE_HEADER = ["kind", "p", "stated_term", "corrected_term", "richardson_tail",
                   "entropy_target", "relative_gap"]


def cmd_converge(cfg, args):
    dim = _dim_of(cfg)
    _, fine = resolutions(cfg, args, dim)
    body = build_body(cfg["body"], cfg["seed"])
    fields = evaluate_fields(body, build_grid(dim, fine))
    omega_k = entropy_omega_K(fields)
    targets = {"a": omega_k, "b": omega_k, "c": 1.0 / omega_k, "d": lambda_K(fields)}
    rows = []
    for kind in SEQUENCE_KINDS:
        seq = limit_sequence(fields, kind, cfg["p_max"])
        logs = seq.corrected_log
        for i, p in enumerate(seq.p.tolist()):
            tail = math.exp(2 * logs[i] - logs[i - 1]) if i > 0 else None
            term = float(seq.corrected_terms[i])
            rows.append([kind, int(p), float(seq.stated_terms[i]), term, tail, targets[kind],
                         abs(term - targets[kind]) / abs(targets[kind])])
    write_atomic(os.path.join(args.out, "converge.csv"), _csv_text(CONVERGE_HEADER, rows))
    return EXIT_OK


def cmd_flow(cfg, args):
    flow = dict(cfg.get("flow") or {})
    body = build_body(cfg["body"], cfg["seed"])
    if body.dim != 2:
        raise ConfigError("the flow command needs a planar body")
    n = int(np.atleast_1d(flow.get("resolution", 256))[0])
    if args.resolution is not None:
        n = parse_resolution(args.resolution, 2)[0]
    grid = build_grid(2, n)
    bound = stable_dt(grid, body.support(grid.nodes))
    dt = float(flow.get("dt", bound))
    steps = int(flow.get("steps", 100))
    try:
        trace = integrate_flow(body, grid, dt, steps)
    except FlowStabilityError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    write_atomic(os.path.join(args.out, "flow.csv"), _csv_text(["t", "vol"], trace.rows()))
    var = variation_check(body, grid, flow.get("tau"))
    tol1 = 1e-5 * var.omega_n
    tol2 = 1e-3 * max(var.omega_n, 1.0)
    summary = {
        "schema": SCHEMA, "seed": cfg["seed"], "resolution": [n], "dt": dt,
        "stability_bound": bound, "steps_completed": trace.steps, "truncated": trace.truncated,
        "diagnostic": trace.diagnostic, "body": body.descriptor(),
        "dV_measured": var.dV_measured, "dV_predicted": var.dV_predicted,
        "d2V_measured": var.d2V_measured, "d2V_predicted": var.d2V_predicted,
        "d2V_sign_corrected": var.d2V_sign_corrected, "tau": var.tau,
        "first_variation_tol": tol1, "second_variation_tol": tol2,
        "first_variation_pass": abs(var.dV_measured - var.dV_predicted) <= tol1,
        "second_variation_stated_pass": abs(var.d2V_measured - var.d2V_predicted) <= tol2,
        "second_variation_sign_corrected_pass": abs(var.d2V_measured - var.d2V_sign_corrected) <= tol2,
        "dt_halving_errors": list(var.dV_errors), "dt_halving_ratio": var.halving_ratio,
    }
    write_atomic(os.path.join(args.out, "flow_summary.json"), dumps(summary))
    if trace.truncated:
        return EXIT_NUMERIC
    ok = summary["first_variation_pass"] and summary["second_variation_sign_corrected_pass"]
    return EXIT_OK if ok else EXIT_FAIL


def cmd_falsify(cfg, args):
    fal = dict(cfg.get("falsify") or {})
    dim = int(fal.get("dim", 2))
    if dim not in (2, 3):
        raise ConfigError("falsify.dim must be 2 or 3")
    samples = int(fal.get("samples", 1000))
    amplitude = tuple(fal.get("amplitude", (0.02, 0.05)))
    coarse, fine = resolutions({**cfg, "body": {"dim": dim}}, args, dim)
    scfg = _suite_config(cfg, coarse, fine)
    rng = np.random.default_rng(cfg["seed"])
    bodies = [build_body(spec, cfg["seed"]) for spec in fal.get("include", [])]
    make = random_fourier_body if dim == 2 else random_sphharm_body
    bodies += [make(rng, amplitude=amplitude) for _ in range(samples)]
    lines, failed = [], False
    for index, body in enumerate(bodies):
        for r in run_suite(body, scfg):
            if not r.applicable:
                continue
            failed |= r.status == "fail"
            if r.check_id == "prop_two_p1":
                continue
            near = r.relative_slack < 10 * r.tol
            if r.equality_expected and near:
                kind = "equality_case"
            elif near or r.status == "fail":
                kind = "candidate"
            else:
                continue
            rec = {"sample": index, "kind": kind, "seed": cfg["seed"], **r.to_dict()}
            lines.append(dumps(rec, compact=True))
    text = "".join(lines)
    write_atomic(os.path.join(args.out, "candidates.ndjson"), text)
    return EXIT_FAIL if failed else EXIT_OK


COMMANDS = {"report": cmd_report, "suite": cmd_suite, "converge": cmd_converge,
            "flow": cmd_flow, "falsify": cmd_falsify}


def build_parser():
    parser = argparse.ArgumentParser(prog="centroaffine",
                                     description="Centro-affine invariants of smooth convex bodies.")
    parser.add_argument("command", choices=sorted(COMMANDS))
    parser.add_argument("--config", required=True, help="JSON configuration file")
    parser.add_argument("--seed", type=int, default=None, help="override the config seed")
    parser.add_argument("--out", default=".", help="output directory")
    parser.add_argument("--resolution", default=None, help="fine resolution N or Ntheta,Nphi")
    parser.add_argument("--pmax", type=int, default=None, help="largest sequence index")
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_USAGE if exc.code else EXIT_OK
    try:
        cfg = load_config(args.config, args)
        return COMMANDS[args.command](cfg, args)
    except ConfigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (BodyValidationError, PolarRefinementError, FloatingPointError) as exc:
        print(f"numerical validity failure: {exc}", file=sys.stderr)
        return EXIT_NUMERIC


if __name__ == "__main__":
    sys.exit(main())
