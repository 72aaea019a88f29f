"""Command-line front end.

Every run is described by an experiment configuration: a JSON file given
with ``--config`` whose keys may be overridden by flags.  Each command
writes one CSV report (``bs-sweep`` adds a summary file next to it).

Exit status is 0 on success, 2 for a bad configuration and 3 when a
numerical guard rejects the run.  Failures print a single JSON line to
stderr with the keys ``error``, ``guard``, ``message`` and ``exit``.
"""
from __future__ import annotations

import argparse
import json
import math
import sys
import warnings
from pathlib import Path

import numpy as np

from . import __version__
from .errors import GuardViolation, SpectralError, UnsupportedOrderError
from .matops import HermitianOperator, hermitian_eig, load_matrix_json, singular_values
from .models import (DiagonalModel, TorusSymbolModel, diagonal_sequence, free_torus_sequence,
                     load_model_json, model_from_dict, nc_residue_quadrature,
                     predicted_connes_integral, symbol_weyl_rhs, torus_matrix)
from .properties import run_property_suite
from .reports import emit_report
from .semiclassical import circle_pair, semiclassical_sweep
from .spectra import (Kind, SpectralSequence, dixmier_macaev_norm, read_spectrum_csv,
                      split_signed, tauberian_limit, weak_quasi_norm)
from .weyl import counting_limit, weyl_coefficient, weyl_pm, weyl_to_integral

COMMANDS = ("tauberian", "connes-check", "weyl", "residue", "bs-sweep", "norms", "props")
SOURCE_KEYS = ("spectrum", "matrix", "model", "diagonal", "fhat")
CONFIG_KEYS = frozenset({
    "command", "out", "cutoff", "p", "tol", "rel_tol", "window", "seed", "n", "m",
    "symmetrized", "closed_form", "h_list", "pairs", "max_dim", "reference", "method",
    *SOURCE_KEYS,
})
MAX_CUTOFF = {1: 4096, 2: 45}
MAX_CLOSED_FORM_CUTOFF = {1: 10 ** 7, 2: 2000}
DEFAULTS = {"tol": 1e-2, "rel_tol": 0.05, "window": 0.5, "seed": 0, "pairs": 200,
            "max_dim": 64, "method": "auto"}


class UsageError(Exception):
    pass


# ------------------------------------------------------------ configuration

def _load_config(path):
    try:
        doc = json.loads(Path(path).read_text(encoding="utf-8"))
    except (OSError, json.JSONDecodeError) as exc:
        raise UsageError(f"cannot read config {path}: {exc}") from None
    if not isinstance(doc, dict):
        raise UsageError("config must be a JSON object")
    return doc


def _validate(cfg):
    unknown = set(cfg) - CONFIG_KEYS
    if unknown:
        raise UsageError(f"unknown config keys: {sorted(unknown)}")
    if cfg.get("command") not in COMMANDS:
        raise UsageError(f"command must be one of {list(COMMANDS)}")

    def number(key, lo=None, hi=None, integer=False, strict_lo=False):
        if key not in cfg or cfg[key] is None:
            return
        x = cfg[key]
        if isinstance(x, bool) or not isinstance(x, (int, float)):
            raise UsageError(f"{key} must be a number")
        if integer and int(x) != x:
            raise UsageError(f"{key} must be an integer")
        if not math.isfinite(x) or (lo is not None and (x <= lo if strict_lo else x < lo)) \
                or (hi is not None and x > hi):
            raise UsageError(f"{key}={x} out of range")

    number("cutoff", 1, MAX_CLOSED_FORM_CUTOFF[1], integer=True)
    number("p", 0, strict_lo=True)
    number("tol", 0, strict_lo=True)
    number("rel_tol", 0, strict_lo=True)
    number("window", 0, 1, strict_lo=True)
    number("seed", 0, 2 ** 32 - 1, integer=True)
    number("n", 1, 2, integer=True)
    number("m", 0, strict_lo=True)
    number("pairs", 1, 100000, integer=True)
    number("max_dim", 2, 512, integer=True)
    number("reference")
    if cfg.get("method", "auto") not in ("auto", "lapack", "jacobi"):
        raise UsageError("method must be auto, lapack or jacobi")
    if "h_list" in cfg and cfg["h_list"] is not None:
        h = cfg["h_list"]
        if not isinstance(h, list) or not h or not all(
                isinstance(x, (int, float)) and not isinstance(x, bool) and x > 0 for x in h):
            raise UsageError("h_list must be a nonempty list of positive numbers")
        if any(b >= a for a, b in zip(h, h[1:])):
            raise UsageError("h_list must be strictly decreasing")
    sources = [k for k in SOURCE_KEYS if cfg.get(k) is not None]
    if len(sources) > 1:
        raise UsageError(f"give exactly one model source, got {sources}")
    return cfg


def _get(cfg, key):
    value = cfg.get(key)
    return DEFAULTS.get(key) if value is None else value


# ----------------------------------------------------------------- sources

def _parse_fhat(doc, n):
    if isinstance(doc, str):
        try:
            doc = json.loads(doc)
        except json.JSONDecodeError as exc:
            raise UsageError(f"fhat is not valid JSON: {exc}") from None
    if isinstance(doc, dict):
        out = {}
        for key, value in doc.items():
            try:
                k = tuple(int(x) for x in str(key).split(","))
            except ValueError:
                raise UsageError(f"bad frequency {key!r}") from None
            if isinstance(value, (list, tuple)):
                value = complex(*value)
            out[k] = value
        return out
    raise UsageError("fhat must map frequencies like \"1\" or \"1,0\" to coefficients")


def _torus_model(cfg):
    if cfg.get("model") is not None:
        doc = cfg["model"]
        model = load_model_json(doc) if isinstance(doc, str) else model_from_dict(doc)
        if cfg.get("cutoff") is not None:
            model = model.with_cutoff(int(cfg["cutoff"]))
        if cfg.get("symmetrized") is not None:
            model = TorusSymbolModel(model.n, model.m, dict(model.fhat), model.cutoff,
                                     bool(cfg["symmetrized"]))
    elif cfg.get("fhat") is not None:
        n = int(cfg.get("n") or 1)
        m = float(cfg.get("m") or n)
        model = TorusSymbolModel(n=n, m=m, fhat=_parse_fhat(cfg["fhat"], n),
                                 cutoff=int(cfg.get("cutoff") or 64),
                                 symmetrized=cfg.get("symmetrized") is not False)
    else:
        return None
    limit = (MAX_CLOSED_FORM_CUTOFF if cfg.get("closed_form") else MAX_CUTOFF)[model.n]
    if model.cutoff > limit:
        raise UsageError(f"cutoff {model.cutoff} exceeds the limit {limit} for n={model.n}")
    return model


def _model_id(cfg, model=None):
    if model is not None:
        return f"torus{model.n}d-m{model.m:g}-K{model.cutoff}"
    if cfg.get("spectrum") is not None:
        return Path(cfg["spectrum"]).stem
    if cfg.get("matrix") is not None:
        return Path(cfg["matrix"]).stem
    d = cfg["diagonal"]
    return f"diagonal-{d.get('rule')}-{d.get('length', len(d.get('values', ())))}"


def _diagonal(cfg):
    doc = cfg["diagonal"]
    if not isinstance(doc, dict):
        raise UsageError("diagonal must be an object like {\"rule\": \"harmonic\", \"length\": 1000}")
    extra = set(doc) - {"rule", "length", "alpha", "values"}
    if extra:
        raise UsageError(f"unknown diagonal keys: {sorted(extra)}")
    return DiagonalModel(rule=doc.get("rule", ""), length=int(doc.get("length", 0)),
                         alpha=float(doc.get("alpha", 1.0)), values=tuple(doc.get("values", ())))


def _closed_form(model):
    const = set(model.fhat) <= {(0,) * model.n}
    if not const:
        raise UsageError("closed_form needs a constant f")
    c = model.mean_value()
    if np.imag(c):
        raise UsageError("closed_form needs a real constant")
    return free_torus_sequence(model.n, model.m, model.cutoff).scaled(float(np.real(c)))


def _source(cfg):
    """Return ``(model_id, sequence or None, operator or None, torus model or None)``."""
    method = _get(cfg, "method")
    model = _torus_model(cfg)
    if model is not None:
        mid = _model_id(cfg, model)
        if cfg.get("closed_form"):
            return mid, _closed_form(model), None, model
        op = torus_matrix(model)
        seq = hermitian_eig(op, method=method) if isinstance(op, HermitianOperator) else None
        return mid, seq, op, model
    if cfg.get("spectrum") is not None:
        return _model_id(cfg), read_spectrum_csv(cfg["spectrum"]), None, None
    if cfg.get("matrix") is not None:
        op = load_matrix_json(cfg["matrix"])
        seq = hermitian_eig(op, method=method) if isinstance(op, HermitianOperator) else None
        return _model_id(cfg), seq, op, None
    if cfg.get("diagonal") is not None:
        return _model_id(cfg), diagonal_sequence(_diagonal(cfg)), None, None
    raise UsageError(f"command {cfg['command']} needs a model source ({', '.join(SOURCE_KEYS)})")


def _real_sequence(cfg):
    mid, seq, op, model = _source(cfg)
    if seq is None:
        raise UsageError("this command needs a self-adjoint operator or a spectrum")
    return mid, seq, model


# ---------------------------------------------------------------- commands

def _window_str(window):
    return f"{window[0]}-{window[1]}"


def cmd_tauberian(cfg):
    mid, seq, _ = _real_sequence(cfg)
    rep = tauberian_limit(seq, _get(cfg, "window"), _get(cfg, "tol"), reference=cfg.get("reference"))
    est = complex(rep.limit_estimate)
    header = ["model_id", "length", "estimate", "estimate_im", "converged", "dispersion",
              "window_first", "window_last", "surrogate_spread", "tol", "remainder"]
    return header, [[mid, rep.length, est.real, est.imag, rep.converged, rep.dispersion,
                     rep.window[0], rep.window[1], rep.surrogate_spread, rep.tol,
                     rep.remainder_bound]]


def cmd_connes_check(cfg):
    mid, seq, op, model = _source(cfg)
    if model is None:
        raise UsageError("connes-check needs a torus model (model or fhat)")
    if seq is None:
        raise UsageError("connes-check needs the symmetrized form of a real f")
    predicted = predicted_connes_integral(model)
    residue = nc_residue_quadrature(model)
    rep = tauberian_limit(seq, _get(cfg, "window"), _get(cfg, "tol"))
    wrep = weyl_to_integral(seq, floor=model.resolution_floor(), window_fraction=_get(cfg, "window"),
                            tol=_get(cfg, "tol"))
    scale = abs(predicted) if predicted else 1.0
    rel_error = abs(rep.limit_estimate - predicted) / scale
    weyl_error = abs(wrep.integral - predicted) / scale
    rel_tol = _get(cfg, "rel_tol")
    header = ["model_id", "n", "cutoff", "length", "predicted", "residue", "logmean",
              "dispersion", "converged", "surrogate_spread", "weyl_integral", "weyl_ok",
              "logmean_rel_error", "weyl_rel_error", "agree"]
    return header, [[mid, model.n, model.cutoff, len(seq), predicted, residue, rep.limit_estimate,
                     rep.dispersion, rep.converged, rep.surrogate_spread, wrep.integral,
                     wrep.weyl_ok, rel_error, weyl_error,
                     rel_error <= rel_tol and weyl_error <= rel_tol]]


def cmd_weyl(cfg):
    mid, seq, op, model = _source(cfg)
    p = cfg.get("p") or (model.n / model.m if model is not None else 1.0)
    floor = model.resolution_floor() if model is not None else 0.0
    rows = []

    def emit(label, part):
        est = weyl_coefficient(part, p, floor=floor)
        rows.append([f"{mid}:{label}", p, est.method, est.value, est.dispersion, _window_str(est.window)])
        cnt = counting_limit(part, p, floor=floor)
        rows.append([f"{mid}:{label}", p, cnt.method, cnt.value, cnt.dispersion, _window_str(cnt.window)])

    if seq is not None:
        for label, est, part in zip(("plus", "minus"), weyl_pm(seq, p, floor=floor), split_signed(seq)):
            if est.flag is None:
                emit(label, part)
            else:
                rows.append([f"{mid}:{label}", p, f"{est.method}:{est.flag}", 0.0, 0.0, _window_str(est.window)])
        mu = SpectralSequence(np.sort(np.abs(seq.values))[::-1], Kind.SINGULAR_VALUES)
    else:
        mu = singular_values(op)
    emit("abs", mu)
    return ["model_id", "p", "method", "value", "dispersion", "window"], rows


def cmd_residue(cfg):
    model = _torus_model(cfg)
    if model is None:
        raise UsageError("residue needs a torus model (model or fhat)")
    p = model.n / model.m
    residue = nc_residue_quadrature(model)
    predicted = predicted_connes_integral(model) if model.is_real else None
    signed = [symbol_weyl_rhs(model, p, mode) for mode in ("plus", "minus")] if model.is_real else [None, None]
    header = ["model_id", "n", "m", "residue", "predicted_integral", "weyl_rhs_abs",
              "weyl_rhs_plus", "weyl_rhs_minus"]
    res = residue if isinstance(residue, float) else complex(residue)
    return header, [[_model_id(cfg, model), model.n, model.m, res, predicted,
                     symbol_weyl_rhs(model, p, "abs"), *signed]]


def _default_h_list(pair, vmax):
    # N^- is about 2 sup(V) / h^2; keep it below dim / 8
    vmax = vmax or 1.0
    h_min = math.sqrt(16.0 * vmax / pair.dim)
    return list(np.geomspace(0.5, max(h_min, 1e-3), 12))


def cmd_bs_sweep(cfg):
    model = _torus_model(cfg)
    if model is None or model.n != 1:
        raise UsageError("bs-sweep needs a circle potential V (n = 1, via fhat or model)")
    pair = circle_pair(model.fhat, model.cutoff)
    h_list = cfg.get("h_list") or _default_h_list(pair, model.sup_norm())
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", RuntimeWarning)
        rep = semiclassical_sweep(pair, h_list, floor=model.resolution_floor())
    if not any(r.guard_ok for r in rep.rows):
        raise GuardViolation("resolution", "every h violates N^- <= dim/4")
    rows = [[r.h, r.count, r.h2count, r.guard_ok] for r in rep.rows]
    integral = rep.integral.integral if rep.integral is not None else 0.0
    summary = [["limit", rep.limit], ["integral_weyl", integral],
               ["integral_tauberian", rep.tauberian.limit_estimate],
               ["discrepancy", rep.discrepancy], ["excluded", len(rep.excluded)]]
    extra = {"_summary": (["quantity", "value"], summary)}
    return ["h", "count", "h2count", "guard_ok"], rows, extra


def cmd_norms(cfg):
    mid, seq, op, model = _source(cfg)
    if op is not None:
        mu = singular_values(op)
    else:
        mu = SpectralSequence(np.sort(np.abs(seq.values))[::-1], Kind.SINGULAR_VALUES)
    p = cfg.get("p") or 1.0
    header = ["model_id", "p", "weak_quasi_norm", "dixmier_macaev_norm", "operator_norm"]
    top = float(mu.values[0]) if len(mu) else 0.0
    return header, [[mid, p, weak_quasi_norm(mu, p), dixmier_macaev_norm(mu), top]]


def cmd_props(cfg):
    seed, pairs, max_dim = int(_get(cfg, "seed")), int(_get(cfg, "pairs")), int(_get(cfg, "max_dim"))
    results = run_property_suite(pairs, max_dim, seed)
    rows = [[r.name, r.checks, r.violations, r.max_excess] for r in results]
    comments = [f"seed={seed}", f"pairs={pairs}", f"max_dim={max_dim}"]
    return ["property", "checks", "violations", "max_excess"], rows, {}, comments


HANDLERS = {
    "tauberian": cmd_tauberian,
    "connes-check": cmd_connes_check,
    "weyl": cmd_weyl,
    "residue": cmd_residue,
    "bs-sweep": cmd_bs_sweep,
    "norms": cmd_norms,
    "props": cmd_props,
}


# ------------------------------------------------------------------- driver

def build_parser():
    ap = argparse.ArgumentParser(prog="ncspec", description="Spectral NC-integral experiments.")
    ap.add_argument("command", nargs="?", choices=COMMANDS)
    ap.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    ap.add_argument("--config", help="JSON experiment configuration")
    ap.add_argument("--out", help="report path (default <command>.csv)")
    ap.add_argument("--cutoff", type=int, help="Fourier cutoff K")
    ap.add_argument("--p", type=float, help="Schatten exponent p")
    ap.add_argument("--tol", type=float, help="log-mean dispersion tolerance")
    ap.add_argument("--rel-tol", dest="rel_tol", type=float, help="agreement tolerance for connes-check")
    ap.add_argument("--window", type=float, help="trailing log-mean window fraction")
    ap.add_argument("--seed", type=int, help="seed for randomized suites")
    ap.add_argument("--spectrum", help="spectrum CSV (index,re,im)")
    ap.add_argument("--matrix", help="matrix JSON {dim, entries}")
    ap.add_argument("--model", help="torus model JSON file")
    ap.add_argument("--fhat", help='Fourier coefficients as JSON, e.g. \'{"0": 2, "1": 0.5, "-1": 0.5}\'')
    ap.add_argument("--n", type=int, help="torus dimension for --fhat")
    ap.add_argument("--diagonal", help="diagonal rule (harmonic, power, log_oscillating)")
    ap.add_argument("--length", type=int, help="length of the diagonal model")
    ap.add_argument("--alpha", type=float, help="exponent of the power rule")
    ap.add_argument("--closed-form", dest="closed_form", action="store_true", default=None,
                    help="use the closed-form spectrum of a constant f")
    ap.add_argument("--h-list", dest="h_list", type=float, nargs="+", help="decreasing h values")
    ap.add_argument("--pairs", type=int, help="number of random pairs for props")
    ap.add_argument("--max-dim", dest="max_dim", type=int, help="largest random dimension for props")
    ap.add_argument("--method", help="eigensolver: auto, lapack or jacobi")
    return ap


def _merge(args):
    cfg = _load_config(args.config) if args.config else {}
    for key in ("command", "out", "cutoff", "p", "tol", "rel_tol", "window", "seed", "spectrum",
                "matrix", "model", "fhat", "n", "closed_form", "h_list", "pairs", "max_dim", "method"):
        value = getattr(args, key)
        if value is not None:
            cfg[key] = value
    if args.diagonal is not None:
        cfg["diagonal"] = {"rule": args.diagonal, "length": args.length or 0}
        if args.alpha is not None:
            cfg["diagonal"]["alpha"] = args.alpha
    elif args.length is not None or args.alpha is not None:
        diag = cfg.get("diagonal")
        if not isinstance(diag, dict):
            raise UsageError("--length/--alpha need a diagonal model")
        diag = dict(diag)
        if args.length is not None:
            diag["length"] = args.length
        if args.alpha is not None:
            diag["alpha"] = args.alpha
        cfg["diagonal"] = diag
    return _validate(cfg)


def run(cfg):
    """Execute a validated configuration and write its report(s); returns the paths."""
    command = cfg["command"]
    result = HANDLERS[command](cfg)
    header, rows = result[0], result[1]
    extra = result[2] if len(result) > 2 else {}
    comments = result[3] if len(result) > 3 else ()
    out = Path(cfg.get("out") or f"{command}.csv")
    paths = [emit_report(rows, out, header, comments)]
    for suffix, (h, r) in extra.items():
        paths.append(emit_report(r, out.with_name(out.stem + suffix + out.suffix), h))
    return paths


def _fail(code, kind, message, guard=None):
    line = {"error": kind, "guard": guard, "message": message, "exit": code}
    print(json.dumps(line, sort_keys=True), file=sys.stderr)
    return code


def main(argv=None):
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        cfg = _merge(args)
        paths = run(cfg)
    except UsageError as exc:
        return _fail(2, "usage", str(exc))
    except GuardViolation as exc:
        return _fail(3, "guard", str(exc), exc.guard)
    except UnsupportedOrderError as exc:
        return _fail(2, "unsupported-order", str(exc))
    except SpectralError as exc:
        if exc.guard is not None:
            return _fail(3, "guard", str(exc), exc.guard)
        return _fail(2, "invalid-input", str(exc))
    except OSError as exc:
        return _fail(2, "io", str(exc))
    for path in paths:
        print(path)
    return 0


if __name__ == "__main__":
    sys.exit(main())
