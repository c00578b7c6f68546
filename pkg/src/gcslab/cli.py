"""Command-line front end.

Usage::

    gcslab <mode> --config <path|-> [--block.key value ...]

Modes: eval, moments, regime, map, verify. Scalar config fields can be
overridden with dotted flags such as ``--field.E 1e5`` or ``--out.format json``.

Exit codes: 0 success, 2 configuration error, 3 verification failure,
4 numeric error.
"""

from __future__ import annotations

import argparse
import os
import sys
from concurrent.futures import ThreadPoolExecutor

import numpy as np

from .config import MODES, SUITES, apply_overrides, build_config, load_document
from .core import from_dimensionless
from .errors import ConfigError, DegenerateSeedError, DomainError, GcsError, HeisenbergViolationError, NoMotionError
from .output import to_csv, to_json, write_text
from .semiclassical import classify, physical_conditions_report, ratios
from .states import check_uncertainty, evaluate_gcs, moments
from .verify import run_suite

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_VERIFY = 3
EXIT_NUMERIC = 4


def _header(cfg):
    return f"gcslab {cfg.mode} units={cfg.units}"


def _emit(cfg, columns, rows, payload, stream):
    out = cfg.output
    if out.format == "json":
        text = to_json({"mode": cfg.mode, "units": cfg.units, **payload})
    else:
        text = to_csv(columns, rows, out.precision, comment=_header(cfg))
    write_text(text, out.path, stream)


def run_eval(cfg, stream=sys.stdout):
    state = cfg.gcs_state()
    qs = cfg.values("eval", "q", {"min": -5.0, "max": 5.0, "count": 101})
    taus = cfg.values("eval", "tau", [0.0])
    if any(t < 0 for t in taus):
        raise ConfigError("times must be non-negative", where="eval.tau")
    q = np.asarray(qs)
    columns = ["q", "tau", "re_phi", "im_phi", "density"]
    rows = []
    for tau in taus:
        phi = evaluate_gcs(state, q, tau)
        for qi, v in zip(qs, phi):
            rows.append([qi, tau, v.real, v.imag, abs(v) ** 2])
    _emit(cfg, columns, rows, {"columns": columns, "rows": rows}, stream)
    return EXIT_OK


def run_moments(cfg, stream=sys.stdout):
    state = cfg.gcs_state()
    taus = cfg.values("moments", "tau", [0.0])
    if any(t < 0 for t in taus):
        raise ConfigError("times must be non-negative", where="moments.tau")
    columns = [
        "tau", "t", "mean_q", "mean_p", "sigma_q", "sigma_p", "sigma_qp",
        "heisenberg_product", "rs_residual", "mean_z", "mean_pz",
    ]
    rows = []
    for tau in taus:
        m = moments(state, tau)
        u = check_uncertainty(state, tau)
        z, pz, t = from_dimensionless(cfg.setup, m.mean_q, m.mean_p, tau)
        rows.append([tau, t, m.mean_q, m.mean_p, m.sigma_q, m.sigma_p, m.sigma_qp,
                     u.heisenberg_product, u.rs_residual, z, pz])
    _emit(cfg, columns, rows, {"columns": columns, "rows": rows}, stream)
    return EXIT_OK


def regime_record(cfg):
    inp = cfg.semiclassical_input()
    kind = cfg.state_kind()
    verdict = classify(inp, kind)
    r = ratios(inp)
    record = {
        "kind": kind,
        "regime": verdict.regime.value,
        "condition_label": verdict.condition_label,
        "time_value_seconds": verdict.time_value,
        "X": r.X,
        "Y": r.Y,
        "X_sigma": r.X_sigma,
        "W": r.W,
        "W_sigma": r.W_sigma,
        "t_sigma": r.t_sigma,
    }
    record.update(physical_conditions_report(inp).flags())
    return record


def run_regime(cfg, stream=sys.stdout):
    record = regime_record(cfg)
    columns = list(record)
    row = ["" if v is None else v for v in record.values()]
    _emit(cfg, columns, [row], {"record": record}, stream)
    return EXIT_OK


def _threads():
    raw = os.environ.get("GCSLAB_THREADS")
    if raw is None:
        return os.cpu_count() or 1
    try:
        value = int(raw)
    except ValueError:
        raise ConfigError(f"expected an integer, got {raw!r}", where="GCSLAB_THREADS") from None
    if value < 1:
        raise ConfigError("must be at least 1", where="GCSLAB_THREADS")
    return value


def _cell(cfg, assignment):
    try:
        verdict = classify(cfg.with_values(assignment).semiclassical_input(), cfg.state_kind())
    except (NoMotionError, HeisenbergViolationError, DomainError) as exc:
        # keep the map rectangular; the reason goes into the sidecar
        return "undefined", type(exc).__name__
    return verdict.condition_label, verdict.regime.value


def run_map(cfg, stream=sys.stdout):
    (name0, values0), (name1, values1) = cfg.sweep_axes()
    cells = [{name0: a, name1: b} for a in values0 for b in values1]
    with ThreadPoolExecutor(max_workers=min(_threads(), len(cells))) as pool:
        results = list(pool.map(lambda c: _cell(cfg, c), cells))
    n1 = len(values1)
    labels = [[results[i * n1 + j][0] for j in range(n1)] for i in range(len(values0))]
    regimes = [[results[i * n1 + j][1] for j in range(n1)] for i in range(len(values0))]
    axes = {
        "units": cfg.units,
        "kind": cfg.state_kind(),
        "rows": {"name": name0, "values": values0},
        "columns": {"name": name1, "values": values1},
    }
    out = cfg.output
    if out.format == "json" or out.path is None:
        text = to_json({"mode": "map", **axes, "labels": labels, "regimes": regimes})
        write_text(text, out.path, stream)
        return EXIT_OK
    write_text(to_csv(None, labels, out.precision, comment=_header(cfg)), out.path, stream)
    write_text(to_json({**axes, "regimes": regimes}), out.path + ".axes.json", stream)
    return EXIT_OK


def run_verify(cfg, stream=sys.stdout):
    block = cfg.section("verify")
    suites = block.get("suites", list(SUITES))
    if isinstance(suites, str):
        suites = [suites]
    unknown = [s for s in suites if s not in SUITES]
    if unknown or not suites:
        raise ConfigError(f"unknown suite(s) {unknown}; choose from {', '.join(SUITES)}", where="verify.suites")
    options = block.get("options", {})
    results = [run_suite(name, options.get(name, {})) for name in suites]
    passed = all(r.passed for r in results)
    columns = ["name", "passed", "measured", "tolerance"]
    rows = [[r.name, "true" if r.passed else "false", r.measured, r.tolerance] for r in results]
    _emit(cfg, columns, rows, {"passed": passed, "suites": [r.as_dict() for r in results]}, stream)
    return EXIT_OK if passed else EXIT_VERIFY


RUNNERS = {"eval": run_eval, "moments": run_moments, "regime": run_regime, "map": run_map, "verify": run_verify}


def _split_overrides(extra):
    overrides = []
    i = 0
    while i < len(extra):
        token = extra[i]
        if not token.startswith("--") or len(token) <= 2:
            raise ConfigError(f"unexpected argument {token!r}", where="argv")
        key = token[2:]
        if "=" in key:
            key, value = key.split("=", 1)
        else:
            if i + 1 >= len(extra):
                raise ConfigError("override needs a value", where=token)
            i += 1
            value = extra[i]
        overrides.append((key, value))
        i += 1
    return overrides


def _error(stream, exc, extra=None):
    body = {"error": type(exc).__name__, "message": str(exc)}
    if extra:
        body.update(extra)
    stream.write(to_json(body))


def main(argv=None, stdout=None, stderr=None, stdin=None):
    stdout = stdout or sys.stdout
    stderr = stderr or sys.stderr
    stdin = stdin or sys.stdin
    parser = argparse.ArgumentParser(prog="gcslab", description=__doc__.split("\n\n")[0])
    parser.add_argument("mode", choices=MODES)
    parser.add_argument("--config", required=True, help="JSON config file, or - for standard input")
    args, extra = parser.parse_known_args(argv)
    try:
        if args.config == "-":
            text, source = stdin.read(), "<stdin>"
        else:
            try:
                with open(args.config, encoding="utf-8") as fh:
                    text = fh.read()
            except OSError as exc:
                raise ConfigError(exc.strerror or str(exc), where=args.config) from None
            source = args.config
        doc = apply_overrides(load_document(text, source), _split_overrides(extra))
        cfg = build_config(doc, args.mode)
        return RUNNERS[args.mode](cfg, stdout)
    except HeisenbergViolationError as exc:
        _error(stderr, exc, {"product": exc.product})
        return EXIT_CONFIG
    except (ConfigError, DomainError, NoMotionError, DegenerateSeedError) as exc:
        _error(stderr, exc, {"where": getattr(exc, "where", None)})
        return EXIT_CONFIG
    except OSError as exc:
        _error(stderr, exc)
        return EXIT_CONFIG
    except (GcsError, FloatingPointError, ArithmeticError) as exc:
        _error(stderr, exc)
        return EXIT_NUMERIC


if __name__ == "__main__":
    sys.exit(main())
