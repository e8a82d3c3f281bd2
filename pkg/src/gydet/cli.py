"""Command-line interface: ``gydet compute|instanton|sweep|green|oracle``.

Results go to stdout as JSON (fixed field order, floats with 17
significant digits) or CSV; errors go to stderr with exit status

* 2 for configuration errors,
* 3 for numerical failures,
* 4 when a zero mode makes the requested quantity undefined.
"""

import argparse
from concurrent.futures import ProcessPoolExecutor
import csv
from dataclasses import dataclass
import io
import json
import math
import os
import sys
import warnings

import numpy as np

from . import gelfand, models, oracle, zeromode
from .errors import (
    DegenerateReferenceError,
    GydetError,
    IntegrationError,
    ZeroModeError,
)
from .ode import DEFAULT_TOL, TimeWindow, gy_basis
from .profiles import Constant, Instanton, parse_profile
from .wronski import ZERO_MODE_THRESHOLD, BoundaryCondition, green, green_dt, proximity

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_NUMERICAL = 3
EXIT_ZERO_MODE = 4

DEFAULT_N = 2000


class ConfigError(Exception):
    """Invalid command-line configuration."""


# -- serialisation --------------------------------------------------------------


def format_float(x):
    """17 significant digits; ``None`` for non-finite values."""
    x = float(x)
    if not math.isfinite(x):
        return None
    return "%.17g" % x


def _encode(obj, indent, level):
    pad = " " * (indent * (level + 1))
    end = " " * (indent * level)
    if obj is None or isinstance(obj, bool):
        return json.dumps(obj)
    if isinstance(obj, (int, np.integer)):
        return str(int(obj))
    if isinstance(obj, (float, np.floating)):
        text = format_float(obj)
        return "null" if text is None else text
    if isinstance(obj, str):
        return json.dumps(obj)
    if isinstance(obj, dict):
        if not obj:
            return "{}"
        items = [f"{pad}{json.dumps(str(k))}: {_encode(v, indent, level + 1)}" for k, v in obj.items()]
        return "{\n" + ",\n".join(items) + "\n" + end + "}"
    if isinstance(obj, (list, tuple)):
        if not obj:
            return "[]"
        items = [pad + _encode(v, indent, level + 1) for v in obj]
        return "[\n" + ",\n".join(items) + "\n" + end + "]"
    raise TypeError(f"cannot serialise {type(obj).__name__}")


def dumps(obj, indent=2):
    """Deterministic JSON text; dict insertion order is preserved."""
    return _encode(obj, indent, 0) + "\n"


def to_csv(header, rows):
    """RFC-4180 CSV (CRLF line ends, minimal quoting); floats as in :func:`format_float`."""
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\r\n")
    writer.writerow(header)
    for row in rows:
        writer.writerow(
            [
                (format_float(v) or "") if isinstance(v, (float, np.floating)) else ("" if v is None else v)
                for v in row
            ]
        )
    return buf.getvalue()


def result_document(res):
    """Schema of a single determinant-ratio result."""
    d = res.diagnostics
    return {
        "value": res.value,
        "method": res.method.value,
        "bc": res.bc.value,
        "omega_ref": res.omega_ref,
        "diagnostics": {
            "wronskian_drift": d.wronskian_drift,
            "zero_mode_residual": d.zero_mode_residual,
            "steps": int(d.steps),
        },
        "paper_anchor": res.formula,
    }


RESULT_HEADER = [
    "value",
    "method",
    "bc",
    "omega_ref",
    "wronskian_drift",
    "zero_mode_residual",
    "steps",
    "paper_anchor",
]


def _result_row(res):
    d = res.diagnostics
    return [
        float(res.value),
        res.method.value,
        res.bc.value,
        None if res.omega_ref is None else float(res.omega_ref),
        float(d.wronskian_drift),
        float(d.zero_mode_residual),
        int(d.steps),
        res.formula,
    ]


# -- configuration ------------------------------------------------------------------


@dataclass(frozen=True)
class RunConfig:
    """Everything a single determinant computation needs."""

    profile: object
    window: TimeWindow
    bc: BoundaryCondition
    method: str = "gy"
    omega_ref: float = None
    tol: float = DEFAULT_TOL
    N: int = None
    output: str = "json"
    n_g: int = 32

    def __post_init__(self):
        if self.method not in ("gy", "homotopy", "fd", "all"):
            raise ConfigError(f"unknown method {self.method!r}")
        if self.method == "fd" and self.N is None:
            raise ConfigError("--method fd requires --N")
        if self.N is not None and self.N < 4:
            raise ConfigError("--N must be at least 4")
        if self.output not in ("json", "csv"):
            raise ConfigError(f"unknown output format {self.output!r}")
        if not self.tol > 0:
            raise ConfigError("tolerance must be positive")


def default_tolerance():
    """``GYDET_TOL`` from the environment, else the package default."""
    raw = os.environ.get("GYDET_TOL")
    if raw is None or raw.strip() == "":
        return DEFAULT_TOL
    try:
        tol = float(raw)
    except ValueError:
        raise ConfigError(f"GYDET_TOL={raw!r} is not a number") from None
    if not tol > 0:
        raise ConfigError("GYDET_TOL must be positive")
    return tol


def _read_profile_arg(text):
    if text.startswith("@"):
        try:
            with open(text[1:], encoding="utf-8") as fh:
                text = fh.read()
        except OSError as exc:
            raise ConfigError(f"cannot read profile file: {exc}") from None
    return parse_profile(text)


def load_profile(args, required=True):
    if args.profile is not None and args.expr is not None:
        raise ConfigError("give either --profile or --expr, not both")
    if args.profile is not None:
        return _read_profile_arg(args.profile)
    if args.expr is not None:
        return parse_profile(args.expr, format="expression")
    if required:
        raise ConfigError("a profile is required (--profile or --expr)")
    return None


def load_window(args, profile=None):
    if args.ta is None or args.tb is None:
        if isinstance(profile, Instanton) and args.ta is None and args.tb is None:
            return TimeWindow(*profile.window())
        raise ConfigError("--ta and --tb are required")
    return TimeWindow(args.ta, args.tb)


def _tolerance(args):
    return default_tolerance() if args.tol is None else args.tol


def build_config(args):
    profile = load_profile(args)
    return RunConfig(
        profile=profile,
        window=load_window(args, profile),
        bc=BoundaryCondition.parse(args.bc),
        method=args.method,
        omega_ref=args.omega_ref,
        tol=_tolerance(args),
        N=args.N if args.N is not None else (DEFAULT_N if args.method == "all" else None),
        output=args.out,
        n_g=args.n_g,
    )


# -- computations ---------------------------------------------------------------------


def _fd_result(profile, window, bc, omega_ref, N):
    if bc is not BoundaryCondition.DIRICHLET and omega_ref is None:
        omega_ref = gelfand.default_omega_ref(profile, window)
    value = oracle.det_ratio_fd(profile, window, bc, omega_ref, N)
    return gelfand.DetRatioResult(
        value,
        bc,
        gelfand.Method.FD_ORACLE,
        omega_ref if bc is not BoundaryCondition.DIRICHLET else None,
        gelfand.Diagnostics(0.0, math.nan, N),
        "det(A_1)/det(A_ref), three-point grid",
    )


def run_method(cfg, method):
    if method == "gy":
        return gelfand.det_ratio(cfg.profile, cfg.window, cfg.bc, cfg.omega_ref, cfg.tol)
    if method == "homotopy":
        return gelfand.det_ratio_homotopy(
            cfg.profile, cfg.window, cfg.bc, cfg.omega_ref, n_g=cfg.n_g, tol=cfg.tol
        )
    return _fd_result(cfg.profile, cfg.window, cfg.bc, cfg.omega_ref, cfg.N)


def _reject_zero_mode(res):
    r = res.diagnostics.zero_mode_residual
    if res.method is gelfand.Method.GY and r < ZERO_MODE_THRESHOLD:
        raise ZeroModeError(
            f"the operator has a {res.bc.value} zero mode (residual {r:.3e}); the ratio "
            "vanishes. Use `gydet instanton` or `gydet oracle --primed` for the primed "
            "determinant"
        )


def relative_deviation(a, b):
    scale = max(abs(a), abs(b))
    return 0.0 if scale == 0.0 else abs(a - b) / scale


def cmd_compute(cfg):
    """Evaluate the requested route(s); returns (document, csv text)."""
    methods = ["gy", "homotopy", "fd"] if cfg.method == "all" else [cfg.method]
    results = []
    for method in methods:
        res = run_method(cfg, method)
        _reject_zero_mode(res)
        results.append(res)
    if cfg.output == "csv":
        return None, to_csv(RESULT_HEADER, [_result_row(r) for r in results])
    if len(results) == 1:
        return result_document(results[0]), None
    deviations = {}
    for i in range(len(results)):
        for j in range(i + 1, len(results)):
            key = f"{results[i].method.value}-{results[j].method.value}"
            deviations[key] = relative_deviation(results[i].value, results[j].value)
    doc = {
        "results": [result_document(r) for r in results],
        "deviations": deviations,
        "max_deviation": max(deviations.values()),
    }
    return doc, None


def _instanton_geometry(omega, a, m, period):
    if (m is None) == (period is None):
        raise ConfigError("give exactly one of --m and --period")
    if m is not None:
        if not 0.0 < m < 1.0:
            raise ConfigError(f"m={m!r} must lie in (0, 1); m=0 has no barrier crossing")
        return models.instanton_geometry(omega, a, m)
    try:
        m = models.m_for_period(omega, a, period)
    except ValueError as exc:
        raise ConfigError(str(exc)) from None
    return models.instanton_geometry(omega, a, m)


def instanton_report(omega, a, m=None, period=None, check_N=None, tol=DEFAULT_TOL):
    """Geometry, closed-form primed determinant and its cross-checks."""
    if not (omega > 0 and a > 0):
        raise ConfigError("--omega and --a must be positive")
    geo = _instanton_geometry(omega, a, m, period)
    closed = models.instanton_primed_det(geo)
    ref = models.instanton_reference_det(geo.omega, geo.T)
    doc = {
        "geometry": {
            "omega": geo.omega,
            "a": geo.a,
            "m": geo.m,
            "x_b": geo.x_b,
            "b": geo.b,
            "kappa": geo.kappa,
            "eps": geo.eps,
            "T": geo.T,
            "energy": geo.energy,
        },
        "primed_det": closed,
        "large_t_asymptote": models.instanton_large_t(geo.omega, geo.T),
        "reference_det": ref,
        "ratio": closed / ref,
        "ratio_limit": 1.0 / (12.0 * geo.omega**2),
        "paper_anchor": "Det' = -1/(eta'_b eta'_a), elliptic closed form",
    }
    profile = Instanton(omega, a, geo.m)
    window = geo.window()
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        numeric = zeromode.primed_det(profile, window, "dirichlet", tol)
    doc["numerical"] = {
        "primed_det": numeric.value,
        "status": numeric.status,
        "zero_mode_residual": numeric.residual,
        "relative_deviation": relative_deviation(numeric.value, closed),
    }
    if check_N is not None:
        if check_N < 4:
            raise ConfigError("--check-N must be at least 4")
        fd_ratio = oracle.primed_det_fd(
            profile, window, "dirichlet", N=check_N, reference=Constant(-(omega**2))
        )
        doc["fd_oracle"] = {
            "N": int(check_N),
            "ratio": fd_ratio,
            "relative_deviation": relative_deviation(fd_ratio, closed / ref),
        }
    return doc


def cmd_instanton(args):
    return instanton_report(
        args.omega, args.a, args.m, args.period, args.check_N, _tolerance(args)
    )


def green_report(profile, window, bc, t, tp, tol=DEFAULT_TOL):
    """``G(t, tp)`` with jump, symmetry and boundary diagnostics."""
    bc = BoundaryCondition.parse(bc)
    for name, x in (("t", t), ("tp", tp)):
        if not window.contains(x):
            raise ConfigError(f"{name}={x!r} outside window [{window.t_a}, {window.t_b}]")
    pair = gy_basis(profile, 1.0, window, tol)
    value = green(pair, bc, t, tp)
    jump = green_dt(pair, bc, tp, tp, +1) - green_dt(pair, bc, tp, tp, -1)
    symmetry = abs(value - green(pair, bc, tp, t))
    ga, gb = green(pair, bc, window.t_a, tp), green(pair, bc, window.t_b, tp)
    if bc is BoundaryCondition.DIRICHLET:
        boundary = max(abs(ga), abs(gb))
    else:
        s = bc.sign
        da = green_dt(pair, bc, window.t_a, tp, -1 if tp > window.t_a else +1)
        db = green_dt(pair, bc, window.t_b, tp, +1 if tp < window.t_b else -1)
        boundary = max(abs(gb - s * ga), abs(db - s * da))
    return {
        "value": value,
        "bc": bc.value,
        "t": float(t),
        "tp": float(tp),
        "diagnostics": {
            "jump": jump,
            "jump_residual": abs(jump + 1.0),
            "symmetry_residual": symmetry,
            "boundary_residual": boundary,
            "wronskian_drift": pair.drift,
            "zero_mode_residual": proximity(pair, bc),
            "steps": int(pair.steps),
        },
        "paper_anchor": "Wronski formula with commutators Delta(t, t')",
    }


def cmd_green(args):
    profile = load_profile(args)
    return green_report(profile, load_window(args, profile), args.bc, args.t, args.tp, _tolerance(args))


def oracle_report(
    profile, window, bc, N=DEFAULT_N, omega_ref=None, primed=False, eigenvalues=0, ref_omega2=None
):
    """Finite-difference ratio, optionally primed, against a constant reference.

    `ref_omega2` replaces the default reference (``0`` for Dirichlet,
    ``omega_ref^2`` otherwise) by ``-d^2/dt^2 - ref_omega2``.
    """
    bc = BoundaryCondition.parse(bc)
    if N < 4:
        raise ConfigError("--N must be at least 4")
    reference = None
    if ref_omega2 is not None:
        if omega_ref is not None:
            raise ConfigError("give either --omega-ref or --ref-omega2, not both")
        reference = Constant(ref_omega2)
    elif bc is not BoundaryCondition.DIRICHLET and omega_ref is None:
        omega_ref = gelfand.default_omega_ref(profile, window)
    ref = None if bc is BoundaryCondition.DIRICHLET else omega_ref
    if primed:
        value = oracle.primed_det_fd(profile, window, bc, ref, N, reference)
        formula = "det(A_1)/(lambda_1 det(A_ref))"
    else:
        value = oracle.det_ratio_fd(profile, window, bc, ref, N, reference)
        formula = "det(A_1)/det(A_ref), three-point grid"
    doc = {
        "value": value,
        "method": gelfand.Method.FD_ORACLE.value,
        "bc": bc.value,
        "omega_ref": ref,
        "reference_omega2": ref_omega2,
        "N": int(N),
        "primed": bool(primed),
        "paper_anchor": formula,
    }
    if eigenvalues:
        op = oracle.discretize(profile, window, bc, N)
        k = min(int(eigenvalues), 4, op.size)
        doc["lowest_eigenvalues"] = [float(x) for x in oracle.lowest_eigenvalues(op, k)]
    return doc


def cmd_oracle(args):
    profile = load_profile(args)
    return oracle_report(
        profile,
        load_window(args, profile),
        args.bc,
        DEFAULT_N if args.N is None else args.N,
        args.omega_ref,
        args.primed,
        args.eigenvalues,
        args.ref_omega2,
    )


# -- sweeps -------------------------------------------------------------------------------

SWEEP_PARAMETERS = ("omega2", "m", "T", "omega_ref")


@dataclass(frozen=True)
class SweepSpec:
    parameter: str
    start: float
    stop: float
    steps: int

    def __post_init__(self):
        if self.parameter not in SWEEP_PARAMETERS:
            raise ConfigError(f"sweep parameter must be one of {', '.join(SWEEP_PARAMETERS)}")
        if self.steps < 1:
            raise ConfigError("--steps must be at least 1")

    def values(self):
        if self.steps == 1:
            return [float(self.start)]
        return sorted(float(x) for x in np.linspace(self.start, self.stop, self.steps))


def _sweep_row(task):
    """One sweep row; failures are reported in the row, never raised."""
    kind, x, ctx = task
    try:
        with warnings.catch_warnings():
            warnings.simplefilter("ignore")
            if kind in ("m", "T"):
                geo = (
                    models.instanton_geometry(ctx["omega"], ctx["a"], x)
                    if kind == "m"
                    else models.instanton_geometry(
                        ctx["omega"], ctx["a"], models.m_for_period(ctx["omega"], ctx["a"], x)
                    )
                )
                det = models.instanton_primed_det(geo)
                ratio = det / models.instanton_reference_det(geo.omega, geo.T)
                return [geo.m, geo.T, det, ratio, "ok", ""]
            if kind == "omega2":
                cfg = RunConfig(Constant(x), ctx["window"], ctx["bc"], ctx["method"],
                                ctx["omega_ref"], ctx["tol"], ctx["N"])
            else:
                cfg = RunConfig(ctx["profile"], ctx["window"], ctx["bc"], ctx["method"],
                                x, ctx["tol"], ctx["N"])
            res = run_method(cfg, cfg.method)
            d = res.diagnostics
            return [x, res.value, d.wronskian_drift, d.zero_mode_residual, int(d.steps), "ok", ""]
    except (GydetError, ValueError, ArithmeticError, ConfigError) as exc:
        error = ["failed", f"{type(exc).__name__}: {exc}"]
        if kind == "m":
            return [x, None, None, None] + error
        if kind == "T":
            return [None, x, None, None] + error
        return [x, None, None, None, None] + error


def sweep_rows(spec, ctx, jobs=1):
    """Rows in ascending parameter order; `jobs` > 1 evaluates them in worker processes."""
    tasks = [(spec.parameter, x, ctx) for x in spec.values()]
    if jobs > 1 and len(tasks) > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            return list(pool.map(_sweep_row, tasks))
    return [_sweep_row(t) for t in tasks]


def sweep_header(parameter):
    if parameter in ("m", "T"):
        return ["m", "T", "primed_det", "ratio", "status", "error"]
    return [parameter, "value", "wronskian_drift", "zero_mode_residual", "steps", "status", "error"]


def cmd_sweep(args):
    spec = SweepSpec(args.param, args.start, args.stop, args.steps)
    if spec.parameter in ("m", "T"):
        if not (args.omega > 0 and args.a > 0):
            raise ConfigError("--omega and --a must be positive")
        ctx = {"omega": args.omega, "a": args.a}
    else:
        if args.method == "all":
            raise ConfigError("sweeps take a single method")
        profile = load_profile(args, required=spec.parameter == "omega_ref")
        if spec.parameter == "omega2" and profile is not None:
            raise ConfigError("an omega2 sweep uses a constant profile; drop --profile/--expr")
        bc = BoundaryCondition.parse(args.bc)
        if spec.parameter == "omega_ref" and bc is BoundaryCondition.DIRICHLET:
            raise ConfigError("omega_ref sweeps need periodic or antiperiodic conditions")
        N = args.N
        if args.method == "fd" and N is None:
            raise ConfigError("--method fd requires --N")
        ctx = {
            "profile": profile,
            "window": load_window(args, profile),
            "bc": bc,
            "method": args.method,
            "omega_ref": args.omega_ref,
            "tol": _tolerance(args),
            "N": N,
        }
    rows = sweep_rows(spec, ctx, args.jobs)
    header = sweep_header(spec.parameter)
    if args.out == "json":
        return [dict(zip(header, row)) for row in rows], None
    return None, to_csv(header, rows)


# -- argument parsing ------------------------------------------------------------------------


def _add_profile_args(p, window=True):
    p.add_argument("--profile", help="profile JSON, or @path to a JSON file")
    p.add_argument("--expr", help="omega2(t) as an infix expression")
    if window:
        p.add_argument("--ta", type=float, help="window start")
        p.add_argument("--tb", type=float, help="window end")


def _add_common(p):
    p.add_argument("--bc", default="dirichlet", help="dirichlet, periodic or antiperiodic")
    p.add_argument("--omega-ref", dest="omega_ref", type=float, help="reference frequency")
    p.add_argument("--tol", type=float, help="integrator tolerance (default: $GYDET_TOL or 1e-10)")
    p.add_argument("--N", type=int, help="grid intervals for the finite-difference oracle")


def build_parser():
    parser = argparse.ArgumentParser(
        prog="gydet", description="Functional determinant ratios of -d^2/dt^2 - omega2(t)."
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("compute", help="determinant ratio by one or all routes")
    _add_profile_args(p)
    _add_common(p)
    p.add_argument("--method", default="gy", choices=["gy", "homotopy", "fd", "all"])
    p.add_argument("--n-g", dest="n_g", type=int, default=32, help="homotopy quadrature nodes")
    p.add_argument("--out", default="json", choices=["json", "csv"])

    p = sub.add_parser("instanton", help="finite-period double-well instanton report")
    p.add_argument("--omega", type=float, default=1.0)
    p.add_argument("--a", type=float, default=1.0)
    p.add_argument("--m", type=float)
    p.add_argument("--period", type=float)
    p.add_argument("--check-N", dest="check_N", type=int, help="also run the fd oracle on N intervals")
    p.add_argument("--tol", type=float)

    p = sub.add_parser("sweep", help="tabulate a ratio over a parameter range")
    _add_profile_args(p)
    _add_common(p)
    p.add_argument("--param", required=True, choices=SWEEP_PARAMETERS)
    p.add_argument("--from", dest="start", type=float, required=True)
    p.add_argument("--to", dest="stop", type=float, required=True)
    p.add_argument("--steps", type=int, default=10)
    p.add_argument("--method", default="gy", choices=["gy", "homotopy", "fd", "all"])
    p.add_argument("--omega", type=float, default=1.0, help="instanton sweeps")
    p.add_argument("--a", type=float, default=1.0, help="instanton sweeps")
    p.add_argument("--jobs", type=int, default=1, help="worker processes")
    p.add_argument("--out", default="csv", choices=["json", "csv"])

    p = sub.add_parser("green", help="Green function at one point pair")
    _add_profile_args(p)
    p.add_argument("--bc", default="dirichlet")
    p.add_argument("--t", type=float, required=True)
    p.add_argument("--tp", type=float, required=True)
    p.add_argument("--tol", type=float)

    p = sub.add_parser("oracle", help="finite-difference determinant ratio")
    _add_profile_args(p)
    _add_common(p)
    p.add_argument("--primed", action="store_true", help="remove the near-zero eigenvalue")
    p.add_argument("--eigenvalues", type=int, default=0, help="also report the k lowest eigenvalues")
    p.add_argument("--ref-omega2", dest="ref_omega2", type=float, help="constant reference omega2")
    return parser


def _dispatch(args):
    if args.command == "compute":
        return cmd_compute(build_config(args))
    if args.command == "instanton":
        return cmd_instanton(args), None
    if args.command == "sweep":
        return cmd_sweep(args)
    if args.command == "green":
        return cmd_green(args), None
    return cmd_oracle(args), None


def main(argv=None, stdout=None, stderr=None):
    """Entry point; returns the exit status."""
    stdout = sys.stdout if stdout is None else stdout
    stderr = sys.stderr if stderr is None else stderr
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        doc, text = _dispatch(args)
    except ZeroModeError as exc:
        print(f"gydet: zero mode: {exc}", file=stderr)
        return EXIT_ZERO_MODE
    except IntegrationError as exc:
        print(f"gydet: numerical failure: {exc}", file=stderr)
        return EXIT_NUMERICAL
    except (ConfigError, DegenerateReferenceError, ValueError) as exc:
        print(f"gydet: configuration error: {exc}", file=stderr)
        return EXIT_CONFIG
    except (GydetError, ArithmeticError) as exc:
        print(f"gydet: numerical failure: {exc}", file=stderr)
        return EXIT_NUMERICAL
    stdout.write(dumps(doc) if text is None else text)
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
