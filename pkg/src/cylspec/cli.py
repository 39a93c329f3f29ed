"""Batch front end: one subcommand per computation, reproducible artifacts.

Each invocation resolves its flags into a single JobConfig, runs one
computation, and writes one artifact, a CSV table or a JSON document,
with the full configuration echoed inside.  Output is deterministic
for a fixed config: summation orders are fixed and nothing reads the
clock.  Exit codes: 0 on success, 2 for a rejected configuration, 3
for a numerical failure, the failing error class named in a JSON
report on stdout.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import os
import sys
from dataclasses import dataclass, field

import numpy as np

from .errors import CylspecError, ThresholdError, ValidationError
from .greens import build_greens, solve_convolution
from .grid import DEFAULT_STEP, DEFAULT_T_MAX, GridFunction
from .identities import pohozaev_check, wronskian, wronskian_defect
from .indicial import find_roots
from .nonlinear import solve_profile
from .profiles import bubble, bubble_residual, cylinder_constant, frobenius_fit
from .symbol import CylinderParams, theta

__all__ = ["JobConfig", "main", "run"]

_FMT = "%.17g"

# These produce scalar reports with no natural tabular form.
_REPORT_ONLY = ("verify-bubble", "pohozaev", "frobenius")


@dataclass(frozen=True)
class JobConfig:
    """Fully resolved description of one batch job."""

    command: str
    params: CylinderParams
    mode: int
    t_min: float
    t_max: float
    step: float
    truncation: int
    tolerance: float
    output: str | None
    fmt: str
    extras: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.tolerance <= 0.0:
            raise ValidationError(f"tolerance must be positive, got {self.tolerance}")
        if self.truncation < 1:
            raise ValidationError(
                f"truncation must be at least 1, got {self.truncation}"
            )
        if self.step <= 0.0 or self.t_max <= self.t_min:
            raise ValidationError(
                f"grid [{self.t_min}, {self.t_max}] with step {self.step} is empty"
            )
        if self.fmt == "csv" and self.command in _REPORT_ONLY:
            raise ValidationError(
                f"{self.command} emits a JSON report; use --format json"
            )

    def echo(self):
        """Flat provenance record embedded in every artifact."""
        doc = {
            "command": self.command,
            "n": self.params.n,
            "gamma": self.params.gamma,
            "p": self.params.p,
            "kappa": self.params.kappa,
            "mode": self.mode,
            "t_min": self.t_min,
            "t_max": self.t_max,
            "step": self.step,
            "truncation": self.truncation,
            "tolerance": self.tolerance,
            "format": self.fmt,
        }
        doc.update(self.extras)
        return doc


@dataclass
class JobResult:
    report: dict = field(default_factory=dict)
    grid: GridFunction | None = None
    table: tuple | None = None
    arrays: dict | None = None
    exit_code: int = 0


def _lattice(cfg):
    n = round((cfg.t_max - cfg.t_min) / cfg.step) + 1
    return cfg.t_min + cfg.step * np.arange(n)


def _load_grid(path):
    try:
        if path.endswith(".json"):
            loaded, _ = GridFunction.from_json(path)
            return loaded
        return GridFunction.from_csv(path)
    except FileNotFoundError as exc:
        raise ValidationError(f"input file not found: {path}") from exc


def _default_guess(cfg):
    if not 0.0 <= cfg.params.kappa < cfg.params.lam:
        raise ValidationError(
            f"kappa {cfg.params.kappa!r} is outside the stable range "
            f"[0, {cfg.params.lam!r})"
        )
    t = _lattice(cfg)
    scale = cylinder_constant(cfg.params)
    return GridFunction(cfg.t_min, cfg.t_max, cfg.step, scale * bubble(cfg.params, t))


def _job_symbol(cfg):
    xi = np.asarray(cfg.extras["xi"], dtype=float)
    vals = np.atleast_1d(np.asarray(theta(cfg.params, cfg.mode, xi), dtype=complex))
    rows = [
        (_FMT % x, _FMT % v.real, _FMT % v.imag) for x, v in zip(xi, vals)
    ]
    return JobResult(
        table=(("xi", "re", "im"), rows),
        arrays={
            "xi": [float(x) for x in xi],
            "theta_re": [float(v.real) for v in vals],
            "theta_im": [float(v.imag) for v in vals],
        },
    )


def _job_poles(cfg):
    roots = find_roots(cfg.params, cfg.mode, count=cfg.extras["count"])
    rows = []
    listing = []
    for root in roots:
        rows.append(
            (
                str(root.index),
                _FMT % root.sigma,
                _FMT % root.tau,
                _FMT % root.residue.real,
                _FMT % root.residue.imag,
            )
        )
        listing.append(
            {
                "index": root.index,
                "sigma": root.sigma,
                "tau": root.tau,
                "residue_re": root.residue.real,
                "residue_im": root.residue.imag,
            }
        )
    header = ("index", "sigma", "tau", "residue_re", "residue_im")
    return JobResult(table=(header, rows), arrays={"roots": listing})


def _job_greens(cfg):
    series = build_greens(cfg.params, cfg.mode, truncation=cfg.truncation)
    # The kernel is even and log-singular at t = 0, so sample (0, t_max].
    n = round(cfg.t_max / cfg.step)
    if n < 1:
        raise ValidationError("t_max must be at least one step for greens")
    t = cfg.step * np.arange(1, n + 1)
    values = GridFunction(cfg.step, cfg.step * n, cfg.step, series(t))
    report = {"regime": series.regime, "tail_bound": series.tail_bound}
    return JobResult(report=report, grid=values)


def _job_solve_linear(cfg):
    source = _load_grid(cfg.extras["source"])
    series = build_greens(cfg.params, cfg.mode, truncation=cfg.truncation)
    solution = solve_convolution(series, source, threshold=cfg.tolerance)
    return JobResult(report={"tail_bound": series.tail_bound}, grid=solution)


def _job_solve_profile(cfg):
    guess_path = cfg.extras["guess"]
    guess = _load_grid(guess_path) if guess_path else _default_guess(cfg)
    outcome = solve_profile(
        cfg.params,
        guess,
        tolerance=cfg.tolerance,
        max_iterations=cfg.extras["max_iterations"],
    )
    return JobResult(report=outcome.as_metadata(), grid=outcome.solution)


def _job_verify_bubble(cfg):
    if cfg.params.kappa != 0.0:
        raise ValidationError(
            "the closed-form profile solves the kappa = 0 equation; drop --kappa"
        )
    if not cfg.params.is_critical:
        raise ValidationError(
            "the closed-form profile exists at the critical exponent; drop --p"
        )
    t = _lattice(cfg)
    profile = GridFunction(cfg.t_min, cfg.t_max, cfg.step, bubble(cfg.params, t))
    residual = bubble_residual(cfg.params, profile)
    if residual > cfg.tolerance:
        raise ThresholdError(
            f"profile residual {residual:.3e} exceeds tolerance {cfg.tolerance:.1e}"
        )
    return JobResult(report={"residual": residual, "passed": True})


def _job_pohozaev(cfg):
    if not cfg.params.is_critical:
        raise ValidationError("the identity holds at the critical exponent only")
    report = {}
    input_path = cfg.extras["input"]
    if input_path:
        solution = _load_grid(input_path)
    else:
        outcome = solve_profile(cfg.params, _default_guess(cfg), tolerance=cfg.tolerance)
        solution = outcome.solution
        report.update(outcome.as_metadata())
    checked = pohozaev_check(cfg.params, solution, truncation=cfg.truncation)
    gradient, mass, nonlinear = checked.scaled_triple(cfg.params)
    report.update(
        {
            "grad_sum": checked.grad_sum,
            "mass_sum": checked.mass_sum,
            "rhs_integral": checked.rhs_integral,
            "relative_spread": checked.relative_spread,
            "scaled_gradient": gradient,
            "scaled_mass": mass,
            "scaled_nonlinear": nonlinear,
        }
    )
    return JobResult(report=report)


def _job_wronskian(cfg):
    h = _load_grid(cfg.extras["source"])
    h_tilde = _load_grid(cfg.extras["source_tilde"])
    h.require_same_grid(h_tilde)
    series = build_greens(cfg.params, cfg.mode, truncation=cfg.truncation)
    w = solve_convolution(series, h, threshold=cfg.tolerance)
    w_tilde = solve_convolution(series, h_tilde, threshold=cfg.tolerance)
    tr = wronskian(series, w, w_tilde, h, h_tilde)
    defect = wronskian_defect(series, w, w_tilde, h, h_tilde)
    report = {
        "wronskian_sup": float(np.max(np.abs(tr.samples.real))),
        "defect_sup": float(np.max(np.abs(defect.samples.real))),
    }
    return JobResult(report=report, grid=tr)


def _job_frobenius(cfg):
    profile = _load_grid(cfg.extras["input"])
    candidates = None
    if cfg.extras["use_roots"]:
        candidates = find_roots(cfg.params, cfg.mode, count=cfg.truncation)
    window = cfg.extras["window"]
    fit = frobenius_fit(
        profile,
        window=tuple(window) if window else None,
        candidate_roots=candidates,
    )
    report = {
        "sigma": fit.sigma,
        "tau": fit.tau,
        "amplitude_cos": fit.amplitude_cos,
        "amplitude_sin": fit.amplitude_sin,
        "residual": fit.residual,
        "window": [fit.window[0], fit.window[1]],
    }
    return JobResult(report=report)


_HANDLERS = {
    "symbol": _job_symbol,
    "poles": _job_poles,
    "greens": _job_greens,
    "solve-linear": _job_solve_linear,
    "solve-profile": _job_solve_profile,
    "verify-bubble": _job_verify_bubble,
    "pohozaev": _job_pohozaev,
    "wronskian": _job_wronskian,
    "frobenius": _job_frobenius,
}


def _render(cfg, result):
    echo = cfg.echo()
    if cfg.fmt == "json":
        doc = {"metadata": {"config": echo, **result.report}}
        if result.grid is not None:
            g = result.grid
            doc["grid"] = {"t_min": g.t_min, "t_max": g.t_max, "step": g.step}
            doc["re"] = [float(v) for v in g.samples.real]
            doc["im"] = [float(v) for v in g.samples.imag]
        if result.arrays:
            doc.update(result.arrays)
        return json.dumps(doc, indent=2, sort_keys=True) + "\n"
    buf = io.StringIO()
    buf.write("# " + json.dumps({"config": echo, **result.report}, sort_keys=True) + "\n")
    writer = csv.writer(buf, lineterminator="\n")
    if result.grid is not None:
        g = result.grid
        t = g.t
        writer.writerow(["t", "re", "im"])
        for k in range(g.samples.size):
            writer.writerow(
                [_FMT % t[k], _FMT % g.samples[k].real, _FMT % g.samples[k].imag]
            )
    else:
        header, rows = result.table
        writer.writerow(header)
        writer.writerows(rows)
    return buf.getvalue()


def run(config):
    """Execute one job and write its artifact; returns the exit status."""
    result = _HANDLERS[config.command](config)
    text = _render(config, result)
    if config.output is None:
        sys.stdout.write(text)
    else:
        with open(config.output, "w", newline="") as fh:
            fh.write(text)
    return result.exit_code


def _apply_thread_override():
    raw = os.environ.get("CYLSPEC_THREADS")
    if raw is None:
        return None
    try:
        count = int(raw)
    except ValueError:
        count = 0
    if count < 1:
        raise ValidationError(
            f"CYLSPEC_THREADS must be a positive integer, got {raw!r}"
        )
    for var in ("OMP_NUM_THREADS", "OPENBLAS_NUM_THREADS", "MKL_NUM_THREADS"):
        os.environ[var] = str(count)
    try:
        from threadpoolctl import threadpool_limits
    except ImportError:
        return None
    return threadpool_limits(limits=count)


def _add_command(sub, name, help_text):
    p = sub.add_parser(name, help=help_text)
    p.add_argument("--n", type=int, required=True, help="dimension, integer >= 2")
    p.add_argument("--gamma", type=float, required=True, help="order in (0, 1)")
    p.add_argument(
        "--p", type=float, default=None, help="profile exponent (default: critical)"
    )
    p.add_argument("--kappa", type=float, default=0.0, help="Hardy shift (default: 0)")
    p.add_argument(
        "--mode", type=int, default=0, help="spherical-harmonic degree (default: 0)"
    )
    p.add_argument(
        "--truncation", type=int, default=12, help="series truncation (default: 12)"
    )
    p.add_argument(
        "--tolerance",
        type=float,
        default=1e-6,
        help="solve / verification tolerance (default: 1e-6)",
    )
    p.add_argument("--output", default=None, help="artifact path (default: stdout)")
    p.add_argument(
        "--format",
        dest="fmt",
        choices=("csv", "json"),
        default="json",
        help="artifact format (default: json)",
    )
    p.add_argument("--t-min", dest="t_min", type=float, default=-DEFAULT_T_MAX)
    p.add_argument("--t-max", dest="t_max", type=float, default=DEFAULT_T_MAX)
    p.add_argument("--step", type=float, default=DEFAULT_STEP)
    return p


def _build_parser():
    parser = argparse.ArgumentParser(
        prog="cylspec",
        description=(
            "Spectral toolbox for the cylindrical Hardy operator: symbol "
            "evaluation, indicial roots, Green's kernels, linear and "
            "nonlinear profile solves, and identity checks."
        ),
    )
    sub = parser.add_subparsers(dest="command", required=True, metavar="command")

    p = _add_command(sub, "symbol", "evaluate the mode symbol on the real axis")
    p.add_argument(
        "--xi", type=float, nargs="+", default=[0.0], help="frequencies (default: 0)"
    )

    p = _add_command(sub, "poles", "indicial roots of the symbol at level kappa")
    p.add_argument(
        "--count", type=int, default=None, help="roots to report (default: truncation)"
    )

    _add_command(sub, "greens", "Green's function series sampled on (0, t_max]")

    p = _add_command(sub, "solve-linear", "solve (Theta - kappa) w = h by convolution")
    p.add_argument("--source", required=True, help="CSV or JSON samples of h")

    p = _add_command(sub, "solve-profile", "Newton solve of the profile equation")
    p.add_argument(
        "--guess", default=None, help="initial guess file (default: scaled bubble)"
    )
    p.add_argument("--max-iterations", dest="max_iterations", type=int, default=50)

    _add_command(sub, "verify-bubble", "residual check of the closed-form profile")

    p = _add_command(sub, "pohozaev", "three-way energy identity on a solved profile")
    p.add_argument(
        "--input", default=None, help="solved profile file (default: solve first)"
    )

    p = _add_command(sub, "wronskian", "weighted Wronskian of two solved pairs")
    p.add_argument("--source", required=True, help="samples of the first source h")
    p.add_argument(
        "--source-tilde",
        dest="source_tilde",
        required=True,
        help="samples of the second source",
    )

    p = _add_command(sub, "frobenius", "fit the leading tail term of a profile")
    p.add_argument("--input", required=True, help="profile samples to fit")
    p.add_argument(
        "--window", type=float, nargs=2, default=None, help="fit window (lo hi)"
    )
    p.add_argument(
        "--use-roots",
        dest="use_roots",
        action="store_true",
        help="restrict the fit to computed indicial roots",
    )
    return parser


def _resolve(args):
    params = CylinderParams(n=args.n, gamma=args.gamma, p=args.p, kappa=args.kappa)
    extras = {}
    if args.command == "symbol":
        extras["xi"] = [float(x) for x in args.xi]
    elif args.command == "poles":
        extras["count"] = args.count if args.count is not None else args.truncation
    elif args.command == "solve-linear":
        extras["source"] = args.source
    elif args.command == "solve-profile":
        extras["guess"] = args.guess
        extras["max_iterations"] = args.max_iterations
    elif args.command == "pohozaev":
        extras["input"] = args.input
    elif args.command == "wronskian":
        extras["source"] = args.source
        extras["source_tilde"] = args.source_tilde
    elif args.command == "frobenius":
        extras["input"] = args.input
        extras["window"] = list(args.window) if args.window else None
        extras["use_roots"] = bool(args.use_roots)
    return JobConfig(
        command=args.command,
        params=params,
        mode=args.mode,
        t_min=args.t_min,
        t_max=args.t_max,
        step=args.step,
        truncation=args.truncation,
        tolerance=args.tolerance,
        output=args.output,
        fmt=args.fmt,
        extras=extras,
    )


def _error_report(args, exc):
    doc = {
        "command": getattr(args, "command", None),
        "error": type(exc).__name__,
        "message": str(exc),
    }
    sys.stdout.write(json.dumps(doc, indent=2, sort_keys=True) + "\n")


def main(argv=None):
    parser = _build_parser()
    args = parser.parse_args(argv)
    try:
        _apply_thread_override()
        return run(_resolve(args))
    except ValidationError as exc:
        _error_report(args, exc)
        return 2
    except CylspecError as exc:
        _error_report(args, exc)
        return 3


if __name__ == "__main__":
    sys.exit(main())
