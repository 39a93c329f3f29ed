"""Damped Newton solver for the nonlinear profile equation.

The equation is the multiplier form of the profile problem: the symbol
acts spectrally on the grid, the power nonlinearity acts pointwise, and
each Newton linearization is solved by preconditioned GMRES with the
free symbol as preconditioner.  Parity of an even initial guess is
enforced on every iterate, which also keeps the translation direction
out of the linearization's way.
"""

from __future__ import annotations

import inspect
import math
from dataclasses import dataclass

import numpy as np
from scipy.sparse.linalg import LinearOperator, gmres

from .errors import DivergenceError, NegativityError, ValidationError
from .grid import GridFunction
from .symbol import CylinderParams, theta

__all__ = ["SolveReport", "solve_profile"]

MAX_ITERATIONS = 50
MAX_HALVINGS = 6
NEGATIVITY_RETRIES = 2

# scipy renamed gmres's stopping keyword; resolve once
_GMRES_TOL_KW = (
    "rtol" if "rtol" in inspect.signature(gmres).parameters else "tol"
)


@dataclass(frozen=True)
class SolveReport:
    """Outcome of a profile solve."""

    solution: GridFunction
    residual_norm: float
    iterations: int
    converged: bool
    trivial: bool

    def as_metadata(self) -> dict:
        return {
            "residual_norm": self.residual_norm,
            "iterations": self.iterations,
            "converged": self.converged,
            "trivial": self.trivial,
        }


def _odd_power(w, p):
    return np.sign(w) * np.abs(w) ** p


def solve_profile(
    params: CylinderParams,
    initial_guess: GridFunction,
    tolerance: float = 1e-10,
    max_iterations: int = MAX_ITERATIONS,
) -> SolveReport:
    """Newton-iterate the profile equation from a positive decaying guess.

    Stops when the equation residual drops below `tolerance` in the sup
    norm.  Steps that fail to decrease the residual are halved up to
    MAX_HALVINGS times before DivergenceError; steps that push the
    iterate significantly negative are halved up to NEGATIVITY_RETRIES
    times before NegativityError.  A guess that is identically zero (or
    an iterate collapsing to zero) converges with the trivial flag set.
    """
    if not 0.0 <= params.kappa < params.lam:
        raise ValidationError(
            f"spectral parameter {params.kappa!r} outside the stable range "
            f"[0, {params.lam!r})"
        )
    if max_iterations < 1:
        raise ValidationError("max_iterations must be at least 1")
    w = initial_guess.samples.real.copy()
    peak0 = float(np.max(np.abs(w)))
    if peak0 == 0.0:
        return SolveReport(
            solution=initial_guess.with_samples(np.zeros_like(w) + 0j),
            residual_norm=0.0,
            iterations=0,
            converged=True,
            trivial=True,
        )
    if float(np.min(w)) < -1e-10 * peak0:
        raise ValidationError("initial guess must be non-negative")
    initial_guess.require_decay(1e-6)

    even_grid = abs(initial_guess.t_min + initial_guess.t_max) <= 1e-12
    symmetric = even_grid and float(np.max(np.abs(w - w[::-1]))) <= 1e-10 * peak0
    if symmetric:
        w = 0.5 * (w + w[::-1])

    p = params.p
    n = w.size
    xi = 2.0 * math.pi * np.fft.fftfreq(n, d=initial_guess.step)
    sym_vals = theta(params, 0, xi).real - params.kappa

    def residual(v):
        return np.fft.ifft(sym_vals * np.fft.fft(v)).real - _odd_power(v, p)

    r = residual(w)
    rnorm = float(np.max(np.abs(r)))
    iterations = 0
    while rnorm > tolerance:
        if iterations >= max_iterations:
            raise DivergenceError(
                f"residual {rnorm:.3e} above tolerance after {iterations} iterations"
            )
        pot = p * np.abs(w) ** (p - 1.0)
        shift = 1.0 + float(np.max(pot))
        pre_vals = 1.0 / (sym_vals + shift)

        def matvec(v):
            return np.fft.ifft(sym_vals * np.fft.fft(v)).real - pot * v

        def precond(v):
            return np.fft.ifft(pre_vals * np.fft.fft(v)).real

        op = LinearOperator((n, n), matvec=matvec, dtype=np.float64)
        pre = LinearOperator((n, n), matvec=precond, dtype=np.float64)
        delta, _ = gmres(
            op, r, M=pre, restart=60, maxiter=300, atol=0.0, **{_GMRES_TOL_KW: 1e-10}
        )

        alpha, accepted, neg_left = 1.0, False, NEGATIVITY_RETRIES
        for _ in range(MAX_HALVINGS + 1):
            cand = w - alpha * delta
            if symmetric:
                cand = 0.5 * (cand + cand[::-1])
            scale = max(float(np.max(np.abs(cand))), 1e-300)
            if float(np.min(cand)) < -1e-8 * scale:
                if neg_left == 0:
                    raise NegativityError(
                        f"iterate lost positivity at iteration {iterations + 1}"
                    )
                neg_left -= 1
                alpha *= 0.5
                continue
            rc = residual(cand)
            rcn = float(np.max(np.abs(rc)))
            if rcn < rnorm:
                w, r, rnorm, accepted = cand, rc, rcn, True
                break
            alpha *= 0.5
        if not accepted:
            raise DivergenceError(
                f"residual stalled at {rnorm:.3e} after iteration {iterations + 1}"
            )
        iterations += 1

    peak = float(np.max(np.abs(w)))
    return SolveReport(
        solution=initial_guess.with_samples(w + 0j),
        residual_norm=rnorm,
        iterations=iterations,
        converged=True,
        trivial=peak <= 1e-10 * peak0,
    )
