"""Green's function series, its quadrature oracle, and the linear solvers.

The inverse of the mode operator ``Theta_m(D) - kappa`` acting on
decaying right-hand sides is convolution against

    G(t) = sum_j e^{-sigma_j |t|} (c_j cos(tau_j |t|) + c'_j sin(tau_j |t|)),

with one term per resolvent pole; above the mode's Hardy constant the
first pair sits on the real axis and contributes the non-decaying
one-sided term ``c_0 sin(tau_0 t)`` for ``t < 0`` instead.  The
coefficients come from the pole residues: with ``R_j`` the residue of
``1/(Theta_m - kappa)`` at ``z_j = tau_j + i sigma_j`` and the inverse
transform normalized as ``(1/2 pi) int e^{i xi t} / (Theta - kappa)``,
closing the contour gives ``c_j + i c'_j = i R_j`` for axis poles,
``-2 i conj(R_j)`` for strictly complex poles, and ``c_0 = 2 R_0`` for
the real pair.

Two independent routes to the same objects live here on purpose: the
series against direct oscillatory quadrature of the Fourier integral,
and the one-shot convolution against the per-root ODE-system
reassembly.  Tests hold them against each other.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np
from scipy.signal import fftconvolve

from .errors import (
    DecayHypothesisError,
    DomainError,
    QuadratureError,
    ValidationError,
)
from .grid import GridFunction
from .indicial import find_roots
from .symbol import theta

__all__ = [
    "GreensSeries",
    "build_greens",
    "greens_quadrature_oracle",
    "solve_convolution",
    "solve_ode_system",
    "component_solutions",
    "asymptotic_coefficients",
    "convolution_decay",
    "DecayRates",
    "apply_symbol",
]

REGIME_STABLE = "stable"
REGIME_UNSTABLE = "unstable"


@dataclass(frozen=True)
class GreensSeries:
    """Truncated exponential series for the Green's function of one mode.

    ``roots[j]`` carries the pole, ``coefficients[j] = (c_j, c'_j)`` the
    series weights.  ``tail_bound`` is a global (sup over t) estimate of
    the dropped terms: the retained coefficient mass, which dominates
    the dropped mass because the weights decrease along the sequence;
    ``tail_bound_at`` sharpens it by the decay of the first dropped
    exponential.
    """

    params: object
    mode: int
    roots: tuple
    coefficients: tuple
    truncation: int
    regime: str
    tail_bound: float
    sigma_next: float

    def __call__(self, t):
        t = np.asarray(t, dtype=np.float64)
        at = np.abs(t)
        out = np.zeros(at.shape)
        for root, (c, cp) in zip(self.roots, self.coefficients):
            if root.sigma == 0.0:
                out = out + c * np.sin(root.tau * t) * (t < 0.0)
            else:
                damp = np.exp(-root.sigma * at)
                if root.tau == 0.0:
                    out = out + c * damp
                else:
                    phase = root.tau * at
                    out = out + damp * (c * np.cos(phase) + cp * np.sin(phase))
        return float(out) if np.ndim(t) == 0 else out

    def tail_bound_at(self, t):
        return self.tail_bound * np.exp(-self.sigma_next * np.abs(t))

    @property
    def gamma_coefficients(self):
        """Complex weights c_j + i c'_j, one per root."""
        return np.array([complex(c, cp) for c, cp in self.coefficients])


def build_greens(params, mode=0, truncation=12):
    """Green's series with ``truncation + 1`` terms and a tail bound."""
    if truncation < 0:
        raise ValidationError(f"truncation must be >= 0, got {truncation}")
    roots = find_roots(params, mode, count=truncation + 2)
    kept, next_root = roots[: truncation + 1], roots[truncation + 1]
    regime = REGIME_UNSTABLE if kept[0].sigma == 0.0 else REGIME_STABLE
    coefficients = []
    for root in kept:
        r = root.residue
        if root.sigma == 0.0:
            coefficients.append((2.0 * r.real, 0.0))  # one-sided sine weight
        elif root.tau == 0.0:
            coefficients.append((-r.imag, 0.0))
        else:
            coefficients.append((-2.0 * r.imag, -2.0 * r.real))
    mass = sum(abs(c) + abs(cp) for c, cp in coefficients)
    return GreensSeries(
        params=params,
        mode=mode,
        roots=tuple(kept),
        coefficients=tuple(coefficients),
        truncation=truncation,
        regime=regime,
        tail_bound=mass,
        sigma_next=next_root.sigma,
    )


def _gauss_nodes(order=48):
    x, w = np.polynomial.legendre.leggauss(order)
    return 0.5 * (x + 1.0), 0.5 * w  # mapped to [0, 1]


def greens_quadrature_oracle(
    params, mode, t, contour_shift=None, lobes=96, tol=1e-9
):
    """Direct inverse-Fourier value of the Green's function at one point.

    Integrates ``(1/2 pi) int e^{i z t} / (Theta_m(z) - kappa) dz`` along
    a horizontal line ``Im z = s``.  The line integral splits into
    half-period lobes of the oscillation, each done with fixed
    Gauss-Legendre, and the slowly decaying alternating lobe series is
    summed by iterated averaging.  For large ``|t|`` the contour is
    shifted toward the first pole (``s = sigma_0 / 2``), which removes
    most of the exponential smallness from the oscillatory cancellation.
    Stable regime only, and ``t = 0`` is excluded (log-type singularity).
    """
    if t == 0.0:
        raise DomainError("the Green's function is singular at t = 0")
    kappa = params.kappa
    if kappa >= complex(theta(params, mode, 0.0)).real - 1e-9:
        raise DomainError("quadrature oracle requires the stable regime")
    sigma0 = find_roots(params, mode, count=1)[0].sigma
    if contour_shift is None:
        shift = 0.0 if abs(t) <= 1.0 else 0.5 * sigma0
    else:
        if not 0.0 <= contour_shift < sigma0:
            raise ValidationError(
                f"contour_shift must lie in [0, sigma_0={sigma0}), got {contour_shift}"
            )
        shift = contour_shift
    s = shift if t > 0 else -shift
    width = math.pi / abs(t)
    nodes, weights = _gauss_nodes()

    for attempt in range(3):
        k = np.arange(lobes * (2**attempt))
        left = k[:, None] * width
        xi = left + nodes[None, :] * width
        zp = xi + 1j * s
        zm = -xi + 1j * s
        vals = np.exp(1j * zp * t) / (theta(params, mode, zp) - kappa)
        vals = vals + np.exp(1j * zm * t) / (theta(params, mode, zm) - kappa)
        lobe_ints = (vals * weights[None, :]).sum(axis=1) * width
        partial = np.cumsum(lobe_ints)
        est, err = _euler_limit(partial[4:])
        scale = max(abs(est), 1e-300)
        if err <= tol * scale and abs(est.imag) <= 1e-7 * scale:
            return float(est.real) / (2.0 * math.pi)
    raise QuadratureError(
        f"oracle did not reach rel tol {tol} at t={t}: err {err:.3e}, value {est:.6e}"
    )


def _euler_limit(partial):
    """Iterated averaging of a partial-sum sequence; (limit, error estimate)."""
    a = np.asarray(partial, dtype=np.complex128)
    best = a[-1]
    prev = best
    for _ in range(len(partial) - 1):
        a = 0.5 * (a[:-1] + a[1:])
        prev, best = best, a[-1]
        if len(a) < 3:
            break
    return best, abs(best - prev)


def _difference_kernel(fun, h):
    """Kernel sampled on the doubled difference lattice of h's grid."""
    n = h.n_points
    lag = (np.arange(2 * n - 1) - (n - 1)) * h.step
    return fun(lag)


def _convolve_on_grid(kernel, h):
    """Trapezoid discrete convolution, kernel on the doubled lattice."""
    n = h.n_points
    wts = np.ones(n)
    wts[0] = wts[-1] = 0.5
    full = fftconvolve(kernel, h.samples * wts)
    return full[n - 1 : 2 * n - 1] * h.step


def solve_convolution(greens, h, threshold=1e-10):
    """Particular solution of (Theta_m(D) - kappa) w = h as G * h."""
    h.require_decay(threshold)
    if np.max(np.abs(h.samples.imag)) == 0.0:
        kernel = _difference_kernel(greens, h)
        return h.with_samples(_convolve_on_grid(kernel, h))
    re = solve_convolution(greens, h.with_samples(h.samples.real + 0j), threshold)
    im = solve_convolution(greens, h.with_samples(h.samples.imag + 0j), threshold)
    return h.with_samples(re.samples + 1j * im.samples)


def component_solutions(greens, h, threshold=1e-10):
    """Per-root particular solutions w_j = k_j * h on h's grid.

    Axis and complex roots use the complex kernel ``e^{-(sigma + i tau)
    |t|}``, so each w_j solves ``w_j'' - lambda_j^2 w_j = -2 lambda_j h``
    with ``lambda_j = sigma_j + i tau_j``; the real-pair root of the
    unstable regime uses the one-sided kernel ``sin(tau_0 t) chi_{t<0}``
    and solves ``w_0'' + tau_0^2 w_0 = -tau_0 h``.
    """
    h.require_decay(threshold)
    out = []
    for root in greens.roots:
        if root.sigma == 0.0:
            fun = lambda lag, tau=root.tau: np.sin(tau * lag) * (lag < 0.0)
        else:
            lam = complex(root.sigma, root.tau)
            fun = lambda lag, lam=lam: np.exp(-lam * np.abs(lag))
        kernel = _difference_kernel(fun, h)
        out.append(h.with_samples(_convolve_on_grid(kernel, h)))
    return out


def solve_ode_system(greens, h, threshold=1e-10):
    """Reassembled solution Re sum_j (c_j + i c'_j) w_j.

    Identical quadrature to :func:`solve_convolution` term by term, so
    the two agree to round-off; kept separate because the components
    are what the Wronskian machinery consumes.
    """
    if np.max(np.abs(h.samples.imag)) != 0.0:
        re = solve_ode_system(greens, h.with_samples(h.samples.real + 0j), threshold)
        im = solve_ode_system(greens, h.with_samples(h.samples.imag + 0j), threshold)
        return h.with_samples(re.samples + 1j * im.samples)
    comps = component_solutions(greens, h, threshold)
    acc = np.zeros(h.n_points, dtype=np.complex128)
    for root, (c, cp), wj in zip(greens.roots, greens.coefficients, comps):
        if root.sigma == 0.0:
            acc = acc + c * wj.samples  # already real-kernel component
        else:
            acc = acc + complex(c, cp) * wj.samples
    return h.with_samples(acc.real + 0j)


def _tail_rate(h):
    """Decay rate of h at +infinity from a log-slope fit on the last quarter."""
    n = h.n_points
    t = h.t[-(n // 4) :]
    mag = np.abs(h.samples[-(n // 4) :])
    keep = mag > 1e-290
    if keep.sum() < 8:
        return math.inf  # numerically zero tail decays faster than anything
    slope = np.polyfit(t[keep], np.log(mag[keep]), 1)[0]
    return -slope


def asymptotic_coefficients(roots, h, count=None):
    """Weighted moments giving the t -> +infinity amplitudes of G * h.

    Entry j is ``C_j = int e^{sigma_j t} h(t) dt`` for an axis root and
    the pair ``(int e^{sigma_j t} cos(tau_j t) h, int e^{sigma_j t}
    sin(tau_j t) h)`` for an oscillatory one.  Requires h to decay
    strictly faster than the largest weight used.
    """
    used = list(roots) if count is None else list(roots)[:count]
    if not used:
        return []
    if np.max(np.abs(h.samples)) == 0.0:
        return [
            0.0 if r.tau == 0.0 else (0.0, 0.0) for r in used
        ]
    rate = _tail_rate(h)
    sigma_max = max(r.sigma for r in used)
    if rate <= sigma_max:
        raise DecayHypothesisError(
            f"h decays like e^(-{rate:.3f} t) but the slowest requested weight "
            f"is e^(+{sigma_max:.3f} t); moments would diverge"
        )
    t = h.t
    wts = np.ones(h.n_points)
    wts[0] = wts[-1] = 0.5
    out = []
    for r in used:
        with np.errstate(divide="ignore"):
            grown = np.exp(r.sigma * t + np.log(h.samples.astype(complex)))
        grown = np.where(h.samples == 0.0, 0.0, grown)
        if r.tau == 0.0:
            val = complex(np.sum(wts * grown) * h.step)
            out.append(val.real if abs(val.imag) == 0.0 else val)
        else:
            c1 = complex(np.sum(wts * np.cos(r.tau * t) * grown) * h.step)
            c2 = complex(np.sum(wts * np.sin(r.tau * t) * grown) * h.step)
            if abs(c1.imag) == 0.0 and abs(c2.imag) == 0.0:
                out.append((c1.real, c2.real))
            else:
                out.append((c1, c2))
    return out


class DecayRates(NamedTuple):
    rate_plus: float
    rate_minus: float
    log_plus: bool
    log_minus: bool


def convolution_decay(a, a_plus, a_minus):
    """Decay exponents of a convolution f1 * f2 from the factors' rates.

    ``f1 = O(e^{-a|t|})`` two-sided, ``f2 = O(e^{-a_plus t})`` at +inf
    and ``O(e^{+a_minus t})``-bounded at -inf; the product rate is
    ``min{a, a_plus}`` (resp. ``min{a, a_minus}``), degraded by a factor
    ``t`` exactly when the competing rates tie.
    """
    if a <= 0.0:
        raise ValidationError(f"two-sided rate must be positive, got a={a}")
    if a + a_plus <= 0.0 or a + a_minus <= 0.0:
        raise DomainError(
            f"need a + a_plus > 0 and a + a_minus > 0, got {a + a_plus}, {a + a_minus}"
        )
    return DecayRates(
        rate_plus=min(a, a_plus),
        rate_minus=min(a, a_minus),
        log_plus=a == a_plus,
        log_minus=a == a_minus,
    )


def apply_symbol(params, mode, w, shifted=False):
    """Apply the symbol as a Fourier multiplier on the (periodized) window.

    The grid is treated as one period; the wrap-around error is of the
    order of the function's endpoint magnitude, so inputs should satisfy
    the window-decay invariant.  With ``shifted=True`` the subcritically
    shifted symbol is applied instead (complex-valued on the real axis).
    """
    from .symbol import theta_shifted

    n = w.n_points
    xi = 2.0 * math.pi * np.fft.fftfreq(n, d=w.step)
    sym = theta_shifted(params, mode, xi) if shifted else theta(params, mode, xi)
    spec = np.fft.fft(w.samples) * sym
    out = np.fft.ifft(spec)
    if np.max(np.abs(w.samples.imag)) == 0.0 and not shifted:
        out = out.real + 0j  # real symbol, real input
    return w.with_samples(out)
