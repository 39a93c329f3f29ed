"""Indicial roots: poles of 1/(Theta_m(z) - kappa) in the upper half-plane.

The resolvent of the mode-``m`` operator has simple poles at the points
``z_j = tau_j + i sigma_j`` where the symbol crosses ``kappa``.  Their
locations and residues drive everything downstream: the exponents and
coefficients of the Green's-function series and the decay rates of
linear solutions.  The search exploits what is known analytically about
the symbol restricted to the imaginary axis, where it is real: it
decreases from the mode's Hardy constant to a zero at ``2 B_m``, and in
each later window between a symbol pole ``2 A_m + 2(j-1)`` and the
symbol zero ``2 B_m + 2j`` it falls from +infinity to 0, trapping
exactly one crossing of any positive level.  Above the Hardy constant
the first root leaves the axis through the origin and reappears as a
real pair.  Every reported configuration is certified afterwards by an
argument-principle winding count on a rectangle enclosing it.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import (
    ContinuationError,
    DegenerateRootError,
    IncompleteError,
    NoRootError,
    QuadratureError,
    ThresholdError,
    ValidationError,
)
from .symbol import mode_constants, theta, theta_derivative

__all__ = [
    "IndicialRoot",
    "find_roots",
    "residue_at",
    "certified_count",
    "find_lambda_prime",
]

ROOT_RESIDUAL_TOL = 1e-8
DEGENERATE_TOL = 1e-10
_NEWTON_TOL = 1e-12
_NEWTON_MAXIT = 50


@dataclass(frozen=True)
class IndicialRoot:
    """One resolvent pole ``z = tau + i sigma`` with its residue.

    ``sigma >= 0`` is the decay rate contributed to the Green's series,
    ``tau >= 0`` the oscillation frequency, ``residue`` the residue of
    ``1/(Theta_m - kappa)`` at ``z``, and ``index`` the position in the
    sigma-sorted sequence.
    """

    sigma: float
    tau: float
    residue: complex
    index: int

    @property
    def z(self):
        """Pole location in the closed upper half-plane."""
        return complex(self.tau, self.sigma)

    @property
    def decay(self):
        """Complex decay exponent ``sigma + i tau`` of the series term."""
        return complex(self.sigma, self.tau)


def _axis_value(params, mode, sigma):
    """Symbol restricted to the imaginary axis; exactly real."""
    return complex(theta(params, mode, 1j * sigma)).real


def _axis_slope(params, mode, sigma):
    return complex(1j * theta_derivative(params, mode, 1j * sigma)).real


def _real_value(params, mode, xi):
    return complex(theta(params, mode, complex(xi))).real


def _real_slope(params, mode, xi):
    return complex(theta_derivative(params, mode, complex(xi))).real


def _bisect(fun, lo, hi, flo):
    """Sign-change bisection; ``flo`` is the already-known sign at ``lo``."""
    for _ in range(100):
        mid = 0.5 * (lo + hi)
        if mid == lo or mid == hi:
            break
        if (fun(mid) > 0.0) == (flo > 0.0):
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)


def _polish(value, slope, x, kappa, lo, hi):
    """Newton with bracket fallback; the bisection seed is already close."""
    for _ in range(_NEWTON_MAXIT):
        r = value(x) - kappa
        d = slope(x)
        if d == 0.0:
            break
        step = r / d
        nxt = x - step
        if not lo < nxt < hi:
            break
        x = nxt
        if abs(step) <= _NEWTON_TOL * max(1.0, abs(x)):
            break
    return x


def _window_root(params, mode, kappa, lo_pole, hi_zero):
    """Root of the axis symbol in the open window (lo_pole, hi_zero).

    The symbol falls from +infinity at the pole end to 0 at the zero
    end, so any level ``kappa > 0`` is crossed.  Endpoint insets shrink
    until the bracket signs are established.
    """
    inset = 1e-3 * (hi_zero - lo_pole)
    lo = lo_pole + inset
    for _ in range(200):
        if _axis_value(params, mode, lo) > kappa:
            break
        inset *= 0.5
        lo = lo_pole + inset
    else:
        raise NoRootError(f"no bracket at the pole end of ({lo_pole}, {hi_zero})")
    inset = 1e-3 * (hi_zero - lo_pole)
    hi = hi_zero - inset
    for _ in range(200):
        if _axis_value(params, mode, hi) < kappa:
            break
        inset *= 0.5
        hi = hi_zero - inset
    else:
        raise NoRootError(f"no bracket at the zero end of ({lo_pole}, {hi_zero})")

    fun = lambda s: _axis_value(params, mode, s) - kappa
    x = _bisect(fun, lo, hi, fun(lo))
    return _polish(
        lambda s: _axis_value(params, mode, s),
        lambda s: _axis_slope(params, mode, s),
        x,
        kappa,
        lo_pole,
        hi_zero,
    )


def _first_axis_root(params, mode, kappa, b):
    """Root in (0, 2 B_m), present exactly when 0 < kappa < Theta_m(0)."""
    fun = lambda s: _axis_value(params, mode, s) - kappa
    lo, hi = 1e-8, 2.0 * b - 1e-8
    while fun(hi) > 0.0:
        hi = 0.5 * (hi + 2.0 * b)  # level barely below the axis zero
        if 2.0 * b - hi < 1e-13:
            raise NoRootError("no bracket below the first axis zero")
    x = _bisect(fun, lo, hi, fun(lo))
    return _polish(
        lambda s: _axis_value(params, mode, s),
        lambda s: _axis_slope(params, mode, s),
        x,
        kappa,
        0.0,
        2.0 * b,
    )


def _real_axis_root(params, mode, kappa):
    """Positive real root of Theta_m, present when kappa > Theta_m(0)."""
    fun = lambda x: _real_value(params, mode, x) - kappa
    hi = 1.0
    for _ in range(200):
        if fun(hi) > 0.0:
            break
        hi *= 2.0
    else:
        raise NoRootError("symbol growth bracket failed on the real axis")
    x = _bisect(fun, 1e-10, hi, fun(1e-10))
    return _polish(
        lambda s: _real_value(params, mode, s),
        lambda s: _real_slope(params, mode, s),
        x,
        kappa,
        0.0,
        2.0 * hi,
    )


def _winding(params, mode, kappa, corners, max_points=400_000):
    """Winding number of Theta_m - kappa around a closed polygon.

    Counts zeros minus poles.  The boundary phase is tracked through
    adaptive sampling: midpoints are inserted until every step turns by
    less than 1.2 rad, which keeps the unwrapping unambiguous.
    """
    segs = []
    for k in range(len(corners)):
        a, b = corners[k], corners[(k + 1) % len(corners)]
        tt = np.linspace(0.0, 1.0, 64, endpoint=False)
        segs.append(a + (b - a) * tt)
    z = np.concatenate(segs)
    vals = np.asarray(theta(params, mode, z)) - kappa
    for _ in range(40):
        if np.any(np.abs(vals) < 1e-13):
            raise QuadratureError("certification contour passes through a root")
        steps = np.angle(np.roll(vals, -1) / vals)
        bad = np.abs(steps) > 1.2
        if not np.any(bad):
            break
        if z.size > max_points:
            raise QuadratureError("contour refinement budget exhausted")
        idx = np.nonzero(bad)[0]
        mids = 0.5 * (z[idx] + np.roll(z, -1)[idx])
        mv = np.asarray(theta(params, mode, mids)) - kappa
        z = np.insert(z, idx + 1, mids)
        vals = np.insert(vals, idx + 1, mv)
    else:
        raise QuadratureError("contour phase tracking did not settle")
    total = float(np.sum(np.angle(np.roll(vals, -1) / vals))) / (2.0 * math.pi)
    nearest = round(total)
    if abs(total - nearest) > 0.05:
        raise QuadratureError(f"winding {total:.6f} is not close to an integer")
    return int(nearest)


def _pole_count(a, sigma_lo, sigma_hi):
    """Symbol poles 2 A_m + 2k, k >= 0, inside the sigma band."""
    count = 0
    k = 0
    while True:
        s = 2.0 * a + 2.0 * k
        if s >= sigma_hi:
            return count
        if s > sigma_lo:
            count += 1
        k += 1


def certified_count(params, mode, sigma_lo, sigma_hi, tau_max=None):
    """Argument-principle zero count in [-tau_max, tau_max] x [sigma_lo, sigma_hi].

    Returns the number of resolvent poles (zeros of ``Theta_m - kappa``)
    in the rectangle, each counted with multiplicity; the known symbol
    poles on the imaginary axis are added back to the winding number.
    The boundary must stay away from roots and symbol poles.
    """
    from .symbol import ModeIndex

    m = mode.degree if isinstance(mode, ModeIndex) else int(mode)
    if tau_max is None:
        tau_max = 4.0 * (m + 10)
    a, _ = mode_constants(params, mode)
    corners = [
        complex(-tau_max, sigma_lo),
        complex(tau_max, sigma_lo),
        complex(tau_max, sigma_hi),
        complex(-tau_max, sigma_hi),
    ]
    w = _winding(params, mode, params.kappa, corners)
    return w + _pole_count(a, sigma_lo, sigma_hi)


def find_roots(params, mode=0, count=12, search_height=None):
    """First ``count`` resolvent poles, sigma-sorted, certified.

    Stable levels (``kappa`` below the mode's Hardy constant) give a
    first root on the imaginary axis inside ``(0, 2 B_m)``; unstable
    levels give a real pair ``+-tau_0`` instead, reported once with
    ``sigma = 0``.  Later roots sit one per window regardless.  At
    ``kappa = 0`` the roots are the symbol zeros ``2 B_m + 2j`` exactly.

    Raises :class:`ThresholdError` within ``1e-9`` of the threshold
    level (the first root degenerates to ``z = 0`` there) and
    :class:`IncompleteError` if the requested count is not reached below
    ``search_height``; the partial list rides on the exception as
    ``.roots``.
    """
    if count < 1:
        raise ValidationError(f"count must be >= 1, got {count}")
    kappa = params.kappa
    lam_m = _axis_value(params, mode, 0.0)
    if abs(kappa - lam_m) <= 1e-9:
        raise ThresholdError(
            f"kappa = {kappa} is within 1e-9 of the mode threshold {lam_m}; "
            "the first root degenerates to z = 0"
        )
    a, b = mode_constants(params, mode)
    if search_height is None:
        search_height = 2.0 * b + 2.0 * count + 2.0

    locations = []  # (sigma, tau)
    if kappa > lam_m:
        locations.append((0.0, _real_axis_root(params, mode, kappa)))
    elif kappa > 0.0:
        locations.append((_first_axis_root(params, mode, kappa, b), 0.0))
    else:
        locations.append((2.0 * b, 0.0))

    j = 1
    while len(locations) < count:
        lo_pole = 2.0 * a + 2.0 * (j - 1)
        hi_zero = 2.0 * b + 2.0 * j
        if lo_pole >= search_height:
            partial = _assemble(params, mode, kappa, locations)
            err = IncompleteError(
                f"only {len(partial)} of {count} roots below search_height={search_height}"
            )
            err.roots = partial
            raise err
        if kappa == 0.0:
            locations.append((hi_zero, 0.0))
        else:
            locations.append((_window_root(params, mode, kappa, lo_pole, hi_zero), 0.0))
        j += 1

    roots = _assemble(params, mode, kappa, locations)
    _certify(params, mode, kappa, a, b, roots)
    return roots


def _assemble(params, mode, kappa, locations):
    roots = []
    for sigma, tau in sorted(locations):
        if abs(tau) < 1e-9:
            tau = 0.0
        z = complex(tau, sigma)
        resid = complex(theta(params, mode, z)) - kappa
        if abs(resid) > ROOT_RESIDUAL_TOL:
            raise NoRootError(
                f"candidate at z={z} has symbol residual {abs(resid):.3e}"
            )
        stub = IndicialRoot(sigma=sigma, tau=tau, residue=0j, index=len(roots))
        roots.append(
            IndicialRoot(
                sigma=sigma,
                tau=tau,
                residue=residue_at(params, mode, stub),
                index=len(roots),
            )
        )
    return roots


def _certify(params, mode, kappa, a, b, roots):
    """One winding count over a rectangle enclosing every returned root."""
    sig = [r.sigma for r in roots]
    top = max(sig) + (a - b)  # half a spectral gap past the last root
    if kappa > _axis_value(params, mode, 0.0):
        bottom = -(a - b)  # reach below the real pair, above the mirror poles
    else:
        bottom = 0.5 * min(s for s in sig if s > 0.0)
    expected = sum(1 if r.tau == 0.0 else 2 for r in roots)
    got = certified_count(params, mode, bottom, top)
    if got != expected:
        err = IncompleteError(
            f"argument principle counts {got} roots in the search band, located {expected}"
        )
        err.roots = roots
        raise err


def residue_at(params, mode, root):
    """Residue of 1/(Theta_m - kappa) at the root: 1/Theta_m'(z).

    Simple poles only; a derivative smaller than ``1e-10`` in magnitude
    is reported as :class:`DegenerateRootError`.  Conjugate symmetry
    forces the residue purely imaginary on the imaginary axis and purely
    real on the real axis, and the returned value satisfies that
    exactly.
    """
    d = complex(theta_derivative(params, mode, root.z))
    if abs(d) < DEGENERATE_TOL:
        raise DegenerateRootError(
            f"|Theta'| = {abs(d):.3e} at z = {root.z}; root is not simple"
        )
    r = 1.0 / d
    if root.tau == 0.0:
        return complex(0.0, r.imag)
    if root.sigma == 0.0:
        return complex(r.real, 0.0)
    return r


def find_lambda_prime(params, mode=0, kappa_max=1e8, samples_per_decade=6):
    """Level at which a second root pair would reach the real axis.

    Continuation in ``kappa`` upward from the mode threshold, tracking
    the second root ``sigma_1``.  Returns the crossing level if the
    tracked root reaches ``sigma <= 1e-6``.  For the radial mode this
    never happens: ``sigma_1`` is trapped above the first symbol pole
    ``2 A_m``, decreasing toward it like ``1/kappa``, and the
    continuation reports that plateau as :class:`ContinuationError`
    rather than inventing a finite level.
    """
    a, b = mode_constants(params, mode)
    lam_m = _axis_value(params, mode, 0.0)
    floor = 2.0 * a
    kap = lam_m * 1.01
    ratio = 10.0 ** (1.0 / samples_per_decade)
    prev_gap = None
    sigma1 = None
    while kap <= kappa_max:
        sigma1 = _window_root(params, mode, kap, 2.0 * a, 2.0 * b + 2.0)
        if sigma1 <= 1e-6:
            return kap
        gap = sigma1 - floor
        if prev_gap is not None and gap < 1e-3 * floor and gap > 0.25 * prev_gap:
            raise ContinuationError(
                f"sigma_1 plateaus at the symbol pole {floor}: gap {gap:.3e} at "
                f"kappa={kap:.6e}; the tracked root never reaches the real axis, "
                "so no finite second threshold exists for this mode"
            )
        prev_gap = gap
        kap *= ratio
    raise ContinuationError(
        f"tracked sigma_1 = {sigma1} still above 1e-6 at kappa_max = {kappa_max}"
    )
