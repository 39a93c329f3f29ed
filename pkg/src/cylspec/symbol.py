"""Fourier symbol of the fractional Hardy operator on the cylinder.

After the Emden-Fowler substitution ``t = -log r`` the operator acts
mode-by-mode on spherical harmonics, and on mode ``m`` it becomes the
Fourier multiplier

    Theta_m(xi) = 2^(2 gamma) G(A_m + i xi/2) G(A_m - i xi/2)
                  / (G(B_m + i xi/2) G(B_m - i xi/2)),

with ``G`` the Gamma function and ``A_m - B_m = gamma``.  Everything in
this module is elementary Gamma-ratio algebra: the Hardy constant, the
mode constants, the plain and subcritically shifted symbols, the
stability classification of the Hardy term, and the closed-form
convolution kernel of the shifted operator.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import cached_property

import numpy as np

from .errors import DomainError, PoleError, ThresholdError, ValidationError
from .specfun import hyp2f1, log_gamma

__all__ = [
    "CylinderParams",
    "ModeIndex",
    "hardy_constant",
    "mode_constants",
    "theta",
    "theta_shifted",
    "theta_derivative",
    "constant_A",
    "stability_classify",
    "solve_p1",
    "kernel_K0",
]

STABILITY_TOL = 1e-9
_LOG2 = math.log(2.0)


def hardy_constant(n, gamma):
    """Best constant in the fractional Hardy inequality.

    ``Lambda(n, gamma) = 2^(2 gamma) (G((n+2g)/4) / G((n-2g)/4))^2``;
    tends to 1 as ``gamma -> 0`` and to the square of the half-dimension
    ratio as the order approaches 1.
    """
    n = float(n)
    gamma = float(gamma)
    if not 0.0 < gamma < 1.0:
        raise ValidationError(f"gamma must be in (0, 1), got {gamma}")
    if n - 2.0 * gamma <= 0.0:
        raise ValidationError(f"n - 2 gamma must be positive, got n={n}, gamma={gamma}")
    lg = log_gamma((n + 2.0 * gamma) / 4.0 + 0j) - log_gamma((n - 2.0 * gamma) / 4.0 + 0j)
    return float(np.exp(2.0 * gamma * _LOG2 + 2.0 * lg).real)


@dataclass(frozen=True)
class CylinderParams:
    """Problem parameters: dimension, order, subcritical exponent, Hardy shift.

    ``p`` defaults to the critical exponent ``(n + 2 gamma)/(n - 2 gamma)``,
    for which the subcritical shift ``q0`` vanishes.  ``kappa`` is the
    coefficient of the Hardy term and must be non-negative.
    """

    n: int
    gamma: float
    p: float = None  # type: ignore[assignment]  # resolved to critical in __post_init__
    kappa: float = 0.0

    def __post_init__(self):
        if int(self.n) != self.n or self.n < 2:
            raise ValidationError(f"dimension n must be an integer >= 2, got {self.n}")
        object.__setattr__(self, "n", int(self.n))
        if not 0.0 < self.gamma < 1.0:
            raise ValidationError(f"gamma must be in (0, 1), got {self.gamma}")
        if self.n - 2.0 * self.gamma <= 0.0:
            raise ValidationError(
                f"n - 2 gamma must be positive, got n={self.n}, gamma={self.gamma}"
            )
        if self.p is None:
            object.__setattr__(self, "p", self.p_critical)
        if not self.p_lower < self.p <= self.p_critical + 1e-14:
            raise ValidationError(
                f"p must lie in ({self.p_lower}, {self.p_critical}], got {self.p}"
            )
        if self.kappa < 0.0:
            raise ValidationError(f"kappa must be non-negative, got {self.kappa}")
        # Derived shift is non-negative on the admissible range and zero
        # exactly at the critical exponent.
        assert self.q0 >= -1e-14

    @property
    def p_critical(self):
        return (self.n + 2.0 * self.gamma) / (self.n - 2.0 * self.gamma)

    @property
    def p_lower(self):
        return self.n / (self.n - 2.0 * self.gamma)

    @property
    def is_critical(self):
        return abs(self.p - self.p_critical) <= 1e-12

    @property
    def q0(self):
        """Subcritical decay shift ``-(n - 2 gamma)/2 + 2 gamma/(p - 1)``."""
        return -(self.n - 2.0 * self.gamma) / 2.0 + 2.0 * self.gamma / (self.p - 1.0)

    @cached_property
    def lam(self):
        """Hardy constant for these ``(n, gamma)``."""
        return hardy_constant(self.n, self.gamma)


@dataclass(frozen=True)
class ModeIndex:
    """Spherical-harmonic mode: degree, Laplace eigenvalue, multiplicity."""

    degree: int
    eigenvalue: float
    multiplicity: int

    @classmethod
    def of(cls, n, degree):
        if int(degree) != degree or degree < 0:
            raise ValidationError(f"mode degree must be an integer >= 0, got {degree}")
        ell = int(degree)
        n = int(n)
        mu = float(ell * (ell + n - 2))
        mult = math.comb(n + ell - 1, ell)
        if ell >= 2:
            mult -= math.comb(n + ell - 3, ell - 2)
        return cls(degree=ell, eigenvalue=mu, multiplicity=mult)


def _coerce_mode(params, mode):
    if isinstance(mode, ModeIndex):
        return mode
    return ModeIndex.of(params.n, mode)


def mode_constants(params, mode=0):
    """Indicial constants ``(A_m, B_m)`` of mode ``m``; ``A_m - B_m = gamma``."""
    mode = _coerce_mode(params, mode)
    half = 0.5 * math.sqrt((params.n / 2.0 - 1.0) ** 2 + mode.eigenvalue)
    a = 0.5 + params.gamma / 2.0 + half
    b = 0.5 - params.gamma / 2.0 + half
    return a, b


def _gamma_ratio_exp(a, b, w, two_gamma_log2):
    """exp(2g log 2 + lg(a+w) + lg(a-w) - lg(b+w) - lg(b-w)) with pole care.

    Poles of the numerator Gammas are poles of the symbol and raise;
    poles of the denominator Gammas are legitimate zeros (the reciprocal
    of the Gamma vanishes there), so those entries return exactly 0.
    """
    w = np.atleast_1d(np.asarray(w, dtype=np.complex128))
    num1, num2 = a + w, a - w
    den1, den2 = b + w, b - w

    def _near_pole(u):
        k = np.round(u.real)
        return (k <= 0.0) & (np.abs(u - k) <= 1e-14)

    if np.any(_near_pole(num1) | _near_pole(num2)):
        raise PoleError("symbol evaluated at a pole (numerator Gamma argument)")
    zero = _near_pole(den1) | _near_pole(den2)
    # Mask denominator poles before calling log_gamma, then restore.
    safe1 = np.where(zero, 1.0, den1)
    safe2 = np.where(zero, 1.0, den2)
    out = np.exp(
        two_gamma_log2
        + log_gamma(num1)
        + log_gamma(num2)
        - log_gamma(safe1)
        - log_gamma(safe2)
    )
    out[zero] = 0.0
    # Reflection symmetry makes the ratio real whenever w is real (the
    # imaginary axis of the symbol); drop the round-off phase there.
    out.imag[w.imag == 0.0] = 0.0
    return out


def _theta_arr(params, mode, z, q_shift):
    a, b = mode_constants(params, mode)
    z = np.asarray(z, dtype=np.complex128)
    shape = z.shape
    w = 0.5 * (q_shift + 1j * np.atleast_1d(z))
    out = _gamma_ratio_exp(a, b, w, 2.0 * params.gamma * _LOG2)
    return out.reshape(shape)


def theta(params, mode, z):
    """Symbol ``Theta_m(z)`` of the Hardy operator on mode ``m``.

    Even in ``z``, conjugate-symmetric, real on both axes, and growing
    like ``|z|^(2 gamma)`` along the real direction.  Accepts scalar or
    array ``z``; scalar in, scalar out.
    """
    out = _theta_arr(params, mode, z, 0.0)
    return complex(out) if np.ndim(z) == 0 else out


def theta_shifted(params, mode, z):
    """Symbol of the subcritically shifted operator: ``z i`` -> ``q0 + z i``.

    Coincides with :func:`theta` at the critical exponent, where the
    shift ``q0`` vanishes.
    """
    out = _theta_arr(params, mode, z, params.q0)
    return complex(out) if np.ndim(z) == 0 else out


def theta_derivative(params, mode, z):
    """d Theta_m / dz, via the digamma logarithmic derivative.

    At the symbol zeros (denominator Gamma poles) the log-derivative
    form is 0 * inf; there the derivative is the finite limit obtained
    from the reciprocal-Gamma residue, 1/G(s) ~ (-1)^j j! (s + j).
    """
    from .specfun import digamma  # local import keeps module load light

    a, b = mode_constants(params, mode)
    z = np.asarray(z, dtype=np.complex128)
    shape = z.shape
    w = 0.5j * np.atleast_1d(z).ravel()
    c = 2.0 * params.gamma * _LOG2

    def _near_pole(u):
        k = np.round(u.real)
        return (k <= 0.0) & (np.abs(u - k) <= 1e-14)

    if np.any(_near_pole(a + w) | _near_pole(a - w)):
        raise PoleError("symbol derivative evaluated at a pole (numerator Gamma)")
    at1, at2 = _near_pole(b + w), _near_pole(b - w)  # disjoint since b > 0
    out = np.empty_like(w)
    reg = ~(at1 | at2)
    if np.any(reg):
        wr = w[reg]
        th = _gamma_ratio_exp(a, b, wr, c)
        logd = digamma(a + wr) - digamma(a - wr) - digamma(b + wr) + digamma(b - wr)
        out[reg] = th * 0.5j * logd
    for idx in np.nonzero(at1)[0]:
        wi = w[idx]
        j = int(round(-(b + wi).real))
        rest = np.exp(c + log_gamma(a + wi) + log_gamma(a - wi) - log_gamma(b - wi))
        out[idx] = 0.5j * rest * (-1.0 if j % 2 else 1.0) * math.factorial(j)
    for idx in np.nonzero(at2)[0]:
        wi = w[idx]
        k = int(round(-(b - wi).real))
        rest = np.exp(c + log_gamma(a + wi) + log_gamma(a - wi) - log_gamma(b + wi))
        out[idx] = -0.5j * rest * (-1.0 if k % 2 else 1.0) * math.factorial(k)
    out = out.reshape(shape)
    return complex(out) if np.ndim(z) == 0 else out


def constant_A(params):
    """Linear-term constant of the subcritical profile equation.

    Equals the shifted symbol at frequency zero; coincides with the
    Hardy constant exactly at the critical exponent.
    """
    return float(theta_shifted(params, 0, 0.0).real)


def stability_classify(params):
    """Classify ``p A(p)`` against the Hardy constant.

    Returns ``"stable"`` when ``p A < Lambda`` and ``"unstable"`` when
    ``p A > Lambda``; raises :class:`ThresholdError` inside the pinned
    tolerance ``1e-9`` of the threshold, where the sign is not decidable
    at working precision.
    """
    margin = params.p * constant_A(params) - params.lam
    if abs(margin) <= STABILITY_TOL:
        raise ThresholdError(
            f"p A(p) - Lambda = {margin:.3e} is within {STABILITY_TOL} of the threshold"
        )
    return "stable" if margin < 0.0 else "unstable"


def solve_p1(n, gamma, residual_tol=1e-10):
    """Exponent at which ``p A(p) = Lambda``, by bisection.

    The product is increasing across the bracket: it tends to
    ``-Lambda`` at the lower endpoint (where ``A`` collapses through a
    Gamma pole) and equals ``(p_crit - 1) Lambda > 0`` at the critical
    exponent.  The returned root satisfies ``|p1 A(p1) - Lambda| <=
    residual_tol``.
    """
    lam = hardy_constant(n, gamma)

    def margin(p):
        return p * constant_A(CylinderParams(n=n, gamma=gamma, p=p)) - lam

    base = CylinderParams(n=n, gamma=gamma)
    lo = base.p_lower * (1.0 + 1e-12)
    hi = base.p_critical
    flo, fhi = margin(lo), margin(hi)
    if not (flo < 0.0 < fhi):
        raise DomainError(
            f"stability margin does not change sign on ({lo}, {hi}): {flo:.3e}, {fhi:.3e}"
        )
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        if mid == lo or mid == hi:
            break
        if margin(mid) > 0.0:
            hi = mid
        else:
            lo = mid
    p1 = 0.5 * (lo + hi)
    res = abs(margin(p1))
    if res > residual_tol:
        raise DomainError(f"bisection residual {res:.3e} exceeds {residual_tol}")
    return p1


def kernel_K0(params, t):
    """Radial convolution kernel of the inverse shifted operator.

    Closed form (overall constant normalized to 1):

        K0(t) = exp(-q0 t) exp(-(n+2g)|t|/2)
                * 2F1((n+2g)/2, 1+g; n/2; exp(-2|t|)).

    Behaves like ``|t|^(-1-2g)`` at the origin and decays exponentially
    with rates ``(n+2g)/2 +- q0`` at ``t -> +-inf``.
    """
    t_arr = np.asarray(t, dtype=np.float64)
    if np.any(t_arr == 0.0):
        raise DomainError("kernel_K0 is singular at t = 0")
    n, g, q0 = params.n, params.gamma, params.q0
    a, b, c = (n + 2.0 * g) / 2.0, 1.0 + g, n / 2.0
    flat = np.atleast_1d(t_arr).ravel()
    out = np.empty_like(flat)
    for i, ti in enumerate(flat):
        at = abs(ti)
        out[i] = math.exp(-q0 * ti - a * at) * hyp2f1(a, b, c, math.exp(-2.0 * at))
    out = out.reshape(np.atleast_1d(t_arr).shape)
    return float(out[0]) if np.ndim(t) == 0 else out
