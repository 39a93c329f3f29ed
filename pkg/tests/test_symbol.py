"""Symbol layer: Gamma-ratio identities, closed forms, classification."""

import math

import numpy as np
import pytest

from cylspec.errors import PoleError, ThresholdError, ValidationError
from cylspec.symbol import (
    CylinderParams,
    ModeIndex,
    constant_A,
    hardy_constant,
    kernel_K0,
    mode_constants,
    solve_p1,
    stability_classify,
    theta,
    theta_derivative,
    theta_shifted,
)

# Frozen from a 40-digit Gamma-ratio evaluation.
HARDY_TABLE = [
    ((3, 0.5), 0.6366197723675813),  # = 2/pi
    ((4, 0.5), 1.0942198076132383),
    ((4, 0.75), 1.0860543196772348),
    ((5, 0.9), 2.121090139773654),
    ((2, 0.25), 0.5179298952258389),
    ((6, 0.1), 1.1570322577162021),
]

P35 = CylinderParams(n=3, gamma=0.5)


@pytest.mark.parametrize("args, want", HARDY_TABLE)
def test_hardy_constant_reference(args, want):
    assert abs(hardy_constant(*args) - want) <= 1e-13 * want


def test_hardy_constant_small_order_limit():
    assert abs(hardy_constant(3, 1e-6) - 1.0) < 1e-4


def test_symbol_at_zero_is_hardy_constant():
    for (n, g), want in HARDY_TABLE:
        params = CylinderParams(n=n, gamma=g)
        assert abs(complex(theta(params, 0, 0.0)).real - want) <= 1e-12 * want


def test_symbol_closed_form_n3_half():
    # For n=3, gamma=1/2 the mode-0 symbol collapses to xi coth(pi xi / 2).
    xi = np.linspace(0.1, 30.0, 113)
    got = theta(P35, 0, xi.astype(complex))
    want = xi / np.tanh(np.pi * xi / 2.0)
    assert np.max(np.abs(got - want)) <= 1e-12 * np.max(want)
    # Imaginary axis: sigma cot(pi sigma / 2), between the axis zeros.
    sig = np.array([0.3, 0.7, 1.4, 2.5, 3.3])
    got_im = theta(P35, 0, 1j * sig)
    want_im = sig / np.tan(np.pi * sig / 2.0)
    assert np.max(np.abs(got_im - want_im)) <= 1e-12
    assert np.max(np.abs(got_im.imag)) == 0.0


def test_symbol_reference_point_mode2():
    params = CylinderParams(n=4, gamma=0.75)
    want = 4.049821239755952 + 1.7938535148302874j
    got = complex(theta(params, 2, 1 + 2j))
    assert abs(got - want) <= 1e-12 * abs(want)


def test_symbol_mode1_value_at_zero():
    # Theta_1(0) for (3, 1/2) equals pi/2: the next Hardy-type constant.
    assert abs(complex(theta(P35, 1, 0.0)).real - math.pi / 2) < 1e-13


def test_symbol_symmetries():
    rng = np.random.default_rng(20260817)
    for _ in range(100):
        z = complex(rng.uniform(-8, 8), rng.uniform(-0.9, 0.9))
        v = complex(theta(P35, 0, z))
        assert theta(P35, 0, -z) == v  # evenness is exact by construction
        assert abs(complex(theta(P35, 0, z.conjugate())) - v.conjugate()) == 0.0
    # Real on the real axis, exactly.
    assert complex(theta(P35, 0, 2.7)).imag == 0.0


def test_symbol_axis_zeros_and_poles():
    # Denominator Gamma poles are zeros of the symbol: sigma = 2 B0 + 2k.
    assert complex(theta(P35, 0, 1j)) == 0.0
    assert complex(theta(P35, 0, 3j)) == 0.0
    # Numerator Gamma poles are symbol poles: sigma = 2 A0 + 2k.
    with pytest.raises(PoleError):
        theta(P35, 0, 2j)


def test_symbol_derivative_matches_finite_difference():
    rng = np.random.default_rng(5)
    h = 1e-6
    for _ in range(25):
        z = complex(rng.uniform(-4, 4), rng.uniform(-0.8, 0.8))
        fd = (theta(P35, 0, z + h) - theta(P35, 0, z - h)) / (2 * h)
        assert abs(theta_derivative(P35, 0, z) - fd) < 5e-8 * max(1.0, abs(fd))


def test_shifted_symbol_reduces_to_plain_at_critical():
    rng = np.random.default_rng(31)
    params = CylinderParams(n=4, gamma=0.75)  # p defaults to critical
    assert params.is_critical and abs(params.q0) < 1e-14
    for _ in range(20):
        z = complex(rng.uniform(-5, 5), rng.uniform(-0.5, 0.5))
        assert abs(theta_shifted(params, 0, z) - theta(params, 0, z)) <= 1e-12 * abs(
            theta(params, 0, z)
        )


def test_constant_A_reference():
    params = CylinderParams(n=3, gamma=0.5, p=1.75)
    # Frozen closed-form value; happens to be 1/sqrt(3).
    assert abs(constant_A(params) - 0.5773502691896258) < 1e-13
    # At the critical exponent the constant collapses to Lambda.
    crit = CylinderParams(n=3, gamma=0.5)
    assert abs(constant_A(crit) - crit.lam) < 1e-13


def test_q0_sign_and_criticality():
    assert CylinderParams(n=3, gamma=0.5, p=1.75).q0 > 0.0
    assert abs(CylinderParams(n=3, gamma=0.5, p=2.0).q0) < 1e-14


def test_stability_classification():
    assert stability_classify(CylinderParams(n=3, gamma=0.5, p=1.55)) == "stable"
    assert stability_classify(CylinderParams(n=3, gamma=0.5, p=1.9)) == "unstable"
    with pytest.raises(ThresholdError):
        stability_classify(CylinderParams(n=3, gamma=0.5, p=1.6052578083751973))


P1_TABLE = [
    ((3, 0.5), 1.6052578083751973),
    ((4, 0.75), 1.7211452270158997),
]


@pytest.mark.parametrize("args, want", P1_TABLE)
def test_solve_p1_reference(args, want):
    n, g = args
    p1 = solve_p1(n, g)
    assert abs(p1 - want) < 1e-12
    assert n / (n - 2 * g) < p1 < (n + 2 * g) / (n - 2 * g)
    params = CylinderParams(n=n, gamma=g, p=p1)
    assert abs(p1 * constant_A(params) - params.lam) <= 1e-10


def test_kernel_closed_form_n3_critical():
    # (3, 1/2) at the critical exponent: K0(t) = 1 / (4 sinh^2 t).
    t = np.linspace(0.05, 6.0, 41)
    got = kernel_K0(P35, t)
    want = 1.0 / (4.0 * np.sinh(t) ** 2)
    assert np.max(np.abs(got / want - 1.0)) < 1e-12
    # Evenness at critical exponent.
    assert np.allclose(kernel_K0(P35, -t), got, rtol=1e-13)


def test_kernel_reference_values():
    crit475 = CylinderParams(n=4, gamma=0.75)
    assert abs(kernel_K0(crit475, 0.7) - 0.28914532415356416) < 1e-12
    sub = CylinderParams(n=3, gamma=0.5, p=1.8)
    assert abs(kernel_K0(sub, -1.3) - 0.11995400008051963) < 1e-12


def test_kernel_tail_rates_subcritical():
    # Log-slopes approach (n + 2g)/2 +- q0 on the two sides.
    params = CylinderParams(n=3, gamma=0.5, p=1.8)
    rate_plus = (params.n + 2 * params.gamma) / 2.0 + params.q0
    rate_minus = (params.n + 2 * params.gamma) / 2.0 - params.q0
    t = 14.0
    slope_p = -math.log(kernel_K0(params, t + 1.0) / kernel_K0(params, t))
    slope_m = -math.log(kernel_K0(params, -(t + 1.0)) / kernel_K0(params, -t))
    assert abs(slope_p - rate_plus) < 1e-6
    assert abs(slope_m - rate_minus) < 1e-6


def test_kernel_rejects_origin():
    from cylspec.errors import DomainError

    with pytest.raises(DomainError):
        kernel_K0(P35, 0.0)


def test_mode_constants_and_multiplicities():
    a0, b0 = mode_constants(P35, 0)
    assert (a0, b0) == (1.0, 0.5)
    a1, b1 = mode_constants(P35, 1)
    assert abs(a1 - 1.5) < 1e-15 and abs(b1 - 1.0) < 1e-15
    rng = np.random.default_rng(13)
    for _ in range(30):
        n = int(rng.integers(2, 8))
        g = float(rng.uniform(0.05, 0.95))
        if n - 2 * g <= 0:
            continue
        ell = int(rng.integers(0, 6))
        pr = CylinderParams(n=n, gamma=g)
        a, b = mode_constants(pr, ell)
        assert abs((a - b) - g) < 1e-14
        # Integer eigenvalue shortcut: the mode root is ell + (n-2)/2.
        assert abs((a + b - 1.0) - (ell + (n - 2) / 2.0)) < 1e-12
    assert [ModeIndex.of(3, ell).multiplicity for ell in range(4)] == [1, 3, 5, 7]
    assert [ModeIndex.of(4, ell).multiplicity for ell in range(4)] == [1, 4, 9, 16]
    assert [ModeIndex.of(2, ell).multiplicity for ell in range(3)] == [1, 2, 2]


def test_parameter_validation():
    with pytest.raises(ValidationError):
        CylinderParams(n=1, gamma=0.5)
    with pytest.raises(ValidationError):
        CylinderParams(n=3, gamma=1.5)
    with pytest.raises(ValidationError):
        CylinderParams(n=2, gamma=0.5, p=5.0)  # above critical
    with pytest.raises(ValidationError):
        CylinderParams(n=3, gamma=0.5, p=1.2)  # below lower endpoint
    with pytest.raises(ValidationError):
        CylinderParams(n=3, gamma=0.5, kappa=-0.1)
    with pytest.raises(ValidationError):
        ModeIndex.of(3, -1)
