import mpmath as mp
import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from scipy.integrate import simpson

from hypwave.errors import PreconditionError
from hypwave.quadrature import (FILON, GAUSS_KRONROD, IBP_BOUND, OscillatorySpec, ibp_bound, log_weight,
                                osc_integral, scaled_phase_kernel, smooth_cutoff)


def gaussian_oracle(a, b):
    """int_0^inf exp(-lam^2 + i(a lam + b lam^2)) d lam via the complementary error function."""
    p, q = mp.mpc(1, -b), mp.mpc(0, a)
    return complex(0.5 * mp.sqrt(mp.pi / p) * mp.exp(q ** 2 / (4 * p)) * mp.erfc(-q / (2 * mp.sqrt(p))))


def gaussian_spec(a, b):
    return OscillatorySpec(lambda l: np.exp(-l * l), a=a, b=b, lo=0.0, tail_mass=lambda x: np.exp(-x * x))


@settings(max_examples=40, deadline=None)
@given(st.floats(-50, 50), st.floats(-40, 40))
def test_gaussian_amplitude_against_erfc(a, b):
    res = osc_integral(gaussian_spec(a, b), 1e-11)
    assert abs(res.value - gaussian_oracle(a, b)) < 1e-10


@settings(max_examples=25, deadline=None)
@given(st.floats(0.1, 40))
def test_inverse_sqrt_singularity(a):
    spec = OscillatorySpec(lambda l: l ** -0.5 * np.exp(-l), a=a, lo=0.0, singular_lo=True,
                           tail_mass=lambda x: np.exp(-x))
    ref = complex(mp.sqrt(mp.pi) * (1 - 1j * a) ** -0.5)
    assert abs(osc_integral(spec, 1e-10).value - ref) < 1e-9


def test_method_tags():
    assert osc_integral(gaussian_spec(3.0, 0.0)).method == GAUSS_KRONROD
    assert osc_integral(gaussian_spec(40.0, 30.0)).method == FILON


def test_constant_phase_factor():
    base = osc_integral(gaussian_spec(2.0, 1.0)).value
    shifted = osc_integral(OscillatorySpec(lambda l: np.exp(-l * l), a=2.0, b=1.0, c=0.7, lo=0.0,
                                           tail_mass=lambda x: np.exp(-x * x))).value
    assert shifted == pytest.approx(base * np.exp(0.7j), abs=1e-12)


def test_log_weight_band_against_dense_simpson():
    res = osc_integral(OscillatorySpec(log_weight, a=2.75, b=0.125, c=0.125, lo=32, hi=1024), 1e-10)
    assert res.abs_error_estimate < 1e-9
    lam = np.linspace(32, 64, 400001)
    part = osc_integral(OscillatorySpec(log_weight, a=2.75, b=0.125, c=0.125, lo=32, hi=64), 1e-12).value
    vals = log_weight(lam) * np.exp(1j * (0.125 * (lam * lam + 1) + 2.75 * lam))
    assert abs(part - simpson(vals, x=lam)) < 1e-10


def test_smooth_cutoff_shape():
    x = np.array([0.0, 1.0, 1.5, 2.0, 3.0])
    v = smooth_cutoff(x)
    assert v[0] == v[1] == 1.0 and v[3] == v[4] == 0.0
    assert v[2] == pytest.approx(0.5)


def test_ibp_certificate_dominates_direct_value():
    spec = OscillatorySpec(log_weight, a=0.5, b=0.3, c=0.3, lo=200.0, hi=5000.0)
    cert = ibp_bound(spec)
    assert cert.method == IBP_BOUND
    assert abs(osc_integral(spec, 1e-11).value) <= cert.bound


def test_ibp_preconditions():
    with pytest.raises(PreconditionError):
        ibp_bound(OscillatorySpec(log_weight, a=1.0, b=0.0, lo=0.5, hi=10))
    with pytest.raises(PreconditionError):
        ibp_bound(OscillatorySpec(log_weight, a=100.0, b=0.1, lo=2.0, hi=10))
    with pytest.raises(PreconditionError):
        ibp_bound(OscillatorySpec(log_weight, a=0.0, b=0.0, lo=2.0, hi=10))


def test_spec_validation():
    with pytest.raises(ValueError):
        OscillatorySpec(log_weight, lo=-1.0)
    with pytest.raises(ValueError):
        OscillatorySpec(log_weight, lo=2.0, hi=1.0)


def test_scaled_kernel_same_point_is_real_and_grows():
    # equal points: int lam^{-1/2} mu(lam/N) ~ 2 sqrt(N) times a cutoff constant
    v16 = scaled_phase_kernel(1.0, 1.0, 0.0, 0.0, 1.0, 16)
    v64 = scaled_phase_kernel(1.0, 1.0, 0.0, 0.0, 1.0, 64)
    assert abs(v16.imag) < 1e-12
    assert v64.real / v16.real == pytest.approx(2.0, rel=1e-9)
    with pytest.raises(ValueError):
        scaled_phase_kernel(1.0, 1.2, 0.0, 0.1, 1.0, 0.5)
