import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from scipy.integrate import quad
from scipy.special import gamma

from hypwave import transforms as tr
from hypwave.errors import DomainError, SupportError, TailError
from hypwave.geometry import Space
from hypwave.profiles import COMPACT, RadialProfile, SpectralProfile, gauss_grid

H3 = Space.h3()
DR21 = Space.damek_ricci(2, 1)


def gaussian(space, a=1.0):
    return RadialProfile.from_function(lambda s: np.exp(-a * s ** 2), space, 10.0, 40)


def test_h3_gaussian_transform_closed_form():
    # int_0^inf e^{-s^2} sin(lam s)/(lam sinh s) sinh^2 s ds, by scipy quad
    fhat = tr.sft_forward(H3, gaussian(H3), lam_nodes=np.array([0.5, 2.0]), lam_weights=np.ones(2))
    for lam, val in zip((0.5, 2.0), fhat.values):
        ref = quad(lambda s: np.exp(-s * s) * np.sin(lam * s) * np.sinh(s) / lam, 0, 12, epsabs=1e-14)[0]
        assert val.real == pytest.approx(ref, abs=1e-13)


@pytest.mark.parametrize("n", [2, 3, 5])
def test_euclidean_inversion_constant(n):
    assert tr.inversion_constant(Space.euclidean(n)) == pytest.approx(2 ** (2 - n) / gamma(n / 2) ** 2,
                                                                     rel=1e-8)


def test_h3_inversion_constant():
    assert tr.inversion_constant(H3) == pytest.approx(2 / np.pi, rel=1e-9)


@settings(max_examples=8, deadline=None)
@given(st.floats(0.8, 2.5), st.sampled_from(["h3", "dr:2,1", "rn:3"]))
def test_roundtrip_and_plancherel(a, label):
    space = Space.parse(label)
    f = gaussian(space, a)
    fhat = tr.sft_forward(space, f, lam_max=20, panels=40)
    back = tr.sft_inverse(space, fhat, s_nodes=f.s_grid)
    assert np.max(np.abs(back.values - f.values)) < 1e-8
    assert tr.plancherel_norm(space, fhat) == pytest.approx(tr.l2_norm(f, space), rel=1e-9)


def test_slow_tail_is_refused():
    f = RadialProfile.from_function(lambda s: 1.0 / (1 + s ** 2), H3, 10.0, 40)
    with pytest.raises(TailError):
        tr.sft_forward(H3, f)


def test_abel_matches_direct_integral():
    g = tr.abel(H3, gaussian(H3))
    for x, val in list(zip(g.s_grid, g.values))[::97]:
        ref = 0.5 * quad(lambda s: np.exp(-s * s) * np.sinh(s), x, 12.0, epsabs=1e-15)[0]
        assert val.real == pytest.approx(ref, abs=1e-12)


def test_abel_inverse_recovers_profile():
    back = tr.abel_inverse(H3, tr.abel(H3, gaussian(H3)))
    assert np.max(np.abs(back.values - np.exp(-back.s_grid ** 2))) < 1e-8


def test_abel_rn_three_dimensions():
    # full Fourier normalisation: A f(x) = 2 pi int_|x|^inf f(s) s ds = pi e^{-x^2}
    g = tr.abel_rn(3, gaussian(Space.euclidean(3)))
    assert np.max(np.abs(g.values - np.pi * np.exp(-g.s_grid ** 2))) < 1e-10
    one = tr.abel_rn(1, gaussian(Space.euclidean(1)))
    assert np.allclose(one.values, np.exp(-one.s_grid ** 2))


def test_fourier1d_even_pair():
    xi = np.array([0.0, 1.0, 3.0])
    ft = tr.fourier1d_even(lambda x: np.exp(-x ** 2 / 2), xi)
    assert np.allclose(ft, np.sqrt(2 * np.pi) * np.exp(-xi ** 2 / 2), atol=1e-13)
    x = np.array([0.0, 0.7])
    back = tr.fourier1d_even_inverse(lambda k: np.sqrt(2 * np.pi) * np.exp(-k ** 2 / 2), x)
    assert np.allclose(back, np.exp(-x ** 2 / 2), atol=1e-13)


def _band(lo=1.0, hi=3.0):
    return SpectralProfile.from_function(
        lambda l: np.where((l > lo) & (l < hi), np.exp(-1 / np.maximum((l - lo) * (hi - l), 1e-300)), 0),
        0, 4, tail_model=COMPACT)


def test_multiplier_roundtrip_and_support_error():
    m = tr.multiplier_m(DR21, 4, _band())
    assert np.max(np.abs(tr.multiplier_m_inverse(DR21, 4, m).values - _band().values)) < 1e-15
    with pytest.raises(SupportError):
        tr.multiplier_m(H3, 3, SpectralProfile.from_function(lambda l: np.exp(-l ** 2), 0, 4))


def test_multiplier_is_one_on_h3():
    lam = np.linspace(0.1, 5, 7)
    assert np.allclose(tr.multiplier_weight(H3, 3, lam), 1.0, rtol=1e-12)


def test_sobolev_norm_scaling_and_validation():
    g = SpectralProfile.from_function(lambda l: np.exp(-l ** 2), 0, 10, 40)
    e3 = Space.euclidean(3)
    zero = tr.sobolev_norm(e3, g, tr.SobolevSpec(0.0))
    # beta = 0 reduces to the Plancherel integral int lam^2 e^{-2 lam^2} = sqrt(pi/2)/8
    assert zero == pytest.approx(np.sqrt(np.sqrt(np.pi / 2) / 8), rel=1e-12)
    with pytest.raises(DomainError):
        tr.SobolevSpec(-0.5)
    inhom = tr.sobolev_norm(H3, g, tr.SobolevSpec(0.5, homogeneous=False))
    assert inhom > tr.sobolev_norm(H3, g, tr.SobolevSpec(0.5))


def test_pitt_ratio_gaussian_closed_form():
    ratio = tr.pitt_ratio(lambda x: np.exp(-x ** 2 / 2), (0.0, 12.0))
    assert ratio == pytest.approx(np.sqrt(2 * np.pi * gamma(0.25) / gamma(0.75)), rel=1e-10)
    assert np.isnan(tr.pitt_ratio(lambda x: 0 * x, (1.0, 2.0)))


@pytest.mark.parametrize("beta", [0.3, 0.5, 0.7])
def test_riesz_multiplier_identity(beta):
    rep = tr.riesz_identity_check(lambda x: np.exp(-x ** 2 / 2), beta)
    assert rep.residual < 1e-10
    assert rep.C_beta == pytest.approx(rep.C_beta_closed_form, rel=1e-10)


def test_riesz_potential_against_quad():
    beta = 0.5
    h = lambda y: np.exp(-np.asarray(y) ** 2)
    x = np.array([0.0, 3.0])
    ref = [quad(lambda y: h(y) * abs(xx - y) ** (beta - 1), -12, 12, points=[xx], limit=200)[0] for xx in x]
    assert np.allclose(tr.riesz_potential(h, beta, x), ref, rtol=1e-8)
