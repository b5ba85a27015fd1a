import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from hypwave import propagator as pr
from hypwave.errors import DomainError, OutOfRangeError, PreconditionError
from hypwave.geometry import Space, parabolic, vertical_line
from hypwave.profiles import SpectralProfile

H3 = Space.h3()
R3 = Space.euclidean(3)
GAUSS = SpectralProfile.from_function(lambda l: np.exp(-l ** 2 / 2), 0, 14, 48)
BAND = SpectralProfile.from_function(lambda l: np.exp(-(l - 3) ** 2), 0, 12, 48)


def h3_gaussian_exact(s, t):
    """S_t for f_hat = exp(-lam^2/2) on H3, from int lam sin(lam s) e^{-a lam^2} = sqrt(pi) s e^{-s^2/4a} / 4a^{3/2}."""
    a = 0.5 - 1j * t
    return (2 / np.pi) * np.exp(1j * t) / np.sinh(s) * np.sqrt(np.pi) * s / (4 * a ** 1.5) * np.exp(-s ** 2 / (4 * a))


@settings(max_examples=30, deadline=None)
@given(st.floats(0.05, 5.0), st.floats(-2.0, 2.0))
def test_h3_gaussian_against_closed_form(s, t):
    assert abs(pr.schrodinger_S(H3, GAUSS, s, t) - h3_gaussian_exact(s, t)) < 1e-12


@settings(max_examples=30, deadline=None)
@given(st.floats(0.0, 5.0), st.floats(-2.0, 2.0))
def test_r3_gaussian_spreads_like_heat_kernel(s, t):
    u0 = pr.schrodinger_Rn(3, GAUSS, 0.0, 0.0)
    exact = u0 * (1 - 2j * t) ** -1.5 * np.exp(-s ** 2 / (2 * (1 - 2j * t)))
    assert abs(pr.schrodinger_Rn(3, GAUSS, s, t) - exact) < 1e-12


def test_anker_route_agrees_and_is_h3_only():
    s = np.array([0.4, 1.3, 2.2])
    t = np.array([-0.7, 0.1, 0.9])
    assert np.max(np.abs(pr.schrodinger_S(H3, BAND, s, t, method=pr.ANKER)
                         - pr.schrodinger_S(H3, BAND, s, t))) < 1e-9
    with pytest.raises(DomainError):
        pr.schrodinger_S(Space.damek_ricci(2, 1), BAND, 1.0, 0.0, method=pr.ANKER)
    with pytest.raises(DomainError):
        pr.schrodinger_S(H3, BAND, 0.0, 0.0, method=pr.ANKER)
    with pytest.raises(DomainError):
        pr.schrodinger_S(H3, BAND, 1.0, 0.0, method="fft")


def test_evolution_preserves_plancherel_norm_and_majorant():
    moved = pr.evolve_spectral(H3, BAND, 0.8)
    assert np.allclose(np.abs(moved.values), np.abs(BAND.values))
    bound = pr.pointwise_majorant(H3, BAND)
    s, t = np.meshgrid(np.linspace(0, 4, 21), np.linspace(-2, 2, 21))
    assert np.all(np.abs(pr.schrodinger_S(H3, BAND, s, t)) <= bound * (1 + 1e-12))


@pytest.mark.parametrize("space", [H3, R3, Space.damek_ricci(2, 1)], ids=lambda s: s.label)
@pytest.mark.parametrize("curve", [vertical_line(), parabolic(1.0)], ids=["vertical", "parabolic"])
def test_field_matches_pointwise(space, curve):
    s = np.linspace(1, 2, 7)
    t = np.linspace(-0.2, 0.2, 9)
    field = pr.evaluate_field(space, BAND, curve, s, t)
    S, T = np.meshgrid(s, t, indexing="ij")
    assert np.max(np.abs(field - pr.schrodinger_S(space, BAND, curve(S, T), T))) < 1e-11


def test_request_validation():
    s = np.linspace(1, 2, 5)
    with pytest.raises(PreconditionError):
        pr.PropagationRequest(H3, BAND, parabolic(1.0), s, [0.0], 0.3)
    with pytest.raises(DomainError):
        pr.PropagationRequest(H3, BAND, parabolic(1.0), s, [0.25], 0.2)
    with pytest.raises(DomainError):
        pr.PropagationRequest(H3, BAND, vertical_line(), [0.0, 1.0], [0.0], 1.0)


def test_refined_sup_dominates_grid_and_true_maximum():
    s = np.linspace(1, 2, 5)
    t = pr.chebyshev_times(0.2, 129)
    sl = pr.propagate_along_curve(pr.PropagationRequest(H3, BAND, parabolic(1.0), s, t, 0.2))
    assert np.all(sl.refinement_delta >= 0)
    dense = np.linspace(-0.2, 0.2, 4001)
    truth = np.abs(pr.evaluate_field(H3, BAND, parabolic(1.0), s, dense)).max(axis=1)
    assert np.all(sl.sup_t >= truth * (1 - 1e-10))
    assert len(list(sl.rows())) == s.size * t.size


def test_golden_refine_on_parabola():
    best, arg = pr._golden_refine(lambda x: -(x - 0.3) ** 2, np.array([0.0]), np.array([1.0]))
    assert arg[0] == pytest.approx(0.3, abs=1e-7) and best[0] == pytest.approx(0.0, abs=1e-14)


def test_h3_branch_split_sums_to_linearized():
    s = np.linspace(1, 2, 6)
    lin = pr.linearized_T(H3, BAND, parabolic(1.0), s, lambda x: 0.1 * (x - 1.5))
    T1, T2, rest = pr.term_decomposition_h3(BAND, parabolic(1.0), s, lambda x: 0.1 * (x - 1.5))
    assert np.max(np.abs(T1 + T2 + rest - lin)) < 1e-9
    assert np.all(rest == 0)


def test_bessel_split_is_exact_and_bounded():
    space = Space.damek_ricci(2, 1)
    small = SpectralProfile.from_function(lambda l: np.exp(-l ** 2), 0, 8, 32)
    s = np.linspace(0.2, 0.6, 5)
    split = pr.bessel_decomposition(space, small, vertical_line(), s, 0.05, M=1)
    full = pr.linearized_T(space, small, vertical_line(), s, 0.05)
    assert np.max(np.abs(split.leading + split.remainder - full)) < 1e-14
    assert np.all(np.abs(split.remainder) <= split.bound)
    with pytest.raises(OutOfRangeError):
        pr.bessel_decomposition(space, small, vertical_line(), [2.0], 0.0)


@pytest.mark.parametrize("eta", [2.0, 5.0, 0.5])
def test_parabolic_rescaling_identity(eta):
    assert pr.parabolic_rescale_check(3, GAUSS, eta, 1.0, 0.1) < 1e-12
    with pytest.raises(DomainError):
        pr.parabolic_rescale_check(3, GAUSS, -1.0, 1.0, 0.1)


def test_littlewood_paley_partition():
    lam = np.linspace(0, 4, 401)
    low, high = pr.lp_partition(lam)
    assert np.allclose(low + high, 1.0)
    assert np.all(low[lam <= 1] == 1.0) and np.all(low[lam >= 2] == 0.0)
    assert np.all(np.diff(low) <= 1e-15)
    lo_f, hi_f = pr.littlewood_paley_split(BAND)
    assert np.allclose(lo_f.values + hi_f.values, BAND.values)
    assert lo_f(1.5) + hi_f(1.5) == pytest.approx(BAND(1.5))
