import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from scipy.integrate import quad

from hypwave import counterexample as cx
from hypwave.errors import CertificateError, DomainError
from hypwave.quadrature import log_weight

DEFAULT = cx.CounterexampleConfig()


@pytest.fixture(scope="module")
def data():
    return cx.build_sequences(DEFAULT)


def test_default_sequences_are_frozen(data):
    assert np.allclose(data.s_seq, [1.25, 1.5, 1.0])
    assert np.allclose(data.t_seq, [0.25, 0.125, 0.0625])
    assert list(data.r_seq) == [3.0, 32.0, 2048.0]
    assert list(data.R_seq) == [5.0, 1024.0, 2048.0 ** 2]
    assert len(data.certificates) == 3 and all(c.ok for c in data.certificates)


def test_dyadic_enumeration():
    assert [cx.dyadic_fraction(j) for j in range(1, 8)] == [0.5, 0.75, 0.25, 0.875, 0.625, 0.375, 0.125]
    with pytest.raises(DomainError):
        cx.dyadic_fraction(0)


@settings(max_examples=50, deadline=None)
@given(st.integers(1, 4000))
def test_dense_radii_stay_inside(j):
    r = cx.dense_radius(DEFAULT, j)
    assert DEFAULT.c4 < r < DEFAULT.c5


def test_config_validation():
    with pytest.raises(DomainError):
        cx.CounterexampleConfig(c1=2.0)
    with pytest.raises(DomainError):
        cx.CounterexampleConfig(c3=1.5)
    with pytest.raises(DomainError):
        cx.CounterexampleConfig(t_seq=[0.1, 0.2, 0.05])
    assert DEFAULT.c7 == pytest.approx(4000.0)
    assert not DEFAULT.containment_holds()
    assert cx.CounterexampleConfig(c3=0.01).containment_holds()


def test_custom_times_and_failed_certificate():
    cfg = cx.CounterexampleConfig(t_seq=[0.4, 0.39, 0.1], K=3)
    d = cx.build_sequences(cfg)
    assert np.allclose(d.t_seq, [0.4, 0.39, 0.1]) and all(c.ok for c in d.certificates)
    bad = cx.Certificate(2, 1, 1e-4, 4e-3, 10.0, 3.0)
    assert not bad.ok


def test_profile_lives_on_bands(data):
    lam = np.array([2.0, 4.0, 6.0, 100.0, 1500.0, 5000.0])
    vals = cx.fhat_counter(data, lam)
    assert vals[0] == 0 and vals[2] == 0 and vals[4] == 0
    expected = log_weight(4.0) * np.sin(4.0 * 1.25) / (4.0 * np.sinh(1.25)) * np.exp(-0.25j * 17.0)
    assert vals[1] == pytest.approx(expected, rel=1e-13)


@pytest.mark.parametrize("r,R", [(3.0, 5.0), (32.0, 1024.0), (2048.0, 2048.0 ** 2)])
def test_closed_forms_against_quad(r, R):
    diag = quad(lambda u: u ** -0.75, np.log(r), np.log(R))[0]
    env = quad(lambda u: u ** -1.5, np.log(r), np.log(R))[0]
    assert cx.diagonal_value(r, R) == pytest.approx(diag, rel=1e-12)
    assert cx.band_envelope(r, R) == pytest.approx(env, rel=1e-12)


def test_hnorm_first_band_against_quad(data):
    s = data.s_seq[0]
    f = lambda x: np.sqrt(x * x + 1) * abs(cx.fhat_counter(data, x)) ** 2 * x * x
    ref = quad(f, 3.0, 5.0, epsabs=1e-14, epsrel=1e-13)[0]
    assert cx.h_half_norm_partial(data, 1) == pytest.approx(ref, rel=1e-10)
    with pytest.raises(DomainError):
        cx.h_half_norm_partial(data, 9)


def test_blowup_report_frozen(data):
    rep = cx.blowup_report(data)
    assert rep.ok and rep.increasing
    assert [round(r.lower_bound, 6) for r in rep.rows] == [0.101587, 0.127423, 0.38564]
    assert min(r.ratio for r in rep.rows) == pytest.approx(0.07853, abs=1e-5)


def test_single_band_matches_direct_branches():
    d = cx.build_sequences(cx.CounterexampleConfig(K=1))
    ev = cx.partial_solution_u_m(d, 1, d.s_seq[0], d.t_seq[0])
    assert ev.terms["u2"] * 4 * np.sinh(d.s_seq[0]) ** 2 == pytest.approx(cx.diagonal_value(3.0, 5.0))
    assert ev.radius < 1e-8
    assert sum(b.value for b in ev.bands) == pytest.approx(ev.value)


def test_large_bands_use_certificates():
    d4 = cx.build_sequences(cx.CounterexampleConfig(K=4))
    assert d4.R_seq[-1] > cx.DIRECT_LIMIT
    ev = cx.partial_solution_u_m(d4, 4, d4.s_seq[0], d4.t_seq[0])
    methods = {b.method for b in ev.bands if b.j == 4}
    assert methods == {"IBPBound"}
    assert ev.radius > 0


def test_certificate_failure_is_reported():
    d = cx.build_sequences(cx.CounterexampleConfig(K=4))
    # just off band 4's own time the quadratic phase is too weak to dominate the linear part
    with pytest.raises(CertificateError):
        cx.partial_solution_u_m(d, 4, 0.9, d.t_seq[3] + 1e-9)


def test_partial_solution_validation(data):
    with pytest.raises(DomainError):
        cx.partial_solution_u_m(data, 5, 1.0, 0.1)
    with pytest.raises(DomainError):
        cx.partial_solution_u_m(data, 1, 1.0, 0.0)


def test_selector_times_decrease_and_points_approach(data):
    sel = cx.wide_approach_selector(data, 1.2, depth=4)
    assert len(sel) == 4 and not sel.exhausted
    times = [DEFAULT.time(j) for j in sel.time_indices]
    assert all(b < a for a, b in zip(times, times[1:]))
    gaps = [abs(1.2 - cx.dense_radius(DEFAULT, p)) for p in sel.point_indices]
    assert all(0 < g < np.sqrt(t) for g, t in zip(gaps, times))
    with pytest.raises(DomainError):
        cx.wide_approach_selector(data, 3.0)
