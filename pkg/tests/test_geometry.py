from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from hypwave.errors import DomainError, PreconditionError, UsageError
from hypwave.geometry import (Annulus, Space, admissible_T, check_curve_conditions, curve_growth_bounds,
                              density, log_density_derivative, parabolic, parse_curve, time_bound,
                              vertical_line)


def test_h3_parameters():
    h = Space.h3()
    assert (h.m_v, h.m_z, h.n, h.Q) == (0, 2, 3, Fraction(2))
    assert h.shift == 1.0


@pytest.mark.parametrize("text,label,n,Q", [("h3", "h3", 3, 2), ("dr:2,1", "dr:2,1", 4, 2),
                                            ("dr:4,3", "dr:4,3", 8, 5), ("rn:3", "rn:3", 3, 0)])
def test_parse_roundtrip(text, label, n, Q):
    sp = Space.parse(text)
    assert sp.label == label and sp.n == n and sp.Q == Q
    assert Space.parse(sp.label) == sp


@pytest.mark.parametrize("bad", ["dr:1,1", "dr:2,0", "rn:0", "hx", "dr:2"])
def test_invalid_spaces(bad):
    with pytest.raises((DomainError, UsageError)):
        Space.parse(bad)


def test_h3_density_is_sinh_squared():
    s = np.linspace(0, 5, 11)
    assert np.allclose(density(Space.h3(), s), 4 * np.sinh(s / 2) ** 2 * np.cosh(s / 2) ** 2)
    assert np.allclose(density(Space.h3(), s), np.sinh(s) ** 2, rtol=1e-14)


@settings(max_examples=40, deadline=None)
@given(st.sampled_from([(0, 2), (2, 1), (4, 3), (2, 3)]), st.floats(0.05, 6.0))
def test_log_density_derivative_matches_finite_difference(mv_mz, s):
    sp = Space.damek_ricci(*mv_mz)
    h = 1e-5 * max(s, 1.0)
    fd = (np.log(density(sp, s + h)) - np.log(density(sp, s - h))) / (2 * h)
    assert abs(fd - log_density_derivative(sp, s)) <= 1e-6 * max(1.0, abs(fd))


def test_large_radius_density_growth():
    sp = Space.damek_ricci(2, 1)
    s = np.array([20.0, 21.0])
    rate = np.log(density(sp, s[1]) / density(sp, s[0]))
    assert rate == pytest.approx(float(sp.Q), rel=1e-6)


def test_annulus_validation():
    assert Annulus.parse("1,2") == Annulus(1.0, 2.0)
    with pytest.raises(DomainError):
        Annulus(2.0, 1.0)
    with pytest.raises(UsageError):
        Annulus.parse("1;2")


def test_admissible_T_parabolic():
    # (C2 r1 / 2 C1)^(1/alpha) with alpha = 1/2
    assert admissible_T(1.0, 1.0, 1.0, 0.5) == pytest.approx(0.25)
    assert time_bound(parabolic(1.0), 1.0) == pytest.approx(0.25)
    assert time_bound(vertical_line(), 1.0) == np.inf


def test_curve_constants_on_grid():
    rep = check_curve_conditions(parabolic(1.0), np.linspace(1, 2, 21), np.linspace(-0.2, 0.2, 41))
    assert rep.ok
    assert rep.C1_est == pytest.approx(1.0, rel=1e-12)
    assert rep.C2_est == pytest.approx(1.0) and rep.C3_est == pytest.approx(1.0)


def test_understated_constant_is_reported():
    curve = parabolic(2.0)
    curve.C1 = 1.0
    rep = check_curve_conditions(curve, np.linspace(1, 2, 5), np.linspace(-0.2, 0.2, 11))
    assert not rep.ok and "C1" in rep.violations[0]


def test_growth_bounds_and_precondition():
    a = Annulus(1.0, 2.0)
    rep = curve_growth_bounds(parabolic(1.0), a, 0.2, np.linspace(-0.2, 0.2, 21), np.linspace(1, 2, 11))
    assert rep.ok and rep.lower == 0.5 and rep.upper == 1.5
    with pytest.raises(PreconditionError):
        curve_growth_bounds(parabolic(1.0), a, 0.3, [0.0], [1.0])


def test_custom_curve_table(tmp_path):
    s = np.linspace(0.5, 2.5, 5)
    t = np.linspace(-0.3, 0.3, 7)
    rows = [(si, ti, si + 0.5 * abs(ti)) for si in s for ti in t]
    path = tmp_path / "curve.txt"
    np.savetxt(path, rows)
    curve = parse_curve(f"custom:{path}")
    assert curve(1.0, 0.3) == pytest.approx(1.15)
    np.savetxt(path, rows[:-1])
    with pytest.raises(UsageError):
        parse_curve(f"custom:{path}")
