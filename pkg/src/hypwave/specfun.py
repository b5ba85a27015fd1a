"""Special functions: normalized Bessel functions, the c-function and spherical functions.

Spherical functions are available through independent routes:

* the closed form on three dimensional real hyperbolic space,
* a radial ODE integrated from the origin (the oracle for every space),
* a truncated Bessel series valid on a ball of radius ``R0``,
* the two-branch exponential split on H3.
"""
from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from typing import Optional

import numpy as np
from scipy import special
from scipy.integrate import solve_ivp

from .errors import ConvergenceError, DomainError, OutOfRangeError, PoleError
from .geometry import Space, density, log_density_curvature, log_density_derivative
from .profiles import RadialProfile

CLOSED_FORM_H3 = "ClosedFormH3"
BESSEL_SERIES = "BesselSeries"
ODE_ORACLE = "OdeOracle"
ANKER_H3 = "AnkerH3"

DEFAULT_R0 = 1.5


def bessel_j_norm(mu, z):
    """Gamma(mu+1) (2/z)^mu J_mu(z), the Bessel function scaled to equal 1 at z = 0."""
    mu = np.asarray(mu, float)
    if np.any(mu < 0):
        raise DomainError("order must be nonnegative")
    z = np.abs(np.asarray(z, float))
    mu_b, z_b = np.broadcast_arrays(mu, z)
    out = np.empty(z_b.shape)
    small = z_b < 1e-3
    if np.any(small):
        zs, ms = z_b[small], mu_b[small]
        q = -(zs / 2) ** 2
        # three terms of the power series are exact to double precision here
        out[small] = 1 + q / (ms + 1) + q ** 2 / (2 * (ms + 1) * (ms + 2)) \
            + q ** 3 / (6 * (ms + 1) * (ms + 2) * (ms + 3))
    big = ~small
    if np.any(big):
        zb, mb = z_b[big], mu_b[big]
        logscale = special.gammaln(mb + 1) + mb * np.log(2 / zb)
        out[big] = np.exp(logscale) * special.jv(mb, zb)
    return out if out.ndim else float(out)


def _check_dr(space: Space):
    if space.is_euclidean:
        raise DomainError("the c-function is defined for Damek-Ricci spaces only")


def harish_chandra_c(space: Space, lam):
    """Harish-Chandra c-function evaluated with complex log-Gamma."""
    _check_dr(space)
    lam = np.asarray(lam, float)
    if np.any(lam == 0):
        raise PoleError("c-function has a pole at lambda = 0")
    Q = float(space.Q)
    il = 1j * lam
    logc = ((Q - 2 * il) * np.log(2.0)
            + special.loggamma(2 * il)
            - special.loggamma((Q + 2 * il) / 2)
            + special.gammaln(space.n / 2)
            - special.loggamma((space.m_v + 4 * il + 2) / 4))
    out = np.exp(logc)
    return out if out.ndim else complex(out)


def plancherel_density(space: Space, lam):
    """|c(lambda)|^{-2}, or lambda^{n-1} on Euclidean space."""
    lam = np.asarray(lam, float)
    if np.any(lam <= 0):
        raise DomainError("Plancherel density needs lambda > 0")
    if space.is_euclidean:
        out = lam ** (space.n - 1)
    else:
        out = np.abs(harish_chandra_c(space, lam)) ** -2.0
    return out if np.ndim(out) else float(out)


def spectral_weight(space: Space, lam):
    """Plancherel density extended by its limit 0 at lambda = 0."""
    lam = np.asarray(lam, float)
    out = np.zeros(lam.shape)
    pos = lam > 0
    out[pos] = plancherel_density(space, lam[pos])
    return out


def phi_closed_h3(lam, s):
    """sin(lambda s) / (lambda sinh s), continued to s = 0 and lambda = 0."""
    lam = np.asarray(lam, float)
    s = np.asarray(s, float)
    x = lam * s
    s_over_sinh = np.where(s == 0, 1.0, s / np.where(s == 0, 1.0, np.sinh(s)))
    out = np.sinc(x / np.pi) * s_over_sinh
    return out if out.ndim else float(out)


def _series_start(space: Space, energy, s0):
    """Taylor data of the regular solution at s0 (two nontrivial terms)."""
    n = space.n
    kappa = log_density_curvature(space)
    a = -energy / (2 * n)
    b = -a * (2 * kappa + energy) / (4 * (n + 2))
    phi = 1 + a * s0 ** 2 + b * s0 ** 4
    dphi = 2 * a * s0 + 4 * b * s0 ** 3
    return phi, dphi


def phi_ode_table(space: Space, lams, s_nodes, tol: float = 1e-12):
    """Spherical functions for many frequencies at once by integrating the radial ODE.

    Returns an array of shape ``(len(s_nodes), len(lams))``.  The equation
    phi'' + (A'/A) phi' + (lambda^2 + Q^2/4) phi = 0 is singular at the origin,
    so the integration starts at a small radius from the Taylor expansion of
    the regular solution.
    """
    lams = np.atleast_1d(np.asarray(lams, float))
    s_nodes = np.atleast_1d(np.asarray(s_nodes, float))
    if np.any(lams < 0):
        raise DomainError("frequencies must be nonnegative")
    if tol < 1e-14:
        raise ConvergenceError("tolerance below what double precision integration can deliver",
                               {"tol": tol})
    if np.any(s_nodes < 0):
        raise DomainError("radii must be nonnegative")
    energy = lams ** 2 + space.shift
    s0 = min(1e-3, 0.01 / np.sqrt(max(energy.max(), 1.0)))
    out = np.empty((s_nodes.size, lams.size))

    inner = s_nodes <= s0
    if np.any(inner):
        out[inner] = _series_start(space, energy[None, :], s_nodes[inner, None])[0]
    outer = ~inner
    if np.any(outer):
        targets, back = np.unique(s_nodes[outer], return_inverse=True)
        phi0, dphi0 = _series_start(space, energy, s0)
        m = lams.size

        def rhs(s, y):
            phi, dphi = y[:m], y[m:]
            return np.concatenate([dphi, -log_density_derivative(space, s) * dphi - energy * phi])

        sol = solve_ivp(rhs, (s0, targets[-1]), np.concatenate([phi0 * np.ones(m), dphi0]),
                        method="DOP853", t_eval=targets, rtol=tol, atol=tol * 1e-2)
        if sol.status != 0:
            raise ConvergenceError("radial ODE integration failed",
                                   {"message": sol.message, "nfev": sol.nfev})
        out[outer] = sol.y[:m].T[back]
    return out


def phi_ode(space: Space, lam: float, s_max: float, tolerance: float = 1e-12,
            s_grid=None) -> RadialProfile:
    """Spherical function phi_lambda tabulated on [0, s_max] by the ODE route."""
    if s_max <= 0 or tolerance <= 0:
        raise DomainError("s_max and tolerance must be positive")
    if s_grid is None:
        s_grid = np.linspace(0.0, s_max, 601)
    vals = phi_ode_table(space, [lam], s_grid, tolerance)[:, 0]
    return RadialProfile(np.asarray(s_grid, float), vals.astype(complex), space)


@dataclass
class SphericalEval:
    value: complex
    route: str
    error_bound: Optional[float] = None


def _ode_oracle_point(space: Space, lams, s: float):
    return phi_ode_table(space, lams, [s], tol=1e-13)[0]


@lru_cache(maxsize=None)
def series_normalization(space: Space) -> float:
    """Constant c0* fixed by requiring the Bessel series to equal 1 at the origin.

    Calibrated against the ODE oracle at a tiny radius; the residual is the
    quadratic remainder of both expansions.
    """
    s_c = 1e-5
    phi = _ode_oracle_point(space, [0.0], s_c)[0]
    weight = np.sqrt(s_c ** (space.n - 1) / density(space, s_c))
    return float(phi / weight)


def _series_weight(space: Space, s: float) -> float:
    if s == 0:
        return 1.0
    return float(np.sqrt(s ** (space.n - 1) / density(space, s)))


@lru_cache(maxsize=None)
def series_coefficients(space: Space, s: float, M: int) -> tuple:
    """Coefficients a_1(s) .. a_M(s) of the truncated Bessel series at a fixed radius.

    Fitted by least squares against the ODE oracle on collocation frequencies
    with lambda*s spread over [0, 2(M+1)].
    """
    if M == 0 or s == 0:
        return tuple([0.0] * M)
    nu = (space.n - 2) / 2
    x = np.linspace(0.05, 2.0 * (M + 1), 8 * (M + 1))
    lams = x / s
    phi = _ode_oracle_point(space, lams, s)
    target = phi / (series_normalization(space) * _series_weight(space, s)) - bessel_j_norm(nu, x)
    basis = np.stack([bessel_j_norm(nu + l, x) for l in range(1, M + 1)], axis=1)
    scaled, *_ = np.linalg.lstsq(basis, target, rcond=None)
    return tuple(float(b / s ** (2 * l)) for l, b in enumerate(scaled, start=1))


def series_error_bound(space: Space, lam: float, s: float, M: int, C_M: float = 1.0) -> float:
    if s == 0:
        return 0.0
    ls = abs(lam * s)
    decay = 1.0 if ls <= 1 else ls ** (-((space.n - 1) / 2 + M + 1))
    return C_M * s ** (2 * (M + 1)) * decay


def phi_bessel_series(space: Space, lam: float, s: float, M: int = 0, R0: float = DEFAULT_R0,
                      C_M: float = 1.0) -> SphericalEval:
    """Spherical function from the truncated Bessel expansion near the origin."""
    if s < 0:
        raise DomainError("radius must be nonnegative")
    if s > R0:
        raise OutOfRangeError(f"Bessel series is only used for s <= R0 = {R0}")
    if M < 0:
        raise DomainError("truncation order must be nonnegative")
    if s == 0:
        return SphericalEval(1.0 + 0j, BESSEL_SERIES, 0.0)
    nu = (space.n - 2) / 2
    coeffs = (1.0,) + series_coefficients(space, float(s), int(M))
    z = lam * s
    total = sum(a * bessel_j_norm(nu + l, z) * s ** (2 * l) for l, a in enumerate(coeffs))
    value = series_normalization(space) * _series_weight(space, s) * total
    return SphericalEval(complex(value), BESSEL_SERIES, series_error_bound(space, lam, s, M, C_M))


@dataclass
class AnkerDecomposition:
    plus_term: complex
    minus_term: complex
    prefactor: float
    error: complex = 0j

    def reconstruct(self) -> complex:
        return self.prefactor * (self.plus_term + self.minus_term) + self.error


H3 = Space.h3()


def anker_prefactor(s):
    """2^{-m_z/2} A(s)^{-1/2} on H3, that is 1/(2 sinh s)."""
    return 2.0 ** (-H3.m_z / 2) / np.sqrt(density(H3, s))


def phi_anker_h3(lam: float, s: float) -> AnkerDecomposition:
    """Split phi_lambda(s) on H3 into the c(lambda) e^{i lambda s} and c(-lambda) e^{-i lambda s} branches."""
    if lam == 0 or s == 0:
        raise PoleError("the exponential split is singular at lambda = 0 or s = 0")
    if lam < 0 or s < 0:
        raise DomainError("lambda and s must be positive")
    c_plus = harish_chandra_c(H3, lam)
    plus = c_plus * np.exp(1j * lam * s)
    minus = np.conj(c_plus) * np.exp(-1j * lam * s)
    return AnkerDecomposition(complex(plus), complex(minus), float(anker_prefactor(s)), 0j)


def anker_coefficient_bound(mu: int, lam: float, C: float = 1.0, d: float = 1.0) -> float:
    """Bound C mu^d / (1 + |lambda|) on the higher expansion coefficients; 1 for mu = 0."""
    if mu == 0:
        return 1.0
    if mu < 0:
        raise DomainError("index must be nonnegative")
    if lam == 0:
        raise PoleError("coefficient bound needs lambda != 0")
    return C * mu ** d / (1.0 + abs(lam))
