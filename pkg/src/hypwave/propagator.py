"""Schrodinger propagators on Damek-Ricci and Euclidean spaces, evaluated along curves.

The propagator is the spectral multiplier e^{it(lambda^2 + Q^2/4)} followed by
the inverse spherical transform, so every evaluation is a sum over the
quadrature nodes of the spectral profile.  On H3 an independent route splits
the spherical function into its two exponential branches and hands each to
the oscillatory quadrature engine.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np

from .errors import DomainError, OutOfRangeError, PreconditionError, SupportError
from .geometry import PARABOLIC, VERTICAL, CurveFamily, Space, time_bound
from .profiles import COMPACT, SpectralProfile, gauss_grid
from .quadrature import OscillatorySpec, osc_integral
from .specfun import (DEFAULT_R0, bessel_j_norm, series_coefficients, series_error_bound,
                      series_normalization, spectral_weight, _series_weight)
from .transforms import _check_tail, inversion_constant, phi_matrix

DIRECT = "direct"
ANKER = "anker"
CHUNK = 4096
GOLDEN = (np.sqrt(5.0) - 1) / 2


@dataclass
class _Spectral:
    lam: np.ndarray
    coeff: np.ndarray   # C * weight * f_hat * plancherel density
    energy: np.ndarray


def _spectral(space: Space, fhat: SpectralProfile) -> _Spectral:
    if fhat.weights is None:
        raise DomainError("propagation needs a spectral profile with quadrature weights")
    rho = spectral_weight(space, fhat.lambda_grid)
    if fhat.tail_model != COMPACT:
        _check_tail(fhat.lambda_grid, fhat.values, "propagator")
    coeff = inversion_constant(space) * fhat.weights * fhat.values * rho
    return _Spectral(fhat.lambda_grid, coeff, fhat.lambda_grid ** 2 + space.shift)


def _pointwise(space: Space, sp: _Spectral, r, t):
    """Sum over spectral nodes at matching arrays of radii and times."""
    r = np.asarray(r, float).ravel()
    t = np.asarray(t, float).ravel()
    out = np.empty(r.size, complex)
    for lo in range(0, r.size, CHUNK):
        hi = min(lo + CHUNK, r.size)
        phi = phi_matrix(space, sp.lam, r[lo:hi])
        phase = np.exp(1j * t[lo:hi, None] * sp.energy[None, :])
        out[lo:hi] = (phi * phase) @ sp.coeff
    return out


def _anker_point(fhat: SpectralProfile, r: float, t: float, tol: float) -> tuple:
    """The two exponential branches on H3 at one point, without prefactors."""
    lo, hi = float(fhat.lambda_grid[0]), float(fhat.lambda_grid[-1])
    if fhat.tail_model == COMPACT:
        lo, hi = fhat.support
        hi = min(hi + 1e-12, float(fhat.lambda_grid[-1]))
    if hi <= lo:
        return 0j, 0j
    # c(lambda) lambda^2 = -i lambda and c(-lambda) lambda^2 = i lambda on H3
    plus = osc_integral(OscillatorySpec(lambda x: -1j * x * fhat(x), a=r, b=t, lo=lo, hi=hi), tol)
    minus = osc_integral(OscillatorySpec(lambda x: 1j * x * fhat(x), a=-r, b=t, lo=lo, hi=hi), tol)
    return plus.value, minus.value


def _anker_scale(r, t):
    return inversion_constant(Space.h3()) * np.exp(1j * t) / (2 * np.sinh(r))


def schrodinger_S(space: Space, fhat: SpectralProfile, s, t, method: str = DIRECT,
                  tol: float = 1e-11):
    """S_t f(s) = C * integral phi_lambda(s) e^{it(lambda^2+Q^2/4)} f_hat(lambda) |c(lambda)|^{-2} d lambda.

    ``s`` and ``t`` broadcast against each other.  ``method='anker'`` is only
    available on H3 and requires s > 0.
    """
    s_b, t_b = np.broadcast_arrays(np.asarray(s, float), np.asarray(t, float))
    if np.any(s_b < 0):
        raise DomainError("radii must be nonnegative")
    if method == ANKER:
        if not space.is_h3:
            raise DomainError("the exponential split route is implemented for H3 only")
        if np.any(s_b <= 0):
            raise DomainError("the exponential split is singular at s = 0")
        out = np.empty(s_b.size, complex)
        for i, (r, tt) in enumerate(zip(s_b.ravel(), t_b.ravel())):
            plus, minus = _anker_point(fhat, r, tt, tol)
            out[i] = _anker_scale(r, tt) * (plus + minus)
    elif method == DIRECT:
        out = _pointwise(space, _spectral(space, fhat), s_b, t_b)
    else:
        raise DomainError(f"unknown method {method!r}")
    out = out.reshape(s_b.shape)
    return complex(out) if out.ndim == 0 else out


def schrodinger_Rn(n: int, fhat: SpectralProfile, s, t):
    """Euclidean propagator with kernel J_{(n-2)/2}(lambda s) and weight lambda^{n-1}."""
    return schrodinger_S(Space.euclidean(n), fhat, s, t)


def evolve_spectral(space: Space, fhat: SpectralProfile, t: float) -> SpectralProfile:
    """Apply the multiplier e^{it(lambda^2+Q^2/4)} on the spectral side."""
    mult = np.exp(1j * t * (fhat.lambda_grid ** 2 + space.shift))
    func = None
    if fhat.func is not None:
        base = fhat.func
        func = lambda lam: base(lam) * np.exp(1j * t * (np.asarray(lam) ** 2 + space.shift))
    return fhat.with_values(fhat.values * mult, func)


def pointwise_majorant(space: Space, fhat: SpectralProfile) -> float:
    """C * integral |f_hat| |c|^{-2}, which dominates |S_t f(s)| since |phi| <= 1."""
    sp = _spectral(space, fhat)
    return float(np.sum(np.abs(sp.coeff)))


# ---------------------------------------------------------------- curves

def _sine_kernel_radial(space: Space) -> Optional[Callable]:
    """h with phi_lambda(r) = sin(lambda r) / (lambda h(r)), where such a form exists."""
    if space.is_h3:
        return np.sinh
    if space.is_euclidean and space.n == 3:
        return lambda r: r
    return None


def _shift_of(curve: CurveFamily, s, t):
    """Radial offset delta(t) when the curve is s + delta(t), else None."""
    if curve.kind not in (VERTICAL, PARABOLIC):
        return None
    return np.asarray(curve(np.full_like(t, s[0]), t), float) - s[0]


def evaluate_field(space: Space, fhat: SpectralProfile, curve: CurveFamily, s, t):
    """S_t f at radius curve(s, t) for every pair, as an array of shape (len(s), len(t))."""
    s = np.asarray(s, float)
    t = np.asarray(t, float)
    sp = _spectral(space, fhat)
    phase = np.exp(1j * t[None, :] * sp.energy[:, None])           # (K, T)
    delta = _shift_of(curve, s, t)
    if delta is not None and np.all(delta == 0):
        return phi_matrix(space, sp.lam, s) @ (sp.coeff[:, None] * phase)
    radial = _sine_kernel_radial(space)
    if delta is not None and radial is not None and s.min() > 0:
        # phi = sin(lambda r) / (lambda h(r)), and sin(lambda (s + delta))
        # separates into products of s- and t-factors
        lam = sp.lam
        coeff = sp.coeff / np.where(lam > 0, lam, 1.0)
        right_c = coeff[:, None] * np.cos(np.outer(lam, delta)) * phase
        right_s = coeff[:, None] * np.sin(np.outer(lam, delta)) * phase
        num = np.sin(np.outer(s, lam)) @ right_c + np.cos(np.outer(s, lam)) @ right_s
        return num / radial(s[:, None] + delta[None, :])
    S, T = np.meshgrid(s, t, indexing="ij")
    radii = np.asarray(curve(S, T), float)
    return _pointwise(space, sp, radii, T).reshape(S.shape)


@dataclass
class PropagationRequest:
    space: Space
    fhat: SpectralProfile
    curve: CurveFamily
    s_nodes: np.ndarray
    t_nodes: np.ndarray
    T: float
    refine: bool = True

    def __post_init__(self):
        self.s_nodes = np.asarray(self.s_nodes, float)
        self.t_nodes = np.asarray(self.t_nodes, float)
        if self.s_nodes.size == 0 or np.any(self.s_nodes <= 0):
            raise DomainError("s nodes must be positive")
        bound = time_bound(self.curve, float(self.s_nodes.min()))
        if not self.T < bound:
            raise PreconditionError(f"T = {self.T} is not below the admissible bound {bound}")
        if np.any(np.abs(self.t_nodes) > self.T):
            raise DomainError("time nodes must lie in [-T, T]")


@dataclass
class FieldSlice:
    s_nodes: np.ndarray
    t_nodes: np.ndarray
    values: np.ndarray
    sup_t: np.ndarray
    argmax_t: np.ndarray
    grid_sup: np.ndarray = field(default=None)

    @property
    def refinement_delta(self):
        return self.sup_t - self.grid_sup

    def rows(self):
        for i, s in enumerate(self.s_nodes):
            for j, t in enumerate(self.t_nodes):
                v = self.values[i, j]
                yield s, t, v.real, v.imag, abs(v)


def chebyshev_times(T: float, count: int = 129):
    # sine form of the Chebyshev points: exactly symmetric, with t = 0 for odd counts
    k = np.arange(count)
    return np.sort(T * np.sin(np.pi * (count - 1 - 2 * k) / (2 * count)))


def _golden_refine(objective: Callable, lo, hi, iters: int = 40):
    """Maximize objective(t), evaluated for all radii at once, on the brackets [lo, hi]."""
    a, b = lo.copy(), hi.copy()
    x1 = b - GOLDEN * (b - a)
    x2 = a + GOLDEN * (b - a)
    f1, f2 = objective(x1), objective(x2)
    for _ in range(iters):
        left = f1 > f2
        b = np.where(left, x2, b)
        a = np.where(left, a, x1)
        nx1 = np.where(left, b - GOLDEN * (b - a), x2)
        nx2 = np.where(left, x1, a + GOLDEN * (b - a))
        nf1 = np.where(left, objective(nx1), f2)
        nf2 = np.where(left, f1, objective(nx2))
        x1, x2, f1, f2 = nx1, nx2, nf1, nf2
    best_t = np.where(f1 > f2, x1, x2)
    return np.maximum(f1, f2), best_t


def propagate_along_curve(req: PropagationRequest) -> FieldSlice:
    """Field on the (s, t) grid plus the supremum in t, refined by golden section."""
    vals = evaluate_field(req.space, req.fhat, req.curve, req.s_nodes, req.t_nodes)
    mags = np.abs(vals)
    k = np.argmax(mags, axis=1)
    grid_sup = mags[np.arange(mags.shape[0]), k]
    sup, arg = grid_sup.copy(), req.t_nodes[k].copy()
    if req.refine and req.t_nodes.size > 2:
        tn = req.t_nodes
        # brackets at the ends of the grid reach out to the window edge
        lo = np.where(k == 0, -req.T, tn[np.maximum(k - 1, 0)])
        hi = np.where(k == tn.size - 1, req.T, tn[np.minimum(k + 1, tn.size - 1)])
        sp = _spectral(req.space, req.fhat)
        s = req.s_nodes

        def objective(t):
            return np.abs(_pointwise(req.space, sp, np.asarray(req.curve(s, t), float), t))

        ref_sup, ref_t = _golden_refine(objective, lo, hi)
        better = ref_sup > sup
        sup = np.where(better, ref_sup, sup)
        arg = np.where(better, ref_t, arg)
    return FieldSlice(req.s_nodes, req.t_nodes, vals, sup, arg, grid_sup)


def linearized_T(space: Space, fhat: SpectralProfile, curve: CurveFamily, s_nodes,
                 t_of_s) -> np.ndarray:
    """The propagator along the curve at a prescribed time t(s) for each radius."""
    s = np.asarray(s_nodes, float)
    t = np.asarray(t_of_s(s) if callable(t_of_s) else t_of_s, float) * np.ones_like(s)
    return _pointwise(space, _spectral(space, fhat), np.asarray(curve(s, t), float), t)


# ---------------------------------------------------------------- decompositions

def term_decomposition_h3(fhat: SpectralProfile, curve: CurveFamily, s_nodes, t_of_s,
                          tol: float = 1e-11):
    """Split the linearized operator on H3 into the plus branch, minus branch and remainder.

    The remainder of the exponential expansion vanishes identically on H3.
    """
    s = np.asarray(s_nodes, float)
    t = np.asarray(t_of_s(s) if callable(t_of_s) else t_of_s, float) * np.ones_like(s)
    r = np.asarray(curve(s, t), float)
    T1 = np.empty(s.size, complex)
    T2 = np.empty(s.size, complex)
    for i in range(s.size):
        plus, minus = _anker_point(fhat, r[i], t[i], tol)
        scale = _anker_scale(r[i], t[i])
        T1[i], T2[i] = scale * plus, scale * minus
    return T1, T2, np.zeros(s.size, complex)


@dataclass
class BesselSplit:
    leading: np.ndarray
    remainder: np.ndarray
    bound: np.ndarray


def bessel_decomposition(space: Space, fhat: SpectralProfile, curve: CurveFamily, s_nodes,
                         t_of_s, M: int = 0, R0: float = DEFAULT_R0, C_M: float = 1.0) -> BesselSplit:
    """Propagate the truncated Bessel series and keep the rest as an exact difference.

    ``bound`` integrates the pointwise series error estimate against |f_hat|
    and the Plancherel density.
    """
    s = np.asarray(s_nodes, float)
    t = np.asarray(t_of_s(s) if callable(t_of_s) else t_of_s, float) * np.ones_like(s)
    r = np.asarray(curve(s, t), float)
    if np.any(r > R0):
        raise OutOfRangeError(f"curve radii exceed the series radius R0 = {R0}")
    sp = _spectral(space, fhat)
    full = _pointwise(space, sp, r, t)
    nu = (space.n - 2) / 2
    c0 = series_normalization(space)
    lead = np.empty(s.size, complex)
    bound = np.empty(s.size)
    for i, (ri, ti) in enumerate(zip(r, t)):
        coeffs = (1.0,) + series_coefficients(space, float(ri), int(M))
        z = sp.lam * ri
        series = sum(a * bessel_j_norm(nu + l, z) * ri ** (2 * l) for l, a in enumerate(coeffs))
        series = c0 * _series_weight(space, float(ri)) * series
        lead[i] = np.sum(series * np.exp(1j * ti * sp.energy) * sp.coeff)
        err = np.array([series_error_bound(space, lam, ri, M, C_M) for lam in sp.lam])
        bound[i] = np.sum(err * np.abs(sp.coeff))
    return BesselSplit(lead, full - lead, bound)


# ---------------------------------------------------------------- rescaling and splitting

def parabolic_rescale_check(n: int, fhat: SpectralProfile, eta: float, s: float, t: float,
                            C7: float = 1.0) -> float:
    """|S_t f(gamma_s(t)) - S_{t/eta^2} f_eta(gamma_{s/eta}(t/eta^2))| for f_eta(x) = f(eta x).

    The rescaled side is built on its own quadrature grid from the spectral
    identity F f_eta(lambda) = eta^{-n} F f(lambda / eta).
    """
    if eta <= 0:
        raise DomainError("eta must be positive")
    space = Space.euclidean(n)
    lhs = schrodinger_S(space, fhat, s + C7 * np.sqrt(abs(t)), t)
    panels = max(8, fhat.lambda_grid.size // 20)
    nodes, weights = gauss_grid(0.0, eta * fhat.lambda_grid[-1], panels + 7, 20)
    scaled = SpectralProfile(nodes, eta ** (-n) * fhat(nodes / eta), fhat.tail_model, weights)
    te = t / eta ** 2
    rhs = schrodinger_S(space, scaled, s / eta + C7 * np.sqrt(abs(te)), te)
    return float(abs(lhs - rhs))


def _smooth_step(x):
    h = lambda y: np.where(y > 0, np.exp(-1.0 / np.where(y > 0, y, 1.0)), 0.0)
    return h(x) / (h(x) + h(1 - x))


def lp_partition(lam):
    """Smooth psi_1 equal to 1 on [0, 1] and 0 on [2, inf), with psi_2 = 1 - psi_1."""
    lam = np.abs(np.asarray(lam, float))
    low = 1.0 - _smooth_step(lam - 1.0)
    return low, 1.0 - low


def littlewood_paley_split(fhat: SpectralProfile):
    low_w, high_w = lp_partition(fhat.lambda_grid)
    low_f = high_f = None
    if fhat.func is not None:
        base = fhat.func
        low_f = lambda lam: base(lam) * lp_partition(lam)[0]
        high_f = lambda lam: base(lam) * lp_partition(lam)[1]
    return fhat.with_values(fhat.values * low_w, low_f), fhat.with_values(fhat.values * high_w, high_f)
