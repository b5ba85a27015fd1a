"""Numerical studies of the maximal estimate: ratio stability, band sweeps, convergence tables."""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, List, Optional, Sequence

import numpy as np

from .geometry import Annulus, CurveFamily, Space, density, time_bound
from .profiles import COMPACT, SCHWARTZ, SpectralProfile, gauss_grid
from .propagator import (PropagationRequest, _golden_refine, _pointwise, _spectral,
                         chebyshev_times, evaluate_field, propagate_along_curve)
from .transforms import SobolevSpec, sobolev_norm


def bump(x):
    """C-infinity bump exp(-1/(1-x^2)) on (-1, 1), scaled to 1 at the centre."""
    x = np.asarray(x, float)
    inside = np.abs(x) < 1
    out = np.zeros(x.shape)
    out[inside] = np.exp(1.0 - 1.0 / (1.0 - x[inside] ** 2))
    return out


def band_profile(N: float, width: Optional[float] = None, seed: Optional[int] = None,
                 nodes_per_unit: float = 1.0) -> SpectralProfile:
    """Smooth bump centred at N of half-width sqrt(N), optionally with a seeded random phase.

    The quadrature grid is fine enough for phases t (lambda^2) with |t| up to a few / N.
    """
    width = np.sqrt(N) if width is None else width
    lo, hi = max(N - width, 0.0), N + width
    panels = int(np.ceil(max(8.0, 4 * width * nodes_per_unit)))
    if seed is None:
        func = lambda lam: bump((np.asarray(lam) - N) / width) + 0j
    else:
        rng = np.random.default_rng(seed)
        coeffs = rng.normal(size=6)
        # smooth random phase: low-degree Chebyshev series across the band
        func = lambda lam: bump((np.asarray(lam) - N) / width) * np.exp(
            1j * np.polynomial.chebyshev.chebval((np.asarray(lam) - N) / width, coeffs))
    return SpectralProfile.from_function(func, lo, hi, panels, 20, COMPACT)


def gaussian_band(center: float = 1.0, sigma: float = 0.5, reach: float = 9.0,
                  panels: int = 64) -> SpectralProfile:
    hi = center + reach * sigma
    func = lambda lam: np.exp(-(np.asarray(lam) - center) ** 2 / (2 * sigma ** 2)) + 0j
    return SpectralProfile.from_function(func, 0.0, hi, panels, 20, SCHWARTZ)


def focus_time_grid(N: float, width: float, annulus: Annulus, T: float, base: int = 129):
    """Chebyshev times on [-T, T] plus a dense window where a band at N focuses.

    A band at frequency N refocuses at radius s near |t| = s / (2N); the
    dense spacing resolves the packet width 1/(2 N width).
    """
    window = min(T, 2.0 * annulus.r2 / N)
    step = 1.0 / (8.0 * N * width)
    count = int(np.ceil(2 * window / step)) | 1
    dense = np.linspace(-window, window, count)
    return np.unique(np.concatenate([chebyshev_times(T, base), dense]))


def annulus_grid(annulus: Annulus, panels: int = 8, order: int = 8):
    return gauss_grid(annulus.r1, annulus.r2, panels, order)


@dataclass
class ExperimentPlan:
    space: Space
    curve: CurveFamily
    annulus: Annulus
    T: float
    family: List[SpectralProfile]
    labels: Optional[List[str]] = None
    t_grids: Optional[List[np.ndarray]] = None
    beta: float = 0.25
    s_panels: int = 8
    refine: bool = True

    def __post_init__(self):
        bound = time_bound(self.curve, self.annulus.r1)
        if not self.T < bound:
            raise ValueError(f"T = {self.T} is not below the admissible bound {bound}")
        if self.labels is None:
            self.labels = [str(i) for i in range(len(self.family))]


@dataclass
class RatioReport:
    labels: List[str]
    lhs: np.ndarray
    norms: np.ndarray
    ratios: np.ndarray
    refinement_delta: np.ndarray

    @property
    def valid(self):
        return np.isfinite(self.ratios)

    @property
    def max_ratio(self) -> float:
        r = self.ratios[self.valid]
        return float(r.max()) if r.size else float("nan")

    @property
    def spread(self) -> float:
        r = self.ratios[self.valid]
        return float(r.max() / r.min()) if r.size else float("nan")

    def rows(self):
        for i, lab in enumerate(self.labels):
            yield lab, self.lhs[i], self.norms[i], self.ratios[i], self.refinement_delta[i]


def maximal_lhs(space, fhat, curve, annulus, T, t_nodes, s_panels=8, refine=True):
    """L^2(annulus, A ds) norm of the supremum over t of |S_t f| along the curve."""
    s, w = annulus_grid(annulus, s_panels)
    req = PropagationRequest(space, fhat, curve, s, t_nodes, T, refine)
    sl = propagate_along_curve(req)
    lhs = float(np.sqrt(np.sum(w * density(space, s) * sl.sup_t ** 2)))
    delta = float(np.max(sl.refinement_delta / np.maximum(sl.grid_sup, 1e-300)))
    return lhs, delta


def maximal_ratio(plan: ExperimentPlan) -> RatioReport:
    """Maximal-function norm over the annulus divided by the homogeneous Sobolev norm.

    Zero profiles give NaN and are excluded from the summary statistics.
    """
    n = len(plan.family)
    lhs, norms, ratios, deltas = (np.zeros(n) for _ in range(4))
    spec = SobolevSpec(plan.beta, homogeneous=True)
    for i, fhat in enumerate(plan.family):
        norms[i] = sobolev_norm(plan.space, fhat, spec)
        if norms[i] == 0:
            ratios[i] = np.nan
            continue
        t_nodes = plan.t_grids[i] if plan.t_grids is not None else chebyshev_times(plan.T)
        lhs[i], deltas[i] = maximal_lhs(plan.space, fhat, plan.curve, plan.annulus, plan.T,
                                        t_nodes, plan.s_panels, plan.refine)
        ratios[i] = lhs[i] / norms[i]
    return RatioReport(list(plan.labels), lhs, norms, ratios, deltas)


@dataclass
class SweepReport:
    N: np.ndarray
    report: RatioReport
    slope: float

    def within(self, band: float = 0.15) -> bool:
        return abs(self.slope) <= band


def log_slope(x, y) -> float:
    x = np.asarray(x, float)
    y = np.asarray(y, float)
    if x.size < 2:
        return 0.0
    return float(np.polyfit(np.log(x), np.log(y), 1)[0])


def band_sweep(space: Space, curve: CurveFamily, annulus: Annulus, T: float, N_list: Sequence[float],
               beta: float = 0.25, seed: Optional[int] = None) -> SweepReport:
    """Maximal ratio for a single smooth band at each N; slope of log ratio against log N."""
    family, grids = [], []
    for N in N_list:
        width = np.sqrt(N)
        family.append(band_profile(N, width, seed))
        grids.append(focus_time_grid(N, width, annulus, T))
    plan = ExperimentPlan(space, curve, annulus, T, family, [f"N={N:g}" for N in N_list], grids, beta)
    rep = maximal_ratio(plan)
    return SweepReport(np.asarray(N_list, float), rep, log_slope(N_list, rep.ratios))


@dataclass
class ConvergenceTable:
    tau: np.ndarray
    error: np.ndarray

    @property
    def strictly_decreasing(self) -> bool:
        order = np.argsort(self.tau)[::-1]
        e = self.error[order]
        return bool(np.all(np.diff(e) < 0))

    def rows(self):
        return zip(self.tau, self.error)


def convergence_table(space: Space, fhat: SpectralProfile, curve: CurveFamily, annulus: Annulus,
                      tau_list: Sequence[float], t_count: int = 129, s_panels: int = 8) -> ConvergenceTable:
    """e(tau) = L^2(annulus) norm of sup over |t| <= tau of |S_t f(curve(s, t)) - f(s)|."""
    s, w = annulus_grid(annulus, s_panels)
    sp = _spectral(space, fhat)
    f0 = _pointwise(space, sp, s, np.zeros_like(s))
    errs = []
    for tau in tau_list:
        if tau == 0:
            errs.append(0.0)
            continue
        t = chebyshev_times(tau, t_count)
        diff = np.abs(evaluate_field(space, fhat, curve, s, t) - f0[:, None])
        k = np.argmax(diff, axis=1)
        sup = diff[np.arange(s.size), k]
        lo = np.where(k == 0, -tau, t[np.maximum(k - 1, 0)])
        hi = np.where(k == t.size - 1, tau, t[np.minimum(k + 1, t.size - 1)])

        def objective(tt):
            return np.abs(_pointwise(space, sp, np.asarray(curve(s, tt), float), tt) - f0)

        ref, _ = _golden_refine(objective, lo, hi)
        sup = np.maximum(sup, ref)
        errs.append(float(np.sqrt(np.sum(w * density(space, s) * sup ** 2))))
    return ConvergenceTable(np.asarray(tau_list, float), np.asarray(errs))


@dataclass
class KernelUniformity:
    N: np.ndarray
    max_scaled: np.ndarray      # per N: max over pairs of |I_N| |s - s'|^{1/2}

    @property
    def spread(self) -> float:
        return float(self.max_scaled.max() / self.max_scaled.min())


def kernel_uniformity(curve: CurveFamily, annulus: Annulus, T: float, N_list=(16, 64, 256, 1024),
                      pairs: int = 100, C_shift: float = 1.0, seed: int = 0) -> KernelUniformity:
    """Scaled oscillatory kernel over random radius pairs and random times in [-T, T].

    The phase uses kappa(s, t) = curve(s, t) with an independent time for each radius.
    """
    from .quadrature import scaled_phase_kernel

    rng = np.random.default_rng(seed)
    s = rng.uniform(annulus.r1, annulus.r2, size=(pairs, 2))
    t = rng.uniform(-T, T, size=(pairs, 2))
    kappa = np.asarray(curve(s, t), float)
    gap = np.abs(s[:, 0] - s[:, 1]) ** 0.5
    out = []
    for N in N_list:
        vals = [abs(scaled_phase_kernel(kappa[i, 0], kappa[i, 1], t[i, 0], t[i, 1], C_shift, N))
                for i in range(pairs)]
        out.append(float(np.max(np.asarray(vals) * gap)))
    return KernelUniformity(np.asarray(N_list, float), np.asarray(out))
