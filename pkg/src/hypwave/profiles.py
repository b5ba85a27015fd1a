"""Sampled radial and spectral profiles plus the composite Gauss grids they live on."""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np
from scipy.interpolate import CubicSpline

COMPACT = "compact_support"
POWER = "power_decay"
SCHWARTZ = "schwartz"
TAIL_MODELS = (COMPACT, POWER, SCHWARTZ)


def gauss_grid(a: float, b: float, panels: int, order: int = 20):
    """Composite Gauss-Legendre nodes and weights on [a, b]."""
    x, w = np.polynomial.legendre.leggauss(order)
    edges = np.linspace(a, b, panels + 1)
    half = 0.5 * np.diff(edges)
    mid = 0.5 * (edges[1:] + edges[:-1])
    nodes = (mid[:, None] + half[:, None] * x[None, :]).ravel()
    weights = (half[:, None] * w[None, :]).ravel()
    return nodes, weights


def _interp(grid, values, x, outside=0.0):
    x = np.asarray(x, float)
    spline = CubicSpline(grid, values)
    out = np.asarray(spline(x), complex)
    mask = (x < grid[0]) | (x > grid[-1])
    out[mask] = outside
    return out


@dataclass
class SpectralProfile:
    """A function of frequency lambda > 0 sampled on a grid.

    When ``weights`` is set the grid doubles as a quadrature rule for
    integrals over the spectral half line.  When ``func`` is set it is used
    for exact evaluation off the grid.
    """

    lambda_grid: np.ndarray
    values: np.ndarray
    tail_model: str = SCHWARTZ
    weights: Optional[np.ndarray] = None
    func: Optional[Callable] = field(default=None, repr=False)
    decay_rate: Optional[float] = None

    def __post_init__(self):
        self.lambda_grid = np.asarray(self.lambda_grid, float)
        self.values = np.asarray(self.values, complex)
        if self.lambda_grid.ndim != 1 or self.lambda_grid.size != self.values.size:
            raise ValueError("grid and values must be matching 1-D arrays")
        if np.any(np.diff(self.lambda_grid) <= 0) or self.lambda_grid[0] < 0:
            raise ValueError("lambda grid must be nonnegative and strictly increasing")
        if self.tail_model not in TAIL_MODELS:
            raise ValueError(f"unknown tail model {self.tail_model!r}")

    @classmethod
    def from_function(cls, func: Callable, lo: float, hi: float, panels: int = 64, order: int = 20,
                      tail_model: str = SCHWARTZ) -> "SpectralProfile":
        nodes, weights = gauss_grid(lo, hi, panels, order)
        return cls(nodes, np.asarray(func(nodes), complex), tail_model, weights, func)

    def __call__(self, lam):
        if self.func is not None:
            return np.asarray(self.func(np.asarray(lam, float)), complex)
        return _interp(self.lambda_grid, self.values, lam)

    def with_values(self, values, func: Optional[Callable] = None) -> "SpectralProfile":
        return SpectralProfile(self.lambda_grid, values, self.tail_model, self.weights, func,
                               self.decay_rate)

    @property
    def support(self):
        nz = np.nonzero(np.abs(self.values) > 0)[0]
        if nz.size == 0:
            return (0.0, 0.0)
        return float(self.lambda_grid[nz[0]]), float(self.lambda_grid[nz[-1]])


@dataclass
class RadialProfile:
    """A radial function sampled on nonnegative radii."""

    s_grid: np.ndarray
    values: np.ndarray
    space: object = None
    weights: Optional[np.ndarray] = None
    func: Optional[Callable] = field(default=None, repr=False)

    def __post_init__(self):
        self.s_grid = np.asarray(self.s_grid, float)
        self.values = np.asarray(self.values, complex)
        if self.s_grid.ndim != 1 or self.s_grid.size != self.values.size:
            raise ValueError("grid and values must be matching 1-D arrays")
        if np.any(np.diff(self.s_grid) <= 0) or self.s_grid[0] < 0:
            raise ValueError("radial grid must be nonnegative and strictly increasing")
        if not np.all(np.isfinite(self.values)):
            raise ValueError("profile values must be finite")

    @classmethod
    def from_function(cls, func: Callable, space, s_max: float, panels: int = 48,
                      order: int = 20) -> "RadialProfile":
        nodes, weights = gauss_grid(0.0, s_max, panels, order)
        return cls(nodes, np.asarray(func(nodes), complex), space, weights, func)

    def __call__(self, s):
        if self.func is not None:
            return np.asarray(self.func(np.asarray(s, float)), complex)
        return _interp(self.s_grid, self.values, s)
