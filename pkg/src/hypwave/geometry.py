"""Spaces, volume densities and curve families.

Radial analysis only ever needs the distance of a point to the identity, so a
curve family is stored as a map ``(s, t) -> radius`` together with the
constants it claims to satisfy.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Optional

import numpy as np

from .errors import DomainError, OutOfRangeError, PreconditionError, UsageError

DAMEK_RICCI = "DamekRicci"
EUCLIDEAN = "Euclidean"


@dataclass(frozen=True)
class Space:
    kind: str
    m_v: int = 0
    m_z: int = 0
    n: int = 3
    Q: Fraction = Fraction(0)
    real_hyperbolic: bool = False

    def __post_init__(self):
        if self.kind == DAMEK_RICCI:
            if self.m_v < 0 or self.m_z < 0:
                raise DomainError("m_v and m_z must be nonnegative")
            if self.m_v % 2 and not self.real_hyperbolic:
                raise DomainError("m_v must be even for a Damek-Ricci space")
            if self.m_v == 0 and not self.real_hyperbolic:
                raise DomainError("m_v = 0 is only admitted as a real hyperbolic space")
            if self.m_z < 1:
                raise DomainError("m_z must be at least 1")
            if self.n != self.m_v + self.m_z + 1:
                raise DomainError("n must equal m_v + m_z + 1")
            if self.Q != Fraction(self.m_v, 2) + self.m_z:
                raise DomainError("Q must equal m_v/2 + m_z")
        elif self.kind == EUCLIDEAN:
            if self.n < 1:
                raise DomainError("Euclidean dimension must be positive")
            if self.Q != 0:
                raise DomainError("Euclidean spaces carry Q = 0")
        else:
            raise DomainError(f"unknown space kind {self.kind!r}")

    @classmethod
    def damek_ricci(cls, m_v: int, m_z: int, real_hyperbolic: Optional[bool] = None) -> "Space":
        if real_hyperbolic is None:
            real_hyperbolic = m_v == 0
        return cls(DAMEK_RICCI, m_v, m_z, m_v + m_z + 1, Fraction(m_v, 2) + m_z, real_hyperbolic)

    @classmethod
    def h3(cls) -> "Space":
        return cls.damek_ricci(0, 2, real_hyperbolic=True)

    @classmethod
    def euclidean(cls, n: int) -> "Space":
        return cls(EUCLIDEAN, 0, 0, n, Fraction(0))

    @classmethod
    def parse(cls, text: str) -> "Space":
        """Parse ``h3``, ``dr:m_v,m_z`` or ``rn:n``."""
        text = text.strip().lower()
        try:
            if text == "h3":
                return cls.h3()
            if text.startswith("dr:"):
                m_v, m_z = (int(p) for p in text[3:].split(","))
                return cls.damek_ricci(m_v, m_z)
            if text.startswith("rn:"):
                return cls.euclidean(int(text[3:]))
        except ValueError as exc:
            raise UsageError(f"bad space specification {text!r}: {exc}") from exc
        raise UsageError(f"bad space specification {text!r}")

    @property
    def is_euclidean(self) -> bool:
        return self.kind == EUCLIDEAN

    @property
    def is_h3(self) -> bool:
        return self.kind == DAMEK_RICCI and (self.m_v, self.m_z) == (0, 2)

    @property
    def shift(self) -> float:
        """Bottom of the spectrum, Q^2/4."""
        return float(self.Q) ** 2 / 4.0

    @property
    def label(self) -> str:
        if self.is_euclidean:
            return f"rn:{self.n}"
        if self.is_h3:
            return "h3"
        return f"dr:{self.m_v},{self.m_z}"

    def as_dict(self) -> dict:
        return {"kind": self.kind, "m_v": self.m_v, "m_z": self.m_z, "n": self.n,
                "Q": str(self.Q), "label": self.label}


def density(space: Space, s):
    """Radial volume density A(s)."""
    s = np.asarray(s, dtype=float)
    if np.any(s < 0):
        raise DomainError("density needs s >= 0")
    if space.is_euclidean:
        out = s ** (space.n - 1)
    else:
        k = space.m_v + space.m_z
        out = 2.0 ** k * np.sinh(s / 2) ** k * np.cosh(s / 2) ** space.m_z
    return out if out.ndim else float(out)


def log_density_derivative(space: Space, s):
    """A'(s)/A(s) for s > 0."""
    s = np.asarray(s, dtype=float)
    if space.is_euclidean:
        return (space.n - 1) / s
    k = space.m_v + space.m_z
    return 0.5 * k / np.tanh(s / 2) + 0.5 * space.m_z * np.tanh(s / 2)


def log_density_curvature(space: Space) -> float:
    """Coefficient kappa in A'/A = (n-1)/s + kappa*s + O(s^3)."""
    if space.is_euclidean:
        return 0.0
    return (space.m_v + space.m_z) / 12.0 + space.m_z / 4.0


@dataclass(frozen=True)
class Annulus:
    r1: float
    r2: float

    def __post_init__(self):
        if not (0 < self.r1 < self.r2 < np.inf):
            raise DomainError("annulus needs 0 < r1 < r2 < inf")

    @classmethod
    def parse(cls, text: str) -> "Annulus":
        try:
            r1, r2 = (float(p) for p in text.split(","))
        except ValueError as exc:
            raise UsageError(f"bad annulus {text!r}") from exc
        return cls(r1, r2)


VERTICAL = "VerticalLine"
PARABOLIC = "Parabolic"
CUSTOM = "Custom"


@dataclass
class CurveFamily:
    """Radial description of a family of curves s -> gamma_s(t)."""

    kind: str
    radial_eval: Callable = field(repr=False)
    alpha: float = 1.0
    C1: float = 0.0
    C2: float = 1.0
    C3: float = 1.0
    C7: float = 0.0

    def __post_init__(self):
        if not 0.5 <= self.alpha <= 1.0:
            raise DomainError("Hölder exponent must lie in [1/2, 1]")

    def __call__(self, s, t):
        return self.radial_eval(np.asarray(s, dtype=float), np.asarray(t, dtype=float))

    def describe(self) -> dict:
        return {"kind": self.kind, "alpha": self.alpha, "C1": self.C1, "C2": self.C2,
                "C3": self.C3, "C7": self.C7}


def vertical_line() -> CurveFamily:
    return CurveFamily(VERTICAL, lambda s, t: np.broadcast_to(s, np.broadcast(s, t).shape) * 1.0,
                       alpha=1.0, C1=0.0, C2=1.0, C3=1.0)


def parabolic(C7: float = 1.0) -> CurveFamily:
    if C7 < 0:
        raise DomainError("C7 must be nonnegative")

    def radius(s, t):
        # negative times mirror the positive branch
        return s + C7 * np.sqrt(np.abs(t))

    return CurveFamily(PARABOLIC, radius, alpha=0.5, C1=C7, C2=1.0, C3=1.0, C7=C7)


def custom_curve(func: Callable, alpha: float, C1: float, C2: float, C3: float) -> CurveFamily:
    return CurveFamily(CUSTOM, func, alpha=alpha, C1=C1, C2=C2, C3=C3)


def curve_from_table(s_nodes, t_nodes, radii, alpha: float, C1: float, C2: float = 1.0,
                     C3: float = 1.0) -> CurveFamily:
    """Custom curve interpolated from radii sampled on an (s, t) grid."""
    from scipy.interpolate import RegularGridInterpolator

    s_nodes = np.asarray(s_nodes, float)
    t_nodes = np.asarray(t_nodes, float)
    radii = np.asarray(radii, float).reshape(len(s_nodes), len(t_nodes))
    interp = RegularGridInterpolator((s_nodes, t_nodes), radii, method="linear")

    def radius(s, t):
        s, t = np.broadcast_arrays(s, t)
        pts = np.stack([s.ravel(), t.ravel()], axis=-1)
        return interp(pts).reshape(s.shape)

    return CurveFamily(CUSTOM, radius, alpha=alpha, C1=C1, C2=C2, C3=C3)


def load_curve_table(path: str, alpha: float = 0.5, C1: float = 1.0) -> CurveFamily:
    """Read whitespace or comma separated ``s t radius`` rows from a file."""
    rows = np.loadtxt(path, delimiter=None if not path.endswith(".csv") else ",", comments="#")
    s_nodes = np.unique(rows[:, 0])
    t_nodes = np.unique(rows[:, 1])
    grid = np.full((len(s_nodes), len(t_nodes)), np.nan)
    si = np.searchsorted(s_nodes, rows[:, 0])
    ti = np.searchsorted(t_nodes, rows[:, 1])
    grid[si, ti] = rows[:, 2]
    if np.isnan(grid).any():
        raise UsageError("curve table must cover a full (s, t) grid")
    return curve_from_table(s_nodes, t_nodes, grid, alpha, C1)


def parse_curve(text: str) -> CurveFamily:
    text = text.strip()
    if text == "vertical":
        return vertical_line()
    if text.startswith("parabolic"):
        _, _, c7 = text.partition(":")
        return parabolic(float(c7) if c7 else 1.0)
    if text.startswith("custom:"):
        return load_curve_table(text[len("custom:"):])
    raise UsageError(f"bad curve specification {text!r}")


def admissible_T(C1: float, C2: float, r1: float, alpha: float) -> float:
    """Upper bound on the time window keeping curves inside a widened annulus."""
    if C1 <= 0 or C2 <= 0 or r1 <= 0:
        raise DomainError("admissible_T needs positive C1, C2, r1")
    if not 0.5 <= alpha <= 1.0:
        raise DomainError("alpha must lie in [1/2, 1]")
    return (C2 * r1 / (2.0 * C1)) ** (1.0 / alpha)


def time_bound(curve: CurveFamily, r1: float) -> float:
    """admissible_T for the curve's constants; unbounded for time-independent curves."""
    if curve.C1 == 0:
        return np.inf
    return admissible_T(curve.C1, curve.C2, r1, curve.alpha)


@dataclass
class CurveReport:
    C1_est: float
    alpha_residual: float
    C2_est: float
    C3_est: float
    violations: list
    grid_sizes: tuple

    @property
    def ok(self) -> bool:
        return not self.violations

    def rows(self):
        ns, nt = self.grid_sizes
        for name in ("C1_est", "alpha_residual", "C2_est", "C3_est"):
            yield name, getattr(self, name), ns, nt


def check_curve_conditions(curve: CurveFamily, s_grid, t_grid, rel_tol: float = 0.01) -> CurveReport:
    """Estimate the Hölder and bilipschitz constants of a curve family on a grid.

    Every pair of grid points is scanned, so the estimates are exact maxima and
    minima over the sampled set.
    """
    s_grid = np.unique(np.asarray(s_grid, float))
    t_grid = np.unique(np.asarray(t_grid, float))
    if s_grid.size == 0 or t_grid.size == 0:
        raise UsageError("curve checks need nonempty grids")
    radii = np.asarray(curve(s_grid[:, None], t_grid[None, :]), float)

    c1 = 0.0
    resid = 0.0
    if t_grid.size > 1:
        dt = np.abs(t_grid[:, None] - t_grid[None, :])
        iu = np.triu_indices(t_grid.size, 1)
        hold = dt[iu] ** curve.alpha
        for row in radii:
            dr = np.abs(row[:, None] - row[None, :])[iu]
            c1 = max(c1, float(np.max(dr / hold)))
            resid = max(resid, float(np.max(dr - curve.C1 * hold)))
    c2, c3 = 1.0, 1.0
    if s_grid.size > 1:
        ds = np.abs(s_grid[:, None] - s_grid[None, :])
        iu = np.triu_indices(s_grid.size, 1)
        ratios = np.concatenate([
            (np.abs(col[:, None] - col[None, :])[iu] / ds[iu]) for col in radii.T])
        c2, c3 = float(ratios.min()), float(ratios.max())

    violations = []
    if c1 > curve.C1 * (1 + rel_tol) + 1e-14:
        violations.append(f"C1 estimate {c1:.6g} exceeds declared {curve.C1:.6g}")
    if c2 < curve.C2 * (1 - rel_tol):
        violations.append(f"C2 estimate {c2:.6g} below declared {curve.C2:.6g}")
    if c3 > curve.C3 * (1 + rel_tol):
        violations.append(f"C3 estimate {c3:.6g} exceeds declared {curve.C3:.6g}")
    return CurveReport(c1, max(resid, 0.0), c2, c3, violations, (s_grid.size, t_grid.size))


@dataclass
class GrowthReport:
    ok: bool
    min_ratio: float
    max_ratio: float
    lower: float
    upper: float


def curve_growth_bounds(curve: CurveFamily, annulus: Annulus, T: float, t_grid, s_grid) -> GrowthReport:
    """Check C2*s/2 < radius < 3*C3*s/2 on the annulus for |t| <= T."""
    if T >= time_bound(curve, annulus.r1):
        raise PreconditionError("T must stay below the admissible time bound")
    s_grid = np.asarray(s_grid, float)
    t_grid = np.asarray(t_grid, float)
    s = s_grid[(s_grid >= annulus.r1) & (s_grid <= annulus.r2)]
    t = t_grid[np.abs(t_grid) <= T]
    if s.size == 0 or t.size == 0:
        raise UsageError("grids do not meet the annulus and the time window")
    ratio = np.asarray(curve(s[:, None], t[None, :]), float) / s[:, None]
    lower, upper = curve.C2 / 2.0, 1.5 * curve.C3
    ok = bool(np.all(ratio > lower) and np.all(ratio < upper))
    return GrowthReport(ok, float(ratio.min()), float(ratio.max()), lower, upper)


def pushforward_radius(x_norm, eps: float = 1.0):
    """Radial coordinate of the exponential chart, which is an isometry on radii."""
    x = np.asarray(x_norm, float)
    if np.any(x < 0):
        raise DomainError("norms are nonnegative")
    if np.any(x >= eps):
        raise OutOfRangeError(f"radius must stay below the chart radius {eps}")
    return x if x.ndim else float(x)

