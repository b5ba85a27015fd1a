"""A radial H^{1/2} datum on H3 whose Schrodinger evolution blows up along wide approach regions.

The datum lives on disjoint frequency bands (r_j, R_j).  Band j is tuned to
focus at the point (s_j, t_j), where its two diagonal branches contribute
4((log R_j)^{1/4} - (log r_j)^{1/4}) each, while every other band is certified
small by integration by parts.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, List, Optional, Sequence

import numpy as np

from .errors import CertificateError, DomainError, PreconditionError
from .quadrature import OscillatorySpec, ibp_bound, log_weight, osc_integral
from .specfun import phi_closed_h3

DIRECT_LIMIT = 1e6
C_MIN = 0.078  # measured minimum ratio of the default configuration, pinned


@dataclass(frozen=True)
class CounterexampleConfig:
    c1: float = 1.0
    c2: float = 1.5
    c3: float = 0.5
    c4: float = 0.75
    c5: float = 1.75
    c6: float = 1e-3
    M: float = 2.0
    K: int = 3
    gamma_fn: Callable = field(default=np.sqrt, compare=False)
    t_seq: Optional[Sequence[float]] = None

    def __post_init__(self):
        if not 0 < self.c4 < self.c1 < self.c2 < self.c5:
            raise DomainError("need 0 < c4 < c1 < c2 < c5")
        if not 0 < self.c3 < 1:
            raise DomainError("c3 must lie in (0, 1)")
        if self.c6 <= 0 or self.M <= 0 or self.K < 0:
            raise DomainError("c6 and M must be positive, K nonnegative")
        if self.t_seq is not None:
            ts = np.asarray(self.t_seq, float)
            if ts.size < self.K or ts[0] >= self.c3 or np.any(np.diff(ts) >= 0) or ts[-1] <= 0:
                raise DomainError("t_seq must be positive, strictly decreasing, start below c3 "
                                  "and cover K entries")

    @property
    def c7(self) -> float:
        return 4.0 / self.c6

    def time(self, j: int) -> float:
        if self.t_seq is not None and j <= len(self.t_seq):
            return float(self.t_seq[j - 1])
        return self.c3 / 2.0 ** j

    def containment_holds(self) -> bool:
        """Whether balls of radius gamma(c3) around the annulus stay inside [c4, c5]."""
        g = float(self.gamma_fn(self.c3))
        return self.c1 - g >= self.c4 and self.c2 + g <= self.c5

    def as_dict(self) -> dict:
        return {"c1": self.c1, "c2": self.c2, "c3": self.c3, "c4": self.c4, "c5": self.c5,
                "c6": self.c6, "c7": self.c7, "M": self.M, "K": self.K}


def dyadic_fraction(j: int) -> float:
    """j-th dyadic rational of (0, 1): level by level, descending within a level."""
    if j < 1:
        raise DomainError("index starts at 1")
    level = int(np.floor(np.log2(j))) + 1
    pos = j - 2 ** (level - 1)
    return (2 * (2 ** (level - 1) - pos) - 1) / 2.0 ** level


def dense_radius(config: CounterexampleConfig, j: int) -> float:
    return config.c4 + (config.c5 - config.c4) * dyadic_fraction(j)


@dataclass
class Certificate:
    j: int
    k: int
    r_sq_dt: float              # r_j^2 |t_k - t_j|
    decay_needed: float         # c6 2^j
    dt_r: float                 # |t_k - t_j| r_j
    separation_needed: float    # s_j + s_k + 1

    @property
    def ok(self) -> bool:
        return self.r_sq_dt >= self.decay_needed and self.dt_r > self.separation_needed


@dataclass
class CounterexampleData:
    config: CounterexampleConfig
    s_seq: np.ndarray
    t_seq: np.ndarray
    r_seq: np.ndarray
    R_seq: np.ndarray
    certificates: List[Certificate]

    @property
    def bands(self) -> int:
        return self.s_seq.size


def _certificate(cfg, s, t, r, j, k):
    dt = abs(t[k - 1] - t[j - 1])
    return Certificate(j, k, r * r * dt, cfg.c6 * 2.0 ** j, dt * r, s[j - 1] + s[k - 1] + 1.0)


def build_sequences(config: CounterexampleConfig) -> CounterexampleData:
    """Radii, times and band edges, with every band-separation inequality checked."""
    K = config.K
    s = [dense_radius(config, j) for j in range(1, K + 1)]
    t = [config.time(j) for j in range(1, K + 1)]
    r, R = [], []
    certs: List[Certificate] = []
    for j in range(1, K + 1):
        if j == 1:
            rj = 3.0
        else:
            need = R[-1]
            for k in range(1, j):
                dt = abs(t[k - 1] - t[j - 1])
                need = max(need, np.sqrt(config.c6 * 2.0 ** j / dt), (s[j - 1] + s[k - 1] + 1) / dt)
            rj = 2.0 ** (int(np.floor(np.log2(need))) + 1)
        r.append(rj)
        R.append(5.0 if j == 1 else rj ** config.M)
        for k in range(1, j):
            cert = _certificate(config, s, t, rj, j, k)
            if not cert.ok:
                raise CertificateError(f"band {j} fails its separation certificate against {k}")
            certs.append(cert)
    return CounterexampleData(config, np.array(s), np.array(t), np.array(r), np.array(R), certs)


def fhat_counter(data: CounterexampleData, lam):
    """Spectral profile of the datum: one band term or 0."""
    lam = np.asarray(lam, float)
    out = np.zeros(lam.shape, complex)
    for j in range(data.bands):
        inside = (lam > data.r_seq[j]) & (lam < data.R_seq[j])
        if np.any(inside):
            x = lam[inside]
            out[inside] = (log_weight(x) * phi_closed_h3(x, data.s_seq[j])
                           * np.exp(-1j * data.t_seq[j] * (x ** 2 + 1)))
    return out if out.ndim else complex(out)


def diagonal_value(r: float, R: float) -> float:
    """Integral of lam^{-1}(log lam)^{-3/4} over (r, R)."""
    return 4.0 * (np.log(R) ** 0.25 - np.log(r) ** 0.25)


def band_envelope(r: float, R: float) -> float:
    """Integral of 1/(lam (log lam)^{3/2}) over (r, R)."""
    return 2.0 * (np.log(r) ** -0.5 - np.log(R) ** -0.5)


def envelope_scale(config: CounterexampleConfig) -> float:
    return np.sqrt(1.0 + 1.0 / 9.0) / np.sinh(config.c4) ** 2


def h_half_norm_partial(data: CounterexampleData, J: int, tol: float = 1e-12) -> float:
    """Sum over the first J bands of integral (lam^2+1)^{1/2} |f_hat|^2 lam^2 d lam."""
    if J > data.bands:
        raise DomainError("J exceeds the number of built bands")
    total = 0.0
    for j in range(J):
        sj = data.s_seq[j]
        amp = lambda x, sj=sj: np.sqrt(x * x + 1) * np.log(x) ** -1.5 / (2 * x * x * np.sinh(sj) ** 2)
        lo, hi = data.r_seq[j], data.R_seq[j]
        flat = osc_integral(OscillatorySpec(amp, lo=lo, hi=hi), tol).value.real
        wave = osc_integral(OscillatorySpec(amp, a=2 * sj, lo=lo, hi=hi), tol).value.real
        # sin^2 = (1 - cos 2 lam s) / 2, and the 1/2 is inside amp
        total += flat - wave
    return float(total)


BRANCHES = ("u1", "u2", "u3", "u4")
# (sign of the term, sign of s, sign of s_j) in exp(i lam (sign_s s + sign_sj s_j))
_BRANCH_SHAPE = {"u1": (-1.0, 1.0, 1.0), "u2": (1.0, 1.0, -1.0),
                 "u3": (1.0, -1.0, 1.0), "u4": (-1.0, -1.0, -1.0)}


@dataclass
class BandTerm:
    j: int
    branch: str
    value: complex
    radius: float
    method: str


@dataclass
class UmEvaluation:
    value: complex
    radius: float
    terms: dict
    bands: List[BandTerm]

    @property
    def lower_bound(self) -> float:
        return abs(self.value) - self.radius


def _band_branch(data, j, branch, s, t, tol):
    sign, ss, sj_sign = _BRANCH_SHAPE[branch]
    sj, tj, lo, hi = data.s_seq[j], data.t_seq[j], data.r_seq[j], data.R_seq[j]
    a = ss * s + sj_sign * sj
    b = t - tj
    if a == 0 and b == 0:
        return diagonal_value(lo, hi) + 0j, 0.0, "closed_form"
    spec = OscillatorySpec(log_weight, a=a, b=b, c=b, lo=lo, hi=hi)
    if hi <= DIRECT_LIMIT:
        res = osc_integral(spec, tol)
        return res.value, res.abs_error_estimate, res.method
    try:
        cert = ibp_bound(spec)
    except PreconditionError as exc:
        raise CertificateError(f"band {j + 1} is beyond direct quadrature and {exc}") from exc
    return 0j, cert.bound, cert.method


def partial_solution_u_m(data: CounterexampleData, m: int, s: float, t: float,
                         tol: float = 1e-10) -> UmEvaluation:
    """Evolution of the first m bands at (s, t), split into the four exponential branches.

    Bands with R_j above the direct-quadrature limit contribute an interval
    certificate instead of a value.
    """
    if m > data.bands or m < 0:
        raise DomainError("m must lie between 0 and the number of built bands")
    if t <= 0:
        raise DomainError("t must be positive")
    terms = {b: 0j for b in BRANCHES}
    radius = 0.0
    parts: List[BandTerm] = []
    for j in range(m):
        scale = 1.0 / (4.0 * np.sinh(s) * np.sinh(data.s_seq[j]))
        for branch in BRANCHES:
            val, rad, method = _band_branch(data, j, branch, s, t, tol)
            sign = _BRANCH_SHAPE[branch][0]
            terms[branch] += sign * scale * val
            radius += scale * rad
            parts.append(BandTerm(j + 1, branch, sign * scale * val, scale * rad, method))
    return UmEvaluation(sum(terms[b] for b in BRANCHES), radius, terms, parts)


@dataclass
class BlowupRow:
    k: int
    s: float
    t: float
    m: int
    abs_value: float
    lower_bound: float
    log_root: float
    diagonal: float

    @property
    def ratio(self) -> float:
        return self.lower_bound / self.log_root


@dataclass
class BlowupReport:
    rows: List[BlowupRow]
    c_min: float

    @property
    def ratios_ok(self) -> bool:
        return all(row.ratio >= self.c_min for row in self.rows)

    @property
    def increasing(self) -> bool:
        lb = [row.lower_bound for row in self.rows]
        return all(b > a for a, b in zip(lb, lb[1:]))

    @property
    def ok(self) -> bool:
        return self.ratios_ok and self.increasing


def blowup_report(data: CounterexampleData, K: Optional[int] = None, c_min: float = C_MIN,
                  tol: float = 1e-10) -> BlowupReport:
    """Certified lower bounds on |u_m(s_k, t_k)| with m the number of built bands."""
    K = data.bands if K is None else K
    if K > data.bands:
        raise DomainError("K exceeds the number of built bands")
    rows = []
    m = data.bands
    for k in range(1, K + 1):
        sk, tk = data.s_seq[k - 1], data.t_seq[k - 1]
        ev = partial_solution_u_m(data, m, sk, tk, tol)
        rk, Rk = data.r_seq[k - 1], data.R_seq[k - 1]
        rows.append(BlowupRow(k, sk, tk, m, abs(ev.value), ev.lower_bound,
                              np.log(Rk) ** 0.25, diagonal_value(rk, Rk)))
    return BlowupReport(rows, c_min)


@dataclass
class Selection:
    time_indices: List[int]
    point_indices: List[int]
    exhausted: bool

    def __len__(self):
        return len(self.time_indices)


def _gamma_inverse(gamma_fn: Callable, y: float, hi: float) -> float:
    """Solve gamma(t) = y on (0, hi) by bisection; gamma is increasing with gamma(0) = 0."""
    lo = 0.0
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        if gamma_fn(mid) < y:
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)


def wide_approach_selector(data: CounterexampleData, x: float, depth: int = 4,
                           max_index: int = 1 << 20) -> Selection:
    """Greedy subsequence of times tending to 0 with dense points inside gamma-balls around x.

    Each step takes the largest listed time below the previous crossing time,
    then the first dense radius other than x inside the ball of radius gamma
    at that time.  Time and point indices are reported separately.
    """
    cfg = data.config
    if not cfg.c1 <= x <= cfg.c2:
        raise DomainError("x must lie in the annulus [c1, c2]")
    time_idx, point_idx = [], []
    j = 1
    threshold = np.inf
    while len(time_idx) < depth:
        while j <= max_index and cfg.time(j) >= threshold:
            j += 1
        if j > max_index:
            return Selection(time_idx, point_idx, True)
        radius = float(cfg.gamma_fn(cfg.time(j)))
        p = next((q for q in range(1, max_index + 1)
                  if 0 < abs(x - dense_radius(cfg, q)) < radius), None)
        if p is None:
            return Selection(time_idx, point_idx, True)
        time_idx.append(j)
        point_idx.append(p)
        threshold = _gamma_inverse(cfg.gamma_fn, abs(x - dense_radius(cfg, p)), cfg.time(j))
    return Selection(time_idx, point_idx, False)
