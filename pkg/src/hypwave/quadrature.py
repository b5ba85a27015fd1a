"""Oscillatory integrals with phase a*lam + b*lam^2 + c.

Panels with little phase variation use Gauss-Kronrod.  Panels that contain
a stationary point use a Filon rule whose moments against the quadratic phase
come from the Faddeeva function; all other oscillatory panels use a linear
phase Filon rule with the mild quadratic part folded into the amplitude.
Panel results are summed in a fixed order, so repeated runs are bit-identical.
"""
from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field
from typing import Callable, Optional, Sequence

import numpy as np
from scipy.special import comb, wofz

from .errors import PreconditionError

GAUSS_KRONROD = "GaussKronrod"
FILON = "FilonPanel"
IBP_BOUND = "IBPBound"

# 15 point Kronrod extension of the 7 point Gauss rule (nonnegative half)
_XGK = np.array([0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
                 0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
                 0.586087235467691130294144845693013, 0.405845151377397166906606412076961,
                 0.207784955007898467600689403773245, 0.0])
_WGK = np.array([0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
                 0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
                 0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
                 0.204432940075298892414161999234649, 0.209482141084727828012999174891714])
_WG = np.array([0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
                0.381830050505118944950369775488975, 0.417959183673469387755102040816327])
GK_NODES = np.concatenate([-_XGK[:-1], _XGK[::-1]])
GK_WEIGHTS = np.concatenate([_WGK[:-1], _WGK[::-1]])
_G_IDX = np.array([1, 3, 5, 7, 9, 11, 13])
G_WEIGHTS = np.concatenate([_WG[:-1], _WG[::-1]])

FILON_DEGREE = 14
_CHEB = np.cos(np.pi * (np.arange(FILON_DEGREE + 1) + 0.5) / (FILON_DEGREE + 1))
_CHEB_T = np.cos(np.outer(np.arange(FILON_DEGREE + 1),
                          np.pi * (np.arange(FILON_DEGREE + 1) + 0.5) / (FILON_DEGREE + 1)))
_CHEB2POW = np.zeros((FILON_DEGREE + 1, FILON_DEGREE + 1))
for _k in range(FILON_DEGREE + 1):
    _row = np.polynomial.chebyshev.cheb2poly(np.eye(FILON_DEGREE + 1)[_k])
    _CHEB2POW[_k, :_row.size] = _row

GK_PHASE_LIMIT = 30.0
QUAD_BETA_MIN = 1.5
MAX_DEPTH = 40


def _smoothstep7(y):
    y = np.clip(y, 0.0, 1.0)
    n = 7
    total = sum(comb(n + k, k) * comb(2 * n + 1, n - k) * (-y) ** k for k in range(n + 1))
    return y ** (n + 1) * total


def smooth_cutoff(x):
    """Bump equal to 1 on [0, 1] and 0 on [2, inf) with a C^7 polynomial join."""
    x = np.asarray(x, float)
    return 1.0 - _smoothstep7(x - 1.0)


@dataclass
class OscillatorySpec:
    amplitude: Callable
    a: float = 0.0
    b: float = 0.0
    c: float = 0.0
    lo: float = 0.0
    hi: float = np.inf
    cutoff_N: Optional[float] = None
    cutoff: Callable = field(default=smooth_cutoff, repr=False)
    breakpoints: Sequence[float] = ()
    tail_mass: Optional[Callable] = None
    singular_lo: bool = False

    def __post_init__(self):
        if self.lo < 0:
            raise ValueError("lower limit must be nonnegative")
        if self.hi <= self.lo:
            raise ValueError("empty integration domain")

    def integrand_amplitude(self, lam):
        amp = np.asarray(self.amplitude(lam), complex)
        if self.cutoff_N is not None:
            amp = amp * self.cutoff(lam / self.cutoff_N)
        return amp


@dataclass
class IntegralResult:
    value: complex
    abs_error_estimate: float
    method: str
    warning: bool = False
    panels: int = 0
    bound: Optional[float] = None


def _gk_panels(amp, x0, x1, slope, curv):
    """Gauss-Kronrod on many panels; the phase is expanded about each panel centre."""
    c, h = 0.5 * (x0 + x1), 0.5 * (x1 - x0)
    dx = h[:, None] * GK_NODES[None, :]
    vals = amp(c[:, None] + dx) * np.exp(1j * (slope[:, None] * dx + curv * dx * dx))
    k = h * (vals @ GK_WEIGHTS)
    g = h * (vals[:, _G_IDX] @ G_WEIGHTS)
    return k, np.abs(k - g), h * (np.abs(vals) @ GK_WEIGHTS)


def _linear_moments(omega, p):
    """Moments of y^k exp(i omega y) over [-1, 1]; stable for |omega| > p."""
    m = np.empty(omega.shape + (p + 1,), complex)
    ep, em = np.exp(1j * omega), np.exp(-1j * omega)
    m[:, 0] = 2 * np.sin(omega) / omega
    for k in range(1, p + 1):
        m[:, k] = (ep - (-1) ** k * em - k * m[:, k - 1]) / (1j * omega)
    return m


def _quadratic_moments(omega, beta, p):
    """Moments of y^k exp(i(omega y + beta y^2)) over [-1, 1].

    The zeroth moment is a difference of error functions of complex argument,
    written through the Faddeeva function so that no large terms cancel.
    """
    m = np.empty(omega.shape + (p + 1,), complex)
    ep = np.exp(1j * (omega + beta))
    em = np.exp(1j * (beta - omega))
    z = np.sqrt(np.abs(beta)) * np.exp(-1j * np.pi / 4 * np.sign(beta))
    shift = omega / (2 * beta)
    u1, u0 = 1 + shift, -1 + shift
    stat = np.exp(-1j * omega ** 2 / (4 * beta))
    part1 = np.sign(u1) * (stat - ep * wofz(1j * z * np.abs(u1)))
    part0 = np.sign(u0) * (stat - em * wofz(1j * z * np.abs(u0)))
    m[:, 0] = np.sqrt(np.pi) / (2 * z) * (part1 - part0)
    prev = np.zeros_like(omega, dtype=complex)
    for k in range(p):
        edge = ep - (-1) ** k * em
        m[:, k + 1] = (-1j * edge + 1j * k * prev - omega * m[:, k]) / (2 * beta)
        prev = m[:, k]
    return m


class _Engine:
    """Level-synchronous adaptive panel integrator."""

    def __init__(self, spec: OscillatorySpec, tol: float, width: float):
        self.spec = spec
        self.tol = tol
        self.width = width
        self.a, self.b = float(spec.a), float(spec.b)
        self.used_filon = False
        self.warn = False
        self.done = []

    def phase(self, lam):
        return self.a * lam + self.b * lam * lam

    def _accept(self, x0, vals, errs):
        for item in zip(x0, vals, errs):
            self.done.append(item)

    def run(self, x0, x1):
        amp = self.spec.integrand_amplitude
        eps = np.finfo(float).eps
        for depth in range(MAX_DEPTH + 1):
            if x0.size == 0:
                break
            last = depth == MAX_DEPTH
            c, h = 0.5 * (x0 + x1), 0.5 * (x1 - x0)
            slope = self.a + 2 * self.b * c
            omega, beta = slope * h, self.b * h * h
            tol_p = self.tol * (x1 - x0) / self.width
            gk = np.abs(omega) + np.abs(beta) <= GK_PHASE_LIMIT
            lin = ~gk & ((np.abs(beta) <= QUAD_BETA_MIN) | (abs(self.b) < 1e-14))
            quad = ~gk & ~lin & (np.abs(omega) <= 4 * np.abs(beta))
            split = ~gk & ~lin & ~quad
            retry = np.zeros(x0.size, bool)

            if gk.any():
                val, err, mass = _gk_panels(amp, x0[gk], x1[gk], slope[gk], self.b)
                val = val * np.exp(1j * self.phase(c[gk]))
                ok = (err <= np.maximum(tol_p[gk], 50 * eps * mass)) | last
                self.warn |= bool(np.any(err[ok] > np.maximum(tol_p[gk][ok], 50 * eps * mass[ok])))
                self._accept(x0[gk][ok], val[ok], err[ok])
                retry[np.flatnonzero(gk)[~ok]] = True
            for mask, linear in ((lin, True), (quad, False)):
                if not mask.any():
                    continue
                val, trunc, rounding = self._filon(c[mask], h[mask], omega[mask], beta[mask], linear)
                lim = np.maximum(tol_p[mask], rounding)
                ok = (trunc <= lim) | last
                self.warn |= bool(np.any(trunc[ok] > lim[ok]))
                self._accept(x0[mask][ok], val[ok], (trunc + rounding)[ok])
                retry[np.flatnonzero(mask)[~ok]] = True

            nx0, nx1 = [x0[retry], c[retry]], [c[retry], x1[retry]]
            if split.any():
                # cut wide panels straight to a size where the quadratic part is mild
                for a0, a1, bb in zip(x0[split], x1[split], beta[split]):
                    m = int(np.ceil(np.sqrt(abs(bb) / QUAD_BETA_MIN)))
                    edges = np.linspace(a0, a1, m + 1)
                    nx0.append(edges[:-1])
                    nx1.append(edges[1:])
            x0, x1 = np.concatenate(nx0), np.concatenate(nx1)
        return self.done

    def _filon(self, c, h, omega, beta, linear):
        y = _CHEB
        amp = self.spec.integrand_amplitude(c[:, None] + h[:, None] * y[None, :])
        if linear:
            amp = amp * np.exp(1j * beta[:, None] * y[None, :] ** 2)
        coef = amp @ _CHEB_T.T * (2.0 / (FILON_DEGREE + 1))
        coef[:, 0] *= 0.5
        scale = np.abs(coef).sum(axis=1)
        trunc = 2 * h * (np.abs(coef[:, -1]) + np.abs(coef[:, -2]))
        powers = coef @ _CHEB2POW
        if linear:
            mom = _linear_moments(omega, FILON_DEGREE)
        else:
            mom = _quadratic_moments(omega, beta, FILON_DEGREE)
        self.used_filon = True
        val = h * np.exp(1j * self.phase(c)) * np.einsum("ij,ij->i", powers, mom)
        # the monomial basis and the moment recursion cost a few digits
        rounding = 1e3 * np.finfo(float).eps * 2 * h * scale
        return val, trunc, rounding


def _truncate(spec: OscillatorySpec, tol: float):
    hi = spec.hi
    warn = False
    if spec.cutoff_N is not None:
        hi = min(hi, 2.0 * spec.cutoff_N)
    if np.isfinite(hi):
        return hi, warn
    x = max(2.0 * spec.lo, 1.0)
    for _ in range(200):
        if spec.tail_mass is not None:
            if spec.tail_mass(x) < tol / 10:
                return x, warn
        else:
            probe = np.linspace(x, 2 * x, 33)
            if np.max(np.abs(spec.integrand_amplitude(probe))) * x < tol / 10:
                warn = True
                return 2 * x, True
        x *= 2
    raise PreconditionError("amplitude does not decay; cannot truncate the domain")


def _initial_breaks(spec: OscillatorySpec, hi: float):
    lo = spec.lo
    pts = {lo, hi}
    k = math.floor(math.log2(max(lo, 1e-300))) + 1 if lo > 0 else 0
    x = 2.0 ** k if lo > 0 else 1.0
    while x < hi:
        if x > lo:
            pts.add(x)
        x *= 2
    if lo == 0 and spec.singular_lo:
        first = min(p for p in pts if p > 0)
        for j in range(1, 61):
            pts.add(first * 2.0 ** -j)
    extra = list(spec.breakpoints)
    if spec.cutoff_N is not None:
        extra += [spec.cutoff_N, 2 * spec.cutoff_N]
    pts.update(p for p in extra if lo < p < hi)
    return sorted(pts)


def osc_integral(spec: OscillatorySpec, tol: float = 1e-10) -> IntegralResult:
    """Integrate amplitude(lam) exp(i(a lam + b lam^2 + c)) over (lo, hi]."""
    hi, warn = _truncate(spec, tol)
    breaks = _initial_breaks(spec, hi)
    width = hi - spec.lo
    eng = _Engine(spec, tol, width)
    b = np.asarray(breaks, float)
    if spec.singular_lo and spec.lo == 0:
        b = b[1:]  # [0, delta] is handled in closed form below
    pieces = sorted(eng.run(b[:-1], b[1:]), key=lambda item: item[0])
    vals = np.array([p[1] for p in pieces], complex)
    err = float(math.fsum(p[2] for p in pieces))
    total = complex(math.fsum(vals.real), math.fsum(vals.imag))
    if spec.singular_lo and spec.lo == 0:
        # leftover [0, delta] integrated assuming lam^{-1/2} behaviour
        delta = breaks[1]
        total += 2 * delta * complex(spec.integrand_amplitude(np.array([delta]))[0])
    total *= np.exp(1j * spec.c)
    if eng.warn or warn:
        if eng.warn:
            warnings.warn("oscillatory quadrature did not reach the requested tolerance",
                          RuntimeWarning, stacklevel=2)
    method = FILON if eng.used_filon else GAUSS_KRONROD
    return IntegralResult(total, err, method, eng.warn or warn, len(pieces))


def log_weight(lam):
    """Amplitude lam^{-1} (log lam)^{-3/4} used by the blow-up construction."""
    lam = np.asarray(lam, float)
    return 1.0 / (lam * np.log(lam) ** 0.75)


def ibp_bound(spec: OscillatorySpec) -> IntegralResult:
    """Integration-by-parts certificate for the amplitude lam^{-1}(log lam)^{-3/4}.

    With |phase'| >= |b| lam on the domain, the boundary terms and the total
    variation of amplitude/phase' add up to at most 4/(|b| lo^2).  For a
    purely linear phase the same argument gives 2 g(lo)/|a|.
    """
    lo = spec.lo
    if lo <= 1:
        raise PreconditionError("certificate needs lo > 1 so the log weight is decreasing")
    a, b = abs(spec.a), abs(spec.b)
    if b > 0:
        if a >= b * lo:
            raise PreconditionError("phase derivative bound |a| < |b| lo does not hold")
        bound = 4.0 / (b * lo * lo)
    else:
        if a == 0:
            raise PreconditionError("no oscillation to integrate by parts against")
        bound = 2.0 * float(log_weight(lo)) / a
    return IntegralResult(0j, bound, IBP_BOUND, False, 0, bound)


def scaled_phase_kernel(kappa_s: float, kappa_s2: float, t_s: float, t_s2: float, C_shift: float,
                        N: float, mu_cutoff: Callable = smooth_cutoff, tol: float = 1e-9) -> complex:
    """Integral of exp(i(lam dk + dt (lam^2 + C))) lam^{-1/2} mu(lam/N) over lam > 0."""
    if N < 1:
        raise ValueError("N must be at least 1")
    dk = kappa_s - kappa_s2
    dt = t_s - t_s2
    spec = OscillatorySpec(lambda lam: lam ** -0.5, a=dk, b=dt, c=dt * C_shift, lo=0.0,
                           cutoff_N=N, cutoff=mu_cutoff, singular_lo=True)
    return osc_integral(spec, tol).value
