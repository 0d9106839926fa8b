"""Rayleigh-Taylor function, energy monitors, strip-width fit and the h(t) integrator.

The energies here are monitors, not certified bounds: the unknown constant
``C`` of the a-priori estimates is exposed as a parameter (default 1).
"""

from __future__ import annotations

import math
from dataclasses import astuple, dataclass, fields
from typing import NamedTuple, Optional

import numpy as np

from .dynamics import EvolutionOptions, Velocity, velocity
from .errors import InsufficientSpectrumError
from .spectral_curve import (
    PeriodicCurve,
    StripSpec,
    arc_chord,
    check_strip,
    decay_rate,
    derivative,
    sampled_hk_norm,
    sobolev_strip_norm,
    strip_samples,
    tangent_speed2,
)
from .vorticity_solver import FluidParams

CSV_COLUMNS = ("t", "A", "arc_chord_max", "sigma_min", "strip_rho",
               "sobolev_h4", "rt_energy", "h_of_t")


@dataclass(frozen=True)
class DiagRecord:
    t: float
    A: float
    arc_chord_max: float
    sigma_min: float
    strip_rho: float
    sobolev_h4: float
    rt_energy: float
    h_of_t: float

    def csv_row(self) -> str:
        return ",".join(format_float(v) for v in astuple(self))

    @staticmethod
    def csv_header() -> str:
        return ",".join(f.name for f in fields(DiagRecord))


def format_float(x: float) -> str:
    return "%.17g" % x


def rayleigh_taylor(curve: PeriodicCurve, w, br, params: FluidParams) -> np.ndarray:
    """``sigma = (mu2/kappa) BR . d^perp z + g rho2 dz1`` with ``(a, b)^perp = (-b, a)``."""
    d1, d2 = derivative(curve, 1)
    u1, u2 = br
    return (params.mu2 / params.kappa) * (-u1 * d2 + u2 * d1) + params.g * params.rho2 * d1


def sigma_min(curve: PeriodicCurve, w, br, params: FluidParams) -> tuple[float, float]:
    """Grid minimum of sigma and the parameter value where it is attained."""
    s = rayleigh_taylor(curve, w, br, params)
    j = int(np.argmin(s))
    return float(s[j]), float(curve.grid[j])


def strip_width(curve: PeriodicCurve, floor: float = 1e-13, top: float = 1e-2,
                min_modes: int = 8) -> float:
    """Fitted exponential decay rate of the spectrum (analyticity half-width estimate).

    Raises :class:`InsufficientSpectrumError` on band-limited data.
    """
    return decay_rate(curve, floor=floor, top=top, min_modes=min_modes)


def _strip_arc_chord(z1s, z2s, lift: float, d1s, d2s) -> float:
    """``sup |beta^2 / (dz . dz)|`` for complex strip samples (no conjugation)."""
    n = z1s.shape[0]
    h = 2.0 * np.pi / n
    diag = np.abs(1.0 / (d1s * d1s + d2s * d2s))
    best = float(diag.max())
    idx = np.arange(n)
    for shift in range(1, n):
        beta = shift * h
        j = (idx - shift) % n
        wrap = (idx - shift) < 0
        dz1 = z1s - z1s[j] - np.where(wrap, lift * 2.0 * np.pi, 0.0)
        dz2 = z2s - z2s[j]
        bb = beta if lift else min(beta, 2.0 * np.pi - beta)
        val = np.abs(bb * bb / (dz1 * dz1 + dz2 * dz2))
        best = max(best, float(val.max()))
    return best


def strip_arc_chord(curve: PeriodicCurve, xi: float, force: bool = False) -> float:
    """Arc-chord constant ``||F(z)||_{L^inf(S)}`` over both strip edges.

    Complex chords use the bilinear square ``dz1^2 + dz2^2``.  At ``xi = 0``
    this is the ordinary grid arc-chord value.
    """
    if xi == 0:
        return arc_chord(curve).value
    check_strip(curve, xi, force=force)
    best = 0.0
    grid = curve.grid
    for s in (1, -1):
        z1s = curve.lift * (grid + 1j * s * xi) + strip_samples(curve.p1, xi, s)
        z2s = strip_samples(curve.p2, xi, s)
        d1s = curve.lift + strip_samples(curve.p1, xi, s, order=1)
        d2s = strip_samples(curve.p2, xi, s, order=1)
        best = max(best, _strip_arc_chord(z1s, z2s, curve.lift, d1s, d2s))
    return best


def _h2_strip(pieces) -> float:
    """``H^2(S)`` norm of a quantity given by its samples on each strip edge."""
    total = 0.0
    for g in pieces:
        total += sampled_hk_norm(g, 2, 2.0 * np.pi / g.shape[0])
    return math.sqrt(total)


def f_norm(curve: PeriodicCurve, w, c, xi: float, weight=None,
           A_power: tuple[int, int] = (1, 1)) -> float:
    """Sum of ``H^2(S)`` norms of the imaginary parts that feed the RT denominator.

    ``||Im(q/A^a)|| + ||Im(dz).Re(dz q/A^b)|| + ||Im(dz).Im(dz q/A^b)|| + ||Im(c)||``
    with ``q = varpi * weight`` continued into the strip.  ``A_power = (a, b)``;
    the physical system uses ``(1, 0)`` and the tilde system ``(1, 2)``.
    Vector products are dot products.  All terms vanish at ``xi = 0``.
    """
    if xi == 0:
        return 0.0
    A = float(np.mean(tangent_speed2(curve)))
    q = np.asarray(w, dtype=float)
    if weight is not None:
        q = q * weight
    a, b = A_power
    t1, t2, t3, t4 = [], [], [], []
    for s in (1, -1):
        qs = strip_samples(q, xi, s)
        d1 = curve.lift + strip_samples(curve.p1, xi, s, order=1)
        d2 = strip_samples(curve.p2, xi, s, order=1)
        p1 = d1 * qs / A**b
        p2 = d2 * qs / A**b
        t1.append((qs / A**a).imag)
        t2.append(d1.imag * p1.real + d2.imag * p2.real)
        t3.append(d1.imag * p1.imag + d2.imag * p2.imag)
        t4.append(strip_samples(c, xi, s).imag)
    return _h2_strip(t1) + _h2_strip(t2) + _h2_strip(t3) + _h2_strip(t4)


class RTEnergy(NamedTuple):
    value: float
    finite: bool
    reason: str
    arc_chord: float
    l2_strip: float
    m: float
    f_norm: float


def _denominator(m, lam, fn, C):
    if 2.0 * lam >= m:
        return None, "lambda-guard"
    den = m - 2.0 * lam - C * fn
    if not den > 0:
        return None, "denominator"
    return den, ""


def rt_energy(curve: PeriodicCurve, params: FluidParams, lam: float, strip_xi: float,
              C: float = 1.0, opts: EvolutionOptions = EvolutionOptions(),
              vel: Optional[Velocity] = None, force: bool = False) -> RTEnergy:
    """``||F(z)||^2_{L^inf(S)} + ||z||^2_{L^2(S)} + 1/(m - 2 lambda - C ||f||)``.

    The reciprocal term becomes ``+inf`` (``finite=False``) when
    ``lambda >= m/2`` or when the denominator is otherwise non-positive;
    ``reason`` names which.
    """
    if vel is None:
        vel = velocity(curve, params, opts)
    m, _ = sigma_min(curve, vel.vorticity, vel.br, params)
    ac = strip_arc_chord(curve, strip_xi, force=force)
    l2 = sobolev_strip_norm(curve, 0, StripSpec(strip_xi), force=force)
    fn = f_norm(curve, vel.vorticity, vel.c, strip_xi, A_power=(1, 0))
    den, reason = _denominator(m, lam, fn, C)
    if den is None:
        return RTEnergy(math.inf, False, reason, ac, l2, m, fn)
    return RTEnergy(ac * ac + l2 + 1.0 / den, True, "", ac, l2, m, fn)


class HSeries(NamedTuple):
    h: np.ndarray
    collapsed: bool
    collapse_index: int


def h_integrator(G, t, h0: float) -> HSeries:
    """Strip half-width ``h(t) = exp(-10 I) [int_0^t -10 G exp(10 I) dr + h0]``, ``I = int_0^t G``.

    The inner integral has the closed form ``1 - exp(10 I)``, so
    ``h = h0 exp(-10 I) + expm1(-10 I)``; ``I`` is a cumulative trapezoid over
    the samples.  ``collapsed`` is set when ``h`` reaches zero (diagnostic
    only, the series is still returned).
    """
    G = np.asarray(G, dtype=float)
    t = np.asarray(t, dtype=float)
    if G.shape != t.shape or G.ndim != 1 or G.size == 0:
        raise ValueError("G and t must be 1-d arrays of equal, non-zero length")
    if not h0 > 0:
        raise ValueError("h0 must be positive")
    if np.any(G < 0):
        raise ValueError("G must be non-negative")
    if np.any(np.diff(t) < 0):
        raise ValueError("t must be non-decreasing")
    I = np.concatenate(([0.0], np.cumsum(0.5 * (G[1:] + G[:-1]) * np.diff(t))))
    h = h0 * np.exp(-10.0 * I) + np.expm1(-10.0 * I)
    bad = np.nonzero(h <= 0)[0]
    if bad.size:
        return HSeries(h, True, int(bad[0]))
    return HSeries(h, False, -1)


def g_proxy(arc_chord_max: float, sobolev_h4: float, C: float = 1.0) -> float:
    """``exp(C (||F||^2 + ||z||^2_{H^4}))``, the default driver for :func:`h_integrator`.

    Saturates to ``inf`` instead of overflowing.
    """
    x = C * (arc_chord_max**2 + sobolev_h4**2)
    return math.exp(x) if x < 709.0 else math.inf


def h4_norm(curve: PeriodicCurve) -> float:
    """Real-line ``H^4`` norm of ``z - (alpha, 0)``."""
    return math.sqrt(sobolev_strip_norm(curve, 4, StripSpec(0.0, "plus")))


def speed_spread(curve: PeriodicCurve) -> float:
    """``(max - min) / mean`` of ``|dz/dalpha|^2``."""
    s = tangent_speed2(curve)
    return float(np.ptp(s) / s.mean())


def diagnose(curve: PeriodicCurve, params: FluidParams, t: float = 0.0,
             lam: float = 0.0, strip_xi: float = 0.0, C: float = 1.0,
             h: float = math.nan, opts: EvolutionOptions = EvolutionOptions(),
             vel: Optional[Velocity] = None) -> DiagRecord:
    """One :class:`DiagRecord`; ``strip_rho`` is ``inf`` for band-limited data."""
    if vel is None:
        vel = velocity(curve, params, opts)
    try:
        rho = strip_width(curve)
    except InsufficientSpectrumError:
        rho = math.inf
    en = rt_energy(curve, params, lam, strip_xi, C, opts, vel=vel)
    return DiagRecord(
        t=float(t),
        A=float(np.mean(tangent_speed2(curve))),
        arc_chord_max=float(arc_chord(curve).value),
        sigma_min=en.m,
        strip_rho=float(rho),
        sobolev_h4=h4_norm(curve),
        rt_energy=en.value,
        h_of_t=float(h),
    )
