"""Interface velocity, explicit time stepping and the regularisations.

The interface moves with ``z_t = BR(z, varpi) + c dz/dalpha`` where the
tangential speed ``c`` keeps ``|dz/dalpha|^2`` independent of ``alpha``.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field, replace
from typing import Callable, Iterator, NamedTuple, Optional

import numpy as np

from .errors import BlowUpError
from .singular_integrals import birkhoff_rott
from .spectral_curve import (
    PeriodicCurve,
    antiderivative,
    arc_chord,
    derivative,
    krasny_filter,
    spectral_derivative,
    wavenumbers,
)
from .vorticity_solver import FluidParams, SolverOptions, mollifier, solve_vorticity

log = logging.getLogger(__name__)

ARC_CHORD_LIMIT = 1e12


@dataclass(frozen=True)
class EvolutionOptions:
    """Time-stepping configuration.

    ``dt=None`` selects ``c_stab / (R * N_active)``, where ``N_active`` is the
    largest retained Fourier mode.
    """

    dt: Optional[float] = None
    t_end: float = 1.0
    filter_threshold: float = 1e-13
    galerkin_N: Optional[int] = None
    mollify_eps: float = 0.0
    snapshot_every: int = 0
    c_stab: float = 0.5
    tangential: bool = True
    solver: SolverOptions = field(default_factory=SolverOptions)

    def __post_init__(self):
        if self.dt is not None and not self.dt > 0:
            raise ValueError("dt must be positive")
        if self.mollify_eps < 0:
            raise ValueError("mollify_eps must be >= 0")
        if self.galerkin_N is not None and self.galerkin_N < 1:
            raise ValueError("galerkin_N must be >= 1")
        if self.t_end < 0:
            raise ValueError("t_end must be >= 0")

    def time_step(self, n_points: int, R: float) -> float:
        if self.dt is not None:
            return self.dt
        n_active = self.galerkin_N or n_points // 2
        if R <= 0:
            return max(self.t_end, 1e-3)
        return self.c_stab / (R * n_active)


class Velocity(NamedTuple):
    v1: np.ndarray
    v2: np.ndarray
    vorticity: np.ndarray
    br: tuple[np.ndarray, np.ndarray]
    c: np.ndarray


def mollify(f, eps: float) -> np.ndarray:
    """Heat-kernel smoothing, Fourier multiplier ``exp(-eps k^2)``."""
    f = np.asarray(f, dtype=float)
    if eps == 0:
        return f.copy()
    if eps < 0:
        raise ValueError("eps must be >= 0")
    return np.fft.ifft(np.fft.fft(f) * mollifier(f.shape[-1], eps)).real


def galerkin_project(curve: PeriodicCurve, n_modes: int) -> PeriodicCurve:
    """Truncate the periodic part to Fourier modes ``|k| <= n_modes``."""
    n = curve.n_points
    if n_modes > n // 2:
        raise ValueError(f"n_modes={n_modes} exceeds n_points/2={n // 2}")
    keep = np.abs(wavenumbers(n)) <= n_modes
    p1 = np.fft.ifft(np.fft.fft(curve.p1) * keep).real
    p2 = np.fft.ifft(np.fft.fft(curve.p2) * keep).real
    return curve.replace(p1, p2)


def tangential_speed(curve: PeriodicCurve, br) -> np.ndarray:
    """Tangential speed that keeps ``|dz|^2`` uniform in ``alpha``.

    With ``f = dz/|dz|^2 . d(BR)``,
    ``c(alpha) = (alpha+pi)/(2pi) int_T f - int_{-pi}^alpha f``, which is the
    negative antiderivative of ``f - mean(f)`` pinned to ``c(-pi) = 0``.
    """
    d1, d2 = derivative(curve, 1)
    s2 = d1 * d1 + d2 * d2
    b1 = spectral_derivative(br[0], 1)
    b2 = spectral_derivative(br[1], 1)
    f = (d1 * b1 + d2 * b2) / s2
    G = antiderivative(f)
    return G[0] - G


def assemble_velocity(curve: PeriodicCurve, w, br_factor=None,
                      tangential: bool = True) -> Velocity:
    """``factor * BR(z, w) + c dz`` for a given vorticity."""
    u1, u2 = birkhoff_rott(curve, w)
    if br_factor is not None:
        u1 = br_factor * u1
        u2 = br_factor * u2
    br = (u1, u2)
    if tangential:
        c = tangential_speed(curve, br)
    else:
        c = np.zeros(curve.n_points)
    d1, d2 = derivative(curve, 1)
    return Velocity(u1 + c * d1, u2 + c * d2, np.asarray(w), br, c)


def velocity(curve: PeriodicCurve, params: FluidParams,
             opts: EvolutionOptions = EvolutionOptions()) -> Velocity:
    """Interface velocity ``BR(z, varpi) + c dz`` with its intermediates."""
    w = solve_vorticity(curve, params, opts.solver, opts.mollify_eps)
    return assemble_velocity(curve, w, tangential=opts.tangential)


def _postprocess(curve: PeriodicCurve, opts: EvolutionOptions) -> PeriodicCurve:
    if opts.filter_threshold > 0:
        curve = curve.replace(krasny_filter(curve.p1, opts.filter_threshold),
                              krasny_filter(curve.p2, opts.filter_threshold))
    if opts.galerkin_N is not None:
        curve = galerkin_project(curve, opts.galerkin_N)
    return curve


def _advance(curve, k, dt, opts):
    p1 = curve.p1 + dt * k[0]
    p2 = curve.p2 + dt * k[1]
    if not (np.all(np.isfinite(p1)) and np.all(np.isfinite(p2))):
        raise BlowUpError("non-finite curve samples", state=curve)
    return _postprocess(curve.replace(p1, p2), opts)


def rk4_step(curve: PeriodicCurve, dt: float, rhs: Callable,
             opts: EvolutionOptions = EvolutionOptions()) -> PeriodicCurve:
    """Classical RK4 step of ``dp/dt = rhs(curve)``; filters applied after every stage."""
    k1 = rhs(curve)
    k2 = rhs(_advance(curve, k1, 0.5 * dt, opts))
    k3 = rhs(_advance(curve, k2, 0.5 * dt, opts))
    k4 = rhs(_advance(curve, k3, dt, opts))
    k = (
        (k1[0] + 2.0 * k2[0] + 2.0 * k3[0] + k4[0]) / 6.0,
        (k1[1] + 2.0 * k2[1] + 2.0 * k3[1] + k4[1]) / 6.0,
    )
    return _advance(curve, k, dt, opts)


def step_rk4(curve: PeriodicCurve, params: FluidParams,
             opts: EvolutionOptions = EvolutionOptions(),
             dt: Optional[float] = None) -> PeriodicCurve:
    """One RK4 step of the interface evolution."""
    if dt is None:
        dt = opts.time_step(curve.n_points, params.R)

    def rhs(c):
        v = velocity(c, params, opts)
        return v.v1, v.v2

    return rk4_step(curve, dt, rhs, opts)


def prepare_initial(curve: PeriodicCurve, opts: EvolutionOptions) -> PeriodicCurve:
    """Mollify once (epsilon system) and apply the projection/filter."""
    if opts.mollify_eps > 0:
        curve = curve.replace(mollify(curve.p1, opts.mollify_eps),
                              mollify(curve.p2, opts.mollify_eps))
    if opts.galerkin_N is not None:
        curve = galerkin_project(curve, opts.galerkin_N)
    return curve


def evolve(curve: PeriodicCurve, params: FluidParams,
           opts: EvolutionOptions = EvolutionOptions(),
           check_arc_chord: bool = True) -> Iterator[tuple[int, float, PeriodicCurve]]:
    """Yield ``(step, t, curve)`` from ``t = 0`` up to ``opts.t_end``.

    Raises :class:`BlowUpError` (carrying the last finite state) on
    non-finite data or when the arc-chord constant exceeds ``1e12``.
    """
    curve = prepare_initial(curve, opts)
    dt = opts.time_step(curve.n_points, params.R)
    n_steps = int(np.ceil(opts.t_end / dt - 1e-12)) if opts.t_end > 0 else 0
    t = 0.0
    yield 0, t, curve
    for step in range(1, n_steps + 1):
        h = min(dt, opts.t_end - t)
        try:
            new = step_rk4(curve, params, opts, dt=h)
        except BlowUpError as exc:
            raise BlowUpError(str(exc), state=curve, t=t) from exc
        if check_arc_chord:
            ac = arc_chord(new).value
            if not ac < ARC_CHORD_LIMIT:
                raise BlowUpError(f"arc-chord constant {ac:.3e} exceeds limit",
                                  state=curve, t=t)
        curve = new
        t = step * dt if step < n_steps else opts.t_end
        yield step, t, curve


def integrate(curve: PeriodicCurve, params: FluidParams,
              opts: EvolutionOptions = EvolutionOptions(),
              check_arc_chord: bool = False) -> PeriodicCurve:
    """Final state of :func:`evolve`."""
    last = curve
    for _, _, last in evolve(curve, params, opts, check_arc_chord):
        pass
    return last


def with_options(opts: EvolutionOptions, **kw) -> EvolutionOptions:
    return replace(opts, **kw)
