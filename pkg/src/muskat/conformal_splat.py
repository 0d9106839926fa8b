"""Conformal splat probe.

The map ``P(w) = tan(w/2)^(1/2)`` sends one period of the physical domain to
a half plane.  With the default ``branch_angle = 0`` the square-root cut
lies along the positive real axis of ``tan(w/2)``, i.e. along the physical
segment ``{0 <= x < pi, y = 0}``; a vacuum gap straddling that segment is
opened up into two well separated arcs, while the deep fluid ``y -> -inf``
lands on ``q2`` and the far vacuum ``y -> +inf`` on ``q1``.

The physical interface (period-advancing) becomes a closed clockwise curve
around ``q2``.  In the tilde domain it moves with

    z~_t = Q^2 BR(z~, w~) + c~ dz~,   Q^2 = |dP/dw|^2,
    w~ + 2 BR(z~, w~).dz~ = -2 R d/dalpha[Im P^{-1}(z~)],

with ``c~`` built from ``BR(z~, w~)`` exactly as the physical ``c``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import NamedTuple, Optional

import numpy as np

from .diagnostics import f_norm, strip_arc_chord, _denominator
from .dynamics import EvolutionOptions, Velocity, rk4_step, tangential_speed
from .errors import ClearanceError, SingularityError
from .singular_integrals import birkhoff_rott
from .spectral_curve import (
    PeriodicCurve,
    StripSpec,
    derivative,
    sobolev_strip_norm,
    wavenumbers,
)
from .vorticity_solver import FluidParams, solve_linear

POLE_GUARD = 1e-14
CLEARANCE_GUARD = 1e-12

Q_POINTS = np.array([
    0.0,
    np.exp(0.25j * np.pi),
    np.exp(0.75j * np.pi),
    np.exp(-0.75j * np.pi),
    np.exp(-0.25j * np.pi),
])


def q_points() -> np.ndarray:
    """The five singular points ``q0..q4`` of the inverse map."""
    return Q_POINTS.copy()


def _sqrt_cut(u, branch_angle: float):
    """Square root whose cut is the ray ``arg u = branch_angle``."""
    u = np.asarray(u, dtype=complex)
    rot = np.exp(-1j * branch_angle)
    a = np.angle(u * rot)
    a = np.where(a <= 0, a + 2.0 * np.pi, a)
    return np.sqrt(np.abs(u)) * np.exp(0.5j * (a + branch_angle))


def map_P(w, branch_angle: float = 0.0):
    """``P(w) = tan(w/2)^(1/2)`` on the branch cut along ``arg tan(w/2) = branch_angle``."""
    w = np.asarray(w, dtype=complex)
    c = np.cos(0.5 * w)
    if np.any(np.abs(c) < POLE_GUARD):
        j = int(np.argmin(np.abs(c)))
        raise SingularityError(f"tan(w/2) has a pole near w = {w.flat[j]}")
    return _sqrt_cut(np.tan(0.5 * w), branch_angle)


def clearances(wt) -> np.ndarray:
    """``m(q^l) = min |w~ - q^l|`` for ``l = 0..4``."""
    wt = np.asarray(wt, dtype=complex).ravel()
    return np.abs(wt[:, None] - Q_POINTS[None, :]).min(axis=0)


def _guard_clearance(wt, points=range(5)) -> None:
    wt = np.asarray(wt, dtype=complex).ravel()
    points = list(points)
    d = np.abs(wt[:, None] - Q_POINTS[None, points])
    j, i = np.unravel_index(int(np.argmin(d)), d.shape)
    l = points[i]
    if d[j, i] < CLEARANCE_GUARD:
        raise ClearanceError(f"point {wt[j]} within {CLEARANCE_GUARD:g} of q{l}",
                             point=int(l), index=int(j))


def map_P_inv(wt):
    """``P^{-1}(w~) = 2 arctan(w~^2)``; real part in ``(-pi, pi]``.

    Only ``q1..q4`` (the poles of the arctan) are guarded; ``q0`` is a
    critical point, harmless here but fatal for ``Q^2``.
    """
    wt = np.asarray(wt, dtype=complex)
    _guard_clearance(wt, range(1, 5))
    return 2.0 * np.arctan(wt * wt)


def dP_inv(wt):
    """``d P^{-1} / d w~ = 4 w~ / (1 + w~^4)``."""
    wt = np.asarray(wt, dtype=complex)
    return 4.0 * wt / (1.0 + wt**4)


def grad_P2_inv(wt):
    """Gradient of ``Im P^{-1}`` as ``(d/dx, d/dy)``."""
    fp = dP_inv(wt)
    return fp.imag, fp.real


def dP(w, branch_angle: float = 0.0):
    """``dP/dw = sec^2(w/2) / (4 P(w))``."""
    w = np.asarray(w, dtype=complex)
    p = map_P(w, branch_angle)
    return 1.0 / (4.0 * p * np.cos(0.5 * w) ** 2)


def q_factor(tilde: PeriodicCurve) -> np.ndarray:
    """``Q^2 = |dP/dw|^2`` at ``P^{-1}(z~)``, evaluated as ``1/|dP^{-1}/dw~|^2``."""
    wt = tilde.w
    _guard_clearance(wt)
    return 1.0 / np.abs(dP_inv(wt)) ** 2


def q_factor_physical(curve: PeriodicCurve, branch_angle: float = 0.0) -> np.ndarray:
    """``|dP/dw|^2`` evaluated directly at the physical samples."""
    return np.abs(dP(curve.w, branch_angle)) ** 2


@dataclass(frozen=True)
class TildeState:
    curve: PeriodicCurve
    q2: np.ndarray
    clearances: np.ndarray
    branch_angle: float = 0.0

    @classmethod
    def from_curve(cls, tilde: PeriodicCurve, branch_angle: float = 0.0) -> "TildeState":
        if tilde.lift != 0:
            raise ValueError("tilde curves are closed (lift = 0)")
        return cls(tilde, q_factor(tilde), clearances(tilde.w), branch_angle)


def transform_curve(curve: PeriodicCurve, branch_angle: float = 0.0) -> TildeState:
    """Map a physical interface to the tilde domain; the grid is kept."""
    wt = map_P(curve.w, branch_angle)
    _guard_clearance(wt)
    tilde = PeriodicCurve(wt.real, wt.imag, lift=0.0)
    return TildeState.from_curve(tilde, branch_angle)


def untransform(state_or_curve) -> PeriodicCurve:
    """Physical curve ``P^{-1}(z~)`` with the real part unwrapped.

    The result is fixed up to ``2 pi`` shifts of ``z1``; the shift putting
    ``mean(z1 - alpha)`` in ``(-pi, pi]`` is used.  A tilde curve traversed
    counter-clockwise around ``q2`` yields a decreasing ``z1`` and is
    rejected.
    """
    tilde = getattr(state_or_curve, "curve", state_or_curve)
    w = map_P_inv(tilde.w)
    n = tilde.n_points
    steps = np.diff(np.concatenate((w.real, w.real[:1])))
    wrapped = (steps + np.pi) % (2.0 * np.pi) - np.pi
    winding = int(round(wrapped.sum() / (2.0 * np.pi)))
    if winding != 1:
        raise ValueError(f"tilde curve maps to an interface with winding {winding}, need 1")
    z1 = w.real[0] + np.concatenate(([0.0], np.cumsum(wrapped[:-1])))
    grid = -np.pi + 2.0 * np.pi * np.arange(n) / n
    p1 = z1 - grid
    shift = 2.0 * np.pi * np.round(p1.mean() / (2.0 * np.pi))
    if p1.mean() - shift <= -np.pi:
        shift -= 2.0 * np.pi
    return PeriodicCurve(p1 - shift, w.imag.copy(), lift=1.0)


# --------------------------------------------------------------------------
# tilde dynamics


def tilde_rhs(tilde: PeriodicCurve, R: float) -> np.ndarray:
    """``-2 R d/dalpha Im P^{-1}(z~)`` through the closed-form gradient."""
    d1, d2 = derivative(tilde, 1)
    gx, gy = grad_P2_inv(tilde.w)
    return -2.0 * R * (gx * d1 + gy * d2)


def tilde_velocity(state: TildeState, params: FluidParams,
                   opts: EvolutionOptions = EvolutionOptions(),
                   rate: Optional[float] = None) -> Velocity:
    """``z~_t = Q^2 BR(z~, w~) + c~ dz~`` and its pieces (``br`` is unscaled)."""
    tilde = state.curve
    R = params.R if rate is None else rate
    w = solve_linear(tilde, tilde_rhs(tilde, R), opts.solver)
    u1, u2 = birkhoff_rott(tilde, w)
    if opts.tangential:
        c = tangential_speed(tilde, (u1, u2))
    else:
        c = np.zeros(tilde.n_points)
    d1, d2 = derivative(tilde, 1)
    q2 = state.q2
    return Velocity(q2 * u1 + c * d1, q2 * u2 + c * d2, w, (u1, u2), c)


def tilde_step_rk4(state: TildeState, params: FluidParams, dt: float,
                   opts: EvolutionOptions = EvolutionOptions()) -> TildeState:
    """One RK4 step of the tilde system; ``Q^2`` is refreshed at every stage."""

    def rhs(curve):
        v = tilde_velocity(TildeState.from_curve(curve, state.branch_angle), params, opts)
        return v.v1, v.v2

    new = rk4_step(state.curve, dt, rhs, opts)
    return TildeState.from_curve(new, state.branch_angle)


def tilde_sigma(state: TildeState, w, br, params: FluidParams) -> tuple[np.ndarray, float]:
    """``sigma~`` on the grid and ``m(Q^2 sigma~) = min Q^2 sigma~``."""
    d1, d2 = derivative(state.curve, 1)
    u1, u2 = br
    gx, gy = grad_P2_inv(state.curve.w)
    sig = ((params.mu2 / params.kappa) * (-u1 * d2 + u2 * d1)
           + params.rho2 * params.g * (-gx * d2 + gy * d1))
    return sig, float(np.min(state.q2 * sig))


class TildeEnergy(NamedTuple):
    value: float
    finite: bool
    reason: str
    hk: float
    arc_chord: float
    m: float
    g_norm: float
    clearance_sum: float


def tilde_rt_energy(state: TildeState, params: FluidParams, lam: float, strip_xi: float,
                    C: float = 1.0, k: int = 4, opts: EvolutionOptions = EvolutionOptions(),
                    vel: Optional[Velocity] = None, force: bool = False) -> TildeEnergy:
    """``||z~||^2_{H^k(S)} + ||F(z~)||^2 + 1/(m(Q^2 sigma~) - 2 lambda - ||g||) + sum 1/m(q^l)``."""
    if vel is None:
        vel = tilde_velocity(state, params, opts)
    _, m = tilde_sigma(state, vel.vorticity, vel.br, params)
    hk = sobolev_strip_norm(state.curve, k, StripSpec(strip_xi), force=force)
    ac = strip_arc_chord(state.curve, strip_xi, force=force)
    gn = C * f_norm(state.curve, vel.vorticity, vel.c, strip_xi, weight=state.q2,
                    A_power=(1, 2))
    csum = float(np.sum(1.0 / state.clearances))
    den, reason = _denominator(m, lam, gn, 1.0)
    if den is None:
        return TildeEnergy(math.inf, False, reason, hk, ac, m, gn, csum)
    return TildeEnergy(hk + ac * ac + 1.0 / den + csum, True, "", hk, ac, m, gn, csum)


# --------------------------------------------------------------------------
# geometry helpers


def _interp_derivs(curve: PeriodicCurve, a):
    """``z, z', z''`` of the trigonometric interpolant at real parameters ``a``."""
    n = curve.n_points
    k = wavenumbers(n).astype(float)
    k[n // 2] = 0.0
    c = curve.coeffs[0] + 1j * curve.coeffs[1]
    nyq = c[n // 2]
    c = c.copy()
    c[n // 2] = 0.0
    ph = np.exp(1j * np.multiply.outer(a + np.pi, k))
    cn = np.cos(0.5 * n * (a + np.pi))
    sn = np.sin(0.5 * n * (a + np.pi))
    m = 0.5 * n
    z = curve.lift * a + ph @ c + nyq * cn
    z1 = curve.lift + ph @ (1j * k * c) - nyq * m * sn
    z2 = ph @ (-k * k * c) - nyq * m * m * cn
    return z, z1, z2


def curve_distance(points, curve: PeriodicCurve, iters: int = 30) -> np.ndarray:
    """Distance from each point to the trigonometric interpolant of ``curve``.

    Newton iteration on the foot-point condition ``Re(conj(z - p) z') = 0``
    started from the nearest sample.
    """
    points = np.asarray(points, dtype=complex).ravel()
    w = curve.w
    h = 2.0 * np.pi / curve.n_points
    j = np.argmin(np.abs(w[None, :] - points[:, None]), axis=1)
    a0 = curve.grid[j]
    a = a0.copy()
    for _ in range(iters):
        z, z1, z2 = _interp_derivs(curve, a)
        r = z - points
        f = (np.conj(r) * z1).real
        fp = np.abs(z1) ** 2 + (np.conj(r) * z2).real
        step = f / fp
        a = np.clip(a - step, a0 - h, a0 + h)
        if np.max(np.abs(step)) < 1e-15:
            break
    z, _, _ = _interp_derivs(curve, a)
    return np.minimum(np.abs(z - points), np.abs(w[j] - points))


def hausdorff(a: PeriodicCurve, b: PeriodicCurve) -> float:
    """Symmetric point-to-curve Hausdorff distance between two closed curves."""
    return float(max(curve_distance(a.w, b).max(), curve_distance(b.w, a).max()))
