"""Vorticity strength from the implicit interface equation.

Solves ``varpi + T(varpi) = -2 R dz2/dalpha`` with ``T(varpi) = 2 BR(z, varpi).dz``
and ``R = kappa g rho2 / mu2``.  An optional heat-kernel mollifier ``M``
(multiplier ``exp(-2 eps k^2)``) wraps both the ``T`` term and the forcing:
``varpi + M T(varpi) = -2 R M dz2``.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass

import numpy as np
from scipy.sparse.linalg import LinearOperator, gmres

from .errors import ConditioningError, IterationError
from .singular_integrals import apply_T, assemble_br_matrices
from .spectral_curve import PeriodicCurve, derivative, spectral_derivative, wavenumbers

log = logging.getLogger(__name__)


@dataclass(frozen=True)
class FluidParams:
    """One-phase fluid constants; only the rate ``R`` enters the kinematics."""

    mu2: float = 1.0
    rho2: float = 1.0
    kappa: float = 1.0
    g: float = 1.0

    def __post_init__(self):
        for name in ("mu2", "rho2", "kappa", "g"):
            val = getattr(self, name)
            if not (np.isfinite(val) and val > 0):
                raise ValueError(f"{name} must be positive, got {val}")

    @property
    def R(self) -> float:
        return self.kappa * self.g * self.rho2 / self.mu2

    @classmethod
    def with_rate(cls, R: float) -> "FluidParams":
        """Unit viscosity, permeability and gravity; density set so that ``R`` matches."""
        return cls(mu2=1.0, rho2=R, kappa=1.0, g=1.0)


@dataclass(frozen=True)
class SolverOptions:
    tol: float = 1e-12
    max_iter: int = 200
    mode: str = "krylov"

    def __post_init__(self):
        if not self.tol > 0:
            raise ValueError("tol must be positive")
        if self.max_iter < 1:
            raise ValueError("max_iter must be >= 1")
        if self.mode not in ("krylov", "fixed-point", "dense"):
            raise ValueError(f"unknown solver mode {self.mode!r}")


def mollifier(n: int, eps: float) -> np.ndarray:
    """Heat-kernel multiplier ``exp(-eps k^2)``."""
    k = wavenumbers(n)
    return np.exp(-eps * k * k)


def _smooth(f, mult):
    if mult is None:
        return f
    return np.fft.ifft(np.fft.fft(f) * mult).real


def vorticity_rhs(curve: PeriodicCurve, R: float, forcing=None) -> np.ndarray:
    """``-2 R d(forcing)/dalpha`` with ``forcing = z2`` by default."""
    if forcing is None:
        _, d2 = derivative(curve, 1)
    else:
        d2 = spectral_derivative(forcing, 1)
    return -2.0 * R * d2


def assemble_dense_T(curve: PeriodicCurve) -> np.ndarray:
    """Dense ``N x N`` matrix of ``T``; column ``j`` is ``T`` of the ``j``-th unit field."""
    B1, B2 = assemble_br_matrices(curve)
    d1, d2 = derivative(curve, 1)
    return 2.0 * (d1[:, None] * B1 + d2[:, None] * B2)


def residual(curve: PeriodicCurve, w, rhs, mult=None, T=apply_T) -> float:
    """Relative L2 residual of ``w + M T(w) = rhs`` (absolute when ``rhs = 0``)."""
    r = w + _smooth(T(curve, w), mult) - rhs
    scale = np.linalg.norm(rhs)
    return float(np.linalg.norm(r) / (scale if scale > 0 else 1.0))


def solve_linear(curve: PeriodicCurve, rhs, opts: SolverOptions = SolverOptions(),
                 mollify_eps: float = 0.0, pin_mean: bool | None = None) -> np.ndarray:
    """Solve ``(I + M T) w = rhs`` for a given right-hand side.

    On a closed curve traversed clockwise ``I + T`` has a one-dimensional
    kernel (a circulation that only affects the exterior), so the operator
    is augmented with ``mean(w)``; for a consistent right-hand side this
    selects the zero-circulation solution.  ``pin_mean=None`` enables the
    augmentation exactly for closed curves.
    """
    n = curve.n_points
    if pin_mean is None:
        pin_mean = curve.lift == 0
    rhs = np.asarray(rhs, dtype=float)
    mult = mollifier(n, 2.0 * mollify_eps) if mollify_eps > 0 else None
    rhs_m = _smooth(rhs, mult)
    scale = np.linalg.norm(rhs_m)
    if scale == 0.0:
        return np.zeros(n)

    def op(w):
        out = w + _smooth(apply_T(curve, w), mult)
        if pin_mean:
            out = out + w.mean()
        return out

    if opts.mode == "dense":
        A = np.eye(n) + _smooth_rows(assemble_dense_T(curve), mult)
        if pin_mean:
            A += 1.0 / n
        cond = np.linalg.cond(A)
        if not np.isfinite(cond) or cond > 1e12:
            raise ConditioningError(f"I + T is ill-conditioned (cond = {cond:.3e})", cond)
        w = np.linalg.solve(A, rhs_m)
    elif opts.mode == "fixed-point":
        w = rhs_m.copy()
        for it in range(opts.max_iter):
            w_new = rhs_m - _smooth(apply_T(curve, w), mult)
            if pin_mean:
                w_new -= w.mean()
            if np.linalg.norm(w_new - w) <= 0.1 * opts.tol * scale:
                w = w_new
                break
            w = w_new
        else:
            res = np.linalg.norm(op(w) - rhs_m) / scale
            raise IterationError(
                f"fixed-point iteration did not converge in {opts.max_iter} steps "
                f"(residual {res:.3e})", float(res))
    else:
        A = LinearOperator((n, n), matvec=op, dtype=float)
        w = rhs_m.copy()
        used = 0
        while True:
            restart = min(n, opts.max_iter)
            w, info = gmres(A, rhs_m, x0=w, rtol=0.1 * opts.tol, atol=0.0,
                            restart=restart, maxiter=1)
            used += restart
            res = np.linalg.norm(op(w) - rhs_m) / scale
            if res <= opts.tol or used >= opts.max_iter:
                break
        if res > opts.tol:
            raise IterationError(
                f"GMRES did not reach tol {opts.tol:g} (residual {res:.3e})", float(res))
    res = np.linalg.norm(op(w) - rhs_m) / scale
    if res > opts.tol:
        raise IterationError(f"solution residual {res:.3e} above tol {opts.tol:g}", float(res))
    return w


def _smooth_rows(M, mult):
    if mult is None:
        return M
    return np.fft.ifft(np.fft.fft(M, axis=0) * mult[:, None], axis=0).real


def solve_vorticity(curve: PeriodicCurve, params: FluidParams,
                    opts: SolverOptions = SolverOptions(),
                    mollify_eps: float = 0.0) -> np.ndarray:
    """Vorticity strength ``varpi`` on the grid."""
    rhs = vorticity_rhs(curve, params.R)
    return solve_linear(curve, rhs, opts, mollify_eps)
