"""Brute-force references for tests.

Nothing here calls the production Birkhoff-Rott kernels or the vorticity
solver: :func:`reference_velocity` rebuilds the interface velocity from a
dense cotangent matrix and ``numpy.linalg.solve``.  Not imported by the
package namespace; slow by design and guarded against large inputs.
"""

from __future__ import annotations

import numpy as np

from .errors import CostGuardError, FitError
from .spectral_curve import PeriodicCurve

FD_MAX_POINTS = 128


def _fft_deriv(f):
    n = f.shape[0]
    k = np.fft.fftfreq(n, 1.0 / n)
    k[n // 2] = 0.0
    return np.fft.ifft(1j * k * np.fft.fft(f)).real


def _cot_matrix(x, y):
    """``(1/(2 pi i)) * 2h * cot(dw/2)/2`` on opposite-parity pairs, zero elsewhere."""
    n = x.shape[0]
    h = 2.0 * np.pi / n
    w = x + 1j * y
    dw = w[:, None] - w[None, :]
    idx = np.arange(n)
    odd = (idx[:, None] + idx[None, :]) % 2 == 1
    safe = np.where(odd, dw, 1.0)
    K = np.where(odd, 0.5 / np.tan(0.5 * safe), 0.0)
    return K * (2.0 * h) / (2.0j * np.pi)


def reference_velocity(p1, p2, R: float) -> tuple[np.ndarray, np.ndarray]:
    """``BR + c dz`` of the curve ``(alpha + p1, p2)`` by dense linear algebra."""
    p1 = np.asarray(p1, dtype=float)
    p2 = np.asarray(p2, dtype=float)
    n = p1.shape[0]
    alpha = -np.pi + 2.0 * np.pi * np.arange(n) / n
    x = alpha + p1
    d1 = 1.0 + _fft_deriv(p1)
    d2 = _fft_deriv(p2)
    M = np.conj(_cot_matrix(x, p2))
    B1, B2 = M.real, M.imag
    A = np.eye(n) + 2.0 * (d1[:, None] * B1 + d2[:, None] * B2)
    w = np.linalg.solve(A, -2.0 * R * d2)
    u1, u2 = B1 @ w, B2 @ w
    f = (d1 * _fft_deriv(u1) + d2 * _fft_deriv(u2)) / (d1 * d1 + d2 * d2)
    f = f - f.mean()
    k = np.fft.fftfreq(n, 1.0 / n)
    fh = np.fft.fft(f)
    gh = np.zeros_like(fh)
    nz = k != 0
    nz[n // 2] = False
    gh[nz] = fh[nz] / (1j * k[nz])
    G = np.fft.ifft(gh).real
    c = G[0] - G
    return u1 + c * d1, u2 + c * d2


def fd_jacobian(curve: PeriodicCurve, R: float, h: float = 1e-6) -> np.ndarray:
    """Central-difference Jacobian of ``(v1, v2)`` with respect to ``(p1, p2)``.

    Returns a ``2N x 2N`` matrix; the lower-right block is the vertical
    response to vertical perturbations.
    """
    n = curve.n_points
    if n > FD_MAX_POINTS:
        raise CostGuardError(f"fd_jacobian limited to n_points <= {FD_MAX_POINTS}, got {n}")
    if curve.lift != 1.0:
        raise ValueError("fd_jacobian expects a period-advancing curve")
    base = np.concatenate((curve.p1, curve.p2))
    J = np.empty((2 * n, 2 * n))
    for j in range(2 * n):
        e = np.zeros(2 * n)
        e[j] = h
        vp = np.concatenate(reference_velocity(*np.split(base + e, 2), R))
        vm = np.concatenate(reference_velocity(*np.split(base - e, 2), R))
        J[:, j] = (vp - vm) / (2.0 * h)
    return J


def mode_eigenvalue(J: np.ndarray, k: int) -> float:
    """Eigenvalue of the vertical block whose eigenvector is dominated by mode ``k``."""
    n = J.shape[0] // 2
    block = J[n:, n:]
    vals, vecs = np.linalg.eig(block)
    power = np.abs(np.fft.fft(vecs, axis=0)) ** 2
    share = (power[k] + power[-k]) / power.sum(axis=0)
    j = int(np.argmax(share))
    return float(vals[j].real)


def decay_rate(k: int, R: float = 1.0, delta: float = 1e-3, n: int = 64,
               t_end: float = 0.5, dt: float = 0.01, tol: float = 0.1) -> float:
    """Measured exponential rate of mode ``k`` from ``z2 = delta cos(k alpha)``.

    Fits ``log|c_k(t)|`` against ``t`` over an RK4 run of the full system.
    Raises :class:`FitError` when the fitted exponential misses any sample
    amplitude by more than ``tol`` (relative).
    """
    from .dynamics import EvolutionOptions, evolve
    from .vorticity_solver import FluidParams

    if not 0 < delta <= 1e-3:
        raise ValueError("delta must be in (0, 1e-3]")
    alpha = -np.pi + 2.0 * np.pi * np.arange(n) / n
    curve = PeriodicCurve(np.zeros(n), delta * np.cos(k * alpha))
    opts = EvolutionOptions(dt=dt, t_end=t_end)
    ts, amps = [], []
    for _, t, c in evolve(curve, FluidParams.with_rate(R), opts, check_arc_chord=False):
        ts.append(t)
        amps.append(2.0 * abs(np.fft.fft(c.p2)[k]) / n)
    ts = np.array(ts)
    amps = np.array(amps)
    slope, icept = np.polyfit(ts, np.log(amps), 1)
    miss = np.max(np.abs(np.exp(icept + slope * ts) / amps - 1.0))
    if miss > tol:
        raise FitError(f"mode {k} amplitude is not exponential (misfit {miss:.2%})")
    return float(slope)
