"""Birkhoff-Rott velocity of a vortex sheet on a periodic or closed curve.

For a lifted (period-advancing) curve the real-line principal value integral
is periodised in closed form with ``sum_k 1/(zeta - 2 pi k) = cot(zeta/2)/2``::

    conj(BR)(alpha) = 1/(4 pi i) PV int_T varpi(beta) cot((w(alpha) - w(beta))/2) dbeta

with ``w = z1 + i z2``.  For a closed curve the plain Cauchy kernel
``1/(w(alpha) - w(beta))`` over one period is used.  Both are discretised
with the alternate-point trapezoidal rule, which is spectrally accurate for
the principal value as long as the data are resolved on the half grid.
"""

from __future__ import annotations

import numpy as np
from scipy.special import zeta

from . import _kernels
from .errors import CostGuardError, SingularKernelError
from .spectral_curve import PeriodicCurve, derivative


def _as_field(curve: PeriodicCurve, w) -> np.ndarray:
    w = np.asarray(w, dtype=float)
    if w.shape != (curve.n_points,):
        raise ValueError(
            f"vorticity has shape {w.shape}, curve has {curve.n_points} points")
    return w


def birkhoff_rott(curve: PeriodicCurve, w) -> tuple[np.ndarray, np.ndarray]:
    """Principal-value Birkhoff-Rott velocity ``(u1, u2)`` on the grid."""
    w = _as_field(curve, w)
    u, v, bj, bk = _kernels.br_sum(curve.z1, curve.z2, w, curve.lift)
    if bj >= 0:
        raise SingularKernelError(
            f"chord between samples {bj} and {bk} below {_kernels.KERNEL_GUARD:g}",
            (int(bj), int(bk)))
    return u, v


def br_direct_oracle(curve: PeriodicCurve, w, n_images: int = 128,
                     tail_correction: bool = True) -> tuple[np.ndarray, np.ndarray]:
    """Reference Birkhoff-Rott velocity from the literal real-line kernel.

    Sums ``(z(alpha) - z(beta))^perp / |z(alpha) - z(beta)|^2 varpi(beta)``
    over ``2 n_images + 1`` period images with the same odd-offset point
    omission as :func:`birkhoff_rott`, but without the cotangent identity.

    The symmetric image sum converges like ``1/n_images``.  With
    ``tail_correction`` the leading tail ``-(Delta/2pi^2) zeta(2, M+1)`` of
    every pair is added (Hurwitz zeta), leaving an ``O(n_images^-3)`` error.
    Only lifted curves are supported.
    """
    if n_images < 8:
        raise ValueError("n_images must be >= 8")
    if not curve.lift:
        raise ValueError("image sums only apply to lifted (periodic) curves")
    w = _as_field(curve, w)
    n = curve.n_points
    x, y = curve.z1, curve.z2
    dmin = _min_odd_chord(x, y)
    if dmin[0] < _kernels.KERNEL_GUARD:
        raise SingularKernelError("chord below kernel guard", dmin[1])
    u, v = _kernels.br_images(x, y, w, n_images)
    if tail_correction:
        h = 2.0 * np.pi / n
        idx = np.arange(n)
        odd = ((idx[:, None] - idx[None, :]) % 2) == 1
        delta = (x[:, None] - x[None, :]) + 1j * (y[:, None] - y[None, :])
        tail = -(delta / (2.0 * np.pi**2)) * zeta(2.0, n_images + 1)
        s = np.where(odd, tail, 0.0) @ w
        corr = 1j * np.conj(s) * (h / np.pi)
        u = u + corr.real
        v = v + corr.imag
    return u, v


def _min_odd_chord(x, y):
    d = np.hypot(x[:, None] - x[None, :], y[:, None] - y[None, :])
    n = x.shape[0]
    idx = np.arange(n)
    odd = ((idx[:, None] - idx[None, :]) % 2) == 1
    d = np.where(odd, d, np.inf)
    flat = int(np.argmin(d))
    return float(d.flat[flat]), divmod(flat, n)


def apply_T(curve: PeriodicCurve, w) -> np.ndarray:
    """``T(varpi) = 2 BR(z, varpi) . dz/dalpha``."""
    u, v = birkhoff_rott(curve, w)
    d1, d2 = derivative(curve, 1)
    return 2.0 * (u * d1 + v * d2)


def assemble_br_matrices(curve: PeriodicCurve) -> tuple[np.ndarray, np.ndarray]:
    """Dense matrices ``(B1, B2)`` with ``BR(z, varpi) = (B1 @ varpi, B2 @ varpi)``.

    Built column by column from unit grid functions.
    """
    n = curve.n_points
    if n > 512:
        raise CostGuardError(f"dense assembly limited to n_points <= 512, got {n}")
    B1 = np.empty((n, n))
    B2 = np.empty((n, n))
    e = np.zeros(n)
    for j in range(n):
        e[j] = 1.0
        B1[:, j], B2[:, j] = birkhoff_rott(curve, e)
        e[j] = 0.0
    return B1, B2
