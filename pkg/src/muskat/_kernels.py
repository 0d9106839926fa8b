"""O(N^2) inner loops: Birkhoff-Rott sums and the arc-chord scan.

Every kernel has a numba implementation and a vectorised numpy twin.  The
numba path is used unless ``MUSKAT_DISABLE_NUMBA`` is set to a truthy value
in the environment (or numba is not importable).  Both paths return the same
values up to summation-order round-off; within one path the summation order
per target point is fixed, so results do not depend on threading.

Kernel conventions
------------------
Samples ``x, y`` are the full coordinates ``z1 = lift*alpha + p1`` and
``z2 = p2`` on the uniform grid of even length ``n``.  ``lift`` is 1 for
curves that advance one period per parameter period (the physical interface)
and 0 for closed curves (the conformal image).

The Birkhoff-Rott sums use the alternate-point trapezoidal rule: target ``j``
only sees sources ``k`` with ``k - j`` odd, each with weight ``2h``.
"""

from __future__ import annotations

import os

import numpy as np

KERNEL_GUARD = 1e-12

_FLAG = os.environ.get("MUSKAT_DISABLE_NUMBA", "").strip().lower()
_DISABLED = _FLAG not in ("", "0", "false", "no")

try:  # pragma: no cover - exercised implicitly
    if _DISABLED:
        raise ImportError
    from numba import njit

    HAVE_NUMBA = True
except ImportError:  # pragma: no cover
    HAVE_NUMBA = False


def backend() -> str:
    return "numba" if HAVE_NUMBA else "numpy"


# --------------------------------------------------------------------------
# numpy reference paths


def _br_sum_numpy(x, y, gamma, lift):
    n = x.shape[0]
    h = 2.0 * np.pi / n
    w = x + 1j * y
    idx = np.arange(n)
    odd = ((idx[:, None] - idx[None, :]) % 2) == 1
    diff = w[:, None] - w[None, :]
    if lift:
        s = np.sin(0.5 * diff)
        small = odd & (np.abs(s) < 0.5 * KERNEL_GUARD)
        s = np.where(odd, s, 1.0)
        kern = 0.5 * np.cos(0.5 * diff) / s
    else:
        small = odd & (np.abs(diff) < KERNEL_GUARD)
        kern = 1.0 / np.where(odd, diff, 1.0)
    if small.any():
        j, k = np.argwhere(small)[0]
        return None, None, int(j), int(k)
    total = np.where(odd, kern, 0.0) @ gamma
    vel = 1j * np.conj(total) * (h / np.pi)
    return vel.real.copy(), vel.imag.copy(), -1, -1


def _br_images_numpy(x, y, gamma, n_images):
    n = x.shape[0]
    h = 2.0 * np.pi / n
    idx = np.arange(n)
    odd = ((idx[:, None] - idx[None, :]) % 2) == 1
    dx0 = x[:, None] - x[None, :]
    dy = y[:, None] - y[None, :]
    u = np.zeros(n)
    v = np.zeros(n)
    g = np.where(odd, gamma[None, :], 0.0)
    for m in range(-n_images, n_images + 1):
        dx = dx0 - 2.0 * np.pi * m
        r2 = dx * dx + dy * dy
        r2 = np.where(odd, r2, 1.0)
        u += np.sum(-dy / r2 * g, axis=1)
        v += np.sum(dx / r2 * g, axis=1)
    scale = 2.0 * h / (2.0 * np.pi)
    return u * scale, v * scale


def _arc_chord_numpy(x, y, lift, n_wrap):
    n = x.shape[0]
    alpha = -np.pi + 2.0 * np.pi * np.arange(n) / n
    best = -1.0
    bi = bj = bm = 0
    shifts = range(-n_wrap, n_wrap + 1) if lift else (0,)
    for m in shifts:
        beta = alpha[:, None] - alpha[None, :] + 2.0 * np.pi * m
        if not lift:
            beta = (beta + np.pi) % (2.0 * np.pi) - np.pi
        dx = x[:, None] - (x[None, :] - 2.0 * np.pi * m * lift)
        dy = y[:, None] - y[None, :]
        r2 = dx * dx + dy * dy
        if m == 0:
            np.fill_diagonal(r2, np.inf)
        hit = r2 < KERNEL_GUARD**2
        if hit.any():
            i, j = np.argwhere(hit)[0]
            return np.inf, int(i), int(j), m
        ratio = beta * beta / r2
        flat = int(np.argmax(ratio))
        val = ratio.flat[flat]
        if val > best:
            best = float(val)
            bi, bj = divmod(flat, n)
            bm = m
    return best, int(bi), int(bj), bm


# --------------------------------------------------------------------------
# numba paths

if HAVE_NUMBA:

    @njit(cache=True)
    def _br_sum_jit(x, y, gamma, lift):
        n = x.shape[0]
        h = 2.0 * np.pi / n
        u = np.empty(n)
        v = np.empty(n)
        for j in range(n):
            acc = 0.0 + 0.0j
            wj = complex(x[j], y[j])
            for k in range((j + 1) % 2, n, 2):
                d = wj - complex(x[k], y[k])
                if lift:
                    s = np.sin(0.5 * d)
                    if abs(s) < 0.5 * KERNEL_GUARD:
                        return u, v, j, k
                    acc += gamma[k] * 0.5 * np.cos(0.5 * d) / s
                else:
                    if abs(d) < KERNEL_GUARD:
                        return u, v, j, k
                    acc += gamma[k] / d
            vel = 1j * acc.conjugate() * (h / np.pi)
            u[j] = vel.real
            v[j] = vel.imag
        return u, v, -1, -1

    @njit(cache=True)
    def _br_images_jit(x, y, gamma, n_images):
        n = x.shape[0]
        h = 2.0 * np.pi / n
        scale = 2.0 * h / (2.0 * np.pi)
        u = np.zeros(n)
        v = np.zeros(n)
        for j in range(n):
            su = 0.0
            sv = 0.0
            for m in range(-n_images, n_images + 1):
                for k in range((j + 1) % 2, n, 2):
                    dx = x[j] - x[k] - 2.0 * np.pi * m
                    dy = y[j] - y[k]
                    r2 = dx * dx + dy * dy
                    su += -dy / r2 * gamma[k]
                    sv += dx / r2 * gamma[k]
            u[j] = su * scale
            v[j] = sv * scale
        return u, v

    @njit(cache=True)
    def _arc_chord_jit(x, y, lift, n_wrap):
        n = x.shape[0]
        two_pi = 2.0 * np.pi
        best = -1.0
        bi = 0
        bj = 0
        bm = 0
        lo = -n_wrap if lift else 0
        hi = n_wrap if lift else 0
        for m in range(lo, hi + 1):
            for i in range(n):
                ai = -np.pi + two_pi * i / n
                for j in range(n):
                    if m == 0 and i == j:
                        continue
                    aj = -np.pi + two_pi * j / n
                    beta = ai - aj + two_pi * m
                    if not lift:
                        beta = (beta + np.pi) % two_pi - np.pi
                    dx = x[i] - (x[j] - two_pi * m * lift)
                    dy = y[i] - y[j]
                    r2 = dx * dx + dy * dy
                    if r2 < KERNEL_GUARD * KERNEL_GUARD:
                        return np.inf, i, j, m
                    val = beta * beta / r2
                    if val > best:
                        best = val
                        bi = i
                        bj = j
                        bm = m
        return best, bi, bj, bm


# --------------------------------------------------------------------------
# dispatch


def br_sum(x, y, gamma, lift):
    """Alternate-point Birkhoff-Rott sum.

    Returns ``(u, v, bad_j, bad_k)``; ``bad_j >= 0`` flags a source/target
    pair whose chord fell below :data:`KERNEL_GUARD`.
    """
    x = np.ascontiguousarray(x, dtype=np.float64)
    y = np.ascontiguousarray(y, dtype=np.float64)
    gamma = np.ascontiguousarray(gamma, dtype=np.float64)
    if HAVE_NUMBA:
        return _br_sum_jit(x, y, gamma, int(lift))
    return _br_sum_numpy(x, y, gamma, int(lift))


def br_images(x, y, gamma, n_images):
    """Literal real-line Birkhoff-Rott sum over ``2*n_images + 1`` images."""
    x = np.ascontiguousarray(x, dtype=np.float64)
    y = np.ascontiguousarray(y, dtype=np.float64)
    gamma = np.ascontiguousarray(gamma, dtype=np.float64)
    if HAVE_NUMBA:
        return _br_images_jit(x, y, gamma, int(n_images))
    return _br_images_numpy(x, y, gamma, int(n_images))


def arc_chord_scan(x, y, lift, n_wrap=1):
    """Grid maximum of ``beta^2 / |z(alpha) - z(alpha - beta)|^2`` off the diagonal.

    Returns ``(value, i, j, m)``; ``value`` is ``inf`` when two samples
    coincide (then ``(i, j, m)`` names the pair).
    """
    x = np.ascontiguousarray(x, dtype=np.float64)
    y = np.ascontiguousarray(y, dtype=np.float64)
    if HAVE_NUMBA:
        return _arc_chord_jit(x, y, int(lift), int(n_wrap))
    return _arc_chord_numpy(x, y, int(lift), int(n_wrap))
