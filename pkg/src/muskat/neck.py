"""Near-splat ``neck`` initial data.

The curve is drawn in the tilde domain as a smoothed closed path around
``q2`` in the upper half plane and mapped back with ``P^{-1}``.  Its two
bottom edges run just above the real axis over ``+-(a1, a2)``, where
``a = sqrt(tan(x/2))`` for the physical extent ``x in pi/2 +- L/2``.  Points
``a + i eta`` and ``-a + i eta`` map to complex-conjugate physical points,
so the two bottom edges become the two interface arcs facing each other
across the segment ``y = 0``.  Their height follows
``eta(a) = s (1 + a^4) / (8 a)``, which makes the physical gap close to
``s`` along the whole extent; ``s`` is then calibrated so that the minimum
gap is exactly ``d``.
"""

from __future__ import annotations

from functools import lru_cache

import numpy as np
from scipy.optimize import brentq, minimize

from .errors import ConfigError
from .spectral_curve import PeriodicCurve, alpha_grid, trig_eval

FINE = 4096
SMOOTH = 32.0 / FINE
EDGE_SHARE = 0.3
EXTEND = 0.1
BODY_TOP = 1.2
FOOT_TOP = 0.42
BRIDGE = 0.25
BRIDGE_HALF = 0.45
GAP_SAMPLES = 1024


def _extent(L: float) -> tuple[float, float]:
    x = np.array([0.5 * (np.pi - L), 0.5 * (np.pi + L)])
    a = np.sqrt(np.tan(0.5 * x))
    return float(a[0]), float(a[1])


def _segment(p, q, n):
    t = np.arange(n) / n
    return p + (q - p) * t


def _tilde_path(s: float, L: float) -> np.ndarray:
    """Unsmoothed clockwise path sampled at ``FINE`` points."""
    a1, a2 = _extent(L)
    lo, hi = a1 - EXTEND, a2 + EXTEND

    def eta(a):
        return s * (1.0 + a**4) / (8.0 * a)

    X = hi
    corners = [
        complex(-X, eta(X)), complex(-X, BODY_TOP), complex(0.0, BODY_TOP),
        complex(0.2, FOOT_TOP), complex(X, FOOT_TOP), complex(X, eta(X)),
    ]
    inner_r = complex(lo, eta(lo))
    bridge = [complex(BRIDGE_HALF, BRIDGE), complex(-BRIDGE_HALF, BRIDGE)]
    inner_l = complex(-lo, eta(lo))
    # straight pieces: corners chain, then bridge chain
    straight_a = list(zip(corners[:-1], corners[1:]))
    straight_b = [(inner_r, bridge[0]), (bridge[0], bridge[1]), (bridge[1], inner_l)]
    lengths = np.array([abs(q - p) for p, q in straight_a + straight_b])
    n_edge = int(round(EDGE_SHARE * FINE))
    n_rest = FINE - 2 * n_edge
    counts = np.floor(n_rest * lengths / lengths.sum()).astype(int)
    counts[np.argmax(lengths)] += n_rest - counts.sum()
    parts = []
    ca, cb = counts[:len(straight_a)], counts[len(straight_a):]
    for (p, q), m in zip(straight_a, ca):
        parts.append(_segment(p, q, m))
    right = np.linspace(hi, lo, n_edge, endpoint=False)
    parts.append(right + 1j * eta(right))
    for (p, q), m in zip(straight_b, cb):
        parts.append(_segment(p, q, m))
    left = np.linspace(lo, hi, n_edge, endpoint=False)
    parts.append(-left + 1j * eta(left))
    return np.concatenate(parts)


def _tilde_coeffs(s: float, L: float) -> np.ndarray:
    path = _tilde_path(s, L)
    k = np.fft.fftfreq(FINE, 1.0 / FINE)
    return np.fft.fft(path) / FINE * np.exp(-SMOOTH * k * k)


def _physical(s: float, L: float, n: int) -> PeriodicCurve:
    from .conformal_splat import untransform
    wt = trig_eval(_tilde_coeffs(s, L), alpha_grid(n))
    tilde = PeriodicCurve(wt.real, wt.imag, lift=0.0)
    return untransform(tilde)


def _gap(s: float, L: float) -> float:
    """Minimum physical distance between points whose tilde images are far apart."""
    curve = _physical(s, L, GAP_SAMPLES)
    wt = trig_eval(_tilde_coeffs(s, L), alpha_grid(GAP_SAMPLES))
    z = curve.w
    best = np.inf
    pair = (0, 0)
    far = np.abs(wt[:, None] - wt[None, :]) > 0.5
    for shift in (-2.0 * np.pi, 0.0, 2.0 * np.pi):
        d = np.abs(z[:, None] - z[None, :] - shift)
        d = np.where(far, d, np.inf)
        j = int(np.argmin(d))
        if d.flat[j] < best:
            best = float(d.flat[j])
            pair = divmod(j, GAP_SAMPLES) + (shift,)
    grid = curve.grid

    def dist(ab):
        x1, y1 = curve.evaluate(np.array([ab[0], ab[1]]))
        return float(abs((x1[0] - x1[1] - pair[2]) + 1j * (y1[0] - y1[1])).real)

    res = minimize(dist, [grid[pair[0]], grid[pair[1]]], method="Nelder-Mead",
                   options={"xatol": 1e-12, "fatol": 1e-15, "maxiter": 2000})
    return min(best, float(res.fun))


@lru_cache(maxsize=32)
def calibrate(d: float, L: float) -> float:
    """Height scale ``s`` whose physical minimum gap equals ``d``."""
    return brentq(lambda s: _gap(s, L) - d, 0.5 * d, 2.0 * d, xtol=1e-15, rtol=1e-12)


def neck(n: int, d: float = 0.05, L: float = 1.0) -> PeriodicCurve:
    """Overturned interface with a vacuum gap of width ``d`` over extent ``L``.

    ``0 < d <= 0.2`` and ``0.3 <= L <= 1.5``; resolutions ``n >= 128`` keep
    the smoothed corners resolved.
    """
    if not 0.0 < d <= 0.2:
        raise ConfigError(f"neck gap d must be in (0, 0.2], got {d}")
    if not 0.3 <= L <= 1.5:
        raise ConfigError(f"neck extent L must be in [0.3, 1.5], got {L}")
    s = calibrate(float(d), float(L))
    return _physical(s, L, n)


def neck_tilde(n: int, d: float = 0.05, L: float = 1.0) -> PeriodicCurve:
    """The closed tilde-domain curve the neck is built from."""
    s = calibrate(float(d), float(L))
    wt = trig_eval(_tilde_coeffs(s, L), alpha_grid(n))
    return PeriodicCurve(wt.real, wt.imag, lift=0.0)
