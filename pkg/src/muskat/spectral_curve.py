"""Periodic interface representation and Fourier-side operators.

A curve is stored as its periodic part on the uniform grid
``alpha_j = -pi + 2*pi*j/N``::

    z1(alpha) = lift * alpha + p1(alpha)
    z2(alpha) = p2(alpha)

``lift = 1`` gives the physical interface (``z(alpha + 2pi) = z(alpha) + (2pi, 0)``);
``lift = 0`` gives a closed curve, which is what the conformal image of a
periodic interface looks like.

Fourier coefficients are ``numpy.fft.fft(samples) / N``; they are relative to
the grid origin, which does not matter for multipliers.  Use
:meth:`PeriodicCurve.evaluate` for off-grid evaluation.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property
from typing import NamedTuple

import numpy as np

from . import _kernels
from .errors import (
    AccuracyError,
    InsufficientSpectrumError,
    ParityError,
    SelfIntersectionError,
    StripExceededError,
)

STRIP_TAIL_GUARD = 1e3


def alpha_grid(n: int) -> np.ndarray:
    return -np.pi + 2.0 * np.pi * np.arange(n) / n


def wavenumbers(n: int) -> np.ndarray:
    return np.fft.fftfreq(n, 1.0 / n)


def _check_even(n: int) -> None:
    if n % 2:
        raise ParityError(f"grid size must be even, got {n}")


# --------------------------------------------------------------------------
# scalar operators on real periodic samples


def apply_multiplier(f, mult) -> np.ndarray:
    """Apply a Fourier multiplier (array over ``fftfreq`` order) to samples."""
    f = np.asarray(f)
    out = np.fft.ifft(np.fft.fft(f) * mult)
    if np.isrealobj(f) and np.isrealobj(mult):
        return out.real
    return out


def spectral_derivative(f, order: int = 1) -> np.ndarray:
    """``order``-th derivative of periodic samples (real or complex)."""
    f = np.asarray(f)
    n = f.shape[-1]
    k = wavenumbers(n)
    mult = (1j * k) ** order
    if order % 2:
        mult[n // 2] = 0.0
    out = np.fft.ifft(np.fft.fft(f) * mult)
    return out.real if np.isrealobj(f) else out


def antiderivative(f) -> np.ndarray:
    """Periodic antiderivative of the mean-free part of ``f`` (mean-zero output)."""
    f = np.asarray(f, dtype=float)
    n = f.shape[-1]
    k = wavenumbers(n)
    fh = np.fft.fft(f)
    gh = np.zeros_like(fh)
    nz = k != 0
    gh[nz] = fh[nz] / (1j * k[nz])
    gh[n // 2] = 0.0
    return np.fft.ifft(gh).real


def hilbert(f) -> np.ndarray:
    """Periodic Hilbert transform, multiplier ``-i sgn(k)``.

    The zero mode and the Nyquist mode are annihilated.
    """
    f = np.asarray(f, dtype=float)
    n = f.shape[-1]
    mult = -1j * np.sign(wavenumbers(n))
    mult[n // 2] = 0.0
    return np.fft.ifft(np.fft.fft(f) * mult).real


def lambda_pow(f, s: float = 1.0) -> np.ndarray:
    """``Lambda^s``: multiplier ``|k|^s``.  ``Lambda = H d/dalpha``."""
    if s < 0:
        raise ValueError("s must be non-negative")
    f = np.asarray(f, dtype=float)
    n = f.shape[-1]
    k = np.abs(wavenumbers(n))
    mult = k**s if s > 0 else np.ones_like(k)
    return np.fft.ifft(np.fft.fft(f) * mult).real


def krasny_filter(f, threshold: float) -> np.ndarray:
    """Zero Fourier coefficients with magnitude below ``threshold`` (``fft/N`` scale)."""
    if threshold <= 0:
        return np.asarray(f, dtype=float)
    fh = np.fft.fft(f)
    n = fh.shape[-1]
    fh[np.abs(fh) < threshold * n] = 0.0
    return np.fft.ifft(fh).real


def trig_eval(coeffs: np.ndarray, alpha) -> np.ndarray:
    """Evaluate the trigonometric interpolant with grid-relative ``coeffs`` at ``alpha``.

    The Nyquist mode is split symmetrically so the interpolant is real for
    real samples.
    """
    n = coeffs.shape[-1]
    k = wavenumbers(n).copy()
    alpha = np.asarray(alpha, dtype=complex)
    phase = np.exp(1j * np.multiply.outer(alpha + np.pi, k))
    c = coeffs.copy()
    nyq = n // 2
    cn = c[nyq]
    c[nyq] = 0.0
    out = phase @ c
    out = out + cn * np.cos(nyq * (alpha + np.pi))
    return out


# --------------------------------------------------------------------------
# curve type


@dataclass(frozen=True, eq=False)
class PeriodicCurve:
    """Grid samples of an interface, see the module docstring for the layout."""

    p1: np.ndarray
    p2: np.ndarray
    lift: float = 1.0

    def __post_init__(self):
        p1 = np.array(self.p1, dtype=float, copy=True).ravel()
        p2 = np.array(self.p2, dtype=float, copy=True).ravel()
        if p1.shape != p2.shape:
            raise ValueError("p1 and p2 must have the same length")
        n = p1.shape[0]
        _check_even(n)
        if n < 16:
            raise ValueError(f"need at least 16 grid points, got {n}")
        if self.lift not in (0.0, 1.0):
            raise ValueError("lift must be 0 or 1")
        if not (np.all(np.isfinite(p1)) and np.all(np.isfinite(p2))):
            raise ValueError("curve samples must be finite")
        p1.setflags(write=False)
        p2.setflags(write=False)
        object.__setattr__(self, "p1", p1)
        object.__setattr__(self, "p2", p2)
        object.__setattr__(self, "lift", float(self.lift))

    # construction helpers
    @classmethod
    def flat(cls, n: int) -> "PeriodicCurve":
        return cls(np.zeros(n), np.zeros(n))

    @classmethod
    def from_functions(cls, f1, f2, n: int, lift: float = 1.0) -> "PeriodicCurve":
        """Sample periodic parts ``f1(alpha)``, ``f2(alpha)`` on the grid."""
        a = alpha_grid(n)
        return cls(np.broadcast_to(f1(a), a.shape), np.broadcast_to(f2(a), a.shape), lift)

    @classmethod
    def from_points(cls, z1, z2, lift: float = 1.0) -> "PeriodicCurve":
        z1 = np.asarray(z1, dtype=float)
        return cls(z1 - lift * alpha_grid(z1.shape[0]), z2, lift)

    def replace(self, p1=None, p2=None) -> "PeriodicCurve":
        return PeriodicCurve(self.p1 if p1 is None else p1,
                             self.p2 if p2 is None else p2, self.lift)

    # views
    @property
    def n_points(self) -> int:
        return self.p1.shape[0]

    @property
    def grid(self) -> np.ndarray:
        return alpha_grid(self.n_points)

    @property
    def z1(self) -> np.ndarray:
        return self.lift * self.grid + self.p1

    @property
    def z2(self) -> np.ndarray:
        return self.p2

    @property
    def w(self) -> np.ndarray:
        """Complex samples ``z1 + i z2``."""
        return self.z1 + 1j * self.z2

    @cached_property
    def coeffs(self) -> tuple[np.ndarray, np.ndarray]:
        n = self.n_points
        return np.fft.fft(self.p1) / n, np.fft.fft(self.p2) / n

    def evaluate(self, alpha) -> tuple[np.ndarray, np.ndarray]:
        """Trigonometric interpolation of the full curve at arbitrary (complex) ``alpha``."""
        c1, c2 = self.coeffs
        alpha = np.asarray(alpha)
        return self.lift * alpha + trig_eval(c1, alpha), trig_eval(c2, alpha)

    def __repr__(self) -> str:
        return f"PeriodicCurve(n_points={self.n_points}, lift={self.lift:g})"


@dataclass(frozen=True)
class StripSpec:
    """Half width ``xi`` of the strip ``|Im alpha| < xi`` and which side(s) to use."""

    xi: float = 0.0
    side: str = "both"

    def __post_init__(self):
        if not self.xi >= 0:
            raise ValueError("strip half width must be non-negative")
        if self.side not in ("plus", "minus", "both"):
            raise ValueError("side must be 'plus', 'minus' or 'both'")

    @property
    def signs(self) -> tuple[int, ...]:
        return {"plus": (1,), "minus": (-1,), "both": (1, -1)}[self.side]


# --------------------------------------------------------------------------
# curve operators


def derivative(curve: PeriodicCurve, order: int = 1) -> tuple[np.ndarray, np.ndarray]:
    """``d^order z / dalpha^order`` on the grid, linear part included."""
    if order < 1:
        raise ValueError("order must be a positive integer")
    if order > curve.n_points // 4:
        raise AccuracyError(
            f"derivative order {order} exceeds n_points/4 = {curve.n_points // 4}")
    d1 = spectral_derivative(curve.p1, order)
    d2 = spectral_derivative(curve.p2, order)
    if order == 1:
        d1 = d1 + curve.lift
    return d1, d2


def tangent_speed2(curve: PeriodicCurve) -> np.ndarray:
    """``|dz/dalpha|^2`` on the grid."""
    d1, d2 = derivative(curve, 1)
    return d1 * d1 + d2 * d2


class ArcChord(NamedTuple):
    value: float
    alpha: float
    beta: float


def arc_chord(curve: PeriodicCurve, n_wrap: int = 1) -> ArcChord:
    """Grid maximum of the arc-chord function ``beta^2/|z(alpha)-z(alpha-beta)|^2``.

    For lifted curves ``beta`` ranges over the grid offsets plus ``n_wrap``
    period images on each side; for closed curves over one period window
    ``(-pi, pi]``.  The diagonal limit ``1/|dz|^2`` is included.  This is a
    grid maximum, not a certified supremum.
    """
    sp = tangent_speed2(curve)
    diag_i = int(np.argmax(1.0 / sp))
    diag = float(1.0 / sp[diag_i])
    val, i, j, m = _kernels.arc_chord_scan(curve.z1, curve.z2, curve.lift, n_wrap)
    a = curve.grid
    if not np.isfinite(val):
        raise SelfIntersectionError(
            f"curve samples {i} and {j} (image {m}) coincide", (int(i), int(j)), int(m))
    if diag >= val:
        return ArcChord(diag, float(a[diag_i]), 0.0)
    beta = a[i] - a[j] + 2.0 * np.pi * m
    if not curve.lift:
        beta = (beta + np.pi) % (2.0 * np.pi) - np.pi
    return ArcChord(float(val), float(a[i]), float(beta))


def decay_rate(curve: PeriodicCurve, floor: float = 1e-13,
               top: float = 1e-2, min_modes: int = 8) -> float:
    """Least-squares exponential decay rate of the curve spectrum.

    Fits ``log|c_k|`` against ``k > 0`` over modes with magnitude inside
    ``(floor, top * max)``, where ``|c_k|`` combines both components.
    Returns ``0`` for a spectrum that does not decay.
    """
    c1, c2 = curve.coeffs
    n = curve.n_points
    k = np.arange(1, n // 2)
    mag = np.sqrt(np.abs(c1[1:n // 2]) ** 2 + np.abs(c2[1:n // 2]) ** 2
                  + np.abs(c1[-1:-n // 2:-1]) ** 2 + np.abs(c2[-1:-n // 2:-1]) ** 2)
    mag = mag / np.sqrt(2.0)
    if not np.any(mag > 0):
        raise InsufficientSpectrumError("spectrum is identically zero")
    peak = mag.max()
    sel = (mag > floor) & (mag < top * peak)
    if sel.sum() < min_modes:
        raise InsufficientSpectrumError(
            f"only {int(sel.sum())} usable modes (need {min_modes})")
    slope = np.polyfit(k[sel], np.log(mag[sel]), 1)[0]
    return float(max(0.0, -slope))


def _tail_check(curve: PeriodicCurve, xi: float, guard: float) -> None:
    if xi == 0:
        return
    n = curve.n_points
    k = np.abs(wavenumbers(n))
    c1, c2 = curve.coeffs
    power = np.abs(c1) ** 2 + np.abs(c2) ** 2
    band = np.sqrt(power.sum())
    tail = k > 0.9 * (n // 2)
    amplified = np.sqrt(np.sum(power[tail] * np.exp(2.0 * k[tail] * xi)))
    if amplified > guard * band:
        raise StripExceededError(
            f"strip xi={xi:g}: amplified tail {amplified:.3e} exceeds "
            f"{guard:g} x band norm {band:.3e}")


def check_strip(curve: PeriodicCurve, xi: float, force: bool = False,
                guard: float = STRIP_TAIL_GUARD) -> None:
    """Raise :class:`StripExceededError` if ``xi`` is not supported by the data."""
    if xi == 0:
        return
    if not force:
        try:
            rho = decay_rate(curve)
        except InsufficientSpectrumError:
            rho = np.inf  # band-limited data continues to an entire function
        if rho <= xi:
            raise StripExceededError(f"strip xi={xi:g} exceeds fitted decay rate {rho:.4g}")
    _tail_check(curve, xi, guard)


def strip_samples(samples, xi: float, sign: int, order: int = 0) -> np.ndarray:
    """Values of ``d^order f`` at ``alpha_j + i*sign*xi`` from real-grid samples."""
    samples = np.asarray(samples)
    n = samples.shape[-1]
    k = wavenumbers(n)
    weight = np.exp(-sign * k * xi).astype(complex)
    weight[n // 2] = np.cosh(k[n // 2] * xi)
    if order:
        weight = weight * (1j * k) ** order
        if order % 2:
            weight[n // 2] = 0.0
    return np.fft.ifft(np.fft.fft(samples) * weight)


def strip_evaluate(curve: PeriodicCurve, strip: StripSpec, force: bool = False,
                   guard: float = STRIP_TAIL_GUARD):
    """Complexified curve ``z(alpha_j +- i xi)``.

    Returns ``(Z1, Z2)`` complex arrays for a one-sided strip, or a dict
    ``{+1: (Z1, Z2), -1: (Z1, Z2)}`` for ``side='both'``.
    """
    check_strip(curve, strip.xi, force=force, guard=guard)
    out = {}
    if strip.xi == 0:
        z = (curve.z1.astype(complex), curve.z2.astype(complex))
        out = {s: z for s in strip.signs}
        return out if strip.side == "both" else z
    for s in strip.signs:
        gamma = curve.grid + 1j * s * strip.xi
        Z1 = curve.lift * gamma + strip_samples(curve.p1, strip.xi, s)
        Z2 = strip_samples(curve.p2, strip.xi, s)
        out[s] = (Z1, Z2)
    if strip.side != "both":
        return out[strip.signs[0]]
    return out


def sobolev_strip_norm(curve: PeriodicCurve, k: int, strip: StripSpec,
                       force: bool = False) -> float:
    """Squared strip norm ``||z||^2_{H^k(S)}``.

    ``sum_+- int |z(gamma) - (gamma, 0)|^2`` plus, for ``k >= 1``,
    ``sum_+- int |d^k (z - (gamma, 0))|^2``; the flat state has zero norm.  ``k = 0`` returns the first sum only.
    """
    if k < 0:
        raise ValueError("k must be non-negative")
    check_strip(curve, strip.xi, force=force)
    n = curve.n_points
    h = 2.0 * np.pi / n
    total = 0.0
    for s in strip.signs:
        q1 = strip_samples(curve.p1, strip.xi, s)
        q2 = strip_samples(curve.p2, strip.xi, s)
        total += h * float(np.sum(np.abs(q1) ** 2 + np.abs(q2) ** 2))
        if k >= 1:
            d1 = strip_samples(curve.p1, strip.xi, s, order=k)
            d2 = strip_samples(curve.p2, strip.xi, s, order=k)
            total += h * float(np.sum(np.abs(d1) ** 2 + np.abs(d2) ** 2))
    return total


def field_strip_norm(f, k: int, xi: float, signs=(1, -1)) -> float:
    """Squared ``H^k`` strip norm of a real-grid field ``f`` continued analytically."""
    n = np.shape(f)[-1]
    h = 2.0 * np.pi / n
    total = 0.0
    for s in signs:
        total += h * float(np.sum(np.abs(strip_samples(f, xi, s)) ** 2))
        if k >= 1:
            total += h * float(np.sum(np.abs(strip_samples(f, xi, s, order=k)) ** 2))
    return total


def sampled_hk_norm(g, k: int, h: float) -> float:
    """Squared ``H^k`` norm (L2 plus k-th derivative) of periodic samples, real or complex."""
    g = np.asarray(g)
    total = h * float(np.sum(np.abs(g) ** 2))
    if k >= 1:
        total += h * float(np.sum(np.abs(spectral_derivative(g, k)) ** 2))
    return total
