"""Initial-data library.

``flat``
    ``z = (alpha, 0)``.
``graph``
    ``z = (x, sum_k a_k cos(k x + phi_k))``, reparametrised to uniform
    arclength by default so that ``|dz/dalpha|^2`` is constant from the start.
``neck``
    Overturned interface whose two arcs face each other across a thin vacuum
    gap of width ``d`` over a horizontal extent ``L`` (near-splat geometry).
    Built as the preimage of a smooth closed curve under the conformal map,
    so the tilde-domain picture is regular by construction.
"""

from __future__ import annotations

from typing import Any, Mapping

import numpy as np

from .errors import ConfigError
from .spectral_curve import PeriodicCurve, alpha_grid, antiderivative, trig_eval

FINE = 2048


def flat(n: int) -> PeriodicCurve:
    return PeriodicCurve.flat(n)


def _graph_fn(amps, phases):
    amps = np.asarray(amps, dtype=float)
    phases = np.asarray(phases, dtype=float)
    k = np.arange(1, amps.size + 1)

    def y(x):
        return np.cos(np.multiply.outer(x, k) + phases) @ amps

    def dy(x):
        return -(k * amps) @ np.sin(np.multiply.outer(k, x) + phases[:, None])

    return y, dy


def graph(n: int, amplitudes=(0.1,), phases=None, arclength: bool = True,
          seed: int | None = None) -> PeriodicCurve:
    """Graph interface ``y = sum a_k cos(k x + phi_k)``.

    ``phases`` default to zero, or to uniform random phases when ``seed`` is
    given.  With ``arclength`` the parameter is proportional to arclength.
    """
    amps = np.atleast_1d(np.asarray(amplitudes, dtype=float))
    if phases is None:
        if seed is None:
            phases = np.zeros_like(amps)
        else:
            phases = np.random.default_rng(seed).uniform(0.0, 2.0 * np.pi, amps.size)
    phases = np.atleast_1d(np.asarray(phases, dtype=float))
    if phases.shape != amps.shape:
        raise ConfigError("phases and amplitudes must have the same length")
    y, dy = _graph_fn(amps, phases)
    a = alpha_grid(n)
    if not arclength:
        return PeriodicCurve(np.zeros(n), y(a))
    x = _arclength_nodes(dy, a)
    return PeriodicCurve(x - a, y(x))


def _arclength_nodes(dy, targets, iters: int = 50) -> np.ndarray:
    """Abscissae ``x(s)`` with arclength from ``-pi`` proportional to ``s + pi``."""
    xf = alpha_grid(FINE)
    speed = np.sqrt(1.0 + dy(xf) ** 2)
    mean = speed.mean()
    G = antiderivative(speed)
    gcoef = np.fft.fft(G) / FINE
    g0 = trig_eval(gcoef, np.array([-np.pi])).real[0]

    def arclen(x):
        return mean * (x + np.pi) + trig_eval(gcoef, x).real - g0

    x = targets.astype(float).copy()
    goal = mean * (targets + np.pi)
    for _ in range(iters):
        step = (arclen(x) - goal) / np.sqrt(1.0 + dy(x) ** 2)
        x -= step
        if np.max(np.abs(step)) < 1e-15:
            break
    return x


SCENARIOS = ("flat", "graph", "neck")


def scenario(name: str, params: Mapping[str, Any] | None = None) -> PeriodicCurve:
    """Build a named initial curve; ``params`` always accepts ``n``."""
    params = dict(params or {})
    n = int(params.pop("n", 64))
    if n < 16 or n % 2:
        raise ConfigError(f"n must be an even integer >= 16, got {n}")
    if name == "flat":
        if params:
            raise ConfigError(f"flat takes no parameters, got {sorted(params)}")
        return flat(n)
    if name == "graph":
        amps = params.pop("amplitudes", None)
        if amps is None:
            amps = [params.pop(f"a{k}", 0.0) for k in range(1, 9)]
            while len(amps) > 1 and amps[-1] == 0.0:
                amps.pop()
        phases = params.pop("phases", None)
        seed = params.pop("seed", None)
        arclength = bool(params.pop("arclength", True))
        if params:
            raise ConfigError(f"unknown graph parameters {sorted(params)}")
        amps = np.asarray(amps, dtype=float)
        return graph(n, amps, phases, arclength=arclength, seed=seed)
    if name == "neck":
        from .neck import neck
        d = float(params.pop("d", 0.05))
        L = float(params.pop("L", 1.0))
        if params:
            raise ConfigError(f"unknown neck parameters {sorted(params)}")
        return neck(n, d=d, L=L)
    raise ConfigError(f"unknown scenario {name!r}; choose from {SCENARIOS}")
