"""End-to-end acceptance checks.

Each test records one ``PASS``/``FAIL`` line, printed in the terminal
summary, with the measured quantity and the wall time against its limit.
Run alone with ``pytest tests/test_acceptance.py -v``.
"""

import json
import time

import numpy as np
import pytest

import conftest
from muskat.conformal_splat import dP, map_P, map_P_inv, q_factor_physical, tilde_velocity, transform_curve
from muskat.config import RunConfig
from muskat.diagnostics import (
    h4_norm,
    h_integrator,
    rayleigh_taylor,
    rt_energy,
    speed_spread,
    strip_width,
)
from muskat.dynamics import EvolutionOptions, integrate, velocity
from muskat.neck import neck
from muskat.oracles import decay_rate, fd_jacobian, mode_eigenvalue
from muskat.persistence import load, save
from muskat.runner import run
from muskat.scenarios import graph
from muskat.singular_integrals import birkhoff_rott, br_direct_oracle
from muskat.spectral_curve import PeriodicCurve, alpha_grid, arc_chord, derivative, hilbert
from muskat.vorticity_solver import FluidParams, SolverOptions, residual, solve_vorticity, vorticity_rhs


class Criterion:
    """Collects sub-checks, then reports a single line."""

    def __init__(self, number, limit):
        self.number = number
        self.limit = limit
        self.notes = []
        self.ok = True
        self.t0 = time.perf_counter()

    def check(self, label, ok, value):
        self.ok &= bool(ok)
        self.notes.append(f"{label}={value}" + ("" if ok else " (!)"))

    def finish(self):
        elapsed = time.perf_counter() - self.t0
        timely = elapsed < self.limit
        status = "PASS" if self.ok and timely else "FAIL"
        line = (f"{status} criterion {self.number}: " + "; ".join(self.notes)
                + f" [{elapsed:.2f}s / {self.limit:g}s]")
        conftest.ACCEPTANCE_LINES.append(line)
        print(line)
        assert self.ok, line
        assert timely, line


def fmt(x):
    return f"{x:.3g}"


def test_criterion_01_flat_steady_state():
    cr = Criterion(1, 1.0)
    c = integrate(PeriodicCurve.flat(64), FluidParams.with_rate(1.0),
                  EvolutionOptions(dt=1e-3, t_end=0.1))
    err = h4_norm(c)
    cr.check("H4 drift", err < 1e-12, fmt(err))
    cr.finish()


def test_criterion_02_quadrature_equivalence():
    cr = Criterion(2, 10.0)
    c = graph(128, [0.1])
    w = solve_vorticity(c, FluidParams())
    u = birkhoff_rott(c, w)
    v = br_direct_oracle(c, w, n_images=128)
    err = max(np.max(np.abs(u[0] - v[0])), np.max(np.abs(u[1] - v[1])))
    cr.check("BR vs images", err < 1e-8, fmt(err))

    a = alpha_grid(128)
    flat = PeriodicCurve.flat(128)
    rng = np.random.default_rng(7)
    k = np.arange(1, 40)
    wf = np.cos(np.outer(a, k)) @ (rng.standard_normal(k.size) / k**2)
    b1, b2 = birkhoff_rott(flat, wf)
    err = max(np.max(np.abs(b1)), np.max(np.abs(b2 - hilbert(wf) / 2)))
    cr.check("flat closed form", err < 1e-10, fmt(err))
    cr.finish()


def test_criterion_03_vorticity_solver():
    cr = Criterion(3, 5.0)
    c = PeriodicCurve(np.zeros(64), 0.1 * np.cos(alpha_grid(64)))
    p = FluidParams()
    dense = solve_vorticity(c, p, SolverOptions(mode="dense"))
    for mode in ("krylov", "fixed-point"):
        w = solve_vorticity(c, p, SolverOptions(mode=mode))
        err = np.max(np.abs(w - dense))
        cr.check(f"{mode} vs dense", err < 1e-10, fmt(err))
        res = residual(c, w, vorticity_rhs(c, p.R))
        cr.check(f"{mode} residual", res < 1e-12, fmt(res))
    cr.finish()


def test_criterion_04_tangential_choice():
    cr = Criterion(4, 30.0)
    c = graph(64, [0.1])
    p = FluidParams()
    on = integrate(c, p, EvolutionOptions(dt=1e-2, t_end=0.5))
    off = integrate(c, p, EvolutionOptions(dt=1e-2, t_end=0.5, tangential=False))
    s_on, s_off = speed_spread(on), speed_spread(off)
    cr.check("spread with c", s_on < 1e-6, fmt(s_on))
    cr.check("spread without c", s_off > 1e-3, fmt(s_off))
    cr.finish()


def test_criterion_05_linear_stability():
    cr = Criterion(5, 60.0)
    eig = mode_eigenvalue(fd_jacobian(PeriodicCurve.flat(32), 1.0), 1)
    r1 = decay_rate(1, R=1.0, delta=1e-3)
    r2 = decay_rate(1, R=2.0, delta=1e-3)
    rel = abs(r1 / eig - 1)
    cr.check("rate vs eigenvalue", rel < 0.01, f"{r1:.6f}/{eig:.6f}")
    ratio = r2 / r1
    cr.check("R doubling ratio", abs(ratio - 2) < 0.04, f"{ratio:.5f}")
    cr.finish()


def test_criterion_06_temporal_order():
    cr = Criterion(6, 30.0)
    c = graph(64, [0.2, 0.05])
    p = FluidParams()
    sols = []
    for dt in (0.04, 0.02, 0.01):
        out = integrate(c, p, EvolutionOptions(dt=dt, t_end=0.64, filter_threshold=0.0))
        sols.append(np.concatenate((out.p1, out.p2)))
    ratio = np.max(np.abs(sols[0] - sols[1])) / np.max(np.abs(sols[1] - sols[2]))
    cr.check("self-convergence ratio", 13 <= ratio <= 19, f"{ratio:.2f}")
    cr.finish()


def test_criterion_07_conformal_probe():
    cr = Criterion(7, 10.0)
    rng = np.random.default_rng(1)
    w = rng.uniform(-3, 3, 1000) + 1j * rng.uniform(0.05, 3, 1000) * rng.choice([-1, 1], 1000)
    err = np.max(np.abs(map_P_inv(map_P(w)) - w))
    cr.check("round trip", err < 1e-12, fmt(err))

    n = 128
    below = PeriodicCurve(np.zeros(n), -1.0 + 0.1 * np.cos(alpha_grid(n)))
    state = transform_curve(below)
    err = np.max(np.abs(state.q2 - q_factor_physical(below)))
    cr.check("Q2 two paths", err < 1e-10, fmt(err))

    p = FluidParams()
    v = velocity(below, p)
    pushed = dP(below.w) * (v.v1 + 1j * v.v2)
    tv = tilde_velocity(state, p)
    d1, d2 = derivative(state.curve, 1)
    normal = 1j * (d1 + 1j * d2) / np.hypot(d1, d2)
    err = np.max(np.abs((np.conj(normal) * (pushed - (tv.v1 + 1j * tv.v2))).real))
    cr.check("normal velocity", err < 1e-6, fmt(err))
    cr.finish()


def test_criterion_08_splat_discriminator():
    cr = Criterion(8, 120.0)
    ds = np.array([0.1, 0.05, 0.025])
    phys, tilde_ac, clear = [], [], []
    for d in ds:
        c = neck(256, d)
        phys.append(arc_chord(c).value)
        st = transform_curve(c)
        tilde_ac.append(arc_chord(st.curve).value)
        clear.append(st.clearances)
    slope = np.polyfit(np.log(ds), np.log(phys), 1)[0]
    cr.check("physical slope", abs(slope + 2) <= 0.3, f"{slope:.3f}")
    spread = max(tilde_ac) / min(tilde_ac)
    cr.check("tilde arc-chord spread", spread < 10, f"{spread:.3f}")
    clear = np.array(clear)
    spread = np.max(clear.max(axis=0) / clear.min(axis=0))
    cr.check("clearance spread", spread < 10 and np.all(clear > 0), f"{spread:.3f}")
    cr.finish()


def test_criterion_09_diagnostics_algebra():
    cr = Criterion(9, 30.0)
    p = FluidParams(rho2=2.0, g=1.5)
    flat = PeriodicCurve.flat(64)
    v = velocity(flat, p)
    err = np.max(np.abs(rayleigh_taylor(flat, v.vorticity, v.br, p) - p.g * p.rho2))
    cr.check("flat sigma", err < 1e-13, fmt(err))

    a = alpha_grid(128)
    k = np.arange(1, 64)
    worst = 0.0
    for rate in (0.3, 0.7, 1.1):
        c = PeriodicCurve(np.zeros(128), np.cos(np.outer(a, k)) @ np.exp(-rate * k))
        worst = max(worst, abs(strip_width(c) - rate))
    cr.check("planted slopes", worst < 1e-3, fmt(worst))

    t = np.arange(1001) * 1e-3
    h = h_integrator(np.full(t.size, 0.013), t, 0.5).h
    err = np.max(np.abs(h - (1.5 * np.exp(-0.13 * t) - 1)))
    cr.check("h closed form", err < 1e-10, fmt(err))

    m0 = 1.0
    guarded = [rt_energy(PeriodicCurve.flat(64), FluidParams(), lam, 0.0).reason
               for lam in (m0 / 2, m0)]
    ok = all(r == "lambda-guard" for r in guarded)
    ok &= rt_energy(PeriodicCurve.flat(64), FluidParams(), 0.49 * m0, 0.0).finite
    cr.check("lambda guard", ok, ",".join(guarded))
    cr.finish()


def test_criterion_10_persistence(tmp_path):
    cr = Criterion(10, 30.0)
    c = graph(64, [0.1, 0.03], phases=[0.0, 1.0])
    save(tmp_path / "c.json", c, 0.125)
    back = load(tmp_path / "c.json")
    same = (np.array_equal(back.curve.p1, c.p1) and np.array_equal(back.curve.p2, c.p2)
            and back.t == 0.125)
    cr.check("round trip", same, "exact" if same else "lossy")

    def go(sub):
        cfg = RunConfig(scenario="graph", scenario_params={"a1": 0.1, "a2": 0.02, "seed": 3},
                        n_points=32, evolution=EvolutionOptions(dt=0.02, t_end=0.2),
                        out=str(tmp_path / sub))
        run(cfg)
        return (tmp_path / sub / "diagnostics.csv").read_bytes()

    a, b = go("a"), go("b")
    cr.check("csv bytes", a == b and len(a) > 0, f"{len(a)}B")
    same = json.loads((tmp_path / "a" / "final.json").read_text()) == \
        json.loads((tmp_path / "b" / "final.json").read_text())
    cr.check("final state", same, "equal" if same else "differs")
    cr.finish()


if __name__ == "__main__":
    raise SystemExit(pytest.main([__file__, "-v", "-s"]))
