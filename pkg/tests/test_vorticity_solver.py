import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from muskat.errors import CostGuardError, IterationError
from muskat.singular_integrals import apply_T, br_direct_oracle
from muskat.spectral_curve import PeriodicCurve, alpha_grid, derivative
from muskat.vorticity_solver import (
    FluidParams,
    SolverOptions,
    assemble_dense_T,
    residual,
    solve_linear,
    solve_vorticity,
    vorticity_rhs,
)

from conftest import random_curve

N = 64
A = alpha_grid(N)
COS = PeriodicCurve(np.zeros(N), 0.1 * np.cos(A))


def test_fluid_params_rate():
    p = FluidParams(mu2=2.0, rho2=3.0, kappa=0.5, g=9.81)
    assert p.R == pytest.approx(0.5 * 9.81 * 3.0 / 2.0, rel=1e-15)
    assert FluidParams.with_rate(2.5).R == 2.5


@pytest.mark.parametrize("field", ["mu2", "rho2", "kappa", "g"])
def test_fluid_params_positive(field):
    with pytest.raises(ValueError):
        FluidParams(**{field: 0.0})


def test_solver_options_validate():
    with pytest.raises(ValueError):
        SolverOptions(tol=0)
    with pytest.raises(ValueError):
        SolverOptions(max_iter=0)
    with pytest.raises(ValueError):
        SolverOptions(mode="lu")


def test_flat_vorticity_is_zero():
    assert not solve_vorticity(PeriodicCurve.flat(N), FluidParams()).any()


def test_dense_T_flat_is_zero():
    assert np.max(np.abs(assemble_dense_T(PeriodicCurve.flat(N)))) < 1e-12


def test_dense_T_reproduces_apply_T():
    c = random_curve(N, 6, 0.1, 9)
    T = assemble_dense_T(c)
    rng = np.random.default_rng(2)
    for _ in range(5):
        w = rng.standard_normal(N)
        assert np.max(np.abs(T @ w - apply_T(c, w))) < 1e-12


def test_dense_T_cost_guard():
    with pytest.raises(CostGuardError):
        assemble_dense_T(PeriodicCurve.flat(1024))


def test_spectral_radius_small_slope():
    T = assemble_dense_T(COS)
    v = np.random.default_rng(0).standard_normal(N)
    for _ in range(200):
        v = T @ v
        v /= np.linalg.norm(v)
    est = np.linalg.norm(T @ v)
    assert est < 1.0
    assert np.max(np.abs(np.linalg.eigvals(T))) < 1.0


@pytest.mark.parametrize("mode", ["krylov", "fixed-point"])
def test_modes_match_dense(mode):
    p = FluidParams()
    ref = solve_vorticity(COS, p, SolverOptions(mode="dense"))
    w = solve_vorticity(COS, p, SolverOptions(mode=mode))
    assert np.max(np.abs(w - ref)) < 1e-10


def test_residual_below_tolerance():
    c = random_curve(N, 6, 0.1, 3)
    w = solve_vorticity(c, FluidParams())
    rhs = vorticity_rhs(c, 1.0)
    assert residual(c, w, rhs) < 1e-12


def test_residual_with_independent_kernel():
    """Residual re-evaluated with the image-sum kernel inside ``T``."""
    c = random_curve(N, 4, 0.05, 3)
    w = solve_vorticity(c, FluidParams())

    def T_oracle(curve, w):
        u, v = br_direct_oracle(curve, w, n_images=128)
        d1, d2 = derivative(curve, 1)
        return 2 * (u * d1 + v * d2)

    assert residual(c, w, vorticity_rhs(c, 1.0), T=T_oracle) < 1e-8


@given(st.floats(0.1, 10.0))
def test_linear_in_R(R):
    w1 = solve_vorticity(COS, FluidParams.with_rate(R))
    w2 = solve_vorticity(COS, FluidParams.with_rate(2 * R))
    assert np.max(np.abs(w2 - 2 * w1)) <= 1e-10 * np.max(np.abs(w2))


def test_iteration_failure_reports_residual():
    c = random_curve(N, 8, 0.3, 4)
    with pytest.raises(IterationError) as err:
        solve_vorticity(c, FluidParams(), SolverOptions(mode="fixed-point", max_iter=2))
    assert err.value.residual > 0


def test_closed_curve_zero_circulation():
    """On a clockwise closed curve the pinned solve returns the mean-free branch."""
    c = PeriodicCurve(1.5 * np.cos(A), -(0.5 + 0.1 * np.cos(2 * A)) * np.sin(A), lift=0.0)
    rhs = vorticity_rhs(c, 1.0)
    w = solve_linear(c, rhs)
    assert abs(w.mean()) < 1e-12
    assert residual(c, w, rhs) < 1e-12
    dense = solve_linear(c, rhs, SolverOptions(mode="dense"))
    assert np.max(np.abs(w - dense)) < 1e-10


def test_mollified_system_converges_to_plain():
    c = random_curve(N, 6, 0.1, 1)
    p = FluidParams()
    w0 = solve_vorticity(c, p)
    diffs = [np.max(np.abs(solve_vorticity(c, p, mollify_eps=e) - w0)) for e in (1e-3, 1e-4)]
    assert diffs[1] < diffs[0] / 5
