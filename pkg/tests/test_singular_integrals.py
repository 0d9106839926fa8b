import os
import subprocess
import sys

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from muskat import _kernels
from muskat.errors import CostGuardError, SingularKernelError
from muskat.scenarios import graph
from muskat.singular_integrals import (
    apply_T,
    assemble_br_matrices,
    birkhoff_rott,
    br_direct_oracle,
)
from muskat.spectral_curve import PeriodicCurve, alpha_grid, hilbert

from conftest import band_limited, random_curve

N = 64
A = alpha_grid(N)
seeds = st.integers(0, 2**31 - 1)


def test_flat_zero_vorticity():
    u, v = birkhoff_rott(PeriodicCurve.flat(N), np.zeros(N))
    assert not u.any() and not v.any()


def test_flat_cosine_reduces_to_hilbert():
    u, v = birkhoff_rott(PeriodicCurve.flat(N), np.cos(A))
    assert np.max(np.abs(u)) < 1e-14
    assert np.max(np.abs(v - 0.5 * np.sin(A))) < 1e-13


@given(seeds)
def test_flat_is_half_hilbert(seed):
    w = band_limited(N, N // 4, 1.0, np.random.default_rng(seed))
    u, v = birkhoff_rott(PeriodicCurve.flat(N), w)
    assert np.max(np.abs(u)) < 1e-12
    assert np.max(np.abs(v - 0.5 * hilbert(w))) < 1e-10


def test_oracle_flat_cosine():
    u, v = br_direct_oracle(PeriodicCurve.flat(N), np.cos(A), n_images=64)
    assert np.max(np.abs(u)) < 1e-6 and np.max(np.abs(v - 0.5 * np.sin(A))) < 1e-6


def test_oracle_without_tail_converges_algebraically():
    c = graph(32, [0.1])
    w = np.cos(c.grid)
    ref = np.array(birkhoff_rott(c, w))
    errs = [np.max(np.abs(np.array(br_direct_oracle(c, w, m, tail_correction=False)) - ref))
            for m in (8, 16, 32)]
    assert errs[2] < errs[1] < errs[0]
    # successive changes shrink at least geometrically (image tail ~ 1/M)
    d1 = errs[0] - errs[1]
    d2 = errs[1] - errs[2]
    assert d2 < 0.6 * d1


def test_oracle_tail_correction_converges_faster():
    c = graph(32, [0.1])
    w = np.cos(c.grid)
    ref = np.array(birkhoff_rott(c, w))
    a = np.max(np.abs(np.array(br_direct_oracle(c, w, 16)) - ref))
    b = np.max(np.abs(np.array(br_direct_oracle(c, w, 32)) - ref))
    assert b < a / 4


def test_oracle_guard():
    with pytest.raises(ValueError):
        br_direct_oracle(PeriodicCurve.flat(16), np.zeros(16), n_images=4)


def test_vertical_translation_invariance():
    c = random_curve(N, 6, 0.1, 2)
    w = np.sin(2 * A) + 0.3
    moved = c.replace(p2=c.p2 + 0.7)
    u0, v0 = birkhoff_rott(c, w)
    u1, v1 = birkhoff_rott(moved, w)
    assert np.max(np.abs(u0 - u1)) < 1e-12 and np.max(np.abs(v0 - v1)) < 1e-12


@pytest.mark.parametrize("shift", [2, 5])
def test_parameter_shift_permutes(shift):
    """Re-indexing the grid by ``shift`` permutes the BR samples the same way."""
    c = random_curve(N, 6, 0.1, 5)
    w = np.cos(A) + 0.2 * np.sin(3 * A)
    z1 = np.roll(c.z1, -shift)
    z1[N - shift:] += 2 * np.pi
    moved = PeriodicCurve.from_points(z1 - 2 * np.pi * shift / N, np.roll(c.z2, -shift))
    u0, v0 = birkhoff_rott(c, w)
    u1, v1 = birkhoff_rott(moved, np.roll(w, -shift))
    assert np.max(np.abs(np.roll(u0, -shift) - u1)) < 1e-12
    assert np.max(np.abs(np.roll(v0, -shift) - v1)) < 1e-12


@given(seeds, st.floats(-3, 3), st.floats(-3, 3))
def test_T_linear(seed, a, b):
    rng = np.random.default_rng(seed)
    c = random_curve(N, 6, 0.1, seed % 1000)
    w1, w2 = rng.standard_normal(N), rng.standard_normal(N)
    lhs = apply_T(c, a * w1 + b * w2)
    rhs = a * apply_T(c, w1) + b * apply_T(c, w2)
    assert np.max(np.abs(lhs - rhs)) < 1e-12 * (1 + np.max(np.abs(rhs)))


def test_T_flat_vanishes():
    rng = np.random.default_rng(0)
    assert np.max(np.abs(apply_T(PeriodicCurve.flat(N), rng.standard_normal(N)))) < 1e-14
    assert not apply_T(random_curve(), np.zeros(N)).any()


def test_br_matrices_reproduce_kernel():
    c = random_curve(32, 4, 0.1, 7)
    B1, B2 = assemble_br_matrices(c)
    w = np.random.default_rng(1).standard_normal(32)
    u, v = birkhoff_rott(c, w)
    assert np.max(np.abs(B1 @ w - u)) < 1e-12 and np.max(np.abs(B2 @ w - v)) < 1e-12


def test_br_matrix_cost_guard():
    with pytest.raises(CostGuardError):
        assemble_br_matrices(PeriodicCurve.flat(1024))


def test_singular_kernel_guard():
    p1 = np.zeros(N)
    p1[10] = A[11] - A[10]
    with pytest.raises(SingularKernelError):
        birkhoff_rott(PeriodicCurve(p1, np.zeros(N)), np.ones(N))


def test_wrong_vorticity_shape():
    with pytest.raises(ValueError):
        birkhoff_rott(PeriodicCurve.flat(N), np.zeros(N + 2))


def test_closed_curve_circle():
    """Uniform sheet on a circle induces no normal velocity on the circle itself."""
    c = PeriodicCurve(np.cos(A), np.sin(A), lift=0.0)
    u, v = birkhoff_rott(c, np.ones(N))
    normal = u * np.cos(A) + v * np.sin(A)
    assert np.max(np.abs(normal)) < 1e-12


# numba and numpy twins

@pytest.mark.skipif(not _kernels.HAVE_NUMBA, reason="numba unavailable")
@given(seeds)
def test_kernel_paths_agree(seed):
    c = random_curve(48, 6, 0.2, seed % 997)
    w = np.random.default_rng(seed).standard_normal(48)
    x, y = np.ascontiguousarray(c.z1), np.ascontiguousarray(c.z2)
    for lift in (1, 0):
        a = _kernels._br_sum_numpy(x, y, w, lift)
        b = _kernels._br_sum_jit(x, y, w, lift)
        assert np.max(np.abs(a[0] - b[0])) < 1e-13 and np.max(np.abs(a[1] - b[1])) < 1e-13
    a = _kernels._br_images_numpy(x, y, w, 8)
    b = _kernels._br_images_jit(x, y, w, 8)
    assert np.max(np.abs(a[0] - b[0])) < 1e-12 and np.max(np.abs(a[1] - b[1])) < 1e-12
    assert _kernels._arc_chord_numpy(x, y, 1, 1)[0] == pytest.approx(
        _kernels._arc_chord_jit(x, y, 1, 1)[0], rel=1e-14)


def test_backend_reports_choice():
    assert _kernels.backend() in ("numba", "numpy")


@pytest.mark.parametrize("flag,want", [("1", "numpy"), ("0", None)])
def test_env_flag_selects_backend(flag, want):
    env = dict(os.environ, MUSKAT_DISABLE_NUMBA=flag)
    out = subprocess.run([sys.executable, "-c",
                          "from muskat import _kernels; print(_kernels.backend())"],
                         env=env, capture_output=True, text=True, check=True).stdout.strip()
    assert out == (want or _kernels.backend())
