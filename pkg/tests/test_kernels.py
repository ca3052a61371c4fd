"""Both kernel flavours must give the same answers."""

import os
import subprocess
import sys

import numpy as np
import pytest

from wavelab import kernels
from wavelab.gammaflow import gerstner_constants
from wavelab.gerstner import LagrangianLabel, position, stream_p


@pytest.fixture(scope="module")
def cloud(canon):
    rng = np.random.default_rng(7)
    a = rng.uniform(0, canon.wavelength, 500)
    b = canon.b0 - rng.uniform(0, 6 / canon.k, a.size)
    X, Z = position(0.0, LagrangianLabel(a, b), canon)
    return a, b, X, Z


@pytest.mark.parametrize("inv", [kernels.invert_labels_numba, kernels.invert_labels_numpy])
def test_inversion_recovers_labels(canon, cloud, inv):
    a, b, X, Z = cloud
    ga, gb, _, ok = inv(X, Z, canon.k, canon.h0, canon.b0)
    assert ok.all()
    # a is defined modulo the wavelength
    da = np.angle(np.exp(1j * canon.k * (ga - a))) / canon.k
    assert np.max(np.abs(da)) * canon.k < 1e-11
    assert np.max(np.abs(gb - b)) * canon.k < 1e-11


def test_surface_label_flavours_agree(canon):
    x = np.linspace(-300, 900, 1001)
    s1 = kernels.surface_label_numba(x, canon.k, canon.b0)
    s2 = kernels.surface_label_numpy(x, canon.k, canon.b0)
    assert np.max(np.abs(s1 - s2)) < 1e-9
    r = np.exp(canon.k * canon.b0) / canon.k
    assert np.max(np.abs(s1 - r * np.sin(canon.k * s1) - x)) < 1e-9


def test_gap_flavours_agree(canon):
    gc = gerstner_constants(canon)
    b = np.linspace(canon.b0, canon.b0 - 5 / canon.k, 101)
    p = stream_p(b, canon)
    y0 = canon.c**2 * np.exp(2 * canon.k * canon.b0)
    y1, j1 = kernels.rk4_gap_numba(y0, p, -2 * gc.A, gc.width, gc.p_scale / 512)
    y2, j2 = kernels.rk4_gap_numpy(y0, p, -2 * gc.A, gc.width, gc.p_scale / 512)
    assert j1 == j2 == -1
    assert np.array_equal(y1, y2)


def test_gap_reports_exit():
    # y' = y/(1 - y) upward from y = 0.5 hits the pole
    y, j = kernels.rk4_gap_numpy(0.5, np.linspace(0, 1, 11), 1.0, 1.0, 1e-3)
    y2, j2 = kernels.rk4_gap_numba(0.5, np.linspace(0, 1, 11), 1.0, 1.0, 1e-3)
    assert j > 0 and j == j2
    assert np.isnan(y[j:]).all()


def test_path_flavours_agree(canon):
    lbl = LagrangianLabel(np.array([0.0, 200.0]), np.array([-60.0, -150.0]))
    X0, Z0 = position(0.0, lbl, canon)
    dt = canon.period / 64
    A = kernels.rk4_paths_numba(X0, Z0, 0.0, dt, 64, canon.k, canon.c, canon.h0, canon.b0)
    B = kernels.rk4_paths_numpy(X0, Z0, 0.0, dt, 64, canon.k, canon.c, canon.h0, canon.b0)
    assert np.array_equal(A[2], B[2])
    assert np.max(np.abs(A[0] - B[0])) < 1e-9
    assert np.max(np.abs(A[1] - B[1])) < 1e-9


def test_path_escape_flagged(canon):
    X, Z, esc = kernels.rk4_paths_numpy(
        np.array([0.0]), np.array([canon.crest + 5.0]), 0.0, 1.0, 4, canon.k, canon.c, canon.h0, canon.b0
    )
    assert esc[0] == 0 and np.isnan(X[1:, 0]).all()


def test_env_flag_selects_numpy():
    env = dict(os.environ, WAVELAB_JIT="0")
    out = subprocess.run(
        [sys.executable, "-c", "import wavelab; print(wavelab.BACKEND)"],
        env=env, capture_output=True, text=True, check=True,
    )
    assert out.stdout.strip() == "numpy"
