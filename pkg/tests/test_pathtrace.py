"""Particle paths integrated through the Eulerian field."""

import math

import numpy as np
import pytest

from wavelab import kernels, pathtrace
from wavelab.core import GerstnerParams
from wavelab.errors import EscapeError, InsufficientDataError, OutOfDomainError
from wavelab.gerstner import LagrangianLabel, position


def _start(prm, a, kb):
    X, Z = position(0.0, LagrangianLabel(a, kb / prm.k), prm)
    return float(X), float(Z)


@pytest.fixture(scope="module")
def unit():
    return GerstnerParams.from_wavenumber(1.0, b0=-0.1)


def test_period_of_unit_wave(unit):
    assert unit.period == pytest.approx(2.0071367, abs=1e-6)


@pytest.mark.parametrize("kb", [-0.5, -1.0, -2.0])
def test_orbit_closes(canon, kb):
    ref = pathtrace.refine_path(_start(canon, 3.0, kb), 0.0, canon)
    d, tr = ref.diagnostics, ref.trajectory
    k = canon.k
    assert d.closure * k < 1e-7
    assert abs(d.drift) * k < 1e-7
    assert d.radial_deviation / tr.radius < 1e-6
    assert abs(d.period / canon.period - 1) < 1e-6
    assert tr.radius == pytest.approx(math.exp(kb) / k, rel=1e-10)


def test_fourth_order_closure(unit):
    gaps, ratios = pathtrace.closure_study(_start(unit, 0.3, -1.0), 0.0, unit, steps_per_period=64, levels=4)
    assert np.all(np.diff(gaps) < 0)
    assert np.all((ratios > 14) & (ratios < 18)), ratios


def test_clockwise_about_centre(canon):
    tr = pathtrace.integrate_path(_start(canon, 0.0, -1.0), 0.0, canon, dt=canon.period / 256, n_steps=64)
    dx = tr.points[:, 0] - tr.center[0]
    dz = tr.points[:, 1] - tr.center[1]
    phi = np.unwrap(np.arctan2(dz, dx))
    assert np.all(np.diff(phi) < 0)
    slope = np.polyfit(tr.t_grid, phi, 1)[0]
    assert slope == pytest.approx(-canon.k * canon.c, rel=1e-8)


def test_deep_particle_barely_moves(canon):
    tr = pathtrace.integrate_path(_start(canon, 0.0, -8.0), 0.0, canon)
    excursion = np.max(np.hypot(tr.points[:, 0] - tr.center[0], tr.points[:, 1] - tr.center[1]))
    assert excursion == pytest.approx(math.exp(-8.0) / canon.k, rel=1e-6)


def test_particles_on_one_streamline_share_radius(canon):
    starts = [_start(canon, a, -1.0) for a in (0.0, 100.0, 400.0)]
    trs = pathtrace.integrate_paths(([s[0] for s in starts], [s[1] for s in starts]), 0.0, canon.period / 1024, 1024, canon)
    radii = [t.radius for t in trs]
    assert max(radii) - min(radii) < 1e-12 / canon.k
    for t in trs:
        assert pathtrace.orbit_diagnostics(t).closure * canon.k < 1e-7


def test_short_trajectory_rejected(canon):
    tr = pathtrace.integrate_path(_start(canon, 0.0, -1.0), 0.0, canon, n_steps=100)
    with pytest.raises(InsufficientDataError):
        pathtrace.orbit_diagnostics(tr)


def test_off_grid_period_is_interpolated(canon):
    dt = canon.period / 1000.5
    tr = pathtrace.integrate_path(_start(canon, 0.0, -1.0), 0.0, canon, dt=dt, n_steps=1100)
    assert pathtrace.orbit_diagnostics(tr).closure * canon.k < 1e-6


def test_start_above_surface_rejected(canon):
    with pytest.raises(OutOfDomainError):
        pathtrace.integrate_path((0.0, canon.crest + 5.0), 0.0, canon)


def test_escape_reported(canon):
    # steps of half a period overshoot the orbit of a particle close to the crest
    with pytest.raises(EscapeError):
        pathtrace.integrate_path(_start(canon, 0.0, -0.15), 0.0, canon, dt=canon.period / 3, n_steps=30)


@pytest.mark.parametrize("fn", [kernels.rk4_paths_numba, kernels.rk4_paths_numpy])
def test_backends_agree(canon, fn):
    X0, Z0 = _start(canon, 5.0, -1.0)
    dt, n = canon.period / 128, 128
    X, Z, esc = fn(np.array([X0]), np.array([Z0]), 0.0, dt, n, canon.k, canon.c, canon.h0, canon.b0)
    ref = pathtrace.integrate_path((X0, Z0), 0.0, canon, dt=dt, n_steps=n)
    assert esc[0] < 0
    assert np.max(np.abs(X[:, 0] - ref.points[:, 0])) < 1e-9 / canon.k
    assert np.max(np.abs(Z[:, 0] - ref.points[:, 1])) < 1e-9 / canon.k
