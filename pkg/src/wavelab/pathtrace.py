"""Particle paths through the Eulerian Gerstner field, and orbit diagnostics.

Paths solve ``X' = u(X - c t, Z)``, ``Z' = w(X - c t, Z)`` by classical RK4.
The velocity is evaluated by inverting the Lagrangian map, never from
the closed-form orbit, so the closed circles serve as an oracle.
"""

from __future__ import annotations

import math
from typing import NamedTuple

import numpy as np
from scipy.interpolate import CubicSpline

from . import kernels
from .core import GerstnerParams
from .errors import EscapeError, InsufficientDataError
from .gerstner import LagrangianLabel, invert_map

#: Default RK4 steps per wave period.
STEPS_PER_PERIOD = 2048
#: At most this many step halvings in :func:`refine_path`.
MAX_LEVELS = 4


class Trajectory(NamedTuple):
    t_grid: np.ndarray
    points: np.ndarray  # shape (n, 2): columns X, Z
    label: LagrangianLabel
    center: tuple
    radius: float
    period: float


class OrbitDiagnostics(NamedTuple):
    closure: float
    radial_deviation: float
    period: float
    drift: float
    phase_residual: float


def _labels(starts, t0, prm):
    X0, Z0 = (np.atleast_1d(np.asarray(v, dtype=float)) for v in starts)
    return X0, Z0, invert_map(t0, (X0, Z0), prm)


def integrate_paths(starts, t0, dt, n_steps, prm: GerstnerParams):
    """RK4 paths of several particles at once; see :func:`integrate_path`.

    Raises
    ------
    OutOfDomainError
        A start point lies above the free surface.
    EscapeError
        A particle left the fluid during the integration.
    """
    X0, Z0, lbl = _labels(starts, t0, prm)
    n_steps = int(n_steps)
    X, Z, esc = kernels.rk4_paths(X0, Z0, t0, dt, n_steps, prm.k, prm.c, prm.h0, prm.b0)
    if np.any(esc >= 0):
        i = int(np.flatnonzero(esc >= 0)[0])
        raise EscapeError(f"particle {i} left the fluid at step {int(esc[i])}")
    t = t0 + dt * np.arange(n_steps + 1)
    out = []
    for i in range(X0.size):
        a, b = float(lbl.a[i]), float(lbl.b[i])
        out.append(
            Trajectory(
                t,
                np.column_stack([X[:, i], Z[:, i]]),
                LagrangianLabel(a, b),
                (a, prm.h0 + b),
                math.exp(prm.k * b) / prm.k,
                prm.period,
            )
        )
    return out


def integrate_path(start, t0, prm: GerstnerParams, dt=None, n_steps=None):
    """RK4 path from ``start = (X0, Z0)`` at time ``t0``.

    ``dt`` defaults to ``period / 2048`` and ``n_steps`` to one period.
    The orbit centre, radius and period are filled in from the label of
    the starting point.
    """
    dt = prm.period / STEPS_PER_PERIOD if dt is None else float(dt)
    n_steps = int(round(prm.period / dt)) if n_steps is None else n_steps
    return integrate_paths(([start[0]], [start[1]]), t0, dt, n_steps, prm)[0]


def _at(traj: Trajectory, t):
    i = np.searchsorted(traj.t_grid, t)
    if i < traj.t_grid.size and math.isclose(traj.t_grid[i], t, rel_tol=0, abs_tol=1e-9 * traj.period):
        return traj.points[i]
    spl = CubicSpline(traj.t_grid, traj.points, axis=0)
    return spl(t)


def orbit_diagnostics(traj: Trajectory) -> OrbitDiagnostics:
    """Closure gap, radial deviation, measured period and drift over the first period.

    The period comes from a least-squares line through the unwrapped
    polar angle about the orbit centre; ``phase_residual`` is the largest
    departure from that line (zero for uniform circular motion).

    Raises
    ------
    InsufficientDataError
        The trajectory spans less than one period.
    """
    t, pts = traj.t_grid, traj.points
    t0 = t[0]
    if t[-1] - t0 < traj.period * (1 - 1e-12):
        raise InsufficientDataError(
            f"trajectory spans {t[-1] - t0:.6g} s, less than one period {traj.period:.6g} s"
        )
    end = _at(traj, t0 + traj.period)
    gap = end - pts[0]
    closure = float(np.hypot(*gap))
    dx = pts[:, 0] - traj.center[0]
    dz = pts[:, 1] - traj.center[1]
    rdev = float(np.max(np.abs(np.hypot(dx, dz) - traj.radius)))
    phi = np.unwrap(np.arctan2(dz, dx))
    tau = t - t0
    slope, icpt = np.polyfit(tau, phi, 1)
    resid = float(np.max(np.abs(phi - (slope * tau + icpt))))
    return OrbitDiagnostics(closure, rdev, 2 * math.pi / abs(slope), float(gap[0]), resid)


class Refinement(NamedTuple):
    trajectory: Trajectory
    diagnostics: OrbitDiagnostics
    steps: list
    closures: list


def refine_path(start, t0, prm: GerstnerParams, tol=None, steps_per_period=STEPS_PER_PERIOD, max_levels=MAX_LEVELS):
    """Integrate one period, halving ``dt`` until the closure gap is below ``tol``.

    ``tol`` defaults to ``1e-7 / k``. At most ``max_levels`` step sizes are
    tried; the last one is reported whether or not it met ``tol``.
    """
    tol = 1e-7 / prm.k if tol is None else tol
    steps, closures = [], []
    n = int(steps_per_period)
    for _ in range(max_levels):
        traj = integrate_path(start, t0, prm, dt=prm.period / n, n_steps=n)
        diag = orbit_diagnostics(traj)
        steps.append(prm.period / n)
        closures.append(diag.closure)
        if diag.closure < tol:
            break
        n *= 2
    return Refinement(traj, diag, steps, closures)


def closure_study(start, t0, prm: GerstnerParams, steps_per_period=64, levels=4):
    """Closure gaps for ``levels`` successive halvings of ``dt``, with their ratios."""
    gaps = []
    n = int(steps_per_period)
    for _ in range(levels):
        gaps.append(orbit_diagnostics(integrate_path(start, t0, prm, dt=prm.period / n, n_steps=n)).closure)
        n *= 2
    gaps = np.asarray(gaps)
    with np.errstate(divide="ignore", invalid="ignore"):
        return gaps, gaps[:-1] / gaps[1:]
