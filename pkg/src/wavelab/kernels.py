"""Hot inner loops, each in a numba and a pure-numpy flavour.

The public names (``invert_labels``, ``surface_label``, ``rk4_gap``,
``rk4_paths``) are bound at import time to the numba versions unless
``WAVELAB_JIT=0``; both flavours stay importable under ``*_numba`` /
``*_numpy`` for testing and benchmarking.

All label kernels work in the moving frame at ``t = 0`` where the
Gerstner map reads::

    x = a - exp(k b)/k * sin(k a)
    z = h0 + b + exp(k b)/k * cos(k a)
"""

import math

import numpy as np

from ._jit import USE_NUMBA, njit, prange

_EPS = np.finfo(float).eps
#: Step reduction near the pole of the gap equation: ``min(1, GAP_STIFF (1 - y/d)^2)``.
GAP_STIFF = 16.0
#: Below this fraction of the nominal step the pole counts as reached.
GAP_FLOOR = 1e-10


def effective_tol(tol, x, z, h0, k):
    """Newton residual tolerance, floored at a few ulps of the coordinates."""
    return tol + 8.0 * _EPS * (np.abs(x) + np.abs(z - h0) + 1.0 / k)


# --------------------------------------------------------------------------
# map inversion
# --------------------------------------------------------------------------


@njit
def _invert_point(x, z, k, h0, b_start, tol, maxiter):
    tol = tol + 8.0 * 2.220446049250313e-16 * (abs(x) + abs(z - h0) + 1.0 / k)
    cap = 0.5 * b_start
    a = x
    b = min(z - h0, b_start)
    for _ in range(3):
        e = math.exp(k * b)
        a = x + e * math.sin(k * a) / k
        b = min(z - h0 - e * math.cos(k * a) / k, b_start)
    for it in range(maxiter + 1):
        e = math.exp(k * b)
        s = math.sin(k * a)
        co = math.cos(k * a)
        f1 = a - e * s / k - x
        f2 = h0 + b + e * co / k - z
        r = math.sqrt(f1 * f1 + f2 * f2)
        if r <= tol:
            # one undamped polishing step, kept only if it helps
            det = 1.0 - e * e
            if det > 0.0:
                an = a - ((1.0 + e * co) * f1 + e * s * f2) / det
                bn = b - (e * s * f1 + (1.0 - e * co) * f2) / det
                if bn < cap or bn < 0.0 and cap == 0.0:
                    en = math.exp(k * bn)
                    g1 = an - en * math.sin(k * an) / k - x
                    g2 = h0 + bn + en * math.cos(k * an) / k - z
                    if g1 * g1 + g2 * g2 <= r * r:
                        a = an
                        b = bn
            return a, b, it, True
        if it == maxiter:
            break
        det = 1.0 - e * e
        if det <= 0.0:
            break
        da = ((1.0 + e * co) * f1 + e * s * f2) / det
        db = (e * s * f1 + (1.0 - e * co) * f2) / det
        t = 1.0
        ok = False
        an = a
        bn = b
        while t > 1e-12:
            an = a - t * da
            bn = b - t * db
            if bn < cap or bn < 0.0 and cap == 0.0:
                en = math.exp(k * bn)
                g1 = an - en * math.sin(k * an) / k - x
                g2 = h0 + bn + en * math.cos(k * an) / k - z
                if math.sqrt(g1 * g1 + g2 * g2) < r:
                    ok = True
                    break
            t *= 0.5
        if not ok:
            break
        a = an
        b = bn
    return a, b, maxiter, False


@njit(parallel=True)
def _invert_batch(x, z, k, h0, b_start, tol, maxiter, a, b, iters, ok):
    for i in prange(x.shape[0]):
        ai, bi, it, good = _invert_point(x[i], z[i], k, h0, b_start, tol, maxiter)
        a[i] = ai
        b[i] = bi
        iters[i] = it
        ok[i] = good


def invert_labels_numba(x, z, k, h0, b_start, tol=1e-12, maxiter=50):
    """Damped Newton inversion of the label map (numba flavour).

    Returns ``(a, b, iterations, converged)`` arrays shaped like ``x``.
    """
    x = np.asarray(x, dtype=float)
    z = np.asarray(z, dtype=float)
    x, z = np.broadcast_arrays(x, z)
    shape = x.shape
    xf = np.ascontiguousarray(x.ravel())
    zf = np.ascontiguousarray(z.ravel())
    n = xf.shape[0]
    a = np.empty(n)
    b = np.empty(n)
    iters = np.empty(n, dtype=np.int64)
    ok = np.empty(n, dtype=np.bool_)
    _invert_batch(xf, zf, float(k), float(h0), float(b_start), float(tol), int(maxiter), a, b, iters, ok)
    return a.reshape(shape), b.reshape(shape), iters.reshape(shape), ok.reshape(shape)


def invert_labels_numpy(x, z, k, h0, b_start, tol=1e-12, maxiter=50):
    """Damped Newton inversion of the label map (vectorised numpy flavour)."""
    x = np.asarray(x, dtype=float)
    z = np.asarray(z, dtype=float)
    x, z = np.broadcast_arrays(x, z)
    shape = x.shape
    x = x.ravel().copy()
    z = z.ravel().copy()
    n = x.shape[0]
    tol_i = effective_tol(tol, x, z, h0, k)
    cap = 0.5 * b_start
    a = x.copy()
    b = np.minimum(z - h0, b_start)
    for _ in range(3):
        e = np.exp(k * b)
        a = x + e * np.sin(k * a) / k
        b = np.minimum(z - h0 - e * np.cos(k * a) / k, b_start)

    def below_cap(b_):
        return (b_ < cap) | ((b_ < 0.0) & (cap == 0.0))

    iters = np.full(n, maxiter, dtype=np.int64)
    ok = np.zeros(n, dtype=bool)
    failed = np.zeros(n, dtype=bool)

    def residual(a_, b_, x_, z_):
        e_ = np.exp(k * b_)
        return a_ - e_ * np.sin(k * a_) / k - x_, h0 + b_ + e_ * np.cos(k * a_) / k - z_

    act = np.arange(n)
    for it in range(maxiter + 1):
        if act.size == 0:
            break
        aa, bb, xx, zz = a[act], b[act], x[act], z[act]
        e = np.exp(k * bb)
        s = np.sin(k * aa)
        co = np.cos(k * aa)
        f1 = aa - e * s / k - xx
        f2 = h0 + bb + e * co / k - zz
        r = np.hypot(f1, f2)
        det = 1.0 - e * e
        done = r <= tol_i[act]
        if done.any():
            idx = act[done]
            # polishing step
            d_ = det[done]
            safe = d_ > 0
            an = aa[done] - np.where(safe, ((1 + e[done] * co[done]) * f1[done] + e[done] * s[done] * f2[done]) / np.where(safe, d_, 1.0), 0.0)
            bn = bb[done] - np.where(safe, (e[done] * s[done] * f1[done] + (1 - e[done] * co[done]) * f2[done]) / np.where(safe, d_, 1.0), 0.0)
            g1, g2 = residual(an, np.minimum(bn, 0.0), xx[done], zz[done])
            keep = safe & below_cap(bn) & (g1 * g1 + g2 * g2 <= r[done] ** 2)
            a[idx] = np.where(keep, an, aa[done])
            b[idx] = np.where(keep, bn, bb[done])
            iters[idx] = it
            ok[idx] = True
        bad = ~done & (det <= 0)
        failed[act[bad]] = True
        go = ~done & ~bad
        if it == maxiter:
            break
        act = act[go]
        if act.size == 0:
            break
        f1, f2, e, s, co, det, r = f1[go], f2[go], e[go], s[go], co[go], det[go], r[go]
        aa, bb, xx, zz = a[act], b[act], x[act], z[act]
        da = ((1 + e * co) * f1 + e * s * f2) / det
        db = (e * s * f1 + (1 - e * co) * f2) / det
        t = np.ones(act.size)
        accepted = np.zeros(act.size, dtype=bool)
        an = aa.copy()
        bn = bb.copy()
        while True:
            todo = ~accepted & (t > 1e-12)
            if not todo.any():
                break
            ta = aa[todo] - t[todo] * da[todo]
            tb = bb[todo] - t[todo] * db[todo]
            g1, g2 = residual(ta, np.minimum(tb, 0.0), xx[todo], zz[todo])
            good = below_cap(tb) & (np.hypot(g1, g2) < r[todo])
            sel = np.flatnonzero(todo)
            an[sel[good]] = ta[good]
            bn[sel[good]] = tb[good]
            accepted[sel[good]] = True
            t[sel[~good]] *= 0.5
        a[act[accepted]] = an[accepted]
        b[act[accepted]] = bn[accepted]
        failed[act[~accepted]] = True
        act = act[accepted]
    return a.reshape(shape), b.reshape(shape), iters.reshape(shape), ok.reshape(shape)


# --------------------------------------------------------------------------
# surface label: solve x = a - r sin(k a) with r = exp(k b0)/k
# --------------------------------------------------------------------------


@njit
def _surface_label_point(x, k, r):
    e0 = k * r
    lo = x - r
    hi = x + r
    a = x
    tol = 4.0 * 2.220446049250313e-16 * (abs(x) + 1.0 / k)
    for _ in range(100):
        f = a - r * math.sin(k * a) - x
        if f == 0.0:
            return a
        if f < 0.0:
            lo = a
        else:
            hi = a
        fp = 1.0 - e0 * math.cos(k * a)
        an = 0.5 * (lo + hi)
        if fp > 0.0:
            trial = a - f / fp
            if lo < trial < hi:
                an = trial
        if abs(an - a) <= tol or hi - lo <= tol:
            return an
        a = an
    return a


@njit(parallel=True)
def _surface_label_batch(x, k, r, out):
    for i in prange(x.shape[0]):
        out[i] = _surface_label_point(x[i], k, r)


def surface_label_numba(x, k, b0):
    """Surface label ``a`` with ``x = a - exp(k b0)/k sin(k a)`` (numba flavour)."""
    x = np.asarray(x, dtype=float)
    xf = np.ascontiguousarray(x.ravel())
    out = np.empty_like(xf)
    _surface_label_batch(xf, float(k), math.exp(k * b0) / k, out)
    return out.reshape(x.shape)


def surface_label_numpy(x, k, b0):
    x = np.asarray(x, dtype=float)
    e0 = math.exp(k * b0)
    r = e0 / k
    lo = x - r
    hi = x + r
    a = x.copy()
    tol = 4.0 * _EPS * (np.abs(x) + 1.0 / k)
    for _ in range(100):
        f = a - r * np.sin(k * a) - x
        lo = np.where(f < 0, a, lo)
        hi = np.where(f > 0, a, hi)
        fp = 1.0 - e0 * np.cos(k * a)
        with np.errstate(divide="ignore", invalid="ignore"):
            trial = a - f / fp
        good = (fp > 0) & (trial > lo) & (trial < hi)
        an = np.where(good, trial, 0.5 * (lo + hi))
        an = np.where(f == 0, a, an)
        if np.all((np.abs(an - a) <= tol) | (hi - lo <= tol)):
            return an
        a = an
    return a


# --------------------------------------------------------------------------
# scalar ODE for the distance of the vorticity primitive to equilibrium
# --------------------------------------------------------------------------


@njit
def _gap_rhs(y, s, d):
    return s * y / (d - y)


def _gap_step(y, d, max_step):
    # f_y = s d/(d - y)^2 grows without bound as y -> d; shrink the step
    # there by the same factor everywhere so the order survives halving
    r = (d - y) / d
    return max_step * min(1.0, GAP_STIFF * r * r)


@njit
def _gap_rhs_jit(y, s, d):
    return s * y / (d - y)


@njit
def _gap_step_jit(y, d, max_step):
    r = (d - y) / d
    return max_step * min(1.0, GAP_STIFF * r * r)


@njit
def _rk4_gap_numba(y0, p_out, s, d, max_step, out):
    y = y0
    out[0] = y
    for j in range(1, p_out.shape[0]):
        p = p_out[j - 1]
        sgn = 1.0 if p_out[j] >= p else -1.0
        while sgn * (p_out[j] - p) > 0.0:
            h = _gap_step_jit(y, d, max_step)
            if h < GAP_FLOOR * max_step:
                return j
            left = abs(p_out[j] - p)
            if h >= left * (1.0 - 1e-12):
                h = left
            h = sgn * h
            k1 = _gap_rhs_jit(y, s, d)
            k2 = _gap_rhs_jit(y + 0.5 * h * k1, s, d)
            k3 = _gap_rhs_jit(y + 0.5 * h * k2, s, d)
            k4 = _gap_rhs_jit(y + h * k3, s, d)
            y = y + h * (k1 + 2.0 * k2 + 2.0 * k3 + k4) / 6.0
            if not (0.0 <= y < d):
                return j
            p = p_out[j] if abs(h) == left else p + h
        out[j] = y
    return -1


def _rk4_gap_python(y0, p_out, s, d, max_step, out):
    y = y0
    out[0] = y
    for j in range(1, p_out.shape[0]):
        p = p_out[j - 1]
        sgn = 1.0 if p_out[j] >= p else -1.0
        while sgn * (p_out[j] - p) > 0.0:
            h = _gap_step(y, d, max_step)
            if h < GAP_FLOOR * max_step:
                return j
            left = abs(p_out[j] - p)
            if h >= left * (1.0 - 1e-12):
                h = left
            h = sgn * h
            k1 = _gap_rhs(y, s, d)
            k2 = _gap_rhs(y + 0.5 * h * k1, s, d)
            k3 = _gap_rhs(y + 0.5 * h * k2, s, d)
            k4 = _gap_rhs(y + h * k3, s, d)
            y = y + h * (k1 + 2.0 * k2 + 2.0 * k3 + k4) / 6.0
            if not (0.0 <= y < d):
                return j
            p = p_out[j] if abs(h) == left else p + h
        out[j] = y
    return -1


def rk4_gap_numba(y0, p_out, s, d, max_step):
    """Classical RK4 for ``y' = s y / (d - y)`` through the nodes ``p_out``.

    Sub-steps never exceed ``max_step`` and shrink like ``(1 - y/d)^2``
    as ``y`` approaches the pole at ``d``. Returns ``(values, exit_index)``;
    ``exit_index`` is -1 unless ``y`` left ``[0, d)``, in which case it is
    the first output index that could not be reached.
    """
    p_out = np.ascontiguousarray(p_out, dtype=float)
    out = np.full(p_out.shape[0], np.nan)
    j = _rk4_gap_numba(float(y0), p_out, float(s), float(d), float(max_step), out)
    return out, int(j)


def rk4_gap_numpy(y0, p_out, s, d, max_step):
    p_out = np.ascontiguousarray(p_out, dtype=float)
    out = np.full(p_out.shape[0], np.nan)
    j = _rk4_gap_python(float(y0), p_out, float(s), float(d), float(max_step), out)
    return out, int(j)


# --------------------------------------------------------------------------
# particle paths in the fixed frame
# --------------------------------------------------------------------------


@njit
def _fixed_frame_velocity(X, Z, t, k, c, h0, b0, tol, maxiter, btol):
    a, b, it, good = _invert_point(X - c * t, Z, k, h0, b0, tol, maxiter)
    if not good or b > b0 + btol:
        return 0.0, 0.0, False
    e = c * math.exp(k * b)
    return e * math.cos(k * a), e * math.sin(k * a), True


@njit(parallel=True)
def _rk4_paths_numba(X0, Z0, t0, dt, n_steps, k, c, h0, b0, tol, maxiter, btol, X, Z, escaped):
    for i in prange(X0.shape[0]):
        x = X0[i]
        zz = Z0[i]
        X[0, i] = x
        Z[0, i] = zz
        esc = -1
        for n in range(n_steps):
            t = t0 + n * dt
            u1, w1, g1 = _fixed_frame_velocity(x, zz, t, k, c, h0, b0, tol, maxiter, btol)
            u2, w2, g2 = _fixed_frame_velocity(x + 0.5 * dt * u1, zz + 0.5 * dt * w1, t + 0.5 * dt, k, c, h0, b0, tol, maxiter, btol)
            u3, w3, g3 = _fixed_frame_velocity(x + 0.5 * dt * u2, zz + 0.5 * dt * w2, t + 0.5 * dt, k, c, h0, b0, tol, maxiter, btol)
            u4, w4, g4 = _fixed_frame_velocity(x + dt * u3, zz + dt * w3, t + dt, k, c, h0, b0, tol, maxiter, btol)
            if not (g1 and g2 and g3 and g4):
                esc = n
                break
            x = x + dt * (u1 + 2.0 * u2 + 2.0 * u3 + u4) / 6.0
            zz = zz + dt * (w1 + 2.0 * w2 + 2.0 * w3 + w4) / 6.0
            X[n + 1, i] = x
            Z[n + 1, i] = zz
        escaped[i] = esc
        if esc >= 0:
            for m in range(esc + 1, n_steps + 1):
                X[m, i] = np.nan
                Z[m, i] = np.nan


def rk4_paths_numba(X0, Z0, t0, dt, n_steps, k, c, h0, b0, tol=1e-12, maxiter=50):
    """RK4 particle paths through the Eulerian Gerstner field.

    Returns ``(X, Z, escaped)`` where ``X, Z`` have shape
    ``(n_steps + 1, n_particles)`` and ``escaped[i]`` is the step at which
    particle ``i`` left the fluid (-1 if it never did).
    """
    X0 = np.ascontiguousarray(np.atleast_1d(X0), dtype=float)
    Z0 = np.ascontiguousarray(np.atleast_1d(Z0), dtype=float)
    n = X0.shape[0]
    X = np.empty((n_steps + 1, n))
    Z = np.empty((n_steps + 1, n))
    escaped = np.empty(n, dtype=np.int64)
    btol = 1e-9 / k
    _rk4_paths_numba(X0, Z0, float(t0), float(dt), int(n_steps), float(k), float(c), float(h0), float(b0), float(tol), int(maxiter), btol, X, Z, escaped)
    return X, Z, escaped


def rk4_paths_numpy(X0, Z0, t0, dt, n_steps, k, c, h0, b0, tol=1e-12, maxiter=50):
    X0 = np.atleast_1d(np.asarray(X0, dtype=float))
    Z0 = np.atleast_1d(np.asarray(Z0, dtype=float))
    n = X0.shape[0]
    X = np.full((n_steps + 1, n), np.nan)
    Z = np.full((n_steps + 1, n), np.nan)
    escaped = np.full(n, -1, dtype=np.int64)
    btol = 1e-9 / k
    X[0] = X0
    Z[0] = Z0
    live = np.arange(n)

    def vel(x, z, t):
        a, b, _, good = invert_labels_numpy(x - c * t, z, k, h0, b0, tol, maxiter)
        good = good & (b <= b0 + btol)
        e = c * np.exp(k * b)
        return e * np.cos(k * a), e * np.sin(k * a), good

    x = X0.copy()
    z = Z0.copy()
    for m in range(n_steps):
        if live.size == 0:
            break
        t = t0 + m * dt
        xs, zs = x[live], z[live]
        u1, w1, g1 = vel(xs, zs, t)
        u2, w2, g2 = vel(xs + 0.5 * dt * u1, zs + 0.5 * dt * w1, t + 0.5 * dt)
        u3, w3, g3 = vel(xs + 0.5 * dt * u2, zs + 0.5 * dt * w2, t + 0.5 * dt)
        u4, w4, g4 = vel(xs + dt * u3, zs + dt * w3, t + dt)
        good = g1 & g2 & g3 & g4
        escaped[live[~good]] = m
        live_ok = live[good]
        x[live_ok] = xs[good] + dt * (u1 + 2 * u2 + 2 * u3 + u4)[good] / 6.0
        z[live_ok] = zs[good] + dt * (w1 + 2 * w2 + 2 * w3 + w4)[good] / 6.0
        X[m + 1, live_ok] = x[live_ok]
        Z[m + 1, live_ok] = z[live_ok]
        live = live_ok
    return X, Z, escaped


if USE_NUMBA:
    invert_labels = invert_labels_numba
    surface_label = surface_label_numba
    rk4_gap = rk4_gap_numba
    rk4_paths = rk4_paths_numba
else:
    invert_labels = invert_labels_numpy
    surface_label = surface_label_numpy
    rk4_gap = rk4_gap_numpy
    rk4_paths = rk4_paths_numpy

BACKEND = "numba" if USE_NUMBA else "numpy"
