"""Finite-difference stencils shared by the field and verification code."""

import numpy as np


def gradient(fun, x, z, h, surface=None, margin=2.0, one_sided_scale=0.125):
    """Values and first partials of a vector field by second-order FD.

    ``fun(x, z)`` must return an array whose leading axis indexes
    components. Interior points use centred differences. When ``surface``
    is given (a callable returning ``(eta, eta_x)``), points closer than
    ``margin * h`` to it switch to one-sided three-point stencils along two
    inward directions, ``(0, -1)`` and ``(sign(eta_x), -1)``, so no stencil
    node is placed above the free surface. One-sided stencils carry a
    larger truncation constant, so they use the shorter step
    ``one_sided_scale * h``.

    Returns ``(f, f_x, f_z)``.
    """
    x = np.asarray(x, dtype=float)
    z = np.asarray(z, dtype=float)
    x, z = np.broadcast_arrays(x, z)
    shape = x.shape
    x = x.ravel()
    z = z.ravel()
    n = x.size

    near = np.zeros(n, dtype=bool)
    s = np.ones(n)
    if surface is not None:
        eta, eta_x = surface(x)
        near = eta - z < margin * h
        s = np.where(eta_x < 0, -1.0, 1.0)

    # centred: 5 nodes, one-sided: 5 nodes (centre, 2 down, 2 diagonal)
    ho = one_sided_scale * h
    steps = np.array([[1.0], [2.0]]) * ho
    xs = np.stack([x, x + h, x - h, x, x])
    zs = np.stack([z, z, z, z + h, z - h])
    xs[1:3, near] = x[near] + steps * s[near]
    zs[1:3, near] = z[near] - steps
    xs[3:5, near] = x[near]
    zs[3:5, near] = z[near] - steps

    vals = np.asarray(fun(xs.ravel(), zs.ravel()), dtype=float)
    m = vals.shape[0]
    vals = vals.reshape(m, 5, n)
    f0, f1, f2, f3, f4 = (vals[:, i, :] for i in range(5))

    fx = (f1 - f2) / (2 * h)
    fz = (f3 - f4) / (2 * h)
    if near.any():
        d_diag = (-3 * f0[:, near] + 4 * f1[:, near] - f2[:, near]) / (2 * ho)
        d_down = (-3 * f0[:, near] + 4 * f3[:, near] - f4[:, near]) / (2 * ho)
        fz[:, near] = -d_down
        fx[:, near] = (d_diag - d_down) * s[near]
    return f0.reshape((m,) + shape), fx.reshape((m,) + shape), fz.reshape((m,) + shape)


def fornberg_weights(x0, nodes, order):
    """Weights of the finite-difference formula for the ``order``-th derivative.

    Fornberg's recursion; ``nodes`` may be non-uniform. Returns an array
    ``w`` with ``f^(order)(x0) ~= w @ f(nodes)``.
    """
    nodes = np.asarray(nodes, dtype=float)
    n = nodes.size
    c = np.zeros((n, order + 1))
    c1 = 1.0
    c4 = nodes[0] - x0
    c[0, 0] = 1.0
    for i in range(1, n):
        mn = min(i, order)
        c2 = 1.0
        c5 = c4
        c4 = nodes[i] - x0
        for j in range(i):
            c3 = nodes[i] - nodes[j]
            c2 *= c3
            if j == i - 1:
                for kk in range(mn, 0, -1):
                    c[i, kk] = c1 * (kk * c[i - 1, kk - 1] - c5 * c[i - 1, kk]) / c2
                c[i, 0] = -c1 * c5 * c[i - 1, 0] / c2
            for kk in range(mn, 0, -1):
                c[j, kk] = (c4 * c[j, kk] - kk * c[j, kk - 1]) / c3
            c[j, 0] = c4 * c[j, 0] / c3
        c1 = c2
    return c[:, order]


def grid_derivative(p, f, order=1, width=5):
    """Derivative of samples ``f`` on the (possibly non-uniform) grid ``p``.

    Uses ``width``-point Fornberg stencils, centred where the grid allows
    and shifted inward at the ends.
    """
    p = np.asarray(p, dtype=float)
    f = np.asarray(f, dtype=float)
    n = p.size
    if n < width:
        raise ValueError(f"need at least {width} samples, got {n}")
    out = np.empty(n)
    half = width // 2
    for i in range(n):
        lo = min(max(i - half, 0), n - width)
        idx = slice(lo, lo + width)
        out[i] = fornberg_weights(p[i], p[idx], order) @ f[idx]
    return out


def richardson_ratios(levels):
    """Successive ratios ``levels[i] / levels[i+1]`` of error magnitudes."""
    levels = np.asarray(levels, dtype=float)
    with np.errstate(divide="ignore", invalid="ignore"):
        return levels[:-1] / levels[1:]
