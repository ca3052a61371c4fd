"""Time the numba kernels against their numpy counterparts.

    python benchmarks/bench_kernels.py [--repeat 5] [--json out.json]

Both flavours are imported side by side (the ``WAVELAB_JIT`` flag only
picks the default), warmed up once so compilation is excluded, then
timed; the best of ``--repeat`` runs is reported together with the
largest difference between the two results.
"""

import argparse
import json
import time

import numpy as np

from wavelab import kernels
from wavelab.core import GerstnerParams
from wavelab.gammaflow import gerstner_constants
from wavelab.gerstner import LagrangianLabel, position, stream_p


def _best(fn, repeat):
    fn()
    best = float("inf")
    for _ in range(repeat):
        t = time.perf_counter()
        out = fn()
        best = min(best, time.perf_counter() - t)
    return best, out


def cases(prm):
    k, c, h0, b0 = prm.k, prm.c, prm.h0, prm.b0
    rng = np.random.default_rng(0)
    a = rng.uniform(0, prm.wavelength, 20000)
    b = b0 - rng.uniform(0, 5 / k, a.size)
    X, Z = position(0.0, LagrangianLabel(a, b), prm)
    xs = rng.uniform(0, prm.wavelength, 20000)

    gc = gerstner_constants(prm)
    bb = np.linspace(b0, b0 - 8 / k, 1025)
    p = stream_p(bb, prm)
    y0 = c * c * np.exp(2 * k * b0)
    step = gc.p_scale / 2048

    lbl = LagrangianLabel(np.linspace(0, prm.wavelength, 16, endpoint=False), np.full(16, b0 - 1 / k))
    P0, Q0 = position(0.0, lbl, prm)
    dt, n = prm.period / 512, 512

    return {
        "invert_labels (20k points)": (
            lambda: kernels.invert_labels_numba(X, Z, k, h0, b0)[:2],
            lambda: kernels.invert_labels_numpy(X, Z, k, h0, b0)[:2],
        ),
        "surface_label (20k points)": (
            lambda: (kernels.surface_label_numba(xs, k, b0),),
            lambda: (kernels.surface_label_numpy(xs, k, b0),),
        ),
        "rk4_gap (8/k of p)": (
            lambda: kernels.rk4_gap_numba(y0, p, -2 * gc.A, gc.width, step)[:1],
            lambda: kernels.rk4_gap_numpy(y0, p, -2 * gc.A, gc.width, step)[:1],
        ),
        "rk4_paths (16 particles x 512 steps)": (
            lambda: kernels.rk4_paths_numba(P0, Q0, 0.0, dt, n, k, c, h0, b0)[:2],
            lambda: kernels.rk4_paths_numpy(P0, Q0, 0.0, dt, n, k, c, h0, b0)[:2],
        ),
    }


def run(repeat=5):
    prm = GerstnerParams.from_wavenumber(0.01, b0=-10.0)
    rows = []
    for name, (fast, slow) in cases(prm).items():
        tj, rj = _best(fast, repeat)
        tn, rn = _best(slow, repeat)
        diff = max(float(np.nanmax(np.abs(np.asarray(u) - np.asarray(v)))) for u, v in zip(rj, rn))
        rows.append({"kernel": name, "numba_s": tj, "numpy_s": tn, "speedup": tn / tj, "max_diff": diff})
    return rows


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeat", type=int, default=5)
    ap.add_argument("--json", help="also write the table as JSON")
    args = ap.parse_args()
    rows = run(args.repeat)
    print(f"{'kernel':40s} {'numba [s]':>11s} {'numpy [s]':>11s} {'speedup':>8s} {'max diff':>10s}")
    for r in rows:
        print(f"{r['kernel']:40s} {r['numba_s']:11.5f} {r['numpy_s']:11.5f} {r['speedup']:8.1f} {r['max_diff']:10.2e}")
    if args.json:
        with open(args.json, "w", encoding="utf-8") as fh:
            json.dump(rows, fh, indent=2)


if __name__ == "__main__":
    main()
