"""Benchmark the stencil kernels: compiled extension vs numpy fallback.

Usage:
    python benchmarks/kernel_benchmark.py [--sizes 64,128,256] [--repeats 200]
    python benchmarks/kernel_benchmark.py --coupled   # adds a full-step timing
                                                      # (runs each backend in a
                                                      # subprocess)
"""

import argparse
import os
import subprocess
import sys
import time

import numpy as np

from vesflow.kernels import available_backends, get_backend


def time_call(fn, args, repeats):
    fn(*args)  # warm up
    t0 = time.perf_counter()
    for _ in range(repeats):
        fn(*args)
    return (time.perf_counter() - t0) / repeats


def bench_kernels(sizes, repeats):
    rng = np.random.default_rng(0)
    backends = available_backends()
    rows = []
    for n in sizes:
        h = 1.0 / n
        f = rng.standard_normal((n, n))
        ux = rng.standard_normal((n + 1, n))
        uy = rng.standard_normal((n, n + 1))
        ux[0] = ux[-1] = 0.0
        uy[:, 0] = uy[:, -1] = 0.0
        cases = {
            "laplacian": (("laplacian",), (f, h, h)),
            "gradient": (("gradient",), (f, h, h)),
            "advect": (("advect",), (ux, uy, f, h, h)),
            "convective": (("convective",), (ux, uy, h, h)),
            "velocity_laplacian": (("velocity_laplacian",), (ux, uy, h, h)),
        }
        for name, ((attr,), args) in cases.items():
            times = {}
            for b in backends:
                times[b] = time_call(getattr(get_backend(b), attr), args, repeats)
            rows.append((f"{n}x{n}", name, times))
    return backends, rows


COUPLED_SNIPPET = r"""
import numpy as np, time
from vesflow.grid import Grid, ScalarField, FaceVelocity
from vesflow.energy import PhysParams, surface_area
from vesflow.flow import NsStepParams
from vesflow.phase import ChStepParams
from vesflow.simulation import make_state, step_coupled
import vesflow.kernels as K

g = Grid(64, 64, 1.0, 1.0)
eps = 0.08
X, Y = g.cell_centers()
r = np.hypot(X - 0.5, Y - 0.5)
phi = np.tanh(np.minimum(r - 0.15, 0.35 - r) / (eps * np.sqrt(2.0)))
m0 = float(phi.mean())
p = PhysParams(eps=eps, lam=0.1, nu=1.0, gamma=1.0, m_pen=5.0, alpha=2.76, m0=m0)
st = make_state(0.0, 0, ScalarField(g, phi - m0), FaceVelocity.zeros(g), p)
ch = ChStepParams(dt=2.5e-7, stab=2.0 / eps)
ns = NsStepParams(dt=2.5e-7)
for _ in range(50):
    st = step_coupled(st, p, ch, ns)
n = 500
t0 = time.perf_counter()
for _ in range(n):
    st = step_coupled(st, p, ch, ns)
dt = (time.perf_counter() - t0) / n
print(f"{K.backend_name}: {dt * 1e3:.3f} ms/step ({1.0 / dt:.0f} steps/s)")
"""


def bench_coupled():
    print("\ncoupled step, 64x64 (subprocess per backend):", flush=True)
    for b in available_backends():
        env = dict(os.environ, VESFLOW_KERNELS={"numpy": "numpy", "compiled": "compiled"}[b])
        subprocess.run([sys.executable, "-c", COUPLED_SNIPPET], env=env, check=True)


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--sizes", default="64,128,256")
    ap.add_argument("--repeats", type=int, default=200)
    ap.add_argument("--coupled", action="store_true")
    args = ap.parse_args()
    sizes = [int(s) for s in args.sizes.split(",")]

    backends, rows = bench_kernels(sizes, args.repeats)
    header = f"{'grid':>9} {'kernel':>20}" + "".join(f"{b:>14}" for b in backends)
    if len(backends) > 1:
        header += f"{'speedup':>10}"
    print(header)
    for size, name, times in rows:
        line = f"{size:>9} {name:>20}"
        for b in backends:
            line += f"{times[b] * 1e6:>11.1f} us"
        if len(backends) > 1:
            line += f"{times[backends[0]] / times[backends[-1]]:>9.1f}x"
        print(line)

    if args.coupled:
        bench_coupled()


if __name__ == "__main__":
    main()
