"""Stochastic Rosenbrock descent with a sphere penalty and ball projection.

The oracle reveals one random summand per call (information for just two
coordinates), scaled by n-1 to stay unbiased. The penalty |x'x - n| anchors
the solution to the sphere through the origin-centered ball of radius
2 sqrt(n) onto which every iterate is projected. The global minimizer
(1, ..., 1) lies exactly on that sphere, so both the objective trace and the
violation trace collapse together.

Run:  python3 demos/rosenbrock_sphere.py [n] [iterations]
(defaults n=4, 20000 iterations; the full benchmark uses 200000)
"""

import sys

import numpy as np

from mirrorpen import benchmarks as bm
from mirrorpen.solver import run

n = int(sys.argv[1]) if len(sys.argv) > 1 else 4
iters = int(sys.argv[2]) if len(sys.argv) > 2 else 20_000

case = bm.rosenbrock_case(n, iterations=iters)
report = run(case.bundle, case.config)
s = report.summary

f0 = report.rows[0].f
print(f"n = {n}, {iters} single-term oracle calls, start f = {f0:.3f}")
ks = report.column("k")
fs = report.column("f")
for frac in (0.01, 0.1, 0.5, 1.0):
    i = min(int(frac * (len(ks) - 1)), len(ks) - 1)
    print(f"  k = {ks[i]:>7d}   f = {fs[i]:.3e}")
print(f"running minimum of f: {s.min_objective:.3e} "
      f"({100 * s.min_objective / f0:.4f}% of the start)")
print(f"final sphere violation |x'x - n| = {abs(float(s.final_x @ s.final_x) - n):.2e}")
print(f"final x = {np.round(s.final_x, 5).tolist()}")
print("\nlarger cases are opt-in:  mirrorpen rosenbrock --n 32 --out runs/rb32")
