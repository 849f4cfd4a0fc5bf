"""Four noisy 2-D descents onto their constraint sets.

Each case pairs a classic test surface with a constraint: the bivariate
quadratic product with the diagonal line x1 = x2, Goldstein-Price with the
horizontal line x2 = -0.5, Bukin with a three-inequality wedge, and Beale
with the circle x1^2 + x2^2 = 4. Gradients are corrupted with N(0, 0.25 I)
noise, every iterate is projected into a box, and the run records the full
trace (the orange path of the figures).

Run:  python3 demos/trajectories.py [case ...]   e.g.  python3 demos/trajectories.py a c
"""

import sys

import numpy as np

from mirrorpen import benchmarks as bm
from mirrorpen.solver import run

cases = [c for c in sys.argv[1:] if c in "abcd"] or list("abcd")

for name in cases:
    case = bm.trajectory_case(name)
    report = run(case.bundle, case.config)
    s = report.summary
    xs = report.column("x")
    box = case.bundle.domain
    composite = bm.eval_penalty_function(name, s.final_x)
    print(f"case {name}: start {np.round(xs[0], 3).tolist()} -> "
          f"final {np.round(s.final_x, 4).tolist()}")
    print(f"  f(final) = {s.final_f:.6g}, constraint penalty = {composite:.2e}, "
          f"p ended at {s.final_p:g} after {s.n_penalty_updates} update event(s)")
    inside = all(box.contains(x, tol=0.0) for x in xs)
    print(f"  all {len(xs)} recorded iterates inside {box}: {inside}")

print("\nfull traces: mirrorpen trajectories --out runs/trajectories "
      "(one subdirectory per case)")
