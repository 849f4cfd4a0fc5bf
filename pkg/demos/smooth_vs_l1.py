"""Why the penalty must be differentiable outside the feasible set.

Minimize f(x) = x1 + x2 subject to x1 <= 0 and x2 - x1 <= 0, once with the
smooth beta = 2 penalty norm and once with a plain l1 penalty selection,
both driven by the same adaptive update rule, budget, seed, and start.

The smooth arm's test fires immediately (the violation is large against the
tiny initial p), the cascade lifts p, and the iterates enter the feasible
wedge. The l1 arm rides the penalty kink where its subgradient norm stays
bounded away from zero; the descent test never reports a stall, p never
moves, and the run ends strictly infeasible.

Run:  python3 demos/smooth_vs_l1.py
"""

from mirrorpen import benchmarks as bm
from mirrorpen.solver import run

beta_case, l1_case = bm.beta_vs_l1_cases()

for case, label in ((beta_case, "smooth beta=2 arm"), (l1_case, "l1 selection arm")):
    report = run(case.bundle, case.config)
    s = report.summary
    ks = report.column("k")
    norms = report.column("grad_norm")[ks >= 1]
    print(f"{label}:")
    print(f"  p: {case.config.penalty.p_init:g} -> {s.final_p:g} "
          f"({s.n_penalty_updates} update event(s), "
          f"{s.n_multiplications} multiplication(s))")
    print(f"  final violation M = {s.final_m:.6f}")
    print(f"  gradient norm along the run: min {norms.min():.3f} "
          f"(the l1 kink keeps this bounded away from zero)")
    print()

print("traces for both arms: mirrorpen beta-vs-l1 --out runs/beta-vs-l1")
