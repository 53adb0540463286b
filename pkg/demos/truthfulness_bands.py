#!/usr/bin/env python3
"""How far can a strategic forecaster profitably drift from their beliefs?

Walks through the three levels of the truthfulness analysis:

1. the per-round closed-form optimum for a softmax-of-scores mechanism,
   swept over learning rates, against its beta*eta + (beta*eta)^2 band;
2. full best responses (exact utility, coordinate ascent) against the
   (beta+1)*eta band;
3. the noisy-argmax fixed point against its [p - 2/b, p + 4/b] band.

Run: python demos/truthfulness_bands.py
"""

import numpy as np

from forecastcomp.agents import (
    StrategicContext,
    best_response_full,
    mw_leave_one_out_optimum,
    noisy_max_fixed_point,
    truthfulness_gap_sweep,
)
from forecastcomp.mechanisms import MultWeights, SimpleMax

SEED = 20240

print("=" * 72)
print("1. Per-round optimum vs the closed-form band")
print("=" * 72)
rng = np.random.default_rng(SEED)
print(f"{'eta':>6}  {'worst |r*-p|':>14}  {'band 3eta+9eta^2':>18}")
for eta in (0.005, 0.01, 0.05, 0.1, 0.2):
    worst = 0.0
    for _ in range(400):
        n = int(rng.integers(2, 7))
        q0 = rng.uniform(0, 30, n)
        q1 = q0 + rng.uniform(-1, 1, n)
        p = float(rng.random())
        worst = max(worst, abs(mw_leave_one_out_optimum(p, q0, q1, eta) - p))
    band = 3 * eta + (3 * eta) ** 2
    print(f"{eta:>6}  {worst:>14.5f}  {band:>18.5f}")

print()
print("=" * 72)
print("2. Full best responses stay inside the (beta+1)*eta band")
print("=" * 72)
for eta in (0.02, 0.05):
    report = truthfulness_gap_sweep(MultWeights(eta=eta), n=3, m=3, num_contexts=40, seed=SEED + 1)
    print(
        f"eta={eta}: worst best-response gap {report.gamma_empirical:.4f}"
        f"  (theoretical band {report.gamma_theoretical:.4f})"
    )

print()
print("The same sweep under cumulative-score argmax has no band at all:")
hedger = StrategicContext(np.array([[0.9], [0.1]]), np.array([0.5]), SimpleMax())
res = best_response_full(hedger, starts=4, seed=0)
print(
    f"  a forecaster who believes 0.5, squeezed between reports 0.9 and 0.1,\n"
    f"  best-responds with {res.report[0]:.0f} and lifts their win probability"
    f" from 0.0 to {res.expected_utility:.2f}."
)

print()
print("=" * 72)
print("3. Noisy-argmax fixed points vs the [p - 2/b, p + 4/b] band")
print("=" * 72)
for b in (40.0, 80.0):
    lo_margin = hi_margin = 1.0
    for p in np.arange(0.05, 0.951, 0.05):
        for mu0 in np.linspace(-2, 3, 11):
            for d in np.linspace(-1, 1, 9):
                r = noisy_max_fixed_point(float(p), float(mu0), float(mu0 + d), b)
                lo_margin = min(lo_margin, r - (p - 2 / b))
                hi_margin = min(hi_margin, (p + 4 / b) - r)
    print(f"b={b:>5}: min distance to lower edge {lo_margin:.5f}, to upper edge {hi_margin:.5f}")
print()
print("Every fixed point sits strictly inside its band; the allowed drift")
print("shrinks like 1/b, so larger noise scales buy tighter truthfulness.")
