#!/usr/bin/env python3
"""The scenario where per-event lotteries provably waste events.

One forecaster predicts every event perfectly; the other n-1 predict the
exact opposite.  A cumulative-score argmax finds the good forecaster after a
single event.  The event-lottery mechanism only hands the good forecaster a
point with probability 2/n per event, so below roughly (n/4) log n events a
lucky terrible forecaster usually out-collects them -- the balls-in-bins
effect that drives the lower bound.

Run: python demos/lower_bound_scenario.py
"""

import math

from forecastcomp.agents import Truthful
from forecastcomp.experiments import (
    balls_in_bins_max,
    estimate_success_prob,
    perfect_vs_terrible_setting,
)
from forecastcomp.mechanisms import Elf, SimpleMax, elf_point_prob

SEED = 777
TRIALS = 1000

for n in (100, 200, 400):
    m = math.ceil(n / 4 * math.log(n))
    setting = perfect_vs_terrible_setting(n, m)
    strategies = [Truthful()] * n

    f = elf_point_prob(setting.beliefs, 1, 0)
    elf = estimate_success_prob(setting, strategies, Elf(), 0.5, TRIALS, seed=SEED + n)
    argmax = estimate_success_prob(setting, strategies, SimpleMax(), 0.5, TRIALS, seed=SEED - n)

    print(f"n={n:>4}, m=(n/4)ln n={m:>5}")
    print(f"  per-event point probability: leader {f[0]:.4f} (=2/n), others {f[1]:.6f}")
    print(f"  expected points for the leader: {m * f[0]:.1f} of {m}")
    print(f"  event-lottery success: {elf.rate:.3f}  [{elf.lower:.3f}, {elf.upper:.3f}]")
    print(f"  score-argmax success:  {argmax.rate:.3f}")
    print()

print("Why the lottery fails: the n-1 terrible forecasters split ~m points")
print("uniformly, and the maximum of n-1 bins beats the leader's mean.")
n, c = 10_000, 0.1
m = int(c * n * math.log(n))
result = balls_in_bins_max(n, m, trials=200, seed=SEED)
print(
    f"Throwing m = {c} n ln n = {m} balls into n = {n} bins: "
    f"P(max load > 4c ln n + 1 = {result.threshold:.2f}) = {result.probability:.3f}"
)
