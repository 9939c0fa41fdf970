"""Sampling cells at random against a trusted original.

With C corrupted cells out of N, a walk over a random permutation hits the
first corrupted cell after about N/C tries. Spreading from that cell then
recovers the whole connected area.
"""

import numpy as np

from gridguard import Region, inject_corruption, new_grid
from gridguard.detectors import detect_probabilistic, expected_trials, locate_and_spread

grid = new_grid(64, seed=1)
N = grid.N

# An 8x8 block: C = 64, so we expect roughly 64 draws.
block = Region((r, c) for r in range(20, 28) for c in range(40, 48))
bad = inject_corruption(grid, block, seed=1)

trials = [detect_probabilistic(bad, grid, seed).trials for seed in range(500)]
print(f"N={N} C={len(block)}")
print(f"mean trials over 500 seeds: {np.mean(trials):.1f}")
print(f"exact mean without replacement: {expected_trials(N, len(block)):.1f}  (N/C = {N / len(block):.0f})")

# The first hit plus a breadth-first spread gives the exact region.
out = locate_and_spread(bad, "prob", original=grid, seed=3)
print(f"found {tuple(out.found_cell)} after {out.trials} trials")
print(f"spread recovered {len(out.region)} cells; matches injected block: {out.region == block}")
print(f"cell tests during spread: {out.meter.cell_tests - out.trials} (at most 5 per member cell)")

# Smaller areas are harder to hit by sampling. N/C is the with-replacement
# figure; drawing without replacement caps the walk at N, hence (N+1)/(C+1).
for size in (1, 4, 16, 64, 256):
    side = int(size ** 0.5)
    region = Region((r, c) for r in range(side) for c in range(side))
    bad = inject_corruption(grid, region, seed=size)
    mean = np.mean([detect_probabilistic(bad, grid, s).trials for s in range(200)])
    print(f"C={size:4d}  mean trials {mean:7.1f}   (N+1)/(C+1) {expected_trials(N, size):7.1f}   N/C {N / size:7.1f}")
