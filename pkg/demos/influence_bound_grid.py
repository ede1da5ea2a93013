"""
How much can a belief distort the search?
=========================================

The loss-ratio constant C bounds the multiplicative gap between the weighted
and plain expected-improvement values: at step n a belief can matter by at
most a factor of C = (max density / min density) ** (beta / n).  This script
sweeps centered Gaussian beliefs of varying width and confidence on the unit
interval, prints how much of that grid is already nearly harmless (C <= 1.25)
at step 50, and writes the full grid as CSV.
"""

from pathlib import Path

import numpy as np

from priorbo import centered_gaussian_grid

out_dir = Path("demo_outputs")
out_dir.mkdir(exist_ok=True)

# ---------------------------------------------------------------------------
# The default grid: sigma in [0.01, 0.5] (50 widths) x beta in {1..50}.
# ---------------------------------------------------------------------------
grid = centered_gaussian_grid()
print(f"grid shape: {len(grid.sigmas)} widths x {len(grid.betas)} confidences")
print(f"step n = {grid.n}")
print(f"fraction of cells with C <= 1.25: {grid.fraction_below(1.25):.3f}")
print(f"fraction of cells with C <= 2.00: {grid.fraction_below(2.0):.3f}\n")

# ---------------------------------------------------------------------------
# The same fractions at other step counts: later steps shrink C toward 1
# everywhere, so the belief's influence provably washes out.
# ---------------------------------------------------------------------------
print(f"{'n':>6}  {'C <= 1.25':>10}  {'C <= 2':>8}")
for n in (10, 25, 50, 100, 200, 500):
    g = centered_gaussian_grid(n=n)
    print(f"{n:>6}  {g.fraction_below(1.25):>10.3f}  {g.fraction_below(2.0):>8.3f}")

# ---------------------------------------------------------------------------
# A few rows in the narrow-belief corner, where C is largest.
# ---------------------------------------------------------------------------
print(f"\n{'sigma':>7}  {'beta':>5}  {'C at n=50':>12}")
for i in (0, 4, 9):
    for j in (0, 3, 5):
        print(
            f"{grid.sigmas[i]:>7.3f}  {grid.betas[j]:>5.0f}"
            f"  {grid.values[i, j]:>12.4g}"
        )

csv_path = out_dir / "influence_grid.csv"
csv_path.write_text(grid.to_csv())
print(f"\nwrote {csv_path}")
