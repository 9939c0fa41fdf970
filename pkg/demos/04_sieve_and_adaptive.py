"""Two compact layouts: a row/column sieve and an adaptive-degree tree.

The sieve keeps one digest per row and per column (2m in total). Failing
rows times failing columns bound the corrupted area from outside, exactly
for rectangles. The adaptive tree gives depth d a fan-out of 2^(h-d); with
N = 64 that is 8, 4, 2 from the root down.
"""

from gridguard import KeyMaterial, Region, inject_corruption, new_grid
from gridguard.detectors import detect_adaptive, detect_sieve
from gridguard.grid import disc_cells, rectangle_cells
from gridguard.hashstore import build_adaptive_tree, build_layer_sieve

key = KeyMaterial.mac(b"demo")
grid = new_grid(32, seed=4)
sieve = build_layer_sieve(grid, key)
print(f"sieve on 32x32: {len(sieve)} digests")

for name, cells in (("4x4 rectangle", rectangle_cells(3, 20, 4, 4)),
                    ("disc radius 3", disc_cells((16, 10), 3)),
                    ("two separate cells", [(2, 2), (28, 29)])):
    out = detect_sieve(inject_corruption(grid, Region(cells), seed=1), sieve)
    r0, c0, r1, c1 = out.region.bounds()
    print(f"{name:18s} true {len(cells):3d} cells -> candidates {len(out.region):3d} "
          f"(rows {r0}..{r1}, cols {c0}..{c1}), {out.meter.sig_verifications} verifications")

small = new_grid(8, seed=5)
tree = build_adaptive_tree(small, key)
print(f"\nadaptive tree N=64: height {tree.height}, degrees {tree.degrees}, "
      f"level sizes {tree.level_sizes()}, {len(tree)} nodes")
worst = 0
for r in range(8):
    for c in range(8):
        out = detect_adaptive(inject_corruption(small, Region([(r, c)]), seed=r), tree)
        assert out.found_cell == (r, c)
        worst = max(worst, out.meter.sig_verifications)
print(f"worst case over all 64 single cells: {worst} verifications")
