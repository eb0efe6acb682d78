"""Where the gain peaks when two or three paths interfere.

Builds the two-path and three-path example fields, locates the lines and
points of maximum gain from the closed forms, and confirms them against a
brute-force grid scan.
"""
import math

import numpy as np

from masim.channel import ChannelField, PhysicalAngles, Position, Region, VirtualAngles
from masim.deterministic import (adjacent_max_distances_three, gain_three_path,
                                 gradient_ascent_search, max_gain_bound, max_line_family,
                                 max_points_three, scan_gain_grid)

# two paths of equal power arriving from (1, 0) and (-1/2, sqrt(3)/2)
two = ChannelField.from_virtual([math.sqrt(2) / 2] * 2,
                                [VirtualAngles(1.0, 0.0), VirtualAngles(-0.5, math.sqrt(3) / 2)])
fam = max_line_family(two)
print(f"two-path bound (|b1|+|b2|)^2 = {max_gain_bound(two):.4f}")
print(f"maximum lines are {fam.spacing:.4f} wavelengths apart, normal {np.round(fam.normal, 4)}")
for k in range(-1, 2):
    p = fam.point(k, s=0.3)
    print(f"  line k={k:+d}: point ({p.x:+.4f}, {p.y:+.4f}) has gain {two.gain(p.x, p.y):.12f}")

grid = scan_gain_grid(two, Region.square(4.0), 0.01)
print(f"grid scan over 4x4: max {grid.max_value:.6f} at ({grid.argmax.x:+.2f}, {grid.argmax.y:+.2f})")

# hill climbing from a few random starts lands on a line every time
rng = np.random.default_rng(0)
ends = [gradient_ascent_search(two, Region.square(4.0), Position(*rng.uniform(-1.5, 1.5, 2)))
        for _ in range(5)]
print("gradient ascent terminal gains:", [round(float(two.gain(e.x, e.y)), 8) for e in ends])

# three paths: maxima become isolated points on a lattice
angles = [PhysicalAngles(0, math.pi / 2), PhysicalAngles(math.pi / 3, -math.pi / 2),
          PhysicalAngles(-math.pi / 4, -math.pi / 2)]
three = ChannelField.from_angles([math.sqrt(3) / 3] * 3, angles)
d1, d2, d3 = adjacent_max_distances_three(three)
print(f"\nthree-path bound = {max_gain_bound(three):.4f}")
print(f"lattice spacings d1={d1:.4f}, d2={d2:.4f}, diagonal {d3:.4f}")
for k1, k2 in [(0, 0), (1, 0), (0, 1)]:
    p = max_points_three(three, k1, k2)
    print(f"  point ({k1},{k2}) at ({p.x:+.4f}, {p.y:+.4f}): gain {gain_three_path(three, p):.12f}")
print(f"grid scan over 5x5: max {scan_gain_grid(three, Region.square(5.0), 0.01).max_value:.5f}")
