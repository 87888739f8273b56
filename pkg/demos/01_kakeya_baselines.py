#!/usr/bin/env python3
"""The two textbook cases: halving gives an interval, thirds give a Cantor set.

Run from the repository root:  python3 demos/01_kakeya_baselines.py
"""

from fractions import Fraction

from cantorval.geometry import gap_census, level_cover, measure
from cantorval.kakeya import classify
from cantorval.render import RenderSpec, render_levels
from cantorval.series import geometric

# a_n = 1/2^n: every term equals the tail after it, so neighbouring pieces touch
halves = geometric(Fraction(1, 2))
print("1/2^n  ->", classify(halves).cls)
print("cover at depth 10:", level_cover(halves, 10).to_json())

# a_n = 1/3^n: every term beats its tail, each level opens 2^(N-1) new gaps
thirds = geometric(Fraction(1, 3))
print("\n1/3^n  ->", classify(thirds).cls)
for N in (1, 4, 8, 12):
    c = level_cover(thirds, N)
    print(f"  N={N:2d}  pieces={len(c):5d}  gaps={len(gap_census(c)):5d}  measure={measure(c)}")

# the first few levels as text
print()
print(render_levels(thirds, RenderSpec(4, format="txt")).decode(), end="")
