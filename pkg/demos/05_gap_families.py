#!/usr/bin/env python3
"""Gap families for a sequence whose first block has length three.

The eight gaps of the first family sit symmetrically around the middle,
labelled A to H from left to right.  The picture is written to
gap_families.svg in the working directory.

Run from the repository root:  python3 demos/05_gap_families.py
"""

from pathlib import Path

from cantorval.exactnum import QuadValue, to_decimal
from cantorval.geometry import families
from cantorval.render import RenderSpec, letters, render_levels
from cantorval.series import BlockPattern, extract_blocks, mami_build

# k_n = 4n, m_n = 3: indices 4,5,6 then 8,9,10 and so on carry a_n > r_n
s = mami_build(BlockPattern((), ((4, 3),)), QuadValue(1))
b = extract_blocks(s)
print("blocks:", [(b.k(n), b.m(n)) for n in range(1, 4)])

L1, R1, G1 = families(s, 1, b)
for i, g in enumerate(G1):
    side = "L" if g in L1 else "R"
    kind, ref = g.provenance
    print(
        f"{letters(i)}  {side}  G_{g.address:<6} order {g.order}  "
        f"({to_decimal(g.interval.lo, 5)}, {to_decimal(g.interval.hi, 5)})  {kind} {ref}"
    )

# the second family adds translated copies next to every first-family gap
_, _, G2 = families(s, 2, b)
print("\nsecond family:", len(G2), "gaps")

out = Path("gap_families.svg")
out.write_bytes(render_levels(s, RenderSpec(7, highlight="families", family=1)))
print("wrote", out)
