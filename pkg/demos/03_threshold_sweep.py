#!/usr/bin/env python3
"""Walk q across the family E(4,3,2;q) and watch the verdict change.

Below 2/11 one of the three deltas turns negative and the set leaves the
interval regime.  Inside [1/6, 2/11) the star procedure closes off the
dangerous lineage with the tail bound.  Below 1/6 the procedure mostly
breaks, which is no verdict on the set itself, with isolated points such as
(sqrt 57 - 5)/16 and 1/8 where a cycle certificate exists.

Run from the repository root:  python3 demos/03_threshold_sweep.py
"""

from fractions import Fraction

from cantorval.exactnum import QuadValue, to_decimal
from cantorval.render import emit_csv
from cantorval.series import from_json
from cantorval.starproc import run
from cantorval.sweep import q_grid, sweep

family = {"type": "multigeometric", "coeffs": ["4", "3", "2"]}
qs = q_grid("1/10", "1/5", "1/100") + [QuadValue(Fraction(n, d)) for n, d in ((1, 8), (1, 6), (2, 11))]
qs.append((QuadValue.sqrt(57) - 5) / 16)
qs.sort(key=lambda q: to_decimal(q, 20))

rows = sweep(family, qs, jobs=2)
print(emit_csv(rows).decode())

# the tail bound at q = 1/6 is tight: its slack is exactly zero
cert = run(from_json({**family, "q": "1/6"})).certificate
print("q = 1/6 closures:", [(str(c.value), str(c.slack)) for c in cert.closures])

# the quadratic point where the numerator -8q^3 + 3q^2 + 6q - 1 vanishes
q = (QuadValue.sqrt(57) - 5) / 16
print("q = (sqrt 57 - 5)/16:", -8 * q**3 + 3 * q**2 + 6 * q - 1 == 0)
