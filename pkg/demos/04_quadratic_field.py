#!/usr/bin/env python3
"""A Cantorval whose terms live in Q(sqrt 2), handled without floating point.

Run from the repository root:  python3 demos/04_quadratic_field.py
"""

from cantorval.exactnum import QuadValue, sign, to_decimal
from cantorval.series import MultiGeometric, extract_blocks
from cantorval.starproc import run, verify_certificate

r2 = QuadValue.sqrt(2)
q = (2 - r2) / 2
s = MultiGeometric((QuadValue(1), 2 * r2 - 2), q)

# the two deltas of one period, divided by q, are these surds
for n in (1, 2):
    x = s.delta(n) / q
    print(f"delta_{n} / q = {x}  ~ {to_decimal(x, 6)}  sign {sign(x):+d}")

b = extract_blocks(s)
print("blocks:", [(b.k(n), b.m(n)) for n in range(1, 6)])

res = run(s)
print("outcome:", res.outcome, " certificate kind:", res.certificate.kind)
print("scale of the cycle:", res.certificate.scale)
print("replay:", verify_certificate(res.certificate, s))
