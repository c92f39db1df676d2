"""Constant torsors blow up to torsors under the quasi-finite group M(p).

For random a in R[x] the (Z/p)_R-torsor y^p - y + pi*a is blown up at y = 0
and compared with pi^(p-1)*y^p - y + a.
"""

import random

from torsorext import m_torsor_roundtrip
from torsorext.cli import random_a

for p in (2, 3, 5):
    rng = random.Random(p)
    samples = [random_a(rng, p, 3, 2) for _ in range(25)]
    agree = sum(m_torsor_roundtrip(a, p=p) for a in samples)
    print(f"p = {p}: {agree}/{len(samples)} agree, e.g. a = {samples[0]}")
