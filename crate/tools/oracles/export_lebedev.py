"""Print Lebedev orbit representatives as a Rust table.

Each representative is (a, b, c) with 0 <= a <= b <= c, plus the weight
normalized so that the full rule sums to one.
"""
import numpy as np
from scipy.integrate import lebedev_rule

SIZES = {110: 17, 194: 23, 302: 29, 590: 41}

for n, deg in SIZES.items():
    x, w = lebedev_rule(deg)
    assert x.shape[1] == n
    reps = {}
    for p, wt in zip(x.T, w):
        key = tuple(np.round(np.sort(np.abs(p)), 12))
        if key not in reps:
            reps[key] = (tuple(float(v) for v in np.sort(np.abs(p))), float(wt / (4 * np.pi)), 0)
        r = reps[key]
        reps[key] = (r[0], r[1], r[2] + 1)
    print(f"const LEBEDEV_{n}: &[Orbit] = &[")
    total = 0
    for key in sorted(reps):
        (a, b, c), wt, cnt = reps[key]
        total += cnt
        print(f"    Orbit {{ rep: [{a!r}, {b!r}, {c!r}], weight: {wt!r}, size: {cnt} }},")
    print("];")
    assert total == n
