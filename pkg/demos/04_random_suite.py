"""Checking the inequality suite on random smooth bodies.

Each random body is a small Fourier (planar) or spherical-harmonic (spatial)
perturbation of the ball, rejected until its curvature is safely positive.
Every check is evaluated at two resolutions; a check passes when both pass
and the relative slack is stable between them.  Equality flags should only
fire on centered ellipsoids; ``prop_two_p1`` is an identity and is always
an equality, so it is left out of the tally of surprises.

Set ``COUNT`` higher for a longer sweep.
"""

from collections import Counter

import numpy as np

from centroaffine import make_ellipsoid
from centroaffine.suite import random_fourier_body, random_sphharm_body, run_suite

COUNT = 5

rng = np.random.default_rng(2024)
bodies = [random_fourier_body(rng) for _ in range(COUNT)] + [make_ellipsoid([2.0, 1.0])]
tally, tightest, surprises, ellipse_flags = Counter(), {}, [], 0
for i, body in enumerate(bodies):
    is_ellipse = body.family == "ellipsoid"
    for r in run_suite(body):
        tally[r.status] += 1
        if is_ellipse:
            ellipse_flags += r.equality
            continue
        if r.applicable and r.check_id != "prop_two_p1":
            old = tightest.get(r.check_id, np.inf)
            tightest[r.check_id] = min(old, r.relative_slack)
            if r.equality:
                surprises.append((i, r.check_id))

print(f"\n{len(bodies)} planar bodies: {dict(tally)}")
print(f"equality flags on the ellipse: {ellipse_flags}; on random bodies: {surprises or 'none'}")
print("tightest relative slack per check over the random bodies:")
for cid, s in sorted(tightest.items()):
    print(f"  {cid:<24} {s: .3e}")

# One spatial body, at the default (coarse, fine) grids on the sphere.
body = random_sphharm_body(rng)
statuses = Counter(r.status for r in run_suite(body))
print(f"\none spherical-harmonic body: {dict(statuses)}")
