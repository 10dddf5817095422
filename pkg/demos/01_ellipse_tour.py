"""A tour of the centro-affine invariants on an ellipse and a perturbed disk.

Every quantity here is invariant under SL(n), so the ellipse with semi-axes
(2, 1) behaves like a disk of area 2 pi.  The script prints the closed forms
next to the quadrature values, then repeats the computation after a random
area-preserving linear map and after a small Fourier perturbation.

Run with ``python3 demos/01_ellipse_tour.py``.
"""

import math

import numpy as np

from centroaffine import (build_grid, entropy_omega_K, evaluate_fields, kl_divergence, lambda_K,
                          linear_image, make_ellipsoid, make_fourier, omega_p, polar_volume,
                          volume)


def describe(label, body, grid):
    f = evaluate_fields(body, grid)
    print(f"{label}")
    print(f"  Vol K          {volume(f):.12f}")
    print(f"  Vol K°         {polar_volume(f):.12f}")
    print(f"  Omega_1        {omega_p(f, 1.0):.12f}")
    print(f"  Omega_K        {entropy_omega_K(f):.12f}")
    print(f"  Lambda         {lambda_K(f):.12f}")
    print(f"  KL divergence  {kl_divergence(f):.3e}")
    return f


grid = build_grid(2, 256)
ellipse = make_ellipsoid([2.0, 1.0])
describe("ellipse with semi-axes (2, 1)", ellipse, grid)
print(f"  closed forms: Vol 2 pi = {2 * math.pi:.12f}, Vol K° = pi/2 = {math.pi / 2:.12f},"
      f" Omega_1 = 4 pi 4^(-1/3) = {4 * math.pi * 4 ** (-1 / 3):.12f}, Omega_K = 16, Lambda = 1/4")

# An area-preserving shear-and-stretch leaves every invariant in place.
a = np.array([[1.7, 0.4], [0.2, 1.0]])
a /= math.sqrt(np.linalg.det(a))
describe("\nthe same ellipse after an SL(2) map", linear_image(ellipse, a), grid)

# A three-fold perturbation of the disk moves the invariants away from
# their ellipsoidal values; the KL divergence is strictly positive.
describe("\ndisk perturbed by 0.05 cos 3 theta", make_fourier(1.0, [(3, 0.05, 0.0)]), grid)
