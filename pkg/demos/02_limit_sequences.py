"""Limit sequences that recover Omega_K and Lambda from moments.

Each sequence is built from Omega_p at p growing like 2**j.  Two exponent
conventions are carried side by side.  In the stated convention, sequence b
tends to Omega_K^(1/n) and sequence d tends to 1/Lambda; the corrected
convention lands on Omega_K and Lambda themselves.  One Richardson step in
2**-j sharpens the last term.

On the ellipse (2, 1), Omega_K = 16 and Lambda = 1/4, so the two conventions
are easy to tell apart.
"""

from centroaffine import (build_grid, entropy_omega_K, evaluate_fields, lambda_K, limit_sequence,
                          make_ellipsoid, make_fourier)

for label, body in [("ellipse (2, 1)", make_ellipsoid([2.0, 1.0])),
                    ("trefoil-like disk", make_fourier(1.0, [(3, 0.05, 0.0)]))]:
    f = evaluate_fields(body, build_grid(2, 512))
    print(f"{label}: Omega_K = {entropy_omega_K(f):.10f}, Lambda = {lambda_K(f):.10f}")
    for kind in "abcd":
        seq = limit_sequence(f, kind, p_max=20)
        print(f"  {kind}: stated tail {seq.stated_tail:.10f} -> {seq.stated_target:<24}"
              f" corrected tail {seq.corrected_tail:.10f} -> {seq.corrected_target}")
    print()

# The first few corrected terms of sequence a on the trefoil show the
# geometric approach to the limit.
seq = limit_sequence(f, "a", p_max=8)
for j, term in seq.pairs():
    print(f"  a, j = {j}: {term:.10f}")
