"""The reflection (E, g^2) -> (-E - 1, -g^2) negates the zeros and swaps the two poles.

Labels pick up or drop the "-m" suffix; symmetric configurations map to themselves.
"""

from stokes_rabi import RabiParams, analyze, coeffs_from_params
from stokes_rabi.rabi_map import mirror_params

for p in [
    RabiParams(0.39069829608838386, -0.17869745349632993, 0.0461256360476966),
    RabiParams(0.2744255739730423, -2.492565568285278, 1.9942457055382146),
    RabiParams(1.0, 0.8, 0.6),
]:
    q = mirror_params(p)
    a, b = analyze(coeffs_from_params(p)), analyze(coeffs_from_params(q))
    print(f"E={p.energy:+.4f} -> {str(a.geometric):<16}  E={q.energy:+.4f} -> {b.geometric}")
