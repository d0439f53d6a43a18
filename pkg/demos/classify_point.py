"""Classify one (Delta, E, g^2) point and print what each stage found.

    python demos/classify_point.py 0.2744 -2.4926 1.9942
"""

import sys

from stokes_rabi import RabiParams, analyze, coeffs_from_params

delta_sq, energy, g_sq = (float(a) for a in sys.argv[1:4]) if len(sys.argv) > 3 else (0.2744, -2.4926, 1.9942)
an = analyze(coeffs_from_params(RabiParams(delta_sq, energy, g_sq)))

print(f"quartic coefficients  {an.coeffs.as_tuple()}")
print(f"root pattern          {an.root_class.pattern.value}")
print(f"graph V/E/components  {an.graph.V}/{an.graph.E}/{an.graph.components}")
print(f"inventory             {an.config.inventory}")
print(f"strips                {an.config.strips}")
print(f"geometric label       {an.geometric}")
print(f"analytic label        {an.analytic}")
print(f"routes agree          {an.agreement.agree}")
print(f"structure checks ok   {an.structure.ok}")
print(f"wall time             {an.seconds:.3f} s")
