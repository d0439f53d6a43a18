"""Large-coupling limit: region of each (E_a, Delta_a) and how fast finite g approaches it."""

from stokes_rabi import analyze, coeffs_from_params
from stokes_rabi.asymptotics import AsymptoticParams, asymptotic_region, limit_convergence, params_at_coupling

for e_a, d_a in [(2.0, 1.0), (-3.0, 1.0), (-0.5, 2.0), (-1.2, 1.0)]:
    p = AsymptoticParams(e_a, d_a)
    label = analyze(coeffs_from_params(params_at_coupling(p, 100.0))).geometric
    rep = limit_convergence(p, [10, 100, 1000])
    ratios = ", ".join(f"{r:.4f}" for r in rep.root_ratios)
    print(f"E_a={e_a:+.1f} Delta_a={d_a:.1f}  region {asymptotic_region(p).value:<3} label at g=100 {str(label):<6} decay per decade {ratios}")
