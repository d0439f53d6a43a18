"""Write an SVG per configuration into a directory (default ./gallery)."""

import pathlib
import sys

from stokes_rabi import RabiParams, analyze, coeffs_from_params
from stokes_rabi.render import render_svg

POINTS = {
    "ring": (2.1874985253775763, 4.741972512548902, 1.3449751882243024),
    "four-strips": (0.39069829608838386, -0.17869745349632993, 0.0461256360476966),
    "five-strips": (0.2744255739730423, -2.492565568285278, 1.9942457055382146),
    "nested": (0.015253751185445363, -0.14263681046395504, 0.2290946362678823),
}

out = pathlib.Path(sys.argv[1] if len(sys.argv) > 1 else "gallery")
out.mkdir(exist_ok=True)
for name, p in POINTS.items():
    an = analyze(coeffs_from_params(RabiParams(*p)))
    path = out / f"{name}.svg"
    path.write_text(render_svg(an.graph, an.config, title=str(an.geometric)))
    print(f"{path}: {an.geometric}")
