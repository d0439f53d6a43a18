"""Stokes graphs of the quadratic differential attached to the quantum Rabi model.

The modules form a pipeline: ``rabi_map`` turns (Delta, E, g) into the
quartic P0, ``polynomials`` finds and classifies its zeros, ``qdiff_core``
evaluates Q0 and its Q-lengths, ``tracer`` integrates critical
trajectories, ``stokes_graph`` assembles the graph and its faces,
``taxonomy`` names the configuration two independent ways, and
``asymptotics`` covers the large-coupling limit. :func:`analyze` runs the
whole chain on one quartic.
"""

from .pipeline import Analysis, analyze
from .polynomials import QuarticCoeffs, solve_quartic
from .rabi_map import RabiParams, coeffs_from_params

__all__ = ["Analysis", "analyze", "QuarticCoeffs", "RabiParams", "coeffs_from_params", "solve_quartic"]
__version__ = "0.1.0"
