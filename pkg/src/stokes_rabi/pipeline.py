"""End-to-end analysis of one quartic: zeros, traced graph, faces and labels."""

from __future__ import annotations

import time
from dataclasses import dataclass

from .polynomials import LagrangeInvariants, QuarticCoeffs, RootClass, classify_roots, lagrange_invariants
from .qdiff_core import QuadDiff
from .stokes_graph import (
    DomainConfig,
    Face,
    StokesGraph,
    StructureReport,
    build_graph,
    domain_config,
    enumerate_faces,
    structure_checks,
)
from .taxonomy import (
    Agreement,
    CaseLabel,
    PredicateReport,
    cross_validate,
    label_case_analytic,
    label_case_geometric,
)
from .tracer import TraceOptions, TraceSet, trace_all

__all__ = ["Analysis", "analyze"]


@dataclass
class Analysis:
    coeffs: QuarticCoeffs
    invariants: LagrangeInvariants
    root_class: RootClass
    qd: QuadDiff
    traces: TraceSet
    graph: StokesGraph
    faces: list[Face]
    config: DomainConfig
    structure: StructureReport
    geometric: CaseLabel | str
    analytic: CaseLabel | str
    predicates: PredicateReport
    agreement: Agreement
    seconds: float

    @property
    def classified(self) -> bool:
        return isinstance(self.geometric, CaseLabel)


def analyze(c: QuarticCoeffs, opts: TraceOptions = TraceOptions(), rel_band: float = 1e-6) -> Analysis:
    """Run both classification routes on ``c``.

    Raises :class:`~stokes_rabi.errors.DepressedDifferential` when a zero
    sits on a pole; every later stage is total.
    """
    start = time.perf_counter()
    inv = lagrange_invariants(c)
    rc = classify_roots(inv, c)
    qd = QuadDiff(c)
    traces = trace_all(qd, opts)
    graph = build_graph(traces.trajectories, qd)
    faces = enumerate_faces(graph)
    config = domain_config(faces, qd)
    structure = structure_checks(graph, config, qd)
    geometric = label_case_geometric(config, qd.roots, graph)
    analytic, predicates = label_case_analytic(qd, rel_band)
    return Analysis(
        c, inv, rc, qd, traces, graph, faces, config, structure,
        geometric, analytic, predicates, cross_validate(geometric, analytic),
        time.perf_counter() - start,
    )
