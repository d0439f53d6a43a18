"""Command-line front end: ``stokes-rabi classify|trace|render|sweep|map``.

Exit codes: 0 success, 1 bad usage or input, 2 the traced graph could not
be classified, 3 refusal because a zero sits on a pole (or g^2 = 0).
JSON floats are written with 17 significant digits.
"""

from __future__ import annotations

import argparse
import itertools
import json
import math
import os
import sys
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, replace

import numpy as np

from .asymptotics import (
    EXPECTED_LABEL,
    AsymptoticParams,
    asymptotic_model,
    asymptotic_region,
    limit_convergence,
    params_at_coupling,
)
from .errors import DepressedDifferential, InfiniteCoupling, InvalidInput, StokesRabiError
from .pipeline import Analysis, analyze
from .polynomials import QuarticCoeffs, classify_roots, lagrange_invariants
from .qdiff_core import QuadDiff
from .rabi_map import (
    RabiParams,
    coeffs_from_params,
    cylinder_point,
    cylinder_residual,
    mirror_params,
    params_from_coeffs,
)
from .render import render_svg
from .stokes_graph import SCHEMA_VERSION, graph_to_json
from .taxonomy import label_case_analytic
from .tracer import TraceOptions

__all__ = ["main", "dumps", "EXIT_OK", "EXIT_USAGE", "EXIT_UNCLASSIFIED", "EXIT_REFUSED"]

EXIT_OK, EXIT_USAGE, EXIT_UNCLASSIFIED, EXIT_REFUSED = 0, 1, 2, 3
THREADS_ENV = "STOKES_RABI_THREADS"


# ------------------------------------------------------------------ JSON


def dumps(obj, pretty: bool = False) -> str:
    """JSON text with every float written to 17 significant digits.

    Non-finite floats become null; complex numbers become [re, im].
    """
    out: list[str] = []
    _emit(obj, out, 2 if pretty else None, 0)
    return "".join(out)


def _float(x: float) -> str:
    return format(x, ".17g") if math.isfinite(x) else "null"


def _emit(o, out, indent, level):
    if o is None or isinstance(o, (bool, np.bool_)):
        out.append("null" if o is None else ("true" if o else "false"))
    elif isinstance(o, (int, np.integer)):
        out.append(str(int(o)))
    elif isinstance(o, (float, np.floating)):
        out.append(_float(float(o)))
    elif isinstance(o, complex):
        _emit([o.real, o.imag], out, indent, level)
    elif isinstance(o, str):
        out.append(json.dumps(o))
    elif isinstance(o, dict):
        items = list(o.items())
        if not items:
            out.append("{}")
            return
        out.append("{")
        for i, (k, v) in enumerate(items):
            if i:
                out.append(",")
            out.append(_newline(indent, level + 1))
            out.append(json.dumps(str(k)) + (": " if indent is not None else ":"))
            _emit(v, out, indent, level + 1)
        out.append(_newline(indent, level) + "}")
    elif isinstance(o, (list, tuple)):
        if not o:
            out.append("[]")
            return
        out.append("[")
        for i, v in enumerate(o):
            if i:
                out.append(",")
            out.append(_newline(indent, level + 1))
            _emit(v, out, indent, level + 1)
        out.append(_newline(indent, level) + "]")
    else:
        raise TypeError(f"cannot serialise {type(o).__name__}")


def _newline(indent, level) -> str:
    return "" if indent is None else "\n" + " " * (indent * level)


# ------------------------------------------------------------ parameters


@dataclass(frozen=True)
class Source:
    """One parameter point and where it came from."""

    kind: str  # "physical", "coefficients" or "asymptotic"
    coeffs: QuarticCoeffs
    physical: RabiParams | None = None
    asymptotic: AsymptoticParams | None = None
    g: float | None = None

    def to_json(self) -> dict:
        doc: dict = {"kind": self.kind}
        if self.physical is not None:
            doc["delta_sq"] = self.physical.delta_sq
            doc["energy"] = self.physical.energy
            doc["g_sq"] = self.physical.g_sq
        if self.asymptotic is not None:
            doc["E_a"] = self.asymptotic.E_a
            doc["Delta_a"] = self.asymptotic.Delta_a
            doc["g"] = self.g
        return doc


def physical_source(delta: float, energy: float, g_sq: float) -> Source:
    p = RabiParams.from_delta(delta, energy, g_sq)
    return Source("physical", coeffs_from_params(p), physical=p)


def asymptotic_source(E_a: float, Delta_a: float, g: float | None) -> Source:
    """The limit quartic itself, or the finite-coupling point at ``g`` on the scaling ray."""
    a = AsymptoticParams(E_a, Delta_a)
    if g is None:
        return Source("asymptotic", asymptotic_model(a).coeffs, asymptotic=a)
    p = params_at_coupling(a, g)
    return Source("asymptotic", coeffs_from_params(p), physical=p, asymptotic=a, g=g)


def _floats(text: str, n: int, flag: str) -> list[float]:
    try:
        values = [float(v) for v in text.split(",")]
    except ValueError:
        raise InvalidInput(f"{flag} expects {n} comma-separated numbers, got {text!r}") from None
    if len(values) != n:
        raise InvalidInput(f"{flag} expects {n} comma-separated numbers, got {text!r}")
    return values


def source_from_args(args) -> Source:
    physical = [args.delta, args.energy, args.gsq]
    given = sum(x is not None for x in (args.coeffs, args.asymptotic)) + any(v is not None for v in physical)
    if given != 1:
        raise InvalidInput("give exactly one of --delta/--energy/--gsq, --coeffs or --asymptotic")
    if args.coeffs is not None:
        return Source("coefficients", QuarticCoeffs.from_sequence(_floats(args.coeffs, 4, "--coeffs")))
    if args.asymptotic is not None:
        E_a, Delta_a = _floats(args.asymptotic, 2, "--asymptotic")
        return asymptotic_source(E_a, Delta_a, args.g)
    if any(v is None for v in physical):
        raise InvalidInput("--delta, --energy and --gsq must be given together")
    return physical_source(*physical)


def trace_options(args) -> TraceOptions:
    opts = TraceOptions()
    overrides = {
        "rtol": args.tol_rtol,
        "snap_radius": args.tol_snap,
        "angle_tol": args.tol_angle,
        "pole_capture": args.tol_capture,
    }
    return replace(opts, **{k: v for k, v in overrides.items() if v is not None})


# --------------------------------------------------------------- reports


def _coeff_json(c: QuarticCoeffs) -> dict:
    return dict(zip(("c3", "c2", "c1", "c0"), c.as_tuple()))


def _asymptotic_json(a: AsymptoticParams) -> dict:
    model = asymptotic_model(a)
    region = asymptotic_region(a)
    return {
        "region": region.value,
        "expected_label": EXPECTED_LABEL.get(region),
        "c2": model.c2,
        "c0": model.c0,
        "zeros": list(model.zeros),
        "depressed": model.depressed,
    }


def classification_report(src: Source, an: Analysis) -> dict:
    qd = an.qd
    doc = {
        "schema_version": SCHEMA_VERSION,
        "source": src.to_json(),
        "coefficients": _coeff_json(an.coeffs),
        "invariants": an.invariants.as_dict(),
        "root_class": {
            "pattern": an.root_class.pattern.value,
            "near_degenerate": an.root_class.near_degenerate,
            "alternatives": [p.value for p in an.root_class.alternatives],
        },
        "zeros": [{"z": z, "order": m} for z, m in zip(qd.zeros, qd.orders)],
        "poles": [{"k": k, "alpha": d.alpha, "delta": d.delta} for k, d in sorted(qd.poles.items())],
        "inventory": dict(an.config.inventory),
        "strips": [list(s) for s in an.config.strips],
        "faces": [f.to_json() for f in an.config.faces],
        "label": {
            "geometric": str(an.geometric),
            "analytic": str(an.analytic),
            "predicates": an.predicates.to_json(),
        },
        "cross_validation": an.agreement.to_json(),
        "structure": {"ok": an.structure.ok, "failures": an.structure.failures()},
    }
    if src.asymptotic is not None:
        doc["asymptotic"] = _asymptotic_json(src.asymptotic)
    return doc


class Refused(Exception):
    """A parameter point the pipeline will not handle; carries the exit code."""

    def __init__(self, message: str, code: int):
        super().__init__(message)
        self.code = code


def _analyze(src: Source, args) -> Analysis:
    try:
        return analyze(src.coeffs, trace_options(args), args.tol_band)
    except DepressedDifferential as exc:
        raise Refused(f"depressed differential refused: {exc}", EXIT_REFUSED) from exc


def _write(text: str, path: str | None):
    if path is None or path == "-":
        sys.stdout.write(text)
    else:
        with open(path, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)


def _empty_limit(src: Source) -> bool:
    """Delta_a = 0 on E_a = -1: the limit is -dz^2, with no critical trajectories."""
    a = src.asymptotic
    return src.g is None and a is not None and a.Delta_a == 0.0 and asymptotic_model(a).depressed


# ------------------------------------------------------------- commands


def cmd_classify(args) -> int:
    src = source_from_args(args)
    an = _analyze(src, args)
    _write(dumps(classification_report(src, an), args.json_pretty) + "\n", args.out)
    if args.svg:
        _write(render_svg(an.graph, an.config if an.classified else None, args.labels, str(an.geometric)), args.svg)
    return EXIT_OK if an.classified else EXIT_UNCLASSIFIED


def cmd_trace(args) -> int:
    src = source_from_args(args)
    an = _analyze(src, args)
    doc = graph_to_json(an.graph, an.config)
    doc["source"] = src.to_json()
    doc["label"] = str(an.geometric)
    doc["trace"] = {
        "launched": an.traces.launched,
        "integrated": an.traces.integrated,
        "duplicates": an.traces.duplicates,
        "conflicts": list(an.traces.conflicts),
    }
    _write(dumps(doc, args.json_pretty) + "\n", args.out)
    return EXIT_OK if an.classified else EXIT_UNCLASSIFIED


def cmd_render(args) -> int:
    src = source_from_args(args)
    if _empty_limit(src):
        _write(render_svg(None, title="empty graph"), args.svg or args.out)
        return EXIT_OK
    an = _analyze(src, args)
    svg = render_svg(an.graph, an.config if an.classified else None, args.labels, str(an.geometric))
    _write(svg, args.svg or args.out)
    return EXIT_OK if an.classified else EXIT_UNCLASSIFIED


def cmd_map(args) -> int:
    src = source_from_args(args)
    c = src.coeffs
    doc: dict = {"schema_version": SCHEMA_VERSION, "source": src.to_json(), "coefficients": _coeff_json(c)}
    doc["invariants"] = lagrange_invariants(c).as_dict()
    doc["cylinder_residual"] = cylinder_residual(c)
    if c.c3 != 0:
        cp = cylinder_point(c)
        doc["cylinder_point"] = {"a": cp.a, "X": cp.X, "Y": cp.Y, "Z": cp.Z, "c": cp.c}
    back = params_from_coeffs(c)
    if back:
        doc["params"] = {"delta_sq": back.delta_sq, "energy": back.energy, "g_sq": back.g_sq}
        m = mirror_params(back)
        doc["mirror"] = {
            "params": {"delta_sq": m.delta_sq, "energy": m.energy, "g_sq": m.g_sq},
            "coefficients": _coeff_json(coeffs_from_params(m)),
        }
    else:
        doc["params"] = None
        doc["infeasible"] = {"reason": back.reason, "witness": back.witness}
    if src.asymptotic is not None:
        doc["asymptotic"] = _asymptotic_json(src.asymptotic)
        ladder = _floats(args.ladder, len(args.ladder.split(",")), "--ladder")
        doc["convergence"] = limit_convergence(src.asymptotic, ladder).to_json()
    _write(dumps(doc, args.json_pretty) + "\n", args.out)
    return EXIT_OK


# ----------------------------------------------------------------- sweep

_PHYSICAL_AXES = ("delta", "energy", "gsq")
_ASYMPTOTIC_AXES = ("Delta_a", "E_a")


@dataclass(frozen=True)
class Axis:
    name: str
    values: tuple[float, ...]


def parse_grid(spec: str) -> list[Axis]:
    """``name=lo:hi:n`` (or ``name=value``) terms joined by commas, outermost first."""
    axes = []
    for term in spec.split(","):
        name, _, rng = term.partition("=")
        name = name.strip()
        if name not in _PHYSICAL_AXES + _ASYMPTOTIC_AXES:
            raise InvalidInput(f"unknown grid axis {name!r}")
        parts = rng.split(":")
        try:
            if len(parts) == 1:
                values = (float(parts[0]),)
            elif len(parts) == 3:
                lo, hi, n = float(parts[0]), float(parts[1]), int(parts[2])
                if n < 1:
                    raise InvalidInput(f"grid count for {name} must be at least 1")
                values = tuple(float(v) for v in np.linspace(lo, hi, n)) if n > 1 else (lo,)
            else:
                raise ValueError
        except ValueError:
            raise InvalidInput(f"bad grid term {term!r}; use name=lo:hi:n") from None
        axes.append(Axis(name, values))
    names = [a.name for a in axes]
    if len(set(names)) != len(names):
        raise InvalidInput("a grid axis is repeated")
    if any(n in _PHYSICAL_AXES for n in names) and any(n in _ASYMPTOTIC_AXES for n in names):
        raise InvalidInput("do not mix physical and asymptotic grid axes")
    return axes


def _grid_sources(args, axes: list[Axis]):
    asymptotic = axes[0].name in _ASYMPTOTIC_AXES
    if asymptotic:
        fixed = dict(zip(_ASYMPTOTIC_AXES, reversed(_floats(args.asymptotic, 2, "--asymptotic")))) if args.asymptotic else {}
        needed = _ASYMPTOTIC_AXES
    else:
        fixed = {k: v for k, v in zip(_PHYSICAL_AXES, (args.delta, args.energy, args.gsq)) if v is not None}
        needed = _PHYSICAL_AXES
    swept = {a.name for a in axes}
    missing = [n for n in needed if n not in swept and n not in fixed]
    if missing:
        raise InvalidInput(f"no value for {', '.join(missing)}: sweep it or pass it as a flag")
    for combo in itertools.product(*(a.values for a in axes)):
        point = dict(fixed)
        point.update(zip((a.name for a in axes), combo))
        yield asymptotic, {n: point[n] for n in needed}


def _sweep_point(task, args) -> dict:
    asymptotic, point = task
    start = time.perf_counter()
    row: dict = {"params": point}
    try:
        if asymptotic:
            src = asymptotic_source(point["E_a"], point["Delta_a"], args.g)
            row["region"] = asymptotic_region(src.asymptotic).value
        else:
            src = physical_source(point["delta"], point["energy"], point["gsq"])
        c = src.coeffs
        inv = lagrange_invariants(c)
        row["coefficients"] = _coeff_json(c)
        row["invariants"] = inv.as_dict()
        row["root_class"] = classify_roots(inv, c).pattern.value
        if args.analytic_only:
            label, _ = label_case_analytic(QuadDiff(c), args.tol_band)
            row["analytic"] = str(label)
        else:
            an = analyze(c, trace_options(args), args.tol_band)
            row["geometric"] = str(an.geometric)
            row["analytic"] = str(an.analytic)
            row["agree"] = an.agreement.agree
        row["error"] = None
    except (StokesRabiError, ValueError, ArithmeticError) as exc:
        row["error"] = f"{type(exc).__name__}: {exc}"
    if args.timing:
        row["seconds"] = time.perf_counter() - start
    return row


def thread_count(args) -> int:
    if args.threads is not None:
        n = args.threads
    elif os.environ.get(THREADS_ENV):
        try:
            n = int(os.environ[THREADS_ENV])
        except ValueError:
            raise InvalidInput(f"{THREADS_ENV} must be an integer") from None
    else:
        n = min(8, os.cpu_count() or 1)
    if n < 1:
        raise InvalidInput("thread count must be at least 1")
    return n


def cmd_sweep(args) -> int:
    if not args.grid:
        raise InvalidInput("sweep needs --grid")
    axes = parse_grid(args.grid)
    tasks = list(_grid_sources(args, axes))
    out = sys.stdout if args.out in (None, "-") else open(args.out, "w", encoding="utf-8", newline="\n")
    try:
        with ThreadPoolExecutor(max_workers=thread_count(args)) as pool:
            # map yields in submission order, so the stream is row-major
            for i, row in enumerate(pool.map(lambda t: _sweep_point(t, args), tasks)):
                out.write(dumps({"index": i, **row}) + "\n")
    finally:
        if out is not sys.stdout:
            out.close()
    return EXIT_OK


# ---------------------------------------------------------------- parser


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    src = common.add_argument_group("parameter source (exactly one)")
    src.add_argument("--delta", type=float, help="level separation Delta")
    src.add_argument("--energy", type=float, help="eigenvalue E")
    src.add_argument("--gsq", type=float, help="squared coupling g^2 (non-zero, may be negative)")
    src.add_argument("--coeffs", help="c3,c2,c1,c0 of the monic quartic")
    src.add_argument(
        "--asymptotic", metavar="EA,DA", help="large-coupling pair E_a,Delta_a (write --asymptotic=-3,1 for negatives)"
    )
    src.add_argument("--g", type=float, help="with --asymptotic: use the finite coupling g instead of the limit")
    io = common.add_argument_group("output")
    io.add_argument("--out", help="output file (default stdout)")
    io.add_argument("--svg", help="SVG output file")
    io.add_argument("--labels", action="store_true", help="label edges in SVG output")
    io.add_argument("--json-pretty", action="store_true", help="indent JSON output")
    tol = common.add_argument_group("tolerances")
    tol.add_argument("--tol-rtol", type=float, help="integrator relative tolerance")
    tol.add_argument("--tol-snap", type=float, help="radius for snapping onto a zero")
    tol.add_argument("--tol-angle", type=float, help="launch direction tolerance")
    tol.add_argument("--tol-capture", type=float, help="radius for capture by a pole")
    tol.add_argument("--tol-band", type=float, default=1e-6, help="relative band for analytic predicates")

    parser = _Parser(prog="stokes-rabi", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)
    sub.add_parser("classify", parents=[common], help="full JSON classification report").set_defaults(func=cmd_classify)
    sub.add_parser("trace", parents=[common], help="traced graph as JSON").set_defaults(func=cmd_trace)
    sub.add_parser("render", parents=[common], help="SVG picture of the graph").set_defaults(func=cmd_render)
    mp = sub.add_parser("map", parents=[common], help="parameter maps: cylinder, inverse, mirror, limit")
    mp.add_argument("--ladder", default="10,100,1000", help="couplings for the convergence check")
    mp.set_defaults(func=cmd_map)
    sw = sub.add_parser("sweep", parents=[common], help="JSON lines over a parameter grid")
    sw.add_argument("--grid", help="e.g. delta=0:2:3,energy=-1:1:5 (first axis outermost)")
    sw.add_argument("--threads", type=int, help=f"worker threads (default ${THREADS_ENV} or CPU count)")
    sw.add_argument("--analytic-only", action="store_true", help="skip tracing; analytic labels only")
    sw.add_argument("--timing", action="store_true", help="add per-point wall time (breaks byte-identity)")
    sw.set_defaults(func=cmd_sweep)
    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    if args.command == "sweep" and args.asymptotic is None and args.coeffs is not None:
        print("stokes-rabi: sweep takes physical or asymptotic axes, not --coeffs", file=sys.stderr)
        return EXIT_USAGE
    try:
        return args.func(args)
    except Refused as exc:
        print(f"stokes-rabi: {exc}", file=sys.stderr)
        return exc.code
    except InfiniteCoupling as exc:
        print(f"stokes-rabi: {exc}", file=sys.stderr)
        return EXIT_REFUSED
    except InvalidInput as exc:
        print(f"stokes-rabi: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except StokesRabiError as exc:
        print(f"stokes-rabi: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_UNCLASSIFIED


if __name__ == "__main__":
    sys.exit(main())
