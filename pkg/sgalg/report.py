"""
Reports: one plain document per command, rendered as key-value text through
a jinja2 template or as JSON. Rationals are "num/den" strings; decimals carry
an explicit number of places. Timings appear only when requested.
"""

from __future__ import annotations

import json
from decimal import Decimal
from fractions import Fraction
from typing import Any, Dict, List, Sequence

from jinja2 import Environment, PackageLoader

from .algsolve import SolveReport
from .arith import format_rational
from .game import MatrixGame, StochasticGame
from .limit import LimitReport
from .matrix_game import MatrixGameSolution, find_cmv_kernel
from .roots import to_decimal
from .shapley import ValueEstimate

env = Environment(
    loader=PackageLoader("sgalg", "templates"),
    trim_blocks=True,
    lstrip_blocks=True,
    keep_trailing_newline=True,
)

ESTIMATE_PLACES = 12


def _q(x: Fraction) -> str:
    return format_rational(x)


def _vec(xs: Sequence[Fraction]) -> List[str]:
    return [_q(x) for x in xs]


def _dec(x: Fraction, places: int) -> str:
    return str(to_decimal(x, places))


def _timings(timings: Dict[str, float]) -> Dict[str, str]:
    return {k: f"{v:.3f}s" for k, v in sorted(timings.items())}


def _value_entry(interval, decimal: Decimal) -> Dict[str, Any]:
    entry: Dict[str, Any] = {"decimal": str(decimal)}
    if interval.exact is not None:
        entry["exact"] = _q(interval.exact)
    entry["interval"] = [_q(interval.lo), _q(interval.hi)]
    return entry


def validate_document(path: str, g: StochasticGame, classes: Sequence[str]) -> Dict[str, Any]:
    return {
        "command": "validate",
        "input": path,
        "status": "ok",
        "states": g.N,
        "actions": [f"{m}x{n}" for m, n in (g.actions(s) for s in range(g.N))],
        "classes": list(classes),
    }


def estimate_document(path: str, est: ValueEstimate, shift: Fraction) -> Dict[str, Any]:
    return {
        "command": "iterate",
        "input": path,
        "beta": _q(est.beta),
        "mode": est.mode,
        "bounds": est.bounds,
        "shift": _q(shift),
        "iterations": est.iterations,
        "values": [_dec(v, ESTIMATE_PLACES) for v in est.estimate],
        "residual": f"{float(est.residual):.6e}",
        "error_bound": f"{float(est.error_bound):.6e}",
    }


def solve_document(
    path: str,
    report: SolveReport,
    emit_system: bool = False,
    emit_groebner: bool = False,
    timings: bool = False,
) -> Dict[str, Any]:
    states = []
    for st in report.states:
        cert = st.certificate
        states.append(
            {
                "state": cert.state + 1,
                "certificate": cert.to_text(),
                "at_beta": st.value.poly.to_text(f"z{cert.var}"),
                "value": _value_entry(st.value.interval, st.value.decimal),
                "x": _vec(st.x),
                "y": _vec(st.y),
            }
        )
    doc: Dict[str, Any] = {
        "command": "solve",
        "input": path,
        "beta": _q(report.beta),
        "mode": report.mode,
        "precision": _q(report.precision),
        "shift": _q(report.shift),
        "classes": list(report.classes),
        "kernel": report.selection.as_json(),
        "attempts": report.attempts,
        "states": states,
        "residual": f"{float(report.residual):.6e}",
        "iteration_bound": f"{float(report.estimate.error_bound):.6e}",
    }
    if emit_system:
        doc["system"] = report.system.to_text().splitlines()
    if emit_groebner:
        doc["groebner"] = [
            {"order": basis.order.describe(), "basis": [g.to_text(basis.order) for g in basis.generators]}
            for basis in report.bases
        ]
    if timings:
        doc["timings"] = _timings(report.timings)
    return doc


def limit_document(
    path: str, report: LimitReport, emit_system: bool = False, timings: bool = False
) -> Dict[str, Any]:
    states = []
    for value, cert in zip(report.values, report.certificates):
        states.append(
            {
                "state": value.state + 1,
                "certificate": cert.to_text(),
                "limit_polynomial": value.poly.to_text(f"z{cert.var}"),
                "ell": value.ell,
                "value": _value_entry(value.interval, value.decimal),
            }
        )
    trace = report.trace
    doc: Dict[str, Any] = {
        "command": "limit",
        "input": path,
        "precision": _q(report.precision),
        "shift": _q(trace.shift),
        "schedule": f"1 - 10^-k, k = {report.schedule.k0}..{report.schedule.kmax}",
        "kernel": trace.selection.as_json(),
        "kernel_agreement": trace.agreement,
        "drift": f"{_q(report.drift_c)} * (1 - beta)^(1/{report.drift_m})",
        "states": states,
    }
    if emit_system:
        doc["system"] = report.system.to_text().splitlines()
    if timings:
        doc["timings"] = _timings(report.timings)
    return doc


def matrix_document(path: str, A: MatrixGame, solution: MatrixGameSolution) -> Dict[str, Any]:
    doc: Dict[str, Any] = {
        "command": "matrix-value",
        "input": path,
        "size": f"{A.m}x{A.n}",
        "value": _q(solution.value),
        "x": _vec(solution.x),
        "y": _vec(solution.y),
    }
    if solution.value != 0:
        kernel = find_cmv_kernel(A, solution)
        doc["kernel"] = {"rows": [i + 1 for i in kernel.rows], "cols": [j + 1 for j in kernel.cols]}
    return doc


def render_text(doc: Dict[str, Any]) -> str:
    return env.get_template("report.txt.j2").render(doc=doc)


def render_json(doc: Dict[str, Any]) -> str:
    return json.dumps(doc, indent=2) + "\n"


def render(doc: Dict[str, Any], as_json: bool = False) -> str:
    return render_json(doc) if as_json else render_text(doc)
