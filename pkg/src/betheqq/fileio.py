"""File formats (JSON documents) and reports for batch use.

Scalars serialize as exact strings, never binary floats: rationals as
"p/q", numeric values as decimal strings carrying the full stored
precision, complex values as two-element arrays [re, im].  Documents are
rendered with sorted keys and fixed separators so reports are byte-stable
under re-runs (timestamps excluded).
"""

from __future__ import annotations

import hashlib
import json
from typing import Any

from .backlund import ChainTrace
from .bethe import BetheRoots, InfinitePartition
from .errors import ParseError
from .opermat import RatMatrix
from .polyalg import Poly, RationalFn
from .qqcore import QQInstance, QQSolution
from .rootsys import CartanType, WeylWord
from .scalars import ExactField, Field, NumericField, make_field


def scalar_to_doc(field: Field, x) -> Any:
    return field.to_literal(field(x))


def poly_to_doc(field: Field, p: Poly) -> list:
    return [scalar_to_doc(field, c) for c in p.coeffs]


def poly_from_doc(field: Field, doc) -> Poly:
    if not isinstance(doc, list):
        raise ParseError("polynomial must be a list of coefficient literals")
    return Poly.make(field, [field(c) for c in doc])


def rational_to_doc(field: Field, r: RationalFn) -> dict:
    return {"num": poly_to_doc(field, r.num), "den": poly_to_doc(field, r.den)}


# -- instance ---------------------------------------------------------------


def field_from_doc(doc: dict, backend_override: str | None = None,
                   precision_override: int | None = None) -> Field:
    backend = backend_override or doc.get("backend", "exact")
    precision = precision_override or int(doc.get("precision_bits", 256))
    tols = doc.get("tolerances", {}) or {}
    tau = tau_root = None
    if backend == "numeric":
        probe = NumericField(precision)
        tau = probe.ctx.mpf(tols["tau"]) if "tau" in tols else None
        tau_root = probe.ctx.mpf(tols["tau_root"]) if "tau_root" in tols else None
    return make_field(backend, precision, tau=tau, tau_root=tau_root)


def instance_from_doc(doc: dict, backend_override: str | None = None,
                      precision_override: int | None = None) -> QQInstance:
    try:
        field = field_from_doc(doc, backend_override, precision_override)
        fam = doc["cartan"]["family"]
        rank = int(doc["cartan"]["rank"])
        ctype = CartanType(fam, rank)
        points = [(p["z"], p["weights"]) for p in doc.get("points", [])]
        twist = doc["twist"]
        lead = doc.get("lead")
        extra_doc = doc.get("extra")
        extra = None
        if extra_doc is not None:
            extra = [poly_from_doc(field, e) if e else None for e in extra_doc]
        return QQInstance.make(ctype, field, points, twist, lead=lead, extra=extra)
    except (KeyError, TypeError, ValueError) as exc:
        raise ParseError(f"bad instance document: {exc}") from exc


def instance_to_doc(inst: QQInstance) -> dict:
    field = inst.field
    doc = {
        "backend": field.backend,
        "cartan": {"family": inst.ctype.family, "rank": inst.ctype.rank},
        "points": [{"z": scalar_to_doc(field, z), "weights": list(exps)}
                   for z, exps in inst.points],
        "twist": [scalar_to_doc(field, z) for z in inst.twist.zeta],
        "lead": [scalar_to_doc(field, x) for x in inst.lead],
    }
    if isinstance(field, NumericField):
        doc["precision_bits"] = field.precision
    if any(e is not None for e in inst.extra):
        doc["extra"] = [poly_to_doc(field, e) if e is not None else None for e in inst.extra]
    return doc


def instance_digest(inst: QQInstance) -> str:
    blob = canonical_json(instance_to_doc(inst)).encode()
    return hashlib.sha256(blob).hexdigest()


# -- solutions, roots, partitions, traces, matrices --------------------------


def solution_to_doc(field: Field, sol: QQSolution) -> dict:
    return {
        "q_plus": [poly_to_doc(field, p) for p in sol.q_plus],
        "q_minus": [poly_to_doc(field, p) for p in sol.q_minus],
    }


def solution_from_doc(field: Field, doc: dict) -> QQSolution:
    try:
        qp = [poly_from_doc(field, p) for p in doc["q_plus"]]
        qm = [poly_from_doc(field, p) for p in doc["q_minus"]]
    except (KeyError, TypeError) as exc:
        raise ParseError(f"bad solution document: {exc}") from exc
    return QQSolution.make(qp, qm)


def roots_to_doc(field: Field, roots: BetheRoots) -> dict:
    sorted_roots = roots.canonical(field)
    return {"roots": [[scalar_to_doc(field, w) for w in color] for color in sorted_roots.roots]}


def roots_from_doc(field: Field, doc: dict) -> BetheRoots:
    try:
        return BetheRoots.make(field, doc["roots"])
    except (KeyError, TypeError) as exc:
        raise ParseError(f"bad roots document: {exc}") from exc


def partition_from_doc(field: Field, doc: dict) -> InfinitePartition:
    try:
        return InfinitePartition.make(field, doc["partition"])
    except (KeyError, TypeError) as exc:
        raise ParseError(f"bad partition document: {exc}") from exc


def trace_to_doc(trace: ChainTrace) -> dict:
    field = trace.initial_instance.field
    steps = []
    for step in trace.steps:
        steps.append({
            "index": step.index,
            "twist": [scalar_to_doc(field, z) for z in step.instance.twist.zeta],
            "lead": [scalar_to_doc(field, x) for x in step.instance.lead],
            "mu": rational_to_doc(field, step.mu),
            "solution": solution_to_doc(field, step.solution),
            "composable": step.composable,
            "generic": step.generic,
        })
    return {
        "word": list(trace.word.letters),
        "initial": {
            "instance": instance_to_doc(trace.initial_instance),
            "solution": solution_to_doc(field, trace.initial_solution),
        },
        "steps": steps,
        "fully_composable": trace.fully_composable,
        "fully_generic": trace.fully_generic,
    }


def matrix_to_doc(field: Field, mat: RatMatrix) -> dict:
    return {"entries": [[rational_to_doc(field, e) for e in row] for row in mat.entries]}


def word_from_arg(text, rank: int) -> WeylWord:
    if isinstance(text, (list, tuple)):
        return WeylWord.make(text, rank)
    try:
        letters = [int(t) for t in str(text).replace(",", " ").split()]
    except ValueError as exc:
        raise ParseError(f"bad word {text!r}: {exc}") from None
    return WeylWord.make(letters, rank)


# -- reports ----------------------------------------------------------------


def canonical_json(doc) -> str:
    return json.dumps(doc, sort_keys=True, separators=(",", ":"))


def residual_repr(field: Field, value) -> str:
    """Human-readable residual magnitude."""
    mag = field.abs(value) if not isinstance(value, str) else value
    if isinstance(field, ExactField):
        return "0" if mag == 0 else field.to_literal(mag)
    return field.ctx.nstr(field.ctx.mpf(mag), 8)


class Report:
    """Accumulates named checks and artifacts for one command run."""

    def __init__(self, command: str, inst: QQInstance | None = None, seed=None):
        self.doc: dict = {"command": command, "checks": [], "artifacts": {}}
        if inst is not None:
            self.doc["instance_digest"] = instance_digest(inst)
        if seed is not None:
            self.doc["seed"] = seed

    def check(self, name: str, ok: bool | None, residual: str | None = None) -> None:
        entry: dict = {"name": name, "pass": ok}
        if residual is not None:
            entry["residual"] = residual
        self.doc["checks"].append(entry)

    def artifact(self, name: str, value) -> None:
        self.doc["artifacts"][name] = value

    @property
    def all_pass(self) -> bool:
        return all(c["pass"] for c in self.doc["checks"] if c["pass"] is not None)

    def finish(self, wall_time_s: float | None = None) -> dict:
        if wall_time_s is not None:
            self.doc["wall_time_s"] = round(wall_time_s, 6)
        self.doc["pass"] = self.all_pass
        return self.doc
