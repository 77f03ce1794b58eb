"""JSON encoding of states, POVMs and reports.

Complex numbers are two-element ``[re, im]`` arrays.  Field names are fixed:
a state is ``{"dim", "amplitudes"}``, a POVM is ``{"dim", "elements": [{"label",
"matrix"}]}``.
"""

from __future__ import annotations

import json
from typing import Any

import numpy as np

from .analysis import AmbiguityWitness, CertificationResult, FrameReport
from .errors import PsicError
from .objects import OutcomeDistribution, Povm, PureState
from .reconstruction import ReconstructionReport

SCHEMA_VERSION = "1.0"


class SchemaError(PsicError, ValueError):
    """A JSON document does not follow the published layout."""


def complex_to_json(z: complex) -> list[float]:
    return [float(np.real(z)), float(np.imag(z))]


def complex_from_json(pair: Any) -> complex:
    if not (isinstance(pair, (list, tuple)) and len(pair) == 2):
        raise SchemaError(f"complex numbers are [re, im] pairs, got {pair!r}")
    return complex(float(pair[0]), float(pair[1]))


def state_to_json(state: PureState) -> dict:
    return {"dim": state.dim, "amplitudes": [complex_to_json(z) for z in state.amplitudes]}


def state_from_json(doc: dict) -> PureState:
    """Parse a state; a document whose ``state`` key holds one (as ``probs`` output does) also works."""
    if "amplitudes" not in doc and isinstance(doc.get("state"), dict):
        doc = doc["state"]
    try:
        dim = int(doc["dim"])
        amps = np.array([complex_from_json(z) for z in doc["amplitudes"]])
    except (KeyError, TypeError) as exc:
        raise SchemaError(f"malformed state document: {exc}") from exc
    if amps.size != dim:
        raise SchemaError(f"state declares dim {dim} but has {amps.size} amplitudes")
    normalized = bool(abs(np.vdot(amps, amps).real - 1.0) <= 1e-10)
    return PureState(amps, normalized=normalized)


def povm_to_json(povm: Povm) -> dict:
    return {
        "dim": povm.dim,
        "elements": [
            {"label": label, "matrix": [[complex_to_json(z) for z in row] for row in op.matrix]}
            for label, op in zip(povm.labels, povm.elements)
        ],
    }


def povm_from_json(doc: dict) -> Povm:
    try:
        dim = int(doc["dim"])
        labels = [str(e["label"]) for e in doc["elements"]]
        mats = [
            np.array([[complex_from_json(z) for z in row] for row in e["matrix"]])
            for e in doc["elements"]
        ]
    except (KeyError, TypeError) as exc:
        raise SchemaError(f"malformed POVM document: {exc}") from exc
    if any(m.shape != (dim, dim) for m in mats):
        raise SchemaError(f"every element must be a {dim}x{dim} matrix")
    return Povm(mats, labels)


def validation_block(povm: Povm) -> dict:
    return {
        "min_eigenvalues": {lab: float(v) for lab, v in zip(povm.labels, povm.min_eigenvalues)},
        "completeness_residual": povm.completeness_residual,
    }


def distribution_to_json(dist: OutcomeDistribution) -> dict:
    return {
        "values": [float(v) for v in dist.values],
        "labels": list(dist.labels) if dist.labels is not None else None,
        "normalized_state": bool(dist.normalized_state),
    }


def distribution_from_json(doc: dict) -> OutcomeDistribution:
    try:
        values = [float(v) for v in doc["values"]]
    except (KeyError, TypeError) as exc:
        raise SchemaError(f"malformed distribution document: {exc}") from exc
    labels = doc.get("labels")
    return OutcomeDistribution(
        np.array(values), bool(doc.get("normalized_state", True)), tuple(labels) if labels else None
    )


def report_to_json(report: ReconstructionReport) -> dict:
    return {
        "state": state_to_json(report.state) if report.state is not None else None,
        "residual": None if not np.isfinite(report.residual) else report.residual,
        "failure": str(report.failure) if report.failure is not None else None,
    }


def frame_report_to_json(rep: FrameReport) -> dict:
    return {
        "frame_rank": rep.frame_rank,
        "dim_hermitian": rep.dim_hermitian,
        "is_ic": rep.is_ic,
        "singular_values": [float(s) for s in rep.singular_values],
    }


def certification_to_json(cert: CertificationResult) -> dict:
    return {
        "trials": cert.trials,
        "successes": cert.successes,
        "declared_failures": cert.declared_failures,
        "silent_failures": cert.silent_failures,
        "worst_residual": cert.worst_residual,
        "worst_infidelity": cert.worst_infidelity,
        "passed": cert.passed,
    }


def witness_to_json(w: AmbiguityWitness) -> dict:
    return {
        "found": True,
        "state_a": state_to_json(w.state_a),
        "state_b": state_to_json(w.state_b),
        "prob_gap": w.prob_gap,
        "infidelity": w.infidelity,
        "restarts_used": w.restarts_used,
    }


def with_metadata(body: dict, command: str, seed: int | None, parameters: dict) -> dict:
    return {
        "metadata": {
            "schema_version": SCHEMA_VERSION,
            "command": command,
            "seed": seed,
            "parameters": parameters,
        },
        **body,
    }


def dumps(doc: dict) -> str:
    return json.dumps(doc, indent=2, sort_keys=False)
