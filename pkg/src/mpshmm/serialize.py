"""JSON interchange for models, tensor sets, and result records.

Complex entries are two-element [re, im] arrays; matrices are row-major
nested lists; every document carries ``schema_version``.  Floats are written
with full precision so export/import round-trips bit for bit.  Infinities
(legal for divergences) are encoded as the string "inf".
"""

from __future__ import annotations

import json
import math
from pathlib import Path
from typing import Any

import numpy as np

from .bridge import DecompositionResult, DecompositionWitness, ExtractedHmm
from .ehmm import EhmmModel
from .entropy import BoundReport
from .linalg import TensorVector
from .mps import SiteTensorSet

SCHEMA_VERSION = 1

__all__ = [
    "SCHEMA_VERSION",
    "model_to_dict",
    "model_from_dict",
    "tensors_to_dict",
    "tensors_from_dict",
    "state_to_dict",
    "state_from_dict",
    "extracted_to_dict",
    "decomposition_to_dict",
    "bound_report_to_dict",
    "dump_json",
    "load_json",
    "load_model",
    "load_tensors",
]


def _pair(z: complex) -> list[float]:
    return [float(z.real), float(z.imag)]


def _matrix_out(a: np.ndarray) -> list[list[list[float]]]:
    return [[_pair(z) for z in row] for row in np.asarray(a, dtype=np.complex128)]


def _matrix_in(rows: Any) -> np.ndarray:
    return np.array(
        [[complex(p[0], p[1]) for p in row] for row in rows], dtype=np.complex128
    )


def _real(x: float) -> float | str:
    return "inf" if math.isinf(x) else float(x)


def model_to_dict(model: EhmmModel) -> dict:
    return {
        "schema_version": SCHEMA_VERSION,
        "kind": "ehmm_model",
        "m": model.m,
        "d": model.d,
        "translation_invariant": model.translation_invariant,
        "pi": [float(p) for p in model.pi],
        "hidden": [_matrix_out(u) for u in model.hidden],
        "emission": [_matrix_out(c) for c in model.emission],
    }


def model_from_dict(doc: dict) -> EhmmModel:
    _expect_kind(doc, "ehmm_model")
    return EhmmModel(
        pi=np.array(doc["pi"], dtype=np.float64),
        hidden=tuple(_matrix_in(u) for u in doc["hidden"]),
        emission=tuple(_matrix_in(c) for c in doc["emission"]),
        translation_invariant=bool(doc["translation_invariant"]),
    )


def tensors_to_dict(t: SiteTensorSet) -> dict:
    return {
        "schema_version": SCHEMA_VERSION,
        "kind": "site_tensor_set",
        "m": t.m,
        "d": t.d,
        "translation_invariant": t.translation_invariant,
        "sites": [[_matrix_out(a) for a in fam] for fam in t.sites],
    }


def tensors_from_dict(doc: dict) -> SiteTensorSet:
    _expect_kind(doc, "site_tensor_set")
    return SiteTensorSet(
        tuple(tuple(_matrix_in(a) for a in fam) for fam in doc["sites"]),
        translation_invariant=bool(doc["translation_invariant"]),
    )


def state_to_dict(v: TensorVector) -> dict:
    return {
        "schema_version": SCHEMA_VERSION,
        "kind": "tensor_vector",
        "factor_dims": list(v.factor_dims),
        "norm": v.norm(),
        "entries": [_pair(z) for z in v.entries],
    }


def state_from_dict(doc: dict) -> TensorVector:
    _expect_kind(doc, "tensor_vector")
    entries = np.array([complex(p[0], p[1]) for p in doc["entries"]])
    return TensorVector(tuple(doc["factor_dims"]), entries)


def extracted_to_dict(e: ExtractedHmm) -> dict:
    return {
        "schema_version": SCHEMA_VERSION,
        "kind": "extracted_hmm",
        "translation_invariant": e.translation_invariant,
        "transitions": [_matrix_out(p) for p in e.transitions],
        "emissions": [_matrix_out(q) for q in e.emissions],
    }


def _witness_to_dict(w: DecompositionWitness) -> dict:
    return {
        "site": w.site,
        "hidden_index": w.hidden_index,
        "sigma2": w.sigma2,
        "reason": w.reason,
    }


def decomposition_to_dict(r: DecompositionResult) -> dict:
    doc: dict = {
        "schema_version": SCHEMA_VERSION,
        "kind": "decomposition_result",
        "feasible": r.feasible,
    }
    if r.feasible:
        doc["translation_invariant"] = r.translation_invariant
        doc["hidden"] = [_matrix_out(u) for u in r.hidden or ()]
        doc["emission"] = [_matrix_out(c) for c in r.emission or ()]
        doc["reconstruction_error"] = r.reconstruction_error
    else:
        doc["witness"] = _witness_to_dict(r.witness) if r.witness else None
    return doc


def bound_report_to_dict(rep: BoundReport) -> dict:
    return {
        "schema_version": SCHEMA_VERSION,
        "kind": "bound_report",
        "s_value": _real(rep.s_value),
        "rhs_value": _real(rep.rhs_value),
        "s_diag": _real(rep.s_diag),
        "holds": rep.holds,
        "trace_rho": rep.trace_rho,
        "trace_sigma": rep.trace_sigma,
        "s_value_normalized": _real(rep.s_value_normalized),
        "rhs_value_normalized": _real(rep.rhs_value_normalized),
        "s_diag_normalized": _real(rep.s_diag_normalized),
        "holds_normalized": rep.holds_normalized,
        "support_violation": rep.support_violation,
        "hidden_unitary": rep.hidden_unitary,
    }


def dump_json(doc: dict, path: str | Path | None = None) -> str:
    text = json.dumps(doc, indent=2)
    if path is not None:
        Path(path).write_text(text + "\n")
    return text


def load_json(path: str | Path) -> dict:
    return json.loads(Path(path).read_text())


def load_model(path: str | Path) -> EhmmModel:
    return model_from_dict(load_json(path))


def load_tensors(path: str | Path) -> SiteTensorSet:
    return tensors_from_dict(load_json(path))


def _expect_kind(doc: dict, kind: str) -> None:
    found = doc.get("kind")
    if found != kind:
        raise ValueError(f"expected a {kind} document, found kind={found!r}")
