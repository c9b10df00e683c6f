"""JSON documents for operators, frames, subspaces and reports.

Complex entries are stored as ``[re, im]`` pairs; floats are written with
``repr`` precision, so a save/load cycle is bit-exact.
"""
import json
from dataclasses import dataclass

import jsonschema
import numpy as np

from .errors import InvalidInput
from .frames import FrameSystem
from .opcore import Subspace

__all__ = [
    "Document",
    "CodecError",
    "operator_doc",
    "frame_doc",
    "subspace_doc",
    "report_doc",
    "validate",
    "decode",
    "dumps",
    "codec_load",
    "codec_save",
]


class CodecError(InvalidInput):
    pass


_PAIR = {"type": "array", "items": {"type": "number"}, "minItems": 2, "maxItems": 2}
_ROW = {"type": "array", "items": _PAIR, "minItems": 1}
_OPERATOR = {
    "type": "object",
    "required": ["kind", "rows", "cols", "entries"],
    "properties": {
        "kind": {"const": "operator"},
        "rows": {"type": "integer", "minimum": 1},
        "cols": {"type": "integer", "minimum": 1},
        "entries": {"type": "array", "items": _ROW, "minItems": 1},
    },
}
_SCHEMAS = {
    "operator": _OPERATOR,
    "frame": {
        "type": "object",
        "required": ["kind", "dim", "vectors"],
        "properties": {
            "kind": {"const": "frame"},
            "dim": {"type": "integer", "minimum": 1},
            "vectors": {"type": "array", "items": _ROW, "minItems": 1},
        },
    },
    "subspace": {
        "type": "object",
        "required": ["kind", "ambient_dim", "basis"],
        "properties": {
            "kind": {"const": "subspace"},
            "ambient_dim": {"type": "integer", "minimum": 1},
            # a zero-dimensional subspace has no columns
            "basis": {
                "type": "object",
                "required": ["rows", "cols", "entries"],
                "properties": {
                    "rows": {"type": "integer", "minimum": 1},
                    "cols": {"type": "integer", "minimum": 0},
                    "entries": {"type": "array", "items": {"type": "array", "items": _PAIR}},
                },
            },
        },
    },
    "report": {
        "type": "object",
        "required": ["kind", "name", "body"],
        "properties": {
            "kind": {"const": "report"},
            "name": {"type": "string"},
            "body": {"type": "object"},
        },
    },
}


@dataclass(frozen=True)
class Document:
    kind: str
    payload: dict


def _pairs(vec):
    return [[float(z.real), float(z.imag)] for z in np.asarray(vec, dtype=np.complex128).ravel()]


def _operator_payload(a):
    a = np.asarray(a, dtype=np.complex128)
    return {
        "kind": "operator",
        "rows": int(a.shape[0]),
        "cols": int(a.shape[1]),
        "entries": [_pairs(row) for row in a],
    }


def operator_doc(a):
    return Document("operator", _operator_payload(a))


def frame_doc(f):
    return Document(
        "frame",
        {"kind": "frame", "dim": f.dim, "vectors": [_pairs(v) for v in f.vectors]},
    )


def subspace_doc(w):
    return Document(
        "subspace",
        {"kind": "subspace", "ambient_dim": w.ambient_dim, "basis": _operator_payload(w.basis)},
    )


def report_doc(name, body):
    return Document("report", {"kind": "report", "name": name, "body": body})


def _complex(rows):
    arr = np.array([[complex(re, im) for re, im in row] for row in rows], dtype=np.complex128)
    if arr.size and not np.all(np.isfinite(arr)):
        raise CodecError("entries must be finite")
    return arr


def _check_operator(p, where="operator"):
    entries = p["entries"]
    if len(entries) != p["rows"] or any(len(r) != p["cols"] for r in entries):
        raise CodecError(f"{where}: entries do not match rows x cols = {p['rows']} x {p['cols']}")
    return _complex(entries) if p["cols"] else np.zeros((p["rows"], 0), dtype=np.complex128)


def validate(payload):
    """Schema-check a parsed JSON body and return it as a :class:`Document`."""
    if not isinstance(payload, dict) or payload.get("kind") not in _SCHEMAS:
        raise CodecError("document needs a 'kind' of operator, frame, subspace or report")
    try:
        jsonschema.validate(payload, _SCHEMAS[payload["kind"]])
    except jsonschema.ValidationError as exc:
        raise CodecError(f"{payload['kind']} document: {exc.message}") from None
    doc = Document(payload["kind"], payload)
    decode(doc)
    return doc


def decode(doc):
    """Turn a document into an ``ndarray``, :class:`FrameSystem`, :class:`Subspace` or dict."""
    p = doc.payload
    if doc.kind == "operator":
        return _check_operator(p)
    if doc.kind == "frame":
        if any(len(v) != p["dim"] for v in p["vectors"]):
            raise CodecError(f"frame: every vector must have length {p['dim']}")
        return FrameSystem(_complex(p["vectors"]).T)
    if doc.kind == "subspace":
        basis = _check_operator(p["basis"], "subspace basis")
        if basis.shape[0] != p["ambient_dim"]:
            raise CodecError("subspace: basis rows must equal ambient_dim")
        return Subspace(p["ambient_dim"], basis)
    return p["body"]


def dumps(payload):
    return json.dumps(payload, sort_keys=True, allow_nan=False)


def codec_load(path):
    try:
        with open(path) as fh:
            payload = json.load(fh)
    except OSError as exc:
        raise CodecError(f"cannot read {path}: {exc.strerror}") from None
    except json.JSONDecodeError as exc:
        raise CodecError(f"{path}: invalid JSON ({exc.msg})") from None
    return validate(payload)


def codec_save(doc, path):
    text = dumps(doc.payload)
    with open(path, "w") as fh:
        fh.write(text + "\n")
