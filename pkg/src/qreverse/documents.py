"""JSON input documents and report serialization for the CLI.

One document declares named operations, codes, states and measurement
schemes over a single space dimension.  Complex scalars are encoded as
two-element [re, im] arrays and matrices as row-major nested arrays, so the
fixture corpus stays diffable.  Reports are plain dicts of JSON-safe values
with a fixed key order, serialized with Python's shortest round-trip float
representation.
"""

from __future__ import annotations

import json
from dataclasses import dataclass

import numpy as np

from .demon import MeasurementScheme
from .errors import InputDocumentError, QReverseError
from .linalg import DEFAULT_TOL, ToleranceConfig
from .operations import DensityOperator, QuantumOperation
from .reversal import CodeSubspace

__all__ = [
    "SCHEMA_VERSION",
    "InputDocument",
    "parse_input_document",
    "load_input_document",
    "encode_complex",
    "encode_matrix",
    "jsonable",
    "dump_report",
]

SCHEMA_VERSION = "1"


def _parse_complex(value, where: str) -> complex:
    if isinstance(value, (int, float)):
        return complex(value)
    if (
        isinstance(value, list)
        and len(value) == 2
        and all(isinstance(x, (int, float)) for x in value)
    ):
        return complex(value[0], value[1])
    raise InputDocumentError(f"{where}: complex scalars must be [re, im] pairs")


def _parse_vector(value, where: str) -> np.ndarray:
    if not isinstance(value, list) or not value:
        raise InputDocumentError(f"{where}: expected a nonempty vector")
    return np.array([_parse_complex(x, where) for x in value], dtype=complex)


def _parse_matrix(value, where: str) -> np.ndarray:
    if not isinstance(value, list) or not value:
        raise InputDocumentError(f"{where}: expected a nonempty matrix")
    rows = [_parse_vector(row, where) for row in value]
    width = rows[0].size
    if any(r.size != width for r in rows):
        raise InputDocumentError(f"{where}: ragged matrix rows")
    return np.stack(rows, axis=0)


def encode_complex(z) -> list:
    z = complex(z)
    return [float(z.real), float(z.imag)]


def encode_matrix(m) -> list:
    m = np.asarray(m, dtype=complex)
    return [[encode_complex(z) for z in row] for row in m]


@dataclass(frozen=True, eq=False)
class InputDocument:
    """A parsed document with every named object constructed and validated."""

    dim: int
    tolerance: ToleranceConfig
    operations: dict
    codes: dict
    states: dict
    schemes: dict

    def operation(self, name: str) -> QuantumOperation:
        return self._lookup("operations", self.operations, name)

    def code(self, name: str) -> CodeSubspace:
        return self._lookup("codes", self.codes, name)

    def state(self, name: str) -> DensityOperator:
        return self._lookup("states", self.states, name)

    def scheme(self, name: str) -> MeasurementScheme:
        return self._lookup("schemes", self.schemes, name)

    @staticmethod
    def _lookup(kind: str, table: dict, name: str):
        if name not in table:
            known = ", ".join(sorted(table)) or "none"
            raise InputDocumentError(f"no {kind[:-1]} named {name!r} (known: {known})")
        return table[name]


def _tolerance_from(document_tol, overrides: dict | None) -> ToleranceConfig:
    values = {
        "eq_tol": DEFAULT_TOL.eq_tol,
        "rank_cutoff": DEFAULT_TOL.rank_cutoff,
        "log_base": DEFAULT_TOL.log_base,
    }
    if document_tol is not None:
        if not isinstance(document_tol, dict):
            raise InputDocumentError("tolerance must be an object")
        for key, val in document_tol.items():
            if key not in values:
                raise InputDocumentError(f"unknown tolerance field {key!r}")
            values[key] = float(val)
    for key, val in (overrides or {}).items():
        if val is not None:
            values[key] = float(val)
    try:
        return ToleranceConfig(**values)
    except QReverseError as exc:
        raise InputDocumentError(f"bad tolerance values: {exc}") from exc


def parse_input_document(raw, tolerance_overrides: dict | None = None) -> InputDocument:
    """Build every named object in a document, with contextual error messages."""
    if not isinstance(raw, dict):
        raise InputDocumentError("input document must be a JSON object")
    version = raw.get("version")
    if version != SCHEMA_VERSION:
        raise InputDocumentError(
            f"unsupported document version {version!r} (expected {SCHEMA_VERSION!r})"
        )
    if "dim" not in raw or not isinstance(raw["dim"], int) or raw["dim"] < 1:
        raise InputDocumentError("document needs a positive integer 'dim'")
    dim = raw["dim"]
    tol = _tolerance_from(raw.get("tolerance"), tolerance_overrides)

    operations = {}
    for name, kraus_raw in (raw.get("operations") or {}).items():
        where = f"operations.{name}"
        if not isinstance(kraus_raw, list) or not kraus_raw:
            raise InputDocumentError(f"{where}: expected a list of matrices")
        kraus = tuple(_parse_matrix(mat, where) for mat in kraus_raw)
        try:
            operations[name] = QuantumOperation(kraus, tol=tol)
        except QReverseError as exc:
            raise InputDocumentError(f"{where}: {exc}") from exc
        if operations[name].dim != dim:
            raise InputDocumentError(f"{where}: operator size differs from dim={dim}")

    codes = {}
    for name, kets_raw in (raw.get("codes") or {}).items():
        where = f"codes.{name}"
        if not isinstance(kets_raw, list) or not kets_raw:
            raise InputDocumentError(f"{where}: expected a list of basis vectors")
        kets = [_parse_vector(k, where) for k in kets_raw]
        if any(k.size != dim for k in kets):
            raise InputDocumentError(f"{where}: basis vector length differs from dim={dim}")
        try:
            codes[name] = CodeSubspace.from_kets(kets, tol=tol)
        except QReverseError as exc:
            raise InputDocumentError(f"{where}: {exc}") from exc

    states = {}
    for name, spec_raw in (raw.get("states") or {}).items():
        where = f"states.{name}"
        if not isinstance(spec_raw, dict) or len(spec_raw) != 1:
            raise InputDocumentError(
                f"{where}: expected an object with exactly one of 'vector' or 'matrix'"
            )
        try:
            if "vector" in spec_raw:
                ket = _parse_vector(spec_raw["vector"], where)
                if ket.size != dim:
                    raise InputDocumentError(f"{where}: vector length differs from dim={dim}")
                states[name] = DensityOperator.from_ket(ket, tol=tol)
            elif "matrix" in spec_raw:
                mat = _parse_matrix(spec_raw["matrix"], where)
                if mat.shape != (dim, dim):
                    raise InputDocumentError(f"{where}: matrix size differs from dim={dim}")
                states[name] = DensityOperator(mat, tol=tol)
            else:
                raise InputDocumentError(f"{where}: needs 'vector' or 'matrix'")
        except InputDocumentError:
            raise
        except QReverseError as exc:
            raise InputDocumentError(f"{where}: {exc}") from exc

    schemes = {}
    for name, scheme_raw in (raw.get("schemes") or {}).items():
        where = f"schemes.{name}"
        if not isinstance(scheme_raw, dict) or not isinstance(scheme_raw.get("outcomes"), list):
            raise InputDocumentError(f"{where}: expected an object with an 'outcomes' list")
        outcomes = []
        labels = []
        for idx, entry in enumerate(scheme_raw["outcomes"]):
            ewhere = f"{where}.outcomes[{idx}]"
            if not isinstance(entry, dict) or "measure" not in entry or "feedback" not in entry:
                raise InputDocumentError(f"{ewhere}: needs 'measure' and 'feedback' matrices")
            b = _parse_matrix(entry["measure"], ewhere)
            v = _parse_matrix(entry["feedback"], ewhere)
            if b.shape != (dim, dim) or v.shape != (dim, dim):
                raise InputDocumentError(f"{ewhere}: operator size differs from dim={dim}")
            outcomes.append((b, v))
            labels.append(str(entry.get("label", f"outcome_{idx}")))
        try:
            schemes[name] = MeasurementScheme(
                outcomes=tuple(outcomes), labels=tuple(labels), tol=tol
            )
        except QReverseError as exc:
            raise InputDocumentError(f"{where}: {exc}") from exc

    return InputDocument(
        dim=dim,
        tolerance=tol,
        operations=operations,
        codes=codes,
        states=states,
        schemes=schemes,
    )


def load_input_document(text: str, tolerance_overrides: dict | None = None) -> InputDocument:
    try:
        raw = json.loads(text)
    except json.JSONDecodeError as exc:
        raise InputDocumentError(f"malformed JSON: {exc}") from exc
    return parse_input_document(raw, tolerance_overrides)


def jsonable(value):
    """Recursively convert report values to JSON-safe types.

    Real numbers stay floats; complex scalars and complex arrays become
    [re, im] pairs; arrays whose imaginary part is exactly zero stay real.
    """
    if value is None or isinstance(value, (bool, int, str)):
        return value
    if isinstance(value, float):
        return float(value)
    if isinstance(value, complex):
        return encode_complex(value)
    if isinstance(value, np.bool_):
        return bool(value)
    if isinstance(value, np.integer):
        return int(value)
    if isinstance(value, np.floating):
        return float(value)
    if isinstance(value, np.complexfloating):
        return encode_complex(complex(value))
    if isinstance(value, np.ndarray):
        if value.ndim == 2 and np.iscomplexobj(value):
            return encode_matrix(value)
        return [jsonable(x) for x in value.tolist()]
    if isinstance(value, dict):
        return {str(k): jsonable(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [jsonable(x) for x in value]
    raise TypeError(f"cannot serialize {type(value).__name__} into a report")


def dump_report(report: dict) -> str:
    """Deterministic two-space-indented JSON with a trailing newline."""
    return json.dumps(jsonable(report), indent=2, allow_nan=False) + "\n"
