"""JSON encoding of matrices and vectors.

A matrix is ``{"rows": n, "cols": m, "re": [...], "im": [...]}`` in row-major
order. A state vector uses the same object with ``cols == 1``. Floats are
written with ``repr`` so they parse back bit-identically.
"""

from __future__ import annotations

import numpy as np

from .linalg import PureState, UnitaryMatrix, as_matrix, as_vector


class MalformedPayload(ValueError):
    """Input JSON does not follow the matrix/vector schema."""


def matrix_to_json(m) -> dict:
    a = as_matrix(m)
    return {
        "rows": int(a.shape[0]),
        "cols": int(a.shape[1]),
        "re": [float(x) for x in a.real.ravel()],
        "im": [float(x) for x in a.imag.ravel()],
    }


def matrix_from_json(obj) -> np.ndarray:
    try:
        rows, cols = int(obj["rows"]), int(obj["cols"])
        re = np.asarray(obj["re"], dtype=float)
        im = np.asarray(obj.get("im", [0.0] * (rows * cols)), dtype=float)
    except (KeyError, TypeError, ValueError) as exc:
        raise MalformedPayload(f"not a matrix object: {exc}") from exc
    if rows < 1 or cols < 1 or re.shape != (rows * cols,) or im.shape != (rows * cols,):
        raise MalformedPayload(f"matrix object has {re.size}/{im.size} entries for {rows}x{cols}")
    return (re + 1j * im).reshape(rows, cols)


def unitary_from_json(obj) -> UnitaryMatrix:
    return UnitaryMatrix.checked(matrix_from_json(obj))


def vector_to_json(v) -> dict:
    a = as_vector(v)
    return matrix_to_json(a.reshape(-1, 1))


def vector_from_json(obj) -> PureState:
    """Accepts a column matrix object or a bare ``{"re": [...], "im": [...]}``."""
    if isinstance(obj, dict) and "rows" not in obj:
        obj = {"rows": len(obj.get("re", [])), "cols": 1, **obj}
    a = matrix_from_json(obj)
    if a.shape[1] != 1:
        raise MalformedPayload(f"state must be a column vector, got shape {a.shape}")
    return PureState.normalized(a[:, 0])
