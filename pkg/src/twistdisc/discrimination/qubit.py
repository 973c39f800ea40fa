"""Exact infeasibility proofs for qubit constraint sets.

Write a 2x2 constraint operator as ``M = c0 I + c . sigma``. For a qubit state
with Bloch vector ``r`` (``|r| = 1``), ``<alpha|M|alpha> = c0 + c . r``.
"""

from __future__ import annotations

import numpy as np

from ..linalg import as_matrix

_PAULIS = np.array([[[0, 1], [1, 0]], [[0, -1j], [1j, 0]], [[1, 0], [0, -1]]], dtype=np.complex128)


def pauli_coefficients(m) -> tuple[complex, np.ndarray]:
    m = as_matrix(m)
    if m.shape != (2, 2):
        raise ValueError("Pauli decomposition needs a 2x2 matrix")
    c0 = np.trace(m) / 2
    c = np.einsum("kab,ba->k", _PAULIS, m) / 2
    return complex(c0), c


def bloch_direction(m, tol: float = 1e-10) -> np.ndarray | None:
    """Real unit direction ``n`` if ``M`` is a phase times ``n . sigma``, else ``None``."""
    c0, c = pauli_coefficients(m)
    norm = np.linalg.norm(c)
    if abs(c0) > tol * max(1.0, norm) or norm <= tol:
        return None
    k = int(np.argmax(np.abs(c)))
    n = c * (abs(c[k]) / c[k])
    if np.max(np.abs(n.imag)) > tol * norm:
        return None
    return n.real / np.linalg.norm(n.real)


def bloch_directions_span(ops, tol: float = 1e-10) -> int:
    """Rank of the real Pauli directions found among ``ops``."""
    dirs = [n for n in (bloch_direction(m, tol) for m in ops) if n is not None]
    if not dirs:
        return 0
    return int(np.linalg.matrix_rank(np.array(dirs), tol=1e-8))


def cube_sphere_grid(step: float) -> np.ndarray:
    """Unit vectors obtained by projecting a square grid on each cube face.

    Every point of the sphere lies within ``step / sqrt(2)`` of a grid point:
    a face cell has half-diagonal ``step / sqrt(2)`` and radial projection
    from outside the unit ball is 1-Lipschitz.
    """
    n = int(np.ceil(2 / step)) + 1
    u = np.linspace(-1, 1, n)
    uu, vv = np.meshgrid(u, u, indexing="ij")
    uu, vv = uu.ravel(), vv.ravel()
    one = np.ones_like(uu)
    faces = []
    for sign in (1, -1):
        faces += [np.stack([sign * one, uu, vv], 1), np.stack([uu, sign * one, vv], 1),
                  np.stack([uu, vv, sign * one], 1)]
    pts = np.concatenate(faces)
    return pts / np.linalg.norm(pts, axis=1, keepdims=True)


def grid_lower_bound(ops, step: float = 0.02) -> tuple[float, float]:
    """Return ``(grid_min, slack)`` for ``h(r) = max_k |c0_k + c_k . r|``.

    ``h`` has Lipschitz constant ``L = max_k |c_k|``, so
    ``min_sphere h >= grid_min - L * step / sqrt(2)``; infeasibility is proved
    whenever ``grid_min > slack``.
    """
    coeffs = [pauli_coefficients(m) for m in ops]
    pts = cube_sphere_grid(step)
    vals = np.zeros(len(pts))
    lip = 0.0
    for c0, c in coeffs:
        vals = np.maximum(vals, np.abs(c0 + pts @ c))
        lip = max(lip, float(np.linalg.norm(c)))
    return float(vals.min()), lip * step / np.sqrt(2)
