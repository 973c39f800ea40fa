"""Exact simulation of teleportation over an unknown maximally entangled channel.

Qudits are ordered ``C (x) A (x) B`` with ``C`` the slowest index. Alice holds
``C`` and ``A``; Bob holds ``B``. When the shared resource is ``|Psi_r>`` and
Alice measures ``CA`` in the basis ``{|Psi_i>}``, Bob is left with
``U_r^T U_i^dagger |psi>``.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .linalg import (
    EXACT_TOL,
    DimensionMismatch,
    PureState,
    UnitaryMatrix,
    as_matrix,
    as_vector,
)
from .operators import (
    TWIST_TOL,
    TwistPhaseTable,
    check_orthogonal,
    gbs_basis,
    lattice_basis,
    twist_table,
)


def mes_state(u) -> PureState:
    """Amplitudes of ``(U (x) I) (1/sqrt d) sum_i |ii>``."""
    m = as_matrix(u)
    d = m.shape[0]
    if m.shape != (d, d):
        raise DimensionMismatch(f"mes_state needs a square matrix, got {m.shape}")
    if np.max(np.abs(m.conj().T @ m - np.eye(d))) > EXACT_TOL:
        raise ValueError("mes_state needs a unitary matrix")
    # (U (x) I)|kk> = sum_c U[c,k] |c>|k>  ->  amplitude[c, a] = U[c, a] / sqrt(d)
    return PureState(m.reshape(-1) / np.sqrt(d))


@dataclass(frozen=True, eq=False)
class MesBasis:
    """Orthonormal basis of maximally entangled states, stored as unitaries."""

    dim: int
    unitaries: tuple
    labels: tuple
    twist: TwistPhaseTable | None = None
    family: str = "generic"

    @classmethod
    def from_unitaries(cls, unitaries, labels=None, *, family="generic", with_twist=True):
        us = tuple(u if isinstance(u, UnitaryMatrix) else UnitaryMatrix.checked(u) for u in unitaries)
        d = us[0].dim
        if len(us) != d * d:
            raise ValueError(f"a basis of dimension {d} needs {d * d} unitaries, got {len(us)}")
        check_orthogonal(us, TWIST_TOL)
        states = np.array([mes_state(u).amplitudes for u in us])
        gerr = np.max(np.abs(states.conj() @ states.T - np.eye(len(us))))
        if gerr > TWIST_TOL:
            raise ValueError(f"MES Gram matrix deviates from identity by {gerr:.3e}")
        labels = tuple(labels) if labels is not None else tuple(range(len(us)))
        return cls(d, us, labels, twist_table(us) if with_twist else None, family)

    @classmethod
    def gbs(cls, d: int, with_twist: bool = True) -> "MesBasis":
        us, labels = gbs_basis(d)
        return cls.from_unitaries(us, labels, family="gbs", with_twist=with_twist)

    @classmethod
    def lattice(cls, d: int, with_twist: bool = True) -> "MesBasis":
        us, labels = lattice_basis(d)
        return cls.from_unitaries(us, labels, family="lattice", with_twist=with_twist)

    @property
    def is_twist(self) -> bool:
        return self.twist is not None and self.twist.is_twist

    def index_of(self, u, tol: float = TWIST_TOL) -> int:
        """Position of ``u`` in the basis (exact match, not up to phase)."""
        m = as_matrix(u)
        for i, v in enumerate(self.unitaries):
            if np.max(np.abs(v.data - m)) <= tol:
                return i
        raise KeyError("unitary is not an element of this basis")

    def __len__(self) -> int:
        return len(self.unitaries)


@dataclass(frozen=True)
class Branch:
    outcome: int
    probability: float
    bob_state: PureState | None


@dataclass(frozen=True, eq=False)
class BranchTable:
    dim: int
    resource_index: int
    branches: tuple[Branch, ...]
    reconstruction_error: float = field(default=0.0)

    @property
    def probabilities(self) -> np.ndarray:
        return np.array([b.probability for b in self.branches])

    def to_dict(self) -> dict:
        from .serialize import vector_to_json

        return {
            "dim": self.dim,
            "resource_index": self.resource_index,
            "reconstruction_error": self.reconstruction_error,
            "branches": [
                {
                    "outcome": b.outcome,
                    "probability": b.probability,
                    "bob_state": None if b.bob_state is None else vector_to_json(b.bob_state),
                }
                for b in self.branches
            ],
        }


def tripartite_state(psi, resource) -> np.ndarray:
    """``|psi>_C |Psi_U>_AB`` as a ``(d, d, d)`` array indexed ``[c, a, b]``."""
    v = as_vector(psi)
    d = v.shape[0]
    return np.kron(v, mes_state(resource).amplitudes).reshape(d, d, d)


def teleport_coefficients(psi, basis: MesBasis, r: int) -> np.ndarray:
    """Projection coefficients onto ``|Psi_i>_CA |j>_B`` as a ``(d**2, d)`` array."""
    v = as_vector(psi)
    d = basis.dim
    if v.shape[0] != d:
        raise DimensionMismatch(f"state has dim {v.shape[0]}, basis has dim {d}")
    if not 0 <= r < len(basis):
        raise IndexError(f"resource index {r} out of range [0, {len(basis)})")
    T = tripartite_state(v, basis.unitaries[r])
    psis = np.array([u.data for u in basis.unitaries]) / np.sqrt(d)
    return np.einsum("ica,cab->ib", psis.conj(), T)


def expand_teleport(psi, basis: MesBasis, r: int, tol: float = 1e-10) -> BranchTable:
    """Expand ``|psi>_C |Psi_r>_AB`` over Alice's measurement basis.

    Raises ``ArithmeticError`` if the branches fail to sum back to the input.
    """
    v = as_vector(psi)
    coeffs = teleport_coefficients(v, basis, r)
    d = basis.dim
    psis = np.array([u.data for u in basis.unitaries]) / np.sqrt(d)
    recon = np.einsum("ica,ib->cab", psis, coeffs)
    err = float(np.linalg.norm(recon - tripartite_state(v, basis.unitaries[r])))
    if err > tol:
        raise ArithmeticError(f"teleportation expansion does not reconstruct input (error {err:.3e})")
    branches = []
    for i, c in enumerate(coeffs):
        p = float(np.vdot(c, c).real)
        branches.append(Branch(i, p, PureState(c / np.sqrt(p)) if p > 0 else None))
    return BranchTable(d, r, tuple(branches), err)


def branch_expansion(psi, basis: MesBasis, r: int) -> np.ndarray:
    """Right-hand side ``(1/d) sum_i |Psi_i>_CA (x) U_r^T U_i^dagger |psi>_B``."""
    v = as_vector(psi)
    d = basis.dim
    ur_t = basis.unitaries[r].data.T
    out = np.zeros((d, d, d), dtype=np.complex128)
    for u in basis.unitaries:
        bob = ur_t @ u.data.conj().T @ v
        out += np.einsum("ca,b->cab", u.data / np.sqrt(d), bob) / d
    return out


def sample_measurement(table: BranchTable, seed: int) -> int:
    """Draw Alice's outcome from the branch probabilities (seeded)."""
    return int(sample_outcomes(table, 1, seed)[0])


def sample_outcomes(table: BranchTable, shots: int, seed: int) -> np.ndarray:
    p = table.probabilities
    p = p / p.sum()
    rng = np.random.default_rng(seed)
    return rng.choice(len(p), size=shots, p=p)


def outcome_histogram(outcomes: Sequence[int], n: int) -> list[int]:
    return np.bincount(np.asarray(outcomes, dtype=int), minlength=n).tolist()


__all__ = [
    "Branch",
    "BranchTable",
    "MesBasis",
    "expand_teleport",
    "branch_expansion",
    "mes_state",
    "outcome_histogram",
    "sample_measurement",
    "sample_outcomes",
    "teleport_coefficients",
    "tripartite_state",
]
