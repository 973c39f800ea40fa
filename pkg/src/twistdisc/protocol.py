"""One-way LOCC discrimination through twist teleportation.

Alice prepares a witness ``alpha`` on an ancilla, teleports it through the
unknown shared state ``|Psi_U>`` and announces her outcome ``i``. Bob then
holds ``U^T U_i^dagger |alpha>`` and measures in the basis
``{V^T U_i^dagger |alpha>}_{V in subset}``, which is orthonormal when
``{V^T |alpha>}`` is and the basis is twist commutative.

The witness must therefore certify the *transposed* subset; use
:func:`witness_for_protocol` to obtain one.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .discrimination import (
    Certificate,
    DiscriminationInstance,
    dual_certificate,
    solve,
    transpose_dual,
    verify_certificate,
)
from .linalg import NUMERIC_TOL, as_vector
from .teleport import MesBasis, expand_teleport, sample_measurement

TRANSPOSE_NOTE = "alpha certifies {U^T alpha}; obtained by conjugating a certificate for the subset"


class NotTwistCommutative(ValueError):
    """The basis fails the twist relation, so Bob's measurement is not guaranteed."""


@dataclass(frozen=True, eq=False)
class ProtocolRun:
    instance: DiscriminationInstance
    certificate: Certificate
    hidden_index: int
    resource_index: int
    alice_outcome: int
    bob_guess: int
    correct: bool
    overlaps: tuple
    measurement_error: float
    convention: str = TRANSPOSE_NOTE

    def to_dict(self) -> dict:
        return {
            "hidden_index": self.hidden_index,
            "resource_index": self.resource_index,
            "alice_outcome": self.alice_outcome,
            "bob_guess": self.bob_guess,
            "correct": self.correct,
            "overlaps": list(self.overlaps),
            "measurement_error": self.measurement_error,
            "convention": self.convention,
        }


def witness_for_protocol(subset: DiscriminationInstance, budget: int = 64, seed: int = 0) -> Certificate:
    """YES certificate for ``transpose_dual(subset)`` (or the non-YES verdict)."""
    cert = solve(subset, budget, seed)
    return dual_certificate(cert, subset) if cert.is_yes else cert


def bob_measurement(subset: DiscriminationInstance, outcome_unitary, alpha) -> np.ndarray:
    """Rows ``V^T U_i^dagger |alpha>`` for ``V`` in the subset."""
    a = as_vector(alpha)
    ui_dag = np.asarray(outcome_unitary).conj().T
    return np.array([v.data.T @ ui_dag @ a for v in subset.unitaries])


def _check_inputs(basis: MesBasis, subset: DiscriminationInstance, cert: Certificate):
    if not basis.is_twist:
        raise NotTwistCommutative("run_protocol needs a twist-commutative basis")
    if not cert.is_yes:
        raise ValueError(f"run_protocol needs a YES certificate, got {cert.verdict.value}")
    res = verify_certificate(transpose_dual(subset), cert.alpha)
    if res >= NUMERIC_TOL:
        raise ValueError(f"certificate does not make {{U^T alpha}} orthogonal (residual {res:.3e})")
    return [basis.index_of(u) for u in subset.unitaries]


def _bob_step(basis, subset, cert, hidden, resources, table, outcome) -> ProtocolRun:
    meas = bob_measurement(subset, basis.unitaries[outcome].data, cert.alpha)
    err = float(np.max(np.abs(meas.conj() @ meas.T - np.eye(len(meas)))))
    if err > NUMERIC_TOL:
        raise ArithmeticError(f"Bob's measurement vectors are not orthonormal (error {err:.3e})")
    bob = table.branches[outcome].bob_state.amplitudes
    overlaps = np.abs(meas.conj() @ bob) ** 2
    guess = int(np.argmax(overlaps))
    return ProtocolRun(subset, cert, hidden, resources[hidden], outcome, guess, guess == hidden,
                       tuple(float(x) for x in overlaps), err)


def run_protocol(basis: MesBasis, subset: DiscriminationInstance, cert: Certificate,
                 hidden: int, seed: int) -> ProtocolRun:
    """Simulate one round with a sampled Alice outcome."""
    resources = _check_inputs(basis, subset, cert)
    if not 0 <= hidden < len(subset):
        raise IndexError(f"hidden index {hidden} out of range")
    table = expand_teleport(cert.alpha, basis, resources[hidden])
    outcome = sample_measurement(table, seed)
    return _bob_step(basis, subset, cert, hidden, resources, table, outcome)


def enumerate_protocol(basis: MesBasis, subset: DiscriminationInstance, cert: Certificate) -> list[ProtocolRun]:
    """Every (hidden state, Alice outcome) branch, without sampling."""
    resources = _check_inputs(basis, subset, cert)
    runs = []
    for hidden in range(len(subset)):
        table = expand_teleport(cert.alpha, basis, resources[hidden])
        for outcome in range(len(basis)):
            runs.append(_bob_step(basis, subset, cert, hidden, resources, table, outcome))
    return runs
