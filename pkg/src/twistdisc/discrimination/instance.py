"""Discrimination instances, certificates and their independent checks."""

from __future__ import annotations

import enum
from dataclasses import dataclass, field

import numpy as np

from ..linalg import (
    NUMERIC_TOL,
    DimensionMismatch,
    PureState,
    UnitaryMatrix,
    as_matrix,
    as_vector,
    gram,
    hs_inner,
)

ORTHO_TOL = 1e-10
FAMILIES = ("gbs", "lattice", "tensor", "generic")


class Verdict(str, enum.Enum):
    YES = "YES"
    NO = "NO"
    UNKNOWN = "UNKNOWN"


class ProofTag(str, enum.Enum):
    PROP1_TENSOR = "prop1_tensor"
    PROP2_PRODUCT = "prop2_product"
    QUBIT_PRIME = "appendixA_claim2"
    BLOCH_QUBIT = "bloch_qubit"
    NUMERIC = "numeric"
    EXHAUSTIVE_SMALL = "exhaustive_small"


NO_TAGS = frozenset({ProofTag.BLOCH_QUBIT, ProofTag.EXHAUSTIVE_SMALL})


@dataclass(frozen=True, eq=False)
class DiscriminationInstance:
    """A set of ``l`` unitaries whose distinguishability is in question.

    By default the members must be pairwise orthogonal under ``hs_inner``,
    as they are when drawn from an orthogonal basis. Pass ``strict=False``
    for sets such as two overlapping permutations.
    """

    unitaries: tuple
    labels: tuple | None = None
    family: str = "generic"
    strict: bool = field(default=True, repr=False)

    def __post_init__(self):
        us = tuple(u if isinstance(u, UnitaryMatrix) else UnitaryMatrix.checked(u)
                   for u in self.unitaries)
        object.__setattr__(self, "unitaries", us)
        if self.labels is not None:
            object.__setattr__(self, "labels", tuple(self.labels))
            if len(self.labels) != len(us):
                raise ValueError("labels and unitaries differ in length")
        if self.family not in FAMILIES:
            raise ValueError(f"family must be one of {FAMILIES}, got {self.family!r}")
        if not us:
            raise ValueError("instance needs at least one unitary")
        d = us[0].dim
        if any(u.dim != d for u in us):
            raise DimensionMismatch("all unitaries in an instance must share one dimension")
        if not 2 <= len(us) <= d * d:
            raise ValueError(f"instance size must lie in [2, {d * d}], got {len(us)}")
        if self.strict:
            g = gram(us)
            err = float(np.max(np.abs(g - np.eye(len(us)))))
            if err > ORTHO_TOL:
                raise ValueError(f"instance members are not pairwise orthogonal (error {err:.3e})")

    @property
    def dim(self) -> int:
        return self.unitaries[0].dim

    def __len__(self) -> int:
        return len(self.unitaries)

    def stack(self) -> np.ndarray:
        return np.array([u.data for u in self.unitaries])

    def subset(self, indices) -> "DiscriminationInstance":
        idx = list(indices)
        labels = None if self.labels is None else tuple(self.labels[i] for i in idx)
        return DiscriminationInstance(tuple(self.unitaries[i] for i in idx), labels,
                                      self.family, self.strict)


@dataclass(frozen=True, eq=False)
class Certificate:
    """Outcome of a distinguishability decision.

    YES carries a witness ``alpha`` and its verified residual; NO carries a
    proof tag from :data:`NO_TAGS`; UNKNOWN carries solver diagnostics.
    """

    verdict: Verdict
    proof_tag: ProofTag | None = None
    alpha: PureState | None = None
    residual: float | None = None
    diagnostics: dict = field(default_factory=dict)

    def __post_init__(self):
        v = Verdict(self.verdict)
        object.__setattr__(self, "verdict", v)
        if self.proof_tag is not None:
            object.__setattr__(self, "proof_tag", ProofTag(self.proof_tag))
        if v is Verdict.YES:
            if self.alpha is None or self.residual is None:
                raise ValueError("a YES certificate needs alpha and residual")
            if not self.residual < NUMERIC_TOL:
                raise ValueError(f"YES residual {self.residual:.3e} exceeds {NUMERIC_TOL}")
        elif self.alpha is not None:
            raise ValueError("only YES certificates carry alpha")
        if v is Verdict.NO and self.proof_tag not in NO_TAGS:
            raise ValueError(f"a NO verdict needs a proof tag in {sorted(t.value for t in NO_TAGS)}")

    @property
    def is_yes(self) -> bool:
        return self.verdict is Verdict.YES

    def to_dict(self) -> dict:
        from ..serialize import vector_to_json

        return {
            "verdict": self.verdict.value,
            "proof_tag": None if self.proof_tag is None else self.proof_tag.value,
            "alpha": None if self.alpha is None else vector_to_json(self.alpha),
            "residual": self.residual,
            "diagnostics": self.diagnostics,
        }


def pair_overlaps(unitaries, alpha) -> np.ndarray:
    """Matrix of ``<alpha| U_i^dagger U_j |alpha>``."""
    a = as_vector(alpha)
    vecs = np.array([as_matrix(u) @ a for u in unitaries])
    return vecs.conj() @ vecs.T


def verify_certificate(inst: DiscriminationInstance, alpha) -> float:
    """``max_{i != j} |<alpha| U_i^dagger U_j |alpha>|``."""
    a = as_vector(alpha)
    if a.shape[0] != inst.dim:
        raise DimensionMismatch(f"alpha has dim {a.shape[0]}, instance has dim {inst.dim}")
    n = np.linalg.norm(a)
    if abs(n - 1) > 1e-12:
        raise ValueError(f"alpha must be a unit vector (norm {n!r})")
    g = np.abs(pair_overlaps(inst.unitaries, a))
    np.fill_diagonal(g, 0.0)
    return float(g.max())


@dataclass(frozen=True, eq=False)
class DifferenceSet:
    """Products ``U_i^dagger U_j`` (``i != j``), one per unimodular-scalar class."""

    elements: tuple
    source: DiscriminationInstance
    pairs: tuple = ()

    def __len__(self) -> int:
        return len(self.elements)


def same_up_to_phase(a, b, tol: float = ORTHO_TOL) -> bool:
    return abs(abs(hs_inner(a, b)) - 1.0) <= tol


def dedupe_up_to_phase(mats, tol: float = ORTHO_TOL) -> list[int]:
    """Indices of the first member of each unimodular-scalar class."""
    keep: list[int] = []
    reps: list[np.ndarray] = []
    for k, m in enumerate(mats):
        m = as_matrix(m)
        if not any(same_up_to_phase(r, m, tol) for r in reps):
            keep.append(k)
            reps.append(m)
    return keep


def difference_set(inst: DiscriminationInstance) -> DifferenceSet:
    pairs = [(i, j) for i in range(len(inst)) for j in range(len(inst)) if i != j]
    prods = [inst.unitaries[i].H @ inst.unitaries[j] for i, j in pairs]
    keep = dedupe_up_to_phase(prods)
    return DifferenceSet(tuple(prods[k] for k in keep), inst, tuple(pairs[k] for k in keep))


def transpose_dual(inst: DiscriminationInstance) -> DiscriminationInstance:
    """Replace every member by its transpose; witnesses map by complex conjugation."""
    return DiscriminationInstance(tuple(u.T for u in inst.unitaries), inst.labels,
                                  inst.family, inst.strict)


def dual_certificate(cert: Certificate, inst: DiscriminationInstance | None = None) -> Certificate:
    """Carry a certificate across :func:`transpose_dual` (``alpha -> conj(alpha)``)."""
    if not cert.is_yes:
        return cert
    alpha = cert.alpha.conj()
    residual = cert.residual if inst is None else verify_certificate(transpose_dual(inst), alpha)
    return Certificate(cert.verdict, cert.proof_tag, alpha, residual,
                       {**cert.diagnostics, "transposed": not cert.diagnostics.get("transposed", False)})
