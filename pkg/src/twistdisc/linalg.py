"""Dense complex linear algebra used throughout the package.

Matrices are plain ``numpy`` arrays of dtype ``complex128``. Two thin wrappers,
:class:`UnitaryMatrix` and :class:`PureState`, carry the extra invariants
(unitarity, unit norm) that the quantum constructions rely on.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

#: entrywise tolerance for analytic constructions
EXACT_TOL = 1e-12
#: tolerance for numerically found certificates
NUMERIC_TOL = 1e-9


class DimensionMismatch(ValueError):
    """Raised when operands have incompatible shapes."""


def _frozen(a: np.ndarray) -> np.ndarray:
    a = np.array(a, dtype=np.complex128, copy=True)
    a.setflags(write=False)
    return a


@dataclass(frozen=True, eq=False)
class UnitaryMatrix:
    """A square complex matrix, optionally checked for unitarity.

    ``verified`` is ``True`` only when ``U^dagger U = I`` was confirmed to
    within :data:`EXACT_TOL` (entrywise max) at construction time.
    """

    data: np.ndarray
    verified: bool = False

    def __post_init__(self):
        a = _frozen(self.data)
        if a.ndim != 2 or a.shape[0] != a.shape[1]:
            raise DimensionMismatch(f"unitary must be square, got shape {a.shape}")
        object.__setattr__(self, "data", a)

    @classmethod
    def checked(cls, data, tol: float = EXACT_TOL) -> "UnitaryMatrix":
        """Build and verify; raise ``ValueError`` if not unitary within ``tol``."""
        a = np.asarray(data, dtype=np.complex128)
        if a.ndim != 2 or a.shape[0] != a.shape[1]:
            raise DimensionMismatch(f"unitary must be square, got shape {a.shape}")
        err = np.max(np.abs(a.conj().T @ a - np.eye(a.shape[0])))
        if err > tol:
            raise ValueError(f"matrix is not unitary (max |U^dag U - I| = {err:.3e})")
        return cls(a, verified=True)

    @property
    def dim(self) -> int:
        return self.data.shape[0]

    @property
    def T(self) -> "UnitaryMatrix":
        return UnitaryMatrix(self.data.T, self.verified)

    @property
    def H(self) -> "UnitaryMatrix":
        return UnitaryMatrix(self.data.conj().T, self.verified)

    def conj(self) -> "UnitaryMatrix":
        return UnitaryMatrix(self.data.conj(), self.verified)

    def __matmul__(self, other):
        if isinstance(other, UnitaryMatrix):
            return UnitaryMatrix(self.data @ other.data, self.verified and other.verified)
        return self.data @ other

    def __array__(self, dtype=None, copy=None):
        return self.data if dtype is None else self.data.astype(dtype)

    def allclose(self, other, atol: float = EXACT_TOL) -> bool:
        return matrices_close(self.data, np.asarray(other), atol)

    def __repr__(self) -> str:
        return f"UnitaryMatrix(dim={self.dim}, verified={self.verified})"


@dataclass(frozen=True, eq=False)
class PureState:
    """Unit-norm amplitude vector."""

    amplitudes: np.ndarray = field()

    def __post_init__(self):
        a = _frozen(np.ravel(self.amplitudes))
        n = np.linalg.norm(a)
        if abs(n - 1.0) > EXACT_TOL:
            raise ValueError(f"state is not normalized (norm = {n!r})")
        object.__setattr__(self, "amplitudes", a)

    @classmethod
    def normalized(cls, amplitudes) -> "PureState":
        a = np.asarray(amplitudes, dtype=np.complex128).ravel()
        n = np.linalg.norm(a)
        if n == 0:
            raise ValueError("cannot normalize the zero vector")
        return cls(a / n)

    @classmethod
    def basis(cls, dim: int, index: int) -> "PureState":
        a = np.zeros(dim, dtype=np.complex128)
        a[index] = 1.0
        return cls(a)

    @property
    def dim(self) -> int:
        return self.amplitudes.shape[0]

    def conj(self) -> "PureState":
        return PureState(self.amplitudes.conj())

    def __array__(self, dtype=None, copy=None):
        return self.amplitudes if dtype is None else self.amplitudes.astype(dtype)

    def __repr__(self) -> str:
        return f"PureState(dim={self.dim})"


def as_matrix(m) -> np.ndarray:
    if isinstance(m, UnitaryMatrix):
        return m.data
    return np.asarray(m, dtype=np.complex128)


def as_vector(v) -> np.ndarray:
    if isinstance(v, PureState):
        return v.amplitudes
    return np.asarray(v, dtype=np.complex128).ravel()


def matrices_close(a, b, atol: float = EXACT_TOL) -> bool:
    """Entrywise comparison with an absolute tolerance; never bitwise."""
    a, b = as_matrix(a), as_matrix(b)
    return a.shape == b.shape and bool(np.max(np.abs(a - b), initial=0.0) <= atol)


def tensor(*factors):
    """Kronecker product, leftmost factor is the slowest index.

    Returns a :class:`UnitaryMatrix` when every factor is one, else an array.
    """
    if not factors:
        raise ValueError("tensor() needs at least one factor")
    out = as_matrix(factors[0])
    for f in factors[1:]:
        out = np.kron(out, as_matrix(f))
    if all(isinstance(f, UnitaryMatrix) for f in factors):
        return UnitaryMatrix(out, all(f.verified for f in factors))
    return out


def tensor_states(*states) -> PureState:
    out = as_vector(states[0])
    for s in states[1:]:
        out = np.kron(out, as_vector(s))
    return PureState.normalized(out)


def hs_inner(v, u) -> complex:
    """Normalized Hilbert-Schmidt inner product ``Tr(V^dagger U) / d``.

    With the 1/d factor this equals the overlap of the corresponding maximally
    entangled states exactly.
    """
    v, u = as_matrix(v), as_matrix(u)
    if v.shape != u.shape:
        raise DimensionMismatch(f"hs_inner: shapes {v.shape} and {u.shape} differ")
    return complex(np.vdot(v, u) / v.shape[0])


def gram(unitaries) -> np.ndarray:
    """Matrix of pairwise :func:`hs_inner` values."""
    stack = np.array([as_matrix(u) for u in unitaries])
    d = stack.shape[1]
    flat = stack.reshape(len(stack), -1)
    return flat.conj() @ flat.T / d


def apply(u, s) -> PureState:
    """Matrix-vector product returning a new :class:`PureState`."""
    m, v = as_matrix(u), as_vector(s)
    if m.shape[1] != v.shape[0]:
        raise DimensionMismatch(f"apply: matrix {m.shape} vs state of dim {v.shape[0]}")
    return PureState(m @ v)


def overlap_up_to_phase(a, b) -> float:
    """``|<a|b>|`` for unit vectors; equals 1 iff they agree up to a global phase."""
    return float(abs(np.vdot(as_vector(a), as_vector(b))))
