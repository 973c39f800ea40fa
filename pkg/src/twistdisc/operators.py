"""Weyl-Heisenberg operator families and the twist-commutativity check.

Index conventions
-----------------
* GBS label ``(m, n)`` at dimension ``d`` has flat index ``m*d + n`` and
  unitary ``X_d^m Z_d^n``.
* A lattice label holds one ``(s, t)`` pair of exponent vectors per prime-power
  factor of ``d``; factors are ordered by ascending ``p**r``. Within a factor
  the local index is ``digits(s) * p**r + digits(t)`` (base ``p``, first entry
  most significant) and factors combine mixed-radix, first factor slowest.
  For prime ``d`` this coincides with the GBS index.
"""

from __future__ import annotations

import itertools
import re
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .linalg import UnitaryMatrix, as_matrix, gram, tensor

TWIST_TOL = 1e-10


class NonOrthogonalBasis(ValueError):
    """Raised when a supposed orthogonal unitary basis is not orthogonal."""


def roots_of_unity(d: int) -> np.ndarray:
    return np.exp(2j * np.pi * np.arange(d) / d)


def _check_dim(d: int) -> None:
    if int(d) != d or d < 2:
        raise ValueError(f"dimension must be an integer >= 2, got {d!r}")


def _weyl(d: int, m: int, n: int) -> np.ndarray:
    # X^m Z^n |k> = w^(n k) |k + m>
    w = roots_of_unity(d)
    k = np.arange(d)
    out = np.zeros((d, d), dtype=np.complex128)
    out[(k + m) % d, k] = w[(n * k) % d]
    return out


def build_shift(d: int) -> UnitaryMatrix:
    """``X_d = sum_i |i+1 mod d><i|``."""
    _check_dim(d)
    return UnitaryMatrix(_weyl(d, 1, 0), verified=True)


def build_clock(d: int) -> UnitaryMatrix:
    """``Z_d = diag(1, w, ..., w^(d-1))`` with ``w = exp(2 pi i / d)``."""
    _check_dim(d)
    return UnitaryMatrix(_weyl(d, 0, 1), verified=True)


def factorize(d: int) -> tuple[tuple[int, int], ...]:
    """Prime factorization ``((p, r), ...)`` sorted by ascending ``p**r``."""
    if int(d) != d or d < 1:
        raise ValueError(f"cannot factorize {d!r}")
    d = int(d)
    out = []
    p = 2
    while p * p <= d:
        r = 0
        while d % p == 0:
            d //= p
            r += 1
        if r:
            out.append((p, r))
        p += 1
    if d > 1:
        out.append((d, 1))
    return tuple(sorted(out, key=lambda pr: pr[0] ** pr[1]))


def is_prime(n: int) -> bool:
    return n >= 2 and factorize(n) == ((n, 1),)


def smallest_prime_power(d: int) -> int:
    p, r = factorize(d)[0]
    return p**r


@dataclass(frozen=True)
class GbsLabel:
    m: int
    n: int
    d: int

    def __post_init__(self):
        _check_dim(self.d)
        if not (0 <= self.m < self.d and 0 <= self.n < self.d):
            raise ValueError(f"GBS label ({self.m},{self.n}) out of range for d={self.d}")

    @property
    def index(self) -> int:
        return self.m * self.d + self.n

    @classmethod
    def from_index(cls, d: int, index: int) -> "GbsLabel":
        return cls(*divmod(index, d), d)

    @classmethod
    def parse(cls, text: str, d: int) -> "GbsLabel":
        m = re.fullmatch(r"\s*\(\s*(-?\d+)\s*,\s*(-?\d+)\s*\)\s*", text)
        if not m:
            raise ValueError(f"malformed GBS label {text!r}; expected '(m,n)'")
        return cls(int(m.group(1)), int(m.group(2)), d)

    def __str__(self) -> str:
        return f"({self.m},{self.n})"


def _digits(vec, p: int) -> int:
    out = 0
    for x in vec:
        out = out * p + x
    return out


def _undigits(value: int, p: int, r: int) -> tuple[int, ...]:
    out = []
    for _ in range(r):
        value, x = divmod(value, p)
        out.append(x)
    return tuple(reversed(out))


@dataclass(frozen=True)
class LatticeLabel:
    """Exponent vectors ``(s, t)`` over the prime-power factors of ``d``."""

    factorization: tuple[tuple[int, int], ...]
    s: tuple[tuple[int, ...], ...]
    t: tuple[tuple[int, ...], ...]

    def __post_init__(self):
        fac = tuple((int(p), int(r)) for p, r in self.factorization)
        s = tuple(tuple(int(x) for x in v) for v in self.s)
        t = tuple(tuple(int(x) for x in v) for v in self.t)
        object.__setattr__(self, "factorization", fac)
        object.__setattr__(self, "s", s)
        object.__setattr__(self, "t", t)
        if fac != factorize(self.dim):
            raise ValueError(f"{fac} is not the sorted prime factorization of {self.dim}")
        if len(s) != len(fac) or len(t) != len(fac):
            raise ValueError("s and t need one exponent vector per factor")
        for (p, r), sv, tv in zip(fac, s, t):
            if len(sv) != r or len(tv) != r:
                raise ValueError(f"factor {p}^{r} needs exponent vectors of length {r}")
            if any(not 0 <= x < p for x in sv + tv):
                raise ValueError(f"exponents for factor {p}^{r} must lie in [0, {p})")

    @property
    def dim(self) -> int:
        return int(np.prod([p**r for p, r in self.factorization]))

    @property
    def local_indices(self) -> tuple[int, ...]:
        return tuple(
            _digits(sv, p) * p**r + _digits(tv, p)
            for (p, r), sv, tv in zip(self.factorization, self.s, self.t)
        )

    @property
    def index(self) -> int:
        out = 0
        for (p, r), k in zip(self.factorization, self.local_indices):
            out = out * p ** (2 * r) + k
        return out

    @classmethod
    def from_index(cls, d: int, index: int) -> "LatticeLabel":
        fac = factorize(d)
        if not 0 <= index < d * d:
            raise IndexError(f"lattice index {index} out of range for d={d}")
        locals_ = []
        for p, r in reversed(fac):
            index, k = divmod(index, p ** (2 * r))
            locals_.append(k)
        locals_.reverse()
        s, t = [], []
        for (p, r), k in zip(fac, locals_):
            hi, lo = divmod(k, p**r)
            s.append(_undigits(hi, p, r))
            t.append(_undigits(lo, p, r))
        return cls(fac, tuple(s), tuple(t))

    def factor(self, j: int) -> tuple[int, int, tuple[int, ...], tuple[int, ...]]:
        p, r = self.factorization[j]
        return p, r, self.s[j], self.t[j]

    @classmethod
    def parse(cls, text: str) -> "LatticeLabel":
        """Parse ``"p^r:[s...]/[t...]*p^r:[...]/[...]"``."""
        segs = [seg.strip() for seg in text.split("*")]
        pat = re.compile(r"(\d+)\^(\d+):\[([\d,\s]*)\]/\[([\d,\s]*)\]")
        fac, s, t = [], [], []
        for seg in segs:
            m = pat.fullmatch(seg)
            if not m:
                raise ValueError(f"malformed lattice segment {seg!r}; expected 'p^r:[s...]/[t...]'")
            fac.append((int(m.group(1)), int(m.group(2))))
            s.append(tuple(int(x) for x in m.group(3).split(",") if x.strip()))
            t.append(tuple(int(x) for x in m.group(4).split(",") if x.strip()))
        order = sorted(range(len(fac)), key=lambda j: fac[j][0] ** fac[j][1])
        return cls(
            tuple(fac[j] for j in order), tuple(s[j] for j in order), tuple(t[j] for j in order)
        )

    def __str__(self) -> str:
        return "*".join(
            f"{p}^{r}:[{','.join(map(str, sv))}]/[{','.join(map(str, tv))}]"
            for (p, r), sv, tv in zip(self.factorization, self.s, self.t)
        )


def gbs_unitary(label: GbsLabel) -> UnitaryMatrix:
    """``X_d^m Z_d^n``."""
    return UnitaryMatrix(_weyl(label.d, label.m, label.n), verified=True)


def _prime_power_unitary(p: int, sv, tv) -> np.ndarray:
    xs = tensor(*[_weyl(p, x, 0) for x in sv])
    zs = tensor(*[_weyl(p, 0, x) for x in tv])
    return xs @ zs


def lattice_unitary(label: LatticeLabel, dim: int | None = None) -> UnitaryMatrix:
    """Tensor product over factors of ``(X^s1 (x) ... ) (Z^t1 (x) ...)``."""
    if dim is not None and dim != label.dim:
        raise ValueError(f"label factorization multiplies to {label.dim}, not {dim}")
    parts = [_prime_power_unitary(p, sv, tv) for (p, _), sv, tv in
             zip(label.factorization, label.s, label.t)]
    return UnitaryMatrix(tensor(*parts), verified=True)


@lru_cache(maxsize=64)
def _gbs_basis(d: int):
    labels = [GbsLabel.from_index(d, i) for i in range(d * d)]
    return tuple(gbs_unitary(lb) for lb in labels), tuple(labels)


@lru_cache(maxsize=64)
def _lattice_basis(d: int):
    labels = [LatticeLabel.from_index(d, i) for i in range(d * d)]
    return tuple(lattice_unitary(lb) for lb in labels), tuple(labels)


def gbs_basis(d: int) -> tuple[list[UnitaryMatrix], list[GbsLabel]]:
    """All ``d**2`` generalized Bell unitaries in flat-index order."""
    _check_dim(d)
    us, labels = _gbs_basis(int(d))
    return list(us), list(labels)


def lattice_basis(d: int) -> tuple[list[UnitaryMatrix], list[LatticeLabel]]:
    """All ``d**2`` qudit lattice unitaries in flat-index order."""
    _check_dim(d)
    us, labels = _lattice_basis(int(d))
    return list(us), list(labels)


def gbs_twist_phase(a: GbsLabel, b: GbsLabel) -> complex:
    """Closed-form scalar ``w`` with ``U_a U_b^T = w U_b^T U_a`` for GBS unitaries."""
    # U_b^T is proportional to X^(-m') Z^(n'); Weyl operators W(a1,b1), W(c,e)
    # satisfy W(a1,b1) W(c,e) = w^(b1 c - a1 e) W(c,e) W(a1,b1).
    d = a.d
    return complex(roots_of_unity(d)[(-(a.n * b.m) - a.m * b.n) % d])


@dataclass(frozen=True, eq=False)
class TwistPhaseTable:
    """Scalars ``w(i, j)`` with ``U_i U_j^T = w(i, j) U_j^T U_i``.

    ``phases[i, j]`` is the best-fit scalar even for failing pairs;
    ``defects[i, j]`` is the entrywise max of ``U_i U_j^T - w U_j^T U_i``.
    """

    phases: np.ndarray
    defects: np.ndarray
    is_twist: bool

    @property
    def size(self) -> int:
        return self.phases.shape[0]

    def failing_pairs(self, tol: float = TWIST_TOL) -> list[tuple[int, int]]:
        bad = (self.defects > tol) | (np.abs(np.abs(self.phases) - 1) > tol)
        return [tuple(map(int, ij)) for ij in np.argwhere(bad)]

    def summary(self) -> dict:
        return {
            "size": self.size,
            "is_twist": self.is_twist,
            "max_defect": float(self.defects.max(initial=0.0)),
            "max_modulus_error": float(np.abs(np.abs(self.phases) - 1).max(initial=0.0)),
            "failing_pairs": len(self.failing_pairs()),
        }


def check_orthogonal(unitaries, tol: float = TWIST_TOL) -> float:
    """Return the max off-identity entry of the Gram matrix; raise if above ``tol``."""
    g = gram(unitaries)
    err = float(np.max(np.abs(g - np.eye(len(g)))))
    if err > tol:
        raise NonOrthogonalBasis(f"basis is not orthonormal under hs_inner (max error {err:.3e})")
    return err


def twist_table(basis, tol: float = TWIST_TOL) -> TwistPhaseTable:
    """Test ``U_i U_j^T = w(i,j) U_j^T U_i`` with ``|w| = 1`` for every pair."""
    mats = np.array([as_matrix(u) for u in basis])
    if mats.ndim != 3 or mats.shape[1] != mats.shape[2]:
        raise ValueError("basis must be a list of square matrices of one dimension")
    check_orthogonal(mats, tol)
    n, d = mats.shape[0], mats.shape[1]
    trans = mats.transpose(0, 2, 1)
    phases = np.empty((n, n), dtype=np.complex128)
    defects = np.empty((n, n))
    for i in range(n):
        lhs = mats[i] @ trans
        rhs = trans @ mats[i]
        w = np.einsum("kab,kab->k", rhs.conj(), lhs) / d
        phases[i] = w
        defects[i] = np.max(np.abs(lhs - w[:, None, None] * rhs), axis=(1, 2))
    ok = bool(np.all(defects <= tol) and np.all(np.abs(np.abs(phases) - 1) <= tol))
    phases.setflags(write=False)
    defects.setflags(write=False)
    return TwistPhaseTable(phases, defects, ok)


def tensor_basis(bases) -> list[UnitaryMatrix]:
    """All tensor products ``U1 (x) U2 (x) ...`` in lexicographic factor order."""
    bases = list(bases)
    if not bases:
        raise ValueError("tensor_basis needs at least one factor basis")
    if len(bases) == 1:
        return list(bases[0])
    return [tensor(*combo) for combo in itertools.product(*bases)]
