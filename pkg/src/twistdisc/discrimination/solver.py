"""Decision pipeline: structural constructions, qubit oracles, numeric search.

The numeric stage minimises

    f(alpha) = sum_k |<alpha| M_k |alpha>|^2

over unit vectors, where ``M_k`` runs over ``U_i^dagger U_j`` for ``i < j``.
It can only ever answer YES or UNKNOWN.
"""

from __future__ import annotations

import itertools
import logging
from dataclasses import dataclass

import numpy as np
from scipy.optimize import least_squares

from ..linalg import NUMERIC_TOL, PureState, as_matrix
from ..operators import LatticeLabel, _prime_power_unitary, is_prime, lattice_unitary
from .constructions import qubit_prime_witness_for, tensor_witness_vector
from .instance import (
    Certificate,
    DiscriminationInstance,
    ProofTag,
    Verdict,
    difference_set,
    verify_certificate,
)
from .qubit import bloch_directions_span, grid_lower_bound

log = logging.getLogger(__name__)

ACCEPT_OBJECTIVE = 1e-18
DEFAULT_RESTARTS = 64


# ---------------------------------------------------------------------------
# objective and gradient
# ---------------------------------------------------------------------------

def pair_operators(unitaries) -> np.ndarray:
    """Stack of ``U_i^dagger U_j`` for ``i < j``."""
    mats = [as_matrix(u) for u in unitaries]
    ops = [mats[i].conj().T @ mats[j] for i, j in itertools.combinations(range(len(mats)), 2)]
    if not ops:
        return np.zeros((0, mats[0].shape[0], mats[0].shape[0]), dtype=np.complex128)
    return np.array(ops)


def expectations(alpha, ops: np.ndarray) -> np.ndarray:
    a = np.asarray(alpha, dtype=np.complex128)
    return np.einsum("i,kij,j->k", a.conj(), ops, a)


def objective(alpha, ops: np.ndarray) -> float:
    """``sum_k |<alpha|M_k|alpha>|^2`` (not normalised by ``|alpha|``)."""
    g = expectations(alpha, ops)
    return float(np.vdot(g, g).real)


def _to_complex(x: np.ndarray) -> np.ndarray:
    d = x.shape[0] // 2
    return x[:d] + 1j * x[d:]


def _expectation_jacobian(a: np.ndarray, ops: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Derivatives of ``g_k = <a|M_k|a>`` w.r.t. ``Re a`` and ``Im a``."""
    ma = ops @ a
    mta = np.einsum("kij,i->kj", ops, a.conj())   # M_k^T conj(a)
    return ma + mta, 1j * (mta - ma)


def gradient(alpha, ops: np.ndarray) -> np.ndarray:
    """Gradient of :func:`objective` in real coordinates ``[Re alpha, Im alpha]``."""
    a = np.asarray(alpha, dtype=np.complex128)
    g = expectations(a, ops)
    d_re, d_im = _expectation_jacobian(a, ops)
    # d|g|^2 = 2 Re(conj(g) dg)
    return 2 * np.concatenate([(g.conj() @ d_re).real, (g.conj() @ d_im).real])


def _residuals(x: np.ndarray, ops: np.ndarray) -> np.ndarray:
    a = _to_complex(x)
    g = expectations(a, ops)
    return np.concatenate([g.real, g.imag, [np.vdot(a, a).real - 1.0]])


def _residual_jacobian(x: np.ndarray, ops: np.ndarray) -> np.ndarray:
    a = _to_complex(x)
    d_re, d_im = _expectation_jacobian(a, ops)
    top = np.concatenate([d_re.real, d_im.real], axis=1)
    mid = np.concatenate([d_re.imag, d_im.imag], axis=1)
    return np.vstack([top, mid, 2 * x[None, :]])


@dataclass
class SearchResult:
    alpha: np.ndarray | None
    best_objective: float
    best_alpha: np.ndarray
    restarts_used: int
    success: bool


def random_unit_vector(rng: np.random.Generator, d: int) -> np.ndarray:
    v = rng.standard_normal(d) + 1j * rng.standard_normal(d)
    return v / np.linalg.norm(v)


def local_descent(a0: np.ndarray, ops: np.ndarray) -> np.ndarray:
    """Gauss-Newton style descent from ``a0``; returns a unit vector."""
    x0 = np.concatenate([a0.real, a0.imag])
    sol = least_squares(_residuals, x0, jac=_residual_jacobian, args=(ops,), method="trf",
                        xtol=1e-15, ftol=1e-15, gtol=1e-15, max_nfev=200)
    a = _to_complex(sol.x)
    return a / np.linalg.norm(a)


def numeric_search(ops, dim: int, restarts: int = DEFAULT_RESTARTS, seed: int = 0,
                   stop_on_success: bool = True) -> SearchResult:
    """Seeded multi-start search for ``alpha`` with ``f(alpha) < 1e-18``.

    Restarts run in order; the first success (lowest restart index) wins.
    """
    if restarts <= 0:
        raise ValueError("restart budget must be positive")
    ops = np.asarray(ops, dtype=np.complex128).reshape(-1, dim, dim)
    rng = np.random.default_rng(seed)
    best_f, best_a, found = np.inf, None, None
    used = 0
    for k in range(restarts):
        used = k + 1
        a = random_unit_vector(rng, dim)
        if len(ops):
            a = local_descent(a, ops)
        f = objective(a, ops)
        if f < best_f:
            best_f, best_a = f, a
        if f < ACCEPT_OBJECTIVE and found is None:
            found = a
            if stop_on_success:
                break
    return SearchResult(found, float(best_f), best_a, used, found is not None)


# ---------------------------------------------------------------------------
# constraint-set solving (used for factors of product instances)
# ---------------------------------------------------------------------------

def _solve_constraints(ops: list, dim: int, budget: int, seed: int) -> np.ndarray | None:
    """Unit ``alpha`` annihilating every ``<alpha|M|alpha>``, or ``None``."""
    if not ops:
        out = np.zeros(dim, dtype=np.complex128)
        out[0] = 1.0
        return out
    if dim == 2 and bloch_directions_span(ops) == 3:
        return None
    res = numeric_search(np.array(ops), dim, budget, seed)
    return res.alpha


# ---------------------------------------------------------------------------
# structural dispatch
# ---------------------------------------------------------------------------

@dataclass
class _Split:
    """Each member written as ``A_i (x) B_i`` with group ids for equal factors."""

    a: list
    b: list
    a_key: list
    b_key: list
    d1: int
    d2: int
    rest_labels: list | None
    factorization: tuple | None


def _group_keys(mats) -> list[int]:
    reps: list[np.ndarray] = []
    keys = []
    for m in mats:
        for k, r in enumerate(reps):
            if np.max(np.abs(r - m)) <= 1e-12:
                keys.append(k)
                break
        else:
            keys.append(len(reps))
            reps.append(m)
    return keys


def _split(inst: DiscriminationInstance) -> _Split | None:
    if inst.labels is None:
        return None
    if inst.family == "lattice" and all(isinstance(lb, LatticeLabel) for lb in inst.labels):
        fac = inst.labels[0].factorization
        if len(fac) < 2:
            return None
        a, b, rest = [], [], []
        for lb in inst.labels:
            p, _, sv, tv = lb.factor(0)
            a.append(_prime_power_unitary(p, sv, tv))
            rl = LatticeLabel(fac[1:], lb.s[1:], lb.t[1:])
            rest.append(rl)
            b.append(lattice_unitary(rl).data)
        q1 = fac[0][0] ** fac[0][1]
        return _Split(a, b, _group_keys(a), _group_keys(b), q1, inst.dim // q1, rest, fac)
    if inst.family == "tensor" and all(isinstance(lb, tuple) and len(lb) >= 2 for lb in inst.labels):
        try:
            a = [as_matrix(lb[0]) for lb in inst.labels]
            b = [np.array(as_matrix(lb[1])) for lb in inst.labels]
            for k, lb in enumerate(inst.labels):
                for f in lb[2:]:
                    b[k] = np.kron(b[k], as_matrix(f))
        except (TypeError, ValueError):
            return None
        if any(np.max(np.abs(np.kron(x, y) - u.data)) > 1e-12
               for x, y, u in zip(a, b, inst.unitaries)):
            return None
        return _Split(a, b, _group_keys(a), _group_keys(b), a[0].shape[0], b[0].shape[0], None, None)
    return None


def _yes(inst, alpha, tag, **diag) -> Certificate | None:
    alpha = PureState.normalized(alpha)
    res = verify_certificate(inst, alpha)
    if res >= NUMERIC_TOL:
        log.debug("construction %s failed verification (residual %.3e)", tag, res)
        return None
    return Certificate(Verdict.YES, tag, alpha, res, diag)


def _try_tensor(inst, sp: _Split) -> Certificate | None:
    if len(set(sp.b_key)) != 1 or sp.d1 > sp.d2:
        return None
    return _yes(inst, tensor_witness_vector(sp.d1, sp.d2).amplitudes, ProofTag.PROP1_TENSOR,
                route="tensor")


def _try_qubit_prime(inst, sp: _Split) -> Certificate | None:
    fac = sp.factorization
    if fac is None or len(fac) != 2 or fac[0] != (2, 1) or fac[1][1] != 1:
        return None
    p = fac[1][0]
    if p < 7 or not is_prime(p) or len(set(sp.b_key)) != 2:
        return None
    first = {}
    for key, lb in zip(sp.b_key, sp.rest_labels):
        first.setdefault(key, lb)
    l0, l1 = first.values()
    a = (l1.s[0][0] - l0.s[0][0]) % p
    b = (l1.t[0][0] - l0.t[0][0]) % p
    alpha = qubit_prime_witness_for(p, a, b)
    return _yes(inst, alpha.amplitudes, ProofTag.QUBIT_PRIME, route="qubit_prime", p=p)


def _distinct(mats, keys):
    seen = {}
    for m, k in zip(mats, keys):
        seen.setdefault(k, m)
    return list(seen.values())


def _factor_alpha(mats, keys, labels, family, dim, budget, seed) -> np.ndarray | None:
    """Vector making the distinct members of one factor pairwise orthogonal."""
    distinct = _distinct(mats, keys)
    if len(distinct) == 1:
        out = np.zeros(dim, dtype=np.complex128)
        out[0] = 1.0
        return out
    if labels is not None:
        sub_labels = list({k: lb for k, lb in zip(keys, labels)}.values())
        sub = DiscriminationInstance(tuple(distinct), tuple(sub_labels), family, strict=False)
    else:
        sub = DiscriminationInstance(tuple(distinct), strict=False)
    cert = solve(sub, budget, seed)
    return cert.alpha.amplitudes if cert.is_yes else None


def _try_product(inst, sp: _Split, budget: int, seed: int) -> Certificate | None:
    n = len(inst)
    pairs = list(itertools.combinations(range(n), 2))
    rest_family = "lattice" if sp.rest_labels is not None else "generic"
    # first factor handles pairs sharing the second factor, and vice versa
    ops1 = [sp.a[i].conj().T @ sp.a[j] for i, j in pairs if sp.b_key[i] == sp.b_key[j]]
    a1 = _solve_constraints(ops1, sp.d1, budget, seed)
    if a1 is not None:
        a2 = _factor_alpha(sp.b, sp.b_key, sp.rest_labels, rest_family, sp.d2, budget, seed + 1)
        if a2 is not None:
            cert = _yes(inst, np.kron(a1, a2), ProofTag.PROP2_PRODUCT, route="product_first")
            if cert is not None:
                return cert
    ops2 = [sp.b[i].conj().T @ sp.b[j] for i, j in pairs if sp.a_key[i] == sp.a_key[j]]
    a2 = _solve_constraints(ops2, sp.d2, budget, seed + 2)
    if a2 is not None:
        a1 = _factor_alpha(sp.a, sp.a_key, None, "generic", sp.d1, budget, seed + 3)
        if a1 is not None:
            return _yes(inst, np.kron(a1, a2), ProofTag.PROP2_PRODUCT, route="product_second")
    return None


def bloch_infeasible(inst: DiscriminationInstance) -> Certificate | None:
    """NO certificate when qubit constraints cover three independent Pauli axes.

    A unit Bloch vector cannot be orthogonal to three independent directions.
    Returns ``None`` when the oracle does not apply.
    """
    if inst.dim != 2:
        return None
    delta = difference_set(inst)
    rank = bloch_directions_span(delta.elements)
    if rank < 3:
        return None
    return Certificate(Verdict.NO, ProofTag.BLOCH_QUBIT, diagnostics={"bloch_rank": rank})


def exhaustive_small(inst: DiscriminationInstance, step: float = 0.02) -> Certificate | None:
    """Grid proof of infeasibility for qubit instances, or ``None``."""
    if inst.dim != 2 or len(inst) > 3:
        return None
    ops = pair_operators(inst.unitaries)
    grid_min, slack = grid_lower_bound(ops, step)
    if grid_min > slack + 1e-12:
        return Certificate(Verdict.NO, ProofTag.EXHAUSTIVE_SMALL,
                           diagnostics={"grid_min": grid_min, "lipschitz_slack": slack,
                                        "grid_step": step})
    return None


def solve(inst: DiscriminationInstance, budget: int = DEFAULT_RESTARTS, seed: int = 0) -> Certificate:
    """Decide distinguishability of ``inst``.

    Order: tensor construction, qubit-prime construction, product split,
    Bloch oracle, numeric search, qubit grid proof. Anything unresolved is
    UNKNOWN.
    """
    if budget <= 0:
        raise ValueError("restart budget must be positive")
    sp = _split(inst)
    if sp is not None:
        for attempt in (_try_tensor, _try_qubit_prime):
            cert = attempt(inst, sp)
            if cert is not None:
                return cert
        cert = _try_product(inst, sp, budget, seed)
        if cert is not None:
            return cert
    cert = bloch_infeasible(inst)
    if cert is not None:
        return cert
    ops = pair_operators(inst.unitaries)
    res = numeric_search(ops, inst.dim, budget, seed)
    if res.success:
        cert = _yes(inst, res.alpha, ProofTag.NUMERIC, restarts=res.restarts_used,
                    best_objective=res.best_objective)
        if cert is not None:
            return cert
    cert = exhaustive_small(inst)
    if cert is not None:
        return cert
    return Certificate(Verdict.UNKNOWN, diagnostics={
        "restarts": res.restarts_used, "best_objective": res.best_objective})
