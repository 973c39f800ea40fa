"""Closed-form witnesses for structured instances.

Each constructor returns a vector ``alpha`` (or a YES :class:`Certificate`)
whose residual is re-checked with :func:`verify_certificate`.
"""

from __future__ import annotations

import itertools

import numpy as np

from ..linalg import NUMERIC_TOL, PureState, UnitaryMatrix, as_matrix, tensor
from ..operators import _weyl, is_prime, roots_of_unity
from .instance import (
    Certificate,
    DiscriminationInstance,
    ProofTag,
    Verdict,
    verify_certificate,
)


def tensor_witness_vector(d1: int, d2: int) -> PureState:
    """``(1/sqrt d1) sum_{i<d1} |i>|i>`` in ``C^{d1} (x) C^{d2}``."""
    if not 2 <= d1 <= d2:
        raise ValueError(f"need 2 <= d1 <= d2, got d1={d1}, d2={d2}")
    a = np.zeros(d1 * d2, dtype=np.complex128)
    a[np.arange(d1) * d2 + np.arange(d1)] = 1 / np.sqrt(d1)
    return PureState(a)


def construct_tensor_witness(factor_basis, v) -> Certificate:
    """Witness for ``{U_i (x) V}`` with ``{U_i}`` orthogonal in ``U(d1)``, ``d1 <= d2``.

    ``<alpha| (U_k^dag U_l (x) I) |alpha> = Tr(U_k^dag U_l) / d1 = 0`` for ``k != l``.
    """
    us = [as_matrix(u) for u in factor_basis]
    vm = as_matrix(v)
    d1, d2 = us[0].shape[0], vm.shape[0]
    if d1 > d2:
        raise ValueError(f"factor dimension {d1} exceeds the fixed factor's dimension {d2}")
    alpha = tensor_witness_vector(d1, d2)
    inst = DiscriminationInstance(tuple(UnitaryMatrix.checked(np.kron(u, vm)) for u in us),
                                  family="tensor")
    res = verify_certificate(inst, alpha)
    return Certificate(Verdict.YES, ProofTag.PROP1_TENSOR, alpha, res,
                       {"d1": d1, "d2": d2, "size": len(us)})


def product_instance(instances) -> DiscriminationInstance:
    """All tensor products ``U^(1) (x) U^(2) (x) ...`` with ``U^(j)`` from factor ``j``."""
    instances = list(instances)
    members = [tensor(*combo) for combo in itertools.product(*[i.unitaries for i in instances])]
    labels = None
    if all(i.labels is not None for i in instances):
        labels = tuple(itertools.product(*[i.labels for i in instances]))
    strict = all(i.strict for i in instances)
    if len(instances) == 1:
        return instances[0]
    return DiscriminationInstance(tuple(members), labels, "tensor", strict)


def construct_product_witness(certs) -> tuple[DiscriminationInstance, Certificate]:
    """``alpha = alpha_1 (x) alpha_2 (x) ...`` for the product of certified factors.

    ``certs`` is a list of ``(instance, YES-certificate)`` pairs. Returns the
    product instance together with its certificate.
    """
    certs = list(certs)
    if not certs:
        raise ValueError("need at least one factor")
    for inst, cert in certs:
        if not cert.is_yes:
            raise ValueError("every factor certificate must be YES")
        if verify_certificate(inst, cert.alpha) >= NUMERIC_TOL:
            raise ValueError("a factor certificate does not verify")
    if len(certs) == 1:
        return certs[0]
    alpha = certs[0][1].alpha.amplitudes
    for _, c in certs[1:]:
        alpha = np.kron(alpha, c.alpha.amplitudes)
    prod = product_instance([i for i, _ in certs])
    alpha = PureState.normalized(alpha)
    res = verify_certificate(prod, alpha)
    return prod, Certificate(Verdict.YES, ProofTag.PROP2_PRODUCT, alpha, res,
                             {"factors": len(certs)})


def _qubit_prime_j0(p: int, l: int) -> int:
    for j0 in range(1, p):
        if j0 != l and j0 + l != p:
            return j0
    raise ValueError(f"no admissible support index for p={p}, l={l}")


def construct_qubit_prime_witness(p: int, l: int) -> PureState:
    """Witness in ``C^2 (x) C^p`` for difference sets inside
    ``{P (x) I, P (x) X_p^l, I (x) X_p^l : P in {X, Y, Z}}``.

    Both qubit branches are supported on ``{|0>, |j0>}``; the shifted supports
    are disjoint from the originals because ``j0 != l`` and ``j0 + l != p``.
    """
    if not (isinstance(p, (int, np.integer)) and is_prime(int(p)) and p >= 7):
        raise ValueError(f"p must be a prime >= 7, got {p!r}")
    if not 1 <= l <= p - 1:
        raise ValueError(f"l must lie in [1, {p - 1}], got {l!r}")
    j0 = _qubit_prime_j0(p, l)
    a = np.zeros((2, p), dtype=np.complex128)
    a[0, 0] = a[0, j0] = a[1, 0] = 0.5
    a[1, j0] = -0.5
    return PureState(a.ravel())


def qubit_prime_operators(p: int, l: int) -> list[np.ndarray]:
    """The seven constraint operators the qubit-prime witness annihilates."""
    i2 = np.eye(2)
    x2, z2 = _weyl(2, 1, 0), _weyl(2, 0, 1)
    y2 = x2 @ z2
    ip, xl = np.eye(p), _weyl(p, l % p, 0)
    return [np.kron(x2, ip), np.kron(y2, ip), np.kron(x2, xl), np.kron(y2, xl),
            np.kron(z2, xl), np.kron(i2, xl), np.kron(z2, ip)]


def weyl_to_shift(p: int, a: int, b: int) -> tuple[np.ndarray, int]:
    """Unitary ``C`` and ``l != 0`` with ``C X^a Z^b C^dag`` proportional to ``X^l``.

    ``a != 0``: quadratic phase ``diag(w^(g k^2))`` with ``2 a g = -b (mod p)``.
    ``a == 0``: discrete Fourier transform, which sends ``Z^b`` to ``X^(-b)``.
    Requires ``p`` an odd prime and ``(a, b) != (0, 0)``.
    """
    a, b = a % p, b % p
    if a == 0 and b == 0:
        raise ValueError("identity has no shift form")
    w = roots_of_unity(p)
    k = np.arange(p)
    if a:
        g = (-b * pow(2 * a, -1, p)) % p
        return np.diag(w[(g * k * k) % p]), a
    f = w[np.outer(k, k) % p] / np.sqrt(p)
    return f, (-b) % p


def qubit_prime_witness_for(p: int, a: int, b: int) -> PureState:
    """Witness when the prime-factor difference is ``X_p^a Z_p^b`` (up to phase)."""
    c, l = weyl_to_shift(p, a, b)
    base = construct_qubit_prime_witness(p, l).amplitudes
    alpha = np.kron(np.eye(2), c.conj().T) @ base
    return PureState.normalized(alpha)
