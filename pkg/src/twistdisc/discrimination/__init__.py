"""Distinguishability of unitary sets: certificates, constructions, solver."""

from .constructions import (
    construct_product_witness,
    construct_qubit_prime_witness,
    construct_tensor_witness,
    product_instance,
    qubit_prime_operators,
    qubit_prime_witness_for,
    tensor_witness_vector,
    weyl_to_shift,
)
from .instance import (
    Certificate,
    DifferenceSet,
    DiscriminationInstance,
    ProofTag,
    Verdict,
    difference_set,
    dual_certificate,
    pair_overlaps,
    same_up_to_phase,
    transpose_dual,
    verify_certificate,
)
from .solver import (
    bloch_infeasible,
    exhaustive_small,
    gradient,
    numeric_search,
    objective,
    pair_operators,
    solve,
)

__all__ = [
    "Certificate",
    "DifferenceSet",
    "DiscriminationInstance",
    "ProofTag",
    "Verdict",
    "bloch_infeasible",
    "construct_product_witness",
    "construct_qubit_prime_witness",
    "construct_tensor_witness",
    "difference_set",
    "dual_certificate",
    "exhaustive_small",
    "gradient",
    "numeric_search",
    "objective",
    "pair_operators",
    "pair_overlaps",
    "product_instance",
    "qubit_prime_operators",
    "qubit_prime_witness_for",
    "same_up_to_phase",
    "solve",
    "tensor_witness_vector",
    "transpose_dual",
    "verify_certificate",
    "weyl_to_shift",
]
