"""Dense quantum simulation: states, circuits, channels and estimators."""
from .core import (
    ANGLE_SCALE,
    DensityOperator,
    Gate,
    Observable,
    ParameterizedCircuit,
    QuantumState,
    amplitude_encode,
    apply_circuit,
    entangler_pairs,
    evolve,
    expectation,
    folded_product_amplitudes,
    partial_trace,
    pauli_observable,
    pauli_string,
    product_encode,
    random_density,
    random_hermitian,
    random_state,
    random_unitary,
    von_neumann_entropy,
    z_on,
)
from .channels import (
    QuantumChannel,
    channel_adjoint_apply,
    channel_apply,
    compose,
)
from .estimators import (
    ResourceEstimate,
    projection_noise_bound,
    resource_counts,
    swap_trick_purity,
)

__all__ = [name for name in dir() if not name.startswith("_")]
