"""Optimal local-unitary simulation of two-qubit Hamiltonians."""

from .errors import (
    CapacityError,
    ContractViolation,
    DegenerateInputError,
    GeometryError,
    HamsimError,
    NoSimulationError,
    NumericError,
)
from .generic_sim import (
    ConjugationSchedule,
    baseline_simulation,
    clifford_conjugator,
    decouple_ddim,
    decouple_qubits,
    noswap_fixture,
    simulate_generic_ddim,
)
from .normal_form import NormalForm, is_lu_equivalent, normal_form
from .pauli import PauliDecomposition, PauliString, compose, decompose, nonlocal_part, traceless_basis
from .polyhedron import VertexLabel, decompose_on_face, membership, optimal_factor, s_majorizes, s_order, vertices
from .protocol import (
    ProtocolStep,
    SimulationProtocol,
    ancilla_effective,
    factor,
    interconversion_product,
    invert_optimal,
    invert_universal,
    stroboscopic_error,
    synthesize,
    verify_average,
)

__version__ = "0.1.0"
