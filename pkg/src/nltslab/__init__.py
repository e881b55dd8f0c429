"""Desk-scale lab for quantum Tanner CSS codes and their commuting
Hamiltonians: exact GF(2) machinery, balanced-product complexes, clustering
of approximate codewords, measurement-uncertainty and circuit-depth checks.
"""

__version__ = "0.1.0"

from .gf2 import (
    BitMatrix,
    BitVector,
    CosetFamily,
    coset_distance,
    is_orthogonal,
    kernel_basis,
    rank,
)
from .groups_graphs import (
    BalancedProductComplex,
    BipartiteGraph,
    FiniteGroup,
    GeneratorSet,
    Graph,
    build_balanced_product,
    build_cayley,
    cayley_double_cover,
    mixing_lemma_check,
    small_set_expansion_check,
    spectral_lambda,
    square_graphs,
    unique_neighbors,
)
from .classical_codes import (
    LinearCode,
    LocalCodePair,
    RobustnessParams,
    dual_tensor_code,
    full_code,
    hamming_code,
    min_distance,
    parity_code,
    puncture_resistance_check,
    repetition_code,
    robustness_check,
    tanner_code,
    tensor_code,
    zero_code,
)
from .css import (
    CssCode,
    css_distance,
    css_distance_bounded,
    ldpc_profile,
    new_css,
    quantum_tanner,
    steane_code,
)
from .hamiltonian import (
    StabilizerHamiltonian,
    commuting_check,
    energy_expectation,
    energy_z_basis,
    ground_space_dimension,
    ground_state,
)
from .quantumsim import (
    AgspPolynomial,
    Gate,
    LayeredCircuit,
    MeasurementDistribution,
    StateVector,
    agsp_projector_check,
    chebyshev_agsp,
    depth_lower_bound,
    fact1_check,
    fact2_check,
    measurement_distributions,
    random_layered_circuit,
    simulate,
)
from .clustering import (
    ApproximateCodewordSet,
    ClusterDecomposition,
    NltsConstants,
    SpreadCertificate,
    claim1_constants,
    cluster_decompose,
    cluster_masses,
    enumerate_gdelta,
    exceptional_vertices,
    lemma1_check,
    mass_bound_check,
    property1_check,
    spread_certificate,
    weight_reduction_search,
)
from .harness import ExperimentConfig, emit, nlts_epsilon, run_pipeline

__version__ = "0.1.0"
