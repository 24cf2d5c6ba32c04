"""Long-time statistics of bipartite unitary gate orbits.

A two-qubit gate, up to single-qubit factors, is a point in a closed
triangular chamber; taking powers of the gate moves that point along a
folded straight line, a billiard trajectory.  This package computes the
point (the gate's *content*), follows the billiard, evaluates the gate's
operator Schmidt coefficients and entanglement entropies in closed form,
and compares long-time averages along single-gate orbits with ensemble
averages over random gates of arbitrary bipartite dimension.
"""

__version__ = "0.1.0"

from .linalg import (
    UnitaryGate,
    UnitaryPowers,
    eigenvalues_unitary,
    is_unitary,
    matrix_power,
    tensor,
    unitarity_defect,
)
from .gates import (
    NamedGate,
    cartan_gate,
    cartan_matrix,
    fidelity,
    named_gate,
    pauli,
)
from .weyl import (
    ChamberClass,
    SearchBudgetError,
    Trajectory,
    approximate_gate,
    bell_phases,
    canonical_content,
    cartan_trajectory,
    chamber_class,
    content_batch,
    extract_content,
    fold,
    interlaced_trajectory,
    is_canonical,
    local_invariants,
    trajectory_content,
)
from .schmidt import (
    analytic_entropies,
    cartan_schmidt_vector,
    gate_entropies,
    induced_state_spectrum,
    linear_entropy,
    reshuffle,
    schmidt_vector,
    shannon_entropy,
)
from .ensembles import (
    EnsembleKind,
    EnsembleSpec,
    RandomStream,
    cpe_diagonal,
    ginibre,
    haar_unitary,
    random_local,
    sample_gamma,
    wishart,
)
from .stats import (
    Histogram,
    MomentSummary,
    arcsine_cdf,
    arcsine_pdf,
    blocked_moments,
    chamber_moments,
    cpe_means,
    cue_means,
    generic_alpha,
    ks_distance,
    ks_two_sample,
    make_histogram,
    mp_cdf,
    mp_pdf,
    space_average_entropy,
    time_average_entropy,
)
from .experiments import ExperimentConfig, Report, run_experiment, write_report

__all__ = [
    "__version__",
    "UnitaryGate",
    "UnitaryPowers",
    "eigenvalues_unitary",
    "is_unitary",
    "matrix_power",
    "tensor",
    "unitarity_defect",
    "NamedGate",
    "cartan_gate",
    "cartan_matrix",
    "fidelity",
    "named_gate",
    "pauli",
    "ChamberClass",
    "SearchBudgetError",
    "Trajectory",
    "approximate_gate",
    "bell_phases",
    "canonical_content",
    "cartan_trajectory",
    "chamber_class",
    "content_batch",
    "extract_content",
    "fold",
    "interlaced_trajectory",
    "is_canonical",
    "local_invariants",
    "trajectory_content",
    "analytic_entropies",
    "cartan_schmidt_vector",
    "gate_entropies",
    "induced_state_spectrum",
    "linear_entropy",
    "reshuffle",
    "schmidt_vector",
    "shannon_entropy",
    "EnsembleKind",
    "EnsembleSpec",
    "RandomStream",
    "cpe_diagonal",
    "ginibre",
    "haar_unitary",
    "random_local",
    "sample_gamma",
    "wishart",
    "Histogram",
    "MomentSummary",
    "arcsine_cdf",
    "arcsine_pdf",
    "blocked_moments",
    "chamber_moments",
    "cpe_means",
    "cue_means",
    "generic_alpha",
    "ks_distance",
    "ks_two_sample",
    "make_histogram",
    "mp_cdf",
    "mp_pdf",
    "space_average_entropy",
    "time_average_entropy",
    "ExperimentConfig",
    "Report",
    "run_experiment",
    "write_report",
]
