"""Matching pursuit over continuous parametric kernel dictionaries.

The observation is a finite superposition of unit-norm atoms indexed by
points of R^D; the kernel (atom inner product) is the only window onto the
underlying Hilbert space.  The package provides the pursuit loop, global
correlation maximization, recovery certificates, counterexample
constructions, and a seeded command-line experiment harness.
"""

from ._corr import BACKEND
from .certify import (
    AdversarialWitness,
    CertificateReport,
    FalsifierReport,
    FalsifierWitness,
    adversarial_input,
    axis_admissibility_falsifier,
    axis_simplex_support,
    balanced_grid_section,
    balanced_grid_signal,
    balanced_grid_weights,
    chain_bound_violation,
    coherence_certificate,
    restricted_erc,
    separation_certificate,
    separation_threshold,
    symmetric_cluster_crossover,
    symmetric_cluster_margin,
)
from .errors import (
    DegenerateSupportError,
    EmptyResidualError,
    NotApplicableError,
    NumericalError,
    ParameterError,
)
from .gram import GramMatrix, build_gram, correlation_vector, erc_ratio, solve_gram
from .kernels import (
    AdmissibilityReport,
    CMFSpec,
    KernelSpec,
    check_admissible,
    cmf_eval,
    inverse_linear,
    kernel_eval,
    laplace,
)
from .omp import (
    OMPIteration,
    OMPTrace,
    ReconstructionReport,
    SparseSignal,
    Termination,
    Verdict,
    VerdictKind,
    classify,
    iteration_residual_weights,
    recovered_signal,
    run_omp,
)
from .optimizer import (
    ArgmaxResult,
    CorrelationFunction,
    OptimizerConfig,
    SectionArgmaxResult,
    argmax_1d_section,
    global_argmax,
)
from .param_space import (
    CartesianGrid,
    Support,
    as_point,
    lp_pseudo_norm,
    min_axis_separation,
    same_point,
    set_aug,
)

__version__ = "0.1.0"

__all__ = [
    "BACKEND",
    "__version__",
    # errors
    "ParameterError",
    "DegenerateSupportError",
    "NumericalError",
    "EmptyResidualError",
    "NotApplicableError",
    # parameter space
    "Support",
    "CartesianGrid",
    "as_point",
    "same_point",
    "lp_pseudo_norm",
    "set_aug",
    "min_axis_separation",
    # kernels
    "CMFSpec",
    "KernelSpec",
    "AdmissibilityReport",
    "laplace",
    "inverse_linear",
    "cmf_eval",
    "kernel_eval",
    "check_admissible",
    # gram
    "GramMatrix",
    "build_gram",
    "correlation_vector",
    "solve_gram",
    "erc_ratio",
    # optimizer
    "CorrelationFunction",
    "OptimizerConfig",
    "ArgmaxResult",
    "SectionArgmaxResult",
    "global_argmax",
    "argmax_1d_section",
    # pursuit
    "SparseSignal",
    "OMPIteration",
    "OMPTrace",
    "Termination",
    "Verdict",
    "VerdictKind",
    "ReconstructionReport",
    "run_omp",
    "classify",
    "recovered_signal",
    "iteration_residual_weights",
    # certificates
    "CertificateReport",
    "AdversarialWitness",
    "FalsifierReport",
    "FalsifierWitness",
    "restricted_erc",
    "coherence_certificate",
    "separation_certificate",
    "separation_threshold",
    "adversarial_input",
    "axis_admissibility_falsifier",
    "axis_simplex_support",
    "balanced_grid_weights",
    "balanced_grid_section",
    "balanced_grid_signal",
    "symmetric_cluster_margin",
    "symmetric_cluster_crossover",
    "chain_bound_violation",
]
