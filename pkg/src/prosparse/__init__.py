"""Exhaustive sparse representations in a union of two bases via Prony windows."""

__version__ = "0.1.0"

from .bases import (  # noqa: E402
    BandedBasis,
    CanonicalBasis,
    DCTBasis,
    Dictionary,
    FourierBasis,
    GaussianBasis,
    LocalFourierBasis,
    gaussian_calibrate,
    make_dictionary,
    mutual_coherence,
    recover_segment,
    synthesize,
)
from .bounds import bound_report, evaluate_bounds, boundary_curves  # noqa: E402
from .bp import l1_equality_solve  # noqa: E402
from .core import count_clean_windows, prosparse_solve, total_sparsity_solve  # noqa: E402
from .fixtures import (  # noqa: E402
    make_bp_counterexample,
    make_picket_fence_z,
    make_random_planted,
    make_two_solution_instance,
)
from .generalized import (  # noqa: E402
    GenSolveConfig,
    count_clean_intervals_general,
    gen_prosparse_solve,
    preconditioned_solve,
)
from .prony import Reject, fourier_coeffs_from_model, generalized_prony_fit, prony_fit  # noqa: E402
from .solutions import SolutionSet, SolverInvariantError, SparseSolution  # noqa: E402

__all__ = [
    "BandedBasis", "CanonicalBasis", "DCTBasis", "Dictionary", "FourierBasis", "GaussianBasis",
    "GenSolveConfig", "LocalFourierBasis", "Reject", "SolutionSet", "SolverInvariantError",
    "SparseSolution", "bound_report", "count_clean_intervals_general", "count_clean_windows",
    "evaluate_bounds", "boundary_curves", "fourier_coeffs_from_model", "gaussian_calibrate",
    "gen_prosparse_solve", "generalized_prony_fit", "l1_equality_solve", "make_bp_counterexample",
    "make_dictionary", "make_picket_fence_z", "make_random_planted", "make_two_solution_instance",
    "mutual_coherence", "preconditioned_solve", "prony_fit", "prosparse_solve", "recover_segment",
    "synthesize", "total_sparsity_solve",
]
