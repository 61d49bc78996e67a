"""Wasserstein-Procrustes alignment of word-embedding spaces."""
from ._accel import HAS_NUMBA
from .core import (
    AlignmentRun,
    EmbeddingSpace,
    OrthogonalMap,
    PermutationMap,
    SvdFactors,
    apply_permutation,
    compose,
    frobenius_alignment_cost,
    gram_cross,
    invert,
    normalize_rows,
    nuclear_norm_objective,
    svd_factors,
)
from .evaluate import BilingualDictionary, match_accuracy, precision_at_1
from .lap import CostMatrix, brute_force_assignment, match_step, solve_assignment
from .procrustes import optimality_gap, procrustes
from .retrieval import CslsConfig, csls_translate, nn_translate
from .synth import SynthSpec, generate, run_experiment
from .wp import BranchId, SeedConstraints, SolveConfig, Variant, branch_distance_report, cih, ih, sih

__version__ = "0.1.0"
