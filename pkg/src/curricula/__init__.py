"""Train NAND networks on multi-target Boolean problems under target curricula.

The hierarchical losses reward getting easy targets right before hard ones,
and the target order can be estimated up front from the size of each target's
minimum feature set.
"""

from .bitdata import BitMatrix, Dataset, SampleSplit, bitmatrix_from_rows, sample_split
from .errors import EmptyProblemError, InfeasibleInstanceError, ParseError, StructuralError
from .loss import Curriculum, ErrorSummary, error_summary, get_loss, loss_l1, loss_lgh, loss_llh, loss_lw
from .minfs import (
    CoverInstance,
    CurriculumEstimate,
    FeatureSetResult,
    build_cover_instance,
    estimate_curriculum,
    nestedness,
    overlap_coefficient,
    solve_minfs_exact,
    solve_minfs_greedy,
)
from .network import NetworkStructure, check_feedforward, evaluate, propose_move, random_network
from .optimizer import LahcConfig, TrainResult, guiding_cost, lahc_train
from .problems import ProblemSpec, gen_add, gen_cmaj, gen_cmux, gen_cpar, gen_sub, timeseries_to_pairs
from .stats import TauValue, kendall_tau, mean_ci, sample_permutation_with_tau

__version__ = "0.1.0"
