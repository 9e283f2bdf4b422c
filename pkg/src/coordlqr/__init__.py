"""Low-rank coordinated LQR for ensembles of identical agents.

Agents share dynamics ``(A, B)`` and a local cost; coordination acts on the
mass-weighted center of the ensemble. The optimal feedback is a block
diagonal local gain plus a block rank-one correction driven by the center
of mass, and costs nothing extra to compute as the ensemble grows.
"""

from .coordsynth import (
    CostReport,
    CostSpec,
    GainDecomposition,
    HardSpec,
    Plant,
    Weights,
    apply_control,
    center_value,
    consensus_cost,
    consensus_invariance_check,
    dc_feedforward,
    local_gain,
    normalize,
    optimal_cost,
    partial_constraint,
    rescale_weighted,
    synthesize_hard,
)
from .ensemblelab import (
    build_aggregate,
    empirical_cost,
    oracle_constrained_cost,
    simulate,
    transform_check,
)
from .exceptions import *  # noqa: F401,F403
from .freqcoord import (
    WeightFilter,
    augment,
    sweep_weighted,
    synthesize_weighted,
    weighted_controller,
    weighted_energies,
)
from .numkit import Tolerances, decoupling_unitary, solve_care, solve_lyapunov
from .softcoord import (
    SoftSpec,
    equivalence_as_hard,
    soft_cost_report,
    solve_soft,
    sweep_lambda,
)

__version__ = "0.1.0"
