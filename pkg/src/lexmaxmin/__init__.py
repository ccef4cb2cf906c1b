"""Exact leximin bargaining solutions, D-dominance and the Knockout mechanisms."""
from .dominance import (
    DominanceResult,
    OrderResult,
    d_dominance,
    disagreement_projection,
    leximin_compare,
    strictly_d_dominates,
)
from .errors import (
    AssumptionViolation,
    BudgetExceeded,
    DegenerateAgent,
    DimensionMismatch,
    LexMaxMinError,
    MalformedInstance,
    NotNormalized,
)
from .lp import Constraint, LinearProgram, LpResult, LpStatus, solve
from .mechanism import (
    BidVector,
    Decision,
    KnockoutConfig,
    Outcome,
    SpeResult,
    Terminal,
    backward_induction,
    build_dictatorial,
    build_knockout,
    resolve_knockout_analytic,
)
from .model import (
    BargainingInstance,
    Lottery,
    check_assumption,
    evaluate,
    is_individually_rational,
    normalize,
)
from .serialization import dumps, load, load_shipped, loads, save
from .solutions import leximin, leximin_bruteforce, ks_solution
from .tournament import (
    ProposalProfile,
    TournamentTree,
    build_tree,
    equilibrium_check,
    full_mechanism_spe,
    resolve_tree,
)

__version__ = "0.1.0"
