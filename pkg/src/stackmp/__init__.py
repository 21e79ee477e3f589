"""Exact solver for adversarial Stackelberg values in two-player mean-payoff games."""

from .model import (
    Arena,
    CertificateError,
    GameFormatError,
    Guards,
    Lasso,
    MealyStrategy,
    ModelError,
    PerturbedSample,
    Rational,
    ResourceGuardError,
    emit_game,
    enumerate_memoryless,
    fix_player0_memoryless,
    lasso_payoff,
    make_lasso,
    parse_game,
    parse_rational,
    perturb_game,
    product_with_strategy,
)
from .graphs import (
    CycleRecord,
    ExtendedArena,
    SccRecord,
    build_extended_game,
    enumerate_simple_cycles,
    karp_max_mean,
    karp_min_mean,
    tarjan_scc,
)
from .geometry import (
    Cell,
    LinearConstraint,
    Polygon2D,
    Region,
    convex_hull_2d,
    fm_eliminate,
    fmin_closure,
    lincon,
    lp_sup,
    region_complement,
    region_intersect,
    region_union,
)
from .badness import (
    BadnessQuery,
    MulticycleLP,
    defends,
    find_punishing,
    is_bad_vertex,
    lambda_region,
    multicycle_feasible,
)
from .zerosum import ZsValueTable, zs_embedding_check, zs_robustness_check, zs_value
from .solver import (
    AsvResult,
    RegularWitness,
    StrategyValue,
    WitnessCertificate,
    asv,
    asv_epsilon,
    asv_ml,
    build_regular_witness,
    make_partition_game,
    max_epsilon,
    max_epsilon_bisect,
    phi_region,
    psi_region,
    robustness_harness,
    strategy_value,
    threshold,
)
from .fixtures import build_fixture

__all__ = [name for name in dir() if not name.startswith("_")]
__version__ = "0.1.0"
