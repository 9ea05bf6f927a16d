"""Encode discrete quadratic models as QUBOs and analyze their landscapes exhaustively."""

__version__ = "0.1.0"

from .encode import (
    DecodeResult,
    EncodingDescriptor,
    EncodingKind,
    QuboPair,
    build_k_hot_penalty,
    cost_of,
    decode,
    encode,
    encode_bits,
    encode_domain_wall,
    encode_one_hot,
    evaluate_qubo,
    export_qubo,
    import_qubo,
    penalty_of,
)
from .errors import DegenerateInstanceError, EnumerationLimitError, FormatError
from .landscape import (
    GammaInterval,
    Landscape,
    RegisterClass,
    classify_register,
    energy_lines,
    enumerate_solutions,
    is_local_min,
    landscape_stats,
    local_min_interval,
    penalty_delta,
    valid_neighbor_count,
)
from .model import DqmInstance, evaluate_dqm, parse_dqm, random_dqm, serialize_dqm
from .sample import AnnealSchedule, exhaustive_min, greedy_descent, sample_and_polish, simulated_annealing
from .thresholds import (
    ThresholdReport,
    gamma_double_prime_dw,
    gamma_double_prime_oh,
    gamma_prime_dw_partial,
    gamma_prime_oh,
    gamma_star,
    gamma_triple_prime_oh,
    search_counterexample,
    threshold_report,
    verify_predicates,
)
