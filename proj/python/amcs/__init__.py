from ._amcs import (
    Error,
    GroundingBudgetExceeded,
    OracleBudgetExceeded,
    SyntaxError,
    ValidationError,
    compare_terms,
    encode_buffer,
    flatten_list,
    oracle,
    run_scenario,
    solve,
)

__all__ = [
    "Error",
    "GroundingBudgetExceeded",
    "OracleBudgetExceeded",
    "SyntaxError",
    "ValidationError",
    "compare_terms",
    "encode_buffer",
    "flatten_list",
    "oracle",
    "run_scenario",
    "solve",
]
