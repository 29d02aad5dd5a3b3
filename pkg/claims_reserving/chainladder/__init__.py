from claims_reserving.chainladder.chain_ladder import (
    ChainLadderResult,
    MackResult,
    chain_ladder_report,
    chain_ladder_to_json,
    cl_fit,
    development_factors,
    mack_se,
    mack_sigma2,
)
