from claims_reserving.simsmooth.export import (
    common_edges,
    distribution_report,
    write_common_histogram,
    write_draws,
    write_histogram,
)
from claims_reserving.simsmooth.reserve import (
    Histogram,
    ReserveDistribution,
    Summary,
    plug_in_reserve,
    reserve_distribution,
    summarize,
)
from claims_reserving.simsmooth.sampler import (
    MeanCorrectionSampler,
    StateDraws,
    draw_missing_responses,
    draw_states,
    simulate_responses,
)
