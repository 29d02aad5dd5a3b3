from claims_reserving.triangle.constants import ResponseKind, Sequencing, TriangleKind
from claims_reserving.triangle.parser import check_triangle, parse_triangle, read_triangle
from claims_reserving.triangle.transform import (
    TransformedSeries,
    reconstruct_grid,
    reconstruct_incremental,
    sequence,
    series_to_json,
    transform,
)
from claims_reserving.triangle.triangle import (
    RunoffReport,
    Triangle,
    cumulate,
    cumulative_from_ratios,
    decumulate,
    dev_ratios,
    reserve_sum,
    triangle_from_json,
    triangle_to_json,
    validate_runoff,
)
