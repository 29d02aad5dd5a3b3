import csv
from collections.abc import Sequence
from typing import TextIO

import numpy as np

from claims_reserving.simsmooth.reserve import Histogram, ReserveDistribution


def write_draws(distribution: ReserveDistribution, stream: TextIO, delimiter: str = ","):
    """One reserve draw per line, in draw order."""
    writer = csv.writer(stream, delimiter=delimiter, lineterminator="\n")
    writer.writerow(["reserve"])
    for value in distribution.draws:
        writer.writerow([repr(float(value))])


def write_histogram(histogram: Histogram, stream: TextIO, delimiter: str = ","):
    writer = csv.writer(stream, delimiter=delimiter, lineterminator="\n")
    writer.writerow(["bin_left", "bin_right", "count"])
    for left, right, count in histogram.rows():
        writer.writerow([repr(left), repr(right), count])


def write_common_histogram(
    distributions: dict[str, ReserveDistribution], stream: TextIO, bins: int, delimiter: str = ","
) -> np.ndarray:
    """Counts of several models on shared bin edges; returns the edges."""
    edges = common_edges([d.draws for d in distributions.values()], bins)
    names = sorted(distributions)
    counts = {name: np.histogram(distributions[name].draws, bins=edges)[0] for name in names}

    writer = csv.writer(stream, delimiter=delimiter, lineterminator="\n")
    writer.writerow(["bin_left", "bin_right", *names])
    for b in range(len(edges) - 1):
        writer.writerow([repr(float(edges[b])), repr(float(edges[b + 1])), *(int(counts[n][b]) for n in names)])
    return edges


def common_edges(samples: Sequence[np.ndarray], bins: int) -> np.ndarray:
    low = min(float(np.min(s)) for s in samples)
    high = max(float(np.max(s)) for s in samples)
    return np.histogram_bin_edges([low, high], bins=bins, range=(low, high))


def distribution_report(distribution: ReserveDistribution) -> str:
    summary = distribution.summary
    lines = [
        f"Model:             {distribution.model or '-'}",
        f"Draws:             {summary.n} accepted of {distribution.n_draws} (seed {distribution.seed})",
        f"Point estimate:    {distribution.point_estimate:,.2f}",
        f"Mean:              {summary.mean:,.2f}",
        f"Median:            {summary.median:,.2f}",
        f"Q1 / Q3:           {summary.q1:,.2f} / {summary.q3:,.2f}",
        f"Quartile range:    {summary.qrange:,.2f}",
        f"Std deviation:     {summary.std:,.2f}",
        f"CV:                {summary.cv:.4%}",
        f"Suggested reserve: {summary.suggested_reserve:,.2f}",
        f"MC std error:      {distribution.mc_standard_error:,.2f}",
    ]
    for q, value in summary.percentiles.items():
        lines.append(f"  {q:>6.1%} percentile: {value:,.2f}")
    return "\n".join(lines) + "\n"
