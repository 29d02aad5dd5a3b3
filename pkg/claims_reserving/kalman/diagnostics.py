import csv
from collections.abc import Sequence
from dataclasses import dataclass, field
from typing import TextIO

import numpy as np
from scipy import stats
from statsmodels.stats.diagnostic import acorr_ljungbox

from claims_reserving.kalman.constants import MIN_RESIDUALS
from claims_reserving.kalman.filter import FilterOutput


@dataclass
class ResidualReport:
    residuals: np.ndarray
    n_residuals: int
    sufficient: bool
    degenerate: bool
    mean: float | None = None
    variance: float | None = None
    ljung_box: dict[int, dict[str, float]] = field(default_factory=dict)
    normality: dict[str, float] = field(default_factory=dict)
    messages: list[str] = field(default_factory=list)

    def as_dict(self) -> dict:
        return {
            "n_residuals": self.n_residuals,
            "sufficient": self.sufficient,
            "degenerate": self.degenerate,
            "mean": self.mean,
            "variance": self.variance,
            "ljung_box": self.ljung_box,
            "normality": self.normality,
            "messages": self.messages,
        }


def residual_diagnostics(filtered: FilterOutput, lags: Sequence[int] | None = None) -> ResidualReport:
    """Checks on the standardized one-step-ahead residuals of the non-diffuse phase."""
    residuals = filtered.standardized_residuals()
    n = len(residuals)
    degenerate = filtered.degenerate
    messages = []
    if degenerate:
        messages.append("Some innovation variances are zero; the model reproduces part of the data exactly")

    if n < MIN_RESIDUALS:
        messages.append(f"Only {n} non-diffuse residuals, at least {MIN_RESIDUALS} are needed")
        return ResidualReport(residuals, n, sufficient=False, degenerate=degenerate, messages=messages)

    mean = float(np.mean(residuals))
    variance = float(np.var(residuals, ddof=1))
    if variance == 0:
        degenerate = True
        messages.append("Standardized residuals are constant")
        return ResidualReport(residuals, n, True, degenerate, mean, variance, messages=messages)

    lags = sorted({int(lag) for lag in lags if 0 < int(lag) < n}) if lags else [min(10, max(1, n // 4))]
    table = acorr_ljungbox(residuals, lags=lags, return_df=True)
    ljung_box = {
        int(lag): {"statistic": float(row["lb_stat"]), "pvalue": float(row["lb_pvalue"])}
        for lag, row in table.iterrows()
    }

    jb = stats.jarque_bera(residuals)
    normality = {"statistic": float(jb.statistic), "pvalue": float(jb.pvalue)}

    return ResidualReport(
        residuals=residuals,
        n_residuals=n,
        sufficient=True,
        degenerate=degenerate,
        mean=mean,
        variance=variance,
        ljung_box=ljung_box,
        normality=normality,
        messages=messages,
    )


def dump_moments(filtered: FilterOutput, stream: TextIO, delimiter: str = ","):
    """Write predicted and filtered state moments per time point as delimited text."""
    writer = csv.writer(stream, delimiter=delimiter, lineterminator="\n")
    writer.writerow(["time", "state", "predicted_mean", "predicted_var", "filtered_mean", "filtered_var"])
    names = filtered.spec.state_names or tuple(str(i) for i in range(filtered.spec.n_states))
    for t in range(filtered.spec.n_times):
        for i, name in enumerate(names):
            writer.writerow(
                [
                    t,
                    name,
                    repr(float(filtered.predicted_mean[t, i])),
                    repr(float(filtered.predicted_cov[t, i, i])),
                    repr(float(filtered.filtered_mean[t, i])),
                    repr(float(filtered.filtered_cov[t, i, i])),
                ]
            )
