from dataclasses import dataclass, field

import numpy as np

from claims_reserving.estimation.fit import FitResult
from claims_reserving.utils import to_jsonable


@dataclass(frozen=True)
class RankedFit:
    model: str
    response_kind: str
    rank: int
    bic: float
    aic: float
    loglik: float
    q: int
    n_eff: int


@dataclass
class Ranking:
    """BIC ranking within groups of fits that share a response variable."""

    groups: dict[str, list[RankedFit]] = field(default_factory=dict)
    refusals: list[str] = field(default_factory=list)

    def best(self, response_kind: str) -> RankedFit | None:
        ranked = self.groups.get(response_kind)
        return ranked[0] if ranked else None

    def as_dict(self) -> dict:
        return to_jsonable(
            {
                "groups": {kind: [vars(r) for r in ranked] for kind, ranked in self.groups.items()},
                "refusals": self.refusals,
            }
        )


def compare(fits: list[FitResult]) -> Ranking:
    """Rank fits by BIC (smaller is better), only within one response variable.

    Information criteria of models for different responses are densities of
    different data, so no ranking across groups is produced; the refusal is
    recorded with its reason instead.
    """
    ranking = Ranking()
    if len(fits) < 2:
        ranking.refusals.append(f"At least two fits are needed for a comparison, got {len(fits)}")

    grouped: dict[str, list[tuple[str, FitResult]]] = {}
    for i, fit in enumerate(fits):
        kind = fit.response_kind.value if fit.response_kind else "Unknown"
        grouped.setdefault(kind, []).append((fit.model or f"model_{i + 1}", fit))

    for kind in sorted(grouped):
        members = sorted(grouped[kind], key=lambda item: (_sort_value(item[1].bic), item[0]))
        ranking.groups[kind] = [
            RankedFit(
                model=name,
                response_kind=kind,
                rank=rank,
                bic=fit.bic,
                aic=fit.aic,
                loglik=fit.loglik,
                q=fit.q,
                n_eff=fit.n_eff,
            )
            for rank, (name, fit) in enumerate(members, start=1)
        ]
        if len(members) == 1 and len(fits) > 1:
            ranking.refusals.append(f"{members[0][0]} is the only model for response {kind}; it has no ranking")

    if len(grouped) > 1:
        summary = "; ".join(f"{kind}: {', '.join(r.model for r in ranked)}" for kind, ranked in ranking.groups.items())
        ranking.refusals.append(
            "Models with different response variables are not compared, since their likelihoods "
            f"describe different data ({summary})"
        )
    return ranking


def ranking_report(ranking: Ranking) -> str:
    lines = []
    for kind, ranked in ranking.groups.items():
        lines.append(f"Response {kind}")
        lines.append(f"  {'rank':>4}  {'model':<10} {'BIC':>12} {'AIC':>12} {'loglik':>12} {'q':>3} {'N_eff':>6}")
        for r in ranked:
            lines.append(
                f"  {r.rank:>4}  {r.model:<10} {r.bic:>12.4f} {r.aic:>12.4f} {r.loglik:>12.4f} {r.q:>3} {r.n_eff:>6}"
            )
    lines.extend(f"Note: {message}" for message in ranking.refusals)
    return "\n".join(lines) + "\n"


def _sort_value(value: float) -> float:
    return value if np.isfinite(value) else np.inf
