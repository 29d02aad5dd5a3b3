from claims_reserving.estimation.fit import FitResult
from claims_reserving.utils import to_jsonable


def fit_to_json(fit: FitResult) -> dict:
    return to_jsonable(
        {
            "model": fit.model,
            "recipe_version": fit.recipe_version,
            "response_kind": fit.response_kind,
            "sequencing": fit.series.sequencing,
            "parameters": [
                {"name": d.name, "scale": d.scale, "theta": float(theta), "value": fit.params[d.name]}
                for d, theta in zip(fit.param_map.descriptors, fit.theta, strict=True)
            ],
            "theta": fit.theta,
            "loglik": fit.loglik,
            "q": fit.q,
            "n_obs": fit.n_obs,
            "n_diffuse": fit.n_diffuse,
            "n_eff": fit.n_eff,
            "aic": fit.aic,
            "bic": fit.bic,
            "status": fit.status,
            "trace": [t.as_dict() for t in fit.trace],
            "metadata": fit.metadata,
        }
    )


def fit_report(fit: FitResult) -> str:
    lines = [
        f"Model:          {fit.model or '-'} (recipe {fit.recipe_version or '-'})",
        f"Response:       {fit.response_kind.value if fit.response_kind else '-'}, {fit.series.sequencing.value}",
        f"Status:         {fit.status.value}",
        f"Log-likelihood: {fit.loglik:.6f}",
        f"q / N_eff:      {fit.q} / {fit.n_eff} ({fit.n_obs} observations, {fit.n_diffuse} diffuse)",
        f"AIC / BIC:      {fit.aic:.6f} / {fit.bic:.6f}",
        "Parameters:",
    ]
    for name, value in fit.params.items():
        lines.append(f"  {name:<12} {value:.6g}")
    if fit.trace:
        lines.append("Starts:")
        for i, trace in enumerate(fit.trace, start=1):
            lines.append(f"  {i}: loglik {trace.loglik:.6f} after {trace.n_iter} iterations ({trace.status.value})")
    return "\n".join(lines) + "\n"
