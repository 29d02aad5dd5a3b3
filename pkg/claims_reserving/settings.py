from dataclasses import asdict, dataclass, field, replace

from claims_reserving.constants import (
    DEFAULT_HISTOGRAM_BINS,
    DEFAULT_N_DRAWS,
    DEFAULT_N_STARTS,
    DEFAULT_QUANTILES,
    DEFAULT_SEED,
    MIN_SIMULATION_DRAWS,
)
from claims_reserving.exceptions import ValidationError
from claims_reserving.utils import to_jsonable

OUTPUT_FORMATS = ("json", "text")


@dataclass(frozen=True)
class RunConfig:
    """Options of one command line run; embedded in every output file."""

    input_path: str | None = None
    models: tuple[str, ...] = ()
    n_draws: int = DEFAULT_N_DRAWS
    seed: int = DEFAULT_SEED
    quantiles: tuple[float, ...] = DEFAULT_QUANTILES
    out_dir: str = "."
    output_format: str = "json"
    strict: bool = False
    strict_positive: bool = False
    epsilon_shift: float = 0.0
    true_reserve: float | None = None
    n_starts: int = DEFAULT_N_STARTS
    histogram_bins: int = DEFAULT_HISTOGRAM_BINS
    threads: int | None = None
    log_dir: str | None = None
    fits: tuple[str, ...] = field(default=())

    def validate(self, for_simulation: bool = False) -> "RunConfig":
        """Check the options and return a copy with model names in their registered spelling."""
        from claims_reserving.models import resolve_name

        models = tuple(resolve_name(name) for name in self.models)
        if len(set(models)) != len(models):
            raise ValidationError(f"Model list has duplicates: {', '.join(self.models)}")
        if for_simulation and self.n_draws < MIN_SIMULATION_DRAWS:
            raise ValidationError(f"Simulation needs at least {MIN_SIMULATION_DRAWS} draws, got {self.n_draws}")
        if self.n_draws < 1:
            raise ValidationError(f"Number of draws must be positive, got {self.n_draws}")
        if any(not 0 < q < 1 for q in self.quantiles):
            raise ValidationError(f"Quantiles must lie strictly between 0 and 1, got {list(self.quantiles)}")
        if self.epsilon_shift < 0:
            raise ValidationError(f"Epsilon shift must be nonnegative, got {self.epsilon_shift}")
        if self.output_format not in OUTPUT_FORMATS:
            raise ValidationError(f"Output format must be one of {', '.join(OUTPUT_FORMATS)}")
        if self.n_starts < 1:
            raise ValidationError(f"Number of optimizer starts must be positive, got {self.n_starts}")
        if self.histogram_bins < 1:
            raise ValidationError(f"Number of histogram bins must be positive, got {self.histogram_bins}")
        if self.threads is not None and self.threads < 1:
            raise ValidationError(f"Thread count must be positive, got {self.threads}")
        return replace(self, models=models)

    def as_dict(self) -> dict:
        data = asdict(self)
        for key in ("out_dir", "threads", "log_dir"):
            data.pop(key)
        return to_jsonable(data)
