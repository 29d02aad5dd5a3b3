from dataclasses import dataclass, field, replace

import numpy as np

from claims_reserving.exceptions import TriangleFormatError, ValidationError, WrongKindError
from claims_reserving.triangle.constants import TriangleKind


@dataclass(frozen=True, eq=False)
class Triangle:
    """Claims by origin (rows) and development lag (columns).

    `values` may hold numbers at unobserved cells once a triangle has been
    completed by a model; everything that reads data goes through `observed`.
    Arrays are copied on construction and frozen.
    """

    values: np.ndarray
    observed: np.ndarray | None = None
    origin_labels: tuple[str, ...] = ()
    dev_labels: tuple[str, ...] = ()
    kind: TriangleKind = TriangleKind.INCREMENTAL
    epsilon_shift: float = 0.0

    def __post_init__(self):
        values = np.array(self.values, dtype=float)
        if values.ndim != 2 or values.size == 0:
            raise TriangleFormatError("A triangle needs at least one row and one column")

        if self.observed is None:
            observed = np.isfinite(values)
        else:
            observed = np.array(self.observed, dtype=bool)
            if observed.shape != values.shape:
                raise TriangleFormatError(
                    f"Observed mask has shape {observed.shape}, values have shape {values.shape}"
                )

        bad = observed & ~np.isfinite(values)
        if bad.any():
            i, j = np.argwhere(bad)[0]
            raise TriangleFormatError(f"Observed cell (row {i + 1}, column {j + 1}) has no finite value")

        n_origin, n_dev = values.shape
        origin_labels = tuple(str(v) for v in self.origin_labels) or tuple(
            str(i + 1) for i in range(n_origin)
        )
        dev_labels = tuple(str(v) for v in self.dev_labels) or tuple(str(j) for j in range(n_dev))
        if len(origin_labels) != n_origin or len(dev_labels) != n_dev:
            raise TriangleFormatError("Label counts do not match the triangle shape")
        if self.epsilon_shift < 0 or not np.isfinite(self.epsilon_shift):
            raise ValidationError(f"Epsilon shift must be a finite nonnegative number, got {self.epsilon_shift}")

        values.setflags(write=False)
        observed.setflags(write=False)
        object.__setattr__(self, "values", values)
        object.__setattr__(self, "observed", observed)
        object.__setattr__(self, "origin_labels", origin_labels)
        object.__setattr__(self, "dev_labels", dev_labels)
        object.__setattr__(self, "kind", TriangleKind(self.kind))

    @property
    def shape(self) -> tuple[int, int]:
        return self.values.shape

    @property
    def n_origin(self) -> int:
        return self.values.shape[0]

    @property
    def n_dev(self) -> int:
        return self.values.shape[1]

    @property
    def unobserved(self) -> np.ndarray:
        return ~self.observed

    @property
    def n_observed(self) -> int:
        return int(self.observed.sum())

    @property
    def n_unobserved(self) -> int:
        return self.values.size - self.n_observed

    @property
    def observed_values(self) -> np.ndarray:
        return np.where(self.observed, self.values, np.nan)

    def last_observed_lag(self) -> np.ndarray:
        """Index of the last observed lag per row, -1 for rows with no data."""
        lags = np.arange(self.n_dev)
        return np.where(self.observed, lags, -1).max(axis=1)

    def has_row_prefixes(self) -> bool:
        return bool(np.all(self.observed == (np.arange(self.n_dev) <= self.last_observed_lag()[:, None])))

    def replace(self, **changes) -> "Triangle":
        return replace(self, **changes)


@dataclass
class RunoffReport:
    is_justified: bool
    is_regular: bool
    gaps: list[tuple[int, int]] = field(default_factory=list)
    issues: list[str] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return self.is_justified


def validate_runoff(t: Triangle) -> RunoffReport:
    """Check that the observed region is an upper-left staircase.

    Never raises; interior gaps and out-of-shape cells are listed in the report.
    """
    observed = t.observed
    n_origin, n_dev = t.shape
    last = t.last_observed_lag()
    prefix = np.arange(n_dev) <= last[:, None]

    gaps = [(int(i), int(j)) for i, j in np.argwhere(prefix & ~observed)]
    issues = [f"Row {i + 1} has a gap at column {j + 1}" for i, j in gaps]

    lengths = last + 1
    increases = [int(i) for i in np.flatnonzero(np.diff(lengths) > 0)]
    for i in increases:
        issues.append(f"Row {i + 2} has more observed lags than row {i + 1}")

    regular_mask = np.add.outer(np.arange(n_origin), np.arange(n_dev)) <= n_origin - 1
    return RunoffReport(
        is_justified=not gaps and not increases,
        is_regular=bool(np.array_equal(observed, regular_mask)),
        gaps=gaps,
        issues=issues,
    )


def cumulate(t: Triangle) -> Triangle:
    if t.kind != TriangleKind.INCREMENTAL:
        raise WrongKindError("cumulate expects an incremental triangle")
    _require_row_prefixes(t, "cumulate")

    cumulative = np.cumsum(np.where(t.observed, t.values, 0.0), axis=1)
    cumulative[~t.observed] = np.nan
    return t.replace(values=cumulative, kind=TriangleKind.CUMULATIVE)


def decumulate(t: Triangle) -> Triangle:
    if t.kind != TriangleKind.CUMULATIVE:
        raise WrongKindError("decumulate expects a cumulative triangle")
    _require_row_prefixes(t, "decumulate")

    cumulative = np.where(t.observed, t.values, 0.0)
    incremental = np.diff(cumulative, axis=1, prepend=0.0)
    incremental[~t.observed] = np.nan
    return t.replace(values=incremental, kind=TriangleKind.INCREMENTAL)


def dev_ratios(t: Triangle) -> np.ndarray:
    """Development ratios; column 0 carries the first cumulative amount."""
    if t.kind != TriangleKind.CUMULATIVE:
        raise WrongKindError("dev_ratios expects a cumulative triangle")
    _require_row_prefixes(t, "dev_ratios")

    cumulative = t.observed_values
    zero = t.observed[:, 1:] & (cumulative[:, :-1] == 0)
    if zero.any():
        i, j = np.argwhere(zero)[0]
        raise ValidationError(
            f"Zero cumulative amount at (row {i + 1}, column {j + 1}) cannot be a ratio denominator",
            cell=(int(i), int(j)),
        )

    ratios = np.empty_like(cumulative)
    ratios[:, 0] = cumulative[:, 0]
    with np.errstate(divide="ignore", invalid="ignore"):
        ratios[:, 1:] = cumulative[:, 1:] / cumulative[:, :-1]
    ratios[~t.observed] = np.nan
    return ratios


def cumulative_from_ratios(ratios: np.ndarray) -> np.ndarray:
    """Inverse of `dev_ratios` along the last axis."""
    return np.cumprod(np.asarray(ratios, dtype=float), axis=-1)


def reserve_sum(full: Triangle, mask: np.ndarray | None = None) -> float:
    """Total of the cells selected by `mask` (the unobserved cells by default)."""
    mask = full.unobserved if mask is None else np.asarray(mask, dtype=bool)
    selected = full.values[mask]
    if not np.all(np.isfinite(selected)):
        i, j = np.argwhere(mask & ~np.isfinite(full.values))[0]
        raise ValidationError(f"Cell (row {i + 1}, column {j + 1}) has no value to add to the reserve")
    return float(np.sum(selected))


def triangle_to_json(t: Triangle) -> dict:
    return {
        "kind": t.kind.value,
        "origin_labels": list(t.origin_labels),
        "dev_labels": list(t.dev_labels),
        "epsilon_shift": t.epsilon_shift,
        "values": [[float(v) if np.isfinite(v) else None for v in row] for row in t.values],
        "observed": t.observed.tolist(),
    }


def triangle_from_json(data: dict) -> Triangle:
    try:
        rows = data["values"]
    except (KeyError, TypeError):
        raise TriangleFormatError("Triangle JSON needs a 'values' list of rows")
    if not rows:
        raise TriangleFormatError("Triangle JSON has no rows")

    width = len(rows[0])
    for i, row in enumerate(rows):
        if len(row) != width:
            raise TriangleFormatError(f"Row {i + 1} has {len(row)} cells, expected {width}")

    try:
        values = np.array([[np.nan if v is None else float(v) for v in row] for row in rows], dtype=float)
    except (TypeError, ValueError) as e:
        raise TriangleFormatError(f"Triangle JSON holds a non-numeric cell: {e}")

    return Triangle(
        values=values,
        observed=data.get("observed"),
        origin_labels=tuple(data.get("origin_labels") or ()),
        dev_labels=tuple(data.get("dev_labels") or ()),
        kind=TriangleKind(data.get("kind", TriangleKind.INCREMENTAL.value)),
        epsilon_shift=float(data.get("epsilon_shift") or 0.0),
    )


def _require_row_prefixes(t: Triangle, operation: str):
    if not t.has_row_prefixes():
        report = validate_runoff(t)
        raise ValidationError(
            f"{operation} needs every row observed from the first lag without gaps: {'; '.join(report.issues)}"
        )
