import csv
import io
import json
import os
from typing import TextIO

import numpy as np

from claims_reserving.exceptions import (
    NonRunoffMaskError,
    PositivityViolation,
    TriangleFormatError,
    ValidationError,
)
from claims_reserving.triangle.constants import MISSING_TOKENS, ORIGIN_HEADER, TriangleKind
from claims_reserving.triangle.triangle import Triangle, triangle_from_json, validate_runoff
from claims_reserving.triangle.utils import create_triangle_log


def parse_triangle(
    source: str | TextIO,
    delimiter: str = ",",
    strict: bool = False,
    strict_positive: bool = False,
    epsilon_shift: float = 0.0,
) -> Triangle:
    """Read an incremental triangle from delimited text.

    The header row holds the development lag labels. If its first cell is
    `origin`, the first column of every row is taken as the origin label.
    Blank cells and NaN-like tokens mark unobserved cells.
    """
    text = source if isinstance(source, str) else source.read()
    rows = [row for row in csv.reader(io.StringIO(text), delimiter=delimiter) if not _is_blank(row)]
    if not rows:
        raise TriangleFormatError("Triangle input is empty")

    header = [c.strip() for c in rows[0]]
    body = rows[1:]
    if not body:
        raise TriangleFormatError("Triangle input has a header but no rows")

    has_origin = header[0].lower() == ORIGIN_HEADER
    dev_labels = header[1:] if has_origin else header
    if not dev_labels:
        raise TriangleFormatError("Header row has no development lag labels")

    width = len(header)
    origin_labels = []
    values = np.full((len(body), len(dev_labels)), np.nan)
    for i, row in enumerate(body):
        if len(row) != width:
            raise TriangleFormatError(
                f"Row {i + 1} has {len(row)} cells, expected {width} from the header", row=i
            )
        if has_origin:
            origin_labels.append(row[0].strip())
            row = row[1:]
        for j, cell in enumerate(row):
            values[i, j] = _parse_cell(cell, i, j)

    triangle = Triangle(
        values=values,
        origin_labels=tuple(origin_labels),
        dev_labels=tuple(dev_labels),
        kind=TriangleKind.INCREMENTAL,
        epsilon_shift=epsilon_shift,
    )
    return check_triangle(triangle, strict=strict, strict_positive=strict_positive)


def read_triangle(path: str, **kwargs) -> Triangle:
    """Read a triangle file, choosing the JSON mirror format by extension."""
    try:
        triangle = _read_triangle(path, **kwargs)
    except ValidationError as e:
        create_triangle_log(status="Error", exception=e, method="read_triangle", request_data={"path": path})
        raise

    create_triangle_log(
        status="Success",
        method="read_triangle",
        message=f"Read {triangle.n_origin}x{triangle.n_dev} triangle from {path}",
    )
    return triangle


def _read_triangle(path: str, **kwargs) -> Triangle:
    if not os.path.exists(path):
        raise TriangleFormatError(f"Input file {path} does not exist")

    if path.lower().endswith(".json"):
        with open(path) as f:
            try:
                data = json.load(f)
            except json.JSONDecodeError as e:
                raise TriangleFormatError(f"Input file {path} is not valid JSON: {e}")
        triangle = triangle_from_json(data)
        if kwargs.get("epsilon_shift"):
            triangle = triangle.replace(epsilon_shift=kwargs["epsilon_shift"])
        return check_triangle(
            triangle, strict=kwargs.get("strict", False), strict_positive=kwargs.get("strict_positive", False)
        )

    delimiter = kwargs.pop("delimiter", "\t" if path.lower().endswith((".tsv", ".tab")) else ",")
    with open(path, newline="") as f:
        return parse_triangle(f, delimiter=delimiter, **kwargs)


def check_triangle(triangle: Triangle, strict: bool = False, strict_positive: bool = False) -> Triangle:
    if strict_positive:
        shifted = triangle.values + triangle.epsilon_shift
        bad = triangle.observed & (shifted <= 0)
        if bad.any():
            i, j = np.argwhere(bad)[0]
            raise PositivityViolation((int(i), int(j)), float(triangle.values[i, j]))

    if strict:
        report = validate_runoff(triangle)
        if not report.is_justified:
            raise NonRunoffMaskError(
                "Observed cells are not an upper-left runoff shape: " + "; ".join(report.issues),
                gaps=report.gaps,
            )
    return triangle


def _parse_cell(cell: str, i: int, j: int) -> float:
    token = cell.strip()
    if token.lower() in MISSING_TOKENS:
        return np.nan
    try:
        value = float(token)
    except ValueError:
        raise TriangleFormatError(
            f"Cell (row {i + 1}, column {j + 1}) is not a number: {token!r}", cell=(i, j)
        )
    if np.isnan(value):
        return np.nan
    if not np.isfinite(value):
        raise TriangleFormatError(f"Cell (row {i + 1}, column {j + 1}) is not finite: {token!r}", cell=(i, j))
    return value


def _is_blank(row: list[str]) -> bool:
    return not row or (len(row) == 1 and not row[0].strip())
