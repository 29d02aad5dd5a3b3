import csv
import json
import logging
import os
import sys

import numpy as np

from claims_reserving import __version__
from claims_reserving.commands.constants import META_SUFFIX, MODULE_NAME
from claims_reserving.reserving_log import create_log
from claims_reserving.triangle import Triangle
from claims_reserving.utils import dumps, logger

_HANDLER_NAME = "claims_reserving.console"


def create_commands_log(**kwargs):
    return create_log(module_def=MODULE_NAME, **kwargs)


def setup_logging(verbose: bool = False):
    root = logger()
    level = logging.DEBUG if verbose else logging.WARNING
    for handler in [h for h in root.handlers if h.get_name() == _HANDLER_NAME]:
        root.removeHandler(handler)
    handler = logging.StreamHandler(sys.stderr)
    handler.set_name(_HANDLER_NAME)
    handler.setLevel(level)
    handler.setFormatter(logging.Formatter("%(levelname)s %(name)s: %(message)s"))
    root.addHandler(handler)
    root.setLevel(level)


def output_path(out_dir: str, name: str) -> str:
    os.makedirs(out_dir, exist_ok=True)
    return os.path.join(out_dir, name)


def write_json(out_dir: str, name: str, data) -> str:
    path = output_path(out_dir, name)
    with open(path, "w") as f:
        f.write(dumps(data) + "\n")
    create_commands_log(status="Success", method="write_json", message=f"Wrote {path}")
    return path


def write_text(out_dir: str, name: str, text: str) -> str:
    path = output_path(out_dir, name)
    with open(path, "w") as f:
        f.write(text)
    create_commands_log(status="Success", method="write_text", message=f"Wrote {path}")
    return path


def write_grid(out_dir: str, name: str, grid: np.ndarray, triangle: Triangle, metadata: dict | None = None) -> str:
    """Origin rows by development lag columns, blank where a value is missing."""
    path = output_path(out_dir, name)
    with open(path, "w", newline="") as f:
        writer = csv.writer(f, lineterminator="\n")
        writer.writerow(["origin", *triangle.dev_labels])
        for label, row in zip(triangle.origin_labels, grid, strict=True):
            writer.writerow([label, *(repr(float(v)) if np.isfinite(v) else "" for v in row)])
    if metadata is not None:
        write_meta(path, metadata)
    create_commands_log(status="Success", method="write_grid", message=f"Wrote {path}")
    return path


def write_csv(out_dir: str, name: str, write, metadata: dict) -> str:
    """Write a CSV through `write(stream)` and its metadata sidecar."""
    path = output_path(out_dir, name)
    with open(path, "w", newline="") as f:
        write(f)
    write_meta(path, metadata)
    create_commands_log(status="Success", method="write_csv", message=f"Wrote {path}")
    return path


def read_json(path: str) -> dict:
    with open(path) as f:
        return json.load(f)


def meta_path(path: str) -> str:
    return os.path.splitext(path)[0] + META_SUFFIX


def write_meta(path: str, metadata: dict) -> str:
    """Sidecar JSON describing the run that wrote the CSV at `path`."""
    sidecar = meta_path(path)
    with open(sidecar, "w") as f:
        f.write(dumps({"file": os.path.basename(path), "package_version": __version__, **metadata}) + "\n")
    return sidecar
