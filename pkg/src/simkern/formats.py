"""Readers and writers for the on-disk formats: points CSV and spec JSON."""
from __future__ import annotations

import csv
import json
from pathlib import Path

import numpy as np

from .kernels import KernelSpec, MetricSpec, as_point

__all__ = ["read_points_csv", "write_points_csv", "load_kernel_spec", "load_metric_spec"]


def read_points_csv(source, complex_pairs: bool = False) -> list[np.ndarray]:
    """One point per row.

    With ``complex_pairs`` consecutive columns are read as (re, im) pairs,
    so rows must have an even number of columns.
    """
    if isinstance(source, (str, Path)):
        with open(source, newline="") as fh:
            return read_points_csv(fh, complex_pairs)
    rows = []
    for lineno, row in enumerate(csv.reader(source), 1):
        if not row or not "".join(row).strip() or row[0].lstrip().startswith("#"):
            continue
        try:
            vals = [float(x) for x in row]
        except ValueError as exc:
            raise ValueError(f"line {lineno}: {exc}") from None
        if complex_pairs:
            if len(vals) % 2:
                raise ValueError(f"line {lineno}: complex mode needs an even number of columns")
            vals = [complex(r, i) for r, i in zip(vals[::2], vals[1::2])]
        rows.append(as_point(vals))
    if not rows:
        raise ValueError("no points found")
    dims = {r.size for r in rows}
    if len(dims) != 1:
        raise ValueError(f"points have inconsistent dimensions {sorted(dims)}")
    return rows


def write_points_csv(points, dest, complex_pairs: bool = False) -> None:
    with open(dest, "w", newline="") as fh:
        w = csv.writer(fh)
        for p in points:
            p = np.asarray(p, dtype=complex)
            if complex_pairs:
                w.writerow([f"{v:.17g}" for z in p for v in (z.real, z.imag)])
            else:
                w.writerow([f"{z.real:.17g}" for z in p])


def _load_json(source) -> dict:
    if isinstance(source, (str, Path)):
        with open(source) as fh:
            return json.load(fh)
    return json.load(source)


def load_kernel_spec(source) -> KernelSpec:
    return KernelSpec.from_dict(_load_json(source))


def load_metric_spec(source) -> MetricSpec:
    return MetricSpec.from_dict(_load_json(source))
