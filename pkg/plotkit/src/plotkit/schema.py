"""Readers for the floquet-chain CSV schemas, with column validation.

plotkit consumes the primary package's documented file formats only; it never
imports it or recomputes physics.
"""
from __future__ import annotations

import json
import os

import numpy as np

REQUIRED = {
    "trajectory": ["t", "re_c0", "im_c0", "p"],
    "spectrum": ["eps", "class", "gap_distance", "impurity_weight"],
    "sweep_summary": ["status", "fbs", "marginal", "gap_distance", "plateau"],
    "fbs_report": ["t", "p_inf"],
    "filter_spectra": ["omega", "G", "eps2"],
    "filter_dynamics": ["t", "c0_abs"],
    "mode_profile": ["j", "population"],
    "f0_curve": ["a2", "f0sq"],
}


class SchemaMismatch(ValueError):
    """Input file does not match the documented CSV schema."""


def read_table(path, kind: str):
    """(header, column dict) with the schema line and required columns checked."""
    if not os.path.exists(path):
        raise SchemaMismatch(f"{path}: file not found")
    with open(path, encoding="utf-8") as fh:
        first = fh.readline().strip()
        if not first.startswith("# floquet-chain csv"):
            raise SchemaMismatch(f"{path}: missing schema comment line")
        if not first.endswith(" " + kind):
            raise SchemaMismatch(
                f"{path}: schema kind {first.split()[-1]!r}, expected {kind!r}")
        header = fh.readline().strip().split(",")
        rows = [ln.strip().split(",") for ln in fh if ln.strip()]
    missing = [c for c in REQUIRED[kind] if c not in header]
    if missing:
        raise SchemaMismatch(f"{path}: missing column(s) {missing}")
    cols = {}
    for i, name in enumerate(header):
        vals = [r[i] for r in rows]
        try:
            cols[name] = np.array([float(v) for v in vals])
        except ValueError:
            cols[name] = np.array(vals, dtype=object)
    return header, cols


def read_meta(path):
    with open(path, encoding="utf-8") as fh:
        return json.load(fh)


def sweep_points(dataset_dir, suffix: str, kind: str):
    """Yield (index, header, cols) for points/point_NNNN_<suffix>.csv in order."""
    pdir = os.path.join(dataset_dir, "points")
    if not os.path.isdir(pdir):
        raise SchemaMismatch(f"{dataset_dir}: no points/ directory")
    names = sorted(n for n in os.listdir(pdir) if n.endswith(f"_{suffix}.csv"))
    if not names:
        raise SchemaMismatch(f"{dataset_dir}: no *_{suffix}.csv point files")
    for name in names:
        idx = int(name.split("_")[1])
        header, cols = read_table(os.path.join(pdir, name), kind)
        yield idx, header, cols
