"""CSV and JSON-sidecar serialization.

Every CSV starts with a schema comment line `# floquet-chain csv v1 <kind>`
followed by a header row.  Floats are written with repr (shortest
round-trip), so identical inputs produce bitwise-identical files.
"""
from __future__ import annotations

import json
import os

import numpy as np

SCHEMA_VERSION = 1


def _fmt(x) -> str:
    if isinstance(x, (bool, np.bool_)):
        return "1" if x else "0"
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    if isinstance(x, (float, np.floating)):
        return repr(float(x))
    return str(x)


def _schema_line(kind: str) -> str:
    return f"# floquet-chain csv v{SCHEMA_VERSION} {kind}\n"


def write_csv(path, kind: str, header: list[str], rows) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(_schema_line(kind))
        fh.write(",".join(header) + "\n")
        for row in rows:
            fh.write(",".join(_fmt(x) for x in row) + "\n")


def _jsonable(obj):
    if isinstance(obj, dict):
        return {str(k): _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    if isinstance(obj, (np.integer,)):
        return int(obj)
    if isinstance(obj, (np.floating,)):
        return float(obj)
    if isinstance(obj, (np.bool_,)):
        return bool(obj)
    if isinstance(obj, complex):
        return [obj.real, obj.imag]
    if isinstance(obj, np.ndarray):
        if obj.dtype.kind == "c":
            return [[v.real, v.imag] for v in obj.tolist()]
        return obj.tolist()
    return obj


def write_meta(path, meta: dict) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        json.dump(_jsonable(meta), fh, indent=2, sort_keys=True)
        fh.write("\n")


def read_meta(path) -> dict:
    with open(path, encoding="utf-8") as fh:
        return json.load(fh)


def write_trajectory(traj, base: str, fidelity: np.ndarray | None = None) -> None:
    """base.csv columns (t, re_c0, im_c0, p[, f]) plus base.meta.json sidecar."""
    header = ["t", "re_c0", "im_c0", "p"]
    cols = [traj.times, traj.c0.real, traj.c0.imag, traj.p]
    if fidelity is not None:
        header.append("f")
        cols.append(fidelity)
    meta = dict(traj.meta)
    meta.pop("snapshots", None)
    write_csv(base + ".csv", "trajectory", header, zip(*cols))
    write_meta(base + ".meta.json", meta)


def write_spectrum(spec, base: str, param_name: str = "param",
                   param_value: float = 0.0) -> None:
    """base.csv columns (param, eps, class, gap_distance, impurity_weight)."""
    n = len(spec.eps)
    cls = spec.classification if spec.classification is not None else ["unclassified"] * n
    gd = spec.gap_distance if spec.gap_distance is not None else np.full(n, np.nan)
    iw = spec.impurity_weight if spec.impurity_weight is not None else np.full(n, np.nan)
    rows = ((param_value, spec.eps[i], cls[i], gd[i], iw[i]) for i in range(n))
    write_csv(base + ".csv", "spectrum",
              [param_name, "eps", "class", "gap_distance", "impurity_weight"], rows)
    write_meta(base + ".meta.json",
               {"solver": spec.solver, "omega": spec.omega,
                "convergence": spec.convergence})


def write_mode_harmonics(ks, harm, base: str, meta: dict | None = None) -> None:
    """base.csv columns (j, k, re_u, im_u) for harmonics array (L+1, 2K+1)."""
    rows = ((j, int(ks[c]), harm[j, c].real, harm[j, c].imag)
            for j in range(harm.shape[0]) for c in range(harm.shape[1]))
    write_csv(base + ".csv", "mode_harmonics", ["j", "k", "re_u", "im_u"], rows)
    if meta:
        write_meta(base + ".meta.json", meta)


def write_profile(profile, base: str, meta: dict | None = None) -> None:
    """base.csv columns (j, population)."""
    rows = ((j, profile[j]) for j in range(len(profile)))
    write_csv(base + ".csv", "mode_profile", ["j", "population"], rows)
    if meta:
        write_meta(base + ".meta.json", meta)


def write_fbs_report(rep, base: str, meta: dict | None = None) -> None:
    """base.csv columns (t, p_inf[, rho_uu, rho_dd]) over one period."""
    header = ["t", "p_inf"]
    cols = [rep.times, rep.p_infinity]
    if rep.rho_fbs is not None:
        header += ["rho_uu", "rho_dd"]
        cols += [rep.rho_fbs[:, 0, 0].real, rep.rho_fbs[:, 1, 1].real]
    write_csv(base + ".csv", "fbs_report", header, zip(*cols))
    md = {"found": rep.found, "n_bound": rep.n_bound,
          "mode_index": rep.mode_index, "quasienergy": rep.quasienergy,
          "overlap_x": rep.overlap_x, "mu_phase": rep.mu_phase}
    if meta:
        md.update(meta)
    write_meta(base + ".meta.json", md)


def write_filter_report(rep, base: str) -> None:
    """base_spectra.csv (omega, G, eps2) and base_dynamics.csv (t, c0_abs)."""
    write_csv(base + "_spectra.csv", "filter_spectra", ["omega", "G", "eps2"],
              zip(rep.omega_grid, rep.noise_spectrum, rep.control_spectrum))
    write_csv(base + "_dynamics.csv", "filter_dynamics", ["t", "c0_abs"],
              zip(rep.grid_t, rep.c0_abs))
    write_meta(base + ".meta.json",
               dict(rep.meta or {}, omega_a=rep.omega_a))


def read_csv(path):
    """(header list, column dict of float/str arrays) for any schema csv."""
    with open(path, encoding="utf-8") as fh:
        first = fh.readline()
        if not first.startswith("# floquet-chain csv"):
            raise ValueError(f"{path}: missing schema line")
        header = fh.readline().strip().split(",")
        rows = [line.strip().split(",") for line in fh if line.strip()]
    cols = {}
    for i, name in enumerate(header):
        vals = [r[i] for r in rows]
        try:
            cols[name] = np.array([float(v) for v in vals])
        except ValueError:
            cols[name] = np.array(vals, dtype=object)
    return header, cols


def ensure_dir(path) -> str:
    os.makedirs(path, exist_ok=True)
    return path
