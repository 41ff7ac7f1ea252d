"""Parameter sweeps over drive knobs, with the FBS-vs-plateau correlation summary.

Grid points are independent work units executed in spawned single-threaded
worker processes (BLAS pinned to one thread), merged by grid index, so a
sweep is deterministic across runs and worker counts.  Per-point failures
are recorded and the sweep continues.
"""
from __future__ import annotations

import enum
import os
from dataclasses import dataclass, replace, asdict, field

import numpy as np

from .errors import GapUndefined, PlanInvalid, ValidationError
from .model import ChainSpec, StepDrive
from .dynamics import propagate_lattice, solve_volterra
from .floquet import (MARGINAL, classify_modes, default_gap_tol,
                      monodromy_spectrum, solve_sambe, KPolicy)
from .filtering import filtered_population
from . import io


class SweepAxis(enum.Enum):
    AMPLITUDE_A2 = "a2"
    SWITCH_TIME_TAU = "tau"
    PERIOD_T = "T"
    SYMMETRIC_AMPLITUDE = "sym_a2"


@dataclass(frozen=True)
class SweepPlan:
    axis: SweepAxis
    start: float
    stop: float
    step: float
    chain: ChainSpec
    drive: StepDrive                      # template; the axis field is replaced per point
    outputs: tuple = ("dynamics", "spectrum", "fbs")
    horizon: float = 100.0
    samples_per_period: int = 40
    plateau_window: float = 20.0
    plateau_threshold: float = 0.05
    gap_tol: float | None = None
    w_min: float = 0.25
    j_loc: int = 20
    workers: int | None = None

    def __post_init__(self):
        if self.step <= 0:
            raise PlanInvalid(f"step must be > 0, got {self.step}")
        if self.stop < self.start:
            raise PlanInvalid("empty range: stop < start")
        bad = set(self.outputs) - {"dynamics", "spectrum", "fbs", "filter"}
        if bad:
            raise PlanInvalid(f"unknown outputs {sorted(bad)}")
        for v in self.grid():
            try:
                point_params(self, v)
            except ValidationError as exc:
                raise PlanInvalid(f"grid point {v} invalid: {exc}") from exc

    def grid(self) -> np.ndarray:
        n = int(np.floor((self.stop - self.start) / self.step + 1e-9)) + 1
        return self.start + self.step * np.arange(n)


def point_params(plan: SweepPlan, value: float):
    """(chain, drive) at one grid point."""
    d = plan.drive
    if plan.axis is SweepAxis.AMPLITUDE_A2:
        d = replace(d, a2=value)
    elif plan.axis is SweepAxis.SWITCH_TIME_TAU:
        d = replace(d, tau=value)
    elif plan.axis is SweepAxis.PERIOD_T:
        d = replace(d, T=value)
    elif plan.axis is SweepAxis.SYMMETRIC_AMPLITUDE:
        d = replace(d, a1=-value, a2=value)
    return plan.chain, d


def _point_record(plan: SweepPlan, index: int, value: float, outdir: str | None):
    chain, drive = point_params(plan, value)
    rec = {
        "index": index, "value": value, "status": "ok",
        "fbs": False, "n_bound": 0, "marginal": False, "gap_undefined": False,
        "gap_distance": 0.0, "plateau": np.nan, "filter_p": np.nan,
        "error": "",
    }
    try:
        traj = None
        if "dynamics" in plan.outputs or "fbs" in plan.outputs:
            traj = propagate_lattice(chain, drive, plan.horizon,
                                     plan.samples_per_period)
            rec["plateau"] = traj.window_mean(plan.horizon - plan.plateau_window,
                                              plan.horizon)
        spec = None
        if "spectrum" in plan.outputs or "fbs" in plan.outputs:
            spec = monodromy_spectrum(chain, drive)
            try:
                classify_modes(spec, chain, gap_tol=plan.gap_tol,
                               w_min=plan.w_min, j_loc=plan.j_loc)
                bound = spec.bound_indices()
                rec["n_bound"] = len(bound)
                rec["fbs"] = len(bound) > 0
                rec["marginal"] = bool(np.any(spec.classification == MARGINAL))
                if len(bound):
                    rec["gap_distance"] = float(spec.gap_distance[bound].max())
                gt = plan.gap_tol or default_gap_tol(chain, drive.omega)
                if drive.omega > chain.bandwidth and \
                        (drive.omega - chain.bandwidth) < 2.0 * gt:
                    rec["marginal"] = True   # gap narrower than the marginal zone
            except GapUndefined:
                rec["gap_undefined"] = True
        if "filter" in plan.outputs:
            frep = filtered_population(chain, drive, plan.horizon, nt=101)
            rec["filter_p"] = float(frep.c0_abs[-1] ** 2)
        if outdir:
            stem = os.path.join(outdir, "points", f"point_{index:04d}")
            if traj is not None and "dynamics" in plan.outputs:
                io.write_trajectory(traj, stem + "_dynamics")
            if spec is not None:
                io.write_spectrum(spec, stem + "_spectrum",
                                  param_name=plan.axis.value, param_value=value)
    except Exception as exc:  # per-point failures recorded, sweep continues
        rec["status"] = "failed"
        rec["error"] = f"{type(exc).__name__}: {exc}"
    return rec


def _worker(args):
    plan, index, value, outdir = args
    return _point_record(plan, index, value, outdir)


@dataclass
class SweepResult:
    plan: SweepPlan
    records: list
    correlation: dict = field(default_factory=dict)

    def column(self, name):
        return np.array([r[name] for r in self.records])


def _correlation_summary(plan: SweepPlan, records) -> dict:
    """Agreement of 'bound mode exists' with 'plateau above threshold',
    marginal-classified and failed points excluded."""
    ok = [r for r in records if r["status"] == "ok" and not r["marginal"]]
    n_agree = sum((r["fbs"] == (r["plateau"] > plan.plateau_threshold)) for r in ok)
    return {
        "points": len(records),
        "scored": len(ok),
        "excluded_marginal": sum(r["marginal"] for r in records),
        "failed": sum(r["status"] != "ok" for r in records),
        "agree": n_agree,
        "agreement": n_agree / len(ok) if ok else np.nan,
        "plateau_threshold": plan.plateau_threshold,
    }


def run_sweep(plan: SweepPlan, outdir: str | None = None) -> SweepResult:
    """Execute every grid point; write per-point CSVs, summary.csv, manifest.json."""
    values = plan.grid()
    if outdir:
        io.ensure_dir(outdir)
        io.ensure_dir(os.path.join(outdir, "points"))
    tasks = [(plan, i, float(v), outdir) for i, v in enumerate(values)]
    workers = plan.workers if plan.workers is not None else (os.cpu_count() or 1)
    workers = max(1, min(workers, len(tasks)))
    if workers == 1:
        records = [_worker(t) for t in tasks]
    else:
        import multiprocessing as mp
        saved = {k: os.environ.get(k) for k in
                 ("OPENBLAS_NUM_THREADS", "OMP_NUM_THREADS", "MKL_NUM_THREADS")}
        os.environ.update(OPENBLAS_NUM_THREADS="1", OMP_NUM_THREADS="1",
                          MKL_NUM_THREADS="1")
        try:
            ctx = mp.get_context("spawn")
            with ctx.Pool(processes=workers) as pool:
                records = pool.map(_worker, tasks, chunksize=1)
        finally:
            for k, v in saved.items():
                if v is None:
                    os.environ.pop(k, None)
                else:
                    os.environ[k] = v
    records.sort(key=lambda r: r["index"])
    corr = _correlation_summary(plan, records)
    result = SweepResult(plan=plan, records=records, correlation=corr)
    if outdir:
        io.write_csv(
            os.path.join(outdir, "summary.csv"), "sweep_summary",
            [plan.axis.value, "status", "fbs", "n_bound", "marginal",
             "gap_undefined", "gap_distance", "plateau", "filter_p"],
            ((r["value"], r["status"], r["fbs"], r["n_bound"], r["marginal"],
              r["gap_undefined"], r["gap_distance"], r["plateau"], r["filter_p"])
             for r in records),
        )
        plan_dict = asdict(plan)
        plan_dict["axis"] = plan.axis.value
        plan_dict["chain"]["kernel_mode"] = plan.chain.kernel_mode.value
        from . import __version__
        io.write_meta(os.path.join(outdir, "manifest.json"),
                      {"plan": plan_dict, "correlation": corr,
                       "version": __version__})
    return result


def convergence_report(chain: ChainSpec, drive: StepDrive,
                       horizon: float = 20.0, h0: float | None = None,
                       sambe_policy: KPolicy = KPolicy()) -> dict:
    """Observable drift under h-halving, K-growth, and L-doubling."""
    rep = {}
    t1 = solve_volterra(chain, drive, horizon, h=h0)
    h = t1.meta["h"]
    t2 = solve_volterra(chain, drive, horizon, h=h / 2)
    n = min(len(t1.p), (len(t2.p) + 1) // 2)
    rep["volterra_h"] = {
        "h": h, "h_half": h / 2,
        "max_dP": float(np.abs(t1.p[:n] - t2.p[::2][:n]).max()),
    }
    try:
        s1 = solve_sambe(chain, drive, sambe_policy)
        rep["sambe_K"] = {
            "K_final": s1.convergence.get("K_final"),
            "final_shift": s1.convergence.get("final_shift"),
            "tol": sambe_policy.tol,
            "converged": s1.convergence.get("converged", False),
        }
    except Exception as exc:
        rep["sambe_K"] = {"error": f"{type(exc).__name__}: {exc}"}
    big = replace(chain, L=2 * chain.L)
    w = plateau_window = min(20.0, horizon / 2)
    pl1 = propagate_lattice(chain, drive, horizon).window_mean(horizon - w, horizon)
    pl2 = propagate_lattice(big, drive, horizon).window_mean(horizon - w, horizon)
    rep["lattice_L"] = {"L": chain.L, "L2": big.L, "plateau": pl1,
                        "plateau_2L": pl2, "drift": abs(pl1 - pl2),
                        "window": plateau_window}
    return rep
