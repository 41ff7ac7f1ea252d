"""Command-line entry points.

    floquet-chain dynamics --preset fig2 --a2 36
    floquet-chain spectrum --preset fig1 --a2-scan 0:40:0.5
    floquet-chain fbs      --preset fig6
    floquet-chain filter   --preset fig5
    floquet-chain sweep    --plan plan.ini   (or --preset fig1|fig3tau|fig3T|fig4)
    floquet-chain converge --preset fig1 --a2 3.5

All numeric inputs are in units of J (energies) and 1/J (times); pi-multiples
are accepted with a literal suffix, e.g. --T 0.25pi.  Exit codes: 0 success,
2 validation, 3 numerical non-convergence, 4 I/O.  Output directory comes
from --outdir or the FLOQUET_CHAIN_OUTDIR environment variable.
"""
from __future__ import annotations

import argparse
import json
import os
import sys

import numpy as np

from . import io
from .config import RunConfig, build_config, PRESETS
from .dynamics import (SuperpositionState, fidelity_series, propagate_lattice,
                       solve_volterra)
from .errors import ConvergenceError, ValidationError
from .filtering import filtered_population
from .floquet import KPolicy, classify_modes, fbs_steady_state, monodromy_spectrum
from .model import KernelMode
from .sweep import SweepAxis, SweepPlan, convergence_report, run_sweep

_EXIT_VALIDATION = 2
_EXIT_CONVERGENCE = 3
_EXIT_IO = 4


def _common_flags(p: argparse.ArgumentParser):
    p.add_argument("--preset", choices=sorted(PRESETS), default=None)
    p.add_argument("--config", default=None, help="INI config file")
    p.add_argument("--outdir", default=None)
    for name in ("L", "samples-per-period", "k0", "kstep", "kmax", "j-loc",
                 "workers", "nt"):
        p.add_argument(f"--{name}", type=int, default=None)
    for name in ("J", "g", "lam", "T", "tau", "a1", "a2", "horizon", "h",
                 "gap-tol", "w-min", "alpha", "beta", "profile-t", "ktol"):
        p.add_argument(f"--{name}", type=str, default=None)
    p.add_argument("--kernel-mode", choices=[m.value for m in KernelMode],
                   default=None, dest="kernel_mode")


def _cfg_from_args(args) -> RunConfig:
    overrides = {k.replace("-", "_"): v for k, v in vars(args).items()
                 if k not in ("preset", "config", "cmd", "func", "plan", "a2_scan")}
    cfg = build_config(args.preset, args.config, overrides)
    if getattr(args, "a2_scan", None):
        cfg.scan = args.a2_scan
        cfg.axis = "a2"
    if args.outdir is None and "FLOQUET_CHAIN_OUTDIR" in os.environ:
        cfg.outdir = os.environ["FLOQUET_CHAIN_OUTDIR"]
    return cfg


def _outbase(cfg: RunConfig, name: str) -> str:
    io.ensure_dir(cfg.outdir)
    return os.path.join(cfg.outdir, name)


def cmd_dynamics(args) -> int:
    cfg = _cfg_from_args(args)
    chain, drive = cfg.chain(), cfg.drive()
    vol = solve_volterra(chain, drive, cfg.horizon, h=cfg.h)
    # cross-check lattice run on a subgrid of the volterra grid
    cells = int(round(drive.T / vol.meta["h"]))
    stride = 1
    while cells // stride > 8000 or cells % stride:
        stride += 1
    lat = propagate_lattice(chain, drive, cfg.horizon, cells // stride)
    n = min(len(lat.p), (len(vol.p) - 1) // stride + 1)
    resid = float(np.abs(vol.p[::stride][:n] - lat.p[:n]).max())
    state = SuperpositionState(cfg.alpha + 0j, cfg.beta + 0j)
    F = fidelity_series(vol, drive, chain, state)
    vol.meta["config"] = cfg.resolved()
    vol.meta["cross_check_max_dP"] = resid
    lat.meta["config"] = cfg.resolved()
    io.write_trajectory(vol, _outbase(cfg, "dynamics_volterra"), fidelity=F)
    Flat = fidelity_series(lat, drive, chain, state)
    io.write_trajectory(lat, _outbase(cfg, "dynamics_lattice"), fidelity=Flat)
    print(f"dynamics: P(end) = {vol.p[-1]:.6f}; cross-check max|dP| = {resid}")
    return 0


def _classified_spectrum(cfg: RunConfig):
    chain, drive = cfg.chain(), cfg.drive()
    spec = monodromy_spectrum(chain, drive)
    from .errors import GapUndefined
    try:
        classify_modes(spec, chain, gap_tol=cfg.gap_tol, w_min=cfg.w_min,
                       j_loc=cfg.j_loc)
    except GapUndefined:
        pass
    return chain, drive, spec


def cmd_spectrum(args) -> int:
    cfg = _cfg_from_args(args)
    if cfg.scan:
        start, stop, step = cfg.scan_triplet()
        plan = SweepPlan(axis=SweepAxis(cfg.axis), start=start, stop=stop,
                         step=step, chain=cfg.chain(), drive=cfg.drive(),
                         outputs=("spectrum",), horizon=cfg.horizon,
                         samples_per_period=cfg.samples_per_period,
                         gap_tol=cfg.gap_tol, w_min=cfg.w_min, j_loc=cfg.j_loc,
                         workers=cfg.workers)
        out = os.path.join(cfg.outdir, "spectrum_scan")
        res = run_sweep(plan, out)
        print(f"spectrum scan: {res.correlation['points']} points -> {out}")
        return 0
    chain, drive, spec = _classified_spectrum(cfg)
    io.write_spectrum(spec, _outbase(cfg, "spectrum"),
                      param_name="a2", param_value=cfg.a2)
    io.write_meta(os.path.join(cfg.outdir, "spectrum.config.json"), cfg.resolved())
    counts = spec.counts()
    print(f"spectrum: {len(spec.eps)} quasienergies, classes {counts}")
    return 0


def cmd_fbs(args) -> int:
    cfg = _cfg_from_args(args)
    chain, drive, spec = _classified_spectrum(cfg)
    rep = fbs_steady_state(spec, chain, drive)
    io.write_fbs_report(rep, _outbase(cfg, "fbs"), meta={"config": cfg.resolved()})
    if rep.found:
        t_prof = cfg.profile_t if cfg.profile_t is not None else drive.T / 4
        from .floquet import mode_profile
        prof = mode_profile(spec, rep.mode_index, t_prof)
        io.write_profile(prof, _outbase(cfg, "fbs_profile"),
                         meta={"t": t_prof, "quasienergy": rep.quasienergy,
                               "config": cfg.resolved()})
        print(f"fbs: found (eps = {rep.quasienergy:.6f}, |x|^2 = "
              f"{abs(rep.overlap_x) ** 2:.4f}); profile at t = {t_prof:.4f}")
    else:
        print("fbs: no bound mode")
    return 0


def cmd_filter(args) -> int:
    cfg = _cfg_from_args(args)
    chain, drive = cfg.chain(), cfg.drive()
    rep = filtered_population(chain, drive, cfg.horizon, nt=cfg.nt)
    rep.meta["config"] = cfg.resolved()
    lat = propagate_lattice(chain, drive, cfg.horizon, cfg.samples_per_period)
    window = min(20.0, cfg.horizon / 2)
    plateau = lat.window_mean(cfg.horizon - window, cfg.horizon)
    rep.meta["exact_plateau"] = plateau
    rep.meta["filtered_p_end"] = float(rep.c0_abs[-1] ** 2)
    io.write_filter_report(rep, _outbase(cfg, "filter"))
    io.write_trajectory(lat, _outbase(cfg, "filter_exact"))
    print(f"filter: filtered P(end) = {rep.c0_abs[-1] ** 2:.6f}, "
          f"exact plateau = {plateau:.6f}")
    return 0


def _plan_from_ini(path: str) -> SweepPlan:
    import configparser
    from .config import parse_quantity
    cp = configparser.ConfigParser()
    if not cp.read(path):
        raise OSError(f"plan file not found: {path}")
    cfg = build_config(
        None, None,
        {k: v for s in ("chain", "drive", "solver") if cp.has_section(s)
         for k, v in cp.items(s)})
    sw = dict(cp.items("sweep")) if cp.has_section("sweep") else {}
    outputs = tuple(s.strip() for s in sw.get("outputs", "dynamics,spectrum,fbs").split(","))
    return SweepPlan(
        axis=SweepAxis(sw.get("axis", "a2")),
        start=parse_quantity(sw.get("start", "0")),
        stop=parse_quantity(sw.get("stop", "1")),
        step=parse_quantity(sw.get("step", "0.5")),
        chain=cfg.chain(), drive=cfg.drive(), outputs=outputs,
        horizon=parse_quantity(sw.get("horizon", cfg.horizon)),
        samples_per_period=int(sw.get("samples_per_period", cfg.samples_per_period)),
        plateau_threshold=float(sw.get("plateau_threshold", 0.05)),
        workers=int(sw["workers"]) if "workers" in sw else None,
    )


def cmd_sweep(args) -> int:
    if args.plan:
        plan = _plan_from_ini(args.plan)
        outdir = args.outdir or os.environ.get("FLOQUET_CHAIN_OUTDIR", "out")
    else:
        cfg = _cfg_from_args(args)
        if not cfg.scan:
            raise ValidationError("sweep needs --plan FILE or a preset with a scan")
        start, stop, step = cfg.scan_triplet()
        plan = SweepPlan(axis=SweepAxis(cfg.axis), start=start, stop=stop,
                         step=step, chain=cfg.chain(), drive=cfg.drive(),
                         horizon=cfg.horizon,
                         samples_per_period=cfg.samples_per_period,
                         gap_tol=cfg.gap_tol, w_min=cfg.w_min,
                         j_loc=cfg.j_loc, workers=cfg.workers)
        outdir = cfg.outdir
    out = os.path.join(outdir, "sweep")
    res = run_sweep(plan, out)
    c = res.correlation
    print(f"sweep: {c['points']} points, agreement "
          f"{c['agree']}/{c['scored']} = {c['agreement']:.3f} -> {out}")
    return 0


def cmd_converge(args) -> int:
    cfg = _cfg_from_args(args)
    rep = convergence_report(
        cfg.chain(), cfg.drive(), horizon=min(cfg.horizon, 20.0), h0=cfg.h,
        sambe_policy=KPolicy(k0=cfg.k0, step=cfg.kstep, tol=cfg.ktol,
                             k_max=cfg.kmax))
    io.ensure_dir(cfg.outdir)
    io.write_meta(os.path.join(cfg.outdir, "convergence.json"),
                  dict(rep, config=cfg.resolved()))
    for k, v in rep.items():
        print(f"{k}: {v}")
    return 0


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="floquet-chain", description=__doc__,
                                 formatter_class=argparse.RawDescriptionHelpFormatter)
    sub = ap.add_subparsers(dest="cmd", required=True)
    for name, fn in (("dynamics", cmd_dynamics), ("spectrum", cmd_spectrum),
                     ("fbs", cmd_fbs), ("filter", cmd_filter),
                     ("sweep", cmd_sweep), ("converge", cmd_converge)):
        p = sub.add_parser(name)
        _common_flags(p)
        if name == "spectrum":
            p.add_argument("--a2-scan", default=None, dest="a2_scan",
                           help="start:stop:step")
        if name == "sweep":
            p.add_argument("--plan", default=None, help="sweep plan INI file")
        p.set_defaults(func=fn)
    return ap


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except ValidationError as exc:
        json.dump({"error": type(exc).__name__, "message": str(exc)},
                  sys.stderr, sort_keys=True)
        sys.stderr.write("\n")
        return _EXIT_VALIDATION
    except ConvergenceError as exc:
        json.dump({"error": type(exc).__name__, "message": str(exc)},
                  sys.stderr, sort_keys=True)
        sys.stderr.write("\n")
        return _EXIT_CONVERGENCE
    except OSError as exc:
        json.dump({"error": type(exc).__name__, "message": str(exc)},
                  sys.stderr, sort_keys=True)
        sys.stderr.write("\n")
        return _EXIT_IO


if __name__ == "__main__":
    raise SystemExit(main())
