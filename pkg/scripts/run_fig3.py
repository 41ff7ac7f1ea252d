#!/usr/bin/env python3
"""Fig.3 datasets: spectrum + P_t over the tau sweep (delta tau = 0.03/J at
T = 0.25pi/J) and over the T sweep (delta T = 0.09/J at tau = 0.1pi/J)."""
import argparse
import os

import numpy as np

from floquet_chain import ChainSpec, StepDrive, SweepAxis, SweepPlan, run_sweep


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--outdir", default="out/fig3")
    ap.add_argument("--quick", action="store_true")
    ap.add_argument("--workers", type=int, default=None)
    args = ap.parse_args()

    L = 120 if args.quick else 800
    horizon = 40.0 if args.quick else 100.0
    chain = ChainSpec(L=L, g=1.0, lam=20.0)
    drive = StepDrive(a1=0.0, a2=3.5, tau=0.1 * np.pi, T=0.25 * np.pi)

    tau_plan = SweepPlan(axis=SweepAxis.SWITCH_TIME_TAU,
                         start=0.03, stop=0.75, step=0.06 if args.quick else 0.03,
                         chain=chain, drive=drive,
                         outputs=("dynamics", "spectrum", "fbs"),
                         horizon=horizon, samples_per_period=20,
                         workers=args.workers)
    run_sweep(tau_plan, os.path.join(args.outdir, "tau_sweep"))
    print("tau sweep done")

    T_plan = SweepPlan(axis=SweepAxis.PERIOD_T,
                       start=0.4, stop=3.1, step=0.18 if args.quick else 0.09,
                       chain=chain, drive=drive,
                       outputs=("dynamics", "spectrum", "fbs"),
                       horizon=horizon, samples_per_period=20,
                       workers=args.workers)
    run_sweep(T_plan, os.path.join(args.outdir, "T_sweep"))
    print(f"fig3 datasets -> {args.outdir}")


if __name__ == "__main__":
    main()