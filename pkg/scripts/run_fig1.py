#!/usr/bin/env python3
"""Fig.1 dataset: P_t + quasienergy spectrum over the a2 sweep (step drive,
T = 0.25pi/J, tau = 0.1pi/J, a1 = 0, lam = 20J, g = J)."""
import argparse

import numpy as np

from floquet_chain import ChainSpec, StepDrive, SweepAxis, SweepPlan, run_sweep


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--outdir", default="out/fig1")
    ap.add_argument("--quick", action="store_true", help="coarse small-L version")
    ap.add_argument("--workers", type=int, default=None)
    args = ap.parse_args()

    L = 120 if args.quick else 800
    step = 2.0 if args.quick else 0.5
    horizon = 40.0 if args.quick else 100.0

    plan = SweepPlan(
        axis=SweepAxis.AMPLITUDE_A2, start=0.0, stop=40.0, step=step,
        chain=ChainSpec(L=L, g=1.0, lam=20.0),
        drive=StepDrive(a1=0.0, a2=0.0, tau=0.1 * np.pi, T=0.25 * np.pi),
        outputs=("dynamics", "spectrum", "fbs"),
        horizon=horizon, samples_per_period=20, workers=args.workers,
    )
    res = run_sweep(plan, args.outdir)
    c = res.correlation
    print(f"fig1 sweep done: agreement {c['agree']}/{c['scored']} -> {args.outdir}")


if __name__ == "__main__":
    main()