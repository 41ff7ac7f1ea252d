#!/usr/bin/env python3
"""Generate the small reference dataset shipped with plotkit (small L, coarse
grids; exercises every CSV schema the figure recipes consume)."""
import argparse
import os
import subprocess
import sys

ap = argparse.ArgumentParser()
ap.add_argument("--outdir", default="plotkit/reference_data")
args = ap.parse_args()

here = os.path.dirname(os.path.abspath(__file__))
env = dict(os.environ)


def run(script, *extra):
    subprocess.run([sys.executable, os.path.join(here, script), *extra],
                   check=True, env=env)


run("run_fig1.py", "--quick", "--outdir", os.path.join(args.outdir, "fig1"),
    "--workers", "2")
run("run_fig2.py", "--L", "120", "--horizon", "40",
    "--outdir", os.path.join(args.outdir, "fig2"))
run("run_fig3.py", "--quick", "--outdir", os.path.join(args.outdir, "fig3"),
    "--workers", "2")
run("run_fig4.py", "--quick", "--outdir", os.path.join(args.outdir, "fig4"),
    "--workers", "2")
run("run_fig5.py", "--L", "120", "--horizon", "40",
    "--outdir", os.path.join(args.outdir, "fig5"))
run("run_fig6.py", "--L", "120", "--outdir", os.path.join(args.outdir, "fig6"))
print(f"reference dataset -> {args.outdir}")
