"""Render figure analogs from floquet-chain CSV datasets.

Each builder mirrors the panel structure of the corresponding figure family:
fig1  P_t heatmap over (t, a2) + quasienergy scatter vs a2
fig2  P_t curves with the bound-mode prediction + fidelity curves
fig3  spectrum scatter and P_t heatmap for the tau sweep and the T sweep
fig4  |F0|^2 curve + P_t heatmap over the symmetric amplitude
fig5  filtered vs exact dynamics, noise/control spectra, quasienergies
fig6  bound-mode site populations

Rendering is read-only; identical input bytes produce identical plotted data.
"""
from __future__ import annotations

import argparse
import os
import sys

import matplotlib
matplotlib.use("Agg")
import matplotlib.pyplot as plt
import numpy as np

from .recipes import FigureRecipe, load_recipe
from .schema import SchemaMismatch, read_meta, read_table, sweep_points


def _heatmap_from_points(dataset_dir):
    """(param values, times, P array (n_param, n_t)) from per-point dynamics."""
    _, summary = read_table(os.path.join(dataset_dir, "summary.csv"),
                            "sweep_summary")
    params = summary[list(summary)[0]]
    times, rows, idxs = None, [], []
    for idx, _, cols in sweep_points(dataset_dir, "dynamics", "trajectory"):
        if times is None:
            times = cols["t"]
        rows.append(cols["p"])
        idxs.append(idx)
    n = min(len(r) for r in rows)
    P = np.vstack([r[:n] for r in rows])
    return params[np.asarray(idxs)], times[:n], P


def _spectrum_scatter(ax, dataset_dir, xlabel):
    xs, ys, cls = [], [], []
    for _, header, cols in sweep_points(dataset_dir, "spectrum", "spectrum"):
        x = cols[header[0]]
        xs.append(x)
        ys.append(cols["eps"])
        cls.append(cols["class"])
    x = np.concatenate(xs)
    y = np.concatenate(ys)
    c = np.concatenate(cls)
    band = c == "band"
    ax.plot(x[band], y[band], ".", ms=1.5, color="0.6", label="band")
    for label, color in (("marginal", "tab:orange"), ("bound", "tab:red")):
        m = c == label
        if m.any():
            ax.plot(x[m], y[m], ".", ms=5, color=color, label=label)
    ax.set_xlabel(xlabel)
    ax.set_ylabel(r"$\epsilon$ [J]")
    ax.legend(loc="upper right", fontsize=6, markerscale=2)


def _pcolor(ax, x, t, P, xlabel, cmap):
    pc = ax.pcolormesh(t, x, P, cmap=cmap, vmin=0.0, vmax=1.0,
                       shading="nearest")
    ax.set_xlabel("t [1/J]")
    ax.set_ylabel(xlabel)
    return pc


def build_fig1(recipe):
    ds = recipe.inputs["dataset"]
    fig, (axh, axs) = plt.subplots(
        1, 2, figsize=recipe.style.get("figsize", (9, 3.6)))
    a2, t, P = _heatmap_from_points(ds)
    pc = _pcolor(axh, a2, t, P, r"$a_2$ [J]", recipe.style.get("cmap", "viridis"))
    fig.colorbar(pc, ax=axh, label=r"$P_t$")
    _spectrum_scatter(axs, ds, r"$a_2$ [J]")
    fig.suptitle("driven impurity: population map and quasienergy spectrum")
    return fig


def build_fig2(recipe):
    ds = recipe.inputs["dataset"]
    fig, (axp, axf) = plt.subplots(
        1, 2, figsize=recipe.style.get("figsize", (9, 3.6)))
    for tag, color in (("fbs", "tab:cyan"), ("nofbs", "tab:red")):
        _, dyn = read_table(os.path.join(ds, f"dynamics_{tag}.csv"),
                            "trajectory")
        axp.plot(dyn["t"], dyn["p"], color=color, lw=0.8, label=tag)
        if "f" in dyn:
            axf.plot(dyn["t"], dyn["f"], color=color, lw=0.5, label=tag)
        _, rep = read_table(os.path.join(ds, f"fbs_{tag}.csv"), "fbs_report")
        axp.axhline(rep["p_inf"].mean(), color=color, ls="-.", lw=1.0)
    axp.set_xlabel("t [1/J]")
    axp.set_ylabel(r"$P_t$")
    axp.legend(fontsize=7)
    axf.set_xlabel("t [1/J]")
    axf.set_ylabel(r"$\mathcal{F}_t$")
    axf.set_ylim(-0.02, 1.02)
    return fig


def build_fig3(recipe):
    ds = recipe.inputs["dataset"]
    fig, axes = plt.subplots(2, 2, figsize=recipe.style.get("figsize", (9, 6.5)))
    for row, (sub, xlabel) in enumerate(
            (("tau_sweep", r"$\tau$ [1/J]"), ("T_sweep", "T [1/J]"))):
        sdir = os.path.join(ds, sub)
        _spectrum_scatter(axes[row, 0], sdir, xlabel)
        x, t, P = _heatmap_from_points(sdir)
        pc = _pcolor(axes[row, 1], x, t, P, xlabel,
                     recipe.style.get("cmap", "viridis"))
        fig.colorbar(pc, ax=axes[row, 1], label=r"$P_t$")
    fig.tight_layout()
    return fig


def build_fig4(recipe):
    ds = recipe.inputs["dataset"]
    fig, (axf, axp) = plt.subplots(
        1, 2, figsize=recipe.style.get("figsize", (9, 3.6)))
    _, f0 = read_table(os.path.join(ds, "f0_curve.csv"), "f0_curve")
    axf.plot(f0["a2"], f0["f0sq"], lw=1.0)
    axf.set_xlabel(r"$a_2$ [J]")
    axf.set_ylabel(r"$|F_0|^2$")
    x, t, P = _heatmap_from_points(os.path.join(ds, "sweep"))
    pc = _pcolor(axp, x, t, P, r"$a_2$ [J]", recipe.style.get("cmap", "viridis"))
    fig.colorbar(pc, ax=axp, label=r"$P_t$")
    return fig


def build_fig5(recipe):
    ds = recipe.inputs["dataset"]
    fig, axes = plt.subplots(2, 2, figsize=recipe.style.get("figsize", (9, 6.5)))
    (axa, axb), (axc, axd) = axes
    _, fdyn = read_table(os.path.join(ds, "filter_dynamics.csv"),
                         "filter_dynamics")
    axa.plot(fdyn["t"], fdyn["c0_abs"] ** 2, lw=1.0)
    axa.set_xlabel("t [1/J]")
    axa.set_ylabel(r"filtered $|c_0|^2$")
    _, sp = read_table(os.path.join(ds, "filter_spectra.csv"), "filter_spectra")
    axb.plot(sp["omega"], sp["G"], label=r"$G(\omega+\omega_a)$", lw=1.0)
    axb.plot(sp["omega"], sp["eps2"], label=r"$|\epsilon_t(\omega)|^2$", lw=0.7)
    axb.set_xlabel(r"$\omega$ [J]")
    axb.legend(fontsize=7)
    _, dyn = read_table(os.path.join(ds, "dynamics_exact.csv"), "trajectory")
    axc.plot(dyn["t"], dyn["p"], lw=0.8, label=r"exact $P_t$")
    _, rep = read_table(os.path.join(ds, "fbs.csv"), "fbs_report")
    axc.axhline(rep["p_inf"].mean(), ls="-.", color="tab:blue",
                label="bound-mode prediction")
    axc.set_xlabel("t [1/J]")
    axc.legend(fontsize=7)
    _, spec = read_table(os.path.join(ds, "spectrum.csv"), "spectrum")
    idx = np.arange(len(spec["eps"]))
    band = spec["class"] == "band"
    axd.plot(idx[band], spec["eps"][band], ".", ms=1.5, color="0.6")
    axd.plot(idx[~band], spec["eps"][~band], ".", ms=6, color="tab:red")
    axd.set_xlabel("mode index")
    axd.set_ylabel(r"$\epsilon$ [J]")
    fig.tight_layout()
    return fig


def build_fig6(recipe):
    ds = recipe.inputs["dataset"]
    fig, ax = plt.subplots(figsize=recipe.style.get("figsize", (5.5, 3.6)))
    _, prof = read_table(os.path.join(ds, "fbs_profile.csv"), "mode_profile")
    nshow = int(recipe.style.get("sites", 60))
    ax.semilogy(prof["j"][:nshow], prof["population"][:nshow], "o-", ms=3,
                lw=0.8)
    ax.set_xlabel("site j")
    ax.set_ylabel("population")
    ax.set_title("bound-mode site distribution at t = T/4")
    return fig


_BUILDERS = {"fig1": build_fig1, "fig2": build_fig2, "fig3": build_fig3,
             "fig4": build_fig4, "fig5": build_fig5, "fig6": build_fig6}


def render(recipe: FigureRecipe) -> str:
    """Build the figure and write the image file; returns the output path."""
    fig = _BUILDERS[recipe.figure](recipe)
    out = recipe.output
    os.makedirs(os.path.dirname(os.path.abspath(out)), exist_ok=True)
    fig.savefig(out, dpi=int(recipe.style.get("dpi", 150)))
    plt.close(fig)
    return out


def main(argv=None) -> int:
    ap = argparse.ArgumentParser(prog="plotkit-render",
                                 description="render a figure recipe")
    ap.add_argument("recipe", help="recipe JSON file")
    args = ap.parse_args(argv)
    try:
        out = render(load_recipe(args.recipe))
    except SchemaMismatch as exc:
        print(f"schema mismatch: {exc}", file=sys.stderr)
        return 2
    print(out)
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
