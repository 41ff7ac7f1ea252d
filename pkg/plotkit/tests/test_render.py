import json
import os
import shutil

import numpy as np
import pytest

from plotkit import FigureRecipe, SchemaMismatch, load_recipe, render
from plotkit.render import _BUILDERS, _heatmap_from_points
from plotkit.schema import read_table

HERE = os.path.dirname(os.path.abspath(__file__))
REF = os.path.normpath(os.path.join(HERE, "..", "reference_data"))

needs_ref = pytest.mark.skipif(not os.path.isdir(REF),
                               reason="reference dataset not generated")


def dataset_for(figid):
    sub = {"fig1": "fig1", "fig2": "fig2", "fig3": "fig3",
           "fig4": "fig4", "fig5": "fig5", "fig6": "fig6"}[figid]
    return os.path.join(REF, sub)


@needs_ref
@pytest.mark.parametrize("figid", sorted(_BUILDERS))
def test_render_all_reference_figures(figid, tmp_path):
    out = tmp_path / f"{figid}.png"
    recipe = FigureRecipe(figure=figid,
                          inputs={"dataset": dataset_for(figid)},
                          output=str(out))
    assert render(recipe) == str(out)
    assert out.exists() and out.stat().st_size > 5000


@needs_ref
def test_plotted_series_match_input(tmp_path):
    # rendering is read-only: the drawn series equal the CSV columns
    ds = dataset_for("fig6")
    recipe = FigureRecipe(figure="fig6", inputs={"dataset": ds},
                          output=str(tmp_path / "f6.png"), style={"sites": 40})
    fig = _BUILDERS["fig6"](recipe)
    line = fig.axes[0].lines[0]
    _, prof = read_table(os.path.join(ds, "fbs_profile.csv"), "mode_profile")
    assert np.array_equal(line.get_xdata(), prof["j"][:40])
    assert np.array_equal(line.get_ydata(), prof["population"][:40])


@needs_ref
def test_heatmap_alignment():
    a2, t, P = _heatmap_from_points(dataset_for("fig1"))
    assert P.shape == (len(a2), len(t))
    assert np.all((P >= 0) & (P <= 1 + 1e-9))


@needs_ref
def test_schema_mismatch_missing_column(tmp_path):
    src = os.path.join(dataset_for("fig6"), "fbs_profile.csv")
    lines = open(src).read().splitlines()
    # drop the population column
    broken = tmp_path / "ds"
    broken.mkdir()
    with open(broken / "fbs_profile.csv", "w") as fh:
        fh.write(lines[0] + "\n")
        fh.write("j,pop\n")
        for ln in lines[2:]:
            fh.write(ln + "\n")
    recipe = FigureRecipe(figure="fig6", inputs={"dataset": str(broken)},
                          output=str(tmp_path / "x.png"))
    with pytest.raises(SchemaMismatch, match="population"):
        render(recipe)


@needs_ref
def test_schema_mismatch_wrong_kind(tmp_path):
    ds = dataset_for("fig5")
    with pytest.raises(SchemaMismatch, match="kind"):
        read_table(os.path.join(ds, "filter_spectra.csv"), "trajectory")


def test_recipe_validation(tmp_path):
    with pytest.raises(ValueError):
        FigureRecipe(figure="fig7", inputs={"dataset": "x"}, output="y.png")
    with pytest.raises(ValueError):
        FigureRecipe(figure="fig1", inputs={}, output="y.png")
    rj = tmp_path / "r.json"
    rj.write_text(json.dumps({"figure": "fig1",
                              "inputs": {"dataset": "d"},
                              "output": "o.png", "style": {"dpi": 72}}))
    rec = load_recipe(str(rj))
    assert rec.figure == "fig1" and rec.style["dpi"] == 72


@needs_ref
def test_cli_entry(tmp_path):
    from plotkit.render import main
    rj = tmp_path / "r.json"
    rj.write_text(json.dumps({
        "figure": "fig2", "inputs": {"dataset": dataset_for("fig2")},
        "output": str(tmp_path / "fig2.png")}))
    assert main([str(rj)]) == 0
    assert (tmp_path / "fig2.png").exists()
    bad = tmp_path / "bad.json"
    bad.write_text(json.dumps({
        "figure": "fig2", "inputs": {"dataset": str(tmp_path)},
        "output": str(tmp_path / "nope.png")}))
    assert main([str(bad)]) == 2
