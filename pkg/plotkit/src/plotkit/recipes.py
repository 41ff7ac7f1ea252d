"""Figure recipes: which dataset goes into which figure analog."""
from __future__ import annotations

import json
from dataclasses import dataclass, field

FIGURE_IDS = ("fig1", "fig2", "fig3", "fig4", "fig5", "fig6")


@dataclass
class FigureRecipe:
    figure: str                      # fig1..fig6
    inputs: dict                     # paths; most figures take {"dataset": dir}
    output: str                      # image file path
    style: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.figure not in FIGURE_IDS:
            raise ValueError(f"unknown figure id {self.figure!r}; "
                             f"choose from {FIGURE_IDS}")
        if "dataset" not in self.inputs:
            raise ValueError("recipe inputs need a 'dataset' path")


def load_recipe(path: str) -> FigureRecipe:
    with open(path, encoding="utf-8") as fh:
        raw = json.load(fh)
    return FigureRecipe(figure=raw["figure"], inputs=raw.get("inputs", {}),
                        output=raw["output"], style=raw.get("style", {}))
