"""Small example trees bundled with the package."""

from __future__ import annotations

from pathlib import Path

import numpy as np

from .newick import read_newick
from .tables import read_species_table
from .tree import Phylogeny

DATA_DIR = Path(__file__).parent / "data"


def path(name: str) -> Path:
    return DATA_DIR / name


def figure1() -> Phylogeny:
    """7-species ultrametric tree (10 branches, height 10)."""
    return read_newick(path("figure1.nwk"))


def figure2() -> tuple[Phylogeny, np.ndarray]:
    """8-species tree and the extinction probability of each species."""
    tree = read_newick(path("figure2.nwk"))
    table = read_species_table(path("figure2.csv"), tree)
    return tree, table.p1
