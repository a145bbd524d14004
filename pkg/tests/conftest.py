import numpy as np
import pytest

from epdkit import datasets
from epdkit.generate import random_tree

# criterion number -> (description, passed); filled by test_acceptance
ACCEPTANCE: dict[int, tuple[str, bool, str]] = {}


def pytest_addoption(parser):
    parser.addoption("--lemur-tree", default=None, help="Newick file of the 52-lemur tree")
    parser.addoption("--lemur-table", default=None, help="species,category table for it")


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(ACCEPTANCE):
        desc, ok, note = ACCEPTANCE[n]
        status = {True: "PASS", False: "FAIL", None: "SKIP"}[ok]
        terminalreporter.write_line(f"[{status}] AC{n}: {desc}" + (f" ({note})" if note else ""))


@pytest.fixture(scope="session")
def fig1():
    return datasets.figure1()


@pytest.fixture(scope="session")
def fig2():
    return datasets.figure2()


def small_case(seed, n_max=12, integer=False):
    """Random tree with n <= n_max species and a probability vector."""
    rng = np.random.default_rng(seed)
    n = int(rng.integers(2, n_max + 1))
    tree = random_tree(rng, n, max_children=int(rng.integers(2, 5)), integer_lengths=integer)
    if integer:
        p = rng.choice([0.0, 0.1, 0.2, 0.5, 0.9, 1.0], size=n)
    else:
        p = rng.uniform(0, 1, size=n)
    return tree, p, rng
