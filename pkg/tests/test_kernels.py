import numpy as np
import pytest

from epdkit import _pykernels, kernels
from epdkit.epd import TIE_RTOL
from epdkit.generate import GenParams, gen_instance

compiled = kernels.compiled
needs_ext = pytest.mark.skipif(compiled is None, reason="Cython extension not built")


def args(tree, p):
    return (
        tree.parent,
        tree.length,
        tree.leaf_node,
        tree.leaf_lo,
        tree.leaf_hi,
        tree.species_at,
        np.asarray(p)[tree.species_at],
    )


def test_backend_selected():
    assert kernels.BACKEND == ("cython" if compiled is not None else "python")
    assert kernels.greedy is (compiled or _pykernels).greedy


def medium_instances():
    params = GenParams(internal_node_range=(20, 200))
    for i in range(12):
        mode = "per-species" if i % 3 == 2 else "per-category"
        yield gen_instance(99, i, GenParams(**{**params.__dict__, "probability_mode": mode}))


@needs_ext
@pytest.mark.parametrize("inst", list(medium_instances()), ids=lambda i: str(i.provenance["index"]))
def test_bit_identical(inst):
    tree = inst.tree
    a = args(tree, inst.probs1)
    assert np.array_equal(
        _pykernels.extinction_products(tree.parent, tree.leaf_node, a[-1]),
        compiled.extinction_products(tree.parent, tree.leaf_node, a[-1]),
    )
    prod = compiled.extinction_products(tree.parent, tree.leaf_node, a[-1])
    assert np.array_equal(
        _pykernels.path_gains(tree.parent, tree.length, tree.leaf_node, prod),
        compiled.path_gains(tree.parent, tree.length, tree.leaf_node, prod),
    )
    k = tree.n_species
    pp, gp = _pykernels.greedy(*a, k, TIE_RTOL)
    pc, gc = compiled.greedy(*a, k, TIE_RTOL)
    assert np.array_equal(pp, pc)
    assert np.array_equal(gp, gc)  # exact, not approximate


@needs_ext
def test_accepts_readonly_arrays(fig2):
    tree, p = fig2
    assert not tree.parent.flags.writeable
    compiled.greedy(*args(tree, p), 3, TIE_RTOL)
