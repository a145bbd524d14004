"""Expected phylogenetic diversity (ePD) and optimal species protection."""

from .epd import (
    ProbabilityError,
    ProtectionSet,
    brute_force_protect,
    epd,
    epd_by_outcome_enumeration,
    epd_with_protection,
    greedy_protect,
    hedge_scores,
)
from .kernels import BACKEND
from .tree import (
    Phylogeny,
    TreeError,
    build_tree,
    clade,
    is_ultrametric,
    pd_of_subset,
    root_path_arcs,
    total_pd,
    ultrametrize,
)

__version__ = "0.1.0"
