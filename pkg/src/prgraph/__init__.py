"""Product replacement graphs of finitely generated groups."""

from __future__ import annotations

__version__ = "0.1.0"

from .errors import (CapExceededError, GraphError, GroupError, GroupOverflowError, GroupSpecError,
                     NotGeneratingError, PRGraphError)
from .graph import ExploredGraph, NielsenMove, ProductReplacementGraph, all_moves, cayley_graph
from .groups import (DihedralGroup, FiniteAbelianGroup, FreeAbelianGroup, Group, InfiniteDihedralGroup,
                     SymmetricGroup, TableGroup, parse_group_spec, quaternion_group, quotient)
from .metrics import (cheeger_exact, neighborhood_growth, return_probabilities, return_probability,
                      rho_estimate, spectral_gap)

__all__ = [
    "CapExceededError", "DihedralGroup", "ExploredGraph", "FiniteAbelianGroup", "FreeAbelianGroup",
    "GraphError", "Group", "GroupError", "GroupOverflowError", "GroupSpecError", "InfiniteDihedralGroup",
    "NielsenMove", "NotGeneratingError", "PRGraphError", "ProductReplacementGraph", "SymmetricGroup",
    "TableGroup", "all_moves", "cayley_graph", "cheeger_exact", "neighborhood_growth", "parse_group_spec",
    "quaternion_group", "quotient", "return_probabilities", "return_probability", "rho_estimate",
    "spectral_gap",
]
