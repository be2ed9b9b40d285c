"""Exact computations with vertex operator algebras, Zhu algebras and V-bundles."""
from __future__ import annotations

from .kernel import GradedElement, Subspace, enumerate_basis, q_str
from .voa import CommAssocData, VOAInstance, alpha, comm_assoc, heisenberg

__all__ = ["CommAssocData", "GradedElement", "Subspace", "VOAInstance", "alpha", "comm_assoc",
           "enumerate_basis", "heisenberg", "q_str"]
