"""Exact uniform sampling of binary and unary-binary trees by grafting,
with every random bit metered."""

from holotree.arena import Arity, ChildKind, InvariantError, Side, TreeArena, WordError, decode
from holotree.bitsource import ChoiceScript, DyadicProbability, MeteredBitSource, derive_seed
from holotree.catalan import (
    FCase, graft_F, graft_F_inverse, sample_binary_efficient, sample_binary_rejection,
    sample_binary_remy_classic, try_sample_binary,
)
from holotree.motzkin import GCase, graft_G1, graft_G2, graft_G345, graft_G_inverse, sample_motzkin, try_sample_motzkin
from holotree.pointing import BOTTOM, Color, ColorPoint, repoint, repoint_inverse
from holotree.report import SampleReport
from holotree.weighted import (
    BranchPlan, HCase, UnaryWeight, graft_H, graft_H_inverse, make_branch_plan, sample_weighted, try_sample_weighted,
)

__version__ = "0.1.0"

__all__ = [
    "Arity", "ChildKind", "InvariantError", "Side", "TreeArena", "WordError", "decode",
    "ChoiceScript", "DyadicProbability", "MeteredBitSource", "derive_seed",
    "FCase", "graft_F", "graft_F_inverse", "sample_binary_efficient", "sample_binary_rejection",
    "sample_binary_remy_classic", "try_sample_binary",
    "GCase", "graft_G1", "graft_G2", "graft_G345", "graft_G_inverse", "sample_motzkin", "try_sample_motzkin",
    "BOTTOM", "Color", "ColorPoint", "repoint", "repoint_inverse",
    "SampleReport",
    "BranchPlan", "HCase", "UnaryWeight", "graft_H", "graft_H_inverse", "make_branch_plan",
    "sample_weighted", "try_sample_weighted",
]
