"""treewalk: a simulation laboratory for tame Markov chains on groups acting
on trees.

Exact word arithmetic for free groups and free products of abelian blocks,
their Cayley and Bass-Serre trees, the coset-projection calculus on axes of
loxodromic elements, transition kernels with reproducible bulk sampling, and
a suite of experiments probing linear progress, deviation from geodesics,
translation-length genericity and central-limit behaviour.
"""

from .groups import (Block, FreeGroup, FreeProduct, FreeWord, GroupError,
                     ProductWord, parse_entry, random_element)
from .kernels import (DeterministicKernel, KernelError, LetterModel,
                      QiBijection, TamenessReport, TransitionKernel,
                      depth_relabel, exact_distribution, exact_distributions,
                      kernel_from_descriptor, parity_kernel, pushforward_kernel,
                      srw_kernel, suffix_swap, tameness_probe)
from .projections import (CosetMarking, ProjectionChain, ProjectionError,
                          ProjectionSystem, root_of)
from .sampling import (RNG_FAMILY, Snapshot, bulk_walk, endpoint_histogram,
                       experiment_key, sample_path, substream, total_variation)
from .trees import (Axis, BassSerreTree, CayleyTree, TreeError, TreeModel,
                    TreeVertex, bass_serre_tree, cayley_tree, tree_for)

__version__ = "0.1.0"

__all__ = [
    "Axis", "BassSerreTree", "Block", "CayleyTree", "CosetMarking",
    "DeterministicKernel", "FreeGroup", "FreeProduct", "FreeWord",
    "GroupError", "KernelError", "LetterModel", "ProductWord",
    "ProjectionChain", "ProjectionError", "ProjectionSystem", "QiBijection",
    "RNG_FAMILY", "Snapshot", "TamenessReport", "TransitionKernel",
    "TreeError", "TreeModel", "TreeVertex", "bass_serre_tree", "bulk_walk",
    "cayley_tree", "depth_relabel", "endpoint_histogram", "exact_distribution",
    "exact_distributions", "experiment_key", "kernel_from_descriptor",
    "parity_kernel", "parse_entry", "pushforward_kernel", "random_element",
    "root_of", "sample_path", "srw_kernel", "substream", "suffix_swap",
    "tameness_probe", "total_variation", "tree_for",
]
