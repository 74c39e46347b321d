"""Exact solvers for M-free edition of bipartite draft-graphs (the
Minimum-Flip Supertree family), with the triplet-inconsistency reduction."""
from .weights import INF, NEG_INF
from .phylo import (CapExceeded, Phylogeny, PhylogenyError, ResolvedTriplet, RtiInstance,
                    enumerate_phylogenies, fits, is_refinement, min_rti_bruteforce,
                    parse_triplets, rti_cost, validate_phylogeny)
from .bipartite import (BipartiteGraph, CellKind, DraftGraph, MQuintuple, build_tg,
                        classify_cell, conflicts, delta, find_m_quintuple, is_m_free,
                        is_perfect_phylogeny, read_graph, read_matrix, write_graph,
                        write_matrix)
from .solvers import (EditInstance, EditSolution, InfeasibleError, RangeClass,
                      brute_force_min_edit, classify_range, exact_min_edit, fpt_edit,
                      min_edit_by_joker_assignment, solve_hard_only, solve_trivial,
                      supertree_of)
from .reduction import (ReductionMap, ReductionParams, lift_edition_to_phylogeny,
                        lift_phylogeny_to_edition, reduce_rti_to_edit, verify_reduction)
from .pipeline import (InputForest, RunConfig, build_mrf_matrix, parse_newick,
                       parse_newick_forest, run, serialize_newick)

__version__ = "0.1.0"
