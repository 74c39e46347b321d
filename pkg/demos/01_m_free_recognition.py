"""M-free graphs, witness quintuples and the least perfect phylogeny."""
from minflip import (BipartiteGraph, build_tg, enumerate_phylogenies, find_m_quintuple,
                     is_m_free, is_perfect_phylogeny)

species = ("a", "b", "c", "d")

# Two characters whose species sets cross: {a,b} and {b,c}.
crossing = BipartiteGraph(["x", "y"], species, {("x", "a"), ("x", "b"), ("y", "b"), ("y", "c")})
print("crossing is M-free:", is_m_free(crossing))
print("witness (s, c, s', c', s''):", find_m_quintuple(crossing))

# Nested and disjoint neighbourhoods are fine.
nested = BipartiteGraph(["x", "y", "z"], species,
                        {("x", "a"), ("x", "b"), ("x", "c"), ("y", "a"), ("y", "b"), ("z", "d")})
print("nested is M-free:", is_m_free(nested))

# T_G: the mandated clusters plus every neighbourhood.
tg = build_tg(nested)
print("T_G:", tg)

# Every perfect phylogeny of the graph refines T_G.
perfect = [T for T in enumerate_phylogenies(species) if is_perfect_phylogeny(nested, T)]
print(f"{len(perfect)} of 26 phylogenies on 4 leaves are perfect for the graph")
print("all contain T_G:", all(tg.clusters <= T.clusters for T in perfect))
