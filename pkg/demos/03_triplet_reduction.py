"""Triplet inconsistency reduces to M-free editing with jokers.

For every (alpha, beta) the optimum of the edited draft-graph is exactly
gamma = min(alpha, beta) times the least number of triplets no tree can fit.
"""
from pathlib import Path

from minflip import (INF, ReductionParams, lift_phylogeny_to_edition, min_rti_bruteforce,
                     reduce_rti_to_edit, verify_reduction, write_matrix)
from minflip.phylo import rti_instance_from_text

inst = rti_instance_from_text((Path(__file__).parent / "data" / "triplets.txt").read_text())
tree, opt = min_rti_bruteforce(inst)
print("least number of unfit triplets:", opt, "e.g. for", tree)

rmap = reduce_rti_to_edit(inst, ReductionParams(2, 3))
print(write_matrix(rmap.H))

G = lift_phylogeny_to_edition(rmap, tree)
print("edition built from that tree has neighbourhoods",
      [sorted(n) for n in G.neighborhoods()])

for alpha, beta in [(1, 1), (2, 3), (3, 2), (INF, 1), (1, INF)]:
    rep = verify_reduction(inst, ReductionParams(alpha, beta))
    print(f"alpha={alpha} beta={beta}: opt_edit={rep.opt_edit} "
          f"gamma*opt_rti={rep.gamma * rep.opt_rti} -> {'pass' if rep.passed else 'FAIL'}")
