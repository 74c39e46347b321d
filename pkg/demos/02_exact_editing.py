"""Weighted draft-graphs and exact minimum-cost M-free editing."""
from pathlib import Path

from minflip import (brute_force_min_edit, classify_range, conflicts, exact_min_edit, fpt_edit,
                     read_matrix, write_graph)

H = read_matrix((Path(__file__).parent / "data" / "draft.tsv").read_text())
print("weight range class:", classify_range(H).value)

# The edition read off the signs of the weights has an M-structure.
sol = exact_min_edit(H)
print("optimal cost:", sol.cost, "via", sol.method)
print("flipped cells:", sorted(conflicts(sol.edition, H)))
print(write_graph(sol.edition))

# Cross-check against the exhaustive scan (16 cells, 65536 editions).
print("brute force agrees:", brute_force_min_edit(H).cost == sol.cost)

# Decision version on the joker-free part: is there an edition of cost <= k?
H_free = read_matrix("#matrix\ta\tb\tc\nx\t1\t1\t-1\ny\t-1\t1\t1\n")
for k in range(3):
    print(f"budget {k}:", "yes" if fpt_edit(H_free, k) else "no")
