"""Matrix representation with flipping: Newick trees in, supertree out."""
from pathlib import Path

from minflip import build_mrf_matrix, parse_newick_forest, serialize_newick, supertree_of, write_matrix

data = Path(__file__).parent / "data"

for name in ("forest.nwk", "conflicting.nwk"):
    forest = parse_newick_forest((data / name).read_text())
    H = build_mrf_matrix(forest)
    print(f"== {name}: {len(forest.trees)} trees, {len(H.species)} species, "
          f"{len(H.characters)} characters")
    print(write_matrix(H))
    tree, cost = supertree_of(H)
    print("flip cost:", cost)
    print("supertree:", serialize_newick(tree))
    print()
