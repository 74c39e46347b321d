"""Bipartite character/species graphs, weighted draft-graphs and M-freeness.

Characters and species are kept as ordered tuples; that order is the one
used for lexicographic choices (witness quintuples) and for the matrix
file formats.
"""
from dataclasses import dataclass
from enum import Enum
from typing import Dict, FrozenSet, Hashable, Iterable, List, Optional, Sequence, Set, Tuple

from . import weights as W
from .phylo import Phylogeny, PhylogenyError

Cell = Tuple[Hashable, Hashable]


class ShapeError(ValueError):
    pass


class NotMFree(ValueError):
    def __init__(self, quintuple: "MQuintuple"):
        super().__init__(f"graph is not M-free, witness {quintuple}")
        self.quintuple = quintuple


def _check_labels(characters, species):
    if len(set(characters)) != len(characters):
        raise ShapeError("duplicate character names")
    if len(set(species)) != len(species):
        raise ShapeError("duplicate species names")


@dataclass(frozen=True)
class BipartiteGraph:
    characters: Tuple
    species: Tuple
    edges: FrozenSet[Cell]

    def __post_init__(self):
        object.__setattr__(self, "characters", tuple(self.characters))
        object.__setattr__(self, "species", tuple(self.species))
        object.__setattr__(self, "edges", frozenset(self.edges))
        _check_labels(self.characters, self.species)
        cs, ss = set(self.characters), set(self.species)
        for c, s in self.edges:
            if c not in cs or s not in ss:
                raise ShapeError(f"edge {(c, s)} references an unknown vertex")

    @classmethod
    def complete(cls, characters, species) -> "BipartiteGraph":
        return cls(characters, species, {(c, s) for c in characters for s in species})

    @classmethod
    def empty(cls, characters, species) -> "BipartiteGraph":
        return cls(characters, species, frozenset())

    @classmethod
    def from_masks(cls, characters, species, masks: Sequence[int]) -> "BipartiteGraph":
        edges = {(c, s) for c, m in zip(characters, masks)
                 for j, s in enumerate(species) if m >> j & 1}
        return cls(characters, species, edges)

    def masks(self) -> List[int]:
        """One bitmask per character; bit j set iff species j is a neighbour."""
        col = {s: j for j, s in enumerate(self.species)}
        row = {c: i for i, c in enumerate(self.characters)}
        out = [0] * len(self.characters)
        for c, s in self.edges:
            out[row[c]] |= 1 << col[s]
        return out

    def neighborhood(self, c) -> FrozenSet:
        if c not in self.characters:
            raise ShapeError(f"unknown character {c!r}")
        return frozenset(s for (d, s) in self.edges if d == c)

    def neighborhoods(self) -> List[FrozenSet]:
        by_char: Dict = {c: set() for c in self.characters}
        for c, s in self.edges:
            by_char[c].add(s)
        return [frozenset(by_char[c]) for c in self.characters]

    def serialize(self) -> str:
        """Canonical 0/1 row-major string, used for tie-breaking."""
        return "".join("1" if (c, s) in self.edges else "0"
                       for c in self.characters for s in self.species)


class CellKind(str, Enum):
    EDGE = "edge"
    JOKER = "joker"
    NON_EDGE = "non-edge"


@dataclass(frozen=True)
class DraftGraph:
    """Weighted bipartite draft-graph; ``weights[i][j]`` is F(characters[i], species[j])."""
    characters: Tuple
    species: Tuple
    weights: Tuple[Tuple, ...]

    def __post_init__(self):
        chars, species = tuple(self.characters), tuple(self.species)
        _check_labels(chars, species)
        rows = tuple(tuple(W.check_weight(w) for w in row) for row in self.weights)
        if len(rows) != len(chars) or any(len(r) != len(species) for r in rows):
            raise ShapeError("weight table does not match |C| x |S|")
        object.__setattr__(self, "characters", chars)
        object.__setattr__(self, "species", species)
        object.__setattr__(self, "weights", rows)

    @classmethod
    def from_dict(cls, characters, species, table: Dict[Cell, W.Weight], default=0) -> "DraftGraph":
        rows = [[table.get((c, s), default) for s in species] for c in characters]
        return cls(tuple(characters), tuple(species), rows)

    @property
    def shape(self) -> Tuple[int, int]:
        return len(self.characters), len(self.species)

    def weight(self, c, s) -> W.Weight:
        try:
            i, j = self.characters.index(c), self.species.index(s)
        except ValueError:
            raise ShapeError(f"unknown cell {(c, s)}") from None
        return self.weights[i][j]

    def weight_range(self) -> Set:
        return {w for row in self.weights for w in row}

    def cells(self) -> Iterable[Tuple[Cell, W.Weight]]:
        for c, row in zip(self.characters, self.weights):
            for s, w in zip(self.species, row):
                yield (c, s), w

    def sign_masks(self) -> Tuple[List[int], List[int]]:
        """(edge masks, non-edge masks) per character."""
        pos, neg = [], []
        for row in self.weights:
            p = n = 0
            for j, w in enumerate(row):
                if w >= 1:
                    p |= 1 << j
                elif w <= -1:
                    n |= 1 << j
            pos.append(p)
            neg.append(n)
        return pos, neg

    def sign_edition(self) -> BipartiteGraph:
        """The edition whose edges are exactly the edges of this draft-graph."""
        return BipartiteGraph.from_masks(self.characters, self.species, self.sign_masks()[0])


def kind_of(w: W.Weight) -> CellKind:
    if w >= 1:
        return CellKind.EDGE
    if w == 0:
        return CellKind.JOKER
    return CellKind.NON_EDGE


def classify_cell(H: DraftGraph, c, s) -> CellKind:
    return kind_of(H.weight(c, s))


@dataclass(frozen=True)
class MQuintuple:
    """(s, c, s', c', s''): c adjacent to s, s'; c' adjacent to s', s''; c not
    adjacent to s''; c' not adjacent to s."""
    s: Hashable
    c: Hashable
    s2: Hashable
    c2: Hashable
    s3: Hashable

    def __post_init__(self):
        assert self.c != self.c2
        assert len({self.s, self.s2, self.s3}) == 3

    def cells(self) -> Tuple[Cell, ...]:
        """The six cells in branching order: four edges, then two non-edges."""
        return ((self.c, self.s), (self.c, self.s2), (self.c2, self.s2),
                (self.c2, self.s3), (self.c, self.s3), (self.c2, self.s))

    def __iter__(self):
        return iter((self.s, self.c, self.s2, self.c2, self.s3))

    def __str__(self):
        return " ".join(map(str, self))


def _low_bit(m: int) -> int:
    return (m & -m).bit_length() - 1


def find_quintuple_masks(masks: Sequence[int]) -> Optional[Tuple[int, int, int, int, int]]:
    """Lexicographically least (c, c', s, s', s'') over index order, as
    (s, c, s', c', s'') indices, or None."""
    n = len(masks)
    for i in range(n):
        a = masks[i]
        if not a:
            continue
        for k in range(n):
            b = masks[k]
            common = a & b
            if common and a & ~b and b & ~a:
                return _low_bit(a & ~b), i, _low_bit(common), k, _low_bit(b & ~a)
    return None


def find_m_quintuple(G: BipartiteGraph) -> Optional[MQuintuple]:
    hit = find_quintuple_masks(G.masks())
    if hit is None:
        return None
    s, c, s2, c2, s3 = hit
    C, S = G.characters, G.species
    return MQuintuple(S[s], C[c], S[s2], C[c2], S[s3])


def laminar_masks(masks: Sequence[int], n_species: int) -> bool:
    """Linear-time laminarity test on neighbourhood bitmasks.

    Neighbourhoods are bucketed by decreasing size and swept in that order.
    For each species we remember the last swept set that contained it; the
    family is laminar iff every set sees one common "last" value over its
    members.
    """
    buckets: List[List[List[int]]] = [[] for _ in range(n_species + 1)]
    for m in masks:
        members = [j for j in range(n_species) if m >> j & 1]
        if members:
            buckets[len(members)].append(members)
    last = [-1] * n_species
    pos = 0
    for size in range(n_species, 0, -1):
        for members in buckets[size]:
            expected = last[members[0]]
            for j in members:
                if last[j] != expected:
                    return False
                last[j] = pos
            pos += 1
    return True


def is_m_free(G: BipartiteGraph) -> bool:
    return laminar_masks(G.masks(), len(G.species))


def build_tg(G: BipartiteGraph) -> Phylogeny:
    """The least perfect phylogeny of an M-free graph."""
    if not is_m_free(G):
        raise NotMFree(find_m_quintuple(G))
    return Phylogeny.build(G.species, G.neighborhoods())


def is_perfect_phylogeny(G: BipartiteGraph, T: Phylogeny) -> bool:
    if T.species != frozenset(G.species):
        raise PhylogenyError("phylogeny and graph have different species sets")
    return all(n in T.clusters for n in G.neighborhoods())


def _same_shape(G: BipartiteGraph, H: DraftGraph):
    if G.characters != H.characters or G.species != H.species:
        raise ShapeError("edition and draft-graph have different vertex sets")


def conflicts(G: BipartiteGraph, H: DraftGraph) -> Set[Cell]:
    _same_shape(G, H)
    out = set()
    for cell, w in H.cells():
        in_g = cell in G.edges
        if (in_g and w <= -1) or (not in_g and w >= 1):
            out.add(cell)
    return out


def delta(G: BipartiteGraph, H: DraftGraph) -> W.Weight:
    """Total edit cost of the conflicts between edition G and draft H."""
    conf = conflicts(G, H)
    return W.total(abs(w) for cell, w in H.cells() if cell in conf)


# -- matrix file formats ------------------------------------------------------

def _parse_table(text: str, tag: str):
    lines = [ln for ln in text.splitlines() if ln.strip()]
    if not lines:
        raise ValueError("empty matrix file")
    header = lines[0].split("\t")
    if header[0] != tag:
        raise ValueError(f"expected header starting with {tag!r}, got {header[0]!r}")
    species = tuple(header[1:])
    names, rows = [], []
    for lineno, line in enumerate(lines[1:], 2):
        parts = line.split("\t")
        if len(parts) != len(species) + 1:
            raise ValueError(f"line {lineno}: expected {len(species)} cells, got {len(parts) - 1}")
        names.append(parts[0])
        rows.append(parts[1:])
    return tuple(names), species, rows


def read_matrix(text: str) -> DraftGraph:
    names, species, rows = _parse_table(text, "#matrix")
    return DraftGraph(names, species, [[W.parse_weight(t) for t in row] for row in rows])


def write_matrix(H: DraftGraph) -> str:
    lines = ["\t".join(["#matrix"] + [str(s) for s in H.species])]
    for c, row in zip(H.characters, H.weights):
        lines.append("\t".join([str(c)] + [W.format_weight(w) for w in row]))
    return "\n".join(lines) + "\n"


def read_graph(text: str) -> BipartiteGraph:
    names, species, rows = _parse_table(text, "#graph")
    edges = set()
    for c, row in zip(names, rows):
        for s, t in zip(species, row):
            if t not in ("0", "1"):
                raise ValueError(f"graph cell must be 0 or 1, got {t!r}")
            if t == "1":
                edges.add((c, s))
    return BipartiteGraph(names, species, edges)


def write_graph(G: BipartiteGraph) -> str:
    lines = ["\t".join(["#graph"] + [str(s) for s in G.species])]
    for c in G.characters:
        lines.append("\t".join([str(c)] + ["1" if (c, s) in G.edges else "0" for s in G.species]))
    return "\n".join(lines) + "\n"
