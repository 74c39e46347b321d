"""Rooted phylogenies as cluster families, resolved triplets and the
brute-force minimum triplet-inconsistency oracle."""
from dataclasses import dataclass
from itertools import combinations
from typing import FrozenSet, Hashable, Iterable, Iterator, List, Optional, Tuple

Species = Hashable
Cluster = FrozenSet

DEFAULT_SPECIES_CAP = 6

EMPTY: Cluster = frozenset()


class PhylogenyError(ValueError):
    pass


class CapExceeded(ValueError):
    pass


def cluster_key(cluster) -> tuple:
    """Canonical sort key of a cluster: size first, then sorted members."""
    return (len(cluster), tuple(sorted(cluster)))


@dataclass(frozen=True)
class Phylogeny:
    species: FrozenSet
    clusters: FrozenSet[Cluster]

    def __post_init__(self):
        species = frozenset(self.species)
        clusters = frozenset(frozenset(x) for x in self.clusters)
        object.__setattr__(self, "species", species)
        object.__setattr__(self, "clusters", clusters)
        _check_axioms(species, clusters)

    @classmethod
    def build(cls, species: Iterable, clusters: Iterable = ()) -> "Phylogeny":
        """Phylogeny from *clusters* plus the mandated ones (empty, full, singletons)."""
        species = frozenset(species)
        return cls(species, set(map(frozenset, clusters)) | mandated_clusters(species))

    @classmethod
    def star(cls, species: Iterable) -> "Phylogeny":
        return cls.build(species)

    def sorted_clusters(self) -> List[Cluster]:
        return sorted(self.clusters, key=cluster_key)

    def nontrivial_clusters(self) -> List[Cluster]:
        return [x for x in self.sorted_clusters()
                if 1 < len(x) < len(self.species)]

    def canonical_key(self) -> tuple:
        return tuple(cluster_key(x) for x in self.sorted_clusters())

    def __contains__(self, cluster) -> bool:
        return frozenset(cluster) in self.clusters

    def __repr__(self):
        inner = ", ".join("{" + ",".join(map(str, sorted(x))) + "}"
                          for x in self.nontrivial_clusters())
        return f"Phylogeny(species={sorted(self.species)}, nontrivial=[{inner}])"


def mandated_clusters(species: FrozenSet) -> set:
    return {EMPTY, frozenset(species)} | {frozenset([s]) for s in species}


def _check_axioms(species: FrozenSet, clusters: FrozenSet):
    for x in clusters:
        if not x <= species:
            raise PhylogenyError(
                f"cluster {sorted(x)} is not a subset of the species set")
    missing = mandated_clusters(species) - clusters
    if missing:
        first = min(missing, key=cluster_key)
        raise PhylogenyError(f"missing mandated cluster {sorted(first)}")
    for x, y in combinations(clusters, 2):
        if x & y not in (EMPTY, x, y):
            raise PhylogenyError(
                f"laminarity violated by {sorted(x)} and {sorted(y)}")


def validate_phylogeny(species: Iterable, clusters: Iterable) -> Phylogeny:
    """Return the phylogeny, or raise PhylogenyError naming the failed axiom."""
    return Phylogeny(frozenset(species), frozenset(frozenset(x) for x in clusters))


def is_refinement(coarse: Phylogeny, fine: Phylogeny) -> bool:
    """True iff *coarse* is obtained from *fine* by contracting internal edges."""
    if coarse.species != fine.species:
        raise PhylogenyError("phylogenies are over different species sets")
    return coarse.clusters <= fine.clusters


@dataclass(frozen=True, order=True)
class ResolvedTriplet:
    """The rooted triplet xy|z; the pair is stored with the smaller leaf first."""
    x: Species
    y: Species
    z: Species

    def __post_init__(self):
        if len({self.x, self.y, self.z}) != 3:
            raise ValueError(f"triplet leaves must be distinct: {self.x}, {self.y}, {self.z}")
        if self.y < self.x:
            x, y = self.y, self.x
            object.__setattr__(self, "x", x)
            object.__setattr__(self, "y", y)

    @property
    def leaves(self) -> FrozenSet:
        return frozenset((self.x, self.y, self.z))

    def as_phylogeny(self) -> Phylogeny:
        return Phylogeny.build(self.leaves, [{self.x, self.y}])

    def __str__(self):
        return f"{self.x}{self.y}|{self.z}"


@dataclass(frozen=True)
class RtiInstance:
    species: FrozenSet
    triplets: Tuple[ResolvedTriplet, ...]
    budget: Optional[int] = None

    def __post_init__(self):
        object.__setattr__(self, "species", frozenset(self.species))
        object.__setattr__(self, "triplets", tuple(self.triplets))
        for t in self.triplets:
            if not t.leaves <= self.species:
                raise ValueError(f"triplet {t} has a leaf outside the species set")
        if self.budget is not None and self.budget < 0:
            raise ValueError("budget must be non-negative")


def fits(t: ResolvedTriplet, tree: Phylogeny) -> bool:
    leaves = t.leaves
    if not leaves <= tree.species:
        raise PhylogenyError(f"triplet {t} has a leaf outside the species set")
    pair = frozenset((t.x, t.y))
    return any(x & leaves == pair for x in tree.clusters)


def rti_cost(tree: Phylogeny, triplets: Iterable[ResolvedTriplet]) -> int:
    """Number of triplets (with multiplicity) that do not fit *tree*."""
    return sum(1 for t in triplets if not fits(t, tree))


def set_partitions(items: tuple) -> Iterator[List[tuple]]:
    """All partitions of *items* into non-empty blocks, deterministic order."""
    if not items:
        yield []
        return
    first, rest = items[0], items[1:]
    for partition in set_partitions(rest):
        yield [(first,)] + partition
        for i in range(len(partition)):
            yield partition[:i] + [(first,) + partition[i]] + partition[i + 1:]


def _subtrees(leaves: tuple) -> List[FrozenSet[Cluster]]:
    # cluster sets of all trees on `leaves`, including the cluster `leaves` itself
    if len(leaves) == 1:
        return [frozenset([frozenset(leaves)])]
    out = []
    for partition in set_partitions(leaves):
        if len(partition) < 2:
            continue
        combos = [frozenset([frozenset(leaves)])]
        for block in partition:
            combos = [acc | sub for acc in combos for sub in _subtrees(block)]
        out.extend(combos)
    return out


def enumerate_phylogenies(species: Iterable, cap: int = DEFAULT_SPECIES_CAP) -> Iterator[Phylogeny]:
    """Yield every phylogeny on *species* exactly once.

    Order is by number of clusters, then by canonical cluster order, so the
    star tree comes first.
    """
    leaves = tuple(sorted(set(species)))
    if len(leaves) > cap:
        raise CapExceeded(f"{len(leaves)} species exceeds the enumeration cap of {cap}")
    if not leaves:
        yield Phylogeny(frozenset(), frozenset([EMPTY]))
        return
    seen = set()
    trees = []
    for clusters in _subtrees(leaves):
        if clusters in seen:
            continue
        seen.add(clusters)
        trees.append(Phylogeny.build(leaves, clusters))
    trees.sort(key=lambda t: (len(t.clusters), t.canonical_key()))
    yield from trees


def min_rti_bruteforce(inst: RtiInstance, cap: int = DEFAULT_SPECIES_CAP) -> Tuple[Phylogeny, int]:
    best, best_cost = None, None
    for tree in enumerate_phylogenies(inst.species, cap=cap):
        cost = rti_cost(tree, inst.triplets)
        if best_cost is None or cost < best_cost:
            best, best_cost = tree, cost
            if cost == 0:
                break
    return best, best_cost


def parse_triplets(text: str) -> List[ResolvedTriplet]:
    """Parse lines of the form ``x y | z``; blank lines and ``#`` comments are skipped."""
    triplets = []
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        left, bar, right = line.partition("|")
        pair, single = left.split(), right.split()
        if not bar or len(pair) != 2 or len(single) != 1:
            raise ValueError(f"line {lineno}: expected 'x y | z', got {raw!r}")
        try:
            triplets.append(ResolvedTriplet(pair[0], pair[1], single[0]))
        except ValueError as e:
            raise ValueError(f"line {lineno}: {e}") from None
    return triplets


def format_triplets(triplets: Iterable[ResolvedTriplet]) -> str:
    return "".join(f"{t.x} {t.y} | {t.z}\n" for t in triplets)


def rti_instance_from_text(text: str, species: Iterable = (), budget: Optional[int] = None) -> RtiInstance:
    triplets = parse_triplets(text)
    all_species = set(species)
    for t in triplets:
        all_species |= t.leaves
    return RtiInstance(frozenset(all_species), tuple(triplets), budget)
