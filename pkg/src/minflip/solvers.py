"""Exact M-free edition solvers.

The core is a depth-first search that repeatedly takes the lexicographically
first M-quintuple of the current edition and branches on the six cells of
that quintuple: any M-free edition must differ from the current one on at
least one of them.  Flipped cells are frozen for the rest of the branch, so
every branch is a set of flips and the search tree is finite.  Bounding the
spent cost by a budget gives the 6^k decision procedure; raising the budget
to the smallest pruned value (IDA*) gives the optimiser.
"""
import itertools
from dataclasses import dataclass
from enum import Enum
from typing import List, Optional, Sequence, Tuple

from . import weights as W
from .bipartite import (BipartiteGraph, DraftGraph, MQuintuple, build_tg, delta,
                        find_m_quintuple, find_quintuple_masks, is_m_free)
from .phylo import CapExceeded, Phylogeny

DEFAULT_MAX_CELLS = 64
DEFAULT_BRUTE_FORCE_CELLS = 16
DEFAULT_MAX_JOKERS = 12


class InfeasibleError(ValueError):
    """No edition of finite cost is M-free."""

    def __init__(self, message, witness: Optional[MQuintuple] = None):
        super().__init__(message)
        self.witness = witness


class RangeClass(str, Enum):
    ALL_NONNEGATIVE = "all-nonnegative"
    ALL_NONPOSITIVE = "all-nonpositive"
    HARD_ONLY = "hard-only"
    HARD_AND_JOKER = "hard-and-joker"
    JOKER_FREE = "joker-free"
    GENERAL = "general"


@dataclass(frozen=True)
class EditInstance:
    H: DraftGraph
    k: Optional[int] = None

    def __post_init__(self):
        if self.k is not None and (W.is_infinite(self.k) or self.k < 0):
            raise ValueError("budget must be a finite non-negative integer")


@dataclass(frozen=True)
class EditSolution:
    edition: BipartiteGraph
    cost: W.Weight
    optimal: bool = True
    method: str = ""


def classify_range(H: DraftGraph) -> RangeClass:
    rng = H.weight_range()
    if all(w >= 0 for w in rng):
        return RangeClass.ALL_NONNEGATIVE
    if all(w <= 0 for w in rng):
        return RangeClass.ALL_NONPOSITIVE
    if rng <= {W.INF, W.NEG_INF}:
        return RangeClass.HARD_ONLY
    if rng <= {W.INF, W.NEG_INF, 0}:
        return RangeClass.HARD_AND_JOKER
    if 0 not in rng:
        return RangeClass.JOKER_FREE
    return RangeClass.GENERAL


def solve_trivial(H: DraftGraph) -> Optional[EditSolution]:
    rng = H.weight_range()
    if all(w >= 0 for w in rng):
        return EditSolution(BipartiteGraph.complete(H.characters, H.species), 0, True, "trivial")
    if all(w <= 0 for w in rng):
        return EditSolution(BipartiteGraph.empty(H.characters, H.species), 0, True, "trivial")
    return None


def solve_hard_only(H: DraftGraph) -> Optional[EditSolution]:
    if not H.weight_range() <= {W.INF, W.NEG_INF}:
        raise ValueError("solve_hard_only needs weights in {-inf, +inf}")
    G = H.sign_edition()
    if is_m_free(G):
        return EditSolution(G, 0, True, "hard-only")
    return None


class _BranchSearch:
    """Quintuple branching over bitmask rows of a draft-graph."""

    def __init__(self, H: DraftGraph, use_lower_bound: bool = True):
        self.H = H
        self.n_chars, self.n_species = H.shape
        self.initial, _ = H.sign_masks()
        self.cost = [[abs(w) for w in row] for row in H.weights]
        self.flippable = [sum(1 << j for j, w in enumerate(row) if not W.is_infinite(w))
                          for row in H.weights]
        self.use_lower_bound = use_lower_bound
        self.nodes = 0

    def cell_cost(self, i: int, j: int, frozen: Sequence[int]) -> W.Weight:
        if frozen[i] >> j & 1 or not self.flippable[i] >> j & 1:
            return W.INF
        return self.cost[i][j]

    def lower_bound(self, rows: Sequence[int], frozen: Sequence[int]) -> W.Weight:
        """Greedy packing of cell-disjoint quintuples, each charged its cheapest flip."""
        used = [0] * self.n_chars
        bound = 0
        for i in range(self.n_chars):
            a = rows[i]
            for k in range(self.n_chars):
                b = rows[k]
                if not (a & b and a & ~b and b & ~a):
                    continue
                free = ~(used[i] | used[k])
                only_a, both, only_b = a & ~b & free, a & b & free, b & ~a & free
                if not (only_a and both and only_b):
                    continue
                s, s2, s3 = (m & -m for m in (only_a, both, only_b))
                js, j2, j3 = (m.bit_length() - 1 for m in (s, s2, s3))
                cheapest = min(self.cell_cost(i, js, frozen), self.cell_cost(i, j2, frozen),
                               self.cell_cost(k, j2, frozen), self.cell_cost(k, j3, frozen),
                               self.cell_cost(i, j3, frozen), self.cell_cost(k, js, frozen))
                if cheapest == W.INF:
                    return W.INF
                bound += cheapest
                used[i] |= s | s2 | s3
                used[k] |= s | s2 | s3
        return bound

    def run(self, budget: W.Weight) -> Tuple[Optional[List[int]], W.Weight]:
        """Search for an M-free edition of cost <= budget.

        Returns (rows, next_budget): rows of the first edition found, or None
        together with the smallest cost that was pruned (inf if none was).
        """
        rows = list(self.initial)
        frozen = [0] * self.n_chars
        visited = set()
        next_budget = W.INF

        def dfs(spent):
            nonlocal next_budget
            self.nodes += 1
            hit = find_quintuple_masks(rows)
            if hit is None:
                return list(rows)
            if self.use_lower_bound:
                lb = self.lower_bound(rows, frozen)
                if lb == W.INF:
                    return None
                if spent + lb > budget:
                    next_budget = min(next_budget, spent + lb)
                    return None
            s, c, s2, c2, s3 = hit
            for i, j in ((c, s), (c, s2), (c2, s2), (c2, s3), (c, s3), (c2, s)):
                w = self.cell_cost(i, j, frozen)
                if w == W.INF:
                    continue
                if spent + w > budget:
                    next_budget = min(next_budget, spent + w)
                    continue
                bit = 1 << j
                frozen[i] |= bit
                key = tuple(frozen)
                if key not in visited:
                    visited.add(key)
                    rows[i] ^= bit
                    found = dfs(spent + w)
                    rows[i] ^= bit
                    if found is not None:
                        frozen[i] ^= bit
                        return found
                frozen[i] ^= bit
            return None

        return dfs(0), next_budget

    def solution(self, rows: Sequence[int], optimal: bool, method: str) -> EditSolution:
        G = BipartiteGraph.from_masks(self.H.characters, self.H.species, rows)
        return EditSolution(G, delta(G, self.H), optimal, method)


def fpt_edit(H: DraftGraph, k: int) -> Optional[EditSolution]:
    """An M-free edition with cost at most k, or None; H must have no joker cells."""
    if 0 in H.weight_range():
        raise ValueError("fpt_edit needs a joker-free draft-graph")
    if W.is_infinite(k) or k < 0:
        raise ValueError("budget must be a finite non-negative integer")
    search = _BranchSearch(H)
    rows, _ = search.run(k)
    if rows is None:
        return None
    return search.solution(rows, optimal=False, method="fpt")


def _iterative_deepening(H: DraftGraph, method: str) -> EditSolution:
    search = _BranchSearch(H)
    budget = 0
    while True:
        rows, next_budget = search.run(budget)
        if rows is not None:
            return search.solution(rows, optimal=True, method=method)
        if next_budget == W.INF:
            raise InfeasibleError("every M-free edition flips an infinite-weight cell",
                                  find_m_quintuple(H.sign_edition()))
        budget = next_budget


def exact_min_edit(H: DraftGraph, max_cells: int = DEFAULT_MAX_CELLS) -> EditSolution:
    """A minimum-cost M-free edition of H.

    Raises InfeasibleError when every M-free edition has infinite cost, and
    CapExceeded when a jokered instance is larger than *max_cells* cells.
    """
    cls = classify_range(H)
    if cls in (RangeClass.ALL_NONNEGATIVE, RangeClass.ALL_NONPOSITIVE):
        return solve_trivial(H)
    if cls is RangeClass.HARD_ONLY:
        sol = solve_hard_only(H)
        if sol is None:
            witness = find_m_quintuple(H.sign_edition())
            raise InfeasibleError(f"hard constraints contain an M-structure: {witness}", witness)
        return sol
    if cls is RangeClass.JOKER_FREE:
        return _iterative_deepening(H, "fpt-deepening")
    n_cells = H.shape[0] * H.shape[1]
    if n_cells > max_cells:
        raise CapExceeded(f"{n_cells} cells exceeds the general-solver cap of {max_cells}")
    return _iterative_deepening(H, "branch-and-bound")


def supertree_of(H: DraftGraph, max_cells: int = DEFAULT_MAX_CELLS) -> Tuple[Phylogeny, W.Weight]:
    sol = exact_min_edit(H, max_cells=max_cells)
    return build_tg(sol.edition), sol.cost


# -- oracles ------------------------------------------------------------------

def _pairwise_laminar(masks: Sequence[int]) -> bool:
    for a, b in itertools.combinations(masks, 2):
        if a & b not in (0, a, b):
            return False
    return True


def brute_force_min_edit(H: DraftGraph, max_cells: int = DEFAULT_BRUTE_FORCE_CELLS) -> EditSolution:
    """Scan every edition; ties go to the least 0/1 serialisation."""
    n_chars, n_species = H.shape
    if n_chars * n_species > max_cells:
        raise CapExceeded(f"{n_chars * n_species} cells exceeds the brute-force cap of {max_cells}")
    row_costs = []
    for row in H.weights:
        costs = []
        for m in range(1 << n_species):
            c = W.total(abs(w) for j, w in enumerate(row)
                        if (m >> j & 1 and w <= -1) or (not m >> j & 1 and w >= 1))
            costs.append(c)
        row_costs.append(costs)
    best, best_key = None, None
    for masks in itertools.product(range(1 << n_species), repeat=n_chars):
        cost = W.total(row_costs[i][m] for i, m in enumerate(masks))
        if best_key is not None and cost > best_key[0]:
            continue
        if not _pairwise_laminar(masks):
            continue
        G = BipartiteGraph.from_masks(H.characters, H.species, masks)
        key = (cost, G.serialize())
        if best_key is None or key < best_key:
            best, best_key = G, key
    return EditSolution(best, best_key[0], True, "brute-force")


def min_edit_by_joker_assignment(H: DraftGraph, max_jokers: int = DEFAULT_MAX_JOKERS) -> EditSolution:
    """Fix every joker cell both ways (as a hard edge / hard non-edge), solve
    each joker-free residual exactly and keep the cheapest."""
    jokers = [(i, j) for i, row in enumerate(H.weights) for j, w in enumerate(row) if w == 0]
    if len(jokers) > max_jokers:
        raise CapExceeded(f"{len(jokers)} joker cells exceeds the cap of {max_jokers}")
    best, best_key = None, None
    for choice in itertools.product((W.NEG_INF, W.INF), repeat=len(jokers)):
        rows = [list(r) for r in H.weights]
        for (i, j), w in zip(jokers, choice):
            rows[i][j] = w
        residual = DraftGraph(H.characters, H.species, rows)
        try:
            sol = exact_min_edit(residual)
        except InfeasibleError:
            continue
        key = (sol.cost, sol.edition.serialize())
        if best_key is None or key < best_key:
            best, best_key = sol.edition, key
    if best is None:
        raise InfeasibleError("no joker assignment admits a finite-cost edition")
    return EditSolution(best, delta(best, H), True, "joker-assignment")
