"""Reduction from resolved-triplet inconsistency to M-free edition.

Each triplet xy|z becomes one character whose row scores its two grouped
leaves with +beta, the outgroup with -alpha and every other species as a
joker.  Both directions of solution transfer are implemented, plus a
verifier that checks OPT_edit = gamma * OPT_rti with the brute-force oracles.
"""
from dataclasses import dataclass
from typing import Dict, Optional, Tuple

from . import weights as W
from .bipartite import (BipartiteGraph, DraftGraph, NotMFree, build_tg, delta,
                        find_m_quintuple, is_m_free, is_perfect_phylogeny)
from .phylo import (DEFAULT_SPECIES_CAP, Phylogeny, PhylogenyError, ResolvedTriplet,
                    RtiInstance, min_rti_bruteforce, rti_cost)
from .solvers import DEFAULT_MAX_CELLS, EditInstance, exact_min_edit


@dataclass(frozen=True)
class ReductionParams:
    alpha: W.Weight = 1
    beta: W.Weight = 1

    def __post_init__(self):
        a, b = W.check_weight(self.alpha), W.check_weight(self.beta)
        if a <= 0 or b <= 0:
            raise ValueError("alpha and beta must be positive")
        if a == W.INF and b == W.INF:
            raise ValueError("alpha and beta cannot both be infinite")
        object.__setattr__(self, "alpha", a)
        object.__setattr__(self, "beta", b)

    @property
    def gamma(self) -> int:
        return int(min(self.alpha, self.beta))


@dataclass(frozen=True)
class ReductionMap:
    source: RtiInstance
    params: ReductionParams
    target: EditInstance
    character_index: Dict[int, ResolvedTriplet]

    @property
    def H(self) -> DraftGraph:
        return self.target.H


def reduce_rti_to_edit(inst: RtiInstance, params: ReductionParams) -> ReductionMap:
    species = tuple(sorted(inst.species))
    characters = tuple(range(1, len(inst.triplets) + 1))
    rows = []
    for t in inst.triplets:
        row = []
        for s in species:
            if s in (t.x, t.y):
                row.append(params.beta)
            elif s == t.z:
                row.append(-params.alpha)
            else:
                row.append(0)
        rows.append(row)
    H = DraftGraph(characters, species, rows)
    budget = None if inst.budget is None else params.gamma * inst.budget
    return ReductionMap(inst, params, EditInstance(H, budget),
                        dict(zip(characters, inst.triplets)))


def lift_edition_to_phylogeny(rmap: ReductionMap, G: BipartiteGraph) -> Tuple[Phylogeny, W.Weight]:
    """T_G of an M-free edition together with the guaranteed bound on the
    number of triplets that do not fit it: floor(delta / gamma)."""
    if not is_m_free(G):
        raise NotMFree(find_m_quintuple(G))
    d = delta(G, rmap.H)
    bound = d if W.is_infinite(d) else d // rmap.params.gamma
    return build_tg(G), bound


def lift_phylogeny_to_edition(rmap: ReductionMap, T: Phylogeny) -> BipartiteGraph:
    H = rmap.H
    if T.species != frozenset(H.species):
        raise PhylogenyError("phylogeny is not over the reduction's species set")
    clusters = T.sorted_clusters()
    whole = frozenset(H.species)
    edges = set()
    for c in H.characters:
        t = rmap.character_index[c]
        leaves, pair = t.leaves, frozenset((t.x, t.y))
        witness = next((x for x in clusters if x & leaves == pair), None)
        if witness is None:
            witness = whole if rmap.params.alpha <= rmap.params.beta else frozenset([t.x])
        edges.update((c, s) for s in witness)
    return BipartiteGraph(H.characters, H.species, edges)


@dataclass
class VerificationReport:
    species: int
    triplets: int
    alpha: W.Weight
    beta: W.Weight
    gamma: int
    opt_rti: int
    opt_edit: W.Weight
    forward_delta: W.Weight
    backward_unfit: int
    backward_bound: W.Weight
    budget: Optional[int] = None
    rti_yes: Optional[bool] = None
    edit_yes: Optional[bool] = None

    @property
    def opt_equal(self) -> bool:
        return self.opt_edit == self.gamma * self.opt_rti

    @property
    def forward_ok(self) -> bool:
        return self.forward_delta == self.gamma * self.opt_rti

    @property
    def backward_ok(self) -> bool:
        return self.backward_unfit <= self.backward_bound

    @property
    def passed(self) -> bool:
        ok = self.opt_equal and self.forward_ok and self.backward_ok
        if self.budget is not None:
            ok = ok and self.rti_yes == self.edit_yes
        return ok

    def to_text(self) -> str:
        fields = [
            ("species", self.species),
            ("triplets", self.triplets),
            ("alpha", W.format_weight(self.alpha)),
            ("beta", W.format_weight(self.beta)),
            ("gamma", self.gamma),
            ("opt_rti", self.opt_rti),
            ("opt_edit", W.format_weight(self.opt_edit)),
            ("gamma_times_opt_rti", self.gamma * self.opt_rti),
            ("phylogeny_to_edition_delta", W.format_weight(self.forward_delta)),
            ("edition_to_phylogeny_unfit", self.backward_unfit),
            ("edition_to_phylogeny_bound", W.format_weight(self.backward_bound)),
        ]
        if self.budget is not None:
            fields += [("budget", self.budget),
                       ("rti_yes", "yes" if self.rti_yes else "no"),
                       ("edit_yes", "yes" if self.edit_yes else "no")]
        fields.append(("result", "pass" if self.passed else "fail"))
        return "".join(f"{k}: {v}\n" for k, v in fields)


def verify_reduction(inst: RtiInstance, params: ReductionParams,
                     species_cap: int = DEFAULT_SPECIES_CAP,
                     max_cells: int = DEFAULT_MAX_CELLS) -> VerificationReport:
    rmap = reduce_rti_to_edit(inst, params)
    best_tree, opt_rti = min_rti_bruteforce(inst, cap=species_cap)
    sol = exact_min_edit(rmap.H, max_cells=max_cells)

    forward = lift_phylogeny_to_edition(rmap, best_tree)
    if not is_perfect_phylogeny(forward, best_tree):
        raise AssertionError("lifted edition does not admit the source phylogeny")
    tree, bound = lift_edition_to_phylogeny(rmap, sol.edition)

    report = VerificationReport(
        species=len(inst.species), triplets=len(inst.triplets),
        alpha=params.alpha, beta=params.beta, gamma=params.gamma,
        opt_rti=opt_rti, opt_edit=sol.cost,
        forward_delta=delta(forward, rmap.H),
        backward_unfit=rti_cost(tree, inst.triplets), backward_bound=bound)
    if inst.budget is not None:
        report.budget = inst.budget
        report.rti_yes = opt_rti <= inst.budget
        report.edit_yes = sol.cost <= rmap.target.k
    return report
