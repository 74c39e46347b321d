"""MRF supertree pipeline: Newick forests, matrix representation and the
command-line front end."""
import argparse
import logging
import sys
from dataclasses import dataclass, field
from typing import Iterable, List, Optional, TextIO, Tuple

import newick

from . import weights as W
from .bipartite import (DraftGraph, find_m_quintuple, is_m_free, read_graph, read_matrix,
                        write_graph, write_matrix)
from .phylo import (DEFAULT_SPECIES_CAP, CapExceeded, Phylogeny, PhylogenyError,
                    min_rti_bruteforce, rti_instance_from_text)
from .reduction import ReductionParams, reduce_rti_to_edit, verify_reduction
from .solvers import (DEFAULT_MAX_CELLS, InfeasibleError, RangeClass, classify_range,
                      exact_min_edit, fpt_edit, supertree_of)

log = logging.getLogger(__name__)

COMMANDS = ("check", "solve", "supertree", "reduce", "oracle", "verify")

EXIT_OK, EXIT_INFEASIBLE, EXIT_USAGE = 0, 1, 2


class NewickError(ValueError):
    pass


@dataclass(frozen=True)
class InputForest:
    trees: Tuple[Phylogeny, ...]

    @property
    def union_species(self) -> frozenset:
        out = frozenset()
        for t in self.trees:
            out |= t.species
        return out


def _node_name(node) -> str:
    name = getattr(node, "unquoted_name", None) or node.name or ""
    return name.strip()


def _tree_from_node(root) -> Phylogeny:
    clusters = []

    def leaves_below(node) -> frozenset:
        if not node.descendants:
            name = _node_name(node)
            if not name:
                raise NewickError("leaf without a label")
            out = frozenset([name])
        else:
            parts = [leaves_below(d) for d in node.descendants]
            out = frozenset().union(*parts)
            if sum(map(len, parts)) != len(out):
                raise NewickError("duplicate leaf label within a tree")
        clusters.append(out)
        return out

    species = leaves_below(root)
    try:
        return Phylogeny.build(species, clusters)
    except PhylogenyError as e:
        raise NewickError(str(e)) from None


def parse_newick(text: str) -> Phylogeny:
    """Cluster set of one Newick tree; internal labels and branch lengths are ignored."""
    text = text.strip()
    if not text.endswith(";"):
        raise NewickError("tree must be terminated by ';'")
    if text.count("(") != text.count(")"):
        raise NewickError("unbalanced parentheses")
    try:
        nodes = newick.loads(text)
    except Exception as e:  # the newick package raises bare ValueErrors and friends
        raise NewickError(str(e)) from None
    if len(nodes) != 1:
        raise NewickError(f"expected one tree per line, found {len(nodes)}")
    return _tree_from_node(nodes[0])


def parse_newick_forest(text: str) -> InputForest:
    trees = []
    for lineno, line in enumerate(text.splitlines(), 1):
        if not line.strip():
            continue
        try:
            trees.append(parse_newick(line))
        except NewickError as e:
            raise NewickError(f"line {lineno}: {e}") from None
    if not trees:
        raise NewickError("empty forest")
    return InputForest(tuple(trees))


def _children(T: Phylogeny, cluster: frozenset) -> List[frozenset]:
    inside = [x for x in T.clusters if x and x < cluster]
    maximal = [x for x in inside if not any(x < y for y in inside)]
    return sorted(maximal, key=lambda x: min(x))


def serialize_newick(T: Phylogeny) -> str:
    """Canonical Newick; siblings are ordered by their least leaf."""
    def build(cluster):
        if len(cluster) == 1:
            return newick.Node(str(next(iter(cluster))))
        return newick.Node.create(descendants=[build(x) for x in _children(T, cluster)])

    if not T.species:
        return ";"
    return newick.dumps(build(frozenset(T.species)))


def build_mrf_matrix(forest: InputForest) -> DraftGraph:
    """One +1/-1/0 character per non-trivial cluster of each input tree."""
    species = tuple(sorted(forest.union_species))
    names, rows = [], []
    for i, tree in enumerate(forest.trees, 1):
        for j, cluster in enumerate(tree.nontrivial_clusters(), 1):
            names.append(f"T{i}.{j}")
            rows.append([1 if s in cluster else (-1 if s in tree.species else 0)
                         for s in species])
    if not rows:
        log.warning("forest has no non-trivial cluster; matrix has no characters")
    return DraftGraph(tuple(names), species, rows)


# -- command line --------------------------------------------------------------

@dataclass
class RunConfig:
    command: str
    inputs: List[str] = field(default_factory=list)
    alpha: W.Weight = 1
    beta: W.Weight = 1
    budget: Optional[int] = None
    cap_species: int = DEFAULT_SPECIES_CAP
    cap_cells: int = DEFAULT_MAX_CELLS
    out: Optional[str] = None

    def __post_init__(self):
        if self.command not in COMMANDS:
            raise ValueError(f"unknown command {self.command!r}")
        if self.cap_species <= 0 or self.cap_cells <= 0:
            raise ValueError("caps must be positive")
        if self.budget is not None and self.budget < 0:
            raise ValueError("budget must be non-negative")
        if self.command in ("reduce", "verify"):
            ReductionParams(self.alpha, self.beta)
        if len(self.inputs) != 1:
            raise ValueError(f"{self.command} takes exactly one input file")


def _kv(pairs: Iterable[Tuple[str, object]]) -> str:
    return "".join(f"{k}: {v}\n" for k, v in pairs)


def _read(path: str) -> str:
    if path == "-":
        return sys.stdin.read()
    with open(path) as fh:
        return fh.read()


def _emit(text: str, config: RunConfig, stdout: TextIO):
    if config.out:
        with open(config.out, "w") as fh:
            fh.write(text)
    else:
        stdout.write(text)


def _cmd_check(text, config, stdout):
    if text.lstrip().startswith("#graph"):
        G = read_graph(text)
    else:
        G = read_matrix(text).sign_edition()
    if is_m_free(G):
        _emit(_kv([("m_free", "yes")]), config, stdout)
    else:
        _emit(_kv([("m_free", "no"), ("witness", find_m_quintuple(G))]), config, stdout)
    return EXIT_OK


def _cmd_solve(text, config, stdout, stderr):
    H = read_matrix(text)
    if config.budget is not None and classify_range(H) is RangeClass.JOKER_FREE:
        sol = fpt_edit(H, config.budget)
    else:
        sol = exact_min_edit(H, max_cells=config.cap_cells)
        if config.budget is not None and sol.cost > config.budget:
            sol = None
    if sol is None:
        stderr.write(f"infeasible: no M-free edition within budget {config.budget}\n")
        return EXIT_INFEASIBLE
    _emit(write_graph(sol.edition) + f"cost: {W.format_weight(sol.cost)}\n", config, stdout)
    return EXIT_OK


def _cmd_supertree(text, config, stdout):
    forest = parse_newick_forest(text)
    H = build_mrf_matrix(forest)
    tree, cost = supertree_of(H, max_cells=config.cap_cells)
    nwk = serialize_newick(tree)
    stdout.write(_kv([("trees", len(forest.trees)), ("species", len(H.species)),
                      ("characters", len(H.characters)), ("cost", W.format_weight(cost)),
                      ("supertree", nwk)]))
    if config.out:
        with open(config.out, "w") as fh:
            fh.write(nwk + "\n")
    return EXIT_OK


def _cmd_reduce(text, config, stdout):
    inst = rti_instance_from_text(text, budget=config.budget)
    params = ReductionParams(config.alpha, config.beta)
    rmap = reduce_rti_to_edit(inst, params)
    matrix = write_matrix(rmap.H)
    if config.out:
        with open(config.out, "w") as fh:
            fh.write(matrix)
        pairs = [("characters", len(rmap.H.characters)), ("species", len(rmap.H.species)),
                 ("gamma", params.gamma)]
        if rmap.target.k is not None:
            pairs.append(("budget", rmap.target.k))
        stdout.write(_kv(pairs))
    else:
        stdout.write(matrix)
    return EXIT_OK


def _cmd_oracle(text, config, stdout):
    inst = rti_instance_from_text(text, budget=config.budget)
    tree, cost = min_rti_bruteforce(inst, cap=config.cap_species)
    pairs = [("species", len(inst.species)), ("triplets", len(inst.triplets)),
             ("cost", cost), ("phylogeny", serialize_newick(tree))]
    if inst.budget is not None:
        pairs.append(("yes_instance", "yes" if cost <= inst.budget else "no"))
    _emit(_kv(pairs), config, stdout)
    return EXIT_OK


def _cmd_verify(text, config, stdout):
    inst = rti_instance_from_text(text, budget=config.budget)
    report = verify_reduction(inst, ReductionParams(config.alpha, config.beta),
                              species_cap=config.cap_species, max_cells=config.cap_cells)
    _emit(report.to_text(), config, stdout)
    return EXIT_OK if report.passed else EXIT_INFEASIBLE


def run(config: RunConfig, stdout: TextIO = None, stderr: TextIO = None) -> int:
    """Execute one command; returns the process exit status."""
    stdout = stdout or sys.stdout
    stderr = stderr or sys.stderr
    try:
        text = _read(config.inputs[0])
    except OSError as e:
        stderr.write(f"io error: {e}\n")
        return EXIT_USAGE
    try:
        if config.command == "check":
            return _cmd_check(text, config, stdout)
        if config.command == "solve":
            return _cmd_solve(text, config, stdout, stderr)
        if config.command == "supertree":
            return _cmd_supertree(text, config, stdout)
        if config.command == "reduce":
            return _cmd_reduce(text, config, stdout)
        if config.command == "oracle":
            return _cmd_oracle(text, config, stdout)
        return _cmd_verify(text, config, stdout)
    except CapExceeded as e:
        stderr.write(f"cap exceeded: {e}\n")
        return EXIT_USAGE
    except InfeasibleError as e:
        stderr.write(f"infeasible: {e}\n")
        return EXIT_INFEASIBLE
    except OSError as e:
        stderr.write(f"io error: {e}\n")
        return EXIT_USAGE
    except ValueError as e:
        stderr.write(f"malformed input: {e}\n")
        return EXIT_USAGE


def _weight_arg(token: str):
    try:
        return W.parse_weight(token)
    except W.WeightError as e:
        raise argparse.ArgumentTypeError(str(e))


def make_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="minflip", description="Exact M-free edition and MRF supertrees")
    p.add_argument("command", choices=COMMANDS)
    p.add_argument("input", help="input file ('-' for stdin)")
    p.add_argument("--alpha", type=_weight_arg, default=1, help="outgroup weight for reduce/verify")
    p.add_argument("--beta", type=_weight_arg, default=1, help="in-group weight for reduce/verify")
    p.add_argument("--budget", type=int, default=None)
    p.add_argument("--cap-species", type=int, default=DEFAULT_SPECIES_CAP)
    p.add_argument("--cap-cells", type=int, default=DEFAULT_MAX_CELLS)
    p.add_argument("--out", default=None)
    return p


def main(argv=None) -> int:
    args = make_parser().parse_args(argv)
    try:
        config = RunConfig(args.command, [args.input], args.alpha, args.beta, args.budget,
                           args.cap_species, args.cap_cells, args.out)
    except ValueError as e:
        sys.stderr.write(f"usage error: {e}\n")
        return EXIT_USAGE
    return run(config)
