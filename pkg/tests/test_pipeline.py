import io
import random

import pytest
from hypothesis import given, settings, strategies as st

from minflip.bipartite import read_graph, read_matrix, write_matrix
from minflip.phylo import Phylogeny, ResolvedTriplet, RtiInstance, enumerate_phylogenies
from minflip.pipeline import (InputForest, NewickError, RunConfig, build_mrf_matrix, main,
                              parse_newick, parse_newick_forest, run, serialize_newick)
from minflip.reduction import ReductionParams, reduce_rti_to_edit


def kv(text):
    return dict(line.split(": ", 1) for line in text.splitlines() if ": " in line)


def run_cmd(tmp_path, command, content, **kw):
    path = tmp_path / "input.txt"
    path.write_text(content)
    out, err = io.StringIO(), io.StringIO()
    status = run(RunConfig(command, [str(path)], **kw), stdout=out, stderr=err)
    return status, out.getvalue(), err.getvalue()


# -- Newick -------------------------------------------------------------------------

def test_parse_triplet_tree():
    assert parse_newick("((a,b),c);") == Phylogeny.build("abc", [{"a", "b"}])


def test_parse_star():
    assert parse_newick("(a,b,c);") == Phylogeny.star("abc")


def test_parse_two_cherries():
    T = parse_newick("((a,b),(c,d));")
    assert T.nontrivial_clusters() == [frozenset("ab"), frozenset("cd")]


def test_labels_and_lengths_ignored():
    assert parse_newick("((a:0.1,b:2)x:1,(c,d)90)root:0;") == parse_newick("((a,b),(c,d));")


def test_unary_nodes_collapse():
    assert parse_newick("(((a,b)),c);") == parse_newick("((a,b),c);")


@pytest.mark.parametrize("bad", ["((a,b),c;", "(a,b),c);", "((a,a),c);", ";", "(a,b)", "(a,,b);"])
def test_newick_errors(bad):
    with pytest.raises(NewickError):
        parse_newick(bad)


def test_forest_parsing():
    forest = parse_newick_forest("((a,b),c);\n\n((c,d),e);\n")
    assert len(forest.trees) == 2
    assert forest.union_species == frozenset("abcde")
    with pytest.raises(NewickError, match="line 2"):
        parse_newick_forest("(a,b);\n((a,b);\n")
    with pytest.raises(NewickError):
        parse_newick_forest("\n\n")


def test_serialize():
    assert serialize_newick(Phylogeny.star("abc")) == "(a,b,c);"
    assert serialize_newick(Phylogeny.build("abc", [{"a", "b"}])) == "((a,b),c);"
    assert serialize_newick(Phylogeny.build("abc", [{"b", "c"}])) == "(a,(b,c));"


@settings(max_examples=150)
@given(st.sampled_from(list(enumerate_phylogenies("abcde"))))
def test_newick_roundtrip(T):
    assert parse_newick(serialize_newick(T)) == T


# -- MRF matrix -----------------------------------------------------------------------

def test_mrf_single_tree():
    H = build_mrf_matrix(parse_newick_forest("((a,b),c);"))
    assert H.weights == ((1, 1, -1),)


def test_mrf_two_trees_have_jokers():
    H = build_mrf_matrix(parse_newick_forest("((a,b),c);\n((c,d),e);"))
    assert H.species == tuple("abcde")
    assert H.weights == ((1, 1, -1, 0, 0), (0, 0, 1, 1, -1))


def test_mrf_star_has_no_characters(caplog):
    H = build_mrf_matrix(parse_newick_forest("(a,b,c);"))
    assert H.characters == ()
    assert "no non-trivial cluster" in caplog.text


def test_mrf_row_and_joker_counts():
    forest = parse_newick_forest("(((a,b),c),(d,e));\n((a,f),(b,g));\n((a,c),(d,f),h);")
    H = build_mrf_matrix(forest)
    assert len(H.characters) == sum(len(t.nontrivial_clusters()) for t in forest.trees)
    row = 0
    for t in forest.trees:
        for _ in t.nontrivial_clusters():
            jokers = sum(1 for w in H.weights[row] if w == 0)
            assert jokers == len(forest.union_species) - len(t.species)
            row += 1


def test_reduce_matches_mrf_of_triplet_trees():
    R = [ResolvedTriplet(*t) for t in ("abc", "acb", "bcd", "dab")]
    species = frozenset("abcd")
    rmap = reduce_rti_to_edit(RtiInstance(species, R), ReductionParams(1, 1))
    newick_lines = [f"(({t.x},{t.y}),{t.z});" for t in R]
    # each one-edge tree becomes one row, jokered on the leaf it lacks
    H = build_mrf_matrix(parse_newick_forest("\n".join(newick_lines)))
    assert H.species == rmap.H.species
    assert H.weights == rmap.H.weights


# -- CLI ------------------------------------------------------------------------------------

def test_check_command(tmp_path):
    status, out, _ = run_cmd(tmp_path, "check", "#graph\ta\tb\tc\nx\t1\t1\t0\ny\t0\t1\t1\n")
    assert status == 0
    assert kv(out) == {"m_free": "no", "witness": "a x b y c"}
    status, out, _ = run_cmd(tmp_path, "check", "#matrix\ta\tb\tc\nx\t1\t1\t-1\ny\t1\t1\t1\n")
    assert kv(out) == {"m_free": "yes"}


def test_solve_command(tmp_path):
    status, out, _ = run_cmd(tmp_path, "solve", "#matrix\ta\tb\tc\nx\t1\t1\t-1\ny\t-1\t1\t1\n")
    assert status == 0
    body, trailer = out.rsplit("cost: ", 1)
    assert trailer == "1\n"
    assert read_graph(body)


def test_solve_budget_and_infeasible(tmp_path):
    m = "#matrix\ta\tb\tc\nx\t1\t1\t-1\ny\t-1\t1\t1\n"
    assert run_cmd(tmp_path, "solve", m, budget=0)[0] == 1
    assert run_cmd(tmp_path, "solve", m, budget=1)[0] == 0
    hard = "#matrix\ta\tb\tc\nx\tinf\tinf\t-inf\ny\t-inf\tinf\tinf\n"
    status, _, err = run_cmd(tmp_path, "solve", hard)
    assert status == 1 and err.startswith("infeasible:")


def test_supertree_identical_trees(tmp_path):
    status, out, _ = run_cmd(tmp_path, "supertree", "((a,b),(c,d));\n((a,b),(c,d));\n")
    assert status == 0
    res = kv(out)
    assert res["cost"] == "0" and res["supertree"] == "((a,b),(c,d));"


def test_supertree_compatible_forest(tmp_path):
    status, out, _ = run_cmd(tmp_path, "supertree", "((a,b),c);\n((c,d),b);\n")
    res = kv(out)
    assert status == 0 and res["cost"] == "0"
    T = parse_newick(res["supertree"])
    assert frozenset("ab") in T.clusters and frozenset("cd") in T.clusters


def test_supertree_out_file(tmp_path):
    target = tmp_path / "tree.nwk"
    run_cmd(tmp_path, "supertree", "((a,b),c);\n", out=str(target))
    assert target.read_text() == "((a,b),c);\n"


def test_reduce_command(tmp_path):
    status, out, _ = run_cmd(tmp_path, "reduce", "a b | c\n", alpha=2, beta=3)
    assert status == 0
    assert out == "#matrix\ta\tb\tc\n1\t3\t3\t-2\n"
    assert read_matrix(out).weights == ((3, 3, -2),)
    target = tmp_path / "h.tsv"
    status, out, _ = run_cmd(tmp_path, "reduce", "a b | c\n", alpha=2, beta=3, budget=4,
                             out=str(target))
    assert kv(out) == {"characters": "1", "species": "3", "gamma": "2", "budget": "8"}
    assert target.read_text() == "#matrix\ta\tb\tc\n1\t3\t3\t-2\n"


def test_oracle_command(tmp_path):
    status, out, _ = run_cmd(tmp_path, "oracle", "a b | c\na c | b\nb c | a\n", budget=1)
    assert status == 0
    res = kv(out)
    assert res["cost"] == "2" and res["yes_instance"] == "no"


def test_verify_command(tmp_path):
    status, out, _ = run_cmd(tmp_path, "verify", "a b | c\na c | b\nb c | a\n")
    res = kv(out)
    assert status == 0
    assert (res["opt_rti"], res["opt_edit"], res["result"]) == ("2", "2", "pass")


def test_error_prefixes(tmp_path):
    status, _, err = run_cmd(tmp_path, "supertree", "((a,b),c;\n")
    assert status == 2 and err.startswith("malformed input:")
    status, _, err = run_cmd(tmp_path, "oracle", "a b | c\nd e | f\ng h | a\n")
    assert status == 2 and err.startswith("cap exceeded:")
    out, err = io.StringIO(), io.StringIO()
    status = run(RunConfig("check", [str(tmp_path / "missing")]), stdout=out, stderr=err)
    assert status == 2 and err.getvalue().startswith("io error:")


def test_run_config_validation():
    with pytest.raises(ValueError):
        RunConfig("reduce", ["x"], alpha=float("inf"), beta=float("inf"))
    with pytest.raises(ValueError):
        RunConfig("solve", ["x"], cap_cells=0)
    with pytest.raises(ValueError):
        RunConfig("dance", ["x"])


def test_main_entry(tmp_path, capsys):
    path = tmp_path / "t.txt"
    path.write_text("a b | c\n")
    assert main(["reduce", str(path), "--alpha", "inf", "--beta", "1"]) == 0
    assert capsys.readouterr().out == "#matrix\ta\tb\tc\n1\t1\t1\t-inf\n"
    assert main(["verify", str(path), "--alpha", "inf", "--beta", "inf"]) == 2


def test_pipeline_round_trip_random_forests():
    rng = random.Random(31)
    trees = list(enumerate_phylogenies("abcdef"))
    for _ in range(25):
        T = rng.choice(trees)
        parts = []
        for _ in range(rng.randint(2, 3)):
            sub = frozenset(rng.sample("abcdef", rng.randint(3, 5)))
            parts.append(Phylogeny.build(sub, [x & sub for x in T.clusters]))
        forest = InputForest(tuple(parts))
        text = "\n".join(serialize_newick(p) for p in parts)
        H = build_mrf_matrix(parse_newick_forest(text))
        assert write_matrix(H) == write_matrix(build_mrf_matrix(forest))
