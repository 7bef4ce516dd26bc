import pytest

from mccarthy import folding, formats, interaction, sample
from mccarthy.errors import InputError
from mccarthy.gog import DehnTwist, GraphOfGroups, make_edge, translation_length
from mccarthy.graphs import rose_utrep
from mccarthy.words import FreeAutomorphism, Word, cyclic_ball


def load(name):
    return formats.load(sample(name))


def eff(name):
    return folding.efficient_rep(rose_utrep(load(name)))


@pytest.fixture(scope="module")
def twists():
    return {x: load(f"twist_{x}.gog") for x in "ABC"}


@pytest.fixture(scope="module")
def hyperbolic_pair():
    return eff("hyperbolic_sigma.aut"), eff("hyperbolic_tau.aut")


def test_etg_single_arc(twists):
    et = interaction.edge_twist_digraph(twists["A"], twists["B"])
    assert len(et.vertices) == 2
    assert et.arcs == [(("A", "a"), ("B", "b"))]
    info = interaction.analyze(et)
    assert info.acyclic and info.longest_path == 1 and info.growth_degree_bound == 2


def test_etg_no_arcs(twists):
    et = interaction.edge_twist_digraph(twists["A"], twists["C"])
    assert len(et.vertices) == 2 and et.arcs == []
    info = interaction.analyze(et)
    assert info.longest_path == 0 and info.growth_degree_bound == 1


def test_etg_same_twist_has_no_arcs(twists):
    et = interaction.edge_twist_digraph(twists["A"], twists["A"])
    assert et.arcs == []


def test_etg_two_cycle(hyperbolic_pair):
    et = interaction.edge_twist_digraph(*hyperbolic_pair)
    assert len(et.arcs) == 2
    info = interaction.analyze(et)
    assert not info.acyclic
    assert len(info.cycle) == 2


def test_etg_is_bipartite(twists, hyperbolic_pair):
    for pair in ((twists["A"], twists["B"]), hyperbolic_pair):
        for a, b in interaction.edge_twist_digraph(*pair).arcs:
            assert a[0] != b[0]


def test_etg_orientation_stable(twists, hyperbolic_pair):
    def flipped(d):
        return DehnTwist(d.gog, {k: -v for k, v in d.twisters.items()})

    for a, b in ((twists["A"], twists["B"]), hyperbolic_pair):
        assert interaction.edge_twist_digraph(a, b).arcs == interaction.edge_twist_digraph(flipped(a), flipped(b)).arcs


def test_etg_refuses_inefficient(twists):
    lazy = DehnTwist(twists["A"].gog, {"a": 0})
    with pytest.raises(InputError):
        interaction.edge_twist_digraph(lazy, twists["B"])


def test_etg_outputs(twists):
    et = interaction.edge_twist_digraph(twists["A"], twists["B"])
    assert "->" in et.to_dot()
    d = et.to_dict()
    assert len(d["arcs"]) == 1
    assert et.to_networkx().number_of_edges() == 1


def test_hyperbolicity_tables(twists, hyperbolic_pair):
    t = interaction.hyperbolic_hyperbolic(twists["A"], twists["B"]).to_dict()
    assert t["lengths"] == {"A:a": 1, "B:b": 0}
    assert not t["hyperbolic_hyperbolic"]
    t = interaction.hyperbolic_hyperbolic(twists["A"], twists["C"]).to_dict()
    assert t["lengths"] == {"A:a": 0, "B:a": 0}
    assert not t["hyperbolic_hyperbolic"]
    t = interaction.hyperbolic_hyperbolic(*hyperbolic_pair).to_dict()
    assert t["hyperbolic_hyperbolic"]


def test_witness_for_elliptic_hyperbolic_pair(twists):
    res = interaction.incompatibility_search(twists["A"], twists["B"], radius=4)
    w = res.witness
    assert (str(w.g), str(w.h)) == ("a", "baB")
    assert w.lengths["A"]["gh"] == 2 and w.lengths["A"]["gh^-1"] == 0
    assert w.lengths["B"]["gh"] == w.lengths["B"]["gh^-1"] == 2
    assert w.revalidate(twists["A"].gog, twists["B"].gog)


def test_witness_for_elliptic_elliptic_pair(twists):
    ga, gc = twists["A"].gog, twists["C"].gog
    res = interaction.incompatibility_search(ga, gc, radius=4)
    assert res.found
    w = res.witness
    assert w.revalidate(ga, gc)
    # independent recomputation of all eight lengths
    for side, g in (("A", ga), ("B", gc)):
        got = {
            "g": translation_length(g, w.g),
            "h": translation_length(g, w.h),
            "gh": translation_length(g, w.g * w.h),
            "gh^-1": translation_length(g, w.g * w.h.inverse()),
        }
        assert got == w.lengths[side]
    again = interaction.IncompatibilityWitness.from_dict(res.to_dict()["witness"], 3)
    assert again.revalidate(ga, gc)


def test_compatible_pair_has_no_witness():
    da, db = eff("disjoint_sigma.aut"), eff("disjoint_tau.aut")
    res = interaction.incompatibility_search(da, db, radius=4)
    assert not res.found
    assert res.radius == 4
    assert "note" in res.to_dict()


def test_search_is_independent_of_jobs(twists):
    one = interaction.incompatibility_search(twists["A"], twists["C"], radius=3)
    two = interaction.incompatibility_search(twists["A"], twists["C"], radius=3, jobs=2)
    assert one.to_dict() == two.to_dict()


def test_growth_estimate_within_etg_bound():
    s, t = load("elliptic_hyperbolic_sigma.aut"), load("elliptic_hyperbolic_tau.aut")
    rows = interaction.growth_degree_estimate(s, t, Word.parse("a", 3), n_max=16, samples=50)
    assert len(rows) == 50
    assert max(r["degree"] for r in rows) <= 2 + 0.25


def test_growth_estimate_identity_and_commuting():
    ident = FreeAutomorphism.parse_images(3, ["a", "b", "c"])
    rows = interaction.growth_degree_estimate(ident, ident, Word.parse("a", 3), samples=5)
    assert all(r["degree"] == 0 for r in rows)
    s, t = load("disjoint_sigma.aut"), load("disjoint_tau.aut")
    rows = interaction.growth_degree_estimate(s, t, Word.parse("ab", 3), samples=30)
    assert max(r["degree"] for r in rows) <= 1 + 0.25


def test_filling_slice(twists):
    ga, gb = twists["A"].gog, twists["B"].gog
    slice_ = interaction.cyclic_filling_slice(ga, gb, 3)
    assert Word.parse("c", 3) in slice_
    assert interaction.cyclic_filling_slice(ga, gb, 0) == []
    for w in slice_:
        assert translation_length(ga, w) == translation_length(gb, w) == 0


def test_filling_slice_empty_for_transverse_free_splittings():
    W = lambda s: Word.parse(s, 2)  # noqa: E731
    one = Word.identity(2)
    g1 = GraphOfGroups(2, {"u": [W("a")], "w": [W("b")]}, [make_edge("e", "u", "w", one, iota_to=one)])
    g2 = GraphOfGroups(2, {"u": [W("ab")], "w": [W("abb")]}, [make_edge("e", "u", "w", one, iota_to=one)])
    assert interaction.cyclic_filling_slice(g1, g2, 4) == []


def test_hyperbolic_pair_shares_boundary_class(hyperbolic_pair):
    # one-edge cyclic splittings of F2 all contain the commutator class
    ga, gb = (d.gog for d in hyperbolic_pair)
    assert Word.parse("abAB", 2) in interaction.cyclic_filling_slice(ga, gb, 4)
    assert all(len(w) == 4 for w in interaction.cyclic_filling_slice(ga, gb, 4))
