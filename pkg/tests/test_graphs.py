import random

import pytest

from mccarthy.errors import GrowthError, InputError
from mccarthy.graphs import (
    EdgePath,
    FilteredGraph,
    UTRep,
    apply_ut,
    canonical_decomposition,
    format_path,
    growth_class,
    is_nielsen,
    is_periodic_nielsen,
    linear_families,
    linear_bound_holds,
    parse_path,
    rose_utrep,
    tighten,
    ut_inverse,
    validate_ut,
)
from mccarthy.words import CyclicWord, FreeAutomorphism, Word, primitive_root
from strategies import random_linear_utrep, random_word


def rose(names, rank=None):
    r = rank or len(names)
    labels = {n: Word.parse(n, r) for n in names} if all(len(n) == 1 for n in names) else None
    return FilteredGraph.rose(names, r, labels)


def rep_on(names, table, rank=None):
    return UTRep.from_text_suffixes(rose(names, rank), table)


def folding_rep():
    return rose_utrep(FreeAutomorphism.parse_images(4, ["adbcBD", "bc", "c", "d"]))


def test_tighten_backtrack():
    g = FilteredGraph(["u", "v"], ["e", "f"], {"e": ("u", "v"), "f": ("u", "v")})
    p = EdgePath(g, parse_path(g, "e -e f"))
    assert str(tighten(p)) == "f"
    q = EdgePath(g, parse_path(g, "e -f"))
    assert tighten(q) == q


def test_tighten_recovers_after_inserted_backtracks():
    rng = random.Random(1)
    g = rose(["a", "b", "c"])
    for _ in range(500):
        w = random_word(rng, 3, 10)
        if not w:
            continue
        noisy = list(w.letters)
        for _ in range(rng.randint(1, 4)):
            x = rng.choice([1, -1]) * rng.randint(1, 3)
            k = rng.randint(0, len(noisy))
            noisy[k:k] = [x, -x]
        assert tighten(EdgePath(g, noisy, "v")).letters == w.letters


def test_noncomposable_path_is_rejected():
    g = FilteredGraph(["u", "v"], ["e", "f"], {"e": ("u", "v"), "f": ("u", "v")})
    with pytest.raises(InputError):
        EdgePath(g, parse_path(g, "e f"))


def test_validate_folding_example():
    rep = folding_rep()
    assert validate_ut(rep).valid
    assert rep.graph.edges == ("d", "c", "b", "a")
    assert format_path(rep.graph, rep.suffixes[3]) == "d b c B D"


def test_validate_height_and_basepoint():
    bad = rep_on(["a", "b"], {"a": "a"})
    assert "height" in validate_ut(bad).kinds()
    g = FilteredGraph(["u", "v"], ["e", "f"], {"e": ("u", "v"), "f": ("u", "v")})
    rep = UTRep(g, [(), (1,)])
    assert "basepoint" in validate_ut(rep).kinds()


def test_apply_ut_step_of_the_worked_example():
    # after the first fold the edge a' carries the suffix c c
    g = FilteredGraph.rose(["d", "c", "b", "a'"], 4)
    rep = UTRep.from_text_suffixes(g, {"b": "c", "a'": "c c"})
    p = EdgePath(g, (4,), "v")
    assert format_path(g, apply_ut(rep, p, 1).letters) == "a' c c"
    assert apply_ut(rep, p, 0) == tighten(p)


def test_apply_ut_inverse_round_trip():
    rng = random.Random(2)
    rep = folding_rep()
    g = rep.graph
    for _ in range(200):
        w = random_word(rng, 4, 8)
        p = EdgePath(g, w.letters, "v")
        back = apply_ut(rep, apply_ut(rep, p, 1), -1)
        assert back == tighten(p)


def test_ut_inverse_examples():
    triv = rep_on(["a", "b"], {})
    assert ut_inverse(triv).is_trivial()
    rep = rep_on(["b", "a"], {"a": "b"}, rank=2)
    assert format_path(rep.graph, ut_inverse(rep).suffixes[1]) == "B"


def test_ut_inverse_on_random_linear_reps():
    for seed in range(30):
        rep = random_linear_utrep(random.Random(seed), random.Random(seed).randint(2, 4))
        inv = ut_inverse(rep)
        for i in range(1, len(rep.graph.edges) + 1):
            assert inv.apply_letters(rep.apply_letters((i,))) == (i,)


def test_marking_consistency_of_induced_automorphism():
    rng = random.Random(3)
    rep = folding_rep()
    phi = rep.induced_automorphism()
    g = rep.graph
    for _ in range(200):
        w = random_word(rng, 4, 8)
        loop = w.letters  # rose petals are labelled by the generators
        assert g.label(rep.apply_letters(loop)) == phi(g.label(loop))


def test_nielsen_examples():
    rep = folding_rep()
    g = rep.graph
    fixed = EdgePath(g, parse_path(g, "c d"), "v")
    assert is_nielsen(rep, fixed)
    twister = EdgePath(g, parse_path(g, "b c B"), "v")
    assert is_nielsen(rep, twister)
    assert not is_nielsen(rep, EdgePath(g, parse_path(g, "b"), "v"))
    assert is_periodic_nielsen(rep, twister) == 1


def test_nielsen_closed_under_rep():
    rep = folding_rep()
    g = rep.graph
    p = EdgePath(g, parse_path(g, "b c B d"), "v")
    assert is_nielsen(rep, p)
    for n in range(1, 5):
        assert is_nielsen(rep, apply_ut(rep, p, n))


def test_linear_families_worked_example():
    # after the first conjugate fold the family {a', b} appears
    g = FilteredGraph.rose(["d", "c", "b", "a'"], 4)
    folded = UTRep.from_text_suffixes(g, {"b": "c", "a'": "c c"})
    fams = linear_families(folded)
    assert len(fams) == 1
    assert fams[0].root_str(g) == "c"
    assert fams[0].members == {"b": 1, "a'": 2}
    assert linear_families(rep_on(["a", "b"], {})) == []


def test_linear_families_two_groups():
    g = FilteredGraph.rose(["a", "b", "x", "y"], 4)
    rep = UTRep.from_text_suffixes(g, {"x": "a a", "y": "b A b a"})
    fams = linear_families(rep)
    assert len(fams) == 2
    for fam in fams:
        roots = set()
        for e in fam.members:
            u = rep.suffixes[g.index[e] - 1]
            roots.add(primitive_root(CyclicWord(4, u))[0])
        assert len(roots) == 1


def test_linear_families_reject_growing_suffix():
    rep = rep_on(["c", "b", "a"], {"b": "c", "a": "b"}, rank=3)
    with pytest.raises(GrowthError):
        linear_families(rep)


def test_canonical_decomposition_exceptional():
    g = FilteredGraph.rose(["c", "x", "y"], 3)
    rep = UTRep.from_text_suffixes(g, {"x": "c", "y": "c"})
    p = EdgePath(g, parse_path(g, "x c c c -y"), "v")
    comps = canonical_decomposition(rep, p)
    assert [c.kind for c in comps] == ["exceptional"]
    assert comps[0].growth == "nielsen"
    rep2 = UTRep.from_text_suffixes(g, {"x": "c", "y": "c c"})
    comps = canonical_decomposition(rep2, p)
    assert comps[0].kind == "exceptional" and comps[0].growth == "linear"
    assert sum((c.letters for c in comps), ()) == p.letters


def test_canonical_decomposition_without_linear_edges():
    g = FilteredGraph.rose(["c", "x"], 2)
    rep = UTRep.from_text_suffixes(g, {})
    p = EdgePath(g, parse_path(g, "x c -x"), "v")
    comps = canonical_decomposition(rep, p)
    assert all(c.kind == "edge" for c in comps)
    assert sum((c.letters for c in comps), ()) == p.letters


def test_growth_examples():
    assert growth_class(rep_on(["b", "a"], {"a": "b"}, 2)).overall == "linear"
    rep = rep_on(["c", "b", "a"], {"b": "c", "a": "b"}, 3)
    g = growth_class(rep)
    assert g.overall == "higher-poly"
    assert abs(g.degree_estimate - 2) <= 0.25
    assert growth_class(rep_on(["a", "b"], {})).overall == "fixed"


def test_linear_bound():
    rng = random.Random(4)
    for seed in range(20):
        rep = random_linear_utrep(random.Random(seed), 3)
        for _ in range(10):
            w = random_word(rng, 3, 6)
            if not w:
                continue
            p = EdgePath(rep.graph, w.letters, "v")
            for n in (1, 3, 7):
                assert linear_bound_holds(rep, p, n)


def test_rose_utrep_refuses_non_triangular():
    assert rose_utrep(FreeAutomorphism.parse_images(2, ["b", "a"])) is None
