"""One test per headline criterion; each prints a single PASS/FAIL line."""

import random
import time

from mccarthy import dichotomy, folding, formats, interaction, sample
from mccarthy.gog import (
    DehnTwist,
    bcc_bound,
    bcc_empirical,
    from_groupoid,
    normalize,
    translation_length,
)
from mccarthy.graphs import EdgePath, FilteredGraph, format_path, rose_utrep, tighten
from mccarthy.stallings import same_subgroup
from mccarthy.words import FreeAutomorphism, Word, compose, invert, is_inner
from strategies import random_automorphism, random_rep_seq, random_word


def report(name, checks, started):
    elapsed = time.perf_counter() - started
    failed = [k for k, ok in checks.items() if not ok]
    status = "PASS" if not failed else "FAIL"
    detail = f"{elapsed:.2f}s" + (f"; failed: {', '.join(failed)}" if failed else "")
    print(f"{status} {name} ({detail})")
    assert not failed, failed


def load(name):
    return formats.load(sample(name))


def test_worked_example_efficient_rep():
    t0 = time.perf_counter()
    rep = load("folding_example.aut")
    ut = rose_utrep(rep)
    r1, _ = folding.fold_conjugates(ut)
    res = folding.efficient_rep(ut, with_trace=True)
    d = res.twist
    g = d.gog
    w = lambda s: Word.parse(s, 4)  # noqa: E731
    stable = {e.name: e.stable for e in g.edges}
    checks = {
        "intermediate a' suffix c^2": dict(zip(r1.graph.edges, (format_path(r1.graph, s) for s in r1.suffixes))).get("a'")
        == "c c",
        "two loop edges": sorted(stable) == ["a''", "b"] and len(g.vertices) == 1,
        "z_a'' = bcB": d.twister_word("a''") == w("bcB"),
        "z_b = c": d.twister_word("b") == w("c"),
        "a'' = ad": stable["a''"] == w("ad") and stable["b"] == w("b"),
        "vertex group": same_subgroup(4, g.vertices["v"], [w("c"), w("d"), w("bcB"), w("ad bcB DA")]),
        "outer class": is_inner(compose(d.induced_automorphism(), invert(rep))) is not None,
    }
    checks["under 1 s"] = time.perf_counter() - t0 < 1.0
    report("worked example efficient representative", checks, t0)


def test_elliptic_hyperbolic_length_table():
    t0 = time.perf_counter()
    ga, gb = load("twist_A.gog").gog, load("twist_B.gog").gog
    g, h = Word.parse("a", 3), Word.parse("baB", 3)
    la = {k: translation_length(ga, x) for k, x in (("g", g), ("h", h), ("gh", g * h), ("gh-", g * h.inverse()))}
    lb = {k: translation_length(gb, x) for k, x in (("g", g), ("h", h), ("gh", g * h), ("gh-", g * h.inverse()))}
    checks = {
        "l_A(g)=l_A(h)=1": la["g"] == la["h"] == 1,
        "l_B(g)=l_B(h)=0": lb["g"] == lb["h"] == 0,
        "l_A(gh)=2": la["gh"] == 2,
        "l_A(gh^-1)=0": la["gh-"] == 0,
        "l_B(gh)=l_B(gh^-1)=2": lb["gh"] == lb["gh-"] == 2,
    }
    checks["under 1 s"] = time.perf_counter() - t0 < 1.0
    report("length table for g=a, h=bab^-1", checks, t0)


def test_edge_twist_digraphs():
    t0 = time.perf_counter()
    a, b, c = (load(f"twist_{x}.gog") for x in "ABC")
    hs = folding.efficient_rep(rose_utrep(load("hyperbolic_sigma.aut")))
    ht = folding.efficient_rep(rose_utrep(load("hyperbolic_tau.aut")))
    ab = interaction.edge_twist_digraph(a, b)
    ac = interaction.edge_twist_digraph(a, c)
    bc = interaction.edge_twist_digraph(b, c)
    hh = interaction.edge_twist_digraph(hs, ht)
    checks = {
        "ET(A,B) single arc a->b": ab.arcs == [(("A", "a"), ("B", "b"))] and len(ab.vertices) == 2,
        "ET(A,C) empty": ac.arcs == [] and len(ac.vertices) == 2,
        "ET(B,C) empty": bc.arcs == [] and len(bc.vertices) == 2,
        "hyperbolic pair 2-cycle": sorted(hh.arcs) == [(("A", "a"), ("B", "b")), (("B", "b"), ("A", "a"))]
        and not interaction.analyze(hh).acyclic,
    }
    checks["under 1 s"] = time.perf_counter() - t0 < 1.0
    report("edge-twist digraphs", checks, t0)


def test_decide_elliptic_hyperbolic_free():
    t0 = time.perf_counter()
    v = dichotomy.decide(load("elliptic_hyperbolic_sigma.aut"), load("elliptic_hyperbolic_tau.aut"))
    cert = v.certificate
    ev = cert.get("evidence", {})
    checks = {
        "outcome Free": v.outcome == "Free",
        "witness found": cert.get("search", {}).get("found", False),
        "certificate revalidates": dichotomy.revalidate(v.to_dict()) == [],
        "evidence at N=3, bound 4": ev.get("power") == 3 and ev.get("syllable_bound") == 4,
        "all 80 words non-inner": ev.get("passed") and ev.get("checked") == 80,
    }
    checks["under 5 min"] = time.perf_counter() - t0 < 300
    report("decide on the elliptic-hyperbolic pair", checks, t0)


def test_decide_disjoint_abelian():
    t0 = time.perf_counter()
    v = dichotomy.decide(load("disjoint_sigma.aut"), load("disjoint_tau.aut"), refinement_radius=6)
    cert = v.certificate
    ref = cert.get("refinement", {})
    checks = {
        "outcome Abelian": v.outcome == "Abelian",
        "refinement built": bool(ref) and ref["collapse_to_A"] != ref["collapse_to_B"],
        "radius-6 agreement": cert.get("refinement_radius") == 6 and ref.get("checked_words", 0) > 0,
        "commutator inner": cert.get("commutator_conjugator") is not None,
        "certificate revalidates": dichotomy.revalidate(v.to_dict()) == [],
    }
    checks["under 1 min"] = time.perf_counter() - t0 < 60
    report("decide on the disjoint-support pair", checks, t0)


def _gl_brute(n):
    import itertools

    def det(m):
        if len(m) == 1:
            return m[0][0]
        return sum((-1) ** j * m[0][j] * det([r[:j] + r[j + 1:] for r in m[1:]]) for j in range(len(m)))

    return sum(
        1
        for e in itertools.product(range(3), repeat=n * n)
        if det([list(e[i * n:(i + 1) * n]) for i in range(n)]) % 3
    )


def test_constants():
    t0 = time.perf_counter()
    c2, c3 = dichotomy.constants(2), dichotomy.constants(3)
    checks = {
        "uniform_power(2)=99": c2["uniform_power"] == 99,
        "uniform_power(3)=291": c3["uniform_power"] == 291,
        "gl3_order(2)=48 by count": c2["gl3_order"] == 48 == _gl_brute(2),
        "theorem_power(2)=4752": c2["theorem_power"] == 4752,
        "3 | uniform_power(r), r<=10": all(dichotomy.uniform_power(r) % 3 == 0 for r in range(1, 11)),
    }
    report("constants", checks, t0)


def test_property_suite():
    t0 = time.perf_counter()
    rng = random.Random(2024)
    trees = [load(f"twist_{x}.gog").gog for x in "ABC"]
    worked = folding.efficient_rep(rose_utrep(load("folding_example.aut"))).gog
    rose = FilteredGraph.rose(["a", "b", "c"], 3, None)
    bad = {}

    def fail(key):
        bad[key] = bad.get(key, 0) + 1

    for _ in range(1000):
        g = rng.choice(trees)
        w, u = random_word(rng, 3, 12), random_word(rng, 3, 6)
        lw = translation_length(g, w)
        if translation_length(g, w.conjugate(u)) != lw:
            fail("conjugacy invariance")
        n = rng.randint(1, 4)
        if translation_length(g, w ** n) != n * lw:
            fail("homogeneity")
        x = random_word(rng, 4, 14)
        gw = worked.to_groupoid(x, reduce=False)
        left, right = normalize(gw, order="left"), normalize(gw, order="right")
        if left.edges != right.edges or from_groupoid(left) != x:
            fail("normal form uniqueness")
        letters = [rng.choice([1, -1, 2, -2, 3, -3]) for _ in range(rng.randint(1, 16))]
        p = tighten(EdgePath(rose, letters))
        if tighten(p) != p or Word(3, w.letters) != w:
            fail("tighten/reduce idempotence")
        phi = random_automorphism(rng, rng.randint(1, 4))
        if not compose(phi, invert(phi)).is_identity() or invert(invert(phi)) != phi:
            fail("invert round trip")
    for rep in random_rep_seq(7, 20):
        d = folding.efficient_rep(rep)
        if is_inner(compose(d.induced_automorphism(), invert(rep.induced_automorphism()))) is None:
            fail("efficient_rep outer class")
    for g in trees + [worked]:
        if bcc_empirical(g, samples=2000, max_length=10, seed=3) > bcc_bound(g.rank):
            fail("bounded cancellation")
    checks = {
        k: k not in bad
        for k in (
            "conjugacy invariance",
            "homogeneity",
            "normal form uniqueness",
            "tighten/reduce idempotence",
            "invert round trip",
            "efficient_rep outer class",
            "bounded cancellation",
        )
    }
    checks["under 10 min"] = time.perf_counter() - t0 < 600
    report("randomized property suite (1000 cases, seed 2024)", checks, t0)


def test_growth_bound():
    t0 = time.perf_counter()
    s, t = load("elliptic_hyperbolic_sigma.aut"), load("elliptic_hyperbolic_tau.aut")
    et = interaction.edge_twist_digraph(load("twist_A.gog"), load("twist_B.gog"))
    bound = interaction.analyze(et).growth_degree_bound
    rows = interaction.growth_degree_estimate(s, t, Word.parse("a", 3), n_max=16, samples=50, seed=0)
    worst = max(r["degree"] for r in rows)
    checks = {
        "bound is longest path + 1 = 2": bound == 2,
        "50 samples": len(rows) == 50,
        f"max fitted degree {worst:.3f} <= 2.25": worst <= bound + 0.25,
    }
    checks["under 2 min"] = time.perf_counter() - t0 < 120
    report("growth degree bound on the elliptic-hyperbolic pair", checks, t0)
