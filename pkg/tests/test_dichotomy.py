import itertools
import json

import pytest

from mccarthy import dichotomy, folding, formats, sample
from mccarthy.errors import GrowthError, WrongCaseError
from mccarthy.gog import DehnTwist
from mccarthy.graphs import rose_utrep
from mccarthy.words import FreeAutomorphism, compose, invert, is_inner


def load(name):
    return formats.load(sample(name))


def pair(stem_a, stem_b):
    return load(stem_a + ".aut"), load(stem_b + ".aut")


def count_gl(n, p=3):
    count = 0
    for entries in itertools.product(range(p), repeat=n * n):
        m = [list(entries[i * n:(i + 1) * n]) for i in range(n)]
        if round(_det(m)) % p:
            count += 1
    return count


def _det(m):
    if len(m) == 1:
        return m[0][0]
    return sum((-1) ** j * m[0][j] * _det([row[:j] + row[j + 1:] for row in m[1:]]) for j in range(len(m)))


def test_constants_rank_two():
    c = dichotomy.constants(2)
    assert c["uniform_power"] == 99
    assert c["gl3_order"] == 48 == count_gl(2)
    assert c["theorem_power"] == 99 * 48


def test_constants_small_ranks():
    assert dichotomy.constants(3)["uniform_power"] == 291
    c = dichotomy.constants(1)
    assert c["uniform_power"] == 3 and c["gl3_order"] == 2 == count_gl(1)


def test_uniform_power_divisible_by_three():
    for r in range(1, 11):
        assert dichotomy.uniform_power(r) % 3 == 0
        assert dichotomy.uniform_power(r) == 48 * r * r - 48 * r + 3


def test_constants_reject_rank_zero():
    with pytest.raises(ValueError):
        dichotomy.constants(0)


@pytest.fixture(scope="module")
def hh_twists():
    s, t = pair("hyperbolic_sigma", "hyperbolic_tau")
    return folding.efficient_rep(rose_utrep(s)), folding.efficient_rep(rose_utrep(t))


def test_partition_holds_at_uniform_power(hh_twists):
    cycle = [("A", "a"), ("B", "b")]
    rep = dichotomy.pingpong_partition_check(*hh_twists, cycle, dichotomy.uniform_power(2), samples=100)
    assert rep.ok, rep.failures[:3]
    assert rep.sizes["sigma"] > 0 and rep.sizes["tau"] > 0
    # edge-group generators seed the two classes
    assert rep.seeds["A:a"]["class"] == "sigma"
    assert rep.seeds["B:b"]["class"] == "tau"


def test_partition_zero_power_is_vacuous_failure(hh_twists):
    rep = dichotomy.pingpong_partition_check(*hh_twists, [("A", "a"), ("B", "b")], 0)
    assert not rep.ok and rep.reason


def test_partition_needs_both_sides(hh_twists):
    with pytest.raises(WrongCaseError):
        dichotomy.pingpong_partition_check(*hh_twists, [("A", "a")], 3)


def test_syllable_word_count():
    # reduced words in two free generators up to inversion: (4*3^(k-1))/2 of length k
    assert len(dichotomy.syllable_words(4)) == 2 + 6 + 18 + 54


def test_evidence_elliptic_hyperbolic():
    s, t = pair("elliptic_hyperbolic_sigma", "elliptic_hyperbolic_tau")
    ev = dichotomy.freeness_evidence(s, t, 3, 4)
    assert ev.passed and ev.checked == 80


def test_evidence_elliptic_elliptic():
    s, t = pair("elliptic_elliptic_sigma", "elliptic_elliptic_rho")
    assert dichotomy.freeness_evidence(s, t, 1, 4).passed


def test_evidence_finds_relation_for_equal_maps():
    s = load("elliptic_hyperbolic_sigma.aut")
    ev = dichotomy.freeness_evidence(s, s, 1, 4)
    assert not ev.passed
    assert ev.relation == "s^N t^-N"


def test_evidence_budget_marks_incomplete():
    s, t = pair("hyperbolic_sigma", "hyperbolic_tau")
    ev = dichotomy.freeness_evidence(s, t, 3, 4, budget=50)
    assert not ev.complete and not ev.passed


def test_commutation_certificates():
    s, t = pair("disjoint_sigma", "disjoint_tau")
    w = dichotomy.commutation_certificate(s, t, 1)
    assert w is not None and len(w) == 0
    twist = load("twist_A.gog")
    d1, d2 = twist, DehnTwist(twist.gog, {"a": 3})
    assert dichotomy.commutation_certificate(d1.induced_automorphism(), d2.induced_automorphism()) is not None
    s, t = pair("elliptic_hyperbolic_sigma", "elliptic_hyperbolic_tau")
    assert dichotomy.commutation_certificate(s, t, 3) is None


def roundtrip(v):
    return json.loads(json.dumps(v.to_dict()))


def test_decide_elliptic_hyperbolic():
    v = dichotomy.decide(*pair("elliptic_hyperbolic_sigma", "elliptic_hyperbolic_tau"))
    assert v.outcome == "Free" and v.exit_code == 1
    w = v.certificate["search"]["witness"]
    assert (w["g"], w["h"]) == ("a", "baB")
    assert v.certificate["evidence"]["power"] == 3
    assert v.certificate["evidence"]["passed"]
    assert dichotomy.revalidate(roundtrip(v)) == []


def test_decide_elliptic_elliptic():
    v = dichotomy.decide(*pair("elliptic_elliptic_sigma", "elliptic_elliptic_rho"))
    assert v.outcome == "Free"
    assert v.certificate["analysis"]["acyclic"]
    assert v.certificate["search"]["found"]
    assert v.certificate["exact"]["kind"] == "suffix-homomorphism"
    assert dichotomy.revalidate(roundtrip(v)) == []


def test_decide_disjoint_pair():
    v = dichotomy.decide(*pair("disjoint_sigma", "disjoint_tau"))
    assert v.outcome == "Abelian" and v.exit_code == 0
    assert v.certificate["kind"] == "refinement"
    assert v.certificate["refinement_radius"] == 6
    assert v.certificate["commutator_conjugator"] is not None
    assert not v.certificate["search"]["found"]
    assert dichotomy.revalidate(roundtrip(v)) == []


def test_decide_hyperbolic_cycle():
    v = dichotomy.decide(*pair("hyperbolic_sigma", "hyperbolic_tau"), samples=60)
    assert v.outcome == "Free"
    assert v.certificate["kind"] == "cycle"
    assert v.power == dichotomy.uniform_power(2) * 3
    assert dichotomy.revalidate(roundtrip(v)) == []


def test_tampered_certificate_is_caught():
    v = dichotomy.decide(*pair("elliptic_hyperbolic_sigma", "elliptic_hyperbolic_tau"))
    doc = roundtrip(v)
    doc["certificate"]["search"]["witness"]["h"] = "b"
    assert dichotomy.revalidate(doc)


def test_verdicts_are_exclusive():
    # no pair gets both a witness and a refinement
    for a, b in (
        ("elliptic_hyperbolic_sigma", "elliptic_hyperbolic_tau"),
        ("elliptic_elliptic_sigma", "elliptic_elliptic_rho"),
        ("disjoint_sigma", "disjoint_tau"),
    ):
        c = dichotomy.decide(*pair(a, b)).certificate
        found = c.get("search", {}).get("found", False)
        assert not (found and "refinement" in c)


def test_decide_refuses_quadratic_growth():
    quad = FreeAutomorphism.parse_images(3, ["ab", "bc", "c"])
    lin = load("disjoint_sigma.aut")
    with pytest.raises(GrowthError):
        dichotomy.decide(quad, lin)


def test_inner_power_is_abelian():
    ident = FreeAutomorphism.parse_images(3, ["a", "b", "c"])
    v = dichotomy.decide(ident, load("disjoint_sigma.aut"))
    assert v.outcome == "Abelian"
    assert dichotomy.revalidate(roundtrip(v)) == []


def test_unipotent_powers_recorded():
    # a -> b, b -> a has order two mod 3; its square is the identity
    swap = FreeAutomorphism.parse_images(3, ["b", "a", "c"])
    v = dichotomy.decide(swap, load("disjoint_tau.aut"))
    assert v.certificate["powers"]["sigma_mod3"] == 2
    assert v.outcome == "Abelian"
    s = swap ** 2
    assert is_inner(compose(s, invert(FreeAutomorphism.identity(3)))) is not None
