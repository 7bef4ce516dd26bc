"""Decide whether two linearly growing outer automorphisms have commuting powers
or powers generating a free group of rank two, and produce certificates that
can be checked again later from their serialized form alone.
"""

from __future__ import annotations

import random
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from math import lcm

from .errors import GrowthError, HypothesisError, InputError, UnsupportedInput, WrongCaseError
from .folding import (
    _oriented_root,
    build_common_refinement,
    efficient_rep,
    verify_refinement,
)
from .gog import (
    DehnTwist,
    GraphOfGroups,
    check_efficient,
    collapse,
    random_cyclically_reduced,
    translation_length,
)
from .graphs import UTRep, format_path, growth_class, joint_rose_utreps, rose_utrep
from .interaction import (
    IncompatibilityWitness,
    analyze,
    edge_twist_digraph,
    incompatibility_search,
)
from .words import (
    FreeAutomorphism,
    Word,
    compose,
    cyclic_ball,
    gl_order,
    inner_conjugator_check,
    invert,
    is_inner,
    unipotent_power,
)

OUTCOMES = ("Abelian", "Free", "Unknown")
EXIT_CODES = {"Abelian": 0, "Free": 1, "Unknown": 2}


# -- constants -------------------------------------------------------------


def uniform_power(r):
    return 48 * r * r - 48 * r + 3


def constants(r):
    if r < 1:
        raise InputError("rank must be at least 1")
    u = uniform_power(r)
    g = gl_order(r, 3)
    return {"rank": r, "uniform_power": u, "gl3_order": g, "theorem_power": u * g}


# -- ping-pong on conjugacy classes ------------------------------------------


@dataclass
class PartitionReport:
    n: int
    ok: bool
    sizes: dict
    seeds: dict
    failures: list = field(default_factory=list)
    reason: str | None = None

    def to_dict(self):
        return {
            "n": self.n,
            "ok": self.ok,
            "sizes": self.sizes,
            "seeds": self.seeds,
            "failures": self.failures[:20],
            "reason": self.reason,
        }


def _side(a, b, w):
    la, lb = translation_length(a, w), translation_length(b, w)
    if la < lb:
        return "sigma"
    if lb < la:
        return "tau"
    return None


def pingpong_partition_check(d_a, d_b, cycle, n, samples=200, radius=4, seed=0):
    """Sampled check that powers of the twists swap the two partition classes.

    ``cycle`` lists the A-edge and B-edge names on a cycle of the edge-twist
    digraph.  All other edges are collapsed; a class with smaller A-length
    lies in P_sigma, one with smaller B-length in P_tau.
    """
    a_names = [e for s, e in cycle if s == "A"]
    b_names = [e for s, e in cycle if s == "B"]
    if not a_names or not b_names:
        raise WrongCaseError("ping-pong partition needs a cycle through both sides of the digraph")
    a1 = collapse(d_a.gog, [e.name for e in d_a.gog.edges if e.name not in a_names])
    b1 = collapse(d_b.gog, [e.name for e in d_b.gog.edges if e.name not in b_names])
    seeds = {}
    for name in a_names:
        z = d_a.gog.edge(d_a.gog.letter(name)).iota_to
        seeds[f"A:{name}"] = {"word": str(z), "class": _side(a1, b1, z)}
    for name in b_names:
        z = d_b.gog.edge(d_b.gog.letter(name)).iota_to
        seeds[f"B:{name}"] = {"word": str(z), "class": _side(a1, b1, z)}
    if n == 0:
        return PartitionReport(0, False, {}, seeds, reason="the power must be nonzero")
    r = d_a.gog.rank
    rng = random.Random(seed)
    pool = list(cyclic_ball(r, radius))
    pool += [Word.parse(s["word"], r) for s in seeds.values()]
    pool += [random_cyclically_reduced(rng, r, rng.randint(radius + 1, 3 * radius)) for _ in range(samples)]
    sigma = d_a.induced_automorphism()
    tau = d_b.induced_automorphism()
    maps = {
        "tau": [("sigma^n", sigma ** n), ("sigma^-n", sigma ** (-n))],
        "sigma": [("tau^n", tau ** n), ("tau^-n", tau ** (-n))],
    }
    sizes = {"sigma": 0, "tau": 0, "neither": 0}
    failures = []
    for w in pool:
        side = _side(a1, b1, w)
        if side is None:
            sizes["neither"] += 1
            continue
        sizes[side] += 1
        target = "sigma" if side == "tau" else "tau"
        for label, phi in maps[side]:
            if _side(a1, b1, phi(w)) != target:
                failures.append({"word": str(w), "map": label, "from": side})
    seed_ok = all(s["class"] == ("sigma" if k.startswith("A") else "tau") for k, s in seeds.items())
    ok = not failures and seed_ok
    reason = None if seed_ok else "edge-group generators are not classified as expected"
    return PartitionReport(n, ok, sizes, seeds, failures, reason)


# -- freeness evidence -----------------------------------------------------

_SYMBOLS = ("X", "x", "Y", "y")
_INV = {"X": "x", "x": "X", "Y": "y", "y": "Y"}


def syllable_words(bound):
    """Reduced words in X, Y and their inverses, one per inverse pair."""
    out = []
    layer = [""]
    for _ in range(bound):
        layer = [w + s for w in layer for s in _SYMBOLS if not (w and w[-1] == _INV[s])]
        for w in layer:
            inv = "".join(_INV[s] for s in reversed(w))
            if w <= inv:
                out.append(w)
    return out


def _word_str(w):
    return " ".join({"X": "s^N", "x": "s^-N", "Y": "t^N", "y": "t^-N"}[c] for c in w)


def _evaluate_words(gens, words, budget):
    memo = {"": FreeAutomorphism.identity(gens["X"].rank)}
    checked = 0
    for k, w in enumerate(words):
        phi = memo.get(w[:-1])
        if phi is None:
            return checked, None, k
        phi = compose(phi, gens[w[-1]])
        if sum(len(im) for im in phi.images) > budget:
            return checked, None, k
        memo[w] = phi
        checked += 1
        c = is_inner(phi)
        if c is not None:
            return checked, (k, str(c)), None
    return checked, None, None


def _evidence_chunk(args):
    images, words, budget = args
    gens = {s: FreeAutomorphism(len(im), [Word.parse(x, len(im)) for x in im], _trusted=True) for s, im in images.items()}
    checked, rel, stop = _evaluate_words(gens, _closure(words), budget)
    return checked, rel, stop


def _closure(words):
    """``words`` plus every prefix, in an order where prefixes come first."""
    seen = set()
    out = []
    for w in words:
        for i in range(1, len(w) + 1):
            p = w[:i]
            if p not in seen:
                seen.add(p)
                out.append(p)
    out.sort(key=lambda p: (len(p), p))
    return out


@dataclass
class FreenessEvidence:
    power: int
    syllable_bound: int
    checked: int
    total: int
    relation: str | None
    complete: bool

    @property
    def passed(self):
        return self.complete and self.relation is None

    def to_dict(self):
        return {
            "kind": "evidence",
            "power": self.power,
            "syllable_bound": self.syllable_bound,
            "checked": self.checked,
            "total": self.total,
            "relation": self.relation,
            "complete": self.complete,
            "passed": self.passed,
        }


def freeness_evidence(sigma, tau, N, syllable_bound=4, budget=2_000_000, jobs=1):
    """Check that no short word in sigma^N, tau^N is inner.  Evidence only."""
    words = syllable_words(syllable_bound)
    gens = {"X": sigma ** N, "Y": tau ** N}
    gens["x"] = invert(gens["X"])
    gens["y"] = invert(gens["Y"])
    if jobs <= 1:
        order = _closure(words)
        keep = set(words)
        checked = 0
        memo = {"": FreeAutomorphism.identity(sigma.rank)}
        for w in order:
            phi = compose(memo[w[:-1]], gens[w[-1]])
            if sum(len(im) for im in phi.images) > budget:
                return FreenessEvidence(N, syllable_bound, checked, len(words), None, False)
            memo[w] = phi
            if w not in keep:
                continue
            checked += 1
            if is_inner(phi) is not None:
                return FreenessEvidence(N, syllable_bound, checked, len(words), _word_str(w), True)
        return FreenessEvidence(N, syllable_bound, checked, len(words), None, True)
    images = {s: [str(im) for im in g.images] for s, g in gens.items()}
    chunks = [words[i::jobs] for i in range(jobs)]
    with ProcessPoolExecutor(max_workers=jobs) as pool:
        results = list(pool.map(_evidence_chunk, [(images, c, budget) for c in chunks]))
    # every word is checked by some worker; a relation anywhere is a relation
    relation = None
    complete = True
    for chunk, (_, rel, stop) in zip(chunks, results):
        if stop is not None:
            complete = False
        if rel is not None:
            w = _closure(chunk)[rel[0]]
            if relation is None or (len(w), w) < (len(relation), relation):
                relation = w
    checked = len(words) if complete and relation is None else sum(r[0] for r in results)
    return FreenessEvidence(
        N, syllable_bound, checked, len(words), None if relation is None else _word_str(relation), complete
    )


def commutation_certificate(sigma, tau, N=1):
    """Conjugator witnessing that [sigma^N, tau^N] is inner, or None."""
    s, t = sigma ** N, tau ** N
    c = compose(compose(s, t), compose(invert(s), invert(t)))
    return is_inner(c)


# -- verdicts --------------------------------------------------------------


@dataclass
class Verdict:
    outcome: str
    power: int
    rank: int
    sigma: FreeAutomorphism
    tau: FreeAutomorphism
    certificate: dict
    notes: list = field(default_factory=list)

    @property
    def exit_code(self):
        return EXIT_CODES[self.outcome]

    def to_dict(self):
        return {
            "outcome": self.outcome,
            "power": self.power,
            "rank": self.rank,
            "sigma": [str(im) for im in self.sigma.images],
            "tau": [str(im) for im in self.tau.images],
            "certificate": self.certificate,
            "notes": list(self.notes),
        }


def _as_automorphism(x):
    if isinstance(x, FreeAutomorphism):
        return x, None, None
    if isinstance(x, UTRep):
        return x.induced_automorphism(), x, None
    if isinstance(x, DehnTwist):
        return x.induced_automorphism(), None, x
    raise InputError(f"cannot decide on {type(x).__name__}")


def _same_outer(phi, psi):
    return is_inner(compose(phi, invert(psi))) is not None


def _utreps(s, t, given_s, given_t):
    if given_s is not None and given_t is not None:
        return given_s, given_t, given_s.graph == given_t.graph
    joint = joint_rose_utreps([s, t])
    if joint is not None:
        return joint[0], joint[1], True
    rs = given_s if given_s is not None else rose_utrep(s)
    rt = given_t if given_t is not None else rose_utrep(t)
    return rs, rt, False


def _require_linear(rep, label):
    g = growth_class(rep)
    if g.overall == "higher-poly":
        raise GrowthError(f"{label} is not linearly growing (growth_class: {g.overall}, per edge {g.per_edge})")


def case_two(rep_s, rep_t):
    """An edge whose two suffixes are Nielsen for both and have distinct roots.

    Then omega -> suffix of omega on that edge maps the generated group onto a
    free group of rank two, so the group is itself free of rank two.
    """
    if rep_s.graph != rep_t.graph:
        return None
    g = rep_s.graph
    for e, us, ut in zip(g.edges, rep_s.suffixes, rep_t.suffixes):
        if not us or not ut:
            continue
        if rep_s.apply_letters(ut) != ut or rep_t.apply_letters(us) != us:
            continue
        if rep_s.apply_letters(us) != us or rep_t.apply_letters(ut) != ut:
            continue
        rs, rt = _oriented_root(us)[0], _oriented_root(ut)[0]
        if rs != rt:
            return {
                "kind": "suffix-homomorphism",
                "edge": e,
                "suffix_sigma": format_path(g, us),
                "suffix_tau": format_path(g, ut),
                "root_sigma": format_path(g, rs),
                "root_tau": format_path(g, rt),
            }
    return None


def decide(
    sigma,
    tau,
    radius=4,
    syllable_bound=4,
    evidence_power=3,
    refinement_radius=6,
    samples=200,
    seed=0,
    jobs=1,
):
    sigma, given_s, twist_s = _as_automorphism(sigma)
    tau, given_t, twist_t = _as_automorphism(tau)
    if sigma.rank != tau.rank:
        raise InputError("automorphisms have different ranks")
    r = sigma.rank
    notes = []
    ms, mt = unipotent_power(sigma), unipotent_power(tau)
    m = lcm(ms, mt)
    s, t = sigma ** ms, tau ** mt
    if given_s is not None and ms > 1:
        given_s = given_s.power(ms)
    if given_t is not None and mt > 1:
        given_t = given_t.power(mt)
    powers = {"sigma_mod3": ms, "tau_mod3": mt}

    def verdict(outcome, power, cert):
        cert = {"powers": powers, **cert}
        return Verdict(outcome, power, r, sigma, tau, cert, notes)

    if is_inner(s) is not None or is_inner(t) is not None:
        w = commutation_certificate(sigma, tau, m)
        return verdict("Abelian", m, {"kind": "inner-power", "commutator_conjugator": None if w is None else str(w)})

    # efficient twists for the unipotent powers
    rep_s = rep_t = None
    shared = False
    if twist_s is None or twist_t is None:
        rep_s, rep_t, shared = _utreps(s, t, given_s, given_t)
    d_s = twist_s.power(ms) if twist_s is not None else None
    d_t = twist_t.power(mt) if twist_t is not None else None
    for label, d, rep in (("sigma", d_s, rep_s), ("tau", d_t, rep_t)):
        if d is None and rep is None:
            raise UnsupportedInput(
                f"no upper-triangular representative of the {label} power is available; "
                "supply one as a UT representative or a Dehn twist"
            )
        if rep is not None:
            _require_linear(rep, label)
    if d_s is None:
        d_s = efficient_rep(rep_s)
    if d_t is None:
        d_t = efficient_rep(rep_t)
    for label, d in (("sigma", d_s), ("tau", d_t)):
        if not check_efficient(d).efficient:
            raise InputError(f"Dehn twist for {label} is not efficient")
    twists = {"A": d_s.to_dict(), "B": d_t.to_dict()}
    et = edge_twist_digraph(d_s, d_t)
    info = analyze(et)
    base = {"twists": twists, "edge_twist": et.to_dict(), "analysis": info.to_dict()}
    certified = 3 * m

    if not info.acyclic:
        n = uniform_power(r)
        cycle = sorted({v for arc in info.cycle for v in arc})
        part = pingpong_partition_check(d_s, d_t, cycle, n, samples=samples, seed=seed)
        empirical = _empirical(sigma, tau, syllable_bound, evidence_power, jobs)
        cert = {
            "kind": "cycle",
            **base,
            "partition": part.to_dict(),
            "certified_power": n * m,
            "evidence": empirical,
        }
        if not part.ok:
            notes.append("sampled ping-pong partition check failed; see partition report")
            return verdict("Unknown", n * m, cert)
        return verdict("Free", n * m, cert)

    search = incompatibility_search(d_s.gog, d_t.gog, radius=radius, jobs=jobs)
    exact = case_two(rep_s, rep_t) if shared else None
    if search.found or exact is not None:
        ev = freeness_evidence(sigma, tau, evidence_power, syllable_bound, jobs=jobs)
        cert = {
            "kind": "incompatible",
            **base,
            "search": search.to_dict(),
            "exact": exact,
            "certified_power": certified,
            "evidence": ev.to_dict(),
            "empirical": _empirical(sigma, tau, syllable_bound, evidence_power, jobs),
        }
        if not ev.passed:
            notes.append("freeness evidence did not pass at the requested power")
        return verdict("Free", certified if exact is None else 1, cert)

    if rep_s is None or rep_t is None or not shared:
        notes.append("no common upper-triangular representative; the refinement cannot be attempted")
        return verdict("Unknown", m, {"kind": "unknown", **base, "search": search.to_dict(), "radius": radius})
    try:
        ref = build_common_refinement(rep_s, rep_t, radius=refinement_radius, eff_a=d_s, eff_b=d_t)
    except HypothesisError as exc:
        notes.append(str(exc))
        return verdict(
            "Unknown",
            m,
            {"kind": "unknown", **base, "search": search.to_dict(), "radius": radius, "clause": exc.clause},
        )
    power = 1 if commutation_certificate(sigma, tau, 1) is not None else m
    w = commutation_certificate(sigma, tau, power)
    return verdict(
        "Abelian",
        power,
        {
            "kind": "refinement",
            **base,
            "search": search.to_dict(),
            "refinement": ref.to_dict(),
            "refinement_radius": refinement_radius,
            "commutator_conjugator": None if w is None else str(w),
        },
    )


def _empirical(sigma, tau, bound, upto, jobs):
    """Smallest power at which the evidence suite passes, if any up to ``upto``."""
    for n in range(1, upto + 1):
        ev = freeness_evidence(sigma, tau, n, bound, jobs=jobs)
        if ev.passed:
            return {"label": "empirical", "power": n, "checked": ev.checked}
    return {"label": "empirical", "power": None}


# -- revalidation ----------------------------------------------------------


def _parse_aut(images, r):
    return FreeAutomorphism(r, [Word.parse(x, r) for x in images])


def revalidate(doc):
    """Check a serialized verdict using module operations only.

    Returns a list of problems; empty means the certificate holds up.
    """
    problems = []
    r = doc["rank"]
    sigma, tau = _parse_aut(doc["sigma"], r), _parse_aut(doc["tau"], r)
    cert = doc["certificate"]
    outcome = doc["outcome"]
    powers = cert.get("powers", {})
    ms, mt = powers.get("sigma_mod3", 1), powers.get("tau_mod3", 1)
    if cert.get("kind") == "inner-power":
        w = cert.get("commutator_conjugator")
        m = doc["power"]
        s, t = sigma ** m, tau ** m
        c = compose(compose(s, t), compose(invert(s), invert(t)))
        if w is None or not inner_conjugator_check(c, Word.parse(w, r)):
            problems.append("commutator is not conjugation by the recorded word")
        return problems
    d_a = DehnTwist.from_dict(cert["twists"]["A"])
    d_b = DehnTwist.from_dict(cert["twists"]["B"])
    if not _same_outer(d_a.induced_automorphism(), sigma ** ms):
        problems.append("twist A does not realize the sigma power")
    if not _same_outer(d_b.induced_automorphism(), tau ** mt):
        problems.append("twist B does not realize the tau power")
    kind = cert.get("kind")
    if outcome == "Free" and kind == "incompatible":
        search = cert["search"]
        if search.get("found"):
            wit = IncompatibilityWitness.from_dict(search["witness"], r)
            if not wit.revalidate(d_a.gog, d_b.gog):
                problems.append("incompatibility witness does not revalidate")
        elif cert.get("exact") is None:
            problems.append("Free verdict without witness or exact certificate")
    elif outcome == "Free" and kind == "cycle":
        et = edge_twist_digraph(d_a, d_b)
        if analyze(et).acyclic:
            problems.append("edge-twist digraph has no cycle")
        seeds = cert["partition"]["seeds"]
        for key, s in seeds.items():
            want = "sigma" if key.startswith("A") else "tau"
            if s["class"] != want:
                problems.append(f"seed {key} misclassified")
    elif outcome == "Abelian" and kind == "refinement":
        ref = cert["refinement"]
        g = GraphOfGroups.from_dict(ref["gog"])
        targets = [(ref["collapse_to_A"], d_a), (ref["collapse_to_B"], d_b)]
        try:
            verify_refinement(g, targets, cert.get("refinement_radius", 6))
        except HypothesisError as exc:
            problems.append(str(exc))
        w = cert.get("commutator_conjugator")
        n = doc["power"]
        s, t = sigma ** n, tau ** n
        c = compose(compose(s, t), compose(invert(s), invert(t)))
        if w is None or not inner_conjugator_check(c, Word.parse(w, r)):
            problems.append("commutator is not conjugation by the recorded word")
    elif outcome != "Unknown":
        problems.append(f"unrecognized certificate kind {kind!r} for {outcome}")
    return problems


__all__ = [
    "constants",
    "uniform_power",
    "pingpong_partition_check",
    "freeness_evidence",
    "syllable_words",
    "commutation_certificate",
    "case_two",
    "decide",
    "Verdict",
    "revalidate",
]
