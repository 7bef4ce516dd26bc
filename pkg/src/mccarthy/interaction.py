"""How two Dehn twists interact: edge-twist digraph, growth, and incompatibility.

The digraph has one vertex per topological edge of either graph of groups.
An A-edge points at every B-edge that the cyclic normal form of its
edge-group generator crosses in B, and symmetrically.
"""

from __future__ import annotations

import random
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field

import networkx as nx

from .errors import InputError
from .gog import DehnTwist, GraphOfGroups, check_efficient, crossed_edges, translation_length
from .graphs import fit_degree
from .words import CyclicWord, Word, cyclic_ball, cyclic_reduce, letter_key


# -- edge-twist digraph ----------------------------------------------------


@dataclass
class EdgeTwistDigraph:
    vertices: list
    arcs: list
    annotation: dict = field(default_factory=dict)

    def to_networkx(self):
        g = nx.DiGraph()
        g.add_nodes_from(self.vertices)
        g.add_edges_from(self.arcs)
        return g

    def to_dict(self):
        return {
            "vertices": [list(v) for v in self.vertices],
            "arcs": [[list(a), list(b)] for a, b in self.arcs],
            "annotation": {f"{s}:{e}": gen for (s, e), gen in self.annotation.items()},
        }

    def to_dot(self):
        lines = ["digraph ET {"]
        for side, name in self.vertices:
            lines.append(f'  "{side}:{name}" [label="({name}, {name}~)" shape={"box" if side == "A" else "ellipse"}];')
        for (s1, e1), (s2, e2) in self.arcs:
            lines.append(f'  "{s1}:{e1}" -> "{s2}:{e2}";')
        lines.append("}")
        return "\n".join(lines) + "\n"


def _require_efficient(d, side):
    if not d.efficient:
        report = check_efficient(d)
        if not report.efficient:
            raise InputError(f"twist on {side} is not efficient: " + "; ".join(report.structure.problems or ["bonded or untwisted edges"]))


def edge_twist_digraph(d_a, d_b):
    _require_efficient(d_a, "A")
    _require_efficient(d_b, "B")
    vertices = [("A", e.name) for e in d_a.gog.edges] + [("B", e.name) for e in d_b.gog.edges]
    arcs = []
    annotation = {}
    for side, here, there, other in (("A", d_a.gog, d_b.gog, "B"), ("B", d_b.gog, d_a.gog, "A")):
        for e in here.edges:
            annotation[(side, e.name)] = str(e.iota_to)
            for f in crossed_edges(there, e.iota_to):
                arcs.append(((side, e.name), (other, f)))
    return EdgeTwistDigraph(vertices, arcs, annotation)


@dataclass
class Analysis:
    acyclic: bool
    longest_path: int | None
    growth_degree_bound: int | None
    cycle: list | None = None

    def to_dict(self):
        return {
            "acyclic": self.acyclic,
            "longest_path": self.longest_path,
            "growth_degree_bound": self.growth_degree_bound,
            "cycle": None if self.cycle is None else [[list(a), list(b)] for a, b in self.cycle],
        }


def analyze(etg):
    g = etg.to_networkx()
    if nx.is_directed_acyclic_graph(g):
        n = nx.dag_longest_path_length(g)
        return Analysis(True, n, n + 1)
    cycle = nx.find_cycle(g)
    return Analysis(False, None, None, [(a, b) for a, b in cycle])


# -- hyperbolicity ---------------------------------------------------------


@dataclass
class HyperbolicityTable:
    lengths: dict
    one_edge: bool

    @property
    def hyperbolic_hyperbolic(self):
        if not self.one_edge:
            return None
        return all(v > 0 for v in self.lengths.values())

    def to_dict(self):
        return {
            "lengths": {f"{s}:{e}": v for (s, e), v in self.lengths.items()},
            "one_edge": self.one_edge,
            "hyperbolic_hyperbolic": self.hyperbolic_hyperbolic,
        }


def hyperbolic_hyperbolic(d_a, d_b):
    _require_efficient(d_a, "A")
    _require_efficient(d_b, "B")
    a, b = d_a.gog, d_b.gog
    lengths = {}
    for e in a.edges:
        lengths[("A", e.name)] = translation_length(b, e.iota_to)
    for f in b.edges:
        lengths[("B", f.name)] = translation_length(a, f.iota_to)
    return HyperbolicityTable(lengths, len(a.edges) == 1 and len(b.edges) == 1)


# -- incompatibility -------------------------------------------------------


def _four(g, u, v):
    return {
        "g": translation_length(g, u),
        "h": translation_length(g, v),
        "gh": translation_length(g, u * v),
        "gh^-1": translation_length(g, u * v.inverse()),
    }


def _branch(la, lb):
    """Which side of the criterion holds, or None."""
    if la["gh"] == la["gh^-1"] > la["g"] + la["h"] and lb["gh"] != lb["gh^-1"]:
        return "A"
    if lb["gh"] == lb["gh^-1"] > lb["g"] + lb["h"] and la["gh"] != la["gh^-1"]:
        return "B"
    return None


@dataclass
class IncompatibilityWitness:
    g: Word
    h: Word
    branch: str
    lengths: dict

    def revalidate(self, g_a, g_b):
        la, lb = _four(g_a, self.g, self.h), _four(g_b, self.g, self.h)
        return la == self.lengths["A"] and lb == self.lengths["B"] and _branch(la, lb) == self.branch

    def to_dict(self):
        return {"g": str(self.g), "h": str(self.h), "branch": self.branch, "lengths": self.lengths}

    @classmethod
    def from_dict(cls, d, rank):
        return cls(Word.parse(d["g"], rank), Word.parse(d["h"], rank), d["branch"], d["lengths"])


def check_pair(g_a, g_b, u, v):
    la, lb = _four(g_a, u, v), _four(g_b, u, v)
    branch = _branch(la, lb)
    if branch is None:
        return None
    return IncompatibilityWitness(u, v, branch, {"A": la, "B": lb})


@dataclass
class SearchResult:
    witness: IncompatibilityWitness | None
    radius: int
    checked: int
    index: int | None = None

    @property
    def found(self):
        return self.witness is not None

    def to_dict(self):
        d = {"found": self.found, "radius": self.radius, "checked": self.checked}
        if self.witness is not None:
            d["witness"] = self.witness.to_dict()
            d["index"] = self.index
        else:
            d["note"] = f"no witness among candidates up to radius {self.radius}; this is not a proof of compatibility"
        return d


def _seed_elements(g_a, g_b):
    r = g_a.rank
    out = [Word.generator(r, i) for i in range(1, r + 1)]
    for g in (g_a, g_b):
        out.extend(e.iota_to for e in g.edges)
        for basis in g.vertices.values():
            out.extend(basis)
    seen = set()
    uniq = []
    for w in out:
        if w and w.letters not in seen:
            seen.add(w.letters)
            uniq.append(w)
    return uniq


def _reduced_words(rank, length):
    letters = [x for i in range(1, rank + 1) for x in (i, -i)]
    words = [()]
    for _ in range(length):
        words = [w + (x,) for w in words for x in letters if not (w and w[-1] == -x)]
    return words


def candidate_pairs(g_a, g_b, radius):
    """Deterministic candidate order.

    Seed elements conjugated by powers of other seeds come first, then seed
    pairs where the second is conjugated by any word of length <= radius,
    then pairs of words each of length <= radius, shortest total first.
    """
    seeds = _seed_elements(g_a, g_b)
    for u in seeds:
        for z in seeds:
            if z == u:
                continue
            for n in (1, 2):
                for zz in (z ** n, z ** (-n)):
                    yield u, u.conjugate(zz)
    r = g_a.rank
    conjugators = [Word.identity(r)]
    for n in range(1, radius + 1):
        conjugators.extend(Word._raw(r, w) for w in _reduced_words(r, n))
    for z in conjugators:
        for u in seeds:
            for v in seeds:
                if z or u != v:
                    yield u, v.conjugate(z)
    # The criterion is unchanged by inverting either element, swapping them,
    # or conjugating both at once, so g runs over conjugacy classes up to
    # inversion and h over words up to inversion.
    key = lambda t: [letter_key(x) for x in t]  # noqa: E731
    classes = [
        w for w in cyclic_ball(r, radius) if key(w.letters) <= key(CyclicWord.of(w.inverse()).letters)
    ]
    hs = [w for w in conjugators[1:] if key(w.letters) <= key(w.inverse().letters)]
    pairs = [(u, v) for u in classes for v in hs]
    pairs.sort(key=lambda p: (len(p[0]) + len(p[1]), len(p[0])))
    yield from pairs


def _search_chunk(args):
    da, db, pairs, offset = args
    g_a, g_b = GraphOfGroups.from_dict(da), GraphOfGroups.from_dict(db)
    r = g_a.rank
    for k, (u, v) in enumerate(pairs):
        w = check_pair(g_a, g_b, Word._raw(r, u), Word._raw(r, v))
        if w is not None:
            return offset + k
    return None


def incompatibility_search(g_a, g_b, radius=4, jobs=1):
    """First witness of incompatible combinatorics in candidate order."""
    if isinstance(g_a, DehnTwist):
        g_a = g_a.gog
    if isinstance(g_b, DehnTwist):
        g_b = g_b.gog
    if g_a.rank != g_b.rank:
        raise InputError("graphs of groups have different ranks")
    if jobs <= 1:
        checked = 0
        for k, (u, v) in enumerate(candidate_pairs(g_a, g_b, radius)):
            checked += 1
            w = check_pair(g_a, g_b, u, v)
            if w is not None:
                return SearchResult(w, radius, checked, k)
        return SearchResult(None, radius, checked)
    pairs = [(u.letters, v.letters) for u, v in candidate_pairs(g_a, g_b, radius)]
    chunk = max(1000, -(-len(pairs) // (4 * jobs)))
    tasks = [
        (g_a.to_dict(), g_b.to_dict(), pairs[i : i + chunk], i) for i in range(0, len(pairs), chunk)
    ]
    best = None
    with ProcessPoolExecutor(max_workers=jobs) as pool:
        for idx in pool.map(_search_chunk, tasks):
            if idx is not None and (best is None or idx < best):
                best = idx
    if best is None:
        return SearchResult(None, radius, len(pairs))
    r = g_a.rank
    u, v = pairs[best]
    w = check_pair(g_a, g_b, Word._raw(r, u), Word._raw(r, v))
    return SearchResult(w, radius, best + 1, best)


# -- growth ----------------------------------------------------------------


def _cyclic_length(w):
    return len(cyclic_reduce(w)[0])


def _sample_element(rng, max_syllables):
    n = rng.randint(1, max_syllables)
    out = []
    while len(out) < n:
        s = rng.choice([("s", 1), ("s", -1), ("t", 1), ("t", -1)])
        if out and out[-1][0] == s[0] and out[-1][1] == -s[1]:
            continue
        out.append(s)
    return out


def _element_str(syl):
    return " ".join(f"{n}" if e == 1 else f"{n}^-1" for n, e in syl)


def growth_degree_estimate(sigma, tau, w, n_max=16, samples=50, seed=0, max_syllables=4):
    """Fitted growth degree of cyclic length of ``omega^n(w)`` for sampled omega."""
    rng = random.Random(seed)
    gens = {("s", 1): sigma, ("s", -1): sigma ** -1, ("t", 1): tau, ("t", -1): tau ** -1}
    results = []
    for _ in range(samples):
        syl = _sample_element(rng, max_syllables)
        omega = gens[syl[-1]]
        for s in reversed(syl[:-1]):
            omega = gens[s] * omega
        cur = w
        lengths = []
        for _ in range(n_max):
            cur = omega(cur)
            lengths.append(_cyclic_length(cur))
        if max(lengths) == min(lengths):
            degree = 0.0
        else:
            degree = fit_degree(lengths)
        results.append({"element": _element_str(syl), "degree": round(degree, 4), "lengths": lengths})
    return results


def cyclic_filling_slice(g_a, g_b, radius):
    """Cyclic words up to ``radius`` elliptic in both trees."""
    if isinstance(g_a, DehnTwist):
        g_a = g_a.gog
    if isinstance(g_b, DehnTwist):
        g_b = g_b.gog
    return [
        w
        for w in cyclic_ball(g_a.rank, radius)
        if translation_length(g_a, w) == 0 and translation_length(g_b, w) == 0
    ]
