"""Filtered graphs, edge paths and upper-triangular homotopy equivalences.

Edges are indexed by height: the i-th edge of the filtration (lowest first)
is the oriented letter ``i`` in its preferred orientation and ``-i`` reversed,
so edge paths reuse the signed-letter machinery of :mod:`words`.

A marking labels each preferred-orientation edge with an ambient word; the
label of a closed path at the base vertex is the element of F_r it
represents.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field

import numpy as np

from .errors import GrowthError, InputError
from .words import FreeAutomorphism, Word, free_reduce, invert, invert_letters, least_period


class FilteredGraph:
    """A connected graph whose edges are totally ordered by height.

    ``edges`` lists edge names lowest first; ``ends[name] = (o, t)`` in the
    preferred orientation; ``labels[name]`` is the ambient word of the edge.
    """

    def __init__(self, vertices, edges, ends, labels=None, base=None, rank=None):
        self.vertices = tuple(vertices)
        self.edges = tuple(edges)
        self.ends = {e: tuple(ends[e]) for e in self.edges}
        if len(set(self.vertices)) != len(self.vertices):
            raise InputError("duplicate vertex names")
        if len(set(self.edges)) != len(self.edges):
            raise InputError("duplicate edge names")
        for e, (o, t) in self.ends.items():
            if o not in self.vertices or t not in self.vertices:
                raise InputError(f"edge {e} has an unknown endpoint")
        self.base = self.vertices[0] if base is None else base
        if self.base not in self.vertices:
            raise InputError(f"unknown base vertex {self.base}")
        self.index = {e: i for i, e in enumerate(self.edges, start=1)}
        self.labels = None
        self.rank = rank
        if labels is not None:
            self.labels = {e: labels[e] for e in self.edges}
            ranks = {w.rank for w in self.labels.values()}
            if rank is None and ranks:
                self.rank = ranks.pop()
        if not self.is_connected():
            raise InputError("graph is not connected")

    # -- oriented letters ----------------------------------------------
    def name(self, x):
        return self.edges[abs(x) - 1]

    def origin(self, x):
        o, t = self.ends[self.edges[abs(x) - 1]]
        return o if x > 0 else t

    def terminus(self, x):
        o, t = self.ends[self.edges[abs(x) - 1]]
        return t if x > 0 else o

    def letter(self, name, sign=1):
        return sign * self.index[name]

    def is_connected(self):
        seen = {self.base}
        todo = [self.base]
        adj = self.adjacency()
        while todo:
            v = todo.pop()
            for x in adj[v]:
                w = self.terminus(x)
                if w not in seen:
                    seen.add(w)
                    todo.append(w)
        return len(seen) == len(self.vertices)

    def adjacency(self):
        """Oriented letters leaving each vertex, in lexicographic edge-name order."""
        adj = {v: [] for v in self.vertices}
        for e in sorted(self.edges):
            i = self.index[e]
            o, t = self.ends[e]
            adj[o].append(i)
            adj[t].append(-i)
        return adj

    def rank_pi1(self):
        return len(self.edges) - len(self.vertices) + 1

    # -- paths ------------------------------------------------------------
    def path(self, text, start=None):
        return EdgePath(self, parse_path(self, text), start)

    def path_str(self, letters):
        return format_path(self, letters)

    def is_composable(self, letters, start=None):
        v = start
        for x in letters:
            if v is not None and self.origin(x) != v:
                return False
            v = self.terminus(x)
        return True

    def height(self, letters):
        return max((abs(x) for x in letters), default=0)

    # -- marking ------------------------------------------------------------
    def label(self, letters):
        """Ambient word read along an edge path."""
        if self.labels is None:
            raise InputError("graph has no marking")
        acc = []
        for x in letters:
            w = self.labels[self.edges[abs(x) - 1]].letters
            acc.extend(w if x > 0 else invert_letters(w))
        return Word(self.rank, acc)

    def spanning_tree(self):
        """BFS tree from the base with lexicographic edge order: vertex -> path from base."""
        paths = {self.base: ()}
        tree = set()
        adj = self.adjacency()
        queue = deque([self.base])
        while queue:
            v = queue.popleft()
            for x in adj[v]:
                w = self.terminus(x)
                if w not in paths:
                    paths[w] = paths[v] + (x,)
                    tree.add(abs(x))
                    queue.append(w)
        return paths, tree

    def fundamental_loops(self):
        """Loop at the base for each non-tree edge, in filtration order."""
        paths, tree = self.spanning_tree()
        loops = []
        for i in range(1, len(self.edges) + 1):
            if i in tree:
                continue
            o, t = self.ends[self.edges[i - 1]]
            loops.append(free_reduce(paths[o] + (i,) + invert_letters(paths[t])))
        return loops

    def marking_inverse(self):
        """Loop at the base representing each ambient basis letter."""
        if self.labels is None:
            raise InputError("graph has no marking")
        loops = self.fundamental_loops()
        if len(loops) != self.rank:
            raise InputError(
                f"marking rank mismatch: graph has rank {len(loops)}, ambient {self.rank}"
            )
        inv = invert(FreeAutomorphism(self.rank, [self.label(lp) for lp in loops]))
        out = []
        for im in inv.images:
            acc = []
            for s in im.letters:
                lp = loops[abs(s) - 1]
                acc.extend(lp if s > 0 else invert_letters(lp))
            out.append(free_reduce(acc))
        return out

    def marking_ok(self):
        try:
            loops = self.marking_inverse()
        except (InputError, ValueError):
            return False
        return all(
            self.label(lp) == Word.generator(self.rank, i) for i, lp in enumerate(loops, start=1)
        )

    # -- derived graphs --------------------------------------------------
    def replace(self, vertices=None, edges=None, ends=None, labels=None, base=None):
        return FilteredGraph(
            self.vertices if vertices is None else vertices,
            self.edges if edges is None else edges,
            self.ends if ends is None else ends,
            self.labels if labels is None else labels,
            self.base if base is None else base,
            self.rank,
        )

    def __eq__(self, other):
        return (
            isinstance(other, FilteredGraph)
            and self.vertices == other.vertices
            and self.edges == other.edges
            and self.ends == other.ends
            and self.labels == other.labels
            and self.base == other.base
        )

    def __hash__(self):
        return hash((self.vertices, self.edges))

    def to_dict(self):
        d = {
            "vertices": list(self.vertices),
            "base": self.base,
            "edges": [
                {"name": e, "from": self.ends[e][0], "to": self.ends[e][1]} for e in self.edges
            ],
        }
        if self.labels is not None:
            d["rank"] = self.rank
            for item in d["edges"]:
                item["label"] = str(self.labels[item["name"]])
        return d

    @classmethod
    def from_dict(cls, d):
        rank = d.get("rank")
        labels = None
        if rank is not None:
            labels = {e["name"]: Word.parse(e["label"], rank) for e in d["edges"]}
        return cls(
            d["vertices"],
            [e["name"] for e in d["edges"]],
            {e["name"]: (e["from"], e["to"]) for e in d["edges"]},
            labels,
            d.get("base"),
            rank,
        )

    @classmethod
    def rose(cls, names, rank=None, labels=None):
        return cls(["v"], names, {e: ("v", "v") for e in names}, labels, "v", rank)


def parse_path(graph, text):
    out = []
    for tok in text.split():
        if tok == "1":
            continue
        if tok in graph.index:
            out.append(graph.index[tok])
        elif tok.startswith("-") and tok[1:] in graph.index:
            out.append(-graph.index[tok[1:]])
        elif tok.endswith("^-1") and tok[:-3] in graph.index:
            out.append(-graph.index[tok[:-3]])
        elif all(c.lower() in graph.index for c in tok):
            for c in tok:
                if c in graph.index:
                    out.append(graph.index[c])
                else:
                    out.append(-graph.index[c.lower()])
        else:
            raise InputError(f"unknown edge token {tok!r}")
    return tuple(out)


def format_path(graph, letters):
    if not letters:
        return "1"
    parts = []
    for x in letters:
        n = graph.name(x)
        if x > 0:
            parts.append(n)
        elif len(n) == 1 and n.islower() and n.upper() not in graph.index:
            parts.append(n.upper())
        else:
            parts.append("-" + n)
    return " ".join(parts)


class EdgePath:
    """A composable sequence of oriented edges with a start vertex."""

    __slots__ = ("graph", "letters", "start")

    def __init__(self, graph, letters, start=None):
        letters = tuple(letters)
        if start is None:
            if not letters:
                raise InputError("empty path needs a start vertex")
            start = graph.origin(letters[0])
        if not graph.is_composable(letters, start):
            raise InputError(f"path {format_path(graph, letters)} is not composable")
        self.graph = graph
        self.letters = letters
        self.start = start

    @property
    def end(self):
        return self.graph.terminus(self.letters[-1]) if self.letters else self.start

    def is_closed(self):
        return self.start == self.end

    def is_tight(self):
        return free_reduce(self.letters) == self.letters

    def inverse(self):
        return EdgePath(self.graph, invert_letters(self.letters), self.end)

    def __mul__(self, other):
        if self.end != other.start:
            raise InputError("paths are not composable")
        return EdgePath(self.graph, self.letters + other.letters, self.start)

    def __len__(self):
        return len(self.letters)

    def __eq__(self, other):
        return (
            isinstance(other, EdgePath)
            and self.letters == other.letters
            and self.start == other.start
        )

    def __hash__(self):
        return hash((self.letters, self.start))

    def __str__(self):
        return format_path(self.graph, self.letters)

    def __repr__(self):
        return f"EdgePath({str(self)!r})"


def tighten(p):
    return EdgePath(p.graph, free_reduce(p.letters), p.start)


def path_root(letters):
    """Split a tight closed path as ``g rho^k g^-1`` and return ``(g rho g^-1, k)``.

    ``rho`` is the least period of the cyclically reduced core.
    """
    i, j = 0, len(letters) - 1
    while i < j and letters[i] == -letters[j]:
        i += 1
        j -= 1
    pre, core = letters[:i], letters[i : j + 1]
    d = least_period(core)
    return pre + core[:d] + invert_letters(pre), len(core) // d


def cyclic_key(letters):
    """Canonical cyclic representative of a cyclically reduced letter tuple."""
    n = len(letters)
    if not n:
        return ()
    rots = [letters[s:] + letters[:s] for s in range(n)]
    return min(rots, key=lambda t: [(abs(x), x < 0) for x in t])


def _core_letters(letters):
    i, j = 0, len(letters) - 1
    while i < j and letters[i] == -letters[j]:
        i += 1
        j -= 1
    return letters[:i], letters[i : j + 1]


class UTRep:
    """Upper-triangular homotopy equivalence: ``E_i -> E_i u_i``.

    ``suffixes`` is a sequence (lowest edge first) of letter tuples; entry
    ``i-1`` is the tight closed path ``u_i`` at ``t(E_i)`` in lower strata.
    """

    def __init__(self, graph, suffixes, name=None):
        if isinstance(suffixes, dict):
            suffixes = [suffixes.get(e, ()) for e in graph.edges]
        suffixes = tuple(tuple(s) for s in suffixes)
        if len(suffixes) != len(graph.edges):
            raise InputError("one suffix per edge is required")
        self.graph = graph
        self.suffixes = suffixes
        self.name = name
        self._images = None

    @classmethod
    def from_text_suffixes(cls, graph, table, name=None):
        return cls(graph, [parse_path(graph, table.get(e, "")) for e in graph.edges], name)

    def suffix(self, name):
        return EdgePath(self.graph, self.suffixes[self.graph.index[name] - 1], self.graph.ends[name][1])

    def edge_image(self, x):
        u = self.suffixes[abs(x) - 1]
        if x > 0:
            return (x,) + u
        return invert_letters(u) + (x,)

    def apply_letters(self, letters, power=1):
        if power < 0:
            return ut_inverse(self).apply_letters(letters, -power)
        cur = free_reduce(letters)
        for _ in range(power):
            out = []
            for x in cur:
                for y in self.edge_image(x):
                    if out and out[-1] == -y:
                        out.pop()
                    else:
                        out.append(y)
            cur = tuple(out)
        return cur

    def is_trivial(self):
        return not any(self.suffixes)

    def __eq__(self, other):
        return isinstance(other, UTRep) and self.graph == other.graph and self.suffixes == other.suffixes

    def __hash__(self):
        return hash(self.suffixes)

    def induced_automorphism(self):
        """The automorphism of F_r induced via the marking (vertices are fixed)."""
        g = self.graph
        loops = g.marking_inverse()
        return FreeAutomorphism(
            g.rank, [g.label(self.apply_letters(lp)) for lp in loops], name=self.name, _trusted=True
        )

    def power(self, n):
        """UTRep of the n-th iterate on the same filtered graph."""
        if n < 0:
            return ut_inverse(self).power(-n)
        sufs = []
        for i in range(1, len(self.graph.edges) + 1):
            img = self.apply_letters((i,), n)
            sufs.append(img[1:])
        return UTRep(self.graph, sufs, self.name)

    def with_graph(self, graph, suffixes):
        return UTRep(graph, suffixes, self.name)

    def to_dict(self):
        return {
            "graph": self.graph.to_dict(),
            "suffixes": {
                e: format_path(self.graph, s) for e, s in zip(self.graph.edges, self.suffixes) if s
            },
        }

    @classmethod
    def from_dict(cls, d):
        g = FilteredGraph.from_dict(d["graph"])
        return cls.from_text_suffixes(g, d.get("suffixes", {}))

    def __str__(self):
        g = self.graph
        parts = [f"{e} -> {format_path(g, self.edge_image(i))}" for i, e in enumerate(g.edges, 1)]
        return "; ".join(parts)


@dataclass
class Violation:
    edge: str
    kind: str
    message: str


@dataclass
class UTReport:
    violations: list = field(default_factory=list)

    @property
    def valid(self):
        return not self.violations

    def kinds(self):
        return {v.kind for v in self.violations}


def validate_ut(rep):
    g = rep.graph
    report = UTReport()
    for i, (e, u) in enumerate(zip(g.edges, rep.suffixes), start=1):
        if any(abs(x) > len(g.edges) or x == 0 for x in u):
            report.violations.append(Violation(e, "unknown-edge", "suffix uses an unknown edge"))
            continue
        if g.height(u) >= i:
            report.violations.append(
                Violation(e, "height", f"suffix {format_path(g, u)} is not below edge {e}")
            )
        if free_reduce(u) != u:
            report.violations.append(Violation(e, "tight", "suffix is not tight"))
        t = g.ends[e][1]
        if not g.is_composable(u, t):
            report.violations.append(
                Violation(e, "basepoint", f"suffix does not start at t({e}) = {t} or is not composable")
            )
        elif u and g.terminus(u[-1]) != t:
            report.violations.append(Violation(e, "basepoint", f"suffix is not closed at t({e})"))
    return report


def apply_ut(rep, p, power=1):
    return EdgePath(rep.graph, rep.apply_letters(p.letters, power), p.start)


def ut_inverse(rep):
    """Inverse on the same filtered graph: ``E_i -> E_i v_i``, ``v_i = bar(inv(u_i))``."""
    cached = getattr(rep, "_inverse_rep", None)
    if cached is not None:
        return cached
    n = len(rep.graph.edges)
    inv_suffix = [()] * n

    def inv_image(x):
        v = inv_suffix[abs(x) - 1]
        return (x,) + v if x > 0 else invert_letters(v) + (x,)

    for i in range(1, n + 1):
        out = []
        for x in rep.suffixes[i - 1]:
            for y in inv_image(x):
                if out and out[-1] == -y:
                    out.pop()
                else:
                    out.append(y)
        inv_suffix[i - 1] = invert_letters(tuple(out))
    inv = UTRep(rep.graph, inv_suffix, rep.name)
    inv._inverse_rep = rep
    rep._inverse_rep = inv
    return inv


def is_nielsen(rep, p):
    q = free_reduce(p.letters)
    return bool(q) and rep.apply_letters(q) == q


def is_periodic_nielsen(rep, p, bound=6):
    """Least period m <= bound with [rep^m(p)] = [p], or None."""
    q = free_reduce(p.letters)
    if not q:
        return None
    cur = q
    for m in range(1, bound + 1):
        cur = rep.apply_letters(cur)
        if cur == q:
            return m
    return None


@dataclass
class LinearFamily:
    """Edges whose suffixes are powers of one primitive Nielsen loop.

    ``root`` is the cyclic primitive loop and ``members`` maps edge names to
    signed exponents relative to it.
    """

    root: tuple
    members: dict

    def root_str(self, graph):
        return format_path(graph, self.root)


def _family_key(letters):
    """Cyclic primitive root up to orientation, with the sign of the power."""
    _, core = _core_letters(letters)
    d = least_period(core)
    root = cyclic_key(core[:d])
    inv = cyclic_key(invert_letters(core[:d]))
    k = len(core) // d
    key = min(root, inv, key=lambda t: [(abs(x), x < 0) for x in t])
    return key, (k if key == root else -k)


def linear_families(rep):
    groups = {}
    for i, (e, u) in enumerate(zip(rep.graph.edges, rep.suffixes), start=1):
        if not u:
            continue
        if rep.apply_letters(u) != u:
            raise GrowthError(f"suffix of {e} is not Nielsen")
        key, k = _family_key(u)
        groups.setdefault(key, {})[e] = k
    return [LinearFamily(root, members) for root, members in groups.items()]


@dataclass
class Component:
    kind: str  # "edge" or "exceptional"
    letters: tuple
    growth: str = ""  # for exceptional paths: "nielsen" or "linear"


def _literal_root(u):
    """``(eta, k)`` with ``u = eta^k`` literally, or ``None`` for trivial u."""
    if not u:
        return None
    d = least_period(u)
    return u[:d], len(u) // d


def canonical_decomposition(rep, p):
    letters = free_reduce(p.letters)
    roots = [_literal_root(u) for u in rep.suffixes]
    out = []
    i = 0
    n = len(letters)
    while i < n:
        x = letters[i]
        match = None
        if x > 0 and roots[x - 1] is not None:
            gamma, pk = roots[x - 1]
            ginv = invert_letters(gamma)
            L = len(gamma)
            for piece in (gamma, ginv):
                j = i + 1
                m = 0
                while letters[j : j + L] == piece:
                    j += L
                    m += 1
                if j < n and letters[j] < 0:
                    y = -letters[j]
                    rj = roots[y - 1]
                    if rj is not None and rj[0] == gamma and (m > 0 or piece is gamma):
                        match = (j + 1, pk, rj[1])
                        break
        if match:
            j, pk, qk = match
            out.append(Component("exceptional", letters[i:j], "nielsen" if pk == qk else "linear"))
            i = j
        else:
            out.append(Component("edge", (x,)))
            i += 1
    return out


@dataclass
class GrowthReport:
    overall: str
    per_edge: dict
    degree_estimate: float | None = None


def fit_degree(lengths, tail=8):
    """Least-squares slope of log length against log n over the last ``tail`` points."""
    ns = np.arange(1, len(lengths) + 1)[-tail:]
    ls = np.asarray(lengths, dtype=float)[-tail:]
    ls = np.maximum(ls, 1.0)
    slope = np.polyfit(np.log(ns), np.log(ls), 1)[0]
    return float(slope)


def growth_class(rep, iterates=16):
    per_edge = {}
    degree = None
    for i, (e, u) in enumerate(zip(rep.graph.edges, rep.suffixes), start=1):
        if not u:
            per_edge[e] = "fixed"
        elif rep.apply_letters(u) == u:
            per_edge[e] = "linear"
        else:
            lengths = []
            cur = (i,)
            for _ in range(iterates):
                cur = rep.apply_letters(cur)
                lengths.append(len(cur))
            d = fit_degree(lengths)
            per_edge[e] = f"higher-poly({d:.2f})"
            degree = d if degree is None else max(degree, d)
    kinds = set(per_edge.values())
    if degree is not None:
        overall = "higher-poly"
    elif "linear" in kinds:
        overall = "linear"
    else:
        overall = "fixed"
    return GrowthReport(overall, per_edge, degree)


def rose_utrep(phi, order=None, orientation=None, name=None):
    """UT representative on the rose when the basis images are visibly triangular.

    Each image must be ``x u`` or ``v x`` with ``u``/``v`` in letters strictly
    below ``x``; the second form uses the reversed orientation of the petal.
    Returns ``None`` when no such filtration exists.
    """
    forms = _triangular_forms(phi)
    if forms is None:
        return None
    return _rose_from_forms(phi, [forms], order, orientation, name)


def _triangular_forms(phi):
    """Per letter: dict orientation -> suffix word letters, or None."""
    r = phi.rank
    forms = []
    for i in range(1, r + 1):
        im = phi.images[i - 1].letters
        opts = {}
        if im and im[0] == i:
            opts[1] = im[1:]
        if im and im[-1] == i:
            opts[-1] = invert_letters(im[:-1])
        if not opts:
            return None
        forms.append(opts)
    return forms


def _rose_from_forms(phi, form_list, order, orientation, name):
    r = phi.rank
    # choose orientation per letter compatible with every automorphism
    if orientation is None:
        orientation = {}
        for i in range(1, r + 1):
            common = [s for s in (1, -1) if all(s in f[i - 1] for f in form_list)]
            if not common:
                return None
            trivial = [s for s in common if all(not f[i - 1][s] for f in form_list)]
            orientation[i] = 1 if 1 in common else common[0]
            if trivial and 1 in common:
                orientation[i] = 1
    deps = {i: set() for i in range(1, r + 1)}
    for f in form_list:
        for i in range(1, r + 1):
            suf = f[i - 1].get(orientation[i])
            if suf is None:
                return None
            deps[i] |= {abs(x) for x in suf}
    if order is None:
        order = []
        placed = set()
        while len(order) < r:
            ready = sorted(i for i in deps if i not in placed and deps[i] <= placed)
            if not ready:
                return None
            # ties go to the latest letter, i.e. reverse alphabetical filtration
            order.append(ready[-1])
            placed.add(ready[-1])
    names = [Word.generator(r, i).__str__() for i in order]
    labels = {
        Word.generator(r, i).__str__(): Word(r, (orientation[i] * i,)) for i in order
    }
    graph = FilteredGraph.rose(names, r, labels)
    # translate ambient letters to oriented edge letters
    to_edge = {}
    for h, i in enumerate(order, start=1):
        to_edge[orientation[i] * i] = h
        to_edge[-orientation[i] * i] = -h
    reps = []
    for f in form_list:
        sufs = []
        for i in order:
            u = f[i - 1][orientation[i]]
            sufs.append(tuple(to_edge[x] for x in u))
        rep = UTRep(graph, sufs, name)
        if not validate_ut(rep).valid:
            return None
        reps.append(rep)
    return reps[0] if len(reps) == 1 else reps


def joint_rose_utreps(phis, names=None):
    """UT representatives of several automorphisms on one common filtered rose."""
    forms = [_triangular_forms(p) for p in phis]
    if any(f is None for f in forms):
        return None
    reps = _rose_from_forms(phis[0], forms, None, None, None)
    if reps is None:
        return None
    if len(phis) == 1:
        reps = [reps]
    if names:
        for rep, n in zip(reps, names):
            rep.name = n
    return reps


def linear_bound_holds(rep, p, n):
    total = sum(len(u) for u in rep.suffixes)
    q = rep.apply_letters(p.letters, n)
    return len(q) <= len(p) + n * total * max(len(p), 1)


__all__ = [
    "FilteredGraph",
    "EdgePath",
    "UTRep",
    "tighten",
    "validate_ut",
    "apply_ut",
    "ut_inverse",
    "is_nielsen",
    "is_periodic_nielsen",
    "linear_families",
    "canonical_decomposition",
    "growth_class",
    "rose_utrep",
    "joint_rose_utreps",
    "path_root",
]
