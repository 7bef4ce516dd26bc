"""Graphs of groups with free vertex groups and cyclic edge groups.

Model.  Every vertex group is given as a subgroup of the ambient free group
F_r by a basis of ambient words, and every oriented edge ``e`` carries a
stable letter ``t_e`` (an ambient word, ``t_ebar = t_e^-1``).  A fundamental
groupoid arrow ``g0 e1 g1 ... en gn`` is sent to the ambient word
``g0 t_e1 g1 ... t_en gn``; on loops at the base vertex this is the marking
of pi_1 by F_r.  Tree edges usually have trivial stable letters but nothing
requires it.

The edge group of ``e`` is cyclic, generated by ``z``; ``iota(e)`` is the
image of ``z`` in the vertex group at ``t(e)``, so that
``t_e^-1 iota(ebar) t_e = iota(e)``, which is the groupoid relation
``ebar iota_ebar(g) e = iota_e(g)``.

Twists act on the left of words.  The twist by ``z^k`` on ``e`` rewrites each
crossing of ``e`` as ``e iota(e)^k`` and each crossing of ``ebar`` as
``ebar iota(ebar)^-k``: the twister is inserted after the edge in the
direction of traversal.
"""

from __future__ import annotations

import random
from collections import deque
from dataclasses import dataclass, field
from functools import cached_property

from .errors import InputError
from .stallings import SubgroupGraph
from .words import (
    FreeAutomorphism,
    CyclicWord,
    Word,
    are_conjugate,
    cyclic_reduce,
    invert_letters,
    power_exponent,
    word_root,
)


@dataclass(frozen=True)
class Edge:
    """A topological edge: endpoints, stable letter, and the two inclusions."""

    name: str
    origin: str
    terminus: str
    stable: Word
    iota_from: Word
    iota_to: Word


class GraphOfGroups:
    def __init__(self, rank, vertices, edges, base=None):
        self.rank = rank
        self.vertices = {v: tuple(basis) for v, basis in dict(vertices).items()}
        self.edges = tuple(edges)
        self.vertex_names = tuple(self.vertices)
        if not self.vertex_names:
            raise InputError("graph of groups needs a vertex")
        self.base = self.vertex_names[0] if base is None else base
        if self.base not in self.vertices:
            raise InputError(f"unknown base vertex {self.base}")
        self.index = {}
        for i, e in enumerate(self.edges, start=1):
            if e.name in self.index:
                raise InputError(f"duplicate edge name {e.name}")
            if e.origin not in self.vertices or e.terminus not in self.vertices:
                raise InputError(f"edge {e.name} has an unknown endpoint")
            for w in (e.stable, e.iota_from, e.iota_to):
                if w.rank != rank:
                    raise InputError(f"edge {e.name}: rank mismatch")
            self.index[e.name] = i
        for v, basis in self.vertices.items():
            for w in basis:
                if w.rank != rank:
                    raise InputError(f"vertex {v}: rank mismatch")
        self._lengths = {}

    # -- oriented edges ----------------------------------------------------
    def edge(self, x):
        return self.edges[abs(x) - 1]

    def name(self, x):
        return self.edges[abs(x) - 1].name

    def letter(self, name):
        return self.index[name]

    def origin(self, x):
        e = self.edges[abs(x) - 1]
        return e.origin if x > 0 else e.terminus

    def terminus(self, x):
        e = self.edges[abs(x) - 1]
        return e.terminus if x > 0 else e.origin

    def stable(self, x):
        e = self.edges[abs(x) - 1]
        return e.stable if x > 0 else e.stable.inverse()

    def iota(self, x):
        """Image of the edge-group generator in the vertex group at ``t(x)``."""
        e = self.edges[abs(x) - 1]
        return e.iota_to if x > 0 else e.iota_from

    def edge_group_trivial(self, x):
        return not self.edges[abs(x) - 1].iota_to

    @cached_property
    def _edge_roots(self):
        roots = {}
        for i in range(1, len(self.edges) + 1):
            for x in (i, -i):
                z = self.iota(x)
                roots[x] = word_root(z) if z else None
        return roots

    def edge_power(self, x, g):
        """``k`` with ``g = iota(x)^k``, or None if g is outside the edge group image."""
        rt = self._edge_roots[x]
        if rt is None:
            return 0 if not g else None
        rho, m = rt
        j = power_exponent(g, rho)
        if j is None or j % m:
            return None
        return j // m

    def adjacency(self):
        adj = {v: [] for v in self.vertices}
        for e in sorted(self.edges, key=lambda e: e.name):
            i = self.index[e.name]
            adj[e.origin].append(i)
            adj[e.terminus].append(-i)
        return adj

    def valence(self, v):
        return sum((e.origin == v) + (e.terminus == v) for e in self.edges)

    def is_connected(self):
        return len(self._bfs(self.base, None)[0]) == len(self.vertices)

    def _bfs(self, root, allowed):
        """Tree paths from ``root`` using edges in ``allowed`` (None = all)."""
        paths = {root: ()}
        tree = set()
        adj = self.adjacency()
        queue = deque([root])
        while queue:
            v = queue.popleft()
            for x in adj[v]:
                if allowed is not None and abs(x) not in allowed:
                    continue
                w = self.terminus(x)
                if w not in paths:
                    paths[w] = paths[v] + (x,)
                    tree.add(abs(x))
                    queue.append(w)
        return paths, tree

    def arrow_value(self, edges, elements=None):
        """Ambient value of an arrow given by its edges and vertex elements."""
        acc = Word.identity(self.rank) if elements is None else elements[0]
        for i, x in enumerate(edges):
            acc = acc * self.stable(x)
            if elements is not None:
                acc = acc * elements[i + 1]
        return acc

    # -- vertex groups -----------------------------------------------------
    @cached_property
    def _vertex_graphs(self):
        return {v: SubgroupGraph(self.rank, basis) for v, basis in self.vertices.items()}

    def vertex_graph(self, v):
        return self._vertex_graphs[v]

    def in_vertex_group(self, v, w):
        return self._vertex_graphs[v].contains(w)

    # -- marking -------------------------------------------------------------
    @cached_property
    def _marking(self):
        paths, tree = self._bfs(self.base, None)
        values = {v: self.arrow_value(p) for v, p in paths.items()}
        gens = []
        arrows = []
        for v in self.vertex_names:
            if v not in paths:
                continue
            for b in self.vertices[v]:
                gens.append(b.conjugate(values[v]))
                arrows.append((paths[v], b, invert_letters(paths[v])))
        for i, e in enumerate(self.edges, start=1):
            if i in tree or e.origin not in paths or e.terminus not in paths:
                continue
            gens.append(values[e.origin] * e.stable * values[e.terminus].inverse())
            arrows.append((paths[e.origin] + (i,) + invert_letters(paths[e.terminus]), None, ()))
        return SubgroupGraph(self.rank, gens), arrows

    def to_groupoid(self, w, reduce=True):
        """Loop at the base vertex representing the ambient word ``w``."""
        graph, arrows = self._marking
        symbols = graph.express(w)
        if symbols is None:
            raise InputError(f"{w} is not in the image of the marking")
        edges = []
        elems = [Word.identity(self.rank)]
        for s in symbols:
            first, middle, last = arrows[abs(s) - 1]
            if middle is None:
                seq = first if s > 0 else invert_letters(first)
                for x in seq:
                    edges.append(x)
                    elems.append(Word.identity(self.rank))
                continue
            if s < 0:
                middle = middle.inverse()
            for x in first:
                edges.append(x)
                elems.append(Word.identity(self.rank))
            elems[-1] = elems[-1] * middle
            for x in last:
                edges.append(x)
                elems.append(Word.identity(self.rank))
        gw = GroupoidWord(self, self.base, tuple(edges), tuple(elems))
        return normalize(gw) if reduce else gw

    def marking_ok(self):
        graph, _ = self._marking
        if not graph.is_whole_group():
            return False
        for i in range(1, self.rank + 1):
            x = Word.generator(self.rank, i)
            if from_groupoid(self.to_groupoid(x)) != x:
                return False
        return True

    def euler_characteristic(self):
        chi = sum(1 - len(b) for b in self.vertices.values())
        chi -= sum(1 for e in self.edges if not e.iota_to)
        return chi

    # -- serialization -----------------------------------------------------
    def to_dict(self):
        return {
            "rank": self.rank,
            "base": self.base,
            "vertices": {v: [str(b) for b in basis] for v, basis in self.vertices.items()},
            "edges": [
                {
                    "name": e.name,
                    "from": e.origin,
                    "to": e.terminus,
                    "generator": str(e.stable),
                    "iota_from": str(e.iota_from),
                    "iota_to": str(e.iota_to),
                }
                for e in self.edges
            ],
        }

    @classmethod
    def from_dict(cls, d):
        r = d["rank"]
        w = lambda s: Word.parse(s, r)  # noqa: E731
        vertices = {v: [w(b) for b in basis] for v, basis in d["vertices"].items()}
        edges = [
            Edge(e["name"], e["from"], e["to"], w(e["generator"]), w(e["iota_from"]), w(e["iota_to"]))
            for e in d["edges"]
        ]
        return cls(r, vertices, edges, d.get("base"))

    def __eq__(self, other):
        return isinstance(other, GraphOfGroups) and self.to_dict() == other.to_dict()

    def __hash__(self):
        return hash((self.rank, self.vertex_names, self.edges))

    def __repr__(self):
        return f"GraphOfGroups(rank={self.rank}, vertices={list(self.vertices)}, edges={[e.name for e in self.edges]})"


def make_edge(name, origin, terminus, stable, iota_from=None, iota_to=None):
    """Edge from one inclusion; the other follows from the stable letter."""
    if iota_from is None and iota_to is None:
        raise InputError(f"edge {name}: an inclusion is required")
    if iota_to is None:
        iota_to = iota_from.conjugate(stable.inverse())
    if iota_from is None:
        iota_from = iota_to.conjugate(stable)
    return Edge(name, origin, terminus, stable, iota_from, iota_to)


class GroupoidWord:
    """An arrow ``g0 e1 g1 ... en gn`` of the fundamental groupoid."""

    __slots__ = ("gog", "start", "edges", "elements")

    def __init__(self, gog, start, edges, elements):
        if len(elements) != len(edges) + 1:
            raise InputError("groupoid word needs one more vertex element than edges")
        self.gog = gog
        self.start = start
        self.edges = tuple(edges)
        self.elements = tuple(elements)

    @property
    def end(self):
        return self.gog.terminus(self.edges[-1]) if self.edges else self.start

    def vertices_along(self):
        vs = [self.start]
        for x in self.edges:
            vs.append(self.gog.terminus(x))
        return vs

    def check(self):
        """Composability and vertex-group membership of every element."""
        g = self.gog
        v = self.start
        for i, x in enumerate(self.edges):
            if not g.in_vertex_group(v, self.elements[i]):
                return False
            if g.origin(x) != v:
                return False
            v = g.terminus(x)
        return g.in_vertex_group(v, self.elements[-1])

    def is_reduced(self):
        g = self.gog
        for i in range(len(self.edges) - 1):
            x, y = self.edges[i], self.edges[i + 1]
            if y == -x and g.edge_power(x, self.elements[i + 1]) is not None:
                return False
        return True

    def __len__(self):
        return len(self.edges)

    def __eq__(self, other):
        return (
            isinstance(other, GroupoidWord)
            and self.start == other.start
            and self.edges == other.edges
            and self.elements == other.elements
        )

    def __hash__(self):
        return hash((self.start, self.edges, self.elements))

    def __str__(self):
        parts = []
        for i, x in enumerate(self.edges):
            if self.elements[i]:
                parts.append(f"({self.elements[i]})")
            parts.append(self.gog.name(x) + ("" if x > 0 else "~"))
        if self.elements[-1]:
            parts.append(f"({self.elements[-1]})")
        return " ".join(parts) if parts else "1"


def from_groupoid(gw):
    return gw.gog.arrow_value(gw.edges, gw.elements)


def normalize(gw, cyclic=False, order="left"):
    """Apply ``e iota_e(z^k) ebar -> iota_ebar(z^k)`` until reduced.

    ``order`` chooses leftmost-first (stack) or rightmost-first reduction; the
    cyclic mode then cancels across the wrap and returns the cyclically
    reduced form as a loop starting at the origin of its first edge.
    """
    g = gw.gog
    if order == "left":
        edges, elems = _reduce_left(g, gw.edges, gw.elements)
    elif order == "right":
        edges, elems = _reduce_right(g, gw.edges, gw.elements)
    else:
        raise InputError(f"unknown reduction order {order!r}")
    if not cyclic:
        return GroupoidWord(g, gw.start, edges, elems)
    return _cyclic(g, gw.start, edges, elems)


def _reduce_left(g, edges_in, elems_in):
    edges = []
    elems = [elems_in[0]]
    for x, h in zip(edges_in, elems_in[1:]):
        if edges and edges[-1] == -x:
            k = g.edge_power(edges[-1], elems[-1])
            if k is not None:
                y = edges.pop()
                elems.pop()
                elems[-1] = elems[-1] * g.iota(-y) ** k * h
                continue
        edges.append(x)
        elems.append(h)
    return tuple(edges), tuple(elems)


def _reduce_right(g, edges_in, elems_in):
    edges = list(edges_in)
    elems = list(elems_in)
    while True:
        pos = None
        for i in range(len(edges) - 2, -1, -1):
            if edges[i + 1] == -edges[i]:
                k = g.edge_power(edges[i], elems[i + 1])
                if k is not None:
                    pos = (i, k)
                    break
        if pos is None:
            return tuple(edges), tuple(elems)
        i, k = pos
        y = edges[i]
        merged = elems[i] * g.iota(-y) ** k * elems[i + 2]
        edges[i : i + 2] = []
        elems[i : i + 3] = [merged]


def _cyclic(g, start, edges, elems):
    n = len(edges)
    if n == 0:
        return GroupoidWord(g, start, (), elems)
    pairs = deque((edges[i], elems[i + 1]) for i in range(n))
    last_e, last_h = pairs[-1]
    pairs[-1] = (last_e, last_h * elems[0])
    while len(pairs) >= 2:
        xl, hl = pairs[-1]
        xf, hf = pairs[0]
        if xf != -xl:
            break
        k = g.edge_power(xl, hl)
        if k is None:
            break
        z = g.iota(-xl) ** k
        if len(pairs) == 2:
            v = g.origin(xf)
            return GroupoidWord(g, v, (), (hf * z,))
        pairs.pop()
        pairs.popleft()
        xp, hp = pairs[-1]
        pairs[-1] = (xp, hp * z * hf)
    cyc_edges = tuple(x for x, _ in pairs)
    cyc_elems = (Word.identity(g.rank),) + tuple(h for _, h in pairs)
    return GroupoidWord(g, g.origin(cyc_edges[0]), cyc_edges, cyc_elems)


def cyclic_normal_form(g, w):
    return normalize(g.to_groupoid(w, reduce=False), cyclic=True)


def translation_length(g, w):
    """Translation length of ``w`` on the Bass-Serre tree of ``g``."""
    c = CyclicWord.of(w)
    key = c.letters
    cached = g._lengths.get(key)
    if cached is None:
        cached = len(cyclic_normal_form(g, c.word()).edges)
        if len(g._lengths) < 200000:
            g._lengths[key] = cached
    return cached


def crossed_edges(g, w):
    """Topological edges used by the cyclically reduced normal form of ``w``."""
    return sorted({g.name(x) for x in cyclic_normal_form(g, w).edges})


def transverse(gw):
    """Normal form with a fixed transversal: edge-group parts pushed rightwards.

    Before each edge ``e`` the element is shortened by right-multiplying with
    powers of ``iota(ebar)`` while its length strictly decreases (ties toward
    nonnegative exponents); the removed power crosses ``e`` as ``iota(e)^k``.
    """
    g = gw.gog
    red = normalize(gw)
    elems = list(red.elements)
    for i, x in enumerate(red.edges):
        z = g.iota(-x)
        if not z:
            continue
        k = 0
        cur = elems[i]
        while True:
            best = None
            for step in (1, -1):
                cand = cur * z ** (-step)
                if len(cand) < len(cur) and best is None:
                    best = (cand, step)
            if best is None:
                break
            cur, step = best
            k += step
        elems[i] = cur
        elems[i + 1] = g.iota(x) ** k * elems[i + 1]
    return GroupoidWord(g, red.start, red.edges, tuple(elems))


# -- structural checks ------------------------------------------------------


@dataclass
class GogReport:
    connected: bool
    small: bool
    visible: bool
    minimal: bool
    marking_ok: bool
    inclusions_ok: bool = True
    euler_ok: bool = True
    problems: list = field(default_factory=list)

    @property
    def ok(self):
        return all(
            [
                self.connected,
                self.small,
                self.visible,
                self.minimal,
                self.marking_ok,
                self.inclusions_ok,
                self.euler_ok,
            ]
        )

    def to_dict(self):
        d = {k: getattr(self, k) for k in ("connected", "small", "visible", "minimal", "marking_ok", "inclusions_ok", "euler_ok")}
        d["ok"] = self.ok
        d["problems"] = list(self.problems)
        return d


def subgraph_subgroup(g, vertices, edge_ids):
    """Subgroup carried by a connected subgraph, up to conjugacy."""
    root = min(vertices, key=g.vertex_names.index)
    paths, tree = g._bfs(root, set(edge_ids))
    values = {v: g.arrow_value(p) for v, p in paths.items()}
    gens = []
    for v in paths:
        gens.extend(b.conjugate(values[v]) for b in g.vertices[v])
    for i in edge_ids:
        if i in tree:
            continue
        e = g.edges[i - 1]
        gens.append(values[e.origin] * e.stable * values[e.terminus].inverse())
    return SubgroupGraph(g.rank, gens)


def _components(g, edge_ids):
    parent = {v: v for v in g.vertices}

    def find(v):
        while parent[v] != v:
            parent[v] = parent[parent[v]]
            v = parent[v]
        return v

    for i in edge_ids:
        e = g.edges[i - 1]
        a, b = find(e.origin), find(e.terminus)
        if a != b:
            parent[b] = a
    comps = {}
    for v in g.vertex_names:
        comps.setdefault(find(v), []).append(v)
    return list(comps.values())


def is_minimal(g):
    """No proper connected subgraph carries all of pi_1.

    Surjectivity is monotone in the subgraph, so it suffices to test the
    components of the graph with one edge removed.
    """
    all_ids = set(range(1, len(g.edges) + 1))
    for i in sorted(all_ids):
        rest = all_ids - {i}
        for comp in _components(g, rest):
            cs = set(comp)
            ids = {j for j in rest if g.edges[j - 1].origin in cs}
            if subgraph_subgroup(g, comp, ids).is_whole_group():
                return False
    return True


def invisible_vertices(g):
    out = []
    for v in g.vertex_names:
        incoming = [x for i in range(1, len(g.edges) + 1) for x in (i, -i) if g.terminus(x) == v]
        if len(incoming) != 2:
            continue
        if any(abs(x) == abs(incoming[0]) for x in incoming[1:]):
            continue
        vg = g.vertex_graph(v)
        if not g.vertices[v]:
            # trivial vertex group: trivial inclusions are isomorphisms
            if all(not g.iota(x) for x in incoming):
                out.append(v)
            continue
        if all(g.iota(x) and vg.same_subgroup(SubgroupGraph(g.rank, [g.iota(x)])) for x in incoming):
            out.append(v)
    return out


def validate(g):
    problems = []
    connected = g.is_connected()
    if not connected:
        problems.append("graph is not connected")
    inclusions_ok = True
    for e in g.edges:
        if e.stable.inverse() * e.iota_from * e.stable != e.iota_to:
            inclusions_ok = False
            problems.append(f"edge {e.name}: inclusions are not related by the stable letter")
        if not g.in_vertex_group(e.origin, e.iota_from):
            inclusions_ok = False
            problems.append(f"edge {e.name}: iota_from not in G_{e.origin}")
        if not g.in_vertex_group(e.terminus, e.iota_to):
            inclusions_ok = False
            problems.append(f"edge {e.name}: iota_to not in G_{e.terminus}")
    for v, basis in g.vertices.items():
        if g.vertex_graph(v).subgroup_rank() != len(basis):
            problems.append(f"vertex {v}: stated basis is not free")
            inclusions_ok = False
    inv = invisible_vertices(g) if connected else []
    for v in inv:
        problems.append(f"vertex {v} is invisible")
    minimal = is_minimal(g) if connected else False
    if connected and not minimal:
        problems.append("graph of groups is not minimal")
    marking = connected and g.marking_ok()
    if not marking:
        problems.append("marking does not identify pi_1 with the ambient group")
    euler_ok = g.euler_characteristic() == 1 - g.rank
    if not euler_ok:
        problems.append("Euler characteristic differs from that of the ambient group")
    return GogReport(connected, True, not inv, minimal, marking, inclusions_ok, euler_ok, problems)


# -- collapse ---------------------------------------------------------------


def collapse(g, edge_names):
    """Collapse the given edges; vertex groups of each component merge.

    Values of loops at the base are unchanged, so the marking is preserved.
    """
    return collapse_tracked(g, edge_names)[0]


def collapse_tracked(g, edge_names):
    """Collapse and also return, for each old vertex, its new vertex and the
    conjugator ``alpha`` with new-frame value ``alpha * old * alpha^-1``."""
    ids = {g.index[n] for n in edge_names}
    comps = _components(g, ids)
    comp_of = {}
    alpha = {}
    vertices = {}
    for comp in comps:
        root = g.base if g.base in comp else comp[0]
        paths, tree = g._bfs(root, ids)
        vals = {v: g.arrow_value(p) for v, p in paths.items()}
        gens = []
        for v in comp:
            comp_of[v] = root
            alpha[v] = vals[v]
            gens.extend(b.conjugate(vals[v]) for b in g.vertices[v])
        for i in sorted(ids):
            e = g.edges[i - 1]
            if e.origin in paths and i not in tree:
                gens.append(vals[e.origin] * e.stable * vals[e.terminus].inverse())
        vertices[root] = free_basis(g.rank, gens)
    edges = []
    for i, e in enumerate(g.edges, start=1):
        if i in ids:
            continue
        ao, at = alpha[e.origin], alpha[e.terminus]
        edges.append(
            Edge(
                e.name,
                comp_of[e.origin],
                comp_of[e.terminus],
                ao * e.stable * at.inverse(),
                e.iota_from.conjugate(ao),
                e.iota_to.conjugate(at),
            )
        )
    order = [v for v in g.vertex_names if v in vertices]
    return GraphOfGroups(g.rank, {v: vertices[v] for v in order}, edges, g.base), comp_of, alpha


def free_basis(rank, gens):
    """A free basis of the subgroup generated by ``gens`` (read off the folded graph)."""
    sg = SubgroupGraph(rank, [w for w in gens if w])
    out = sg._out
    base = sg.base
    paths = {base: Word.identity(rank)}
    queue = deque([base])
    tree = set()
    while queue:
        v = queue.popleft()
        for x in sorted(out[v], key=lambda y: (abs(y), y < 0)):
            w, _ = out[v][x]
            if w not in paths:
                paths[w] = paths[v] * Word(rank, (x,))
                tree.add((v, x))
                tree.add((w, -x))
                queue.append(w)
    basis = []
    seen = set()
    for v in sorted(out):
        for x in sorted(out[v], key=lambda y: (abs(y), y < 0)):
            w, _ = out[v][x]
            if (v, x) in tree or (v, x) in seen:
                continue
            seen.add((v, x))
            seen.add((w, -x))
            elem = paths[v] * Word(rank, (x,)) * paths[w].inverse()
            basis.append(elem if x > 0 else elem.inverse())
    return sorted(basis, key=lambda b: (len(b), [(abs(y), y < 0) for y in b.letters]))


# -- Dehn twists ------------------------------------------------------------


class DehnTwist:
    """A Dehn twist on a graph of groups; ``twisters[name] = k`` means z_e = z^k."""

    def __init__(self, gog, twisters):
        self.gog = gog
        self.twisters = {e.name: int(twisters.get(e.name, 0)) for e in gog.edges}
        unknown = set(twisters) - set(self.twisters)
        if unknown:
            raise InputError(f"twisters on unknown edges: {sorted(unknown)}")
        self.efficient = False

    def exponent(self, x):
        k = self.twisters[self.gog.name(x)]
        return k if x > 0 else -k

    def twister(self, x):
        """The twister of the oriented edge ``x`` as an element of G_{t(x)}."""
        return self.gog.iota(x) ** self.exponent(x)

    def twister_word(self, name):
        return self.twister(self.gog.letter(name))

    def apply(self, w):
        gw = self.gog.to_groupoid(w, reduce=False)
        elems = list(gw.elements)
        for i, x in enumerate(gw.edges):
            elems[i + 1] = self.twister(x) * elems[i + 1]
        return from_groupoid(GroupoidWord(self.gog, gw.start, gw.edges, elems))

    def induced_automorphism(self, name=None):
        r = self.gog.rank
        return FreeAutomorphism(
            r, [self.apply(Word.generator(r, i)) for i in range(1, r + 1)], name=name, _trusted=True
        )

    def power(self, n):
        return DehnTwist(self.gog, {k: n * v for k, v in self.twisters.items()})

    def to_dict(self):
        d = self.gog.to_dict()
        for item in d["edges"]:
            item["twister"] = self.twisters[item["name"]]
        return d

    @classmethod
    def from_dict(cls, d):
        g = GraphOfGroups.from_dict(d)
        return cls(g, {e["name"]: e.get("twister", 0) for e in d["edges"]})

    def __eq__(self, other):
        return isinstance(other, DehnTwist) and self.to_dict() == other.to_dict()

    def __hash__(self):
        return hash((self.gog, tuple(sorted(self.twisters.items()))))


def apply_twist(d, w):
    return d.apply(w)


def induced_automorphism(d):
    return d.induced_automorphism()


@dataclass
class EfficiencyReport:
    structure: GogReport
    twists_every_edge: bool
    bonded_pairs: list

    @property
    def efficient(self):
        return self.structure.ok and self.twists_every_edge and not self.bonded_pairs

    def to_dict(self):
        return {
            "efficient": self.efficient,
            "structure": self.structure.to_dict(),
            "twists_every_edge": self.twists_every_edge,
            "positively_bonded": [list(p) for p in self.bonded_pairs],
        }


def _conjugate_in_vertex_group(g, v, rho1, m1, target):
    """Is ``rho1`` conjugate to ``target`` by an element of G_v?

    Conjugators in F_r form ``w0 <rho1>``; since ``rho1^m1`` lies in G_v only
    the residues ``w0 rho1^j``, ``0 <= j < m1``, need testing.
    """
    w0 = are_conjugate(rho1, target)
    if w0 is None:
        return False
    for j in range(abs(m1)):
        if g.in_vertex_group(v, w0 * rho1 ** j):
            return True
    return False


def positively_bonded_pairs(d):
    g = d.gog
    pairs = []
    oriented = [x for i in range(1, len(g.edges) + 1) for x in (i, -i)]
    for v in g.vertex_names:
        incoming = [x for x in oriented if g.terminus(x) == v]
        for a in range(len(incoming)):
            for b in range(a + 1, len(incoming)):
                x1, x2 = incoming[a], incoming[b]
                z1, z2 = g.iota(x1), g.iota(x2)
                if not z1 or not z2:
                    continue
                rho1, m1 = word_root(z1)
                rho2, m2 = word_root(z2)
                A1 = m1 * d.exponent(x1)
                A2 = m2 * d.exponent(x2)
                if A1 == 0 or A2 == 0:
                    continue
                c1 = cyclic_reduce(rho1)[0]
                if c1 == cyclic_reduce(rho2)[0]:
                    s, target = 1, rho2
                elif c1 == cyclic_reduce(rho2.inverse())[0]:
                    s, target = -1, rho2.inverse()
                else:
                    continue
                if s * A1 * A2 <= 0:
                    continue
                if _conjugate_in_vertex_group(g, v, rho1, m1, target):
                    pairs.append((_oname(g, x1), _oname(g, x2), v))
    return pairs


def _oname(g, x):
    return g.name(x) if x > 0 else g.name(x) + "~"


def check_efficient(d):
    structure = validate(d.gog)
    every = all(k != 0 for k in d.twisters.values())
    bonded = positively_bonded_pairs(d)
    report = EfficiencyReport(structure, every, bonded)
    d.efficient = report.efficient
    return report


# -- bounded cancellation ---------------------------------------------------


def bcc_bound(r):
    return 6 * r * (2 * r - 2)


def bcc_empirical(g, samples=2000, max_length=10, seed=0):
    """Largest observed ``l(g)+l(h)-l(gh)`` over sampled concatenations.

    Each sample is a random cyclically reduced word ``w`` of length at most
    ``max_length`` split as ``w = gh`` without cancellation.
    """
    rng = random.Random(seed)
    r = g.rank
    worst = 0
    for _ in range(samples):
        n = rng.randint(2, max_length)
        w = random_cyclically_reduced(rng, r, n)
        if len(w) < 2:
            continue
        k = rng.randint(1, len(w) - 1)
        a, b = w[:k], w[k:]
        defect = translation_length(g, a) + translation_length(g, b) - translation_length(g, w)
        worst = max(worst, defect)
    return worst


def random_reduced(rng, r, n):
    out = []
    while len(out) < n:
        x = rng.choice([1, -1]) * rng.randint(1, r)
        if out and out[-1] == -x:
            continue
        out.append(x)
    return Word(r, out)


def random_cyclically_reduced(rng, r, n):
    while True:
        w = random_reduced(rng, r, n)
        if w.is_cyclically_reduced() or r == 1:
            return w


def transport(g, phi):
    """The same splitting with its marking changed by ``phi``: l'(phi(w)) = l(w)."""
    vertices = {v: [phi(b) for b in basis] for v, basis in g.vertices.items()}
    edges = [
        Edge(e.name, e.origin, e.terminus, phi(e.stable), phi(e.iota_from), phi(e.iota_to))
        for e in g.edges
    ]
    return GraphOfGroups(g.rank, vertices, edges, g.base)
