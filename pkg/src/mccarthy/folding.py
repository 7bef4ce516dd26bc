"""From a linearly growing upper-triangular representative to an efficient twist.

Folds of a terminal half-edge over a path are realized as edge slides: the
edge ``E`` is replaced by ``E' = E P`` where ``P`` is a path in lower strata
starting at ``t(E)``.  Vertices stay fixed, so the marking and the induced
automorphism are unchanged on the nose.

The pipeline has three stages, each recorded as replayable moves:

1. slide edges whose suffix is a conjugate of a power of a lower primitive
   Nielsen loop, until the suffix is that power;
2. inside each linear family (split by exponent sign) slide each member
   over the next lower one, working down the filtration;
3. collapse fixed edges, pull each primitive Nielsen loop over its edge and
   remove invisible vertices, giving a Dehn twist on a graph of groups.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field

from .errors import GrowthError, HypothesisError, InputError, PipelineError
from .gog import (
    DehnTwist,
    Edge,
    GraphOfGroups,
    check_efficient,
    collapse_tracked,
    free_basis,
    invisible_vertices,
    translation_length,
)
from .graphs import (
    FilteredGraph,
    UTRep,
    _core_letters,
    cyclic_key,
    format_path,
    growth_class,
    parse_path,
    path_root,
    validate_ut,
)
from .words import Word, compose, cyclic_ball, free_reduce, invert, invert_letters, is_inner, least_period


# -- moves and traces -------------------------------------------------------


@dataclass
class Move:
    kind: str
    args: dict
    before: dict
    after: dict

    def to_dict(self):
        return {"move": self.kind, **self.args, "before": self.before, "after": self.after}

    @classmethod
    def from_dict(cls, d):
        d = dict(d)
        kind = d.pop("move")
        before = d.pop("before")
        after = d.pop("after")
        return cls(kind, d, before, after)


MOVE_KINDS = ("FoldConjugate", "Refilter", "FoldOverFamilyMember", "CollapseEdge", "PullOverEdge", "RemoveInvisibleVertex")


@dataclass
class FoldTrace:
    moves: list = field(default_factory=list)

    def __len__(self):
        return len(self.moves)

    def __iter__(self):
        return iter(self.moves)

    def extend(self, other):
        self.moves.extend(other.moves)

    def kinds(self):
        return [m.kind for m in self.moves]

    def to_json(self, indent=None):
        return json.dumps([m.to_dict() for m in self.moves], indent=indent)

    @classmethod
    def from_json(cls, text):
        return cls([Move.from_dict(d) for d in json.loads(text)])


def _snapshot(state):
    return state.to_dict()


# -- edge slides ------------------------------------------------------------


def _renamed(name, taken):
    new = name + "'"
    while new in taken:
        new += "'"
    return new


def slide_terminal(rep, i, path):
    """Replace edge ``E_i`` by ``E_i P``; ``P`` starts at ``t(E_i)`` below height i."""
    g = rep.graph
    path = tuple(path)
    name = g.edges[i - 1]
    o, t = g.ends[name]
    if not g.is_composable(path, t):
        raise InputError(f"slide path {format_path(g, path)} does not start at t({name})")
    if g.height(path) >= i:
        raise InputError(f"slide path {format_path(g, path)} is not below {name}")
    end = g.terminus(path[-1]) if path else t
    new_name = _renamed(name, set(g.edges))
    edges = list(g.edges)
    edges[i - 1] = new_name
    ends = {e: g.ends[e] for e in g.edges if e != name}
    ends[new_name] = (o, end)
    labels = None
    if g.labels is not None:
        labels = {e: g.labels[e] for e in g.edges if e != name}
        labels[new_name] = g.labels[name] * g.label(path)
    graph = FilteredGraph(g.vertices, edges, ends, labels, g.base, g.rank)

    back = invert_letters(path)
    sufs = list(rep.suffixes)
    sufs[i - 1] = free_reduce(back + rep.suffixes[i - 1] + rep.apply_letters(path))
    for k in range(i, len(sufs)):
        out = []
        for x in sufs[k]:
            if x == i:
                out.extend((i,) + back)
            elif x == -i:
                out.extend(path + (-i,))
            else:
                out.append(x)
        sufs[k] = free_reduce(out)
    new = UTRep(graph, sufs, rep.name)
    report = validate_ut(new)
    if not report.valid:
        raise PipelineError(f"slide of {name} broke upper triangularity: {report.violations[0].message}")
    return new


def slide_many(reps, i, path):
    return [slide_terminal(r, i, path) for r in reps]


def refilter(rep, order):
    """Same map on the same graph with the edges re-ordered by height."""
    g = rep.graph
    if sorted(order) != sorted(g.edges):
        raise InputError("a refiltration must list every edge once")
    perm = {g.index[e]: h for h, e in enumerate(order, start=1)}
    graph = FilteredGraph(g.vertices, order, g.ends, g.labels, g.base, g.rank)
    sufs = [tuple((1 if x > 0 else -1) * perm[abs(x)] for x in rep.suffixes[g.index[e] - 1]) for e in order]
    new = UTRep(graph, sufs, rep.name)
    report = validate_ut(new)
    if not report.valid:
        raise InputError(f"order {order} is not a filtration for this map: {report.violations[0].message}")
    return new


def _family_order(reps, table):
    """Filtration in which same-sign family members have increasing |k|.

    Members' suffixes only involve edges below every member, so this is a
    linear extension of the dependency order whenever Step 1 has run.
    """
    g = reps[0].graph
    n = len(g.edges)
    deps = {i: set() for i in range(1, n + 1)}
    for r in reps:
        for i, u in enumerate(r.suffixes, start=1):
            deps[i] |= {abs(x) for x in u}
    classes = {}
    for i, (eta, ks) in table.items():
        lead = next(k for k in ks if k)
        classes.setdefault((tuple(eta), lead > 0), []).append((i, abs(lead)))
    for members in classes.values():
        members.sort(key=lambda m: (m[1], m[0]))
        for (a, _), (b, _) in zip(members, members[1:]):
            deps[b].add(a)
    order = []
    placed = set()
    while len(order) < n:
        ready = [i for i in range(1, n + 1) if i not in placed and deps[i] - {i} <= placed]
        if not ready:
            return None
        order.append(ready[0])
        placed.add(ready[0])
    return [g.edges[i - 1] for i in order]


# -- roots ------------------------------------------------------------------


def _oriented_root(letters):
    """Primitive Nielsen loop of a suffix with a canonical orientation, and the exponent."""
    eta, k = path_root(letters)
    inv = invert_letters(eta)
    if _order(inv) < _order(eta):
        return inv, -k
    return eta, k


def _order(letters):
    return [(abs(x), x < 0) for x in letters]


def _power(eta, k):
    if k < 0:
        return free_reduce(invert_letters(eta) * (-k))
    return free_reduce(eta * k)


def _exponent_of(letters, eta):
    """``k`` with ``letters = [eta^k]``, or None."""
    if not letters:
        return 0
    eta2, k = _oriented_root(letters)
    if eta2 == eta:
        return k
    return None


def _conjugator_to(u, eta):
    """``(gamma, k)`` with ``u = [gamma eta^k gamma-bar]`` and gamma shortest, or None.

    ``u`` and ``eta`` are tight closed paths; ``eta`` is primitive.
    """
    p, c = _core_letters(u)
    q, e = _core_letters(eta)
    if not c or not e:
        return None
    d = least_period(c)
    kc = len(c) // d
    if cyclic_key(c[:d]) == cyclic_key(e):
        es, k = e, kc
    elif cyclic_key(c[:d]) == cyclic_key(invert_letters(e)):
        es, k = invert_letters(e), -kc
    else:
        return None
    if len(es) != d:
        return None
    target = es * kc
    shift = None
    for s in range(d):
        if target[s:] + target[:s] == c:
            shift = s
            break
    if shift is None:
        return None
    # c = A-bar e^k A with A = target[:shift], and A may absorb powers of e
    a0 = target[:shift]
    cands = []
    for t in (0, 1, -1, 2, -2):
        a = free_reduce(_power(es, t) + a0) if t else a0
        gamma = free_reduce(p + invert_letters(a) + invert_letters(q))
        cands.append((len(gamma), abs(t), t < 0, gamma))
    gamma = min(cands)[3]
    if free_reduce(gamma + _power(eta, k) + invert_letters(gamma)) != u:
        return None
    return gamma, k


# -- step 1 -----------------------------------------------------------------


def _require_linear(rep):
    report = validate_ut(rep)
    if not report.valid:
        raise InputError(f"not upper triangular: {report.violations[0].message}")
    gc = growth_class(rep, iterates=4)
    if gc.overall == "higher-poly":
        raise GrowthError("representative is not linearly growing: " + ", ".join(
            e for e, k in gc.per_edge.items() if k.startswith("higher")))
    return gc


def fold_conjugates(rep):
    """Step 1: make every linear suffix a literal power of a primitive loop."""
    _require_linear(rep)
    (out,), trace = _fold_conjugates_joint([rep])
    return out, trace


def _fold_conjugates_joint(reps, check=None):
    trace = FoldTrace()
    n = len(reps[0].graph.edges)
    for i in range(1, n + 1):
        lead = next((r for r in reps if r.suffixes[i - 1]), None)
        if lead is None:
            continue
        u = lead.suffixes[i - 1]
        found = None
        for j in range(1, i):
            roots = {_oriented_root(r.suffixes[j - 1])[0] for r in reps if r.suffixes[j - 1]}
            for eta in sorted(roots, key=_order):
                m = _conjugator_to(u, eta)
                if m is not None:
                    found = (j, eta, m[0])
                    break
            if found:
                break
        if found is None or not found[2]:
            continue
        j, eta, gamma = found
        before = [_snapshot(r) for r in reps]
        g0 = reps[0].graph
        name = g0.edges[i - 1]
        new = slide_many(reps, i, gamma)
        for r in new:
            if _exponent_of(r.suffixes[i - 1], eta) is None:
                if check is not None:
                    raise HypothesisError(check, f"suffix of {name} is not a power of a common loop after folding")
                raise PipelineError(
                    f"after folding {name}, suffix {format_path(r.graph, r.suffixes[i - 1])} "
                    f"is not a power of {format_path(r.graph, eta)}"
                )
        reps = new
        trace.moves.append(
            Move(
                "FoldConjugate",
                {"edge": name, "path": format_path(g0, gamma)},
                _pack(before),
                _pack([_snapshot(r) for r in reps]),
            )
        )
    return reps, trace


def _pack(snaps):
    return snaps[0] if len(snaps) == 1 else {"reps": snaps}


# -- step 2 -----------------------------------------------------------------


def fold_linear_families(rep):
    """Step 2: slide each linear-family member over the next lower one."""
    _require_linear(rep)
    (out,), trace = _fold_families_joint([rep])
    return out, trace


def _family_table(reps):
    """Per edge index: (eta, [k per rep]) for edges linear in some rep."""
    table = {}
    for i in range(1, len(reps[0].graph.edges) + 1):
        eta = None
        ks = []
        for r in reps:
            u = r.suffixes[i - 1]
            if not u:
                ks.append(0)
                continue
            e, k = _oriented_root(u)
            if eta is None:
                eta = e
            elif e != eta:
                return None, i
            ks.append(k)
        if eta is not None:
            table[i] = (eta, ks)
    return table, None


def _fold_families_joint(reps, check=None):
    table, bad = _family_table(reps)
    if table is None:
        raise HypothesisError(check or "3", f"edge {reps[0].graph.edges[bad - 1]} has different primitive loops")
    trace = FoldTrace()
    order = _family_order(reps, table)
    if order is not None and tuple(order) != reps[0].graph.edges:
        before = [_snapshot(r) for r in reps]
        reps = [refilter(r, order) for r in reps]
        trace.moves.append(Move("Refilter", {"order": list(order)}, _pack(before), _pack([_snapshot(r) for r in reps])))
        table, _ = _family_table(reps)
    n = len(reps[0].graph.edges)
    for i in range(n, 0, -1):
        if i not in table:
            continue
        eta, ki = table[i]
        lower = None
        for j in range(i - 1, 0, -1):
            if j in table and table[j][0] == eta and _bonded(ki, table[j][1]):
                lower = j
                break
        if lower is None:
            continue
        j = lower
        before = [_snapshot(r) for r in reps]
        name = reps[0].graph.edges[i - 1]
        target = reps[0].graph.edges[j - 1]
        reps = slide_many(reps, i, (-j,))
        for r, a, b in zip(reps, ki, table[j][1]):
            expect = free_reduce((j,) + _power(eta, a - b) + (-j,))
            if r.suffixes[i - 1] != expect:
                raise PipelineError(f"family fold of {name} over {target} gave an unexpected suffix")
        trace.moves.append(
            Move("FoldOverFamilyMember", {"edge": name, "target": target}, _pack(before), _pack([_snapshot(r) for r in reps]))
        )
    return reps, trace


def _bonded(ki, kj):
    """Fold when some rep has same-sign nonzero exponents on both edges and
    no rep would turn a fixed edge into a growing one."""
    need = any(a and b and (a > 0) == (b > 0) for a, b in zip(ki, kj))
    harm = any(a == 0 and b != 0 for a, b in zip(ki, kj))
    return need and not harm


# -- step 3 -----------------------------------------------------------------


def initial_twist(rep):
    """Graph of groups with trivial vertex and edge groups read off the marked graph."""
    g = rep.graph
    if g.labels is None:
        raise InputError("representative has no marking")
    r = g.rank
    one = Word.identity(r)
    edges = [Edge(e, g.ends[e][0], g.ends[e][1], g.labels[e], one, one) for e in g.edges]
    gog = GraphOfGroups(r, {v: [] for v in g.vertices}, edges, g.base)
    return DehnTwist(gog, {})


def collapse_edge(d, name):
    if d.twisters.get(name):
        raise PipelineError(f"cannot collapse twisted edge {name}")
    g, comp_of, alpha = collapse_tracked(d.gog, [name])
    return DehnTwist(g, {k: v for k, v in d.twisters.items() if k != name}), comp_of, alpha


def pull_over_edge(d, name, word, k):
    """Pull ``word`` (an element of G_t) over a free edge and twist by ``word^k``."""
    g = d.gog
    i = g.letter(name)
    e = g.edges[i - 1]
    if e.iota_to:
        raise PipelineError(f"edge {name} already carries an edge group")
    if not g.in_vertex_group(e.terminus, word):
        raise PipelineError(f"{word} is not in the vertex group at t({name})")
    iota_from = word.conjugate(e.stable)
    vertices = dict(g.vertices)
    vertices[e.origin] = free_basis(g.rank, list(vertices[e.origin]) + [iota_from])
    edges = list(g.edges)
    edges[i - 1] = Edge(name, e.origin, e.terminus, e.stable, iota_from, word)
    twisters = dict(d.twisters)
    twisters[name] = k
    return DehnTwist(GraphOfGroups(g.rank, vertices, edges, g.base), twisters)


def remove_invisible_vertex(d, v):
    """Merge the two edges at an invisible vertex into one."""
    g = d.gog
    oriented = [x for i in range(1, len(g.edges) + 1) for x in (i, -i)]
    incoming = [x for x in oriented if g.terminus(x) == v]
    if len(incoming) != 2 or abs(incoming[0]) == abs(incoming[1]):
        raise PipelineError(f"vertex {v} is not invisible")
    x1, x2 = sorted(incoming, key=lambda x: (g.name(x), x < 0))
    y = -x2
    eps = 1 if g.iota(x1) == g.iota(-y) else -1
    if eps == -1 and g.iota(x1) != g.iota(-y).inverse():
        raise PipelineError(f"edge groups at {v} differ")
    k_new = d.exponent(x1) + eps * d.exponent(y)
    name = g.name(x1)
    new_edge = Edge(
        name,
        g.origin(x1),
        g.terminus(y),
        g.stable(x1) * g.stable(y),
        g.iota(-x1),
        g.iota(y) ** eps,
    )
    edges = []
    for i, e in enumerate(g.edges, start=1):
        if i == abs(x1):
            edges.append(new_edge)
        elif i != abs(x2):
            edges.append(e)
    vertices = {u: b for u, b in g.vertices.items() if u != v}
    base = g.base if g.base != v else g.origin(x1)
    twisters = {e.name: d.twisters[e.name] for e in edges if e.name != name}
    twisters[name] = k_new
    return DehnTwist(GraphOfGroups(g.rank, vertices, edges, base), twisters)


def collapse_and_pull(rep):
    """Step 3: the Dehn twist on the graph of groups, with its trace."""
    _require_linear(rep)
    if rep.is_trivial():
        raise GrowthError(
            "all suffixes are trivial: the identity is not a Dehn twist on a graph twisting every edge"
        )
    d, trace = _build_twist(rep, [rep], lambda i: rep.suffixes[i - 1])
    d, cleanup = _clean_invisible(d)
    trace.extend(cleanup)
    report = check_efficient(d)
    if not report.efficient:
        raise PipelineError("construction is not efficient: " + "; ".join(
            report.structure.problems + [f"bonded {p}" for p in report.bonded_pairs]
            + ([] if report.twists_every_edge else ["zero twister"])))
    return d, trace


def _build_twist(rep, reps, suffix_of):
    """Collapse edges fixed by every rep, then pull loops up the filtration.

    ``suffix_of(i)`` gives the suffix whose exponent becomes the twister.
    """
    g = rep.graph
    trace = FoldTrace()
    d = initial_twist(rep)
    comp = {v: v for v in g.vertices}
    alpha = {v: Word.identity(g.rank) for v in g.vertices}
    n = len(g.edges)
    for i in range(1, n + 1):
        if any(r.suffixes[i - 1] for r in reps):
            continue
        name = g.edges[i - 1]
        before = _snapshot(d)
        d, comp_of, al = collapse_edge(d, name)
        for v in comp:
            w = comp[v]
            comp[v] = comp_of[w]
            alpha[v] = al[w] * alpha[v]
        trace.moves.append(Move("CollapseEdge", {"edge": name}, before, _snapshot(d)))
    for i in range(1, n + 1):
        lead = next((r.suffixes[i - 1] for r in reps if r.suffixes[i - 1]), None)
        if lead is None:
            continue
        eta, _ = _oriented_root(lead)
        k = _exponent_of(suffix_of(i), eta)
        if k is None:
            raise PipelineError(f"suffix of {g.edges[i - 1]} is not a power of its loop")
        name = g.edges[i - 1]
        t = g.ends[name][1]
        word = g.label(eta).conjugate(alpha[t])
        before = _snapshot(d)
        d = pull_over_edge(d, name, word, k)
        trace.moves.append(
            Move("PullOverEdge", {"edge": name, "word": str(word), "exponent": k}, before, _snapshot(d))
        )
    return d, trace


def _clean_invisible(d):
    trace = FoldTrace()
    while True:
        inv = invisible_vertices(d.gog)
        if not inv:
            return d, trace
        before = _snapshot(d)
        d = remove_invisible_vertex(d, inv[0])
        trace.moves.append(Move("RemoveInvisibleVertex", {"vertex": inv[0]}, before, _snapshot(d)))


# -- full pipeline ----------------------------------------------------------


@dataclass
class EfficientResult:
    twist: DehnTwist
    trace: FoldTrace
    stages: dict
    conjugator: Word

    @property
    def gog(self):
        return self.twist.gog


def efficient_rep(rep, with_trace=False):
    """Efficient Dehn twist realizing the outer class of ``rep``."""
    _require_linear(rep)
    if rep.is_trivial():
        raise GrowthError(
            "all suffixes are trivial: the identity is not a Dehn twist on a graph twisting every edge"
        )
    (r1,), t1 = _fold_conjugates_joint([rep])
    (r2,), t2 = _fold_families_joint([r1])
    d, t3 = collapse_and_pull(r2)
    trace = FoldTrace()
    for t in (t1, t2, t3):
        trace.extend(t)
    before = rep.induced_automorphism()
    after = d.induced_automorphism()
    w = is_inner(compose(after, invert(before)))
    if w is None:
        raise PipelineError("efficient representative does not realize the input outer class")
    d.efficient = True
    if with_trace:
        return EfficientResult(d, trace, {"fold_conjugates": r1, "fold_families": r2}, w)
    return d


def replay(rep, trace):
    """Re-run every move from ``rep`` and check each snapshot; returns the final state."""
    states = [rep]
    for m in trace.moves:
        states = _apply_move(states, m)
        snap = [_snapshot(s) for s in states]
        if _pack(snap) != m.after:
            raise PipelineError(f"replay diverged at {m.kind} {m.args}")
    return states[0] if len(states) == 1 else states


def _apply_move(states, m):
    a = m.args
    if m.kind == "Refilter":
        return [refilter(r, a["order"]) for r in states]
    if m.kind in ("FoldConjugate", "FoldOverFamilyMember"):
        if not isinstance(states[0], UTRep):
            raise PipelineError(f"{m.kind} after the graph-of-groups stage")
        g = states[0].graph
        i = g.index[a["edge"]]
        if m.kind == "FoldConjugate":
            path = parse_path(g, a["path"])
        else:
            path = (-g.index[a["target"]],)
        return slide_many(states, i, path)
    state = states[0]
    if isinstance(state, UTRep):
        state = initial_twist(state)
    if m.kind == "CollapseEdge":
        return [collapse_edge(state, a["edge"])[0]]
    if m.kind == "PullOverEdge":
        return [pull_over_edge(state, a["edge"], Word.parse(a["word"], state.gog.rank), a["exponent"])]
    if m.kind == "RemoveInvisibleVertex":
        return [remove_invisible_vertex(state, a["vertex"])]
    raise InputError(f"unknown move {m.kind}")


# -- common refinement ------------------------------------------------------


@dataclass
class Refinement:
    gog: GraphOfGroups
    collapse_to_a: list
    collapse_to_b: list
    reps: tuple
    trace: FoldTrace
    checked_words: int = 0

    def __iter__(self):
        return iter((self.gog, {"A": self.collapse_to_a, "B": self.collapse_to_b}))

    def to_dict(self):
        return {
            "gog": self.gog.to_dict(),
            "collapse_to_A": list(self.collapse_to_a),
            "collapse_to_B": list(self.collapse_to_b),
            "checked_words": self.checked_words,
        }


def check_refinement_hypotheses(rep_a, rep_b):
    """Raise HypothesisError naming the first violated clause."""
    if rep_a.graph != rep_b.graph:
        raise HypothesisError("0", "representatives are not on the same filtered graph")
    g = rep_a.graph
    for clause, (x, y) in (("1", (rep_a, rep_b)), ("2", (rep_b, rep_a))):
        for e, u in zip(g.edges, x.suffixes):
            if u and y.apply_letters(u) != u:
                raise HypothesisError(
                    clause,
                    f"suffix {format_path(g, u)} of {e} is not Nielsen for the other representative",
                )
    for e, ua, ub in zip(g.edges, rep_a.suffixes, rep_b.suffixes):
        if ua and ub and _oriented_root(ua)[0] != _oriented_root(ub)[0]:
            raise HypothesisError("3", f"edge {e} is linear for both with different primitive loops")


def collapse_spec(gog, names):
    """Collapse ``names`` and clear invisible vertices; the result's tree."""
    g = collapse_tracked(gog, names)[0]
    d = DehnTwist(g, {})
    while True:
        inv = invisible_vertices(d.gog)
        if not inv:
            return d.gog
        d = remove_invisible_vertex(d, inv[0])


def build_common_refinement(rep_a, rep_b, radius=6, eff_a=None, eff_b=None):
    """Tree resolving both efficient twists, with its two collapse specifications."""
    check_refinement_hypotheses(rep_a, rep_b)
    for rep in (rep_a, rep_b):
        _require_linear(rep)
    reps, t1 = _fold_conjugates_joint([rep_a, rep_b], check="3")
    _recheck(reps)
    reps, t2 = _fold_families_joint(reps, check="3")
    _recheck(reps)
    ra, rb = reps
    lead = ra if not ra.is_trivial() else rb
    d, t3 = _build_twist(lead, reps, lambda i: ra.suffixes[i - 1] or rb.suffixes[i - 1])
    g = d.gog
    names = {e.name for e in g.edges}
    to_a = sorted(n for n in names if not ra.suffix(n).letters)
    to_b = sorted(n for n in names if not rb.suffix(n).letters)
    trace = FoldTrace()
    for t in (t1, t2, t3):
        trace.extend(t)
    result = Refinement(g, to_a, to_b, (ra, rb), trace)
    targets = []
    for spec, rep, eff in ((to_a, rep_a, eff_a), (to_b, rep_b, eff_b)):
        if rep.is_trivial():
            continue
        targets.append((spec, eff if eff is not None else efficient_rep(rep)))
    result.checked_words = verify_refinement(g, targets, radius)
    return result


def _recheck(reps):
    try:
        check_refinement_hypotheses(*reps)
    except HypothesisError as exc:
        raise HypothesisError(exc.clause, "after joint folding: " + str(exc)) from None


def verify_refinement(gog, targets, radius=6):
    """Length functions of the collapsed trees agree with the targets on a ball."""
    words = cyclic_ball(gog.rank, radius)
    for spec, eff in targets:
        tree = collapse_spec(gog, spec)
        other = eff.gog if isinstance(eff, DehnTwist) else eff
        for w in words:
            a = translation_length(tree, w)
            b = translation_length(other, w)
            if a != b:
                raise HypothesisError(
                    "refinement",
                    f"collapsed tree and efficient tree disagree on {w}: {a} != {b}",
                )
            if translation_length(gog, w) < a:
                raise PipelineError(f"collapse increased the length of {w}")
    return len(words)
