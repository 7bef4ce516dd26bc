"""Stallings subgroup graphs with witness tracking.

A finitely generated subgroup H = <h_1, ..., h_k> of F_r is represented by
its folded labelled graph.  Each edge additionally carries a *witness*: a
word in the symbols ``±(j+1)`` standing for ``h_j^{±1}``.  Folding maintains
a potential P(v) in F_r with P(base) = 1 such that the witness of an edge
u --x--> w evaluates to P(u) x P(w)^-1.  Reading an element of H along the
graph and concatenating witnesses therefore writes it as a word in the
generators, which is what membership certificates and groupoid rewriting
need.
"""

from __future__ import annotations

from .words import Word, free_reduce, invert_letters


class SubgroupGraph:
    """Folded graph of the subgroup generated by ``generators``."""

    def __init__(self, rank, generators):
        self.rank = rank
        self.generators = tuple(generators)
        for g in self.generators:
            if g.rank != rank:
                raise ValueError("generator rank mismatch")
        self.base = 0
        self._out = {0: {}}
        self._parent = {}
        self._next = 1
        for k, g in enumerate(self.generators):
            self._add_petal(k, g.letters)
        self._parent.clear()

    # -- construction -------------------------------------------------
    def _new_vertex(self):
        v = self._next
        self._next += 1
        self._out[v] = {}
        return v

    def _add_petal(self, k, letters):
        if not letters:
            return
        n = len(letters)
        prev = self.base
        for i, x in enumerate(letters):
            nxt = self.base if i == n - 1 else self._new_vertex()
            wit = (k + 1,) if i == 0 else ()
            self._insert(prev, x, nxt, wit)
            prev = nxt

    def _find(self, v):
        delta = ()
        chain = []
        while v in self._parent:
            p, d = self._parent[v]
            chain.append(d)
            v = p
        for d in chain:
            delta = free_reduce(d + delta)
        return v, delta

    def _insert(self, u, x, w, sig):
        out = self._out
        stack = [(u, x, w, sig)]
        while stack:
            u, x, w, sig = stack.pop()
            u, du = self._find(u)
            w, dw = self._find(w)
            sig = free_reduce(du + sig + invert_letters(dw))
            e1 = out[u].get(x)
            if e1 is not None:
                t1, s1 = e1
                if t1 != w:
                    stack.extend(self._merge(t1, w, free_reduce(invert_letters(s1) + sig)))
                continue
            e2 = out[w].get(-x)
            if e2 is not None:
                u2, s2 = e2
                if u2 != u:
                    stack.extend(self._merge(u, u2, free_reduce(sig + s2)))
                    stack.append((u, x, w, sig))
                continue
            out[u][x] = (w, sig)
            out[w][-x] = (u, invert_letters(sig))

    def _merge(self, keep, gone, delta):
        """Merge ``gone`` into ``keep``; ``delta`` evaluates to P(keep) P(gone)^-1."""
        if gone == self.base:
            keep, gone, delta = gone, keep, invert_letters(delta)
        self._parent[gone] = (keep, delta)
        pending = []
        for x, (t, s) in self._out.pop(gone).items():
            if t != gone:
                del self._out[t][-x]
            pending.append((gone, x, t, s))
        return pending

    # -- queries ------------------------------------------------------
    @property
    def vertices(self):
        return sorted(self._out)

    def edge_count(self):
        return sum(len(d) for d in self._out.values()) // 2

    def subgroup_rank(self):
        return self.edge_count() - len(self._out) + 1

    def is_whole_group(self):
        return len(self._out) == 1 and len(self._out[self.base]) == 2 * self.rank

    def read(self, w):
        """Follow ``w`` from the base; return (end vertex, witness) or None."""
        v = self.base
        acc = []
        for x in w.letters:
            e = self._out[v].get(x)
            if e is None:
                return None
            v, s = e
            acc.extend(s)
        return v, free_reduce(acc)

    def contains(self, w):
        r = self.read(w)
        return r is not None and r[0] == self.base

    def express(self, w):
        """Write ``w`` as a word in the generators (symbol j+1 is h_j), or None."""
        r = self.read(w)
        if r is None or r[0] != self.base:
            return None
        return r[1]

    def evaluate(self, symbols):
        acc = Word.identity(self.rank)
        for s in symbols:
            g = self.generators[abs(s) - 1]
            acc = acc * (g if s > 0 else g.inverse())
        return acc

    def contains_subgroup(self, other_generators):
        return all(self.contains(g) for g in other_generators)

    def same_subgroup(self, other):
        return self.contains_subgroup(other.generators) and other.contains_subgroup(
            self.generators
        )


def same_subgroup(rank, gens1, gens2):
    return SubgroupGraph(rank, gens1).same_subgroup(SubgroupGraph(rank, gens2))
