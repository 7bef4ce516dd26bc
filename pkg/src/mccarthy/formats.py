"""Plain-text formats for automorphisms, UT representatives and graphs of groups.

All three are line oriented; ``#`` starts a comment.  Words use one letter
per generator, lower case for the generator and upper case for its inverse
(``a d b c B D``; spaces are optional).

Automorphism::

    s: a -> a d b c B D; b -> b c; c -> c; d -> d

UT representative (edges listed lowest stratum first)::

    rank 4
    vertex v
    edge a: v -> v; label a
    edge b: v -> v; label b
    suffix a: d b c B D

Graph of groups (the optional ``twister`` field makes it a Dehn twist)::

    rank 3
    vertex v: b, c, A b a
    edge a: from v; to v; generator a; iota_from b; iota_to A b a; twister 1
"""

from __future__ import annotations

import re

from .errors import InputError
from .gog import DehnTwist, Edge, GraphOfGroups
from .graphs import FilteredGraph, UTRep, format_path, parse_path
from .words import ALPHABET, FreeAutomorphism, Word, parse_letters

_NAME = re.compile(r"[A-Za-z_][A-Za-z0-9_']*")


def _lines(text):
    """Non-blank lines with comments removed, as (line number, text, offset)."""
    out = []
    for n, raw in enumerate(text.splitlines(), start=1):
        body = raw.split("#", 1)[0]
        if body.strip():
            lead = len(body) - len(body.lstrip())
            out.append((n, body.strip(), lead))
    if not out:
        raise InputError("empty input", line=1, column=1)
    return out


def _word(text, rank, line, column):
    try:
        return Word(rank, parse_letters(text, rank))
    except InputError as exc:
        col = column + (exc.column or 1) - 1
        msg = str(exc).split(": ", 1)[-1] if exc.column is not None else str(exc)
        raise InputError(msg, line=line, column=col) from None


# -- automorphisms ---------------------------------------------------------


def parse_automorphism(text, rank=None):
    lines = _lines(text)
    body = " ".join(t for _, t, _ in lines)
    line, _, lead = lines[0]
    name = None
    rest_at = 0
    if ":" in body and ("->" not in body or body.index(":") < body.index("->")):
        name = body[: body.index(":")].strip()
        if not _NAME.fullmatch(name):
            raise InputError(f"bad automorphism name {name!r}", line=line, column=lead + 1)
        rest_at = body.index(":") + 1
    clauses = [c for c in body[rest_at:].split(";") if c.strip()]
    if not clauses:
        raise InputError("no images given", line=line, column=lead + 1)
    pairs = []
    pos = rest_at
    for clause in body[rest_at:].split(";"):
        if clause.strip():
            if "->" not in clause:
                raise InputError(f"expected 'x -> word', got {clause.strip()!r}", line=line, column=lead + pos + 1)
            lhs, rhs = clause.split("->", 1)
            lhs = lhs.strip()
            if len(lhs) != 1 or lhs not in ALPHABET:
                raise InputError(f"left side must be a generator letter, got {lhs!r}", line=line, column=lead + pos + 1)
            pairs.append((lhs, rhs, lead + pos + clause.index("->") + 3))
        pos += len(clause) + 1
    r = rank or len(pairs)
    images = [None] * r
    for lhs, rhs, col in pairs:
        i = ALPHABET.index(lhs)
        if i >= r:
            raise InputError(f"generator {lhs} exceeds rank {r}", line=line, column=col)
        if images[i] is not None:
            raise InputError(f"generator {lhs} given twice", line=line, column=col)
        images[i] = _word(rhs, r, line, col)
    missing = [ALPHABET[i] for i, im in enumerate(images) if im is None]
    if missing:
        raise InputError(f"no image for {', '.join(missing)}", line=line)
    try:
        return FreeAutomorphism(r, images, name=name)
    except InputError:
        raise
    except ValueError as exc:
        raise InputError(f"images do not form a basis: {exc}", line=line) from None


def format_automorphism(phi):
    return str(phi) + "\n"


# -- UT representatives ----------------------------------------------------


def _header(lines):
    rank = None
    rest = []
    for n, t, lead in lines:
        if t.startswith("rank "):
            try:
                rank = int(t.split()[1])
            except ValueError:
                raise InputError("rank must be an integer", line=n, column=lead + 6) from None
            if rank < 1:
                raise InputError("rank must be positive", line=n, column=lead + 6)
        else:
            rest.append((n, t, lead))
    return rank, rest


def _split_fields(t, n, lead, keyword):
    m = re.match(rf"{keyword}\s+({_NAME.pattern})\s*:\s*(.*)$", t)
    if not m:
        raise InputError(f"malformed {keyword} line", line=n, column=lead + 1)
    return m.group(1), m.group(2), lead + m.start(2)


def parse_utrep(text, name=None):
    rank, lines = _header(_lines(text))
    vertices, edges, ends, labels, table = [], [], {}, {}, {}
    base = None
    deferred = []
    for n, t, lead in lines:
        kw = t.split(None, 1)[0]
        if kw == "vertex":
            for v in t.split()[1:]:
                vertices.append(v.strip(","))
        elif kw == "base":
            base = t.split()[1]
        elif kw == "edge":
            e, body, col = _split_fields(t, n, lead, "edge")
            parts = [p.strip() for p in body.split(";")]
            m = re.match(r"(\S+)\s*->\s*(\S+)$", parts[0])
            if not m:
                raise InputError("expected 'origin -> terminus'", line=n, column=col + 1)
            edges.append(e)
            ends[e] = (m.group(1), m.group(2))
            for p in parts[1:]:
                if p.startswith("label"):
                    if rank is None:
                        raise InputError("labels need a rank line first", line=n, column=col + 1)
                    labels[e] = _word(p[5:], rank, n, col + body.index(p) + 6)
                elif p:
                    raise InputError(f"unknown edge field {p!r}", line=n, column=col + body.index(p) + 1)
        elif kw == "suffix":
            e, body, col = _split_fields(t, n, lead, "suffix")
            deferred.append((n, e, body, col))
        else:
            raise InputError(f"unknown keyword {kw!r}", line=n, column=lead + 1)
    if not edges:
        raise InputError("no edges given", line=lines[-1][0] if lines else 1)
    if not vertices:
        vertices = sorted({v for pair in ends.values() for v in pair})
    try:
        graph = FilteredGraph(vertices, edges, ends, labels or None, base, rank)
    except ValueError as exc:
        raise InputError(str(exc), line=lines[0][0]) from None
    for n, e, body, col in deferred:
        if e not in graph.index:
            raise InputError(f"suffix for unknown edge {e}", line=n, column=col)
        try:
            table[e] = body
            parse_path(graph, body)
        except InputError as exc:
            raise InputError(str(exc), line=n, column=col + 1) from None
    try:
        return UTRep.from_text_suffixes(graph, table, name)
    except ValueError as exc:
        raise InputError(str(exc), line=lines[0][0]) from None


def format_utrep(rep):
    g = rep.graph
    out = []
    if g.rank is not None:
        out.append(f"rank {g.rank}")
    out.append("vertex " + " ".join(g.vertices))
    if g.base is not None and g.base != g.vertices[0]:
        out.append(f"base {g.base}")
    for e in g.edges:
        o, t = g.ends[e]
        line = f"edge {e}: {o} -> {t}"
        if g.labels is not None:
            line += f"; label {g.labels[e].spaced() or '1'}"
        out.append(line)
    for e, s in zip(g.edges, rep.suffixes):
        if s:
            out.append(f"suffix {e}: {format_path(g, s)}")
    return "\n".join(out) + "\n"


# -- graphs of groups ------------------------------------------------------

_EDGE_KEYS = ("from", "to", "generator", "iota_from", "iota_to", "twister")


def parse_gog(text, twist=None):
    """A GraphOfGroups, or a DehnTwist when twisters are present (or ``twist`` is true)."""
    rank, lines = _header(_lines(text))
    if rank is None:
        raise InputError("missing 'rank' line", line=1, column=1)
    vertices, edges, twisters = {}, [], {}
    base = None
    for n, t, lead in lines:
        kw = t.split(None, 1)[0]
        if kw == "vertex":
            v, body, col = _split_fields(t, n, lead, "vertex")
            basis = []
            at = 0
            for item in body.split(","):
                if item.strip() and item.strip() != "1":
                    basis.append(_word(item, rank, n, col + at + 1))
                at += len(item) + 1
            vertices[v] = basis
        elif kw == "base":
            base = t.split()[1]
        elif kw == "edge":
            e, body, col = _split_fields(t, n, lead, "edge")
            fields = {}
            at = 0
            for item in body.split(";"):
                s = item.strip()
                if s:
                    key, _, value = s.partition(" ")
                    if key not in _EDGE_KEYS:
                        raise InputError(f"unknown edge field {key!r}", line=n, column=col + at + 1)
                    fields[key] = (value.strip(), col + at + item.index(key) + len(key) + 2)
                at += len(item) + 1
            for key in ("from", "to", "generator", "iota_to"):
                if key not in fields:
                    raise InputError(f"edge {e} is missing {key}", line=n, column=col + 1)
            w = {k: _word(fields[k][0], rank, n, fields[k][1]) for k in ("generator", "iota_to")}
            if "iota_from" in fields:
                w["iota_from"] = _word(fields["iota_from"][0], rank, n, fields["iota_from"][1])
            else:
                g = w["generator"]
                w["iota_from"] = w["iota_to"].conjugate(g)
            edges.append(Edge(e, fields["from"][0], fields["to"][0], w["generator"], w["iota_from"], w["iota_to"]))
            if "twister" in fields:
                try:
                    twisters[e] = int(fields["twister"][0])
                except ValueError:
                    raise InputError("twister must be an integer", line=n, column=fields["twister"][1]) from None
        else:
            raise InputError(f"unknown keyword {kw!r}", line=n, column=lead + 1)
    try:
        g = GraphOfGroups(rank, vertices, edges, base)
    except InputError as exc:
        raise InputError(str(exc), line=lines[0][0]) from None
    for e in edges:
        if e.iota_to.conjugate(e.stable) != e.iota_from:
            raise InputError(f"edge {e.name}: iota_from must equal generator * iota_to * generator^-1")
    if twist or (twist is None and twisters):
        return DehnTwist(g, {e.name: twisters.get(e.name, 0) for e in edges})
    return g


def format_gog(g):
    d = g if isinstance(g, GraphOfGroups) else g.gog
    twisters = None if isinstance(g, GraphOfGroups) else g.twisters
    out = [f"rank {d.rank}"]
    if d.base != d.vertex_names[0]:
        out.append(f"base {d.base}")
    for v, basis in d.vertices.items():
        out.append(f"vertex {v}: " + ", ".join(b.spaced() for b in basis))
    for e in d.edges:
        line = (
            f"edge {e.name}: from {e.origin}; to {e.terminus}; generator {e.stable.spaced() or '1'}; "
            f"iota_from {e.iota_from.spaced() or '1'}; iota_to {e.iota_to.spaced() or '1'}"
        )
        if twisters is not None:
            line += f"; twister {twisters[e.name]}"
        out.append(line)
    return "\n".join(out) + "\n"


def sniff(text):
    """Guess which format ``text`` is in: 'automorphism', 'utrep' or 'gog'."""
    lines = _lines(text)
    kws = {t.split(None, 1)[0] for _, t, _ in lines}
    if "suffix" in kws:
        return "utrep"
    if "edge" in kws:
        body = " ".join(t for _, t, _ in lines)
        return "gog" if "iota_to" in body or "generator" in body else "utrep"
    return "automorphism"


def load(text):
    kind = sniff(text)
    if kind == "utrep":
        return parse_utrep(text)
    if kind == "gog":
        return parse_gog(text)
    return parse_automorphism(text)
