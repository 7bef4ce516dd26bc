"""Command line front end: ``mccarthy <command> ...``."""

from __future__ import annotations

import argparse
import json
import sys
from dataclasses import dataclass, field
from pathlib import Path

from . import dichotomy, folding, formats, interaction
from .errors import (
    GrowthError,
    HypothesisError,
    InputError,
    NotAnAutomorphism,
    PipelineError,
    UnsupportedInput,
    WrongCaseError,
)
from .gog import DehnTwist, GraphOfGroups, check_efficient, translation_length
from .graphs import UTRep, growth_class, rose_utrep
from .words import FreeAutomorphism, Word, mod3_matrix, unipotent_power

MAX_RADIUS = 8
MAX_SYLLABLES = 6


@dataclass
class SessionConfig:
    command: str
    inputs: list = field(default_factory=list)
    rank: int | None = None
    radius: int = 4
    syllable_bound: int = 4
    power: int = 3
    fmt: str = "text"
    seed: int = 0
    jobs: int = 1
    emit_trace: str | None = None
    words: list = field(default_factory=list)

    def check(self):
        if not 0 <= self.radius <= MAX_RADIUS:
            raise InputError(f"--radius must be between 0 and {MAX_RADIUS}")
        if not 1 <= self.syllable_bound <= MAX_SYLLABLES:
            raise InputError(f"--syllable-bound must be between 1 and {MAX_SYLLABLES}")
        if self.power < 1:
            raise InputError("--power must be positive")
        if self.jobs < 1:
            raise InputError("--jobs must be positive")


def _read(path):
    try:
        return Path(path).read_text()
    except OSError as exc:
        raise InputError(f"cannot read {path}: {exc.strerror}") from None


def _load(path):
    try:
        return formats.load(_read(path))
    except InputError as exc:
        raise InputError(f"{path}: {exc}") from None


def _as_utrep(obj, path):
    if isinstance(obj, UTRep):
        return obj
    if isinstance(obj, FreeAutomorphism):
        rep = rose_utrep(obj)
        if rep is None:
            raise UnsupportedInput(
                f"{path}: images are not visibly upper triangular on the rose; supply a UT representative"
            )
        return rep
    raise InputError(f"{path}: expected an automorphism or a UT representative")


def _as_automorphism(obj):
    if isinstance(obj, FreeAutomorphism):
        return obj
    return obj.induced_automorphism()


def _as_twist(obj, path):
    if isinstance(obj, DehnTwist):
        if not check_efficient(obj).efficient:
            raise InputError(f"{path}: Dehn twist is not efficient")
        obj.efficient = True
        return obj
    if isinstance(obj, GraphOfGroups):
        raise InputError(f"{path}: graph of groups has no twisters")
    return folding.efficient_rep(_as_utrep(obj, path))


def _gog_of(obj, path):
    if isinstance(obj, GraphOfGroups):
        return obj
    return _as_twist(obj, path).gog


# -- commands --------------------------------------------------------------


def cmd_growth(cfg):
    obj = _load(cfg.inputs[0])
    rep = _as_utrep(obj, cfg.inputs[0])
    rep_g = growth_class(rep)
    doc = {
        "operation": "graphs.growth_class",
        "overall": rep_g.overall,
        "per_edge": rep_g.per_edge,
        "degree_estimate": rep_g.degree_estimate,
    }
    text = f"growth: {rep_g.overall}\n" + "".join(f"  {e}: {k}\n" for e, k in rep_g.per_edge.items())
    return 0, doc, text


def cmd_unipotent_power(cfg):
    phi = _as_automorphism(_load(cfg.inputs[0]))
    m = unipotent_power(phi)
    psi = phi ** m
    doc = {
        "operation": "words.unipotent_power",
        "power": m,
        "mod3_matrix": [list(row) for row in mod3_matrix(phi).entries],
        "result": [str(im) for im in psi.images],
    }
    return 0, doc, f"power: {m}\n{formats.format_automorphism(psi)}"


def cmd_efficient_rep(cfg):
    rep = _as_utrep(_load(cfg.inputs[0]), cfg.inputs[0])
    res = folding.efficient_rep(rep, with_trace=True)
    if cfg.emit_trace:
        Path(cfg.emit_trace).write_text(res.trace.to_json())
    doc = {
        "operation": "folding.efficient_rep",
        "twist": res.twist.to_dict(),
        "moves": res.trace.kinds(),
        "conjugator": str(res.conjugator),
    }
    return 0, doc, formats.format_gog(res.twist)


def cmd_lengths(cfg):
    g = _gog_of(_load(cfg.inputs[0]), cfg.inputs[0])
    rows = []
    for text in cfg.words:
        w = Word.parse(text, g.rank)
        rows.append({"word": str(w), "length": translation_length(g, w)})
    doc = {"operation": "gog.translation_length", "lengths": rows}
    return 0, doc, "".join(f"{r['word'] or '1'}\t{r['length']}\n" for r in rows)


def cmd_edge_twist(cfg):
    d_a = _as_twist(_load(cfg.inputs[0]), cfg.inputs[0])
    d_b = _as_twist(_load(cfg.inputs[1]), cfg.inputs[1])
    et = interaction.edge_twist_digraph(d_a, d_b)
    info = interaction.analyze(et)
    doc = {"operation": "interaction.edge_twist_digraph", "digraph": et.to_dict(), "analysis": info.to_dict()}
    lines = [f"{a[0]}:{a[1]} -> {b[0]}:{b[1]}" for a, b in et.arcs]
    if info.acyclic:
        lines.append(f"acyclic; longest path {info.longest_path}; growth degree at most {info.growth_degree_bound}")
    else:
        lines.append("contains a cycle")
    return 0, doc, "\n".join(lines) + "\n", et.to_dot()


def cmd_compat(cfg):
    objs = [_load(p) for p in cfg.inputs[:2]]
    twists = [o if isinstance(o, GraphOfGroups) else _as_twist(o, p) for o, p in zip(objs, cfg.inputs)]
    gogs = [t if isinstance(t, GraphOfGroups) else t.gog for t in twists]
    res = interaction.incompatibility_search(gogs[0], gogs[1], radius=cfg.radius, jobs=cfg.jobs)
    doc = {"operation": "interaction.incompatibility_search", **res.to_dict()}
    if all(isinstance(t, DehnTwist) for t in twists):
        doc["hyperbolicity"] = interaction.hyperbolic_hyperbolic(*twists).to_dict()
    if res.found:
        w = res.witness
        text = f"incompatible: g = {w.g}, h = {w.h} (branch {w.branch})\n"
        for side in ("A", "B"):
            text += f"  {side}: " + ", ".join(f"l({k})={v}" for k, v in w.lengths[side].items()) + "\n"
    else:
        text = f"no witness up to radius {cfg.radius} ({res.checked} pairs); not a proof of compatibility\n"
    return 0, doc, text


def cmd_decide(cfg):
    objs = [_load(p) for p in cfg.inputs[:2]]
    v = dichotomy.decide(
        objs[0],
        objs[1],
        radius=cfg.radius,
        syllable_bound=cfg.syllable_bound,
        evidence_power=cfg.power,
        seed=cfg.seed,
        jobs=cfg.jobs,
    )
    doc = {"operation": "dichotomy.decide", **v.to_dict()}
    text = f"{v.outcome} (power {v.power})\n"
    cert = v.certificate
    search = cert.get("search") or {}
    if search.get("found"):
        w = search["witness"]
        text += f"witness: g = {w['g']}, h = {w['h']} (branch {w['branch']})\n"
    if cert.get("exact"):
        text += f"exact: suffix homomorphism on edge {cert['exact']['edge']}\n"
    if "evidence" in cert and isinstance(cert["evidence"], dict) and "checked" in cert["evidence"]:
        ev = cert["evidence"]
        text += f"evidence: {ev['checked']} words non-inner at power {ev.get('power')}\n"
    for n in v.notes:
        text += f"note: {n}\n"
    return v.exit_code, doc, text


def cmd_constants(cfg):
    if cfg.rank is None:
        raise InputError("constants needs --rank")
    c = dichotomy.constants(cfg.rank)
    doc = {"operation": "dichotomy.constants", **c}
    text = "".join(f"{k}: {v}\n" for k, v in c.items())
    return 0, doc, text


COMMANDS = {
    "growth": (cmd_growth, 1),
    "unipotent-power": (cmd_unipotent_power, 1),
    "efficient-rep": (cmd_efficient_rep, 1),
    "lengths": (cmd_lengths, 1),
    "edge-twist": (cmd_edge_twist, 2),
    "compat": (cmd_compat, 2),
    "decide": (cmd_decide, 2),
    "constants": (cmd_constants, 0),
}


def build_parser():
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--format", dest="fmt", choices=("text", "json", "dot"), default="text")
    common.add_argument("--seed", type=int, default=0)
    common.add_argument("--jobs", type=int, default=1)
    common.add_argument("--radius", type=int, default=4)
    common.add_argument("--syllable-bound", type=int, default=4)
    common.add_argument("--power", type=int, default=3, help="power used for freeness evidence")
    common.add_argument("--emit-trace", metavar="PATH")
    common.add_argument("--rank", type=int)
    p = argparse.ArgumentParser(prog="mccarthy", description="Dehn twists of free groups: commuting or free powers.")
    sub = p.add_subparsers(dest="command", required=True)
    for name, (_, n) in COMMANDS.items():
        s = sub.add_parser(name, parents=[common])
        if n:
            s.add_argument("inputs", nargs=n, metavar="FILE")
        if name == "lengths":
            s.add_argument("words", nargs="+", metavar="WORD")
    return p


def config_from_args(argv):
    ns = build_parser().parse_args(argv)
    cfg = SessionConfig(
        command=ns.command,
        inputs=list(getattr(ns, "inputs", []) or []),
        rank=ns.rank,
        radius=ns.radius,
        syllable_bound=ns.syllable_bound,
        power=ns.power,
        fmt=ns.fmt,
        seed=ns.seed,
        jobs=ns.jobs,
        emit_trace=ns.emit_trace,
        words=list(getattr(ns, "words", []) or []),
    )
    return cfg


def run(cfg, out=None, err=None):
    """Execute ``cfg``; returns the exit code."""
    out = out or sys.stdout
    err = err or sys.stderr
    try:
        cfg.check()
        result = COMMANDS[cfg.command][0](cfg)
    except (InputError, NotAnAutomorphism) as exc:
        err.write(f"input error: {exc}\n")
        return 3
    except (GrowthError, UnsupportedInput, WrongCaseError) as exc:
        err.write(f"refused: {exc}\n")
        return 4
    except HypothesisError as exc:
        err.write(f"hypothesis not met: {exc}\n")
        return 4
    except PipelineError as exc:
        err.write(f"internal check failed: {exc}\n")
        return 5
    code, doc, text = result[:3]
    if cfg.fmt == "json":
        out.write(json.dumps(doc, indent=2, sort_keys=True) + "\n")
    elif cfg.fmt == "dot":
        if len(result) < 4:
            err.write("--format dot is only available for edge-twist\n")
            return 3
        out.write(result[3])
    else:
        out.write(text)
    return code


def main(argv=None):
    cfg = config_from_args(sys.argv[1:] if argv is None else argv)
    return run(cfg)


if __name__ == "__main__":
    sys.exit(main())
