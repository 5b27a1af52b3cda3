"""Labeled graphs of spaces, configurations, restriction and scaling.

A resource structure is a directed graph of spaces with a designated
entry. Every node carries a total assignment of the declared resource
attributes. Each edge is either *controlled* (its policy is chosen by
the synthesizer) or *fixed* (its policy is part of the model, commonly
`true` for doors that are always open in one direction).

A configuration assigns one policy (a target over subject and
contextual attributes) to every controlled edge. Restricting a
structure by a request keeps the edges whose policy grants the request
and then drops everything the entry can no longer reach.
"""

from __future__ import annotations

import json
import re
from dataclasses import dataclass
from typing import Dict, Iterable, List, Optional, Set, Tuple

from .formulas import (
    BOOLEAN, BOTTOM, CONTEXTUAL, ENUM, NUMERIC, RESOURCE, SUBJECT,
    AccessRequest, AttributeDecl, AttributeSignature, Formula, Top,
    Value, eval_target, validate_target,
)
from .rules import RESERVED, format_target, parse_target

Edge = Tuple[str, str]
Configuration = Dict[Edge, Formula]

_IDENT_RE = re.compile(r"[A-Za-z_][A-Za-z0-9_]*\Z")


class ModelError(ValueError):
    pass


@dataclass
class ResourceStructure:
    sig: AttributeSignature
    entry: str
    labels: Dict[str, Dict[str, Value]]          # node -> resource attr -> value
    edges: Dict[Edge, Optional[Formula]]         # None = controlled, else fixed policy

    def __post_init__(self):
        self._succ: Dict[str, List[str]] = {r: [] for r in self.labels}
        self._pred: Dict[str, List[str]] = {r: [] for r in self.labels}
        for (a, b) in sorted(self.edges):
            # Dangling endpoints are tolerated here so validate() can
            # report them as a model error instead of a crash.
            if a in self._succ and b in self._pred:
                self._succ[a].append(b)
                self._pred[b].append(a)

    # -- basic views ---------------------------------------------------

    @property
    def nodes(self) -> List[str]:
        return sorted(self.labels)

    def successors(self, r: str) -> List[str]:
        return self._succ[r]

    def predecessors(self, r: str) -> List[str]:
        return self._pred[r]

    def controlled_edges(self) -> List[Edge]:
        return sorted(e for e, pol in self.edges.items() if pol is None)

    def fixed_edges(self) -> List[Edge]:
        return sorted(e for e, pol in self.edges.items() if pol is not None)

    def label(self, r: str) -> Dict[str, Value]:
        return self.labels[r]

    def reachable(self) -> Set[str]:
        seen = {self.entry}
        stack = [self.entry]
        while stack:
            for s in self._succ[stack.pop()]:
                if s not in seen:
                    seen.add(s)
                    stack.append(s)
        return seen

    # -- validation ------------------------------------------------------

    def validate(self, as_given: bool = True) -> None:
        """Check well-formedness. `as_given` additionally demands the
        guarantees of an input model (full reachability, no deadlocks),
        which restricted structures are allowed to lose."""
        if self.entry not in self.labels:
            raise ModelError("entry %r is not a declared space" % self.entry)
        resource_attrs = self.sig.resource_attrs()
        for r, lab in self.labels.items():
            for d in resource_attrs:
                if d.name not in lab:
                    raise ModelError("space %r misses resource attribute %r" % (r, d.name))
                if not d.admits(lab[d.name]):
                    raise ModelError("space %r: value %r not admissible for %r"
                                     % (r, lab[d.name], d.name))
            for k in lab:
                if k not in self.sig or self.sig.get(k).cls != RESOURCE:
                    raise ModelError("space %r labels unknown resource attribute %r" % (r, k))
        for (a, b), pol in self.edges.items():
            if a not in self.labels or b not in self.labels:
                raise ModelError("edge (%s, %s) references an undeclared space" % (a, b))
            if a == b:
                raise ModelError("self-loop on %r (edges must be irreflexive)" % a)
            if pol is not None:
                validate_target(pol, self.sig)
        if as_given:
            unreachable = set(self.labels) - self.reachable()
            if unreachable:
                raise ModelError("unreachable spaces: %s" % ", ".join(sorted(unreachable)))
            for r in self.nodes:
                if not self._succ[r]:
                    raise ModelError("space %r has no outgoing edge" % r)

    # -- derived structures ----------------------------------------------

    def with_edges(self, keep: Iterable[Edge]) -> "ResourceStructure":
        """Same spaces and labels, edges limited to `keep` (no pruning)."""
        keep = set(keep)
        return ResourceStructure(self.sig, self.entry, self.labels,
                                 {e: p for e, p in self.edges.items() if e in keep})


def policy_of(S: ResourceStructure, c: Configuration, e: Edge) -> Formula:
    fixed = S.edges[e]
    return fixed if fixed is not None else c[e]


def validate_configuration(S: ResourceStructure, c: Configuration) -> None:
    controlled = set(S.controlled_edges())
    if set(c) != controlled:
        missing = sorted(controlled - set(c))
        extra = sorted(set(c) - controlled)
        bits = []
        if missing:
            bits.append("missing policies for %s" % ", ".join("%s->%s" % e for e in missing))
        if extra:
            bits.append("policies for unknown controlled edges %s"
                        % ", ".join("%s->%s" % e for e in extra))
        raise ModelError("; ".join(bits))
    for e, pol in c.items():
        validate_target(pol, S.sig)


def restrict(S: ResourceStructure, c: Configuration, q: AccessRequest) -> ResourceStructure:
    """The structure the subject of request `q` experiences: only edges
    whose policy grants `q`, pruned to what the entry still reaches."""
    granted = {e: p for e, p in S.edges.items()
               if eval_target(q, policy_of(S, c, e))}
    seen = {S.entry}
    stack = [S.entry]
    while stack:
        r = stack.pop()
        for (a, b) in granted:
            if a == r and b not in seen:
                seen.add(b)
                stack.append(b)
    labels = {r: S.labels[r] for r in seen}
    edges = {e: p for e, p in granted.items() if e[0] in seen and e[1] in seen}
    return ResourceStructure(S.sig, S.entry, labels, edges)


def granted_edges(S: ResourceStructure, c: Configuration, q: AccessRequest) -> Set[Edge]:
    return {e for e in S.edges if eval_target(q, policy_of(S, c, e))}


# ---------------------------------------------------------------------------
# Permissiveness comparison
# ---------------------------------------------------------------------------

LESS_OR_EQUAL = "less-or-equal"
GREATER_OR_EQUAL = "greater-or-equal"
EQUAL = "equal"
INCOMPARABLE = "incomparable"


def compare(c1: Configuration, c2: Configuration, sig: AttributeSignature) -> str:
    """Pointwise permissiveness order: c1 is less-or-equal c2 when every
    request granted by c1 on an edge is granted by c2 on that edge."""
    from .formulas import build_regions, collect_atoms
    if set(c1) != set(c2):
        raise ModelError("configurations cover different edge sets")
    le = ge = True
    for e in sorted(c1):
        atoms = collect_atoms(c1[e]) + collect_atoms(c2[e])
        for q in build_regions(sig, atoms).representatives():
            v1, v2 = eval_target(q, c1[e]), eval_target(q, c2[e])
            if v1 and not v2:
                le = False
            if v2 and not v1:
                ge = False
        if not le and not ge:
            return INCOMPARABLE
    if le and ge:
        return EQUAL
    return LESS_OR_EQUAL if le else GREATER_OR_EQUAL


# ---------------------------------------------------------------------------
# Scaling
# ---------------------------------------------------------------------------

def scale_replicate(S: ResourceStructure, copies: int) -> ResourceStructure:
    """Replicate every non-entry space `copies` times around the shared
    entry. Labels are copied verbatim; edges stay within a copy except
    those incident to the entry, which are duplicated per copy."""
    if copies < 1:
        raise ModelError("copies must be at least 1")
    labels: Dict[str, Dict[str, Value]] = {S.entry: dict(S.labels[S.entry])}
    edges: Dict[Edge, Optional[Formula]] = {}
    for k in range(1, copies + 1):
        suffix = "@%d" % k
        for r, lab in S.labels.items():
            if r != S.entry:
                labels[r + suffix] = dict(lab)
        for (a, b), pol in S.edges.items():
            a2 = a if a == S.entry else a + suffix
            b2 = b if b == S.entry else b + suffix
            edges[(a2, b2)] = pol
    return ResourceStructure(S.sig, S.entry, labels, edges)


# ---------------------------------------------------------------------------
# JSON input and output
# ---------------------------------------------------------------------------

_KINDS = {BOOLEAN, NUMERIC, ENUM}


def _decl_from_json(name: str, cls: str, spec: dict) -> AttributeDecl:
    if not _IDENT_RE.match(name) or name in RESERVED:
        raise ModelError("attribute name %r is not a usable identifier" % name)
    kind = spec.get("kind")
    if kind not in _KINDS:
        raise ModelError("attribute %r: unknown kind %r" % (name, kind))
    symbols: Tuple[str, ...] = ()
    if kind == ENUM:
        symbols = tuple(spec.get("values", ()))
        for s in symbols:
            if not isinstance(s, str) or not _IDENT_RE.match(s) or s in RESERVED:
                raise ModelError("attribute %r: bad symbol %r" % (name, s))
        if len(set(symbols)) != len(symbols):
            raise ModelError("attribute %r repeats a symbol" % name)
    return AttributeDecl(name, cls, kind, symbols)


def signature_from_json(doc: dict) -> AttributeSignature:
    decls: List[AttributeDecl] = []
    attrs = doc.get("attributes", {})
    for cls in (SUBJECT, CONTEXTUAL, RESOURCE):
        for name, spec in attrs.get(cls, {}).items():
            decls.append(_decl_from_json(name, cls, spec))
    return AttributeSignature(decls)


def _value_from_json(v) -> Value:
    if v is None:
        return BOTTOM
    if isinstance(v, (bool, int, str)):
        return v
    raise ModelError("bad attribute value %r" % (v,))


def _value_to_json(v: Value):
    return None if v is BOTTOM else v


def model_from_json(doc: dict) -> ResourceStructure:
    sig = signature_from_json(doc)
    if "entry" not in doc:
        raise ModelError("model misses the entry space")
    labels: Dict[str, Dict[str, Value]] = {}
    for res in doc.get("resources", []):
        rid = res.get("id")
        if not isinstance(rid, str) or not rid:
            raise ModelError("every resource needs a non-empty id")
        if rid in labels:
            raise ModelError("duplicate resource id %r" % rid)
        labels[rid] = {k: _value_from_json(v) for k, v in res.get("labels", {}).items()}
    edges: Dict[Edge, Optional[Formula]] = {}
    for spec in doc.get("edges", []):
        a, b = spec.get("from"), spec.get("to")
        if (a, b) in edges:
            raise ModelError("duplicate edge (%s, %s)" % (a, b))
        mode = spec.get("mode", "controlled")
        if mode == "controlled":
            edges[(a, b)] = None
        elif isinstance(mode, dict) and set(mode) == {"fixed"}:
            edges[(a, b)] = parse_target(mode["fixed"], sig)
        else:
            raise ModelError("edge (%s, %s): mode must be \"controlled\" "
                             "or {\"fixed\": \"<policy>\"}" % (a, b))
    S = ResourceStructure(sig, doc["entry"], labels, edges)
    S.validate(as_given=True)
    return S


def model_to_json(S: ResourceStructure) -> dict:
    attrs: Dict[str, Dict[str, dict]] = {SUBJECT: {}, CONTEXTUAL: {}, RESOURCE: {}}
    for d in S.sig:
        spec: dict = {"kind": d.kind}
        if d.kind == ENUM:
            spec["values"] = list(d.symbols)
        attrs[d.cls][d.name] = spec
    return {
        "attributes": attrs,
        "entry": S.entry,
        "resources": [{"id": r, "labels": {k: _value_to_json(v)
                                           for k, v in S.labels[r].items()}}
                      for r in S.nodes],
        "edges": [{"from": a, "to": b,
                   "mode": "controlled" if pol is None
                   else {"fixed": format_target(pol, S.sig)}}
                  for (a, b), pol in sorted(S.edges.items())],
    }


def load_model(path: str) -> ResourceStructure:
    with open(path, "r", encoding="utf-8") as fh:
        return model_from_json(json.load(fh))


def save_model(S: ResourceStructure, path: str) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(model_to_json(S), fh, indent=2)
        fh.write("\n")


def edge_key(e: Edge) -> str:
    return "%s->%s" % e


def _parse_edge_key(key: str) -> Edge:
    if "->" not in key:
        raise ModelError("configuration keys look like \"from->to\", got %r" % key)
    a, _, b = key.partition("->")
    return (a.strip(), b.strip())


def config_from_json(doc: dict, S: ResourceStructure) -> Configuration:
    c: Configuration = {}
    for key, text in doc.items():
        e = _parse_edge_key(key)
        if e not in S.edges:
            raise ModelError("configuration names unknown edge %r" % key)
        if S.edges[e] is not None:
            raise ModelError("edge %r is fixed, its policy is not configurable" % key)
        c[e] = parse_target(text, S.sig)
    validate_configuration(S, c)
    return c


def config_to_json(S: ResourceStructure, c: Configuration) -> dict:
    return {edge_key(e): format_target(c[e], S.sig) for e in sorted(c)}


def load_config(path: str, S: ResourceStructure) -> Configuration:
    with open(path, "r", encoding="utf-8") as fh:
        return config_from_json(json.load(fh), S)


def save_config(S: ResourceStructure, c: Configuration, path: str) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(config_to_json(S, c), fh, indent=2)
        fh.write("\n")


# ---------------------------------------------------------------------------
# DOT export
# ---------------------------------------------------------------------------

def to_dot(S: ResourceStructure, c: Optional[Configuration] = None,
           granted: Optional[Set[Edge]] = None, title: str = "spaces") -> str:
    """Graphviz rendering. Fixed edges are dashed. When `granted` is
    given, edges outside it are drawn red (denied) and spaces the entry
    no longer reaches are greyed out."""
    lines = ["digraph \"%s\" {" % title, "  rankdir=LR;"]
    live: Optional[Set[str]] = None
    if granted is not None:
        live = {S.entry}
        stack = [S.entry]
        while stack:
            r = stack.pop()
            for (a, b) in granted:
                if a == r and b not in live and (a, b) in S.edges:
                    live.add(b)
                    stack.append(b)
    for r in S.nodes:
        opts = ["shape=doublecircle"] if r == S.entry else ["shape=circle"]
        if live is not None and r not in live:
            opts.append("color=grey")
            opts.append("fontcolor=grey")
        lines.append("  \"%s\" [%s];" % (r, ", ".join(opts)))
    for (a, b) in sorted(S.edges):
        pol = S.edges[(a, b)]
        opts = []
        if pol is not None:
            opts.append("style=dashed")
        if granted is not None and (a, b) not in granted:
            opts.append("color=red")
        label = None
        if c is not None and pol is None:
            label = format_target(c[(a, b)], S.sig)
        elif pol is not None and pol != Top():
            label = format_target(pol, S.sig)
        if label is not None:
            opts.append("label=\"%s\"" % label.replace("\"", "\\\""))
        lines.append("  \"%s\" -> \"%s\"%s;"
                     % (a, b, " [%s]" % ", ".join(opts) if opts else ""))
    lines.append("}")
    return "\n".join(lines) + "\n"
