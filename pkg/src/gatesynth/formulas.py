"""Core formula ASTs, attribute signatures, and the region construction.

Two formula classes share one node set:

* a *target* describes who a rule applies to: a Boolean combination of
  membership tests over subject and contextual attributes;
* an *access constraint* is a branching-time formula over resource
  attributes, interpreted on the graph of spaces (EX, AX, E-until,
  A-until plus negation and conjunction).

Edge policies are targets as well, so everything the synthesizer
manipulates bottoms out in the same Atom node.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Dict, FrozenSet, Iterable, Iterator, List, Optional, Sequence, Tuple, Union


class _Bottom:
    """The "attribute not supplied" value. A single instance is used."""

    _instance = None

    def __new__(cls):
        if cls._instance is None:
            cls._instance = super().__new__(cls)
        return cls._instance

    def __repr__(self):
        return "bot"

    def __deepcopy__(self, memo):
        return self

    def __copy__(self):
        return self


BOTTOM = _Bottom()

Value = Union[bool, int, str, _Bottom]
AccessRequest = Dict[str, Value]

SUBJECT = "subject"
CONTEXTUAL = "contextual"
RESOURCE = "resource"

BOOLEAN = "boolean"
NUMERIC = "numeric"
ENUM = "enum"


def value_key(v: Value):
    """Sort key that totally orders mixed attribute values."""
    if v is BOTTOM:
        return (0, "")
    if isinstance(v, bool):
        return (1, int(v))
    if isinstance(v, int):
        return (2, v)
    return (3, v)


def format_value(v: Value) -> str:
    if v is BOTTOM:
        return "bot"
    if isinstance(v, bool):
        return "true" if v else "false"
    return str(v)


@dataclass(frozen=True)
class AttributeDecl:
    name: str
    cls: str          # subject | contextual | resource
    kind: str         # boolean | numeric | enum
    symbols: Tuple[str, ...] = ()   # enum only, bottom excluded

    def admits(self, v: Value) -> bool:
        if v is BOTTOM:
            return True
        if self.kind == BOOLEAN:
            return isinstance(v, bool)
        if self.kind == NUMERIC:
            return isinstance(v, int) and not isinstance(v, bool) and v >= 0
        return isinstance(v, str) and v in self.symbols


class AttributeSignature:
    """Declared attributes, in declaration order.

    Declaration order matters: region products, control-variable
    ordering and therefore every deterministic output of the toolkit
    follow it.
    """

    def __init__(self, decls: Iterable[AttributeDecl]):
        self._decls: Dict[str, AttributeDecl] = {}
        for d in decls:
            if d.name in self._decls:
                raise ValueError("duplicate attribute %r" % d.name)
            if d.cls not in (SUBJECT, CONTEXTUAL, RESOURCE):
                raise ValueError("bad attribute class %r" % d.cls)
            if d.kind not in (BOOLEAN, NUMERIC, ENUM):
                raise ValueError("bad attribute kind %r" % d.kind)
            if d.kind == ENUM and not d.symbols:
                raise ValueError("enum attribute %r declares no symbols" % d.name)
            self._decls[d.name] = d

    def __contains__(self, name: str) -> bool:
        return name in self._decls

    def __iter__(self) -> Iterator[AttributeDecl]:
        return iter(self._decls.values())

    def get(self, name: str) -> AttributeDecl:
        try:
            return self._decls[name]
        except KeyError:
            raise KeyError("unknown attribute %r" % name) from None

    def request_attrs(self) -> List[AttributeDecl]:
        return [d for d in self._decls.values() if d.cls in (SUBJECT, CONTEXTUAL)]

    def resource_attrs(self) -> List[AttributeDecl]:
        return [d for d in self._decls.values() if d.cls == RESOURCE]

    def blank_request(self) -> AccessRequest:
        return {d.name: BOTTOM for d in self.request_attrs()}

    def validate_request(self, q: AccessRequest) -> AccessRequest:
        """Fill in unset attributes with bottom and type-check the rest."""
        out: AccessRequest = {}
        for d in self.request_attrs():
            v = q.get(d.name, BOTTOM)
            if not d.admits(v):
                raise ValueError("value %r not admissible for attribute %r" % (v, d.name))
            out[d.name] = v
        for k in q:
            if k not in self._decls or self._decls[k].cls == RESOURCE:
                raise ValueError("request sets unknown or resource attribute %r" % k)
        return out


# ---------------------------------------------------------------------------
# Formula nodes
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class Top:
    """The formula that always holds."""


@dataclass(frozen=True)
class Atom:
    """Membership test: the named attribute's value lies in `values`."""
    attr: str
    values: FrozenSet[Value]

    def __post_init__(self):
        if not isinstance(self.values, frozenset):
            object.__setattr__(self, "values", frozenset(self.values))


@dataclass(frozen=True)
class Not:
    sub: "Formula"


@dataclass(frozen=True)
class And:
    left: "Formula"
    right: "Formula"


@dataclass(frozen=True)
class EX:
    """Some immediate successor satisfies the body."""
    sub: "Formula"


@dataclass(frozen=True)
class AX:
    """Every immediate successor satisfies the body (vacuous without successors)."""
    sub: "Formula"


@dataclass(frozen=True)
class EU:
    """Some path reaches `right`, with `left` holding along the way."""
    left: "Formula"
    right: "Formula"


@dataclass(frozen=True)
class AU:
    """Every maximal path reaches `right`, with `left` holding along the way."""
    left: "Formula"
    right: "Formula"


Formula = Union[Top, Atom, Not, And, EX, AX, EU, AU]
Target = Formula  # restricted by validate_target

TEMPORAL_NODES = (EX, AX, EU, AU)


def conj(parts: Sequence[Formula]) -> Formula:
    """Left-associated conjunction; the empty conjunction is Top."""
    parts = list(parts)
    if not parts:
        return Top()
    out = parts[0]
    for p in parts[1:]:
        out = And(out, p)
    return out


def neg(f: Formula) -> Formula:
    return Not(f)


def disj(a: Formula, b: Formula) -> Formula:
    """a or b, expressed through negation and conjunction."""
    return Not(And(Not(a), Not(b)))


def implies(a: Formula, b: Formula) -> Formula:
    """a -> b, expressed through negation and conjunction."""
    return Not(And(a, Not(b)))


def falsum() -> Formula:
    return Not(Top())


# Derived temporal forms.

def EF(f: Formula) -> Formula:
    return EU(Top(), f)


def AG(f: Formula) -> Formula:
    return Not(EU(Top(), Not(f)))


def release(a: Formula, b: Formula) -> Formula:
    """A[a R b] in its literal dual form."""
    return Not(EU(Not(a), Not(b)))


# Requirement patterns. Each returns the compiled access constraint; the
# polarity that goes with the pattern is listed alongside.

POSITIVE = "positive"
NEGATIVE = "negative"
UNKNOWN = "unknown"


def grant(goal: Formula) -> Formula:
    """Some sequence of granted edges reaches a space satisfying `goal`."""
    return EF(goal)


def deny(goal: Formula) -> Formula:
    """No sequence of granted edges reaches a space satisfying `goal`."""
    return Not(EF(goal))


def blocking(first: Formula, then: Formula) -> Formula:
    """After visiting a `first` space, no `then` space is reachable."""
    return Not(EF(And(first, EF(then))))


def waypoint(via: Formula, goal: Formula) -> Formula:
    """Every way of reaching `goal` passes through a `via` space first.

    Compiled as: there is no path that stays outside `via` and hits a
    `goal` space that is itself not a `via` space.
    """
    return Not(EU(Not(via), And(goal, Not(via))))


def deadlock_free_constraint() -> Formula:
    """Every space the subject can actually enter has a granted way onward.

    The entry itself is exempt: a subject standing in the public entry
    with nowhere to go is not trapped, it simply was not admitted.
    """
    return AX(AG(EX(Top())))


def strict_deadlock_free_constraint() -> Formula:
    """Every reachable space, including the entry, has a way onward."""
    return AG(EX(Top()))


def is_deadlock_freeness(f: Formula) -> bool:
    return f == deadlock_free_constraint() or f == strict_deadlock_free_constraint()


@dataclass(frozen=True)
class Requirement:
    """A global rule: for requests matching `target`, `constraint` must
    hold at the entry of the induced structure."""
    target: Target
    constraint: Formula
    polarity: str = UNKNOWN
    source: Optional[str] = field(default=None, compare=False)

    def __post_init__(self):
        if self.polarity not in (POSITIVE, NEGATIVE, UNKNOWN):
            raise ValueError("bad polarity %r" % self.polarity)


# ---------------------------------------------------------------------------
# Structural helpers
# ---------------------------------------------------------------------------

def children(f: Formula) -> Tuple[Formula, ...]:
    if isinstance(f, (Not, EX, AX)):
        return (f.sub,)
    if isinstance(f, (And, EU, AU)):
        return (f.left, f.right)
    return ()


def subformulas(f: Formula) -> Iterator[Formula]:
    """Postorder traversal, children before parents, duplicates skipped."""
    seen = set()

    def walk(g: Formula):
        if g in seen:
            return
        for ch in children(g):
            yield from walk(ch)
        seen.add(g)
        yield g

    yield from walk(f)


def collect_atoms(f: Formula) -> List[Atom]:
    """Distinct atoms in first-occurrence order."""
    out: List[Atom] = []
    seen = set()
    for g in subformulas(f):
        if isinstance(g, Atom) and g not in seen:
            seen.add(g)
            out.append(g)
    return out


def contains_au(f: Formula) -> bool:
    return any(isinstance(g, AU) for g in subformulas(f))


def validate_target(f: Formula, sig: AttributeSignature) -> None:
    """Reject temporal operators and resource attributes in a target."""
    for g in subformulas(f):
        if isinstance(g, TEMPORAL_NODES):
            raise ValueError("temporal operator not allowed in a target")
        if isinstance(g, Atom):
            d = sig.get(g.attr)
            if d.cls == RESOURCE:
                raise ValueError("resource attribute %r not allowed in a target" % g.attr)
            _validate_atom_values(g, d)


def validate_constraint(f: Formula, sig: AttributeSignature) -> None:
    """Access constraints test resource attributes only."""
    for g in subformulas(f):
        if isinstance(g, Atom):
            d = sig.get(g.attr)
            if d.cls != RESOURCE:
                raise ValueError(
                    "attribute %r is %s, access constraints test resource attributes"
                    % (g.attr, d.cls))
            _validate_atom_values(g, d)


def _validate_atom_values(a: Atom, d: AttributeDecl) -> None:
    for v in a.values:
        if not d.admits(v):
            raise ValueError("value %r not in the domain of %r" % (v, a.attr))


def eval_target(q: AccessRequest, f: Formula) -> bool:
    """Evaluate a target against a request. Unset attributes read as bottom."""
    if isinstance(f, Top):
        return True
    if isinstance(f, Atom):
        return q.get(f.attr, BOTTOM) in f.values
    if isinstance(f, Not):
        return not eval_target(q, f.sub)
    if isinstance(f, And):
        return eval_target(q, f.left) and eval_target(q, f.right)
    raise TypeError("not a target node: %r" % (f,))


# ---------------------------------------------------------------------------
# Regions
# ---------------------------------------------------------------------------
#
# The verification and grounding steps quantify over the finitely many
# classes of requests that the mentioned membership tests can tell
# apart, one representative per class. Per attribute:
#
#   * bottom forms its own cell as soon as the attribute is mentioned
#     anywhere (its shorthand behaviour differs from every proper
#     value, so it must be sampled separately);
#   * the declared proper values are grouped by their vector of
#     verdicts over the mentioned sets; numeric values are grouped
#     into maximal intervals with a constant verdict vector;
#   * an attribute nobody mentions contributes a single cell whose
#     representative is bottom.
#
# Representatives are canonical: bottom for the bottom cell, the
# first-declared symbol of an enumerated cell, the smallest number of a
# bounded interval, and max(mentioned)+1 for the unbounded tail.


@dataclass(frozen=True)
class Cell:
    rep: Value
    lo: Optional[int] = None     # numeric cells: inclusive bounds,
    hi: Optional[int] = None     # hi None means unbounded


class RegionSet:
    def __init__(self, sig: AttributeSignature, cells: Dict[str, List[Cell]]):
        self.sig = sig
        self.cells = cells

    def attr_cells(self, name: str) -> List[Cell]:
        return self.cells[name]

    def representatives(self) -> Iterator[AccessRequest]:
        names = [d.name for d in self.sig.request_attrs()]
        reps = [[c.rep for c in self.cells[n]] for n in names]
        for combo in itertools.product(*reps):
            yield dict(zip(names, combo))

    def count(self) -> int:
        n = 1
        for d in self.sig.request_attrs():
            n *= len(self.cells[d.name])
        return n


def _numeric_cells(sets: List[FrozenSet[Value]]) -> List[Cell]:
    mentioned = sorted({v for s in sets for v in s
                        if isinstance(v, int) and not isinstance(v, bool)})
    cells = [Cell(rep=BOTTOM)]
    if not mentioned:
        # Mentioned only through bottom or empty sets: every proper
        # number behaves the same.
        cells.append(Cell(rep=0, lo=0, hi=None))
        return cells
    breaks = sorted({0} | set(mentioned) | {m + 1 for m in mentioned})

    def signature(v: int):
        return tuple(v in s for s in sets)

    spans: List[Tuple[int, Optional[int]]] = []
    for i, b in enumerate(breaks):
        hi = breaks[i + 1] - 1 if i + 1 < len(breaks) else None
        spans.append((b, hi))
    merged: List[Tuple[int, Optional[int]]] = []
    for lo, hi in spans:
        if merged and signature(merged[-1][0]) == signature(lo):
            merged[-1] = (merged[-1][0], hi)
        else:
            merged.append((lo, hi))
    for lo, hi in merged:
        cells.append(Cell(rep=lo, lo=lo, hi=hi))
    return cells


def _finite_cells(domain: List[Value], sets: List[FrozenSet[Value]]) -> List[Cell]:
    cells = [Cell(rep=BOTTOM)]
    groups: List[Tuple[Tuple[bool, ...], Value]] = []
    for v in domain:
        sig_vec = tuple(v in s for s in sets)
        for i, (g, _) in enumerate(groups):
            if g == sig_vec:
                break
        else:
            groups.append((sig_vec, v))
    for _, rep in groups:
        cells.append(Cell(rep=rep))
    return cells


def build_regions(sig: AttributeSignature, atoms: Iterable[Atom]) -> RegionSet:
    by_attr: Dict[str, List[FrozenSet[Value]]] = {}
    for a in atoms:
        d = sig.get(a.attr)
        if d.cls == RESOURCE:
            continue
        by_attr.setdefault(a.attr, [])
        if a.values not in by_attr[a.attr]:
            by_attr[a.attr].append(a.values)
    cells: Dict[str, List[Cell]] = {}
    for d in sig.request_attrs():
        sets = by_attr.get(d.name, [])
        if not sets:
            cells[d.name] = [Cell(rep=BOTTOM)]
        elif d.kind == NUMERIC:
            cells[d.name] = _numeric_cells(sets)
        elif d.kind == BOOLEAN:
            cells[d.name] = _finite_cells([False, True], sets)
        else:
            cells[d.name] = _finite_cells(list(d.symbols), sets)
    return RegionSet(sig, cells)


def target_sat(t: Formula, sig: AttributeSignature) -> Optional[AccessRequest]:
    """A witness request satisfying the target, or None if there is none."""
    regions = build_regions(sig, collect_atoms(t))
    for q in regions.representatives():
        if eval_target(q, t):
            return q
    return None


def target_equiv(t1: Formula, t2: Formula, sig: AttributeSignature) -> bool:
    """Do two targets grant exactly the same requests?"""
    regions = build_regions(sig, collect_atoms(t1) + collect_atoms(t2))
    for q in regions.representatives():
        if eval_target(q, t1) != eval_target(q, t2):
            return False
    return True
