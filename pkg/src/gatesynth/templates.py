"""Configuration templates: parametric families of per-edge policies.

A template fixes, for every controlled edge, a space of candidate
policies addressed by finite-domain control variables. Synthesis then
searches for one control assignment whose derived configuration makes
all requirements hold.

Three families are provided. A singleton template wraps one known
configuration (used to verify or to re-encode an existing policy set).
A menu template picks each edge's policy from an explicit candidate
list. A clause template builds policies as a disjunction of up to k
clauses, each a conjunction of up to k attribute tests, with equality
and disequality on finite attributes (the unset value is a first-class
candidate) and interval bounds on numeric attributes.
"""

from __future__ import annotations

from typing import Dict, List, Optional, Sequence, Tuple

from .formulas import (
    BOOLEAN, BOTTOM, ENUM, NUMERIC, And, Atom, AttributeSignature, Formula,
    Not, Requirement, Top, Value, build_regions, collect_atoms, conj, disj,
    falsum, target_equiv, validate_target,
)
from .model import Configuration, Edge, ResourceStructure
from .encoder import (
    CAtom, ControlAssignment, ControlFormula, ControlVar, CTrue, CVarEq,
    cand, cnot, cor, target_to_control, var_bits,
)


def simplify_policy(t: Formula, sig: AttributeSignature) -> Formula:
    """Equivalent but smaller form of a policy or target.

    Constant subterms are folded, duplicate conjuncts dropped, and
    membership tests on the same attribute merged. The result is
    checked to grant exactly the same requests as the input.
    """
    out = _simp(t, sig)
    assert target_equiv(t, out, sig), "simplification changed the policy"
    return out


def _full_domain(sig: AttributeSignature, attr: str) -> Optional[frozenset]:
    d = sig.get(attr)
    if d.kind == BOOLEAN:
        return frozenset([BOTTOM, False, True])
    if d.kind == ENUM:
        return frozenset([BOTTOM]) | frozenset(d.symbols)
    return None


def _simp(t: Formula, sig: AttributeSignature) -> Formula:
    if isinstance(t, Top):
        return t
    if isinstance(t, Atom):
        if not t.values:
            return falsum()
        full = _full_domain(sig, t.attr)
        if full is not None and t.values >= full:
            return Top()
        return t
    if isinstance(t, Not):
        s = _simp(t.sub, sig)
        if isinstance(s, Not):
            return s.sub
        return Not(s)
    if isinstance(t, And):
        return _simp_and(t, sig)
    raise TypeError("not a policy node: %r" % (t,))


def _flatten_and(t: Formula) -> List[Formula]:
    if isinstance(t, And):
        return _flatten_and(t.left) + _flatten_and(t.right)
    return [t]


def _simp_and(t: And, sig: AttributeSignature) -> Formula:
    parts = []
    for p in _flatten_and(t):
        s = _simp(p, sig)
        if isinstance(s, And):
            parts.extend(_flatten_and(s))
        else:
            parts.append(s)

    false = falsum()
    pos: Dict[str, frozenset] = {}
    negv: Dict[str, frozenset] = {}
    order: List[Tuple[str, object]] = []   # ('pos', attr) / ('neg', attr) / ('other', i)
    others: List[Formula] = []

    for p in parts:
        if isinstance(p, Top):
            continue
        if p == false:
            return false
        if isinstance(p, Atom):
            if p.attr in pos:
                pos[p.attr] = pos[p.attr] & p.values
            else:
                pos[p.attr] = p.values
                order.append(("pos", p.attr))
            continue
        if isinstance(p, Not) and isinstance(p.sub, Atom):
            a = p.sub
            if a.attr in negv:
                negv[a.attr] = negv[a.attr] | a.values
            else:
                negv[a.attr] = a.values
                order.append(("neg", a.attr))
            continue
        if p not in others:
            order.append(("other", len(others)))
            others.append(p)

    for attr in list(pos):
        if attr in negv:
            pos[attr] = pos[attr] - negv[attr]
            del negv[attr]

    out: List[Formula] = []
    for kind, key in order:
        if kind == "pos":
            values = pos[key]
            if not values:
                return false
            full = _full_domain(sig, key)
            if full is not None and values >= full:
                continue
            out.append(Atom(key, values))
        elif kind == "neg":
            if key not in negv:
                continue    # absorbed into the positive test
            values = negv[key]
            if not values:
                continue    # nothing excluded
            full = _full_domain(sig, key)
            if full is not None and values >= full:
                return false
            out.append(Not(Atom(key, values)))
        else:
            out.append(others[key])

    for p in out:
        if isinstance(p, Not) and p.sub in out:
            return false

    return conj(out)


# ---------------------------------------------------------------------------
# Template classes
# ---------------------------------------------------------------------------

class Template:
    """Shared behaviour: fixed edges always expand to their fixed policy."""

    def __init__(self, S: ResourceStructure):
        self.S = S

    @property
    def sig(self) -> AttributeSignature:
        return self.S.sig

    def edges(self) -> List[Edge]:
        return self.S.controlled_edges()

    def control_vars(self) -> List[ControlVar]:
        raise NotImplementedError

    def edge_policy_formula(self, e: Edge) -> ControlFormula:
        fixed = self.S.edges.get(e)
        if fixed is not None:
            return target_to_control(fixed)
        if e not in self.S.edges:
            raise KeyError("unknown edge %r" % (e,))
        return self._controlled_policy(e)

    def _controlled_policy(self, e: Edge) -> ControlFormula:
        raise NotImplementedError

    def derive(self, m: ControlAssignment) -> Configuration:
        raise NotImplementedError

    def bit_count(self) -> int:
        return sum(var_bits(v.size) for v in self.control_vars())

    def describe(self) -> Dict[str, object]:
        return {
            "kind": type(self).__name__,
            "edges": len(self.edges()),
            "control_vars": len(self.control_vars()),
            "bits": self.bit_count(),
        }


class SingletonTemplate(Template):
    """Exactly one candidate configuration."""

    def __init__(self, S: ResourceStructure, config: Configuration):
        super().__init__(S)
        self.config = dict(config)

    def control_vars(self) -> List[ControlVar]:
        return []

    def _controlled_policy(self, e: Edge) -> ControlFormula:
        return target_to_control(self.config[e])

    def derive(self, m: ControlAssignment) -> Configuration:
        return dict(self.config)


class MenuTemplate(Template):
    """Per-edge choice from an explicit list of candidate policies."""

    def __init__(self, S: ResourceStructure, menus: Dict[Edge, Sequence[Formula]]):
        super().__init__(S)
        self.menus: Dict[Edge, List[Formula]] = {}
        for i, e in enumerate(S.controlled_edges()):
            if e not in menus or not menus[e]:
                raise ValueError("menu missing for edge %s->%s" % e)
            for t in menus[e]:
                validate_target(t, S.sig)
            self.menus[e] = list(menus[e])
        self._vars = [ControlVar("choice_%d" % i, len(self.menus[e]))
                      for i, e in enumerate(S.controlled_edges())]
        self._var_of = {e: self._vars[i]
                        for i, e in enumerate(S.controlled_edges())}

    def control_vars(self) -> List[ControlVar]:
        return list(self._vars)

    def var_for(self, e: Edge) -> ControlVar:
        return self._var_of[e]

    def _controlled_policy(self, e: Edge) -> ControlFormula:
        v = self._var_of[e]
        return cor([cand([CVarEq(v.name, i), target_to_control(t)])
                    for i, t in enumerate(self.menus[e])])

    def derive(self, m: ControlAssignment) -> Configuration:
        out: Configuration = {}
        for e in self.S.controlled_edges():
            v = self._var_of[e]
            idx = m.get(v.name, 0)
            if not 0 <= idx < len(self.menus[e]):
                raise ValueError("menu index %d out of range for edge %s->%s"
                                 % (idx, e[0], e[1]))
            out[e] = self.menus[e][idx]
        return out

    def count_configurations(self) -> int:
        n = 1
        for e in self.S.controlled_edges():
            n *= len(self.menus[e])
        return n

    def describe(self) -> Dict[str, object]:
        d = super().describe()
        d["configurations"] = self.count_configurations()
        return d


class DnfTemplate(Template):
    """Policies shaped as up to k clauses of up to k attribute tests.

    A disabled clause contributes nothing; a disabled test restricts
    nothing, so an enabled clause with every test disabled is the
    always-grant policy, and a configuration with every clause disabled
    is the always-deny policy. Finite attributes are tested with = or
    != against any domain value including the unset value. Numeric
    attributes are tested with an interval: the lower bound is chosen
    from the candidate minima, the upper bound from the candidate
    maxima or unbounded. Unbounded intervals admit the unset value,
    bounded ones do not, matching how the comparison shorthands treat
    missing attributes.
    """

    def __init__(self, S: ResourceStructure, k: int,
                 numeric_bounds: Dict[str, Tuple[List[int], List[Optional[int]]]],
                 availability: Optional[Dict[Edge, List[str]]] = None):
        super().__init__(S)
        if k < 1:
            raise ValueError("clause count must be at least 1")
        self.k = k
        self.numeric_bounds = numeric_bounds
        self.available: Dict[Edge, List[str]] = {}
        request_attrs = [d.name for d in S.sig.request_attrs()]
        if not request_attrs:
            raise ValueError("clause templates need at least one request attribute")
        for e in S.controlled_edges():
            attrs = list((availability or {}).get(e, request_attrs))
            if not attrs:
                raise ValueError("edge %s->%s has no attributes available" % e)
            for a in attrs:
                if a not in request_attrs:
                    raise ValueError("unknown request attribute %r" % a)
            self.available[e] = attrs
        self._vars: List[ControlVar] = []
        self._names: Dict[Tuple, str] = {}
        self._build_vars()

    # -- variable layout ---------------------------------------------------

    def _add(self, key: Tuple, name: str, size: int) -> ControlVar:
        v = ControlVar(name, size)
        self._vars.append(v)
        self._names[key] = name
        return v

    def _value_domain(self, attr: str) -> List[Value]:
        d = self.sig.get(attr)
        if d.kind == BOOLEAN:
            return [BOTTOM, False, True]
        return [BOTTOM] + list(d.symbols)

    def _bounds(self, attr: str) -> Tuple[List[int], List[Optional[int]]]:
        lowers, uppers = self.numeric_bounds.get(attr, ([0], [None]))
        return (lowers or [0]), (uppers or [None])

    def _build_vars(self):
        for ei, e in enumerate(self.S.controlled_edges()):
            for j in range(self.k):
                self._add(("clause", ei, j), "cl_%d_%d" % (ei, j), 2)
                for t in range(self.k):
                    base = "t_%d_%d_%d" % (ei, j, t)
                    self._add(("use", ei, j, t), base + "_use", 2)
                    attrs = self.available[e]
                    self._add(("attr", ei, j, t), base + "_attr", len(attrs))
                    for a in attrs:
                        decl = self.sig.get(a)
                        if decl.kind == NUMERIC:
                            lowers, uppers = self._bounds(a)
                            self._add(("lo", ei, j, t, a), "%s_%s_lo" % (base, a), len(lowers))
                            self._add(("hi", ei, j, t, a), "%s_%s_hi" % (base, a), len(uppers))
                        else:
                            dom = self._value_domain(a)
                            self._add(("op", ei, j, t, a), "%s_%s_op" % (base, a), 2)
                            self._add(("val", ei, j, t, a), "%s_%s_val" % (base, a), len(dom))

    def control_vars(self) -> List[ControlVar]:
        return list(self._vars)

    def _name(self, *key) -> str:
        return self._names[key]

    # -- symbolic policy ---------------------------------------------------

    def _lower_formula(self, attr: str, lo: int) -> ControlFormula:
        if lo == 0:
            return CTrue()
        return cnot(CAtom(attr, frozenset(range(lo))))

    def _upper_formula(self, attr: str, hi: Optional[int]) -> ControlFormula:
        if hi is None:
            return CTrue()
        return CAtom(attr, frozenset(range(hi + 1)))

    def _test_formula(self, ei: int, j: int, t: int, attr: str) -> ControlFormula:
        decl = self.sig.get(attr)
        if decl.kind == NUMERIC:
            lowers, uppers = self._bounds(attr)
            lo_var = self._name("lo", ei, j, t, attr)
            hi_var = self._name("hi", ei, j, t, attr)
            lo_part = cor([cand([CVarEq(lo_var, i), self._lower_formula(attr, lo)])
                           for i, lo in enumerate(lowers)])
            hi_part = cor([cand([CVarEq(hi_var, i), self._upper_formula(attr, hi)])
                           for i, hi in enumerate(uppers)])
            return cand([lo_part, hi_part])
        op_var = self._name("op", ei, j, t, attr)
        val_var = self._name("val", ei, j, t, attr)
        cases = []
        for i, v in enumerate(self._value_domain(attr)):
            atom = CAtom(attr, frozenset([v]))
            cases.append(cand([CVarEq(val_var, i),
                               cor([cand([CVarEq(op_var, 0), atom]),
                                    cand([CVarEq(op_var, 1), cnot(atom)])])]))
        return cor(cases)

    def _controlled_policy(self, e: Edge) -> ControlFormula:
        ei = self.S.controlled_edges().index(e)
        clauses = []
        for j in range(self.k):
            tests = []
            for t in range(self.k):
                attrs = self.available[e]
                picked = cor([cand([CVarEq(self._name("attr", ei, j, t), ai),
                                    self._test_formula(ei, j, t, a)])
                              for ai, a in enumerate(attrs)])
                tests.append(cor([CVarEq(self._name("use", ei, j, t), 0),
                                  cand([CVarEq(self._name("use", ei, j, t), 1), picked])]))
            clauses.append(cand([CVarEq(self._name("clause", ei, j), 1)] + tests))
        return cor(clauses)

    # -- configuration extraction -------------------------------------------

    def _test_target(self, m: ControlAssignment, ei: int, j: int, t: int,
                     e: Edge) -> Optional[Formula]:
        if m.get(self._name("use", ei, j, t), 0) == 0:
            return None
        attrs = self.available[e]
        attr = attrs[m.get(self._name("attr", ei, j, t), 0)]
        decl = self.sig.get(attr)
        if decl.kind == NUMERIC:
            lowers, uppers = self._bounds(attr)
            lo = lowers[m.get(self._name("lo", ei, j, t, attr), 0)]
            hi = uppers[m.get(self._name("hi", ei, j, t, attr), 0)]
            parts: List[Formula] = []
            if lo > 0:
                parts.append(Not(Atom(attr, frozenset(range(lo)))))
            if hi is not None:
                parts.append(Atom(attr, frozenset(range(hi + 1))))
            return conj(parts)
        dom = self._value_domain(attr)
        v = dom[m.get(self._name("val", ei, j, t, attr), 0)]
        atom = Atom(attr, frozenset([v]))
        if m.get(self._name("op", ei, j, t, attr), 0) == 0:
            return atom
        return Not(atom)

    def derive(self, m: ControlAssignment) -> Configuration:
        out: Configuration = {}
        for ei, e in enumerate(self.S.controlled_edges()):
            clause_targets: List[Formula] = []
            for j in range(self.k):
                if m.get(self._name("clause", ei, j), 0) != 1:
                    continue
                tests = [self._test_target(m, ei, j, t, e) for t in range(self.k)]
                clause_targets.append(conj([x for x in tests if x is not None]))
            if not clause_targets:
                policy: Formula = falsum()
            else:
                policy = clause_targets[0]
                for ct in clause_targets[1:]:
                    policy = disj(policy, ct)
            out[e] = simplify_policy(policy, self.sig)
        return out

    def describe(self) -> Dict[str, object]:
        d = super().describe()
        d["clauses"] = self.k
        return d


def interval_candidates(sig: AttributeSignature, reqs: Sequence[Requirement]
                        ) -> Dict[str, Tuple[List[int], List[Optional[int]]]]:
    """Interval bound candidates for each numeric request attribute,
    aligned with the value regions the requirement targets distinguish."""
    atoms = []
    for r in reqs:
        atoms.extend(collect_atoms(r.target))
    regions = build_regions(sig, atoms)
    out: Dict[str, Tuple[List[int], List[Optional[int]]]] = {}
    for d in sig.request_attrs():
        if d.kind != NUMERIC:
            continue
        lowers: List[int] = []
        uppers: List[Optional[int]] = []
        for cell in regions.attr_cells(d.name):
            if cell.lo is None:
                continue
            lowers.append(cell.lo)
            if cell.hi is not None:
                uppers.append(cell.hi)
        if not lowers:
            lowers = [0]
        uppers = sorted(set(u for u in uppers if u is not None))
        uppers.append(None)
        out[d.name] = (sorted(set(lowers)), uppers)
    return out


def dnf_template(S: ResourceStructure, reqs: Sequence[Requirement], k: int,
                 availability: Optional[Dict[Edge, List[str]]] = None) -> DnfTemplate:
    return DnfTemplate(S, k, interval_candidates(S.sig, reqs), availability)
