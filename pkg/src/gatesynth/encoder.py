"""Constraint encoding of requirements over configuration templates.

encode() rewrites a requirement into a formula over *edge guards*:
placeholders for "the policy of this edge grants the request". A
template then expands each guard into its symbolic policy over control
variables, ground_forall() instantiates the request attributes with one
representative per region, and the result is a pure control-variable
formula that a solver can search for a model of.

The until rewrites unroll simple paths, tracking the set of spaces
already visited. For the existential until this is exact on every
structure. For the universal until it agrees with the checker on
structures whose restriction keeps at least one outgoing edge per
space, which is why synthesis injects the deadlock-freeness requirement
whenever a universal until appears.
"""

from __future__ import annotations

import re
import shlex
import subprocess
import tempfile
import os
from dataclasses import dataclass
from typing import Dict, FrozenSet, Iterable, List, Optional, Sequence, Set, Tuple, Union

from .formulas import (
    AU, AX, BOTTOM, BOOLEAN, ENUM, EU, EX, NUMERIC, AccessRequest, And,
    Atom, AttributeSignature, Formula, Not, Requirement, Top, Value,
    build_regions,
)
from .model import Edge, ResourceStructure


# ---------------------------------------------------------------------------
# Control formulas
# ---------------------------------------------------------------------------

class _CNode:
    """Value semantics with a hash cached at construction.

    Formulas here grow large and live in many dictionaries, so the
    default recompute-on-every-lookup hashing of frozen dataclasses
    becomes the bottleneck. Equality short-circuits on identity and on
    the cached hash before falling back to field comparison.
    """
    __slots__ = ()

    def __eq__(self, other):
        if self is other:
            return True
        if type(self) is not type(other) or self._hash != other._hash:
            return False
        return all(getattr(self, f) == getattr(other, f) for f in self._fields)

    def __ne__(self, other):
        return not self.__eq__(other)

    def __hash__(self):
        return self._hash

    def __repr__(self):
        return "%s(%s)" % (type(self).__name__,
                           ", ".join(repr(getattr(self, f)) for f in self._fields))


class CTrue(_CNode):
    __slots__ = ("_hash",)
    _fields = ()

    def __init__(self):
        self._hash = hash("ctrue")


class CFalse(_CNode):
    __slots__ = ("_hash",)
    _fields = ()

    def __init__(self):
        self._hash = hash("cfalse")


class CAtom(_CNode):
    """Membership test on a request attribute, still to be grounded."""
    __slots__ = ("attr", "values", "_hash")
    _fields = ("attr", "values")

    def __init__(self, attr: str, values: FrozenSet[Value]):
        self.attr = attr
        self.values = values
        self._hash = hash(("catom", attr, values))


class CVarEq(_CNode):
    """The control variable takes this value."""
    __slots__ = ("var", "value", "_hash")
    _fields = ("var", "value")

    def __init__(self, var: str, value: int):
        self.var = var
        self.value = value
        self._hash = hash(("cvar", var, value))


class CGuard(_CNode):
    """Placeholder: the policy of this edge grants the request."""
    __slots__ = ("edge", "_hash")
    _fields = ("edge",)

    def __init__(self, edge: Edge):
        self.edge = edge
        self._hash = hash(("cguard", edge))


class CNot(_CNode):
    __slots__ = ("sub", "_hash")
    _fields = ("sub",)

    def __init__(self, sub: "ControlFormula"):
        self.sub = sub
        self._hash = hash(("cnot", sub._hash))


class CAnd(_CNode):
    __slots__ = ("args", "_hash")
    _fields = ("args",)

    def __init__(self, args: Tuple["ControlFormula", ...]):
        self.args = args
        self._hash = hash(("cand",) + tuple(a._hash for a in args))


class COr(_CNode):
    __slots__ = ("args", "_hash")
    _fields = ("args",)

    def __init__(self, args: Tuple["ControlFormula", ...]):
        self.args = args
        self._hash = hash(("cor",) + tuple(a._hash for a in args))


class CImplies(_CNode):
    __slots__ = ("left", "right", "_hash")
    _fields = ("left", "right")

    def __init__(self, left: "ControlFormula", right: "ControlFormula"):
        self.left = left
        self.right = right
        self._hash = hash(("cimpl", left._hash, right._hash))


ControlFormula = Union[CTrue, CFalse, CAtom, CVarEq, CGuard, CNot, CAnd, COr, CImplies]


def cand(parts: Iterable[ControlFormula]) -> ControlFormula:
    out: List[ControlFormula] = []
    seen: Set[ControlFormula] = set()
    for p in parts:
        if isinstance(p, CTrue):
            continue
        if isinstance(p, CFalse):
            return CFalse()
        for item in (p.args if isinstance(p, CAnd) else (p,)):
            if item not in seen:
                seen.add(item)
                out.append(item)
    if not out:
        return CTrue()
    if len(out) == 1:
        return out[0]
    return CAnd(tuple(out))


def cor(parts: Iterable[ControlFormula]) -> ControlFormula:
    out: List[ControlFormula] = []
    seen: Set[ControlFormula] = set()
    for p in parts:
        if isinstance(p, CFalse):
            continue
        if isinstance(p, CTrue):
            return CTrue()
        for item in (p.args if isinstance(p, COr) else (p,)):
            if item not in seen:
                seen.add(item)
                out.append(item)
    if not out:
        return CFalse()
    if len(out) == 1:
        return out[0]
    return COr(tuple(out))


def cnot(f: ControlFormula) -> ControlFormula:
    if isinstance(f, CTrue):
        return CFalse()
    if isinstance(f, CFalse):
        return CTrue()
    if isinstance(f, CNot):
        return f.sub
    return CNot(f)


def cimplies(a: ControlFormula, b: ControlFormula) -> ControlFormula:
    if isinstance(a, CTrue):
        return b
    if isinstance(a, CFalse) or isinstance(b, CTrue):
        return CTrue()
    if isinstance(b, CFalse):
        return cnot(a)
    return CImplies(a, b)


def c_children(f: ControlFormula) -> Tuple[ControlFormula, ...]:
    if isinstance(f, CNot):
        return (f.sub,)
    if isinstance(f, (CAnd, COr)):
        return f.args
    if isinstance(f, CImplies):
        return (f.left, f.right)
    return ()


def c_subformulas(f: ControlFormula):
    seen: Set[ControlFormula] = set()
    stack = [(f, False)]
    while stack:
        g, expanded = stack.pop()
        if g in seen:
            continue
        if expanded:
            seen.add(g)
            yield g
        else:
            stack.append((g, True))
            for ch in c_children(g):
                stack.append((ch, False))


def formula_size(f: ControlFormula) -> int:
    """Number of distinct subterms."""
    return sum(1 for _ in c_subformulas(f))


def target_to_control(t: Formula) -> ControlFormula:
    if isinstance(t, Top):
        return CTrue()
    if isinstance(t, Atom):
        return CAtom(t.attr, t.values)
    if isinstance(t, Not):
        return cnot(target_to_control(t.sub))
    if isinstance(t, And):
        return cand([target_to_control(t.left), target_to_control(t.right)])
    raise TypeError("not a target node: %r" % (t,))


_GUARDS: Dict[Edge, CGuard] = {}


def cguard(edge: Edge) -> CGuard:
    """Guards are shared: one object per edge, so that later walks
    treat every occurrence as the same node."""
    g = _GUARDS.get(edge)
    if g is None:
        g = CGuard(edge)
        _GUARDS[edge] = g
    return g


# ---------------------------------------------------------------------------
# The rewrite
# ---------------------------------------------------------------------------

def encode(S: ResourceStructure, req: Requirement) -> ControlFormula:
    """Rewrite one requirement into a guard formula: target implies the
    constraint's encoding at the entry."""
    return cimplies(target_to_control(req.target),
                    rewrite_constraint(S, req.constraint, S.entry))


def rewrite_constraint(S: ResourceStructure, phi: Formula, start: str) -> ControlFormula:
    """Rewrite one constraint at one space into a formula over edge
    guards. Untils unroll over simple paths; repeated subproblems are
    shared, so the result is a compact DAG."""
    memo: Dict[Tuple[int, str], ControlFormula] = {}
    memo_u: Dict[Tuple[int, str, FrozenSet[str]], ControlFormula] = {}

    def resource_atom(a: Atom, r: str) -> ControlFormula:
        v = S.labels[r].get(a.attr, BOTTOM)
        return CTrue() if v in a.values else CFalse()

    def tau(f: Formula, r: str) -> ControlFormula:
        key = (id(f), r)
        got = memo.get(key)
        if got is not None:
            return got
        if isinstance(f, Top):
            out: ControlFormula = CTrue()
        elif isinstance(f, Atom):
            out = resource_atom(f, r)
        elif isinstance(f, Not):
            out = cnot(tau(f.sub, r))
        elif isinstance(f, And):
            out = cand([tau(f.left, r), tau(f.right, r)])
        elif isinstance(f, EX):
            out = cor([cand([cguard((r, s)), tau(f.sub, s)])
                       for s in S.successors(r)])
        elif isinstance(f, AX):
            out = cand([cimplies(cguard((r, s)), tau(f.sub, s))
                        for s in S.successors(r)])
        elif isinstance(f, EU):
            out = tau_eu(f, r, frozenset())
        elif isinstance(f, AU):
            out = tau_au(f, r, frozenset())
        else:
            raise TypeError("unknown formula node %r" % (f,))
        memo[key] = out
        return out

    def tau_eu(f: EU, r: str, visited: FrozenSet[str]) -> ControlFormula:
        key = (id(f), r, visited)
        got = memo_u.get(key)
        if got is not None:
            return got
        here = tau(f.right, r)
        step = cor([cand([cguard((r, s)), tau_eu(f, s, visited | {r})])
                    for s in S.successors(r) if s not in visited])
        out = cor([here, cand([tau(f.left, r), step])])
        memo_u[key] = out
        return out

    def tau_au(f: AU, r: str, visited: FrozenSet[str]) -> ControlFormula:
        key = (id(f), r, visited)
        got = memo_u.get(key)
        if got is not None:
            return got
        here = tau(f.right, r)
        fresh = [s for s in S.successors(r) if s not in visited]
        stale = [s for s in S.successors(r) if s in visited]
        all_fresh = cand([cimplies(cguard((r, s)), tau_au(f, s, visited | {r}))
                          for s in fresh])
        no_loop_back = cand([cnot(cguard((r, s))) for s in stale])
        out = cor([here, cand([tau(f.left, r), all_fresh, no_loop_back])])
        memo_u[key] = out
        return out

    return tau(phi, start)


def expand_guards(f: ControlFormula, template) -> ControlFormula:
    """Replace every edge guard by the template's symbolic policy for
    that edge (fixed edges expand to their fixed policy)."""
    memo: Dict[int, ControlFormula] = {}

    def walk(g: ControlFormula) -> ControlFormula:
        got = memo.get(id(g))
        if got is not None:
            return got
        if isinstance(g, CGuard):
            out = template.edge_policy_formula(g.edge)
        elif isinstance(g, CNot):
            out = cnot(walk(g.sub))
        elif isinstance(g, CAnd):
            out = cand([walk(a) for a in g.args])
        elif isinstance(g, COr):
            out = cor([walk(a) for a in g.args])
        elif isinstance(g, CImplies):
            out = cimplies(walk(g.left), walk(g.right))
        else:
            out = g
        memo[id(g)] = out
        return out

    return walk(f)


def collect_catoms(f: ControlFormula) -> List[CAtom]:
    out: List[CAtom] = []
    seen: Set[CAtom] = set()
    for g in c_subformulas(f):
        if isinstance(g, CAtom) and g not in seen:
            seen.add(g)
            out.append(g)
    return out


def fold_atoms(f: ControlFormula, q: AccessRequest) -> ControlFormula:
    memo: Dict[int, ControlFormula] = {}

    def walk(g: ControlFormula) -> ControlFormula:
        got = memo.get(id(g))
        if got is not None:
            return got
        if isinstance(g, CAtom):
            out: ControlFormula = CTrue() if q.get(g.attr, BOTTOM) in g.values else CFalse()
        elif isinstance(g, CNot):
            out = cnot(walk(g.sub))
        elif isinstance(g, CAnd):
            out = cand([walk(a) for a in g.args])
        elif isinstance(g, COr):
            out = cor([walk(a) for a in g.args])
        elif isinstance(g, CImplies):
            out = cimplies(walk(g.left), walk(g.right))
        else:
            out = g
        memo[id(g)] = out
        return out

    return walk(f)


def ground_forall(f: ControlFormula, sig: AttributeSignature) -> ControlFormula:
    """Universal closure over requests, by explicit instantiation. One
    instance per region of the attribute tests appearing in f; folded
    instances are deduplicated."""
    atoms = [Atom(a.attr, a.values) for a in collect_catoms(f)]
    regions = build_regions(sig, atoms)
    instances: List[ControlFormula] = []
    seen: Set[ControlFormula] = set()
    for q in regions.representatives():
        inst = fold_atoms(f, q)
        if isinstance(inst, CTrue) or inst in seen:
            continue
        if isinstance(inst, CFalse):
            return CFalse()
        seen.add(inst)
        instances.append(inst)
    return cand(instances)


def eval_formula(f: ControlFormula, q: AccessRequest, m: Dict[str, int],
                 template=None) -> bool:
    """Evaluate under a concrete request and control assignment."""
    if template is not None:
        f = expand_guards(f, template)

    def walk(g: ControlFormula) -> bool:
        if isinstance(g, CTrue):
            return True
        if isinstance(g, CFalse):
            return False
        if isinstance(g, CAtom):
            return q.get(g.attr, BOTTOM) in g.values
        if isinstance(g, CVarEq):
            return m.get(g.var, 0) == g.value
        if isinstance(g, CNot):
            return not walk(g.sub)
        if isinstance(g, CAnd):
            return all(walk(a) for a in g.args)
        if isinstance(g, COr):
            return any(walk(a) for a in g.args)
        if isinstance(g, CImplies):
            return (not walk(g.left)) or walk(g.right)
        raise TypeError("guard left unexpanded: %r" % (g,))

    return walk(f)


# ---------------------------------------------------------------------------
# Control variables and the built-in solver
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class ControlVar:
    """A finite-domain decision variable, values 0 .. size-1."""
    name: str
    size: int


ControlAssignment = Dict[str, int]


def var_bits(size: int) -> int:
    if size <= 1:
        return 0
    return (size - 1).bit_length()


class SolverError(RuntimeError):
    pass


class _Cnf:
    """Clause store with fresh-variable bookkeeping."""

    def __init__(self):
        self.n_vars = 0
        self.clauses: List[List[int]] = []

    def fresh(self) -> int:
        self.n_vars += 1
        return self.n_vars

    def add(self, clause: List[int]):
        self.clauses.append(clause)


def _infer_variables(f: ControlFormula) -> List[ControlVar]:
    sizes: Dict[str, int] = {}
    order: List[str] = []
    for g in c_subformulas(f):
        if isinstance(g, CVarEq):
            if g.var not in sizes:
                order.append(g.var)
                sizes[g.var] = 0
            sizes[g.var] = max(sizes[g.var], g.value + 1)
    return [ControlVar(v, max(sizes[v], 2)) for v in sorted(order)]


def sat_solve(f: ControlFormula,
              variables: Optional[Sequence[ControlVar]] = None) -> Optional[ControlAssignment]:
    """Complete search for a satisfying control assignment, or None.

    Control variables are binary-encoded; the search branches on their
    bits in declaration order, trying 0 before 1, so the returned model
    is deterministic: the numerically least satisfying assignment.
    Conflict clauses are learned along the way, which prunes refuted
    regions without ever skipping a model, so the answer is the same one
    plain chronological search would find. Definitional variables
    introduced for subformulas are never branched on: once every control
    bit has a value they are forced by propagation.
    """
    if variables is None:
        variables = _infer_variables(f)
    cnf = _Cnf()
    true_lit = cnf.fresh()
    cnf.add([true_lit])

    bit_ids: Dict[Tuple[str, int], int] = {}
    decision: List[int] = []
    for v in variables:
        b = var_bits(v.size)
        for i in range(b):
            lit = cnf.fresh()
            bit_ids[(v.name, i)] = lit
            decision.append(lit)
        for code in range(v.size, 1 << b):
            cnf.add([-bit_ids[(v.name, i)] if (code >> i) & 1 else bit_ids[(v.name, i)]
                     for i in range(b)])

    def eq_literals(var: str, size: int, value: int) -> List[int]:
        if value >= size:
            return []
        b = var_bits(size)
        return [bit_ids[(var, i)] if (value >> i) & 1 else -bit_ids[(var, i)]
                for i in range(b)]

    sizes = {v.name: v.size for v in variables}
    memo: Dict[ControlFormula, int] = {}
    id_memo: Dict[int, int] = {}

    def define_and(lits: List[int]) -> int:
        if not lits:
            return true_lit
        if len(lits) == 1:
            return lits[0]
        x = cnf.fresh()
        for lit in lits:
            cnf.add([-x, lit])
        cnf.add([x] + [-lit for lit in lits])
        return x

    def define_or(lits: List[int]) -> int:
        if not lits:
            return -true_lit
        if len(lits) == 1:
            return lits[0]
        x = cnf.fresh()
        for lit in lits:
            cnf.add([x, -lit])
        cnf.add([-x] + lits)
        return x

    def lit_of(g: ControlFormula) -> int:
        got = id_memo.get(id(g))
        if got is not None:
            return got
        got = memo.get(g)
        if got is not None:
            id_memo[id(g)] = got
            return got
        if isinstance(g, CTrue):
            out = true_lit
        elif isinstance(g, CFalse):
            out = -true_lit
        elif isinstance(g, CVarEq):
            if g.var not in sizes:
                raise SolverError("formula mentions undeclared control variable %r" % g.var)
            lits = eq_literals(g.var, sizes[g.var], g.value)
            if g.value >= sizes[g.var]:
                out = -true_lit
            else:
                out = define_and(lits)
        elif isinstance(g, CNot):
            out = -lit_of(g.sub)
        elif isinstance(g, CAnd):
            out = define_and([lit_of(a) for a in g.args])
        elif isinstance(g, COr):
            out = define_or([lit_of(a) for a in g.args])
        elif isinstance(g, CImplies):
            out = define_or([-lit_of(g.left), lit_of(g.right)])
        else:
            raise SolverError("cannot solve over unexpanded node %r" % (g,))
        memo[g] = out
        id_memo[id(g)] = out
        return out

    cnf.add([lit_of(f)])

    model = _dpll(cnf, decision)
    if model is None:
        return None
    out: ControlAssignment = {}
    for v in variables:
        b = var_bits(v.size)
        val = 0
        for i in range(b):
            if model[bit_ids[(v.name, i)]]:
                val |= 1 << i
        out[v.name] = val
    return out


def _dpll(cnf: _Cnf, decision: List[int]) -> Optional[Dict[int, bool]]:
    n = cnf.n_vars
    assign: List[Optional[bool]] = [None] * (n + 1)
    reason: List[Optional[int]] = [None] * (n + 1)
    level: List[int] = [0] * (n + 1)
    watches: Dict[int, List[int]] = {}
    clauses = [list(cl) for cl in cnf.clauses]

    def watch(lit: int, ci: int):
        watches.setdefault(lit, []).append(ci)

    for idx, cl in enumerate(clauses):
        if not cl:
            return None
        if len(cl) >= 2:
            watch(cl[0], idx)
            watch(cl[1], idx)

    trail: List[int] = []            # literals in assignment order
    trail_lim: List[int] = []        # trail length at each decision level
    qhead = 0

    def value(lit: int) -> Optional[bool]:
        v = assign[abs(lit)]
        if v is None:
            return None
        return v if lit > 0 else not v

    def enqueue(lit: int, why: Optional[int]) -> bool:
        v = value(lit)
        if v is not None:
            return v
        var = abs(lit)
        assign[var] = lit > 0
        reason[var] = why
        level[var] = len(trail_lim)
        trail.append(lit)
        return True

    def propagate() -> Optional[int]:
        """Exhaust unit propagation; return a falsified clause index, if any."""
        nonlocal qhead
        while qhead < len(trail):
            lit = trail[qhead]
            qhead += 1
            falsified = -lit
            watching = watches.get(falsified)
            if not watching:
                continue
            i = 0
            while i < len(watching):
                ci = watching[i]
                cl = clauses[ci]
                # make sure falsified is at position 1
                if cl[0] == falsified:
                    cl[0], cl[1] = cl[1], cl[0]
                if value(cl[0]) is True:
                    i += 1
                    continue
                found = False
                for j in range(2, len(cl)):
                    if value(cl[j]) is not False:
                        cl[1], cl[j] = cl[j], cl[1]
                        watch(cl[1], ci)
                        watching[i] = watching[-1]
                        watching.pop()
                        found = True
                        break
                if found:
                    continue
                if value(cl[0]) is False:
                    return ci
                enqueue(cl[0], ci)
                i += 1
        return None

    def analyze(confl: int) -> Tuple[List[int], int]:
        """Resolve the conflict back to its first unique implication
        point; returns the learned clause (asserting literal first) and
        the level to jump back to."""
        seen = bytearray(n + 1)
        learned: List[int] = []
        counter = 0
        p: Optional[int] = None
        idx = len(trail) - 1
        cur = len(trail_lim)
        while True:
            for q in clauses[confl]:
                if p is not None and q == p:
                    continue
                var = abs(q)
                if not seen[var] and level[var] > 0:
                    seen[var] = 1
                    if level[var] >= cur:
                        counter += 1
                    else:
                        learned.append(q)
            while not seen[abs(trail[idx])]:
                idx -= 1
            p = trail[idx]
            var = abs(p)
            seen[var] = 0
            counter -= 1
            idx -= 1
            if counter == 0:
                learned.insert(0, -p)
                break
            confl = reason[var]
        if len(learned) == 1:
            back = 0
        else:
            back = max(level[abs(q)] for q in learned[1:])
            # keep a watch on the backjump level
            for j in range(1, len(learned)):
                if level[abs(learned[j])] == back:
                    learned[1], learned[j] = learned[j], learned[1]
                    break
        return learned, back

    def cancel_until(lvl: int):
        nonlocal qhead
        while len(trail_lim) > lvl:
            mark = trail_lim.pop()
            while len(trail) > mark:
                var = abs(trail.pop())
                assign[var] = None
                reason[var] = None
        qhead = len(trail)

    for idx, cl in enumerate(clauses):
        if len(cl) == 1 and not enqueue(cl[0], idx):
            return None

    di = 0
    while True:
        confl = propagate()
        if confl is not None:
            if not trail_lim:
                return None
            learned, back = analyze(confl)
            cancel_until(back)
            ci = len(clauses)
            clauses.append(learned)
            if len(learned) >= 2:
                watch(learned[0], ci)
                watch(learned[1], ci)
            if not enqueue(learned[0], ci):
                return None
            di = 0
            continue
        while di < len(decision) and assign[abs(decision[di])] is not None:
            di += 1
        if di >= len(decision):
            result = {v: bool(assign[v]) for v in range(1, n + 1) if assign[v] is not None}
            for v in range(1, n + 1):
                result.setdefault(v, False)
            return result
        trail_lim.append(len(trail))
        enqueue(-decision[di], None)  # try 0 first


# ---------------------------------------------------------------------------
# SMT-LIB emission and external solvers
# ---------------------------------------------------------------------------

def _sexp_control(f: ControlFormula) -> str:
    if isinstance(f, CTrue):
        return "true"
    if isinstance(f, CFalse):
        return "false"
    if isinstance(f, CVarEq):
        return "(= %s %d)" % (f.var, f.value)
    if isinstance(f, CNot):
        return "(not %s)" % _sexp_control(f.sub)
    if isinstance(f, CAnd):
        return "(and %s)" % " ".join(_sexp_control(a) for a in f.args)
    if isinstance(f, COr):
        return "(or %s)" % " ".join(_sexp_control(a) for a in f.args)
    if isinstance(f, CImplies):
        return "(=> %s %s)" % (_sexp_control(f.left), _sexp_control(f.right))
    raise ValueError("cannot emit node %r in a grounded script" % (f,))


def _int_ranges(values: Iterable[int]) -> List[Tuple[int, int]]:
    nums = sorted(values)
    out: List[Tuple[int, int]] = []
    for n in nums:
        if out and n == out[-1][1] + 1:
            out[-1] = (out[-1][0], n)
        else:
            out.append((n, n))
    return out


class _QuantifiedEmitter:
    def __init__(self, sig: AttributeSignature):
        self.sig = sig

    def sort_name(self, attr: str) -> str:
        return "S_" + attr

    def ctor(self, attr: str, v: Value) -> str:
        if v is BOTTOM:
            return "%s_unset" % attr
        if v is True:
            return "%s_true" % attr
        if v is False:
            return "%s_false" % attr
        return "%s_%s" % (attr, v)

    def declarations(self, attrs: List[str]) -> List[str]:
        lines = []
        for name in attrs:
            decl = self.sig.get(name)
            if decl.kind == NUMERIC:
                continue
            if decl.kind == BOOLEAN:
                ctors = [self.ctor(name, BOTTOM), self.ctor(name, False), self.ctor(name, True)]
            else:
                ctors = [self.ctor(name, BOTTOM)] + [self.ctor(name, s) for s in decl.symbols]
            lines.append("(declare-datatype %s (%s))"
                         % (self.sort_name(name), " ".join("(%s)" % c for c in ctors)))
        return lines

    def binders(self, attrs: List[str]) -> List[str]:
        out = []
        for name in attrs:
            decl = self.sig.get(name)
            if decl.kind == NUMERIC:
                out.append("(%s_known Bool)" % name)
                out.append("(%s_value Int)" % name)
            else:
                out.append("(%s %s)" % (name, self.sort_name(name)))
        return out

    def atom(self, a: CAtom) -> str:
        decl = self.sig.get(a.attr)
        if decl.kind == NUMERIC:
            parts = []
            if BOTTOM in a.values:
                parts.append("(not %s_known)" % a.attr)
            ints = [v for v in a.values if isinstance(v, int)]
            for lo, hi in _int_ranges(ints):
                if lo == hi:
                    bound = "(= %s_value %d)" % (a.attr, lo)
                else:
                    bound = "(and (<= %d %s_value) (<= %s_value %d))" % (lo, a.attr, a.attr, hi)
                parts.append("(and %s_known %s)" % (a.attr, bound))
            if not parts:
                return "false"
            if len(parts) == 1:
                return parts[0]
            return "(or %s)" % " ".join(parts)
        if not a.values:
            return "false"
        tests = ["(= %s %s)" % (a.attr, self.ctor(a.attr, v)) for v in sorted(a.values, key=str)]
        if len(tests) == 1:
            return tests[0]
        return "(or %s)" % " ".join(tests)

    def body(self, f: ControlFormula) -> str:
        if isinstance(f, CAtom):
            return self.atom(f)
        if isinstance(f, CNot):
            return "(not %s)" % self.body(f.sub)
        if isinstance(f, CAnd):
            return "(and %s)" % " ".join(self.body(a) for a in f.args)
        if isinstance(f, COr):
            return "(or %s)" % " ".join(self.body(a) for a in f.args)
        if isinstance(f, CImplies):
            return "(=> %s %s)" % (self.body(f.left), self.body(f.right))
        return _sexp_control(f)


def emit_smtlib(f: ControlFormula,
                variables: Sequence[ControlVar],
                sig: Optional[AttributeSignature] = None,
                quantified: bool = False) -> str:
    """Render a satisfiability script for the control formula.

    Grounded form (default): f must be free of attribute tests; control
    variables become bounded Int constants. Quantified form: attribute
    tests stay symbolic, each finite attribute becomes a dedicated sort
    with an explicit constructor for the unset value, numeric attributes
    become a known-flag plus an Int, and the whole body is wrapped in a
    universal quantifier over one request.
    """
    lines = ["(set-option :produce-models true)"]
    for v in variables:
        lines.append("(declare-const %s Int)" % v.name)
        lines.append("(assert (and (<= 0 %s) (< %s %d)))" % (v.name, v.name, v.size))
    if quantified:
        if sig is None:
            raise ValueError("quantified emission needs the attribute signature")
        emitter = _QuantifiedEmitter(sig)
        attrs = [d.name for d in sig.request_attrs()]
        lines.extend(emitter.declarations(attrs))
        binders = emitter.binders(attrs)
        guards = ["(<= 0 %s_value)" % d.name
                  for d in sig.request_attrs() if d.kind == NUMERIC]
        body = emitter.body(f)
        if guards:
            body = "(=> (and %s) %s)" % (" ".join(guards), body) if len(guards) > 1 \
                else "(=> %s %s)" % (guards[0], body)
        if binders:
            lines.append("(assert (forall (%s) %s))" % (" ".join(binders), body))
        else:
            lines.append("(assert %s)" % body)
    else:
        lines.append("(assert %s)" % _sexp_control(f))
    lines.append("(check-sat)")
    if variables:
        lines.append("(get-value (%s))" % " ".join(v.name for v in variables))
    return "\n".join(lines) + "\n"


def _tokenize_sexp(text: str) -> List[str]:
    return re.findall(r"\(|\)|[^\s()]+", text)


def _parse_sexp(tokens: List[str], pos: int):
    if tokens[pos] == "(":
        items = []
        pos += 1
        while pos < len(tokens) and tokens[pos] != ")":
            item, pos = _parse_sexp(tokens, pos)
            items.append(item)
        return items, pos + 1
    return tokens[pos], pos + 1


def _value_from_sexp(v) -> int:
    if isinstance(v, list):
        if len(v) == 2 and v[0] == "-":
            return -_value_from_sexp(v[1])
        raise SolverError("unexpected model value %r" % (v,))
    if v == "true":
        return 1
    if v == "false":
        return 0
    try:
        return int(v)
    except ValueError:
        raise SolverError("unexpected model value %r" % (v,))


def run_external(script: str, command: str,
                 timeout: Optional[float] = None
                 ) -> Tuple[str, Optional[ControlAssignment]]:
    """Run an SMT-LIB script through an external solver.

    The command is split shell-style and invoked with the script path
    appended. Returns the verdict ('sat' or 'unsat') and, when sat and
    the script requested values, the control assignment. An 'unknown'
    verdict, a timeout, or unparseable output raises SolverError.
    """
    argv = shlex.split(command)
    if not argv:
        raise SolverError("empty solver command")
    fd, path = tempfile.mkstemp(suffix=".smt2", prefix="gatesynth_")
    try:
        with os.fdopen(fd, "w") as fh:
            fh.write(script)
        try:
            proc = subprocess.run(argv + [path], capture_output=True,
                                  text=True, timeout=timeout)
        except subprocess.TimeoutExpired:
            raise SolverError("solver timed out after %ss" % timeout)
        except OSError as exc:
            raise SolverError("could not run solver: %s" % exc)
        out = proc.stdout
        verdict = None
        rest_lines = []
        for line in out.splitlines():
            line = line.strip()
            if not line:
                continue
            if verdict is None and line in ("sat", "unsat", "unknown"):
                verdict = line
                continue
            rest_lines.append(line)
        if verdict is None:
            raise SolverError("no verdict in solver output: %r / %r"
                              % (out[:500], proc.stderr[:500]))
        if verdict == "unknown":
            raise SolverError("solver returned unknown")
        if verdict == "unsat":
            return "unsat", None
        rest = " ".join(rest_lines)
        if not rest.strip():
            return "sat", None
        tokens = _tokenize_sexp(rest)
        parsed, _ = _parse_sexp(tokens, 0)
        model: ControlAssignment = {}
        for pair in parsed:
            if isinstance(pair, list) and len(pair) == 2 and isinstance(pair[0], str):
                model[pair[0]] = _value_from_sexp(pair[1])
        return "sat", model
    finally:
        os.unlink(path)
