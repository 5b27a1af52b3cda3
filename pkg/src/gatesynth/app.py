"""The synthesis driver and its companion analyses.

synth() glues the pipeline together: inject the deadlock-freeness
requirement when universal untils call for it, optionally add a
deny-by-default floor, encode the requirements over a template, ground,
solve, extract a configuration, and verify it with the independent
checker before handing it back. When a clause template family runs out
of room it escalates to the complete per-class menu, whose failure
refutes every configuration, not just the searched family.
"""

from __future__ import annotations

import random
import time
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Sequence, Set, Tuple

from .formulas import (
    AX, AccessRequest, Atom, AttributeSignature, BOTTOM, Formula, NEGATIVE,
    POSITIVE, Not, Requirement, Top, UNKNOWN, conj, contains_au,
    deadlock_free_constraint, falsum,
)
from .checker import HoldsReport, holds
from .classic import CapExceeded, complete_template
from .encoder import (
    ControlFormula, SolverError, cand, emit_smtlib, encode, expand_guards,
    formula_size, ground_forall, run_external, sat_solve,
)
from .model import (
    Configuration, Edge, ResourceStructure, granted_edges, restrict, to_dot,
)
from .templates import (
    MenuTemplate, SingletonTemplate, Template, dnf_template,
)


class SynthesisError(RuntimeError):
    pass


@dataclass
class SynthesisResult:
    outcome: str                     # "configuration" | "unsat" | "cap-exceeded"
    configuration: Optional[Configuration] = None
    report: Optional[HoldsReport] = None
    requirements: List[Requirement] = field(default_factory=list)
    exhaustive: bool = False         # an unsat verdict refutes every configuration
    message: str = ""
    stats: Dict[str, object] = field(default_factory=dict)

    @property
    def ok(self) -> bool:
        return self.outcome == "configuration"


DEADLOCK_SOURCE = "deadlock-freeness (added)"
DENY_DEFAULT_SOURCE = "deny-by-default (added)"


def effective_requirements(S: ResourceStructure, reqs: Sequence[Requirement],
                           deadlock_free: str = "auto",
                           deny_by_default: bool = False,
                           entry_label: Optional[Tuple[str, object]] = None
                           ) -> List[Requirement]:
    """The requirement list synthesis actually works against."""
    out = list(reqs)
    if deadlock_free not in ("auto", "on", "off"):
        raise ValueError("deadlock_free must be auto, on, or off")
    want_df = deadlock_free == "on" or (
        deadlock_free == "auto" and any(contains_au(r.constraint) for r in out))
    df = deadlock_free_constraint()
    already = any(isinstance(r.target, Top) and r.constraint == df for r in out)
    if want_df and not already:
        out.append(Requirement(Top(), df, NEGATIVE, source=DEADLOCK_SOURCE))
    if deny_by_default:
        out.append(deny_by_default_requirement(S, reqs, entry_label))
    return out


def deny_by_default_requirement(S: ResourceStructure, reqs: Sequence[Requirement],
                                entry_label: Optional[Tuple[str, object]] = None
                                ) -> Requirement:
    """Requests matched by no granting requirement must stay put: every
    edge the entry still grants them leads back to a space labeled like
    the entry, which no other space is, so there is none.
    """
    if entry_label is None:
        label = S.labels[S.entry]
        candidates = sorted(a for a, v in label.items()
                            if v is not BOTTOM and all(
                                S.labels[r].get(a) != v for r in S.nodes if r != S.entry))
        if not candidates:
            raise ValueError("no label attribute singles out the entry; "
                             "pass one explicitly")
        attr = candidates[0]
        value = label[attr]
    else:
        attr, value = entry_label
        if S.labels[S.entry].get(attr) != value:
            raise ValueError("entry is not labeled %s=%s" % (attr, value))
        if any(S.labels[r].get(attr) == value for r in S.nodes if r != S.entry):
            raise ValueError("%s=%s does not single out the entry" % (attr, value))
    positive_targets = []
    for r in reqs:
        if r.polarity == POSITIVE:
            positive_targets.append(r.target)
        elif r.polarity == UNKNOWN:
            raise ValueError(
                "deny-by-default needs every requirement's polarity; %r is unclassified"
                % (r.source or r,))
    target = conj([Not(t) for t in positive_targets])
    constraint = AX(Atom(attr, frozenset([value])))
    return Requirement(target, constraint, NEGATIVE, source=DENY_DEFAULT_SOURCE)


def _solve(grounded: ControlFormula, template: Template, solver: str,
           solver_cmd: Optional[str], timeout: Optional[float],
           stats: Dict[str, object]):
    variables = template.control_vars()
    if solver == "builtin":
        return sat_solve(grounded, variables)
    if solver == "external":
        if not solver_cmd:
            raise ValueError("external solving needs a solver command")
        script = emit_smtlib(grounded, variables)
        verdict, model = run_external(script, solver_cmd, timeout)
        if verdict == "unsat":
            return None
        if model is None:
            raise SolverError("solver said sat but returned no model")
        return {v.name: model.get(v.name, 0) for v in variables}
    raise ValueError("unknown solver %r" % solver)


def _attempt(S: ResourceStructure, reqs: Sequence[Requirement],
             template: Template, solver: str, solver_cmd: Optional[str],
             timeout: Optional[float], emit_smt: Optional[str],
             stats: Dict[str, object]):
    t0 = time.perf_counter()
    guard_formula = cand([encode(S, r) for r in reqs])
    expanded = expand_guards(guard_formula, template)
    t1 = time.perf_counter()
    grounded = ground_forall(expanded, S.sig)
    t2 = time.perf_counter()
    stats["encode_seconds"] = stats.get("encode_seconds", 0.0) + (t1 - t0)
    stats["ground_seconds"] = stats.get("ground_seconds", 0.0) + (t2 - t1)
    stats["guard_formula_size"] = formula_size(guard_formula)
    stats["expanded_size"] = formula_size(expanded)
    stats["grounded_size"] = formula_size(grounded)
    stats["control_vars"] = len(template.control_vars())
    stats["control_bits"] = template.bit_count()
    if emit_smt:
        with open(emit_smt, "w") as fh:
            fh.write(emit_smtlib(expanded, template.control_vars(),
                                 sig=S.sig, quantified=True))
    model = _solve(grounded, template, solver, solver_cmd, timeout, stats)
    t3 = time.perf_counter()
    stats["solve_seconds"] = stats.get("solve_seconds", 0.0) + (t3 - t2)
    return model


def synth(S: ResourceStructure, reqs: Sequence[Requirement],
          template: object = "dnf",
          max_k: int = 3,
          solver: str = "builtin",
          solver_cmd: Optional[str] = None,
          timeout: Optional[float] = None,
          deadlock_free: str = "auto",
          deny_by_default: bool = False,
          entry_label: Optional[Tuple[str, object]] = None,
          complete_cap: int = 4096,
          availability: Optional[Dict[Edge, List[str]]] = None,
          emit_smt: Optional[str] = None) -> SynthesisResult:
    """Find a configuration making every requirement hold, or report
    that none exists in the searched space.

    template may be "dnf" (clause templates of growing size, then the
    complete menu as a last resort), "complete" (the per-class menu
    directly), or a Template instance.
    """
    eff = effective_requirements(S, reqs, deadlock_free, deny_by_default,
                                 entry_label)
    stats: Dict[str, object] = {"solver": solver, "requirements": len(eff)}
    t_start = time.perf_counter()

    def finish_sat(tpl: Template, model) -> SynthesisResult:
        config = tpl.derive(model)
        report = holds(S, config, eff)
        stats["total_seconds"] = time.perf_counter() - t_start
        stats["verified_representatives"] = report.representatives
        if not report.ok:
            bad = ", ".join(str(v.requirement.source or v.index)
                            for v in report.failures())
            raise SynthesisError(
                "solver model failed independent verification (%s); "
                "this indicates an encoding gap" % bad)
        return SynthesisResult("configuration", config, report, eff,
                               stats=stats)

    def finish_unsat(exhaustive: bool, message: str) -> SynthesisResult:
        stats["total_seconds"] = time.perf_counter() - t_start
        return SynthesisResult("unsat", requirements=eff, exhaustive=exhaustive,
                               message=message, stats=stats)

    if isinstance(template, Template):
        stats["template"] = template.describe()
        model = _attempt(S, eff, template, solver, solver_cmd, timeout,
                         emit_smt, stats)
        if model is not None:
            return finish_sat(template, model)
        return finish_unsat(False, "no candidate in the given template works")

    if template == "complete":
        try:
            tpl = complete_template(S, eff, complete_cap)
        except CapExceeded as exc:
            stats["total_seconds"] = time.perf_counter() - t_start
            return SynthesisResult("cap-exceeded", requirements=eff,
                                   message=str(exc), stats=stats)
        stats["template"] = tpl.describe()
        model = _attempt(S, eff, tpl, solver, solver_cmd, timeout,
                         emit_smt, stats)
        if model is not None:
            return finish_sat(tpl, model)
        return finish_unsat(True, "no configuration at all can satisfy these requirements")

    if template != "dnf":
        raise ValueError("template must be 'dnf', 'complete', or a Template")

    for k in range(1, max_k + 1):
        tpl = dnf_template(S, eff, k, availability)
        stats["template"] = tpl.describe()
        stats["clauses_reached"] = k
        model = _attempt(S, eff, tpl, solver, solver_cmd, timeout,
                         emit_smt, stats)
        if model is not None:
            return finish_sat(tpl, model)

    try:
        tpl = complete_template(S, eff, complete_cap)
    except CapExceeded as exc:
        return finish_unsat(False,
                            "no clause policy with up to %d clauses works, and the "
                            "complete menu is out of reach (%s)" % (max_k, exc))
    stats["template"] = tpl.describe()
    model = _attempt(S, eff, tpl, solver, solver_cmd, timeout, emit_smt, stats)
    if model is not None:
        return finish_sat(tpl, model)
    return finish_unsat(True, "no configuration at all can satisfy these requirements")


def verify(S: ResourceStructure, reqs: Sequence[Requirement],
           config: Configuration, deadlock_free: str = "off") -> HoldsReport:
    """Check a configuration against the requirements, optionally with
    the deadlock-freeness requirement appended."""
    eff = effective_requirements(S, reqs, deadlock_free)
    return holds(S, config, eff)


# ---------------------------------------------------------------------------
# Polarity classification
# ---------------------------------------------------------------------------

@dataclass
class PolarityReport:
    requirement: Requirement
    declared: str
    final: str
    checked_pairs: int
    counterexample: Optional[Tuple[Configuration, Configuration]] = None


def _policy_lattice(t: Formula) -> List[List[Formula]]:
    """Chains of policies ordered by how much they grant."""
    return [[falsum(), t, Top()], [falsum(), Not(t), Top()]]


def classify(S: ResourceStructure, req: Requirement, samples: int = 24,
             seed: int = 0) -> PolarityReport:
    """Spot-check the declared polarity against its semantic meaning.

    Positive means opening more edges never breaks the requirement;
    negative means closing more edges never does. Random comparable
    configuration pairs are drawn and both checked; any violation
    downgrades the verdict to unknown.
    """
    declared = req.polarity
    if declared == UNKNOWN:
        return PolarityReport(req, declared, UNKNOWN, 0)
    rng = random.Random(seed)
    edges = S.controlled_edges()
    chains = _policy_lattice(req.target)
    checked = 0

    def outcome(c: Configuration) -> bool:
        return holds(S, c, [req]).ok

    pairs = [({e: falsum() for e in edges}, {e: Top() for e in edges})]
    for _ in range(samples):
        smaller: Configuration = {}
        larger: Configuration = {}
        for e in edges:
            chain = chains[rng.randrange(len(chains))]
            i = rng.randrange(len(chain))
            j = rng.randrange(i, len(chain))
            smaller[e] = chain[i]
            larger[e] = chain[j]
        pairs.append((smaller, larger))

    for smaller, larger in pairs:
        checked += 1
        ok_small = outcome(smaller)
        ok_large = outcome(larger)
        if declared == POSITIVE and ok_small and not ok_large:
            return PolarityReport(req, declared, UNKNOWN, checked,
                                  (smaller, larger))
        if declared == NEGATIVE and ok_large and not ok_small:
            return PolarityReport(req, declared, UNKNOWN, checked,
                                  (smaller, larger))
    return PolarityReport(req, declared, declared, checked)


# ---------------------------------------------------------------------------
# Simulation and conflict search
# ---------------------------------------------------------------------------

@dataclass
class SimulationReport:
    request: AccessRequest
    granted: Set[Edge]
    denied: Set[Edge]
    reachable: List[str]
    stranded: List[str]
    dot: str


def simulate(S: ResourceStructure, config: Configuration,
             q: AccessRequest) -> SimulationReport:
    """Where can this request actually go under this configuration?"""
    granted = granted_edges(S, config, q)
    denied = set(S.edges) - granted
    sub = restrict(S, config, q)
    reachable = sorted(sub.reachable())
    stranded = [r for r in S.nodes if r not in reachable]
    dot = to_dot(S, config, granted=granted,
                 title="request " + ", ".join("%s=%s" % (a, q[a]) for a in sorted(q)))
    return SimulationReport(dict(q), granted, denied, reachable, stranded, dot)


def minimal_conflict(S: ResourceStructure, reqs: Sequence[Requirement],
                     **synth_kwargs) -> Optional[Tuple[int, SynthesisResult]]:
    """Shortest prefix of the requirement list that is already
    unsatisfiable: returns (index of the offending addition, its
    result), or None when the full list is satisfiable.

    The prefix grows one requirement at a time, so the reported index
    is the first requirement that cannot coexist with everything before
    it under the searched templates.
    """
    for end in range(1, len(reqs) + 1):
        result = synth(S, reqs[:end], **synth_kwargs)
        if result.outcome != "configuration":
            return end - 1, result
    return None
