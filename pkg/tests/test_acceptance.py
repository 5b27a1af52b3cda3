"""End-to-end gate: ten checks, one printed verdict line each.

Each test exercises one headline behavior of the toolkit on the bundled
models at its stated budget, with all expected values spelled out.
"""

import itertools
import random
import time

from gatesynth.app import synth, verify
from gatesynth.checker import check_at, holds
from gatesynth.classic import s_cs
from gatesynth.encoder import (
    CAtom, CGuard, CAnd, CImplies, CNot, COr, CTrue, CFalse, CVarEq,
    cand, cimplies, cnot, cor, cguard, encode, eval_formula,
    rewrite_constraint,
)
from gatesynth.formulas import (
    AU, BOTTOM, EU, NEGATIVE, POSITIVE, Atom, Not, Top, build_regions,
    collect_atoms, eval_target, falsum, target_equiv,
)
from gatesynth.model import LESS_OR_EQUAL, EQUAL, compare, restrict, scale_replicate
from gatesynth.rules import parse_target
from gatesynth.templates import SingletonTemplate

from genutil import (
    comparable_configs, random_config, random_constraint, random_model,
    random_pattern_requirement, random_request,
)


def passed(n, note):
    print("criterion %d: PASS - %s" % (n, note))


def test_c01_running_example_verification(office, office_safe_reqs,
                                           office_published):
    t0 = time.perf_counter()
    report = verify(office, office_safe_reqs, office_published)
    assert report.ok, "published configuration must satisfy all requirements"

    expected_flips = {
        ("cor", "bur"): {2, 3},
        ("cor", "mr"): {0},
        ("lob", "cor"): {0, 2},
        ("out", "cor"): {3},
        ("out", "lob"): {0, 2},
    }
    for edge, want in expected_flips.items():
        mutated = dict(office_published)
        mutated[edge] = falsum()
        rep = verify(office, office_safe_reqs, mutated)
        got = {i for i, v in enumerate(rep.verdicts) if not v.ok}
        assert got == want, (edge, got)
        for i in got:
            witness = rep.verdicts[i].witness
            assert witness is not None
            req = office_safe_reqs[i]
            assert eval_target(witness, req.target)
            sub = restrict(office, mutated, witness)
            assert not check_at(sub, office.entry, req.constraint)
    elapsed = time.perf_counter() - t0
    assert elapsed < 1.0, elapsed
    passed(1, "published config verifies; every single-door lockdown is "
              "caught with a witness (%.2fs)" % elapsed)


def test_c02_running_example_synthesis(office, office_reqs):
    t0 = time.perf_counter()
    first = synth(office, office_reqs)
    second = synth(office, office_reqs)
    elapsed = time.perf_counter() - t0
    assert first.ok and second.ok
    assert first.stats["clauses_reached"] <= 3
    assert first.configuration == second.configuration, "must be deterministic"
    assert verify(office, office_reqs, first.configuration).ok
    expected = {
        ("cor", "bur"): "role = employee",
        ("cor", "mr"): "true",
        ("lob", "cor"): "true",
        ("out", "cor"): "false",
        ("out", "lob"): "true",
    }
    for e, text in expected.items():
        assert target_equiv(first.configuration[e],
                            parse_target(text, office.sig), office.sig), e
    assert elapsed < 10.0, elapsed
    passed(2, "synthesis returns the same verified configuration at k=%d "
              "twice (%.2fs)" % (first.stats["clauses_reached"], elapsed))


def test_c03_requirement_class_synthesis_worked_example(office, office_reqs):
    t0 = time.perf_counter()
    pair = [office_reqs[1], office_reqs[4]]
    config = s_cs(office, pair)
    assert config is not None
    assert holds(office, config, pair).ok

    strict = {e: Top() for e in office.controlled_edges()}
    strict[("cor", "bur")] = Atom("role", frozenset(["employee"]))
    strict[("out", "cor")] = Not(Atom("role", frozenset(["visitor"])))
    assert verify(office, pair, strict).ok
    elapsed = time.perf_counter() - t0
    assert elapsed < 5.0, elapsed
    passed(3, "requirement-class synthesis solves the visitor/secure-zone "
              "pair and the reference configuration verifies (%.2fs)" % elapsed)


def eval_control(f, granted, q):
    """Evaluate a guard formula under a kept-edge set and a request."""
    if isinstance(f, CTrue):
        return True
    if isinstance(f, CFalse):
        return False
    if isinstance(f, CGuard):
        return f.edge in granted
    if isinstance(f, CAtom):
        return q.get(f.attr, BOTTOM) in f.values
    if isinstance(f, CVarEq):
        raise AssertionError("no control variables expected here")
    if isinstance(f, CNot):
        return not eval_control(f.sub, granted, q)
    if isinstance(f, CAnd):
        return all(eval_control(a, granted, q) for a in f.args)
    if isinstance(f, COr):
        return any(eval_control(a, granted, q) for a in f.args)
    if isinstance(f, CImplies):
        return ((not eval_control(f.left, granted, q))
                or eval_control(f.right, granted, q))
    raise TypeError(f)


def test_c04_until_encoding_vectors(triangle):
    safe_until_vault = (Not(Atom("sec_zone", frozenset([True]))),
                        Atom("id", frozenset(["bur"])))
    enc_eu = rewrite_constraint(triangle, EU(*safe_until_vault), "out")
    enc_au = rewrite_constraint(triangle, AU(*safe_until_vault), "out")
    ref_eu = cor([cand([cguard(("out", "cor")), cguard(("cor", "bur"))]),
                  cguard(("out", "bur"))])
    ref_au = cimplies(cguard(("out", "cor")), cnot(cguard(("cor", "out"))))
    edges = sorted(triangle.edges)
    for mask in range(1 << len(edges)):
        kept = {e for i, e in enumerate(edges) if mask >> i & 1}
        assert eval_control(enc_eu, kept, {}) == eval_control(ref_eu, kept, {})
        assert eval_control(enc_au, kept, {}) == eval_control(ref_au, kept, {})
    passed(4, "exists-until and always-until rewrites match the reference "
              "formulas on all 32 guard assignments")


def test_c05_simplified_requirement_encodings(office, office_reqs):
    r2, r5 = office_reqs[1], office_reqs[4]
    enc2 = encode(office, r2)
    enc5 = encode(office, r5)
    vis = CAtom("role", frozenset(["visitor"]))
    emp = CAtom("role", frozenset(["employee"]))
    g = cguard
    ref2 = cimplies(vis, cor([cnot(g(("out", "cor"))), cnot(g(("cor", "mr")))]))
    ref5 = cimplies(cnot(emp), cand([
        cor([cnot(g(("out", "cor"))), cnot(g(("cor", "bur")))]),
        cor([cnot(g(("out", "lob"))), cnot(g(("lob", "cor"))),
             cnot(g(("cor", "bur")))]),
    ]))
    atoms = collect_atoms(r2.target) + collect_atoms(r5.target)
    regions = build_regions(office.sig, atoms)
    reps = list(regions.representatives())
    assert len(reps) >= 3
    edges = sorted(office.controlled_edges())
    for mask in range(1 << len(edges)):
        kept = {e for i, e in enumerate(edges) if mask >> i & 1}
        for q in reps:
            assert eval_control(enc2, kept, q) == eval_control(ref2, kept, q)
            assert eval_control(enc5, kept, q) == eval_control(ref5, kept, q)
    passed(5, "encoded waypoint and prohibition requirements are equivalent "
              "to their hand-simplified forms over %d guard sets x %d "
              "request classes" % (1 << len(edges), len(reps)))


def test_c06_encoding_matches_the_checker():
    rng = random.Random(20260817)
    t0 = time.perf_counter()
    cases = 0
    attempts = 0
    while cases < 520 and attempts < 4000:
        attempts += 1
        S = random_model(rng, rng.randint(2, 6),
                         backbone_fixed_true=rng.random() < 0.5,
                         with_numeric=True)
        config = random_config(rng, S)
        q = random_request(rng, S.sig)
        sub = restrict(S, config, q)
        if not all(sub.successors(r) for r in sub.nodes):
            continue    # the guarantee only covers deadlock-free restrictions
        phi = random_constraint(rng, S, rng.randint(1, 4))
        tpl = SingletonTemplate(S, config)
        enc = eval_formula(rewrite_constraint(S, phi, S.entry), q, {},
                           template=tpl)
        chk = check_at(sub, S.entry, phi)
        assert enc == chk, (S.nodes, config, q, phi)
        cases += 1
    elapsed = time.perf_counter() - t0
    assert cases >= 500, cases
    assert elapsed < 60.0, elapsed
    passed(6, "encoding verdict equals checker verdict on %d random "
              "deadlock-free cases (%.1fs)" % (cases, elapsed))


def test_c07_two_synthesis_algorithms_agree():
    rng = random.Random(4711)
    t0 = time.perf_counter()
    instances = 0
    sat_count = 0
    while instances < 100:
        S = random_model(rng, rng.randint(2, 5),
                         backbone_fixed_true=rng.random() < 0.5)
        reqs = [random_pattern_requirement(rng, S, target_depth=1)
                for _ in range(rng.randint(1, 2))]
        classic = s_cs(S, reqs)
        modern = synth(S, reqs, template="complete", complete_cap=65536)
        assert modern.outcome in ("configuration", "unsat")
        assert (classic is not None) == modern.ok, (S.nodes, reqs)
        if classic is not None:
            assert holds(S, classic, reqs).ok
            assert holds(S, modern.configuration, reqs).ok
            sat_count += 1
        instances += 1
    elapsed = time.perf_counter() - t0
    assert elapsed < 300.0, elapsed
    passed(7, "class-walk and constraint-encoding synthesis agree on %d "
              "instances (%d solvable, %.1fs)" % (instances, sat_count, elapsed))


def test_c08_pattern_monotonicity():
    rng = random.Random(1234)
    t0 = time.perf_counter()
    checked = 0
    while checked < 200:
        S = random_model(rng, rng.randint(2, 5))
        lo, hi = comparable_configs(rng, S)
        if checked < 20:
            assert compare(lo, hi, S.sig) in (LESS_OR_EQUAL, EQUAL)
        req = random_pattern_requirement(rng, S)
        ok_lo = holds(S, lo, [req]).ok
        ok_hi = holds(S, hi, [req]).ok
        if req.polarity == POSITIVE:
            assert not ok_lo or ok_hi, (req, lo, hi)
        else:
            assert req.polarity == NEGATIVE
            assert not ok_hi or ok_lo, (req, lo, hi)
        checked += 1
    elapsed = time.perf_counter() - t0
    passed(8, "grants survive opening doors and prohibitions survive "
              "closing them on %d ordered pairs (%.1fs)" % (checked, elapsed))


def test_c09_scale_behavior(firm, firm_reqs):
    assert len(firm.nodes) == 20
    assert len(firm.controlled_edges()) == 41
    assert len(firm_reqs) == 10
    t0 = time.perf_counter()
    res = synth(firm, firm_reqs)
    assert res.ok
    assert verify(firm, firm_reqs, res.configuration).ok
    base_elapsed = time.perf_counter() - t0
    assert base_elapsed < 120.0, base_elapsed

    big = scale_replicate(firm, 3)
    assert len(big.controlled_edges()) == 123
    t0 = time.perf_counter()
    big_res = synth(big, firm_reqs)
    assert big_res.ok
    assert verify(big, firm_reqs, big_res.configuration).ok
    big_elapsed = time.perf_counter() - t0
    assert big_elapsed < 600.0, big_elapsed
    passed(9, "20-space model solved in %.1fs, 123-door replica in %.1fs, "
              "both verified" % (base_elapsed, big_elapsed))


def test_c10_unset_attribute_shorthands(office):
    sig = office.sig
    unset_time = {"time": BOTTOM}
    assert eval_target(unset_time, parse_target("time >= 8", sig))
    assert not eval_target(unset_time, parse_target("8 <= time <= 20", sig))
    unset_role = {"role": BOTTOM}
    assert eval_target(unset_role, parse_target("role != visitor", sig))
    passed(10, "one-sided bounds and disequalities accept unset attributes, "
               "two-sided bounds reject them")
