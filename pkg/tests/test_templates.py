import itertools
import random

import pytest

from gatesynth.encoder import CTrue, CVarEq, eval_formula
from gatesynth.formulas import (
    BOTTOM, And, Atom, Not, Top, conj, disj, eval_target, falsum,
    target_equiv,
)
from gatesynth.templates import (
    DnfTemplate, MenuTemplate, SingletonTemplate, dnf_template,
    interval_candidates, simplify_policy,
)
from gatesynth.rules import parse_target


def vis():
    return Atom("role", frozenset(["visitor"]))


def emp():
    return Atom("role", frozenset(["employee"]))


def office_requests(office):
    """A grid that covers every value class the office templates can
    tell apart (interval bounds included)."""
    qs = []
    for role in [BOTTOM, "visitor", "employee"]:
        for time in [BOTTOM, 0, 7, 8, 20, 21, 30]:
            for pin in [BOTTOM, False, True]:
                qs.append({"role": role, "time": time, "correct_pin": pin})
    return qs


def test_simplify_constants(office):
    sig = office.sig
    assert simplify_policy(Atom("role", frozenset()), sig) == falsum()
    assert simplify_policy(
        Atom("correct_pin", frozenset([BOTTOM, False, True])), sig) == Top()
    assert simplify_policy(
        Atom("role", frozenset([BOTTOM, "visitor", "employee"])), sig) == Top()
    assert simplify_policy(Not(Not(vis())), sig) == vis()
    # numeric attributes have no finite full domain to detect
    five = Atom("time", frozenset(range(6)))
    assert simplify_policy(five, sig) == five


def test_simplify_merges_membership_tests(office):
    sig = office.sig
    both = Atom("role", frozenset(["visitor", "employee"]))
    assert simplify_policy(And(both, vis()), sig) == vis()
    assert simplify_policy(And(Not(vis()), Not(emp())), sig) \
        == Not(Atom("role", frozenset(["visitor", "employee"])))
    assert simplify_policy(And(both, Not(vis())), sig) == emp()
    assert simplify_policy(And(vis(), emp()), sig) == falsum()
    assert simplify_policy(And(vis(), Not(vis())), sig) == falsum()
    full = Atom("role", frozenset([BOTTOM, "visitor", "employee"]))
    assert simplify_policy(And(Not(full), Atom("time", frozenset([1]))), sig) \
        == falsum()


def test_simplify_keeps_first_occurrence_order(office):
    sig = office.sig
    t = Atom("time", frozenset(range(0, 9)))
    p = Atom("correct_pin", frozenset([True]))
    out = simplify_policy(And(And(t, p), And(t, vis())), sig)
    assert out == conj([t, p, vis()])
    assert simplify_policy(And(Top(), vis()), sig) == vis()


def test_simplify_handles_disjunction_encodings(office):
    sig = office.sig
    assert simplify_policy(disj(vis(), falsum()), sig) == vis()
    assert simplify_policy(disj(falsum(), falsum()), sig) == falsum()
    assert target_equiv(simplify_policy(disj(vis(), emp()), sig),
                        Atom("role", frozenset(["visitor", "employee"])), sig)


def test_singleton_template(office, office_published):
    tpl = SingletonTemplate(office, office_published)
    assert tpl.control_vars() == []
    assert tpl.bit_count() == 0
    assert tpl.derive({}) == office_published
    assert tpl.edge_policy_formula(("lob", "out")) == CTrue()   # fixed door
    with pytest.raises(KeyError):
        tpl.edge_policy_formula(("out", "bur"))
    for e in office.controlled_edges():
        f = tpl.edge_policy_formula(e)
        for q in office_requests(office):
            assert eval_formula(f, q, {}) == eval_target(q, office_published[e])


def test_menu_template(office):
    sig = office.sig
    menu = [Top(), vis(), falsum()]
    menus = {e: menu for e in office.controlled_edges()}
    tpl = MenuTemplate(office, menus)
    assert [v.size for v in tpl.control_vars()] == [3] * 5
    assert tpl.count_configurations() == 3 ** 5
    assert tpl.bit_count() == 10           # two bits per three-way choice
    m = {v.name: i % 3 for i, v in enumerate(tpl.control_vars())}
    derived = tpl.derive(m)
    for i, e in enumerate(office.controlled_edges()):
        assert derived[e] == menu[i % 3]
        f = tpl.edge_policy_formula(e)
        for q in office_requests(office):
            assert eval_formula(f, q, m) == eval_target(q, derived[e])
    with pytest.raises(ValueError, match="out of range"):
        tpl.derive({tpl.var_for(office.controlled_edges()[0]).name: 7})
    with pytest.raises(ValueError, match="menu missing"):
        MenuTemplate(office, {})


def test_interval_candidates_follow_target_regions(office, office_reqs):
    bounds = interval_candidates(office.sig, office_reqs)
    assert bounds == {"time": ([0, 8, 21], [7, 20, None])}
    assert interval_candidates(office.sig, []) == {"time": ([0], [None])}


def test_clause_template_layout(office, office_reqs):
    tpl = dnf_template(office, office_reqs, k=1)
    # per door: clause switch, test switch, attribute pick, and the
    # operand variables of the three attributes
    assert len(tpl.control_vars()) == 5 * 9
    names = {v.name for v in tpl.control_vars()}
    assert "cl_0_0" in names and "t_4_0_0_time_hi" in names
    by_name = {v.name: v.size for v in tpl.control_vars()}
    assert by_name["t_0_0_0_attr"] == 3
    assert by_name["t_0_0_0_role_val"] == 3
    assert by_name["t_0_0_0_time_lo"] == 3
    assert by_name["t_0_0_0_time_hi"] == 3
    with pytest.raises(ValueError, match="at least 1"):
        DnfTemplate(office, 0, {})
    with pytest.raises(ValueError, match="no attributes"):
        dnf_template(office, office_reqs, 1,
                     availability={office.controlled_edges()[0]: []})
    with pytest.raises(ValueError, match="unknown request attribute"):
        dnf_template(office, office_reqs, 1,
                     availability={office.controlled_edges()[0]: ["sec_zone"]})


def test_clause_template_extremes(office, office_reqs):
    tpl = dnf_template(office, office_reqs, k=1)
    e0 = office.controlled_edges()[0]
    # all clauses disabled: the door denies everyone
    closed = tpl.derive({})
    assert closed[e0] == falsum()
    # clause on, test off: the door grants everyone
    open_all = tpl.derive({"cl_0_0": 1})
    assert open_all[e0] == Top()
    assert closed[office.controlled_edges()[1]] == falsum()


def test_clause_template_single_tests(office, office_reqs):
    tpl = dnf_template(office, office_reqs, k=1)
    e0 = office.controlled_edges()[0]
    m = {"cl_0_0": 1, "t_0_0_0_use": 1, "t_0_0_0_attr": 0,
         "t_0_0_0_role_op": 1, "t_0_0_0_role_val": 1}
    assert tpl.derive(m)[e0] == Not(vis())
    m = {"cl_0_0": 1, "t_0_0_0_use": 1, "t_0_0_0_attr": 1,
         "t_0_0_0_time_lo": 1, "t_0_0_0_time_hi": 1}
    # the bounded interval folds into a single membership test
    assert tpl.derive(m)[e0] == Atom("time", frozenset(range(8, 21)))
    assert target_equiv(tpl.derive(m)[e0],
                        parse_target("8 <= time <= 20", office.sig), office.sig)
    m = {"cl_0_0": 1, "t_0_0_0_use": 1, "t_0_0_0_attr": 1,
         "t_0_0_0_time_lo": 0, "t_0_0_0_time_hi": 2}
    assert tpl.derive(m)[e0] == Top()      # unbounded on both sides
    m = {"cl_0_0": 1, "t_0_0_0_use": 1, "t_0_0_0_attr": 2,
         "t_0_0_0_correct_pin_op": 0, "t_0_0_0_correct_pin_val": 2}
    assert tpl.derive(m)[e0] == Atom("correct_pin", frozenset([True]))


def test_clause_template_symbolic_policy_matches_derive(office, office_reqs):
    rng = random.Random(11)
    for k in (1, 2):
        tpl = dnf_template(office, office_reqs, k=k)
        formulas = {e: tpl.edge_policy_formula(e) for e in tpl.edges()}
        for _ in range(6):
            m = {v.name: rng.randrange(v.size) for v in tpl.control_vars()}
            derived = tpl.derive(m)
            for e in tpl.edges():
                for q in office_requests(office):
                    assert eval_formula(formulas[e], q, m) \
                        == eval_target(q, derived[e]), (e, m, q)


def test_clause_template_two_clauses_disjoin(office, office_reqs):
    tpl = dnf_template(office, office_reqs, k=2)
    e0 = office.controlled_edges()[0]
    m = {"cl_0_0": 1, "t_0_0_0_use": 1, "t_0_0_0_attr": 0,
         "t_0_0_0_role_op": 0, "t_0_0_0_role_val": 1,
         "cl_0_1": 1, "t_0_1_0_use": 1, "t_0_1_0_attr": 0,
         "t_0_1_0_role_op": 0, "t_0_1_0_role_val": 2}
    pol = tpl.derive(m)[e0]
    assert target_equiv(pol, Atom("role", frozenset(["visitor", "employee"])),
                        office.sig)
