"""
Notes on the requirement language
=================================

"""

# A requirement is `target => constraint`. The target picks out
# requests by subject and context attributes; the constraint restricts
# how the building may look for those requests.

from gatesynth import data
from gatesynth.model import load_model
from gatesynth.rules import (parse_requirements, parse_request, parse_target,
                             format_requirement)
from gatesynth.formulas import BOTTOM, eval_target
from gatesynth.app import classify, minimal_conflict, synth

office = load_model(data.path(data.OFFICE_MODEL))
sig = office.sig

# Shorthands. `a = c` means membership in the singleton set, a bare
# boolean attribute means it is true, and bounds unfold to negated
# membership in the complement.
for text in ("role = visitor", "correct_pin", "time >= 8",
             "8 <= time <= 20", "role in {visitor, bot}"):
    t = parse_target(text, sig)
    print("%-22s parses to %s" % (text, t))

# Unset attributes. A request need not mention every attribute; the
# missing ones read as the unset marker. One-sided bounds and
# disequalities tolerate unset, two-sided bounds do not.
q = parse_request("role = visitor", sig)     # time and pin stay unset
print("unset time satisfies time >= 8:",
      eval_target(q, parse_target("time >= 8", sig)))
print("unset time satisfies 8 <= time <= 20:",
      eval_target(q, parse_target("8 <= time <= 20", sig)))
print("unset role satisfies role != visitor:",
      eval_target({"role": BOTTOM}, parse_target("role != visitor", sig)))

# Patterns carry a polarity: grants stay satisfied when doors open,
# the restrictive shapes stay satisfied when doors close. classify()
# cross-checks the declared polarity against sampled configurations.
with open(data.path(data.OFFICE_REQUIREMENTS)) as fh:
    reqs = parse_requirements(fh.read(), sig)
for r in reqs:
    rep = classify(office, r)
    print("%-55s %s" % (format_requirement(r), rep.final))

# When a requirement set is unsolvable, the explainer grows the list
# one line at a time and reports the first one that tips it over.
clash = parse_requirements(
    "role = visitor => grant(id = bur)\n"
    "=> deny(sec_zone)\n", sig)
print("together solvable?", synth(office, clash).ok)
where = minimal_conflict(office, clash)
if where is not None:
    index, _ = where
    print("first requirement that cannot be added:", clash[index].source)
