"""
Synthesizing door policies instead of writing them
==================================================

"""

# Same office, same requirements, but this time nobody writes the
# policies. We hand the requirement list to the synthesizer and let it
# pick one policy per door.

from gatesynth import data
from gatesynth.model import load_model
from gatesynth.rules import parse_requirements, format_target
from gatesynth.app import synth, verify

office = load_model(data.path(data.OFFICE_MODEL))
with open(data.path(data.OFFICE_REQUIREMENTS)) as fh:
    reqs = parse_requirements(fh.read(), office.sig)

result = synth(office, reqs)
print("outcome:", result.outcome)
for edge in sorted(result.configuration):
    print("%s -> %s := %s"
          % (edge[0], edge[1], format_target(result.configuration[edge])))

# The numbers behind the run. clauses_reached is the size of the
# policy templates that ended up sufficient (1 here: every door can be
# guarded by a single conjunction of attribute tests).
for key in sorted(result.stats):
    print("  %s = %s" % (key, result.stats[key]))

# synth already re-checked its own answer, but doing it again out
# loud costs nothing.
print("independent verification:", verify(office, reqs, result.configuration).ok)

# Tightening the requirements changes the answer. Deny-by-default
# forbids anything the grant lines do not explicitly demand, and the
# synthesizer has to work noticeably harder for it.
strict = synth(office, reqs, deny_by_default=True)
print("with deny-by-default:")
for edge in sorted(strict.configuration):
    print("%s -> %s := %s"
          % (edge[0], edge[1], format_target(strict.configuration[edge])))
print("  template width:", strict.stats["clauses_reached"])
