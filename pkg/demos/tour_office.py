"""
Verifying door policies for a small office
==========================================

"""

# The bundled office has five spaces: the outside world, a lobby, a
# corridor, a meeting room and a back office marked as a secure zone.
# Five doors carry policies; walking back out is always allowed.

from gatesynth import data
from gatesynth.model import load_model, load_config, restrict
from gatesynth.rules import parse_requirements, format_target
from gatesynth.app import verify
from gatesynth.checker import check_at
from gatesynth.formulas import falsum

office = load_model(data.path(data.OFFICE_MODEL))
print("spaces:", ", ".join(sorted(office.nodes)))
print("entry:", office.entry)

# The requirement file states who may reach what. The *_safe variant
# adds a line demanding that nobody gets stranded inside.
with open(data.path(data.OFFICE_REQUIREMENTS_SAFE)) as fh:
    reqs = parse_requirements(fh.read(), office.sig)
for i, r in enumerate(reqs):
    print("R%d: %s" % (i + 1, r.source))

# A configuration assigns one attribute policy to each controlled door.
config = load_config(data.path(data.OFFICE_PUBLISHED_CONFIG), office)
for edge in sorted(config):
    print("%s -> %s := %s" % (edge[0], edge[1], format_target(config[edge])))

report = verify(office, reqs, config)
print("all requirements hold?", report.ok)
print("request classes checked:", report.representatives)

# Now sabotage one door and watch the verifier name a concrete visitor
# that the broken building turns away.
broken = dict(config)
broken[("cor", "mr")] = falsum()
report = verify(office, reqs, broken)
for v in report.verdicts:
    if not v.ok:
        print("violated: %s" % v.requirement.source)
        print("  witness request:", v.witness)
        # the witness really cannot reach the meeting room any more
        sub = restrict(office, broken, v.witness)
        print("  constraint holds in the restricted building?",
              check_at(sub, office.entry, v.requirement.constraint))
