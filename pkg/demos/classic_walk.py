"""
The requirement-class walk, step by step
========================================

"""

# The older of the two synthesis routes does not solve constraints at
# all. It groups requests into classes that agree on every mentioned
# attribute test, then walks the requirement subsets per class and cuts
# doors until the surviving building satisfies everything. The detailed
# entry point exposes the walk so we can watch it.

from gatesynth import data
from gatesynth.model import load_model
from gatesynth.rules import parse_requirements, format_target
from gatesynth.checker import holds
from gatesynth.classic import s_cs_detailed, cs

office = load_model(data.path(data.OFFICE_MODEL))
with open(data.path(data.OFFICE_REQUIREMENTS)) as fh:
    reqs = parse_requirements(fh.read(), office.sig)

# Two requirements are enough to see the shape of the search: visitors
# must pass the lobby on the way to the meeting room, and only
# employees may enter the secure zone.
pair = [reqs[1], reqs[4]]
out = s_cs_detailed(office, pair)
print("satisfiable:", out.satisfiable)
print("requirement subsets tried:", out.subset_iterations)
print("door searches:", out.searches)
for edge, dropped in sorted(out.dropped.items()):
    print("  %s -> %s cut for %d request class(es)" % (edge[0], edge[1], dropped))
for edge in sorted(out.configuration):
    print("%s -> %s := %s"
          % (edge[0], edge[1], format_target(out.configuration[edge])))
print("holds:", holds(office, out.configuration, pair).ok)

# The per-class core is a plain graph search: the largest set of doors
# that can stay open while a constraint holds from the entry. Here it
# is on its own, for the secure-zone ban.
kept = cs(office, reqs[4].constraint)
dropped = sorted(set(office.edges) - kept)
print("doors closed for the secure-zone ban:", dropped)

# All five requirements at once take a longer walk but still land on a
# configuration.
full = s_cs_detailed(office, reqs)
print("all five: satisfiable=%s after %d subsets"
      % (full.satisfiable, full.subset_iterations))
