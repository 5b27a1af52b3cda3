"""
Walking a visitor through the configured building
=================================================

"""

# Verification talks about request classes. Simulation answers the
# concrete question: this person, this time of day, which doors open.

import os

from gatesynth import data
from gatesynth.model import load_model, load_config
from gatesynth.app import simulate

office = load_model(data.path(data.OFFICE_MODEL))
config = load_config(data.path(data.OFFICE_PUBLISHED_CONFIG), office)

daytime = {"role": "visitor", "time": 9}
rep = simulate(office, config, daytime)
print("visitor at 09:00")
for edge in sorted(rep.granted):
    print("  open   %s -> %s" % edge)
for edge in sorted(rep.denied):
    print("  closed %s -> %s" % edge)
print("  can reach:", ", ".join(rep.reachable))
print("  cut off:  ", ", ".join(rep.stranded) or "(nothing)")

# The same person after hours gets a much smaller building.
night = {"role": "visitor", "time": 23}
rep = simulate(office, config, night)
print("visitor at 23:00")
print("  can reach:", ", ".join(rep.reachable))

# Each report carries a Graphviz rendering of the restricted building,
# handy for slides.
out = os.path.join(os.path.dirname(__file__), "visitor_at_9.dot")
with open(out, "w") as fh:
    fh.write(simulate(office, config, daytime).dot)
print("wrote", out)
