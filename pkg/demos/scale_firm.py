"""
Timing synthesis as the building grows
======================================

"""

# The firm model is the larger benchmark: twenty spaces, forty-one
# controlled doors, ten requirements. Replicating its wings around the
# shared entrance gives progressively bigger instances with the same
# requirement file, which is a cheap way to watch the solver scale.

import time

from gatesynth import data
from gatesynth.model import load_model, scale_replicate
from gatesynth.rules import parse_requirements
from gatesynth.app import synth, verify

firm = load_model(data.path(data.FIRM_MODEL))
with open(data.path(data.FIRM_REQUIREMENTS)) as fh:
    reqs = parse_requirements(fh.read(), firm.sig)

for copies in (1, 2):
    S = firm if copies == 1 else scale_replicate(firm, copies)
    t0 = time.time()
    result = synth(S, reqs)
    took = time.time() - t0
    ok = verify(S, reqs, result.configuration).ok
    print("copies=%d  %3d spaces  %3d doors  %6.1fs  verified=%s"
          % (copies, len(S.nodes), len(S.controlled_edges()), took, ok))

# The growth is driven by the grounded constraint size; the stats dict
# of the last run shows where the time went.
for key in ("control_bits", "grounded_size", "ground_seconds",
            "solve_seconds", "total_seconds"):
    print("  %s = %s" % (key, result.stats[key]))
