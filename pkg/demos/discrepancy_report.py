"""
Formulas with two readings
==========================

Several printed formulas admit more than one reading.  For each, both
readings are scored against an oracle that does not depend on the choice
(RK4, finite differences, exact chord composition).  This prints the table
and, given a path, writes it as JSON.
"""

import sys

from heislorentz import discrepancies

comps = discrepancies.run_all()
width = max(len(c.key) for c in comps)
for c in comps:
    scores = ", ".join(f"{k}: {v:.2e}" for k, v in c.errors.items())
    flag = "ok" if c.justified else "UNJUSTIFIED"
    print(f"{c.key:<{width}}  [{flag}] adopted {c.adopted!r}")
    print(f"{'':<{width}}  {scores}")

if len(sys.argv) > 1:
    with open(sys.argv[1], "w") as fh:
        fh.write(discrepancies.to_json(comps))
    print("wrote", sys.argv[1])
