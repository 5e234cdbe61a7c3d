"""Groupoids behind the calculus, and the weights of its symbol classes after blow-up.

Checks the groupoid axioms on random composable triples, walks through a
few explicit arrows, and shows which front-face defining function turns
the b-class weight into a product of boundary defining functions.
"""
import numpy as np

from relcalc.compactify import LITERAL_CANDIDATE, blowup_weight_fit
from relcalc.groupoids import (b_groupoid, bibundle_from_embedding, cdw_of_b, cdw_of_pair, check_axioms,
                               cusp_groupoid, cusp_lambda)

for G in (b_groupoid(2), cusp_groupoid(2), cusp_groupoid(3), cdw_of_pair(1), cdw_of_b(1)):
    rep = check_axioms(G, trials=10_000)
    worst = max(v["max_error"] for k, v in rep.items() if k != "passed")
    print(f"{G.name:<12} axioms hold: {rep['passed']}  (worst deviation {worst:.1e})")

b = b_groupoid(1)
print("\n(0.5, 0.25, 2) o (0.25, 0.75, 1/3) =", b.multiply([0.5, 0.25, 2.0], [0.25, 0.75, 1 / 3])[0])
print("cusp lambda for x = 1/2, y = 1/3, n = 2:", cusp_lambda(0.5, 1 / 3, 2))
print("cotangent pair product:", cdw_of_pair(1).multiply([0.1, 0.5, 1.0, 2.0], [0.5, 0.9, -2.0, 3.0])[0])

_, rep = bibundle_from_embedding(k=2, c=0.5)
print("\nZ = r^-1(Y) checks:", {k: v["passed"] for k, v in rep.items() if isinstance(v, dict)})

fit = blowup_weight_fit("B", (1, -2))["fits"]["(xi', eta'')"]
print(f"\nb-class weight (k, l) = (1, -2), target exponents {fit['pattern']}")
for name, c in sorted(fit["candidates"].items(), key=lambda kv: kv[1]["pattern_residual"]):
    mark = " <- printed" if name == LITERAL_CANDIDATE else ""
    print(f"  {name:<28} residual {c['pattern_residual']:.3f}{mark}")
