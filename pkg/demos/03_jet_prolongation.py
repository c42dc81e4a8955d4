"""Frame derivatives of a CR map and the order-3 complete system.

A CR map f = (f_1, ..., f_n) of the Siegel surface satisfies first-order
relations in the frame {T, L_j, Lbar_j}.  The rewrite engine pushes every word
in T, L, Lbar into normal order using the bracket relations, then applies the
first-order relations.  The membership prover shows that every third-order
derivative is a function of derivatives of order at most two, starting from
two analytic-inversion axioms.
"""
from collections import Counter

from crprolong.jetcalc import (RuleSet, W, complete_system_report, gamma, poly_text, run_chain,
                               run_suite, standard_binding, verify_identity)

n = 2
rules = RuleSet(n, base=False)
print("Lb1 L1 L1 f1 ->", poly_text(rules.normalize(W("Lb1 L1 L1 f1"), bind=False)))
print("with gamma = -2i:",
      poly_text(RuleSet(n, False, standard_binding(n)).normalize(W("Lb1 L1 L1 f1"))))

# An identity holds when lhs - rhs normalizes to 0.
base = RuleSet(n)
res = verify_identity(W("Lb1 L1 f1"), W("L1 Lb1 f1") - gamma(1, 1) * W("T f1"), base)
print("\nLb1 L1 f1 = L1 Lb1 f1 - gamma T f1 :", "holds" if res.is_zero() else poly_text(res))

results = run_suite(3)
print(f"identity suite, n=3: {sum(r.ok for r in results)}/{len(results)} hold with symbolic atoms")

prover = run_chain(n)
print(f"\nmembership chain: {sum(s.ok for s in prover.steps)}/{len(prover.steps)} steps")
for step in prover.steps[:4] + prover.steps[-2:]:
    print(f"  [{step.strategy}] {step.statement}")

report = complete_system_report(n)
print("\norder-3 report:", dict(Counter(e["status"] for e in report["entries"])))
for e in report["entries"][:3]:
    print(f"  {e['word']:<12} {e['status']:<10} {e.get('trace', '')}")
