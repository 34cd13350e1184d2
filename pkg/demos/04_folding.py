"""Folding a non-simply-laced system into its simply-laced shadow.

For B_n and G_2 (unique short simple root k across the multiple bond from l,
m = -a_{kl}), the substitution q~k = (qk)^m turns a solution into one for
the diagram with the multiple bond replaced by a simple bond; the short
color's singularity polynomial picks up m (qk+ qk-)^(m-1) and its pairing
is multiplied by m.  The price is degeneracy: as soon as deg qk+ >= 1, the
folded plus polynomial has multiple roots.
"""

from fractions import Fraction as Q

import betheqq as bq

F = bq.ExactField()

for family, zeta in (("B", (Q(1, 3), Q(4, 5))), ("G", (Q(1, 2), Q(2, 7)))):
    inst = bq.QQInstance.make(bq.CartanType(family, 2), F, points=[(0, (1, 0))],
                              twist=list(zeta))
    k = inst.ctype.short_simple_root
    a_kl = inst.cartan.a(2, 1)
    xi1, xi2 = inst.xis()
    w1 = -1 / (xi1 - a_kl * xi2)
    roots = bq.BetheRoots.make(F, [[w1], [w1 - 1 / xi2]])
    sol = bq.roots_to_solution(inst, roots)
    print(f"== {inst.ctype} (short root {k}, a_kl = {a_kl}) ==")
    print("  source residuals vanish:", bq.residuals_vanish(inst, sol))

    folded_inst, folded_sol = bq.fold(inst, sol)
    print("  folds to", folded_inst.ctype, "with pairings", folded_inst.xis())
    print("  folded residuals vanish:", bq.residuals_vanish(folded_inst, folded_sol))
    print("  folded q+ degrees:", folded_sol.degrees())
    nd = bq.check_nondegenerate(folded_inst, folded_sol.q_plus)
    print("  squarefree per color:", nd.squarefree, "(degeneracy is forced)")
    lams = bq.build_lambdas(folded_inst)
    print("  folded Lambda for the short color:", lams[k - 1])
    print()

print("types C and F have no unique short simple root, so folding refuses them:")
inst_c = bq.QQInstance.make(bq.CartanType("C", 3), F, [], [1, 1, 1])
sol_c = bq.complete_minus(inst_c, [bq.Poly.const(F, 1)] * 3)
try:
    bq.fold(inst_c, sol_c)
except bq.UnsupportedType as exc:
    print(" ", exc)
