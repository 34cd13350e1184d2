"""Backlund transformations: swapping q+_i with q-_i while reflecting the twist.

A single step at color i multiplies the connection by exp(mu_i f_i) and
produces a solution for s_i(Z^H); chains iterate this right-to-left along a
reduced Weyl word.  The degree of every new plus polynomial is predicted by
the combinatorial degree map, and the per-prefix inequalities decide whether
a fully generic chain can exist at all.
"""

from fractions import Fraction as Q

import betheqq as bq

F = bq.ExactField()

inst = bq.QQInstance.make(bq.CartanType("A", 2), F, points=[(0, (1, 0))],
                          twist=[Q(3, 2), Q(5, 7)])
xi1, xi2 = inst.xis()
w1 = -1 / (xi1 + xi2)
roots = bq.BetheRoots.make(F, [[w1], [w1 - 1 / xi2]])
sol = bq.roots_to_solution(inst, roots)

print("single step at color 1:")
ninst, nsol = bq.apply_simple(inst, sol, 1)
print("  twist", inst.twist.zeta, "->", ninst.twist.zeta)
print("  q+_1 :", sol.q_plus[0], "->", nsol.q_plus[0])
print("  residuals vanish under the reflected twist:", bq.residuals_vanish(ninst, nsol))
binst, bsol = bq.apply_simple(ninst, nsol, 1)
print("  applying color 1 again restores the twist:", binst.twist.zeta == inst.twist.zeta,
      "and q+:", all(a.coeffs == b.coeffs for a, b in zip(bsol.q_plus, sol.q_plus)))

word = bq.w0_reduced_word(inst.ctype)
print()
print("chain along the longest-element word", word.letters, "(applied right to left):")
trace = bq.chain(inst, sol, word)
datum = bq.CombinatorialDatum.from_instance(inst, [p.degree() for p in sol.q_plus])
cur = datum
cm = inst.cartan
for n, step in enumerate(trace.steps, start=1):
    predicted = bq.degree_map(cur, step.index, cm)
    print(f"  step {n}: s_{step.index}, degrees {step.solution.degrees()}",
          f"(predicted {predicted}), composable={step.composable}, generic={step.generic}")
    cur = bq.CombinatorialDatum(tuple(p.degree() for p in step.solution.q_plus),
                                cur.n, cur.psi_simple, cur.psi_all_roots)
print("final twist equals the word acting on Z^H:",
      trace.final_instance.twist.zeta)

print()
print("admissibility of degree data (d, N) along the same word:")
for d in [(1, 1), (0, 1), (2, 2)]:
    rep = bq.check_admissible(bq.CombinatorialDatum(d, (1, 0), frozenset(), False), word, cm)
    states = [(p.prefix, p.holds, p.degrees) for p in rep.prefixes]
    print(f"  d = {d}: pass = {rep.ok}; per-prefix {states}")
