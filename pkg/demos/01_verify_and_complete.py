"""Completing a q+ family to a full qq-system solution, then verifying it.

The system ties, for each simple root i of the chosen Lie type,

    W(q+_i, q-_i) + <alpha_i, Z^H> q+_i q-_i = Lambda_i prod_{j!=i} (q+_j)^(-a_{ji}),

and a polynomial family solving it is the algebraic shadow of a twisted
Miura oper connection.  Everything below runs in exact rational arithmetic.
"""

from fractions import Fraction as Q

import betheqq as bq

F = bq.ExactField()

print("== rank 1: Lambda = z, zeta = 1/2 ==")
inst = bq.QQInstance.make(bq.CartanType("A", 1), F, points=[(0, (1,))], twist=[Q(1, 2)])
print("pairing xi_1 =", inst.xi(1))

# q+ = z + 1 places the single Bethe root at -1
q_plus = [bq.Poly.make(F, [1, 1])]
sol = bq.complete_minus(inst, q_plus)
print("completed q-_1 =", sol.q_minus[0])
print("qq residual    =", bq.qq_residual(inst, sol, 1))
print("nondegenerate  =", bq.check_nondegenerate(inst, sol.q_plus).ok)
print("twist defect   =", bq.verify_mp_twist(inst, sol, 1))

# a q+ whose root violates the Bethe equations cannot be completed
try:
    bq.complete_minus(inst, [bq.Poly.make(F, [-1, 1])])
except bq.InconsistentSystem as exc:
    print("q+ = z - 1 is rejected:", exc)

print()
print("== rank 2: Lambda = (z, 1), generic twist ==")
inst2 = bq.QQInstance.make(bq.CartanType("A", 2), F, points=[(0, (1, 0))],
                           twist=[Q(3, 2), Q(5, 7)])
xi1, xi2 = inst2.xis()
# closed-form Bethe roots for this shape: w2 chained to w1
w1 = -1 / (xi1 + xi2)
w2 = w1 - 1 / xi2
print("Bethe roots:", w1, w2)
roots = bq.BetheRoots.make(F, [[w1], [w2]])
print("Bethe residuals:", dict(bq.verify_bethe(inst2, roots).residuals))

sol2 = bq.roots_to_solution(inst2, roots)
for i in (1, 2):
    print(f"color {i}: q+ = {sol2.q_plus[i-1]}, q- = {sol2.q_minus[i-1]},",
          "residual zero:", bq.qq_residual(inst2, sol2, i).is_zero)

conn = bq.build_connection(inst2, sol2.q_plus)
print("Cartan coefficients g_i(z):")
for i, g in enumerate(conn.g, start=1):
    print(f"  g_{i} =", g)
print("regularity residues at the roots:", bq.regularity_residues(inst2, sol2, roots))
