"""Type-A matrix computations: diagonalizing the connection, reducing twists.

A chain along a reduced word for the longest Weyl element assembles
b-(z) = prod_steps exp(-mu f_i) . prod_j (qbar+_j)^{alphacheck_j} in the
defining representation; splitting b- = b+ . w0 . n+ by Gaussian elimination
against the antidiagonal yields the upper-triangular gauge v = b+ with

    A(z) = v(z) (d_z + Z^H) v(z)^-1     (checked exactly).

Separately, a constant upper-triangular twist is conjugated onto its
diagonal entry by entry with polynomial shears.
"""

from fractions import Fraction as Q

import betheqq as bq
from betheqq.opermat import RatMatrix, gauge_transform, rf_const, rf_zero

F = bq.ExactField()

inst = bq.QQInstance.make(bq.CartanType("A", 2), F, points=[(0, (1, 0))],
                          twist=[Q(3, 2), Q(5, 7)])
xi1, xi2 = inst.xis()
w1 = -1 / (xi1 + xi2)
sol = bq.roots_to_solution(inst, bq.BetheRoots.make(F, [[w1], [w1 - 1 / xi2]]))

word = bq.w0_reduced_word(inst.ctype)
out = bq.diagonalize_type_a(inst, sol, word)
print("word:", word.letters)
print("conjugation defect (identical zero means A = v(d+Z)v^-1):", out.residual)
print("diagonalizing gauge v(z) = b+(z):")
for row in out.v.entries:
    print("  [", ",  ".join(str(e.num) + "/" + str(e.den) for e in row), "]")

print()
print("== constant twist reduction ==")
z = [[Q(1), Q(2), Q(3)], [Q(0), Q(1, 2), Q(5)], [Q(0), Q(0), Q(-1)]]
u, twist = bq.reduce_twist_type_a(F, z)
print("input upper-triangular Z with diagonal", [z[i][i] for i in range(3)])
print("unipotent u(z):")
for row in u.entries:
    print("  [", ",  ".join(str(e.num) + "/" + str(e.den) for e in row), "]")
zmat = RatMatrix.build([[rf_const(F, z[i][j]) if j >= i else rf_zero(F)
                         for j in range(3)] for i in range(3)])
target = RatMatrix.diagonal([rf_const(F, z[i][i]) for i in range(3)])
print("u (d + Z) u^-1 equals d + diag(Z):", gauge_transform(zmat, u).defect(target) == 0)
print("recovered coroot coordinates:", twist.zeta)

# a repeated diagonal entry forces a z-dependent shear
z2 = [[Q(1), Q(4)], [Q(0), Q(1)]]
u2, _ = bq.reduce_twist_type_a(F, z2)
print("repeated diagonal: shear becomes z-dependent, u_{12} =", u2.entries[0][1].num)
