"""Connections, rank-2 restrictions, regularity, type-A matrix computations."""

import random
from fractions import Fraction as Q

import pytest

import betheqq as bq
from betheqq.opermat import (
    RatMatrix,
    bruhat_factor_w0,
    framing_block,
    gauge_transform,
    mp_twist_block,
    rf_const,
    rf_zero,
    w0_permutation,
)
from betheqq.polyalg import Poly, RationalFn
from fixhelp import a1_standard, a2_rational, b2_rational, random_valid_roots

F = bq.ExactField()


def P(*coeffs):
    return Poly.make(F, coeffs)


class TestBuildConnection:
    def test_log_derivative(self):
        inst, _, sol = a1_standard()
        conn = bq.build_connection(inst, sol.q_plus)
        # g = 1/2 - 1/(z+1) = (z - 1)/(2(z+1))
        g = conn.g[0]
        expect = RationalFn.make(P(Q(-1, 2), Q(1, 2)), P(1, 1))
        assert g.defect(expect) == 0

    def test_constant_q_plus(self):
        inst = bq.QQInstance.make(bq.CartanType("A", 2), F, [(0, (1, 1))], [Q(2), Q(3)])
        conn = bq.build_connection(inst, [P(1), P(1)])
        assert conn.g[0].defect(rf_const(F, Q(2))) == 0
        assert conn.g[1].defect(rf_const(F, Q(3))) == 0

    def test_zero_twist_constant_q(self):
        inst = bq.QQInstance.make(bq.CartanType("A", 1), F, [(0, (1,))], [0])
        conn = bq.build_connection(inst, [P(1)])
        assert conn.g[0].is_zero


class TestConnectionResidues:
    def test_g_has_residue_minus_one_at_simple_roots(self):
        for inst, roots, sol in (a1_standard(), a2_rational()):
            conn = bq.build_connection(inst, sol.q_plus)
            for i in range(1, inst.rank + 1):
                for w in roots.roots[i - 1]:
                    r = conn.g[i - 1] * RationalFn.from_poly(P(-w, 1))
                    assert r(w) == Q(-1)


class TestGl2Oper:
    def test_a1_shapes(self):
        inst, _, sol = a1_standard()
        conn = bq.build_connection(inst, sol.q_plus)
        op = bq.gl2_oper(conn, inst.cartan, 1)
        assert op.raw.entries[0][1].defect(RationalFn.from_poly(conn.lambdas[0])) == 0
        assert (op.raw.entries[0][0] + op.raw.entries[1][1]).is_zero  # trace 0 in rank 1
        assert op.rho.coeffs == conn.lambdas[0].coeffs

    def test_a2_rho(self):
        inst, _, sol = a2_rational()
        conn = bq.build_connection(inst, sol.q_plus)
        op = bq.gl2_oper(conn, inst.cartan, 1)
        expect = conn.lambdas[0] * sol.q_plus[1]
        assert (op.rho - expect).is_zero

    def test_rho_polynomial_b2(self):
        inst, _, sol = b2_rational()
        conn = bq.build_connection(inst, sol.q_plus)
        rho1 = bq.gl2_oper(conn, inst.cartan, 1).rho
        assert (rho1 - conn.lambdas[0] * sol.q_plus[1] ** 2).is_zero
        rho2 = bq.gl2_oper(conn, inst.cartan, 2).rho
        assert (rho2 - conn.lambdas[1] * sol.q_plus[0]).is_zero

    def test_tilde_is_diagonal_gauge_of_raw(self):
        for inst, _, sol in (a2_rational(), b2_rational()):
            conn = bq.build_connection(inst, sol.q_plus)
            cmat = inst.cartan
            for i in range(1, inst.rank + 1):
                op = bq.gl2_oper(conn, cmat, i)
                prod = Poly.const(F, 1)
                for j in range(1, inst.rank + 1):
                    if j != i:
                        e = cmat.a(j, i)
                        if e:
                            prod = prod * sol.q_plus[j - 1] ** (-e)
                # u = diag(1, prod^(-1)): conjugating raw must give tilde
                u = RatMatrix.build([[rf_const(F, 1), rf_zero(F)],
                                     [rf_zero(F), RationalFn.make(Poly.const(F, 1), prod)]])
                gauged = gauge_transform(op.raw, u, u.inverse_triangular())
                assert gauged.defect(op.tilde) == 0


class TestMpTwist:
    def test_zero_on_solutions(self):
        for inst, _, sol in (a1_standard(), a2_rational(), b2_rational()):
            for i in range(1, inst.rank + 1):
                assert bq.verify_mp_twist(inst, sol, i) == 0

    def test_perturbation_detected(self):
        inst, _, sol = a1_standard()
        broken = bq.QQSolution.make(sol.q_plus, [sol.q_minus[0] + P(1)])
        assert bq.verify_mp_twist(inst, broken, 1) != 0

    def test_zero_degree_solution(self):
        inst = bq.QQInstance.make(bq.CartanType("A", 1), F, [], [Q(2, 3)])
        sol = bq.complete_minus(inst, [P(1)])
        assert bq.verify_mp_twist(inst, sol, 1) == 0

    def test_block_data(self):
        inst, _, sol = a2_rational()
        z1 = mp_twist_block(inst, 1)
        # diag(zeta_1, -zeta_1 - a_{21} zeta_2) with a_{21} = -1
        assert z1.entries[0][0].defect(rf_const(F, inst.twist.zeta[0])) == 0
        expect = -inst.twist.zeta[0] + inst.twist.zeta[1]
        assert z1.entries[1][1].defect(rf_const(F, expect)) == 0
        v = framing_block(inst, sol, 1)
        assert v.entries[1][0].is_zero


class TestRegularity:
    def test_standard_zero(self):
        inst, roots, sol = a1_standard()
        res = bq.regularity_residues(inst, sol, roots)
        assert res == {(1, 1): Q(0)}

    def test_equals_bethe_residual(self):
        rng = random.Random(41)
        for _ in range(40):
            inst, roots = random_valid_roots(rng, F, rank=rng.randint(1, 3))
            sol = bq.QQSolution.make(
                [bq.poly_from_roots(F, c) for c in roots.roots],
                [Poly.zero(F)] * inst.rank)
            reg = bq.regularity_residues(inst, sol, roots)
            for (i, ell), val in reg.items():
                assert val == bq.bethe_residual(inst, roots, i, ell)

    def test_empty(self):
        inst = bq.QQInstance.make(bq.CartanType("A", 1), F, [], [1])
        sol = bq.complete_minus(inst, [P(1)])
        assert bq.regularity_residues(inst, sol, bq.BetheRoots.make(F, [[]])) == {}

    def test_rational_root_extraction_route(self):
        inst, roots, sol = a2_rational()
        res = bq.regularity_residues(inst, sol)  # roots extracted from q+
        assert all(v == 0 for v in res.values())


class TestBruhat:
    def test_random_factorizations(self):
        rng = random.Random(42)
        for n in (2, 3, 4):
            for _ in range(6):
                entries = [[rf_const(F, Q(rng.randint(-9, 9), rng.randint(1, 3)))
                            for _ in range(n)] for _ in range(n)]
                m = RatMatrix.build(entries)
                try:
                    b_plus, n_plus = bruhat_factor_w0(m)
                except bq.FactorizationFailed:
                    continue
                recon = b_plus @ w0_permutation(F, n) @ n_plus
                assert recon.defect(m) == 0
                assert b_plus.is_upper_triangular()
                for k in range(n):
                    assert n_plus.entries[k][k].defect(rf_const(F, 1)) == 0

    def test_identity_not_in_cell(self):
        with pytest.raises(bq.FactorizationFailed):
            bruhat_factor_w0(RatMatrix.identity(F, 2))


class TestReduceTwist:
    def test_diagonal_input(self):
        u, tw = bq.reduce_twist_type_a(F, [[Q(1), 0], [0, Q(2)]])
        assert u.defect(RatMatrix.identity(F, 2)) == 0
        assert bq.pairing(1, tw, bq.cartan_matrix(bq.CartanType("A", 1))) == Q(-1)

    def test_2x2_nonzero_gap(self):
        z = [[Q(3), Q(4)], [0, Q(-3)]]
        u, _ = bq.reduce_twist_type_a(F, z)
        # constant shear c/(2 zeta) = 4/6; [e, Z^H] = -<alpha, Z^H> e fixes the sign
        assert u.entries[0][1].defect(rf_const(F, Q(4, 6))) == 0
        _assert_diagonalizes(z, u)

    def test_2x2_zero_gap(self):
        z = [[Q(1), Q(5)], [0, Q(1)]]
        u, _ = bq.reduce_twist_type_a(F, z)
        # u = exp(z c e): entry 5z, cleared through the derivative term
        assert u.entries[0][1].defect(RationalFn.from_poly(P(0, 5))) == 0
        _assert_diagonalizes(z, u)

    def test_random_3x3_4x4(self):
        rng = random.Random(43)
        for n in (3, 4):
            for _ in range(8):
                z = [[Q(rng.randint(-6, 6), rng.randint(1, 3)) if j >= i else Q(0)
                      for j in range(n)] for i in range(n)]
                u, tw = bq.reduce_twist_type_a(F, z)
                _assert_diagonalizes(z, u)
                cm = bq.cartan_matrix(bq.CartanType("A", n - 1))
                for i in range(1, n):
                    assert bq.pairing(i, tw, cm) == z[i - 1][i - 1] - z[i][i]

    def test_rejects_lower_entries(self):
        with pytest.raises(ValueError):
            bq.reduce_twist_type_a(F, [[Q(1), 0], [Q(1), Q(2)]])


def _assert_diagonalizes(z, u):
    n = len(z)
    zmat = RatMatrix.build([[rf_const(F, z[i][j]) if j >= i else rf_zero(F)
                             for j in range(n)] for i in range(n)])
    target = RatMatrix.diagonal([rf_const(F, z[i][i]) for i in range(n)])
    assert gauge_transform(zmat, u).defect(target) == 0


class TestDiagonalize:
    def test_a1(self):
        inst, _, sol = a1_standard()
        out = bq.diagonalize_type_a(inst, sol, bq.w0_reduced_word(inst.ctype))
        assert out.residual == 0
        assert out.v.is_upper_triangular()
        # rank 1: v agrees with the framing gauge up to a constant diagonal
        v = framing_block(inst, sol, 1)
        ratio = v.inverse_triangular() @ out.v
        assert ratio.entries[0][1].is_zero and ratio.entries[1][0].is_zero
        for k in (0, 1):
            assert ratio.entries[k][k].num.degree() == 0
            assert ratio.entries[k][k].den.degree() == 0

    def test_a2_both_words(self):
        inst, _, sol = a2_rational()
        for letters in ([1, 2, 1], [2, 1, 2]):
            out = bq.diagonalize_type_a(inst, sol, bq.WeylWord.make(letters, 2))
            assert out.residual == 0

    def test_wrong_word_length(self):
        inst, _, sol = a2_rational()
        with pytest.raises(ValueError):
            bq.diagonalize_type_a(inst, sol, bq.WeylWord.make([1], 2))

    def test_type_restriction(self):
        inst, _, sol = b2_rational()
        with pytest.raises(bq.UnsupportedType):
            bq.diagonalize_type_a(inst, sol, bq.w0_reduced_word(inst.ctype))

    def test_chain_broken_propagates(self, monkeypatch):
        import betheqq.backlund

        inst, _, sol = a2_rational()

        def boom(*args, **kwargs):
            raise bq.InconsistentSystem(1, "forced")

        monkeypatch.setattr(betheqq.backlund, "_complete_color", boom)
        with pytest.raises(bq.ChainBroken):
            bq.diagonalize_type_a(inst, sol, bq.WeylWord.make([1, 2, 1], 2))

    def test_numeric_backend_sample_points(self):
        # v(x) Z v(x)^-1 - v'(x) v(x)^-1 == A(x) at 16 random points off the poles
        N = bq.NumericField(256)
        ctx = N.ctx
        rng = random.Random(91)
        inst = bq.QQInstance.make(bq.CartanType("A", 2), N,
                                  [(0, (1, 0)), (3, (0, 1))], [Q(2, 3), Q(1, 5)])
        roots = bq.seed_and_continue(inst, bq.InfinitePartition.make(N, [[0], [3]]),
                                     bq.SolveOptions(seed=5))
        sol = bq.roots_to_solution(inst, roots)
        out = bq.diagonalize_type_a(inst, sol, bq.WeylWord.make([1, 2, 1], 2))
        assert N.ctx.mpf(out.residual) < ctx.mpf("1e-40")
        a_mat = bq.connection_matrix(inst, sol)
        zc = [[bq.twist_matrix(N, inst.twist).entries[r][c](ctx.mpf(0)) for c in range(3)]
              for r in range(3)]
        vd = RatMatrix.build([[e.deriv() for e in row] for row in out.v.entries])

        def mat_eval(m, x):
            return ctx.matrix([[m.entries[r][c](x) if not m.entries[r][c].is_zero else N.zero
                                for c in range(3)] for r in range(3)])

        checked = 0
        while checked < 16:
            x = ctx.mpc(rng.uniform(-4, 4), rng.uniform(-4, 4))
            try:
                vx = mat_eval(out.v, x)
                vpx = mat_eval(vd, x)
                ax = mat_eval(a_mat, x)
            except bq.PoleCollision:
                continue
            vinv = vx ** -1
            res = vx * ctx.matrix(zc) * vinv - vpx * vinv - ax
            scale = max(abs(ax[r, c]) for r in range(3) for c in range(3))
            worst = max(abs(res[r, c]) for r in range(3) for c in range(3))
            assert worst <= ctx.mpf("1e-40") * max(1, scale)
            checked += 1
