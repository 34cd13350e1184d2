"""Backlund transformations on qq-solutions and their combinatorics.

A simple transformation at color i gauge-moves the associated connection by
exp(mu_i f_i), swapping (q+_i, q-_i) and reflecting the twist by s_i.  We
keep q+ families monic throughout: the new plus polynomial is q-_i divided
by its leading coefficient lambda, the new minus polynomial is -lambda q+_i,
and every other color's singularity lead absorbs lambda^{a_{ij}} (the pair
scaling (q+, q-) -> (q+/lambda, lambda q-) leaves equation i untouched and
shifts only the j-th right-hand sides).

Chains walk a reduced word right to left: step l applies the reflection at
letter k - l + 1 of the word (i_1, ..., i_k), so the final twist is
s_{i_1}...s_{i_k}(Z^H).
"""

from __future__ import annotations

import random
from dataclasses import dataclass
from typing import Sequence

from .errors import ChainBroken, InconsistentSystem
from .polyalg import Poly, RationalFn, chop
from .qqcore import (
    QQInstance,
    QQSolution,
    _complete_color,
    build_lambdas,
    check_nondegenerate,
    qq_residual,
    qq_residual_scale,
    qq_rhs,
)
from .rootsys import WeylWord, is_reduced, reflect_twist
from .scalars import ExactField, NumericField


@dataclass(frozen=True)
class CombinatorialDatum:
    """Degrees of the q+ family and the Lambda family, plus the twist kernel.

    ``psi_simple`` collects the simple-root indices paired to zero by the
    twist; ``psi_all_roots`` flags the fully degenerate case Z^H = 0 (every
    root annihilates the twist).
    """

    d: tuple
    n: tuple
    psi_simple: frozenset
    psi_all_roots: bool

    @staticmethod
    def from_instance(inst: QQInstance, d: Sequence[int]) -> "CombinatorialDatum":
        lambdas = build_lambdas(inst)
        xis = inst.xis()
        psi = frozenset(i for i, x in enumerate(xis, start=1) if x == 0)
        return CombinatorialDatum(
            tuple(int(x) for x in d),
            tuple(p.degree() for p in lambdas),
            psi,
            len(psi) == inst.rank,
        )


def degree_map(datum: CombinatorialDatum, i: int, cartan) -> tuple:
    """Degrees after the transformation at color i:
    d'_i = N_i - d_i - sum_{k != i} a_{ki} d_k, others unchanged."""
    d = list(datum.d)
    acc = datum.n[i - 1] - d[i - 1]
    for k in range(1, len(d) + 1):
        if k != i:
            acc -= cartan.a(k, i) * d[k - 1]
    d[i - 1] = acc
    return tuple(d)


@dataclass(frozen=True)
class PrefixCheck:
    prefix: int
    degrees: tuple
    holds: bool


@dataclass(frozen=True)
class AdmissibleReport:
    word: WeylWord
    prefixes: tuple
    ok: bool


def check_admissible(datum: CombinatorialDatum, word: WeylWord, cartan) -> AdmissibleReport:
    """Evaluate d_j <= N_j - sum_{p != j} a_{pj} d_p at every chain prefix.

    Prefix s applies the last s letters of the word (the chain order).  For
    a simply-laced type with regular semisimple twist, an all-pass report is
    equivalent to the existence of a fully generic chain with these degrees.
    """
    if not is_reduced(word, cartan):
        raise ValueError("word is not reduced")
    r = len(datum.d)
    current = datum
    checks = []
    ok = True
    for s in range(len(word) + 1):
        holds = all(x >= 0 for x in current.d)
        for j in range(1, r + 1):
            bound = current.n[j - 1]
            for p in range(1, r + 1):
                if p != j:
                    bound -= cartan.a(p, j) * current.d[p - 1]
            if current.d[j - 1] > bound:
                holds = False
        checks.append(PrefixCheck(s, current.d, holds))
        ok = ok and holds
        if s < len(word):
            letter = word.letters[len(word) - 1 - s]
            current = CombinatorialDatum(
                degree_map(current, letter, cartan), current.n,
                current.psi_simple, current.psi_all_roots,
            )
    return AdmissibleReport(word, tuple(checks), ok)


def mu(inst: QQInstance, sol: QQSolution, i: int) -> RationalFn:
    """Gauge coefficient in product form: prod_{j != i}(q+_j)^(-a_{ji}) / (q+_i q-_i)."""
    qp, qm = sol.q_plus[i - 1], sol.q_minus[i - 1]
    if qp.is_zero or qm.is_zero:
        raise ValueError(f"mu needs nonzero q+_{i} and q-_{i}")
    cmat = inst.cartan
    num = Poly.const(inst.field, 1)
    for j in range(1, inst.rank + 1):
        if j != i:
            e = -cmat.a(j, i)
            if e:
                num = num * sol.q_plus[j - 1] ** e
    return RationalFn.make(num, qp * qm)


def mu_gauge_form(inst: QQInstance, sol: QQSolution, i: int) -> RationalFn:
    """The same coefficient from the connection side:
    [W(q+_i, q-_i) + xi_i q+_i q-_i] / (Lambda_i q+_i q-_i).

    Agrees with :func:`mu` exactly when the i-th residual vanishes; comparing
    the two forms is therefore a solution check.
    """
    from .polyalg import wronskian

    qp, qm = sol.q_plus[i - 1], sol.q_minus[i - 1]
    lam = build_lambdas(inst)[i - 1]
    num = wronskian(qp, qm) + (qp * qm).scale(inst.xi(i))
    return RationalFn.make(num, lam * qp * qm)


def apply_simple(inst: QQInstance, sol: QQSolution, i: int
                 ) -> tuple[QQInstance, QQSolution]:
    """One Backlund step at color i.

    Requires the i-th residual to vanish and q-_i != 0.  Returns the
    reflected-twist instance (with the lead ledger updated) and the new
    solution; colors j != i are re-completed under the new twist, so an
    :class:`InconsistentSystem` from there means the input was not
    i-composable.
    """
    field = inst.field
    qm = chop(sol.q_minus[i - 1])
    if qm.is_zero:
        raise ValueError(f"q-_{i} vanishes; the step at color {i} is undefined")
    res = qq_residual(inst, sol, i)
    if not (res.is_zero or field.is_zero(res.norm(), scale=qq_residual_scale(inst, sol, i))):
        raise ValueError(f"equation {i} does not hold; Backlund step undefined")

    lam = qm.lc()
    cmat = inst.cartan
    new_twist = reflect_twist(i, inst.twist, cmat)
    lead = list(inst.lead)
    for j in range(1, inst.rank + 1):
        if j == i:
            continue
        aij = cmat.a(i, j)
        if aij > 0:
            lead[j - 1] = lead[j - 1] * lam ** aij
        elif aij < 0:
            lead[j - 1] = lead[j - 1] / lam ** (-aij)
    new_inst = QQInstance(inst.ctype, inst.points, new_twist, tuple(lead), inst.extra)

    q_plus = list(sol.q_plus)
    q_minus = list(sol.q_minus)
    q_plus[i - 1] = qm.monic()
    q_minus[i - 1] = sol.q_plus[i - 1].scale(-lam)
    lambdas = build_lambdas(new_inst)
    for j in range(1, inst.rank + 1):
        if j != i:
            q_minus[j - 1] = _complete_color(new_inst, q_plus, j, lambdas)
    return new_inst, QQSolution.make(q_plus, q_minus)


@dataclass(frozen=True)
class ChainStep:
    index: int  # the reflection applied at this step
    instance: QQInstance
    solution: QQSolution
    mu: RationalFn
    composable: bool
    generic: bool


@dataclass(frozen=True)
class ChainTrace:
    word: WeylWord
    initial_instance: QQInstance
    initial_solution: QQSolution
    steps: tuple

    @property
    def final_instance(self) -> QQInstance:
        return self.steps[-1].instance if self.steps else self.initial_instance

    @property
    def final_solution(self) -> QQSolution:
        return self.steps[-1].solution if self.steps else self.initial_solution

    @property
    def fully_generic(self) -> bool:
        return all(s.generic for s in self.steps)

    @property
    def fully_composable(self) -> bool:
        return all(s.composable for s in self.steps)


def _swapped_family_ok(inst: QQInstance, sol: QQSolution, i: int) -> bool:
    """Nondegeneracy of (q+_1, ..., q-_i, ..., q+_r) up to monic scaling."""
    family = list(sol.q_plus)
    qm = chop(sol.q_minus[i - 1])
    if qm.is_zero:
        return False
    family[i - 1] = qm.monic()
    return check_nondegenerate(inst, family).ok


def chain(inst: QQInstance, sol: QQSolution, word: WeylWord,
          retry_attempts: int = 8, retry_seed: int = 0) -> ChainTrace:
    """Iterate simple Backlund steps right-to-left through a reduced word.

    Records per-step flags: ``composable`` (the completions under the
    reflected twist succeeded) and ``generic`` (the transformed q+ family is
    nondegenerate).  When the pairing at the step's color vanishes, the free
    completion constant is resampled (seeded, up to ``retry_attempts``) if
    the swapped family fails a genericity condition, since some shift
    q-_i + c q+_i restores it.  A failed completion raises
    :class:`ChainBroken` carrying the partial trace.
    """
    cmat = inst.cartan
    if not is_reduced(word, cmat):
        raise ValueError("word is not reduced")
    rng = random.Random(retry_seed)
    field = inst.field
    steps: list[ChainStep] = []
    cur_inst, cur_sol = inst, sol
    for step_no, pos in enumerate(range(len(word) - 1, -1, -1), start=1):
        letter = word.letters[pos]
        if cur_inst.xi(letter) == 0 and not _swapped_family_ok(cur_inst, cur_sol, letter):
            for _ in range(retry_attempts):
                c = field(rng.randint(1, 10 ** 6))
                shifted = list(cur_sol.q_minus)
                shifted[letter - 1] = cur_sol.q_minus[letter - 1] + cur_sol.q_plus[letter - 1].scale(c)
                cand = QQSolution.make(cur_sol.q_plus, shifted)
                if _swapped_family_ok(cur_inst, cand, letter):
                    cur_sol = cand
                    break
        step_mu = mu(cur_inst, cur_sol, letter)
        try:
            new_inst, new_sol = apply_simple(cur_inst, cur_sol, letter)
        except InconsistentSystem as exc:
            raise ChainBroken(step_no, exc,
                              ChainTrace(word, inst, sol, tuple(steps))) from exc
        generic = check_nondegenerate(new_inst, new_sol.q_plus).ok
        steps.append(ChainStep(letter, new_inst, new_sol, step_mu, True, generic))
        cur_inst, cur_sol = new_inst, new_sol
    return ChainTrace(word, inst, sol, tuple(steps))
