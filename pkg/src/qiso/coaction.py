"""Magic-unitary coactions of finite quantum groups on finite metric spaces.

The coaction rho: C(X) -> C(X) (x) A is stored through its magic unitary
u = (u_ij), convention rho(e_j) = sum_i e_i (x) u_ij.  States act on points
from the right (x <| psi is the distribution j -> psi(u_xj)) and on
functions from the left ((psi |> f)(x) = sum_j f_j psi(u_xj))."""

from __future__ import annotations

from dataclasses import dataclass
from typing import FrozenSet, List, Tuple

import numpy as np

from .algebra import AlgElement, StateFunctional
from .errors import QisoError, ShapeMismatch
from .metric import FiniteMetricSpace
from .quantum_group import QGReport, QuantumGroup
from .transport import ProbVector, prob_vector


class NotAPartition(QisoError):
    pass


@dataclass
class CoAction:
    group: QuantumGroup
    space: FiniteMetricSpace
    u: Tuple[Tuple[AlgElement, ...], ...]
    name: str = ""

    def __post_init__(self):
        n = self.space.n
        if len(self.u) != n or any(len(row) != n for row in self.u):
            raise ShapeMismatch("magic unitary size differs from the space")
        self.u = tuple(tuple(row) for row in self.u)

    @property
    def n(self) -> int:
        return self.space.n


def verify_coaction(action: CoAction, tol: float = 1e-9,
                    check_faithful: bool = True) -> QGReport:
    """All magic-unitary and coaction axioms as residuals.

    Faithfulness is tested by saturating the linear span of products of
    u-entries: the action is faithful iff the span reaches the whole
    algebra.  The faithfulness entry of the report is the dimension
    deficit (0.0 when faithful)."""
    qg = action.group
    alg = qg.algebra
    n = action.n
    rep = QGReport()

    proj = star = 0.0
    for row in action.u:
        for e in row:
            proj = max(proj, ((e * e) - e).norm())
            star = max(star, (e.star() - e).norm())
    rep.residuals["entries_idempotent"] = proj
    rep.residuals["entries_selfadjoint"] = star

    unit = alg.unit()
    row_res = col_res = 0.0
    for i in range(n):
        rsum = alg.zero()
        csum = alg.zero()
        for j in range(n):
            rsum = rsum + action.u[i][j]
            csum = csum + action.u[j][i]
        row_res = max(row_res, (rsum - unit).norm())
        col_res = max(col_res, (csum - unit).norm())
    rep.residuals["row_sums"] = row_res
    rep.residuals["column_sums"] = col_res

    coassoc = 0.0
    vecs = [[action.u[i][j].vec() for j in range(n)] for i in range(n)]
    for i in range(n):
        for j in range(n):
            lhs = qg.apply_delta(action.u[i][j])
            rhs = np.zeros_like(lhs)
            for k in range(n):
                rhs += np.outer(vecs[i][k], vecs[k][j])
            coassoc = max(coassoc, float(np.abs(lhs - rhs).max()))
    rep.residuals["coaction_square"] = coassoc

    counit = 0.0
    for i in range(n):
        for j in range(n):
            counit = max(counit, abs(qg.counit(action.u[i][j]) - (1.0 if i == j else 0.0)))
    rep.residuals["counit_compatibility"] = counit

    if check_faithful:
        rep.residuals["faithfulness_deficit"] = float(generation_deficit(action, tol))
    return rep


def generation_deficit(action: CoAction, tol: float = 1e-9) -> int:
    """dim A minus the dimension of the algebra generated by the u-entries."""
    alg = action.group.algebra
    elems = [alg.unit()] + [e for row in action.u for e in row]
    basis_vecs: List[np.ndarray] = []

    def absorb(vec) -> bool:
        v = vec.astype(complex)
        for b in basis_vecs:
            v = v - (b.conj() @ v) * b
        nv = np.linalg.norm(v)
        if nv > max(tol, 1e-10):
            basis_vecs.append(v / nv)
            return True
        return False

    frontier = []
    for e in elems:
        if absorb(e.vec()):
            frontier.append(e)
    while frontier and len(basis_vecs) < alg.dim:
        new_frontier = []
        for a in frontier:
            for row in action.u:
                for e in row:
                    prod = a * e
                    if absorb(prod.vec()):
                        new_frontier.append(prod)
        frontier = new_frontier
    return alg.dim - len(basis_vecs)


def act_on_point(action: CoAction, x: int, psi: StateFunctional,
                 tol: float = 1e-9) -> ProbVector:
    """x <| psi: the distribution with mass psi(u_xj) at j."""
    mass = [psi.value(action.u[x][j]).real for j in range(action.n)]
    return prob_vector(mass, tol=tol)


def act_on_function(action: CoAction, psi: StateFunctional, f) -> Tuple[float, ...]:
    """psi |> f = (id (x) psi) rho(f); satisfies (psi|>f)(x) = (x <| psi)(f)."""
    if len(f) != action.n:
        raise ShapeMismatch("function length differs from the space")
    out = []
    for x in range(action.n):
        out.append(sum(float(v) * psi.value(action.u[x][j]).real
                       for j, v in enumerate(f)))
    return tuple(out)


def a_element(action: CoAction, x: int, S) -> AlgElement:
    """The quantum indicator of "x lands in S": sum_{j in S} u_xj."""
    acc = action.group.algebra.zero()
    for j in S:
        acc = acc + action.u[x][j]
    return acc


def orbits(action: CoAction, tol: float = 1e-9) -> List[FrozenSet[int]]:
    """O_x = {j : u_xj != 0}; verified to be a partition of the points."""
    n = action.n
    sets = [frozenset(j for j in range(n) if action.u[x][j].norm() > tol)
            for x in range(n)]
    for x in range(n):
        if x not in sets[x]:
            raise NotAPartition(f"{x} not in its own orbit")
        for y in range(n):
            if sets[x] & sets[y] and sets[x] != sets[y]:
                raise NotAPartition(f"orbits of {x} and {y} overlap but differ")
    out = []
    for s in sets:
        if s not in out:
            out.append(s)
    return out
