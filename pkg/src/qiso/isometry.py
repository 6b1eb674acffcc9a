"""Decision procedures for the isometry conditions of a coaction.

Conditions checked per state or universally over all states of the algebra:

  D         the distance row identity rho(d_y)(x) = kappa(rho(d_x)(y))
  Lip_p     every state contracts the Wasserstein-p distance (p in [1, inf])
  Lip_inf   a coupling of (x <| psi, y <| psi) lives on {d <= d(x,y)}
  main      a coupling lives on the level set {d = d(x,y)}

Universal quantification over states is resolved exactly: the sup of
psi(a) over states of a block algebra is the largest block eigenvalue, so
each universal condition reduces to finitely many extremal-eigenvalue
bounds over polytope vertices (finite p), or to positivity of finitely
many self-adjoint elements indexed by subsets (the coupling-support
conditions).  In rational mode positivity is decided by exact principal
minors on the rationalized blocks; float mode uses Hermitian eigensolvers
with one tolerance.
"""

from __future__ import annotations

import itertools
import random
from dataclasses import dataclass
from fractions import Fraction
from typing import Dict, Optional, Tuple

import numpy as np

from .algebra import (AlgElement, StateFunctional, exact_psd, extreme_state,
                      hermitian_max_eig)
from .coaction import CoAction, a_element, act_on_function, act_on_point
from .errors import QisoError, SizeGuardExceeded
from .metric import (ball, level_set, lipschitz_constant, sublevel_set)
from .scalars import RATIONAL
from .transport import (ProbVector, enumerate_boxed_dual_vertices,
                        enumerate_lipschitz_vertices, prob_vector,
                        transport_with_power, wasserstein_inf,
                        wasserstein_p)


class KappaConventionMismatch(QisoError):
    pass


class HypothesisViolated(QisoError):
    pass


@dataclass
class IsometryVerdict:
    condition: str
    holds: bool
    witness: Optional[dict] = None      # present iff holds is False
    certificate: Optional[dict] = None  # the quantity family when it holds

    def as_dict(self) -> dict:
        return {"condition": self.condition, "holds": self.holds,
                "witness": self.witness, "certificate": self.certificate}


# ---------------------------------------------------------------------------
# shared helpers

_VERTEX_CACHE: Dict[tuple, list] = {}


def lipschitz_vertices_cached(space):
    key = (space.key(), "lip")
    if key not in _VERTEX_CACHE:
        _VERTEX_CACHE[key] = enumerate_lipschitz_vertices(space)
    return _VERTEX_CACHE[key]


def boxed_vertices_cached(space, p):
    key = (space.key(), "dual", p)
    if key not in _VERTEX_CACHE:
        _VERTEX_CACHE[key] = enumerate_boxed_dual_vertices(space, p)
    return _VERTEX_CACHE[key]


def _rationalize(x: float, max_den: int = 4096) -> Optional[Fraction]:
    """The exact small-denominator rational equal to x, if there is one."""
    f = Fraction(x).limit_denominator(max_den)
    return f if float(f) == x else None


def _exact_entries(mat: np.ndarray) -> Optional[list]:
    """Matrix of (re, im) Fraction pairs when every entry is exactly a
    small rational; None otherwise."""
    out = []
    for row in np.atleast_2d(mat):
        orow = []
        for v in row:
            re = _rationalize(float(v.real))
            im = _rationalize(float(v.imag))
            if re is None or im is None:
                return None
            orow.append((re, im))
        out.append(orow)
    return out


_BORDERLINE = 1e-6  # only near-ties are re-decided by exact minors


def _lambda_max_leq(mat: np.ndarray, bound, tol: float, exact: bool) -> Tuple[bool, float]:
    """Decide lambda_max(mat) <= bound; returns (verdict, float margin).

    Away from the boundary the float eigenvalue is decisive; inside the
    borderline window, rational mode re-decides by exact principal minors
    of bound - mat (falling back to the tolerance when some entry is not
    a recognizable rational)."""
    lam = hermitian_max_eig(mat)
    margin = lam - float(bound)
    if not exact or abs(margin) > _BORDERLINE:
        return margin <= tol, margin
    entries = _exact_entries(mat)
    if entries is None:
        return margin <= tol, margin
    b = Fraction(bound)
    shifted = [[((b - re) if i == j else -re, -im)
                for j, (re, im) in enumerate(row)]
               for i, row in enumerate(entries)]
    return _psd_pairs(shifted), margin


def _lambda_min_geq0(elem: AlgElement, tol: float, exact: bool) -> Tuple[bool, float]:
    """Decide elem >= 0 (as an operator); returns (verdict, float min eig)."""
    lam = elem.min_eig()
    if not exact or abs(lam) > _BORDERLINE:
        return lam >= -tol, lam
    if all(_exact_entries(m) is not None for m in elem.data):
        return exact_psd(elem), lam
    return lam >= -tol, lam


def _psd_pairs(pairs) -> bool:
    """PSD test for a Hermitian matrix given as (re, im) Fraction pairs."""
    from .algebra import _det_fraction
    m = len(pairs)
    if all(im == 0 for row in pairs for _, im in row):
        real = [[re for re, _ in row] for row in pairs]
    else:
        real = [[Fraction(0)] * (2 * m) for _ in range(2 * m)]
        for i in range(m):
            for j in range(m):
                re, im = pairs[i][j]
                real[i][j] = re
                real[m + i][m + j] = re
                real[i][m + j] = -im
                real[m + i][j] = im
    size = len(real)
    for k in range(1, size + 1):
        for subset in itertools.combinations(range(size), k):
            minor = [[real[i][j] for j in subset] for i in subset]
            if _det_fraction(minor) < 0:
                return False
    return True


def _pairs(n: int):
    return [(x, y) for x in range(n) for y in range(n) if x != y]


def _use_exact(action: CoAction, mode: str) -> bool:
    if mode == "float":
        return False
    return action.space.mode == RATIONAL


# ---------------------------------------------------------------------------
# condition (D)


def commutator_defects(action: CoAction) -> Dict[Tuple[int, int], AlgElement]:
    """The defect elements c_xy = sum_j d(y,j) u_xj - sum_j d(x,j) kappa(u_yj);
    all zero exactly when condition (D) holds."""
    qg = action.group
    d = action.space.dist
    n = action.n
    out = {}
    for x in range(n):
        for y in range(n):
            lhs = qg.algebra.zero()
            rhs = qg.algebra.zero()
            for j in range(n):
                lhs = lhs + float(d[y][j]) * action.u[x][j]
                rhs = rhs + float(d[x][j]) * qg.apply_kappa(action.u[y][j])
            out[(x, y)] = lhs - rhs
    return out


def check_D(action: CoAction, tol: float = 1e-9) -> IsometryVerdict:
    """Compare rho(d_y)(x) with kappa(rho(d_x)(y)) in norm, all pairs."""
    worst = 0.0
    worst_pair = None
    for (x, y), c in sorted(commutator_defects(action).items()):
        r = c.norm()
        if r > worst:
            worst, worst_pair = r, (x, y)
    if worst <= tol:
        return IsometryVerdict("D", True, certificate={"max_residual": worst})
    return IsometryVerdict("D", False,
                           witness={"pair": worst_pair, "residual": worst})


def check_D_commutant(action: CoAction, tol: float = 1e-9) -> IsometryVerdict:
    """Equivalent form when kappa(u_ij) = u_ji: the magic unitary commutes
    with the scalar distance matrix."""
    qg = action.group
    n = action.n
    for i in range(n):
        for j in range(n):
            if (qg.apply_kappa(action.u[i][j]) - action.u[j][i]).norm() > tol:
                raise KappaConventionMismatch(
                    f"kappa(u[{i}][{j}]) != u[{j}][{i}]")
    d = action.space.dist
    worst = 0.0
    worst_pair = None
    for x in range(n):
        for y in range(n):
            ud = qg.algebra.zero()
            du = qg.algebra.zero()
            for j in range(n):
                ud = ud + action.u[x][j] * float(d[j][y])
                du = du + float(d[x][j]) * action.u[j][y]
            r = (ud - du).norm()
            if r > worst:
                worst, worst_pair = r, (x, y)
    if worst <= tol:
        return IsometryVerdict("D", True, certificate={"max_residual": worst})
    return IsometryVerdict("D", False,
                           witness={"pair": worst_pair, "residual": worst})


def check_ball_identity(action: CoAction, tol: float = 1e-9) -> float:
    """Max residual of a_{x;B(y,I)} = kappa(a_{y;B(x,I)}) over all pairs and
    all realized closed balls and realized intervals I."""
    space = action.space
    qg = action.group
    radii = space.realized_distances
    intervals = [(radii[0], r) for r in radii] + \
        [(r1, r2) for r1 in radii for r2 in radii if 0 < r1 <= r2]
    worst = 0.0
    for x in range(space.n):
        for y in range(space.n):
            for I in intervals:
                lhs = a_element(action, x, ball(space, y, I))
                rhs = qg.apply_kappa(a_element(action, y, ball(space, x, I)))
                worst = max(worst, (lhs - rhs).norm())
    return worst


# ---------------------------------------------------------------------------
# per-state conditions


def check_D_state(action: CoAction, psi: StateFunctional,
                  tol: float = 1e-9) -> IsometryVerdict:
    """Membership of psi in the (D)-isometric functionals: psi kills every
    defect element, i.e. (x <| psi)(d_y) = (y <| bar psi)(d_x)."""
    worst = None
    for (x, y), c in sorted(commutator_defects(action).items()):
        r = abs(psi.value(c))
        if worst is None or r > worst[0]:
            worst = (r, (x, y))
    if worst[0] <= tol:
        return IsometryVerdict("D(state)", True,
                               certificate={"max_residual": worst[0]})
    return IsometryVerdict("D(state)", False,
                           witness={"pair": worst[1], "residual": worst[0]})


def check_lip_p_state(action: CoAction, psi: StateFunctional, p,
                      tol: float = 1e-9) -> IsometryVerdict:
    """W_p(x <| psi, y <| psi) <= d(x,y) for all pairs, one state."""
    space = action.space
    tag = f"Lip_{p}(state)"
    worst = None
    for x, y in _pairs(space.n):
        mu = act_on_point(action, x, psi, tol=tol)
        nu = act_on_point(action, y, psi, tol=tol)
        if p == float("inf") or p == "inf":
            w = float(wasserstein_inf(space, mu, nu).r)
        else:
            w = float(wasserstein_p(space, mu, nu, p))
        margin = w - float(space.dist[x][y])
        if worst is None or margin > worst[0]:
            worst = (margin, (x, y), w)
    if worst[0] <= tol:
        return IsometryVerdict(tag, True, certificate={"max_margin": worst[0]})
    return IsometryVerdict(tag, False, witness={
        "pair": worst[1], "wasserstein": worst[2], "margin": worst[0]})


def check_lip_seminorm_state(action: CoAction, psi: StateFunctional,
                             samples: int = 50, seed: int = 0,
                             tol: float = 1e-9) -> bool:
    """L(psi |> f) <= L(f) on random functions and all polytope vertices."""
    space = action.space
    rng = random.Random(seed)
    fns = [tuple(rng.uniform(-1.0, 1.0) for _ in range(space.n))
           for _ in range(samples)]
    fns += [tuple(float(v) for v in f) for f in lipschitz_vertices_cached(space)]
    for f in fns:
        lf = lipschitz_constant(space, f)
        lg = lipschitz_constant(space, act_on_function(action, psi, f))
        if float(lg) > float(lf) + tol:
            return False
    return True


# ---------------------------------------------------------------------------
# universal conditions, finite p


def _block_stack(action: CoAction, k: int) -> np.ndarray:
    """u entries of block k as an (n, n, b, b) array."""
    n = action.n
    return np.array([[action.u[i][j].data[k] for j in range(n)]
                     for i in range(n)])


def check_lip1_universal(action: CoAction, tol: float = 1e-9,
                         mode: str = "auto") -> IsometryVerdict:
    """For every pair and every vertex f of the Lipschitz polytope, the
    largest eigenvalue of sum_j f_j (u_xj - u_yj) must stay below d(x,y)."""
    space = action.space
    exact = _use_exact(action, mode)
    vertices = lipschitz_vertices_cached(space)
    blocks = action.group.algebra.blocks
    stacks = [_block_stack(action, k) for k in range(len(blocks))]
    worst = None
    for x, y in _pairs(space.n):
        bound = space.dist[x][y]
        for f in vertices:
            fv = np.array([float(v) for v in f])
            for k in range(len(blocks)):
                mat = np.einsum("j,jab->ab", fv, stacks[k][x] - stacks[k][y])
                ok, margin = _lambda_max_leq(mat, bound, tol, exact)
                if worst is None or margin > worst[0]:
                    worst = (margin, (x, y), f, k)
                if not ok:
                    state = _eigen_state(action, k, mat)
                    return IsometryVerdict(
                        "Lip_1(universal)", False,
                        witness={"pair": (x, y), "vertex": [str(v) for v in f],
                                 "block": k, "margin": margin,
                                 "state": state})
    return IsometryVerdict("Lip_1(universal)", True,
                           certificate={"max_margin": worst[0] if worst else 0.0})


def _eigen_state(action: CoAction, k: int, mat: np.ndarray) -> StateFunctional:
    """The vector state on block k induced by the top eigenvector."""
    if mat.shape == (1, 1):
        xi = np.array([1.0 + 0j])
    else:
        _, vecs = np.linalg.eigh(mat)
        xi = vecs[:, -1]
    return extreme_state(action.group.algebra, k, xi)


def _exact_prob(mass) -> Optional[ProbVector]:
    fracs = [_rationalize(float(m)) for m in mass]
    if any(f is None for f in fracs) or sum(fracs) != 1:
        return None
    return ProbVector(tuple(fracs))


def check_lip_p_universal(action: CoAction, p, tol: float = 1e-9,
                          mode: str = "auto") -> IsometryVerdict:
    """Exact universal (Lip_p) decision, blockwise.

    The map psi -> W_p^p(x <| psi, y <| psi) is convex, so its sup over
    the state space sits on pure states, which live on single blocks.  A
    1x1 block carries exactly one state (its character): solve that
    transport problem outright.  A larger block is handled through the
    boxed dual polytope: for each vertex (f, g) the sup over block states
    of psi(sum f_j u_xj + sum g_j u_yj) is the top block eigenvalue, and
    the sup over the dual polytope of that convex objective is attained at
    one of the enumerated vertices.
    """
    if p == float("inf") or p == "inf":
        return check_winf_universal(action, tol=tol, mode=mode)
    if p < 1:
        raise ValueError("p must be >= 1")
    space = action.space
    exact = _use_exact(action, mode) and float(p).is_integer()
    tag = f"Lip_{p}(universal)"
    blocks = action.group.algebra.blocks
    stacks = [_block_stack(action, k) for k in range(len(blocks))]
    big_blocks = [k for k, b in enumerate(blocks) if b > 1]
    vertices = boxed_vertices_cached(space, p) if big_blocks else []
    worst = None

    for x, y in _pairs(space.n):
        d_xy = space.dist[x][y]
        bound_pow = d_xy ** int(p) if exact else float(d_xy) ** float(p)
        # 1x1 blocks: one state each
        for k, b in enumerate(blocks):
            if b != 1:
                continue
            chi = extreme_state(action.group.algebra, k, np.array([1.0 + 0j]))
            mu_f = [float(chi.value(action.u[x][j]).real) for j in range(space.n)]
            nu_f = [float(chi.value(action.u[y][j]).real) for j in range(space.n)]
            mu = _exact_prob(mu_f) if exact else None
            nu = _exact_prob(nu_f) if exact else None
            if mu is None or nu is None:
                mu, nu = prob_vector(mu_f, tol), prob_vector(nu_f, tol)
            value = transport_with_power(space, mu, nu, p).value
            margin = float(value) ** (1 / float(p)) - float(d_xy)
            ok = (value <= bound_pow) if exact and isinstance(value, Fraction) \
                else margin <= tol
            if worst is None or margin > worst[0]:
                worst = (margin, (x, y), k)
            if not ok:
                return IsometryVerdict(tag, False, witness={
                    "pair": (x, y), "block": k, "kind": "character",
                    "wasserstein_power": float(value), "margin": margin})
        # bigger blocks: vertex sweep with blockwise lambda_max
        for k in big_blocks:
            for vert in vertices:
                fv = np.array([float(v) for v in vert.f])
                gv = np.array([float(v) for v in vert.g])
                mat = np.einsum("j,jab->ab", fv, stacks[k][x]) + \
                    np.einsum("j,jab->ab", gv, stacks[k][y])
                ok, margin_pow = _lambda_max_leq(mat, bound_pow, tol, exact)
                if worst is None or margin_pow > worst[0]:
                    worst = (margin_pow, (x, y), k)
                if not ok:
                    state = _eigen_state(action, k, mat)
                    return IsometryVerdict(tag, False, witness={
                        "pair": (x, y), "block": k, "kind": "dual-vertex",
                        "vertex": ([str(v) for v in vert.f],
                                   [str(v) for v in vert.g]),
                        "margin": margin_pow, "state": state})
    return IsometryVerdict(tag, True,
                           certificate={"max_margin": worst[0] if worst else 0.0})


# ---------------------------------------------------------------------------
# universal coupling-support conditions (p = inf and the level-set theorem)


def _support_universal(action: CoAction, tag: str, level_only: bool,
                       tol: float, mode: str,
                       max_points: int = 20) -> IsometryVerdict:
    """For all x, y and every subset S, the element a_{y;T} - a_{x;S} with
    T = p12^Y(S) must be positive, where Y is the (sub)level set of d(x,y).
    Positivity under every state is extremal-eigenvalue positivity."""
    space = action.space
    n = space.n
    if n > max_points:
        raise SizeGuardExceeded(f"subset exhaustion guarded at n <= {max_points}")
    exact = _use_exact(action, mode)
    worst = None
    for x, y in _pairs(n):
        Y = (level_set if level_only else sublevel_set)(space, space.dist[x][y])
        for size in range(n + 1):
            for S in itertools.combinations(range(n), size):
                T = frozenset(j for i in S for j in range(n) if (i, j) in Y)
                elem = a_element(action, y, T) - a_element(action, x, S)
                ok, lam = _lambda_min_geq0(elem, tol, exact)
                if worst is None or lam < worst[0]:
                    worst = (lam, (x, y), S)
                if not ok:
                    k = int(np.argmin([np.linalg.eigvalsh(m)[0]
                                       for m in elem.data]))
                    return IsometryVerdict(tag, False, witness={
                        "pair": (x, y), "subset": list(S),
                        "min_eigenvalue": lam, "block": k,
                        "state": _eigen_state(action, k, -elem.data[k])})
    return IsometryVerdict(tag, True,
                           certificate={"min_eigenvalue": worst[0] if worst else 0.0})


def check_winf_universal(action: CoAction, tol: float = 1e-9,
                         mode: str = "auto") -> IsometryVerdict:
    """All states admit a coupling supported on pairs at distance <= d(x,y)."""
    return _support_universal(action, "Lip_inf(universal)", False, tol, mode)


def check_theorem_main(action: CoAction, tol: float = 1e-9,
                       mode: str = "auto") -> IsometryVerdict:
    """All states admit a coupling supported on the exact level set."""
    return _support_universal(action, "main(universal)", True, tol, mode)


def check_level_coupling_state(action: CoAction, psi: StateFunctional,
                               tol: float = 1e-9) -> IsometryVerdict:
    """Per-state version of the level-set coupling, via the feasibility
    solver on each pair."""
    from .hall import HallInstance, decide_hall
    space = action.space
    for x, y in _pairs(space.n):
        mu = act_on_point(action, x, psi, tol=tol)
        nu = act_on_point(action, y, psi, tol=tol)
        Y = level_set(space, space.dist[x][y])
        verdict = decide_hall(HallInstance(mu, nu, Y))
        if not verdict.feasible:
            return IsometryVerdict("main(state)", False, witness={
                "pair": (x, y), "violating_subset": sorted(verdict.violator)})
    return IsometryVerdict("main(state)", True, certificate={})


# ---------------------------------------------------------------------------
# structural consequences


def check_orthogonality(action: CoAction, x: int, y: int, S, T, delta,
                        tol: float = 1e-9) -> bool:
    """a_{x;S} a_{y;T} = 0 whenever every (s, t) has |d(s,t) - d(x,y)| >= delta."""
    space = action.space
    d_xy = space.dist[x][y]
    for s in S:
        for t in T:
            if abs(space.dist[s][t] - d_xy) < delta:
                raise HypothesisViolated(
                    f"|d({s},{t}) - d({x},{y})| < delta")
    prod = a_element(action, x, S) * a_element(action, y, T)
    return prod.norm() <= tol


def sample_orthogonality_inputs(action: CoAction, count: int, seed: int):
    """Admissible (x, y, S, T, delta) tuples for the orthogonality check."""
    space = action.space
    n = space.n
    rng = random.Random(seed)
    realized = space.realized_distances
    out = []
    attempts = 0
    while len(out) < count and attempts < count * 200:
        attempts += 1
        x, y = rng.randrange(n), rng.randrange(n)
        d_xy = space.dist[x][y]
        gaps = [abs(r - d_xy) for r in realized if r != d_xy]
        if not gaps:
            continue
        delta = min(gaps)
        size = rng.randint(1, n)
        S = frozenset(rng.sample(range(n), size))
        allowed = [t for t in range(n)
                   if all(abs(space.dist[s][t] - d_xy) >= delta for s in S)]
        if not allowed:
            continue
        T = frozenset(rng.sample(allowed, rng.randint(1, len(allowed))))
        out.append((x, y, S, T, delta))
    return out


def check_injectivity(action: CoAction, tol: float = 1e-9) -> bool:
    """rho is one-to-one iff f -> (sum_j f_j u_xj)_x has full rank n."""
    n = action.n
    cols = []
    for j in range(n):
        cols.append(np.concatenate([action.u[x][j].vec() for x in range(n)]))
    rank = np.linalg.matrix_rank(np.column_stack(cols), tol=tol)
    return int(rank) == n
