"""Finite metric spaces, their derived point/pair sets, and Lipschitz data.

Points are dense indices 0..n-1; labels are cosmetic.  Distances are either
all rational (exact mode) or all float (comparisons within a tolerance).
"""

from __future__ import annotations

import math
import random
from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property
from typing import Optional, Sequence, Tuple

from .errors import DimensionMismatch, QisoError
from .scalars import DEFAULT_TOL, FLOAT, RATIONAL, Scalar, is_rational, tol_for


class MetricError(QisoError):
    """A distance matrix failed validation; carries a witness."""

    def __init__(self, message, witness=None):
        super().__init__(message)
        self.witness = witness


class AsymmetricMatrix(MetricError):
    pass


class NegativeDistance(MetricError):
    pass


class NonzeroDiagonal(MetricError):
    pass


class TriangleViolation(MetricError):
    pass


# A real-valued function on X is just its vector of values, length n.
RealFunction = Sequence[Scalar]


@dataclass(frozen=True)
class PairSet:
    """A subset of X x X as an n x n boolean membership matrix."""

    member: Tuple[Tuple[bool, ...], ...]

    @property
    def n(self) -> int:
        return len(self.member)

    def __contains__(self, pair) -> bool:
        i, j = pair
        return self.member[i][j]

    def pairs(self):
        for i, row in enumerate(self.member):
            for j, m in enumerate(row):
                if m:
                    yield (i, j)

    def transpose(self) -> "PairSet":
        n = self.n
        return PairSet(tuple(tuple(self.member[j][i] for j in range(n)) for i in range(n)))

    def union(self, other: "PairSet") -> "PairSet":
        return PairSet(tuple(tuple(a or b for a, b in zip(ra, rb))
                             for ra, rb in zip(self.member, other.member)))

    def issubset(self, other: "PairSet") -> bool:
        return all(not a or b for ra, rb in zip(self.member, other.member)
                   for a, b in zip(ra, rb))

    @staticmethod
    def from_pairs(n: int, pairs) -> "PairSet":
        grid = [[False] * n for _ in range(n)]
        for i, j in pairs:
            grid[i][j] = True
        return PairSet(tuple(tuple(row) for row in grid))

    @staticmethod
    def all_pairs(n: int) -> "PairSet":
        return PairSet(tuple(tuple(True for _ in range(n)) for _ in range(n)))

    @staticmethod
    def diagonal(n: int) -> "PairSet":
        return PairSet(tuple(tuple(i == j for j in range(n)) for i in range(n)))


@dataclass(frozen=True)
class FiniteMetricSpace:
    """n points with a validated symmetric distance matrix."""

    n: int
    dist: Tuple[Tuple[Scalar, ...], ...]
    labels: Optional[Tuple[str, ...]] = None
    mode: str = RATIONAL
    tol: float = field(default=DEFAULT_TOL, compare=False)

    def d(self, i: int, j: int) -> Scalar:
        return self.dist[i][j]

    def row(self, x: int) -> Tuple[Scalar, ...]:
        """The function d_x = d(x, -)."""
        return self.dist[x]

    @cached_property
    def realized_distances(self) -> Tuple[Scalar, ...]:
        """Sorted distinct values of d, including 0."""
        return tuple(sorted(set(v for row in self.dist for v in row)))

    @cached_property
    def max_distance(self) -> Scalar:
        return self.realized_distances[-1]

    def key(self):
        """Hashable identity used for memoizing per-space computations."""
        return self.dist


def validate_metric(matrix, tolerance: Scalar = None, labels=None,
                    mode: str = None) -> FiniteMetricSpace:
    """Check the metric axioms and return the validated space.

    Errors carry a witness: the offending index pair or triple.
    """
    n = len(matrix)
    if any(len(row) != n for row in matrix):
        raise DimensionMismatch("distance matrix is not square")
    if n < 1:
        raise DimensionMismatch("empty distance matrix")
    if mode is None:
        mode = RATIONAL if all(is_rational(v) for row in matrix for v in row) else FLOAT
    tol = tol_for(mode, DEFAULT_TOL if tolerance is None else tolerance)

    dist = tuple(tuple(row) for row in matrix)
    for i in range(n):
        if abs(dist[i][i]) > tol:
            raise NonzeroDiagonal(f"d({i},{i}) = {dist[i][i]} != 0", witness=(i,))
        for j in range(n):
            if abs(dist[i][j] - dist[j][i]) > tol:
                raise AsymmetricMatrix(
                    f"d({i},{j}) = {dist[i][j]} != {dist[j][i]} = d({j},{i})",
                    witness=(i, j))
            if dist[i][j] < -tol:
                raise NegativeDistance(f"d({i},{j}) = {dist[i][j]} < 0", witness=(i, j))
            if i != j and dist[i][j] <= tol:
                raise NegativeDistance(
                    f"d({i},{j}) = {dist[i][j]} vanishes for distinct points",
                    witness=(i, j))
    for i in range(n):
        for j in range(n):
            for k in range(n):
                if dist[i][k] - (dist[i][j] + dist[j][k]) > tol:
                    raise TriangleViolation(
                        f"d({i},{k}) > d({i},{j}) + d({j},{k}): "
                        f"{dist[i][k]} > {dist[i][j]} + {dist[j][k]}",
                        witness=(i, j, k))
    if labels is not None:
        labels = tuple(labels)
        if len(labels) != n:
            raise DimensionMismatch("label count differs from point count")
    return FiniteMetricSpace(n=n, dist=dist, labels=labels, mode=mode,
                             tol=float(tol) if tol else DEFAULT_TOL)


def lipschitz_constant(space: FiniteMetricSpace, f: RealFunction) -> Scalar:
    """max over i != j of |f_i - f_j| / d(i,j); 0 for constant f."""
    if len(f) != space.n:
        raise DimensionMismatch(f"function has length {len(f)}, space has {space.n}")
    best = Fraction(0) if space.mode == RATIONAL else 0.0
    for i in range(space.n):
        for j in range(i + 1, space.n):
            ratio = abs(f[i] - f[j]) / space.dist[i][j]
            if ratio > best:
                best = ratio
    return best


def ball(space: FiniteMetricSpace, x: int, interval) -> frozenset:
    """{j : lo <= d(x,j) <= hi}; the closed ball B(x,r) is the case [0, r]."""
    lo, hi = interval
    if not (0 <= lo <= hi):
        raise ValueError(f"bad interval [{lo}, {hi}]")
    tol = tol_for(space.mode, space.tol)
    return frozenset(j for j in range(space.n)
                     if lo - tol <= space.dist[x][j] <= hi + tol)


def level_set(space: FiniteMetricSpace, r: Scalar) -> PairSet:
    """{(i,j) : d(i,j) = r}, exactly in rational mode, within tol otherwise."""
    tol = tol_for(space.mode, space.tol)
    return PairSet(tuple(tuple(abs(v - r) <= tol for v in row) for row in space.dist))


def sublevel_set(space: FiniteMetricSpace, r: Scalar) -> PairSet:
    """{(i,j) : d(i,j) <= r}."""
    tol = tol_for(space.mode, space.tol)
    return PairSet(tuple(tuple(v <= r + tol for v in row) for row in space.dist))


def random_metric_space(n: int, seed: int, model: str = "shortest-path-graph",
                        mode: str = None) -> FiniteMetricSpace:
    """Deterministic-in-seed generator of valid spaces.

    euclidean-sample: distances of points sampled in the plane (float mode).
    shortest-path-graph: all-pairs shortest paths of a random connected
    weighted graph with small dyadic weights (rational mode), so entries
    stay exact even after conversion to float.
    """
    if n < 2:
        raise ValueError("need at least 2 points")
    rng = random.Random(seed)
    if model == "euclidean-sample":
        pts = []
        while len(pts) < n:
            p = (rng.uniform(0.0, 10.0), rng.uniform(0.0, 10.0))
            if all(math.hypot(p[0] - q[0], p[1] - q[1]) > 1e-2 for q in pts):
                pts.append(p)
        dist = [[math.hypot(pts[i][0] - pts[j][0], pts[i][1] - pts[j][1])
                 for j in range(n)] for i in range(n)]
        space = validate_metric(dist, mode=FLOAT)
    elif model == "shortest-path-graph":
        big = Fraction(10 ** 6)
        w = [[big] * n for _ in range(n)]
        for i in range(n):
            w[i][i] = Fraction(0)
        order = list(range(n))
        rng.shuffle(order)
        for a, b in zip(order, order[1:]):  # random spanning path: connected
            w[a][b] = w[b][a] = Fraction(rng.randint(1, 12), rng.choice((1, 2, 4)))
        for i in range(n):
            for j in range(i + 1, n):
                if w[i][j] == big and rng.random() < 0.4:
                    w[i][j] = w[j][i] = Fraction(rng.randint(1, 12), rng.choice((1, 2, 4)))
        for k in range(n):
            for i in range(n):
                for j in range(n):
                    through = w[i][k] + w[k][j]
                    if through < w[i][j]:
                        w[i][j] = through
        space = validate_metric(w, mode=RATIONAL)
    else:
        raise ValueError(f"unknown model {model!r}")
    if mode is not None and mode != space.mode:
        if mode == FLOAT:
            space = validate_metric(
                [[float(v) for v in row] for row in space.dist], mode=FLOAT)
        else:
            raise ValueError("cannot promote float samples to rational mode")
    return space
