"""Geodesic segments and their kappa-classification.

All distances are combinatorial.  Nearest-point projection to a geodesic is
set valued in the l1 metric, so a vertex projects to a parameter interval
[pmin, pmax]; ``x_b`` always denotes the nearest vertex with the smallest
parameter.  In a median graph the distance from p to the interval I(x, y)
equals the Gromov product (d(p,x) + d(p,y) - d(x,y)) / 2, which is how the
slimness conditions are evaluated without enumerating geodesics.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from functools import cached_property
from typing import Sequence

import numpy as np
from scipy.sparse.csgraph import shortest_path

from .core import EXHAUSTIVE_LIMIT, CubeComplex, bools_from_mask
from .errors import GeodesicError, NoAdmissibleParameterError
from .kappa import KappaFunction
from .separation import DEFAULT_BUDGET, well_separation

EPS = 1e-9


class GeodesicPath:
    """A combinatorial geodesic b(0..T) starting at the basepoint."""

    def __init__(self, cc: CubeComplex, vertices: Sequence[int], name: str = "b"):
        verts = tuple(cc.check_vertex(v) for v in vertices)
        if not verts:
            raise GeodesicError("empty vertex sequence")
        if verts[0] != cc.basepoint:
            raise GeodesicError(f"path starts at {verts[0]}, not at the basepoint {cc.basepoint}")
        crossed = []
        for i, (u, v) in enumerate(zip(verts, verts[1:])):
            if v not in cc.adjacency[u]:
                raise GeodesicError(f"b({i})={u} and b({i + 1})={v} are not adjacent")
            crossed.append((cc.codes[u] ^ cc.codes[v]).bit_length() - 1)
        self.cc = cc
        self.name = name
        self.vertices = verts
        self.crossed = tuple(crossed)
        repeated = len(set(crossed)) != len(crossed)
        idx = np.arange(len(verts))
        isometric = np.array_equal(self.dist[:, list(verts)], np.abs(idx[:, None] - idx[None, :]))
        if repeated or not isometric:
            raise GeodesicError(f"path {name!r} crosses a hyperplane twice, so it is not a geodesic")

    @property
    def length(self) -> int:
        return len(self.vertices) - 1

    def __len__(self) -> int:
        return len(self.vertices)

    @cached_property
    def dist(self) -> np.ndarray:
        """dist[i, v] = d(b(i), v)."""
        return self.cc.distance_rows(self.vertices)

    @cached_property
    def dist_to_path(self) -> np.ndarray:
        return self.dist.min(axis=0)

    @cached_property
    def pmin(self) -> np.ndarray:
        return np.argmax(self.dist == self.dist_to_path, axis=0)

    @cached_property
    def pmax(self) -> np.ndarray:
        flipped = self.dist[::-1] == self.dist_to_path
        return self.length - np.argmax(flipped, axis=0)

    @cached_property
    def norms(self) -> np.ndarray:
        return self.dist[0]

    def __repr__(self) -> str:
        return f"GeodesicPath({self.name!r}, T={self.length})"


def project_to_path(cc: CubeComplex, b: GeodesicPath, x: int) -> tuple[tuple[int, int], frozenset[int]]:
    """Nearest vertices of ``b`` to ``x`` with their parameter range."""
    x = cc.check_vertex(x)
    col = b.dist[:, x]
    params = np.flatnonzero(col == col.min())
    return (int(params[0]), int(params[-1])), frozenset(b.vertices[i] for i in params)


def sample_vertices(b: GeodesicPath, samples: int | None, seed: int) -> np.ndarray:
    """All vertices for small complexes, else a seeded sample stratified by
    distance to ``b`` (equal share per distance, spare budget reassigned)."""
    n = b.cc.n_vertices
    if samples is None:
        samples = EXHAUSTIVE_LIMIT
    if samples <= 0:
        raise ValueError("sample budget must be positive")
    if n <= max(samples, EXHAUSTIVE_LIMIT):
        return np.arange(n)
    rng = np.random.default_rng(seed)
    strata = [np.flatnonzero(b.dist_to_path == d) for d in np.unique(b.dist_to_path)]
    quota = [0] * len(strata)
    left = samples
    open_ids = [i for i, s in enumerate(strata)]
    while left > 0 and open_ids:
        share = max(1, left // len(open_ids))
        for i in list(open_ids):
            take = min(share, len(strata[i]) - quota[i], left)
            quota[i] += take
            left -= take
            if quota[i] == len(strata[i]):
                open_ids.remove(i)
            if left == 0:
                break
    picked = [rng.choice(s, size=q, replace=False) for s, q in zip(strata, quota) if q]
    return np.sort(np.concatenate(picked))


# -- contraction ---------------------------------------------------------------

@dataclass
class ContractionProfile:
    """Per-sample projection diameters and the empirical contraction constants.

    ``constant`` normalizes by kappa(|x|), ``constant_projection`` by kappa(|x_b|).
    """

    kappa: str
    x: np.ndarray
    norm: np.ndarray
    dist_to_path: np.ndarray
    diameter: np.ndarray
    ratio: np.ndarray
    ratio_projection: np.ndarray
    skipped: int

    @property
    def constant(self) -> float:
        return float(self.ratio.max()) if self.ratio.size else 0.0

    @property
    def constant_projection(self) -> float:
        return float(self.ratio_projection.max()) if self.ratio_projection.size else 0.0

    def rows(self) -> list[dict]:
        return [
            {"x": int(x), "norm": int(n), "dist_to_path": int(d), "diameter": int(m),
             "ratio": float(r), "ratio_projection": float(rp)}
            for x, n, d, m, r, rp in zip(self.x, self.norm, self.dist_to_path, self.diameter,
                                         self.ratio, self.ratio_projection)
        ]


def contraction_profile(cc: CubeComplex, b: GeodesicPath, kappa: KappaFunction,
                        samples: int | None = None, seed: int = 0) -> ContractionProfile:
    """For each sampled x off ``b``: the largest diam(proj(x) u proj(y)) over
    y with d(x, y) <= d(x, b)."""
    xs = sample_vertices(b, samples, seed)
    pmin, pmax = b.pmin, b.pmax
    keep, diam = [], []
    for x in xs.tolist():
        r = b.dist_to_path[x]
        if r == 0:
            continue
        ball = cc.distances_from(x) <= r
        span = np.maximum(pmax[ball], pmax[x]) - np.minimum(pmin[ball], pmin[x])
        keep.append(x)
        diam.append(int(span.max()))
    xs_kept = np.asarray(keep, dtype=np.int64)
    diam_arr = np.asarray(diam, dtype=np.int64)
    norm = b.norms[xs_kept]
    return ContractionProfile(
        kappa=kappa.label,
        x=xs_kept,
        norm=norm,
        dist_to_path=b.dist_to_path[xs_kept],
        diameter=diam_arr,
        ratio=diam_arr / kappa(norm) if len(keep) else np.zeros(0),
        ratio_projection=diam_arr / kappa(pmin[xs_kept]) if len(keep) else np.zeros(0),
        skipped=len(xs) - len(keep),
    )


# -- slimness ------------------------------------------------------------------

def slimness_profile(cc: CubeComplex, b: GeodesicPath, kappa: KappaFunction, condition: int,
                     samples: int | None = None, seed: int = 0) -> float:
    """Largest normalized thinness over sampled x and all parameters on ``b``.

    Condition 1: d(x_b, I(x, y)) / kappa(|x_b|) for y on b.
    Condition 2: the same, normalized by kappa of the farther of x_b and y.
    Condition 3: d(w, I(y, x) u I(x, z)) / kappa(|x_b|) for y <= w <= z on b.
    Condition 4: as 3 with |y| <= |x_b| <= |z|, normalized by kappa(|z|).
    """
    if condition not in (1, 2, 3, 4):
        raise ValueError("condition must be 1, 2, 3 or 4")
    xs = sample_vertices(b, samples, seed)
    dx = b.dist[:, xs].astype(np.float64)  # (T+1, n)
    n_t = b.length + 1
    par = np.arange(n_t, dtype=np.float64)[:, None]
    a = b.pmin[xs]
    cols = np.arange(len(xs))
    if condition in (1, 2):
        d_xb_x = dx[a, cols]
        gp = (d_xb_x[None, :] + np.abs(par - a[None, :]) - dx) / 2.0
        if condition == 1:
            ratio = gp / kappa(a)[None, :]
        else:
            ratio = gp / kappa(np.maximum(par, a[None, :]))
        return float(ratio.max()) if ratio.size else 0.0
    # left[k] = max_{i<=k} d(b(k), I(b(i), x)), right[k] = max_{j>=k} d(b(k), I(x, b(j)))
    pre = np.maximum.accumulate(-par - dx, axis=0)
    suf = np.maximum.accumulate((par - dx)[::-1], axis=0)[::-1]
    if condition == 3:
        left = (par + dx + pre) / 2.0
        right = (dx - par + suf) / 2.0
        ratio = np.minimum(left, right) / kappa(a)[None, :]
        return float(ratio.max()) if ratio.size else 0.0
    best = 0.0
    kj = kappa(par[:, 0])
    k_idx = np.arange(n_t)
    for c, x_a in enumerate(a.tolist()):
        col = dx[:, c]
        left = (par[:, 0] + col + pre[np.minimum(k_idx, x_a), c]) / 2.0  # i <= min(k, a)
        # right[k, j] for j >= max(k, a)
        right = (col[:, None] - par + par.T - col[None, :]) / 2.0
        valid = (k_idx[None, :] >= np.maximum(k_idx[:, None], x_a))
        vals = np.where(valid, np.minimum(left[:, None], right) / kj[None, :], -np.inf)
        best = max(best, float(vals.max()))
    return best


# -- lower divergence ------------------------------------------------------------

@dataclass
class DivergenceCurve:
    """Rows are (t, radius, rho, kappa(t)); rho is inf when the ball disconnects."""

    r: float
    kappa: str
    rows: list[tuple[int, int, float, float]]

    @property
    def div(self) -> float:
        return min(rho / k for _, _, rho, k in self.rows)


def _radius(r: float, k: float) -> int:
    return max(0, math.ceil(r * k - EPS))


def lower_divergence(cc: CubeComplex, b: GeodesicPath, r: float, kappa: KappaFunction) -> DivergenceCurve:
    """Detour lengths around open balls B(b(t), ceil(r kappa(t))) for every admissible t."""
    if not r > 0:
        raise ValueError("r must be positive")
    rows = []
    graph = cc.csr()
    for t in range(b.length + 1):
        k = kappa(t)
        rad = _radius(r, k)
        if not (t > r * k and t - rad >= 0 and t + rad <= b.length):
            continue
        keep = b.dist[t] >= rad
        idx = np.flatnonzero(keep)
        local = np.full(cc.n_vertices, -1)
        local[idx] = np.arange(len(idx))
        src, dst = local[b.vertices[t - rad]], local[b.vertices[t + rad]]
        d = shortest_path(graph[idx][:, idx], unweighted=True, directed=False, indices=[src])[0, dst]
        rows.append((t, rad, float(d), k))
    if not rows:
        raise NoAdmissibleParameterError(
            f"no admissible t on a segment of length {b.length} for r={r} and kappa={kappa.label}")
    return DivergenceCurve(r, kappa.label, rows)


def hyperplanes_projecting_inside(cc: CubeComplex, b: GeodesicPath, s: int, t: int) -> frozenset[int]:
    """Hyperplanes crossed by ``b`` on [s, t] whose carrier projects into [s, t]."""
    if not 0 <= s < t <= b.length:
        raise ValueError(f"need 0 <= s < t <= {b.length}")
    out = set()
    for h in b.crossed[s:t]:
        carrier = bools_from_mask(cc.carrier_masks[h], cc.n_vertices)
        if b.pmin[carrier].min() >= s and b.pmax[carrier].max() <= t:
            out.add(h)
    return frozenset(out)


# -- excursions -----------------------------------------------------------------

@dataclass
class ExcursionResult:
    feasible: bool
    chain: list[tuple[int, float]]  # (hyperplane, crossing parameter)
    exact: bool
    c: float


def crossing_parameter(i: int) -> float:
    """The i-th crossed hyperplane is met at the midpoint of edge (b(i), b(i+1))."""
    return i + 0.5


def excursion_detect(cc: CubeComplex, b: GeodesicPath, kappa: KappaFunction, c: float,
                     budget: int = DEFAULT_BUDGET) -> ExcursionResult:
    """Fewest-link chain of crossed hyperplanes with gaps and well-separation
    both at most c * kappa(t_next), starting near 0 and ending near T.

    Pairs whose well-separation search ran out of budget are not used as
    links, so an inexact answer can only err towards infeasible.
    """
    if not c > 0:
        raise ValueError("c must be positive")
    n = len(b.crossed)
    tt = [crossing_parameter(i) for i in range(n)]
    bound = [c * kappa(t) for t in tt]
    exact = True
    start = [i for i in range(n) if tt[i] <= bound[i] + EPS]
    end_ok = [b.length - tt[i] <= c * kappa(b.length) + EPS for i in range(n)]
    prev = [-2] * n
    frontier = []
    for i in start:
        prev[i] = -1
        frontier.append(i)
    hit = next((i for i in frontier if end_ok[i]), None)
    while hit is None and frontier:
        nxt = []
        for i in frontier:
            hi = b.crossed[i]
            for j in range(i + 1, n):
                if prev[j] != -2 or tt[j] - tt[i] > bound[j] + EPS:
                    continue
                hj = b.crossed[j]
                if cc.cross[hi, hj]:
                    continue
                ws, ok = well_separation(cc, hi, hj, budget)
                if not ok:
                    exact = False
                    continue
                if ws <= bound[j] + EPS:
                    prev[j] = i
                    nxt.append(j)
        frontier = sorted(nxt)
        hit = next((j for j in frontier if end_ok[j]), None)
    chain = []
    j = hit
    while j is not None and j >= 0:
        chain.append((b.crossed[j], tt[j]))
        j = prev[j]
    return ExcursionResult(hit is not None, chain[::-1], exact, c)


def excursion_constant(cc: CubeComplex, b: GeodesicPath, kappa: KappaFunction,
                       c_grid: Sequence[float], budget: int = DEFAULT_BUDGET) -> tuple[float | None, bool]:
    """Smallest grid value of c with a feasible chain (None if none), and exactness."""
    grid = list(c_grid)
    if not grid or any(b2 <= a for a, b2 in zip(grid, grid[1:])):
        raise ValueError("c grid must be nonempty and strictly increasing")
    exact = True
    for c in grid:
        res = excursion_detect(cc, b, kappa, c, budget)
        exact &= res.exact
        if res.feasible:
            return c, exact
    return None, exact
