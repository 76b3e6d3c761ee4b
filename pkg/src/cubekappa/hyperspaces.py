"""Hyperbolic spaces attached to a cube complex: the contact graph and the
well-separation spaces Y_k, plus progress of geodesics inside them.

d_k(x, y) is the length of the longest chain of hyperplanes separating x from
y in which consecutive members are disjoint and k-well-separated.  If h2
separates h1 from h3 then every hyperplane crossing h1 and h3 also crosses h2,
so consecutive well-separation implies pairwise well-separation along such a
chain and a longest-path DP over the separation order is exact.
"""
from __future__ import annotations

import threading
from dataclasses import dataclass
from typing import Callable, Iterable, Sequence

import networkx as nx
import numpy as np
from scipy.sparse.csgraph import shortest_path

from .contraction import GeodesicPath
from .core import CubeComplex
from .errors import ComplexError
from .kappa import KappaFunction
from .separation import DEFAULT_BUDGET, crossing_mask, well_separation


# -- contact graph -------------------------------------------------------------

class ContactGraph:
    """Hyperplanes as vertices, adjacent when their carriers share a vertex."""

    def __init__(self, cc: CubeComplex):
        if cc.n_hyperplanes == 0:
            raise ComplexError("contact graph of a complex without hyperplanes")
        self.cc = cc
        g = nx.Graph()
        g.add_nodes_from(range(cc.n_hyperplanes))
        for hs in cc.incident_hyperplanes:
            for i, a in enumerate(hs):
                for b in hs[i + 1:]:
                    g.add_edge(a, b)
        self.graph = g
        adj = nx.to_scipy_sparse_array(g, nodelist=range(cc.n_hyperplanes), format="csr")
        self.dist = shortest_path(adj, unweighted=True, directed=False)

    def distance(self, h1: int, h2: int) -> float:
        return float(self.dist[h1, h2])

    def set_distance(self, a: Iterable[int], b: Iterable[int]) -> float:
        """Smallest distance between members of two hyperplane sets."""
        return float(self.dist[np.ix_(sorted(a), sorted(b))].min())

    def edge_list(self) -> list[list[int]]:
        return sorted([min(u, v), max(u, v)] for u, v in self.graph.edges)


def contact_graph(cc: CubeComplex) -> ContactGraph:
    if "contact" not in cc._memo:
        cc._memo["contact"] = ContactGraph(cc)
    return cc._memo["contact"]


def contact_projection(cc: CubeComplex, x: int) -> frozenset[int]:
    """Hyperplanes whose carrier contains ``x``."""
    return frozenset(cc.incident_hyperplanes[cc.check_vertex(x)])


def strongly_separated_chain_counts(cc: CubeComplex, b: GeodesicPath) -> list[int]:
    """n(t): most pairwise strongly separated hyperplanes among the first t
    crossed by ``b``, for t = 0..T."""
    crossed = b.crossed
    best: list[int] = []
    counts = [0]
    running = 0
    for j, hj in enumerate(crossed):
        val = 1
        for i in range(j):
            hi = crossed[i]
            if not cc.cross[hi, hj] and crossing_mask(cc, hi, hj) == 0:
                val = max(val, best[i] + 1)
        best.append(val)
        running = max(running, val)
        counts.append(running)
    return counts


@dataclass
class ContactProgress:
    rows: list[tuple[int, float, int]]  # (t, contact distance, n(t))
    slack: int = 2

    @property
    def holds(self) -> bool:
        """Progress at least n(t) - 1 - slack at every t."""
        return all(d >= n - 1 - self.slack for _, d, n in self.rows)


def contact_progress(cc: CubeComplex, b: GeodesicPath) -> ContactProgress:
    cg = contact_graph(cc)
    start = contact_projection(cc, b.vertices[0])
    counts = strongly_separated_chain_counts(cc, b)
    rows = [(t, cg.set_distance(start, contact_projection(cc, v)), counts[t])
            for t, v in enumerate(b.vertices)]
    return ContactProgress(rows)


# -- well-separation spaces -------------------------------------------------------

class WellSepMetric:
    """d_k on the vertex set, memoized per pair.

    The memo is a plain dict guarded by a lock; fills are idempotent so
    concurrent readers at worst compute a value twice.
    """

    def __init__(self, cc: CubeComplex, k: int, budget: int = DEFAULT_BUDGET):
        if k < 0:
            raise ValueError("k must be nonnegative")
        self.cc = cc
        self.k = k
        self.budget = budget
        self._memo: dict[tuple[int, int], tuple[int, bool]] = {}
        self._lock = threading.Lock()
        self._link = None

    def _links(self) -> tuple[np.ndarray, np.ndarray]:
        """link[a, b]: disjoint and k-well-separated; inexact[a, b]: search
        budget ran out with a lower bound <= k."""
        if self._link is None:
            cc = self.cc
            n = cc.n_hyperplanes
            link = np.zeros((n, n), dtype=bool)
            inexact = np.zeros((n, n), dtype=bool)
            for a in range(n):
                for b in range(a + 1, n):
                    if cc.cross[a, b]:
                        continue
                    ws, exact = well_separation(cc, a, b, self.budget)
                    if ws <= self.k:
                        if exact:
                            link[a, b] = link[b, a] = True
                        else:
                            inexact[a, b] = inexact[b, a] = True
            self._link = (link, inexact)
        return self._link

    def __call__(self, x: int, y: int) -> int:
        return self.pair(x, y)[0]

    def pair(self, x: int, y: int) -> tuple[int, bool]:
        cc = self.cc
        x, y = cc.check_vertex(x), cc.check_vertex(y)
        key = (x, y) if x <= y else (y, x)
        hit = self._memo.get(key)
        if hit is not None:
            return hit
        value = self._compute(x, y)
        with self._lock:
            self._memo.setdefault(key, value)
        return value

    def _compute(self, x: int, y: int) -> tuple[int, bool]:
        cc = self.cc
        sep = cc.codes[x] ^ cc.codes[y]
        if not sep:
            return 0, True
        hs = [h for h in range(cc.n_hyperplanes) if (sep >> h) & 1]
        # order by the size of the halfspace containing y, largest first: that
        # is the order in which nested separating hyperplanes are met from x
        y_side = [cc.plus_masks[h] if (cc.codes[y] >> h) & 1 else cc.minus_masks[h] for h in hs]
        order = sorted(range(len(hs)), key=lambda i: -y_side[i].bit_count())
        hs = [hs[i] for i in order]
        link, inexact = self._links()
        sub = link[np.ix_(hs, hs)]
        exact = not inexact[np.ix_(hs, hs)].any()
        best = np.ones(len(hs), dtype=np.int64)
        for j in range(1, len(hs)):
            prev = best[:j][sub[:j, j]]
            if prev.size:
                best[j] = prev.max() + 1
        return int(best.max()), exact


def wellsep_metric(cc: CubeComplex, k: int, budget: int = DEFAULT_BUDGET) -> WellSepMetric:
    key = ("wellsep", k, budget)
    if key not in cc._memo:
        cc._memo[key] = WellSepMetric(cc, k, budget)
    return cc._memo[key]


def wellsep_distance(cc: CubeComplex, k: int, x: int, y: int,
                     budget: int = DEFAULT_BUDGET) -> tuple[int, bool]:
    return wellsep_metric(cc, k, budget).pair(x, y)


# -- hyperbolicity -------------------------------------------------------------------

def sample_quadruples(n: int, count: int, seed: int = 0) -> np.ndarray:
    rng = np.random.default_rng(seed)
    return rng.integers(0, n, size=(count, 4))


def four_point_defect(d: Callable[[int, int], float], w: int, x: int, y: int, z: int) -> float:
    """Half the gap between the two largest of the three pair sums."""
    sums = sorted((d(w, x) + d(y, z), d(w, y) + d(x, z), d(w, z) + d(x, y)))
    return (sums[2] - sums[1]) / 2.0


def hyperbolicity_delta(d: Callable[[int, int], float], quadruples: Sequence[Sequence[int]]) -> float:
    """Largest four-point defect over the given quadruples."""
    quads = list(quadruples)
    if not quads:
        raise ValueError("need at least one quadruple")
    return max(four_point_defect(d, *map(int, q)) for q in quads)


def wellsep_bound(k: int) -> int:
    return 9 * (k + 2)


# -- progress in Y_k ---------------------------------------------------------------

@dataclass
class WellSepProgress:
    k: int
    kappa: str
    rows: list[tuple[int, int, bool]]  # (t, d_k(b(0), b(t)), exact)
    d1: float | None
    d2: float | None

    @property
    def exact(self) -> bool:
        return all(e for _, _, e in self.rows)


def fit_progress(ts: Sequence[int], values: Sequence[float], kappa: KappaFunction,
                 d1_grid: Sequence[float], d2_max: float) -> tuple[float | None, float | None]:
    """Smallest d1 on the grid for which some d2 <= d2_max makes
    values[t] >= t / (d1 * kappa(t)) - d2 hold at every t; that d2 is minimal."""
    t = np.asarray(ts, dtype=float)
    v = np.asarray(values, dtype=float)
    if not t.size:
        return None, None
    kt = kappa(t)
    for d1 in sorted(d1_grid):
        need = max(0.0, float(np.max(t / (d1 * kt) - v)))
        if need <= d2_max + 1e-12:
            return float(d1), need
    return None, None


DEFAULT_D1_GRID = tuple(0.25 * i for i in range(1, 33))


def wellsep_progress(cc: CubeComplex, b: GeodesicPath, k: int, kappa: KappaFunction,
                     d1_grid: Sequence[float] = DEFAULT_D1_GRID, d2_max: float = 2.0,
                     budget: int = DEFAULT_BUDGET) -> WellSepProgress:
    """d_k(b(0), b(t)) along ``b`` (vertices are their own projections) and a
    grid fit of the linear-in-t/kappa(t) lower bound."""
    metric = wellsep_metric(cc, k, budget)
    rows = []
    for t, v in enumerate(b.vertices):
        val, exact = metric.pair(b.vertices[0], v)
        rows.append((t, val, exact))
    d1, d2 = fit_progress([r[0] for r in rows], [r[1] for r in rows], kappa, d1_grid, d2_max)
    return WellSepProgress(k, kappa.label, rows, d1, d2)

