"""Finite CAT(0) cube complexes represented by their median 1-skeleton.

Vertices are dense integer ids.  Hyperplanes are recovered as classes of
edges under the transitive closure of "opposite sides of a 4-cycle"; each
class must cut the graph into exactly two halfspaces.  Once the halfspace
system is known every vertex gets a binary code (bit ``h`` set iff the vertex
lies on the plus side of hyperplane ``h``) and graph distance equals Hamming
distance of codes, which is what the fast paths below use.

Vertex sets cross the public API as ``frozenset`` objects; internally they are
Python ``int`` bitmasks over vertex ids.
"""
from __future__ import annotations

import logging
from dataclasses import dataclass, field
from typing import Iterable, Mapping, Sequence

import numpy as np
from scipy.sparse import csr_matrix
from scipy.sparse.csgraph import connected_components, shortest_path

from .errors import (
    ComplexError,
    DisconnectedGraphError,
    DuplicateEdgeError,
    HalfspaceError,
    MedianViolationError,
    NotConvexError,
    UnknownVertexError,
)

log = logging.getLogger(__name__)

EXHAUSTIVE_LIMIT = 2000
DEFAULT_SEED = 0


# -- bitmask helpers ---------------------------------------------------------

def mask_from_bools(arr: np.ndarray) -> int:
    return int.from_bytes(np.packbits(np.asarray(arr, dtype=bool), bitorder="little").tobytes(), "little")


def bools_from_mask(mask: int, n: int) -> np.ndarray:
    raw = mask.to_bytes((n + 7) // 8 or 1, "little")
    return np.unpackbits(np.frombuffer(raw, dtype=np.uint8), bitorder="little")[:n].astype(bool)


def mask_from_ids(ids: Iterable[int]) -> int:
    m = 0
    for i in ids:
        m |= 1 << i
    return m


def ids_from_mask(mask: int, n: int) -> list[int]:
    return np.flatnonzero(bools_from_mask(mask, n)).tolist()


class _UnionFind:
    def __init__(self, n: int):
        self.parent = list(range(n))

    def find(self, a: int) -> int:
        parent = self.parent
        while parent[a] != a:
            parent[a] = parent[parent[a]]
            a = parent[a]
        return a

    def union(self, a: int, b: int) -> None:
        ra, rb = self.find(a), self.find(b)
        if ra != rb:
            if ra < rb:
                self.parent[rb] = ra
            else:
                self.parent[ra] = rb


# -- data types --------------------------------------------------------------

@dataclass(frozen=True)
class Hyperplane:
    """An edge-equivalence class with its two halfspaces.

    ``minus`` is the halfspace containing the basepoint.  All vertex sets are
    bitmasks over vertex ids.
    """

    id: int
    dual_edges: frozenset[int]
    minus: int
    plus: int
    carrier: int

    def side_of(self, vertex: int) -> int:
        """-1 for the basepoint side, +1 otherwise."""
        return 1 if (self.plus >> vertex) & 1 else -1


@dataclass(eq=False)
class CubeComplex:
    """Immutable median 1-skeleton with its derived hyperplane system.

    Build instances with :func:`build_complex`; the constructor does not
    validate anything.
    """

    name: str
    n_vertices: int
    edges: tuple[tuple[int, int], ...]
    basepoint: int
    adjacency: tuple[tuple[int, ...], ...]
    edge_hyperplane: np.ndarray
    hyperplanes: tuple[Hyperplane, ...]
    side: np.ndarray  # (V, H) bool, True on the plus side
    dimension: int
    paths: Mapping[str, tuple[int, ...]] = field(default_factory=dict)

    def __post_init__(self) -> None:
        n_h = len(self.hyperplanes)
        packed = np.packbits(self.side, axis=1, bitorder="little") if n_h else np.zeros((self.n_vertices, 0), np.uint8)
        width = max(1, -(-packed.shape[1] // 8))
        padded = np.zeros((self.n_vertices, width * 8), dtype=np.uint8)
        padded[:, : packed.shape[1]] = packed
        self.packed = padded.view(np.uint64)
        self.codes = [int.from_bytes(row.tobytes(), "little") for row in padded]
        self.vertex_of_code = {c: v for v, c in enumerate(self.codes)}
        self.plus_masks = [h.plus for h in self.hyperplanes]
        self.minus_masks = [h.minus for h in self.hyperplanes]
        self.carrier_masks = [h.carrier for h in self.hyperplanes]
        self.all_vertices = (1 << self.n_vertices) - 1
        self.cross = _crossing_matrix(self.side)
        self.cross_masks = [mask_from_bools(row) for row in self.cross]
        incident = [set() for _ in range(self.n_vertices)]
        for eid, (u, v) in enumerate(self.edges):
            h = int(self.edge_hyperplane[eid])
            incident[u].add(h)
            incident[v].add(h)
        self.incident_hyperplanes = tuple(tuple(sorted(s)) for s in incident)
        self._memo: dict = {}

    # -- basic queries ----------------------------------------------------

    @property
    def n_hyperplanes(self) -> int:
        return len(self.hyperplanes)

    def check_vertex(self, x: int) -> int:
        if not isinstance(x, (int, np.integer)) or not 0 <= x < self.n_vertices:
            raise UnknownVertexError(f"unknown vertex id {x!r}")
        return int(x)

    def check_hyperplane(self, h: int) -> int:
        if not isinstance(h, (int, np.integer)) or not 0 <= h < self.n_hyperplanes:
            raise KeyError(f"unknown hyperplane id {h!r}")
        return int(h)

    def mask(self, vertices: Iterable[int] | int) -> int:
        if isinstance(vertices, int):
            return vertices
        m = 0
        for v in vertices:
            m |= 1 << self.check_vertex(v)
        return m

    def vertex_set(self, mask: int) -> frozenset[int]:
        return frozenset(ids_from_mask(mask, self.n_vertices))

    def distances_from(self, x: int) -> np.ndarray:
        """Graph distances from ``x`` to every vertex (Hamming distance of codes)."""
        return np.bitwise_count(self.packed ^ self.packed[x]).sum(axis=1, dtype=np.int64)

    def distance_rows(self, sources: Sequence[int]) -> np.ndarray:
        src = np.asarray(sources, dtype=np.int64)
        out = np.empty((len(src), self.n_vertices), dtype=np.int64)
        for i, s in enumerate(src):
            out[i] = self.distances_from(int(s))
        return out

    def distance_matrix(self) -> np.ndarray:
        if "dmat" not in self._memo:
            self._memo["dmat"] = self.distance_rows(range(self.n_vertices)).astype(np.int32)
        return self._memo["dmat"]

    def csr(self) -> csr_matrix:
        if "csr" not in self._memo:
            self._memo["csr"] = _adjacency_csr(self.n_vertices, self.edges)
        return self._memo["csr"]

    def bfs_rows(self, sources: Sequence[int]) -> np.ndarray:
        """Breadth-first distances computed on the graph itself (no codes)."""
        d = shortest_path(self.csr(), unweighted=True, directed=False, indices=np.asarray(sources))
        return np.where(np.isinf(d), -1, d).astype(np.int64)

    def ball(self, x: int, r: int) -> int:
        return mask_from_bools(self.distances_from(x) <= r)

    def crosses_set(self, h: int, z_mask: int) -> bool:
        """True iff ``z_mask`` has vertices on both sides of ``h``."""
        return bool(z_mask & self.plus_masks[h]) and bool(z_mask & self.minus_masks[h])

    def meets(self, h: int, z_mask: int) -> bool:
        """Some dual edge of ``h`` has an endpoint in ``z_mask``."""
        return bool(self.carrier_masks[h] & z_mask)

    def __repr__(self) -> str:
        return (f"CubeComplex(name={self.name!r}, vertices={self.n_vertices}, edges={len(self.edges)}, "
                f"hyperplanes={self.n_hyperplanes}, dimension={self.dimension})")


def _adjacency_csr(n: int, edges: Sequence[tuple[int, int]]) -> csr_matrix:
    if not edges:
        return csr_matrix((n, n), dtype=np.int8)
    e = np.asarray(edges, dtype=np.int64)
    rows = np.concatenate([e[:, 0], e[:, 1]])
    cols = np.concatenate([e[:, 1], e[:, 0]])
    return csr_matrix((np.ones(len(rows), dtype=np.int8), (rows, cols)), shape=(n, n))


def _crossing_matrix(side: np.ndarray) -> np.ndarray:
    n_v, n_h = side.shape
    if n_h == 0:
        return np.zeros((0, 0), dtype=bool)
    s = side.astype(np.float64)
    pp = s.T @ s
    col = s.sum(axis=0)
    pm = col[:, None] - pp
    mp = col[None, :] - pp
    mm = n_v - col[:, None] - col[None, :] + pp
    out = (pp > 0) & (pm > 0) & (mp > 0) & (mm > 0)
    np.fill_diagonal(out, False)
    return out


# -- construction ------------------------------------------------------------

def build_complex(
    vertices: Iterable[int],
    edges: Iterable[Sequence[int]],
    basepoint: int,
    *,
    name: str = "",
    paths: Mapping[str, Sequence[int]] | None = None,
    validate: str = "auto",
    exhaustive_limit: int = EXHAUSTIVE_LIMIT,
    seed: int = DEFAULT_SEED,
) -> CubeComplex:
    """Build a complex from its 1-skeleton and derive the hyperplane system.

    ``validate`` is one of ``"auto"`` (exhaustive up to ``exhaustive_limit``
    vertices, seeded sampling above), ``"full"``, ``"sample"`` or ``"none"``.
    The halfspace bipartition is always checked since the derivation needs it.
    """
    if validate not in {"auto", "full", "sample", "none"}:
        raise ValueError(f"unknown validation mode {validate!r}")
    verts = sorted(int(v) for v in vertices)
    n = len(verts)
    if n == 0:
        raise ComplexError("a complex needs at least one vertex")
    if verts != list(range(n)):
        raise ComplexError("vertex ids must be dense integers starting at 0")
    if not 0 <= basepoint < n:
        raise ComplexError(f"basepoint {basepoint} is not a vertex")

    seen: set[tuple[int, int]] = set()
    edge_list: list[tuple[int, int]] = []
    for e in edges:
        u, v = int(e[0]), int(e[1])
        if not (0 <= u < n and 0 <= v < n):
            raise ComplexError(f"edge {(u, v)} has an unknown endpoint")
        if u == v:
            raise ComplexError(f"loop at vertex {u}")
        key = (min(u, v), max(u, v))
        if key in seen:
            raise DuplicateEdgeError(f"duplicate edge {key}")
        seen.add(key)
        edge_list.append(key)
    edge_list.sort()
    edges_t = tuple(edge_list)

    n_comp, _ = connected_components(_adjacency_csr(n, edges_t), directed=False)
    if n_comp != 1:
        raise DisconnectedGraphError(f"graph has {n_comp} connected components")

    adj_sets: list[set[int]] = [set() for _ in range(n)]
    for u, v in edges_t:
        adj_sets[u].add(v)
        adj_sets[v].add(u)
    adjacency = tuple(tuple(sorted(s)) for s in adj_sets)
    edge_index = {e: i for i, e in enumerate(edges_t)}

    uf = _UnionFind(len(edges_t))
    for eid, (u, v) in enumerate(edges_t):
        for w in adjacency[u]:
            if w == v:
                continue
            for x in adjacency[v]:
                if x == u or x == w or x not in adj_sets[w]:
                    continue
                # square u-v-x-w: uv opposite wx, uw opposite vx
                uf.union(eid, edge_index[(min(w, x), max(w, x))])
                uf.union(edge_index[(min(u, w), max(u, w))], edge_index[(min(v, x), max(v, x))])

    classes: dict[int, list[int]] = {}
    for eid in range(len(edges_t)):
        classes.setdefault(uf.find(eid), []).append(eid)
    ordered = sorted(classes.values(), key=lambda c: c[0])

    e_arr = np.asarray(edges_t, dtype=np.int64).reshape(-1, 2)
    edge_h = np.empty(len(edges_t), dtype=np.int64)
    side = np.zeros((n, len(ordered)), dtype=bool)
    hyperplanes = []
    for hid, cls in enumerate(ordered):
        edge_h[cls] = hid
        keep = np.ones(len(edges_t), dtype=bool)
        keep[cls] = False
        k, labels = connected_components(_adjacency_csr(n, [edges_t[i] for i in np.flatnonzero(keep)]),
                                         directed=False)
        if k != 2:
            raise HalfspaceError(f"removing edge class of {edges_t[cls[0]]} leaves {k} components")
        ends = e_arr[cls]
        if np.any(labels[ends[:, 0]] == labels[ends[:, 1]]):
            raise HalfspaceError(f"edge class of {edges_t[cls[0]]} has an edge inside one halfspace")
        plus = labels != labels[basepoint]
        side[:, hid] = plus
        carrier = np.zeros(n, dtype=bool)
        carrier[ends.ravel()] = True
        pm = mask_from_bools(plus)
        hyperplanes.append(Hyperplane(hid, frozenset(cls), ((1 << n) - 1) & ~pm, pm, mask_from_bools(carrier)))

    cc = CubeComplex(
        name=name,
        n_vertices=n,
        edges=edges_t,
        basepoint=int(basepoint),
        adjacency=adjacency,
        edge_hyperplane=edge_h,
        hyperplanes=tuple(hyperplanes),
        side=side,
        dimension=0,
        paths={k: tuple(int(v) for v in p) for k, p in (paths or {}).items()},
    )
    if len(cc.vertex_of_code) != n:
        raise MedianViolationError("two vertices have identical halfspace codes (not a partial cube)")
    cc.dimension = _local_dimension(cc)

    mode = validate
    if mode == "auto":
        mode = "full" if n <= exhaustive_limit else "sample"
    if mode != "none":
        check_metric(cc, exhaustive=mode == "full", seed=seed)
        check_median(cc, exhaustive=mode == "full", seed=seed)
    return cc


def _local_dimension(cc: CubeComplex) -> int:
    best = 1 if cc.n_hyperplanes else 0
    cross = cc.cross
    for hs in set(cc.incident_hyperplanes):
        if len(hs) <= best:
            continue
        best = max(best, _max_clique(list(hs), cross))
    return best


def _max_clique(nodes: list[int], adj: np.ndarray) -> int:
    best = 0

    def grow(clique: int, cand: list[int]) -> None:
        nonlocal best
        if clique + len(cand) <= best:
            return
        if not cand:
            best = max(best, clique)
            return
        v, rest = cand[0], cand[1:]
        grow(clique + 1, [u for u in rest if adj[v, u]])
        grow(clique, rest)

    grow(0, nodes)
    return best


# -- validation --------------------------------------------------------------

def check_metric(cc: CubeComplex, *, exhaustive: bool = True, seed: int = DEFAULT_SEED,
                 n_sources: int = 16) -> None:
    """Check |C_{x,y}| = d(x, y) against breadth-first search."""
    n = cc.n_vertices
    if exhaustive:
        sources = np.arange(n)
    else:
        rng = np.random.default_rng(seed)
        sources = np.sort(rng.choice(n, size=min(n, max(n_sources, -(-500 // n))), replace=False))
    for start in range(0, len(sources), 256):
        chunk = sources[start:start + 256]
        bfs = cc.bfs_rows(chunk)
        ham = cc.distance_rows(chunk)
        bad = np.argwhere(bfs != ham)
        if len(bad):
            i, y = bad[0]
            raise MedianViolationError(
                f"|C(x,y)| = {ham[i, y]} but d(x,y) = {bfs[i, y]} for x={chunk[i]}, y={y}")


def _quadrant_closure(cc: CubeComplex) -> list[int]:
    """Implication closure between oriented halfspaces.

    Literal ``h`` means "plus side of h", literal ``H + h`` the minus side.
    Every empty quadrant of a hyperplane pair contributes one 2-clause.
    """
    n_h = cc.n_hyperplanes
    s = cc.side.astype(np.float64)
    pp = s.T @ s
    col = s.sum(axis=0)
    quads = {
        (0, 0): pp,
        (0, 1): col[:, None] - pp,
        (1, 0): col[None, :] - pp,
        (1, 1): cc.n_vertices - col[:, None] - col[None, :] + pp,
    }
    imp = [1 << lit for lit in range(2 * n_h)]
    for (sa, sb), counts in quads.items():
        for a, b in np.argwhere(counts == 0).tolist():
            if a == b:
                continue
            # forbidden: a on side sa and b on side sb
            la, lb = a + sa * n_h, b + sb * n_h
            imp[la] |= 1 << (b + (1 - sb) * n_h)
            imp[lb] |= 1 << (a + (1 - sa) * n_h)
    for k in range(2 * n_h):
        bit = 1 << k
        row = imp[k]
        for i in range(2 * n_h):
            if imp[i] & bit:
                imp[i] |= row
    return imp


def count_consistent_orientations(cc: CubeComplex, limit: int) -> int:
    """Number of orientations of all hyperplanes satisfying every 2-clause
    carried by empty quadrants, counted up to ``limit + 1``.

    Vertex codes always satisfy these clauses, and a set of binary vectors is
    closed under coordinate-wise majority iff it is the full solution set of
    the 2-CNF it satisfies.  So the graph is median iff the count equals the
    number of vertices.
    """
    n_h = cc.n_hyperplanes
    imp = _quadrant_closure(cc)
    low = (1 << n_h) - 1
    count = 0
    stack = [(0, 0)]
    while stack:
        assigned, h = stack.pop()
        while h < n_h and ((assigned >> h) & 1 or (assigned >> (n_h + h)) & 1):
            h += 1
        if h == n_h:
            count += 1
            if count > limit:
                return count
            continue
        for lit in (h + n_h, h):
            nxt = assigned | imp[lit]
            if not (nxt & low) & (nxt >> n_h):
                stack.append((nxt, h + 1))
    return count


def check_median(cc: CubeComplex, *, exhaustive: bool = True, seed: int = DEFAULT_SEED,
                 n_triples: int = 20000) -> None:
    """Median axiom: every vertex triple has a unique median vertex.

    Assumes the metric check passed, so that the intersection of the three
    intervals is contained in {coordinate-wise majority}.  The exhaustive mode
    covers all triples at once through :func:`count_consistent_orientations`.
    """
    n = cc.n_vertices
    if exhaustive:
        found = count_consistent_orientations(cc, n)
        if found != n:
            raise MedianViolationError(
                f"vertex codes are not closed under majority ({found} consistent orientations, {n} vertices)")
        return
    rng = np.random.default_rng(seed)
    codes = cc.codes
    for x, y, z in rng.integers(0, n, size=(n_triples, 3)).tolist():
        a, b, c = codes[x], codes[y], codes[z]
        if ((a & b) | (a & c) | (b & c)) not in cc.vertex_of_code:
            raise MedianViolationError(f"triple {(x, y, z)} has no median vertex")


def check_halfspaces(cc: CubeComplex) -> None:
    """Halfspaces partition V, dual edges straddle them, carriers meet both sides."""
    for h in cc.hyperplanes:
        if h.plus & h.minus or (h.plus | h.minus) != cc.all_vertices:
            raise HalfspaceError(f"halfspaces of hyperplane {h.id} do not partition the vertices")
        for eid in h.dual_edges:
            u, v = cc.edges[eid]
            if ((h.plus >> u) & 1) == ((h.plus >> v) & 1):
                raise HalfspaceError(f"dual edge {(u, v)} of hyperplane {h.id} does not cross it")
        if not (h.carrier & h.plus and h.carrier & h.minus):
            raise HalfspaceError(f"carrier of hyperplane {h.id} misses a halfspace")


# -- operations --------------------------------------------------------------

def distance(cc: CubeComplex, x: int, y: int) -> int:
    x, y = cc.check_vertex(x), cc.check_vertex(y)
    return (cc.codes[x] ^ cc.codes[y]).bit_count()


def separating_set(cc: CubeComplex, x: int, y: int) -> frozenset[int]:
    x, y = cc.check_vertex(x), cc.check_vertex(y)
    return frozenset(ids_from_mask(cc.codes[x] ^ cc.codes[y], cc.n_hyperplanes))


def separating_mask(cc: CubeComplex, x: int, y: int) -> int:
    """Separating hyperplanes of ``x`` and ``y`` as a bitmask over hyperplane ids."""
    return cc.codes[x] ^ cc.codes[y]


def interval(cc: CubeComplex, x: int, y: int) -> frozenset[int]:
    """I(x, y): vertices on some geodesic from ``x`` to ``y``."""
    x, y = cc.check_vertex(x), cc.check_vertex(y)
    dx, dy = cc.distances_from(x), cc.distances_from(y)
    return frozenset(np.flatnonzero(dx + dy == dx[y]).tolist())


def median(cc: CubeComplex, x: int, y: int, z: int) -> int:
    x, y, z = cc.check_vertex(x), cc.check_vertex(y), cc.check_vertex(z)
    a, b, c = cc.codes[x], cc.codes[y], cc.codes[z]
    m = cc.vertex_of_code.get((a & b) | (a & c) | (b & c))
    if m is None:
        raise MedianViolationError(f"no median for {(x, y, z)}")
    return m


def _hull_mask(cc: CubeComplex, s_mask: int) -> int:
    hull = cc.all_vertices
    for plus, minus in zip(cc.plus_masks, cc.minus_masks):
        if not s_mask & plus:
            hull &= minus
        elif not s_mask & minus:
            hull &= plus
    return hull


def convex_hull(cc: CubeComplex, vertices: Iterable[int]) -> frozenset[int]:
    """Intersection of all halfspaces containing ``vertices``."""
    s = cc.mask(vertices)
    if not s:
        raise ValueError("convex hull of an empty set")
    return cc.vertex_set(_hull_mask(cc, s))


def is_convex(cc: CubeComplex, vertices: Iterable[int]) -> bool:
    s = cc.mask(vertices)
    if not s:
        raise ValueError("convexity of an empty set")
    return _hull_mask(cc, s) == s


def _gate_mask(cc: CubeComplex, z_mask: int, x: int) -> int:
    if (z_mask >> x) & 1:
        return x
    d = cc.distances_from(x)
    inside = bools_from_mask(z_mask, cc.n_vertices)
    dz = np.where(inside, d, np.iinfo(np.int64).max)
    best = dz.min()
    hits = np.flatnonzero(dz == best)
    if len(hits) != 1:
        raise NotConvexError(f"vertex {x} has {len(hits)} nearest vertices in Z")
    return int(hits[0])


def _checked_convex(cc: CubeComplex, vertices: Iterable[int] | int) -> int:
    z = cc.mask(vertices)
    if not z:
        raise NotConvexError("Z is empty")
    if _hull_mask(cc, z) != z:
        raise NotConvexError("Z is not convex")
    return z


def gate(cc: CubeComplex, z: Iterable[int], x: int) -> int:
    """Nearest vertex of the convex set ``z`` to ``x``."""
    x = cc.check_vertex(x)
    return _gate_mask(cc, _checked_convex(cc, z), x)


def gate_pair_check(cc: CubeComplex, z: Iterable[int], x: int, y: int) -> tuple[frozenset[int], bool]:
    """Hyperplanes separating the gates of ``x`` and ``y``, and whether they are
    exactly the hyperplanes separating ``x`` from ``y`` that cross ``z``."""
    x, y = cc.check_vertex(x), cc.check_vertex(y)
    zm = _checked_convex(cc, z)
    gx, gy = _gate_mask(cc, zm, x), _gate_mask(cc, zm, y)
    between_gates = cc.codes[gx] ^ cc.codes[gy]
    expected = 0
    sep = cc.codes[x] ^ cc.codes[y]
    for h in ids_from_mask(sep, cc.n_hyperplanes):
        if cc.crosses_set(h, zm):
            expected |= 1 << h
    return frozenset(ids_from_mask(between_gates, cc.n_hyperplanes)), between_gates == expected


# -- bulk invariant checks (used by verify and the acceptance suite) ---------

def _rows(cc: CubeComplex, xs: np.ndarray | None) -> tuple[np.ndarray, np.ndarray]:
    if xs is None:
        return np.arange(cc.n_vertices), cc.distance_matrix()
    xs = np.asarray(xs, dtype=np.int64)
    return xs, cc.distance_rows(xs)


def check_gates(cc: CubeComplex, z_mask: int, xs: Sequence[int] | None = None,
                rows: np.ndarray | None = None) -> None:
    """Gate characterization and the gate-pair identity for every x (and every
    pair) drawn from ``xs``, all vertices by default.

    The pair identity is checked column-wise: for a hyperplane crossing Z the
    gate never flips its side, otherwise every gate sits on the same side.
    That is equivalent to the identity holding for all pairs.
    """
    n = cc.n_vertices
    if rows is None:
        xs, rows = _rows(cc, xs)
    inside = bools_from_mask(z_mask, n)
    dz = rows[:, inside]
    zi = np.flatnonzero(inside)
    best = dz.min(axis=1, keepdims=True)
    if np.any((dz == best).sum(axis=1) != 1):
        raise NotConvexError("nearest vertex in Z is not unique")
    gates = zi[dz.argmin(axis=1)]
    side = cc.side[xs]
    z_plus = cc.side[inside].all(axis=0)
    z_minus = (~cc.side[inside]).all(axis=0)
    expected = (side & z_minus[None, :]) | (~side & z_plus[None, :])
    actual = side ^ cc.side[gates]
    if not np.array_equal(expected, actual):
        x = int(xs[np.argwhere(expected != actual)[0][0]])
        raise MedianViolationError(f"gate characterization fails at x={x}")
    crossing = ~(z_plus | z_minus)
    if actual[:, crossing].any():
        raise MedianViolationError("gate flips a hyperplane that crosses Z")
    fixed = cc.side[gates][:, ~crossing]
    if not np.all(fixed == fixed[0:1]):
        raise MedianViolationError("gates disagree on a hyperplane not crossing Z")


def max_pairwise_distance(cc: CubeComplex, idx: Sequence[int]) -> int:
    """Diameter of a vertex set, from Hamming distances of codes."""
    codes = cc.packed[np.asarray(idx, dtype=np.int64)]
    best = 0
    for start in range(0, len(codes), 256):
        block = codes[start:start + 256]
        d = np.bitwise_count(block[:, None, :] ^ codes[None, :, :]).sum(axis=2)
        best = max(best, int(d.max()))
    return best


def hull_diameter_excess(cc: CubeComplex, r_max: int,
                         centers: Sequence[int] | None = None) -> list[tuple[int, int, int, int]]:
    """Balls whose convex hull has diameter above 2 * dimension * r.

    Returns (center, r, diameter, bound) for every violation.
    """
    centers, rows = _rows(cc, centers)
    side = cc.side
    bad = []
    for r in range(1, r_max + 1):
        bound = 2 * cc.dimension * r
        for x, row in zip(centers.tolist(), rows):
            ball = side[row <= r]
            forced_plus = ball.all(axis=0)
            forced_minus = (~ball).all(axis=0)
            hull = np.all(side[:, forced_plus], axis=1) & ~np.any(side[:, forced_minus], axis=1)
            idx = np.flatnonzero(hull)
            diam = max_pairwise_distance(cc, idx)
            if diam > bound:
                bad.append((x, r, diam, bound))
    return bad
