"""Invariant suites run by ``cubekappa verify`` and the acceptance tests.

Each check returns a :class:`CheckResult`; a failing check carries a
counterexample in ``detail``.  Small complexes are checked exhaustively,
larger ones on a seeded sample.
"""
from __future__ import annotations

from dataclasses import dataclass
from itertools import permutations

import numpy as np

from . import core
from .contraction import GeodesicPath
from .core import EXHAUSTIVE_LIMIT, CubeComplex
from .errors import CubeKappaError
from .hyperspaces import contact_graph, wellsep_metric


@dataclass(frozen=True)
class CheckResult:
    name: str
    ok: bool
    detail: str = ""

    def line(self) -> str:
        status = "PASS" if self.ok else "FAIL"
        return f"{status} {self.name}" + (f": {self.detail}" if self.detail else "")


def _vertex_sample(cc: CubeComplex, exhaustive: bool, samples: int, rng) -> np.ndarray | None:
    if exhaustive:
        return None
    return np.sort(rng.choice(cc.n_vertices, size=min(samples, cc.n_vertices), replace=False))


def check_distance(cc: CubeComplex, exhaustive: bool, samples: int, rng) -> CheckResult:
    """|separating set| against breadth-first search on the graph itself."""
    xs = np.arange(cc.n_vertices) if exhaustive else _vertex_sample(cc, False, samples, rng)
    for start in range(0, len(xs), 256):
        chunk = xs[start:start + 256]
        bfs = cc.bfs_rows(chunk)
        ham = cc.distance_rows(chunk)
        if not np.array_equal(bfs, ham):
            i, j = np.argwhere(bfs != ham)[0]
            return CheckResult("separating-set-size", False,
                               f"x={chunk[i]}, y={j}: bfs {bfs[i, j]} vs {ham[i, j]} hyperplanes")
    return CheckResult("separating-set-size", True)


def check_median(cc: CubeComplex, exhaustive: bool, samples: int, rng) -> CheckResult:
    try:
        core.check_median(cc, exhaustive=exhaustive, seed=int(rng.integers(2**31)))
    except CubeKappaError as exc:
        return CheckResult("median", False, str(exc))
    for x, y, z in rng.integers(0, cc.n_vertices, size=(min(samples, 200), 3)).tolist():
        m = core.median(cc, x, y, z)
        if any(core.median(cc, *p) != m for p in permutations((x, y, z))):
            return CheckResult("median", False, f"median of {(x, y, z)} depends on argument order")
    return CheckResult("median", True)


def check_halfspaces(cc: CubeComplex) -> CheckResult:
    try:
        core.check_halfspaces(cc)
    except CubeKappaError as exc:
        return CheckResult("halfspaces", False, str(exc))
    return CheckResult("halfspaces", True)


def convex_test_sets(cc: CubeComplex, rng, n_pairs: int = 20,
                     max_hyperplanes: int | None = None) -> list[tuple[str, int]]:
    """Halfspaces, carriers and hulls of random vertex pairs."""
    sets = []
    hs = list(cc.hyperplanes)
    if max_hyperplanes is not None and len(hs) > max_hyperplanes:
        hs = [hs[i] for i in sorted(rng.choice(len(hs), size=max_hyperplanes, replace=False))]
    for h in hs:
        sets += [(f"plus({h.id})", h.plus), (f"minus({h.id})", h.minus), (f"carrier({h.id})", h.carrier)]
    for x, y in rng.integers(0, cc.n_vertices, size=(n_pairs, 2)).tolist():
        sets.append((f"hull({x},{y})", core._hull_mask(cc, (1 << x) | (1 << y))))
    return sets


def check_gates(cc: CubeComplex, exhaustive: bool, samples: int, rng) -> CheckResult:
    xs = _vertex_sample(cc, exhaustive, samples, rng)
    if exhaustive:
        xs, rows = np.arange(cc.n_vertices), cc.distance_matrix()
    else:
        rows = cc.distance_rows(xs)
    for label, z in convex_test_sets(cc, rng, max_hyperplanes=None if exhaustive else 64):
        try:
            core.check_gates(cc, z, xs, rows)
        except CubeKappaError as exc:
            return CheckResult("gates", False, f"Z={label}: {exc}")
    return CheckResult("gates", True)


def check_hulls(cc: CubeComplex, exhaustive: bool, samples: int, rng, r_max: int = 4) -> CheckResult:
    for x, y, z in rng.integers(0, cc.n_vertices, size=(50, 3)).tolist():
        s = cc.mask([x, y])
        hull = core._hull_mask(cc, s)
        if core._hull_mask(cc, hull) != hull:
            return CheckResult("convex-hull", False, f"hull of {{{x},{y}}} is not idempotent")
        if hull & ~core._hull_mask(cc, s | (1 << z)):
            return CheckResult("convex-hull", False, f"hull not monotone for {{{x},{y}}} in {{{x},{y},{z}}}")
    centers = _vertex_sample(cc, exhaustive, samples, rng)
    bad = core.hull_diameter_excess(cc, r_max, centers)
    if bad:
        x, r, diam, bound = bad[0]
        return CheckResult("convex-hull", False, f"ball({x}, {r}) has hull diameter {diam} > {bound}")
    return CheckResult("convex-hull", True)


def check_paths(cc: CubeComplex) -> CheckResult:
    for name, verts in sorted(cc.paths.items()):
        try:
            GeodesicPath(cc, verts, name)
        except CubeKappaError as exc:
            return CheckResult("geodesics", False, f"{name}: {exc}")
    return CheckResult("geodesics", True)


def check_contact(cc: CubeComplex) -> CheckResult:
    if cc.n_hyperplanes == 0:
        return CheckResult("contact-graph", True, "no hyperplanes")
    cg = contact_graph(cc)
    missing = np.argwhere(cc.cross & (cg.dist != 1))
    if len(missing):
        a, b = missing[0]
        return CheckResult("contact-graph", False, f"crossing hyperplanes {a}, {b} are not in contact")
    if not np.isfinite(cg.dist).all():
        return CheckResult("contact-graph", False, "contact graph is disconnected")
    return CheckResult("contact-graph", True)


def check_wellsep(cc: CubeComplex, samples: int, rng, ks=(0, 2)) -> CheckResult:
    pairs = rng.integers(0, cc.n_vertices, size=(min(samples, 200), 2)).tolist()
    for x, y in pairs:
        d1 = core.distance(cc, x, y)
        prev = -1
        for k in ks:
            m = wellsep_metric(cc, k)
            v = m(x, y)
            if v != m(y, x) or v > d1 or v < prev or (x == y and v != 0):
                return CheckResult("wellsep-metric", False, f"d_{k}({x},{y}) = {v}, d1 = {d1}")
            prev = v
    return CheckResult("wellsep-metric", True)


def verify_complex(cc: CubeComplex, *, samples: int = 500, seed: int = 0,
                   exhaustive_limit: int = EXHAUSTIVE_LIMIT) -> list[CheckResult]:
    rng = np.random.default_rng(seed)
    exhaustive = cc.n_vertices <= exhaustive_limit
    return [
        check_halfspaces(cc),
        check_distance(cc, exhaustive, samples, rng),
        check_median(cc, exhaustive, samples, rng),
        check_gates(cc, exhaustive, samples, rng),
        check_hulls(cc, exhaustive, samples, rng),
        check_paths(cc),
        check_contact(cc),
        check_wellsep(cc, samples, rng),
    ]
