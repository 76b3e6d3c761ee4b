"""Deterministic example complexes with distinguished geodesics, and JSON I/O.

Families
--------
grid                (N+1) x (N+1) quadrant grid; paths "diagonal" and "axis"
tree_ball           ball of radius D in the regular tree of a given valence;
                    path "radial"
ball_times_segment  tree ball (valence 4) times a path of length L; path "vertical"
example42           binary-tree bands Gamma_n x [2^n - 1, 2^(n+1) - 1] glued along
                    Gamma_(n-1) inside Gamma_n; path "b" runs up the root column
"""
from __future__ import annotations

import json
import os
from dataclasses import dataclass, field
from pathlib import Path

from .contraction import GeodesicPath
from .core import CubeComplex, build_complex
from .errors import ComplexError, GeodesicError

FAMILIES = ("grid", "tree_ball", "ball_times_segment", "example42")
EXAMPLE42_MAX_DEPTH = 7


def _positive(name: str, value: int, least: int) -> int:
    if not isinstance(value, int) or value < least:
        raise ValueError(f"{name} must be an integer >= {least}, got {value!r}")
    return value


def gen_grid(n: int, **build) -> CubeComplex:
    _positive("N", n, 2)
    side = n + 1

    def vid(x: int, y: int) -> int:
        return y * side + x

    edges = []
    for y in range(side):
        for x in range(side):
            if x < n:
                edges.append((vid(x, y), vid(x + 1, y)))
            if y < n:
                edges.append((vid(x, y), vid(x, y + 1)))
    diagonal = [vid(0, 0)]
    for i in range(n):
        diagonal.append(vid(i + 1, i))
        diagonal.append(vid(i + 1, i + 1))
    axis = [vid(x, 0) for x in range(side)]
    return build_complex(range(side * side), edges, 0, name=f"grid-{n}",
                         paths={"diagonal": diagonal, "axis": axis}, **build)


def _tree_ball_edges(valence: int, depth: int) -> tuple[int, list[tuple[int, int]], list[int]]:
    """Vertices in BFS order from the root; returns (count, edges, radial path)."""
    edges = []
    layer = [0]
    count = 1
    radial = [0]
    for level in range(depth):
        nxt = []
        for v in layer:
            children = valence if v == 0 else valence - 1
            for _ in range(children):
                edges.append((v, count))
                nxt.append(count)
                count += 1
        radial.append(nxt[0])
        layer = nxt
    return count, edges, radial


def gen_tree_ball(valence: int, depth: int, **build) -> CubeComplex:
    _positive("valence", valence, 3)
    _positive("D", depth, 1)
    n, edges, radial = _tree_ball_edges(valence, depth)
    return build_complex(range(n), edges, 0, name=f"tree_ball-{valence}-{depth}",
                         paths={"radial": radial}, **build)


def gen_ball_times_segment(depth: int, length: int, **build) -> CubeComplex:
    _positive("D", depth, 1)
    _positive("L", length, 2)
    n_tree, tree_edges, _ = _tree_ball_edges(4, depth)

    def vid(v: int, h: int) -> int:
        return h * n_tree + v

    edges = []
    for h in range(length + 1):
        edges.extend((vid(u, h), vid(v, h)) for u, v in tree_edges)
        if h < length:
            edges.extend((vid(v, h), vid(v, h + 1)) for v in range(n_tree))
    vertical = [vid(0, h) for h in range(length + 1)]
    return build_complex(range(n_tree * (length + 1)), edges, 0,
                         name=f"ball_times_segment-{depth}-{length}",
                         paths={"vertical": vertical}, **build)


def example42_depth_at(s: int, n: int) -> int:
    """Depth of the binary tree present at height ``s`` (band n covers
    heights 2^n - 1 .. 2^(n+1) - 1, the lower face shared with band n - 1)."""
    return min(n, (s + 1).bit_length() - 1)


def example42_layout(n: int) -> list[tuple[int, int]]:
    """(tree node, height) of every vertex, in vertex id order.

    Tree nodes use heap numbering: root 0, children of i are 2i+1 and 2i+2,
    and the depth-d tree is the set of nodes below 2^(d+1) - 1.
    """
    layout = []
    for s in range(2 ** (n + 1)):
        size = 2 ** (example42_depth_at(s, n) + 1) - 1
        layout.extend((v, s) for v in range(size))
    return layout


def gen_example42(n: int, **build) -> CubeComplex:
    if not isinstance(n, int) or not 1 <= n <= EXAMPLE42_MAX_DEPTH:
        raise ValueError(f"example42 depth must be in 1..{EXAMPLE42_MAX_DEPTH}, got {n!r}")
    layout = example42_layout(n)
    ids = {node: i for i, node in enumerate(layout)}
    edges = []
    for (v, s), i in ids.items():
        if v > 0:
            edges.append((ids[((v - 1) // 2, s)], i))
        up = ids.get((v, s + 1))
        if up is not None:
            edges.append((i, up))
    b = [ids[(0, s)] for s in range(2 ** (n + 1))]
    return build_complex(range(len(layout)), edges, 0, name=f"example42-{n}", paths={"b": b}, **build)


@dataclass(frozen=True)
class FamilySpec:
    family: str
    params: dict = field(default_factory=dict)
    seed: int = 0  # reserved; every family is deterministic

    def build(self, **build) -> CubeComplex:
        p = self.params
        try:
            if self.family == "grid":
                return gen_grid(p["n"], **build)
            if self.family == "tree_ball":
                return gen_tree_ball(p.get("valence", 4), p["d"], **build)
            if self.family == "ball_times_segment":
                return gen_ball_times_segment(p["d"], p["l"], **build)
            if self.family == "example42":
                return gen_example42(p["depth"], **build)
        except KeyError as exc:
            raise ValueError(f"family {self.family!r} needs parameter {exc.args[0]!r}") from None
        raise ValueError(f"unknown family {self.family!r}; expected one of {FAMILIES}")


def geodesic(cc: CubeComplex, name: str) -> GeodesicPath:
    if name not in cc.paths:
        raise GeodesicError(f"complex {cc.name!r} has no path named {name!r}; "
                            f"available: {sorted(cc.paths)}")
    return GeodesicPath(cc, cc.paths[name], name)


# -- JSON ---------------------------------------------------------------------

def complex_to_json(cc: CubeComplex) -> str:
    edges = sorted((min(u, v), max(u, v)) for u, v in cc.edges)
    lines = [
        "{",
        f'  "name": {json.dumps(cc.name)},',
        f'  "basepoint": {cc.basepoint},',
        f'  "vertices": {json.dumps(list(range(cc.n_vertices)))},',
        f'  "edges": {json.dumps([list(e) for e in edges], separators=(",", ":"))},',
        f'  "paths": {json.dumps({k: list(v) for k, v in sorted(cc.paths.items())})}',
        "}",
    ]
    return "\n".join(lines) + "\n"


def complex_from_json(text: str, **build) -> CubeComplex:
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ComplexError(f"malformed complex JSON: {exc}") from exc
    if not isinstance(data, dict):
        raise ComplexError("complex JSON must be an object")
    missing = {"basepoint", "vertices", "edges"} - data.keys()
    if missing:
        raise ComplexError(f"complex JSON lacks {sorted(missing)}")
    try:
        edges = [(int(u), int(v)) for u, v in data["edges"]]
        vertices = [int(v) for v in data["vertices"]]
        paths = {str(k): tuple(int(v) for v in p) for k, p in data.get("paths", {}).items()}
    except (TypeError, ValueError) as exc:
        raise ComplexError(f"malformed complex JSON: {exc}") from exc
    return build_complex(vertices, edges, int(data["basepoint"]), name=str(data.get("name", "")),
                         paths=paths, **build)


def atomic_write(path: str | os.PathLike, text: str) -> None:
    path = Path(path)
    tmp = path.with_name(f".{path.name}.tmp{os.getpid()}")
    try:
        tmp.write_text(text)
        os.replace(tmp, path)
    finally:
        if tmp.exists():
            tmp.unlink()


def save_complex(cc: CubeComplex, path: str | os.PathLike) -> None:
    atomic_write(path, complex_to_json(cc))


def load_complex(path: str | os.PathLike, **build) -> CubeComplex:
    return complex_from_json(Path(path).read_text(), **build)
