"""Relations between hyperplanes: crossing, facing triples, k-separation,
well-separation and strong separation.

Well-separation asks for the largest subfamily of the hyperplanes crossing
both members of a pair that contains no facing triple.  That is an independent
set problem in the 3-uniform hypergraph of facing triples.  Two solvers are
used:

* pairwise disjoint families: a family without facing triples is linearly
  ordered by separation, i.e. a chain of nested halfspaces, so the answer is
  the longest strict-inclusion chain of oriented halfspaces (polynomial);
* anything else: branch and bound with a node budget.  Results carry an
  exactness flag that is false when the budget ran out.
"""
from __future__ import annotations

import csv
import io
import json
from dataclasses import asdict, dataclass
from itertools import combinations
from typing import Iterable

import numpy as np

from .core import CubeComplex, bools_from_mask, ids_from_mask, mask_from_ids
from .errors import FacingTripleError, HyperplaneRelationError

DEFAULT_BUDGET = 10_000_000


def _pair(cc: CubeComplex, h1: int, h2: int) -> tuple[int, int]:
    h1, h2 = cc.check_hyperplane(h1), cc.check_hyperplane(h2)
    if h1 == h2:
        raise HyperplaneRelationError(f"hyperplane {h1} given twice")
    return h1, h2


def crosses(cc: CubeComplex, h1: int, h2: int) -> bool:
    """All four quadrants of the two hyperplanes are nonempty."""
    h1, h2 = _pair(cc, h1, h2)
    return bool(cc.cross[h1, h2])


def _side_containing(cc: CubeComplex, h: int, g: int) -> int:
    """Halfspace of ``h`` holding the carrier of the disjoint hyperplane ``g``:
    1 for plus, 0 for minus."""
    return 1 if cc.carrier_masks[g] & cc.plus_masks[h] else 0


def _require_disjoint(cc: CubeComplex, hs: Iterable[int]) -> None:
    for a, b in combinations(hs, 2):
        if a == b:
            raise HyperplaneRelationError(f"hyperplane {a} given twice")
        if cc.cross[a, b]:
            raise HyperplaneRelationError(f"hyperplanes {a} and {b} cross")


def separates_hyperplanes(cc: CubeComplex, h: int, h1: int, h2: int) -> bool:
    """True iff the carriers of ``h1`` and ``h2`` lie in different halfspaces of ``h``."""
    hs = [cc.check_hyperplane(v) for v in (h, h1, h2)]
    _require_disjoint(cc, hs)
    return _side_containing(cc, h, h1) != _side_containing(cc, h, h2)


def is_facing_triple(cc: CubeComplex, h1: int, h2: int, h3: int) -> bool:
    hs = [cc.check_hyperplane(v) for v in (h1, h2, h3)]
    if len(set(hs)) != 3:
        raise HyperplaneRelationError("facing triples need three distinct hyperplanes")
    if any(cc.cross[a, b] for a, b in combinations(hs, 2)):
        return False
    a, b, c = hs
    return (_side_containing(cc, a, b) == _side_containing(cc, a, c)
            and _side_containing(cc, b, a) == _side_containing(cc, b, c)
            and _side_containing(cc, c, a) == _side_containing(cc, c, b))


def crossing_mask(cc: CubeComplex, h1: int, h2: int) -> int:
    """Hyperplanes crossing both ``h1`` and ``h2``, as a bitmask over ids."""
    return cc.cross_masks[h1] & cc.cross_masks[h2]


def _disjoint_pair(cc: CubeComplex, h1: int, h2: int) -> tuple[int, int]:
    h1, h2 = _pair(cc, h1, h2)
    if cc.cross[h1, h2]:
        raise HyperplaneRelationError(f"hyperplanes {h1} and {h2} cross")
    return h1, h2


def k_separation(cc: CubeComplex, h1: int, h2: int) -> int:
    """Number of hyperplanes crossing both members of a disjoint pair."""
    h1, h2 = _disjoint_pair(cc, h1, h2)
    return crossing_mask(cc, h1, h2).bit_count()


def strongly_separated(cc: CubeComplex, h1: int, h2: int) -> bool:
    h1, h2 = _pair(cc, h1, h2)
    return not cc.cross[h1, h2] and crossing_mask(cc, h1, h2) == 0


# -- maximum family without facing triples -----------------------------------

def _relation_matrix(cc: CubeComplex, hs: list[int]) -> np.ndarray:
    """rel[i, j] = side of hs[i] holding hs[j] (0/1), or -1 if they cross."""
    if not hs:
        return np.zeros((0, 0), dtype=np.int8)
    carriers = np.stack([bools_from_mask(cc.carrier_masks[h], cc.n_vertices) for h in hs])
    plus = cc.side[:, hs].astype(np.int64)
    on_plus = (carriers.astype(np.int64) @ plus).T > 0
    rel = on_plus.astype(np.int8)
    rel[cc.cross[np.ix_(hs, hs)]] = -1
    np.fill_diagonal(rel, -1)
    return rel


def _chain_longest(cc: CubeComplex, hs: list[int]) -> list[int]:
    """Longest family whose halfspaces, suitably oriented, are strictly nested."""
    oriented = []
    for h in hs:
        oriented.append((cc.plus_masks[h], h))
        oriented.append((cc.minus_masks[h], h))
    oriented.sort(key=lambda item: item[0].bit_count())
    n = len(oriented)
    best = [1] * n
    prev = [-1] * n
    for j in range(n):
        bj, hj = oriented[j]
        for i in range(j):
            bi, hi = oriented[i]
            if hi != hj and best[i] + 1 > best[j] and bi & ~bj == 0 and bi != bj:
                best[j] = best[i] + 1
                prev[j] = i
    if not n:
        return []
    j = int(np.argmax(best))
    chain = []
    while j >= 0:
        chain.append(oriented[j][1])
        j = prev[j]
    return chain[::-1]


def _facing_table(rel: np.ndarray) -> list[list[int]]:
    """table[a][b] = bitmask of c (local indices) with {a, b, c} a facing triple."""
    m = rel.shape[0]
    table = [[0] * m for _ in range(m)]
    disjoint = rel >= 0
    for a in range(m):
        for b in range(a + 1, m):
            if not disjoint[a, b]:
                continue
            ok = disjoint[a] & disjoint[b]
            ok &= rel[a] == rel[a, b]
            ok &= rel[b] == rel[b, a]
            ok &= rel[:, a] == rel[:, b]
            ok[a] = ok[b] = False
            mask = mask_from_ids(np.flatnonzero(ok).tolist())
            table[a][b] = table[b][a] = mask
    return table


def _branch_and_bound(table: list[list[int]], budget: int) -> tuple[int, bool]:
    """Largest vertex set of the facing-triple hypergraph containing no edge.

    Returns (bitmask of local indices, exact).
    """
    m = len(table)
    involved = 0
    for a in range(m):
        for b in range(m):
            if table[a][b]:
                involved |= 1 << a
    free = ((1 << m) - 1) & ~involved
    best_set = 0
    nodes = 0
    exact = True
    # chosen, forbidden-by-chosen, remaining candidates
    stack = [(0, 0, involved)]
    while stack:
        chosen, blocked, cand = stack.pop()
        nodes += 1
        if nodes > budget:
            exact = False
            break
        cand &= ~blocked
        if chosen.bit_count() + cand.bit_count() <= best_set.bit_count():
            continue
        if not cand:
            best_set = chosen
            continue
        v = (cand & -cand).bit_length() - 1
        rest = cand & ~(1 << v)
        # exclude v first on the stack so that inclusion is explored first
        stack.append((chosen, blocked, rest))
        new_blocked = blocked
        c = chosen
        while c:
            u = (c & -c).bit_length() - 1
            c &= c - 1
            new_blocked |= table[u][v]
        stack.append((chosen | (1 << v), new_blocked, rest))
    return best_set | free, exact


def max_no_facing_triple_family(cc: CubeComplex, hyperplanes: Iterable[int] | int,
                                budget: int = DEFAULT_BUDGET) -> tuple[int, frozenset[int], bool]:
    """Largest subfamily of ``hyperplanes`` containing no facing triple.

    Returns (size, witness, exact).
    """
    if isinstance(hyperplanes, int):
        hs = ids_from_mask(hyperplanes, cc.n_hyperplanes)
    else:
        hs = sorted({cc.check_hyperplane(h) for h in hyperplanes})
    key = ("nft", mask_from_ids(hs), budget)
    cached = cc._memo.get(key)
    if cached is not None:
        return cached
    if not hs:
        result = (0, frozenset(), True)
    elif not cc.cross[np.ix_(hs, hs)].any():
        chain = _chain_longest(cc, hs)
        result = (len(chain), frozenset(chain), True)
    else:
        table = _facing_table(_relation_matrix(cc, hs))
        local, exact = _branch_and_bound(table, budget)
        witness = frozenset(hs[i] for i in ids_from_mask(local, len(hs)))
        result = (len(witness), witness, exact)
    cc._memo[key] = result
    return result


def well_separation(cc: CubeComplex, h1: int, h2: int,
                    budget: int = DEFAULT_BUDGET) -> tuple[int, bool]:
    """Largest facing-triple-free family among the hyperplanes crossing both
    members of a disjoint pair, with an exactness flag."""
    h1, h2 = _disjoint_pair(cc, h1, h2)
    size, _, exact = max_no_facing_triple_family(cc, crossing_mask(cc, h1, h2), budget)
    return size, exact


def crossing_chain_bound(cc: CubeComplex, hyperplanes: Iterable[int]) -> int:
    """Most members of a facing-triple-free family separating a single vertex pair."""
    hs = sorted({cc.check_hyperplane(h) for h in hyperplanes})
    if not hs:
        return 0
    for a, b, c in combinations(hs, 3):
        if is_facing_triple(cc, a, b, c):
            raise FacingTripleError(f"{(a, b, c)} is a facing triple")
    codes = np.unique(np.packbits(cc.side[:, hs], axis=1), axis=0)
    best = 0
    for row in codes:
        best = max(best, int(np.unpackbits(codes ^ row, axis=1).sum(axis=1).max()))
    return best


# -- reports -----------------------------------------------------------------

@dataclass(frozen=True)
class SeparationReport:
    pair: tuple[int, int]
    crossing_count: int
    well_separation: int
    exact: bool
    strongly_separated: bool

    def as_row(self) -> dict:
        row = asdict(self)
        a, b = row.pop("pair")
        return {"h1": a, "h2": b, **row}


def separation_report(cc: CubeComplex, h1: int, h2: int,
                      budget: int = DEFAULT_BUDGET) -> SeparationReport:
    k = k_separation(cc, h1, h2)
    ws, exact = well_separation(cc, h1, h2, budget)
    return SeparationReport((h1, h2), k, ws, exact, k == 0)


def reports_to_json(reports: Iterable[SeparationReport]) -> str:
    return json.dumps([r.as_row() for r in reports], indent=1)


def reports_to_csv(reports: Iterable[SeparationReport]) -> str:
    buf = io.StringIO()
    fields = ["h1", "h2", "crossing_count", "well_separation", "exact", "strongly_separated"]
    writer = csv.DictWriter(buf, fieldnames=fields, lineterminator="\n")
    writer.writeheader()
    for r in reports:
        writer.writerow(r.as_row())
    return buf.getvalue()
