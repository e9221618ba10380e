"""Exhaustive search over connected binary subdesigns.

A two-replicate binary subdesign with ``u`` treatments in ``b`` blocks is
the dual of a loop-free multigraph: blocks are vertices, treatments are
edges. So the search runs over connected loop-free multigraphs on ``b``
vertices with ``u`` edges, one per isomorphism class.

Classes are generated edge by edge. Every class at level ``e`` is extended
by one edge in every possible place and the children are reduced to a
canonical form. A child whose components cannot be joined by the edges
still to come is dropped. Deleting any edge of a connected multigraph
leaves at most two components, so nothing reachable is lost.

Canonical form: colour refinement on the vertices, then individualization
of the first non-singleton cell until the remaining within-cell orderings
are few enough to scan. The code is the lexicographically smallest upper
triangle of the adjacency matrix over all orderings visited.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Iterator

import numpy as np

from .criteria import a2_value, a_value, mv_value
from .model import BlockDesign, DesignError, FullDesignSpec, dual, intrablock_matrix
from .linalg import pinv

__all__ = [
    "CAP",
    "EnumerationResult",
    "best_binary",
    "block_mv",
    "canonical_form",
    "compare_criteria",
    "enum_duals",
    "enum_multigraphs",
    "min_feasible_k",
    "mv_min",
]

CAP = 18
_SCAN_LIMIT = 720
CRITERIA = ("A", "MV", "A1", "A2")


# ---------------------------------------------------------------------------
# canonical form


def _refine(rows, cells):
    """Split cells by (weighted degree, sum of squared multiplicities) into every cell."""
    while True:
        out = []
        for cell in cells:
            if len(cell) == 1:
                out.append(cell)
                continue
            groups: dict[tuple, list[int]] = {}
            for x in cell:
                r = rows[x]
                sig = tuple(
                    (sum(r[y] for y in c), sum(r[y] * r[y] for y in c)) for c in cells
                )
                groups.setdefault(sig, []).append(x)
            out.extend(tuple(groups[key]) for key in sorted(groups))
        if len(out) == len(cells):
            return out
        cells = out


def _scan(adj: np.ndarray, cells, iu) -> tuple[bytes, tuple[int, ...]]:
    orders = np.array([
        [x for part in combo for x in part]
        for combo in itertools.product(*(itertools.permutations(c) for c in cells))
    ])
    vals = adj[orders[:, iu[0]], orders[:, iu[1]]]
    best = int(np.lexsort(vals[:, ::-1].T)[0])
    return vals[best].astype(np.uint8).tobytes(), tuple(int(x) for x in orders[best])


def _search(adj, rows, cells, iu):
    cells = _refine(rows, cells)
    if math.prod(math.factorial(len(c)) for c in cells) <= _SCAN_LIMIT:
        return _scan(adj, cells, iu)
    pos = next(i for i, c in enumerate(cells) if len(c) > 1)
    best = None
    for x in cells[pos]:
        rest = tuple(y for y in cells[pos] if y != x)
        sub = cells[:pos] + [(x,), rest] + cells[pos + 1:]
        cand = _search(adj, rows, sub, iu)
        if best is None or cand[0] < best[0]:
            best = cand
    return best


def canonical_form(adj) -> tuple[bytes, tuple[int, ...]]:
    """Canonical code of a loop-free multigraph and a vertex order attaining it.

    ``adj`` is a symmetric matrix of edge multiplicities (each below 256).
    Two multigraphs are isomorphic iff their codes are equal.
    """
    adj = np.asarray(adj, dtype=np.int64)
    n = adj.shape[0]
    if n == 1:
        return b"", (0,)
    return _search(adj, adj.tolist(), [tuple(range(n))], _triu(n))


@lru_cache(maxsize=None)
def _triu(n: int):
    return np.triu_indices(n, 1)


# ---------------------------------------------------------------------------
# generation


def _components(adj: np.ndarray) -> int:
    rows = adj.tolist()
    n = len(rows)
    seen = [False] * n
    count = 0
    for s in range(n):
        if seen[s]:
            continue
        count += 1
        stack = [s]
        seen[s] = True
        while stack:
            x = stack.pop()
            for y, m in enumerate(rows[x]):
                if m and not seen[y]:
                    seen[y] = True
                    stack.append(y)
    return count


def _check_cap(b: int, u: int) -> None:
    if b < 2:
        raise DesignError(f"need b >= 2, got {b}")
    if u < b - 1:
        raise DesignError(f"no connected design: u={u} < b-1={b - 1}")
    if u + b > CAP:
        raise DesignError(f"u + b = {u + b} exceeds the enumeration cap u + b <= {CAP}")


@lru_cache(maxsize=64)
def enum_multigraphs(b: int, u: int) -> tuple[tuple[int, ...], ...]:
    """Connected loop-free multigraphs on ``b`` vertices with ``u`` edges, up to isomorphism.

    Each class is returned as the flattened upper triangle of its canonically
    relabeled adjacency matrix, sorted by canonical code.
    """
    _check_cap(b, u)
    iu = np.triu_indices(b, 1)
    pairs = list(zip(*iu))
    level = {b"": np.zeros((b, b), dtype=np.int64)}
    for e in range(u):
        remaining = u - e - 1
        nxt: dict[bytes, np.ndarray] = {}
        for adj in level.values():
            for i, j in pairs:
                child = adj.copy()
                child[i, j] += 1
                child[j, i] += 1
                if remaining < b - 1 and _components(child) - 1 > remaining:
                    continue
                code, order = canonical_form(child)
                if code not in nxt:
                    o = list(order)
                    nxt[code] = child[np.ix_(o, o)]
        level = nxt
    return tuple(tuple(int(x) for x in level[code][iu]) for code in sorted(level))


def _graph_design(b: int, upper: tuple[int, ...]) -> BlockDesign:
    iu = np.triu_indices(b, 1)
    edges = []
    for (i, j), m in zip(zip(*iu), upper):
        edges.extend([(int(i) + 1, int(j) + 1)] * m)
    return BlockDesign(edges)


def enum_duals(b: int, u: int) -> Iterator[BlockDesign]:
    """One block-size-2 design per class: ``b`` treatments, ``u`` blocks, connected, no ``{j, j}``."""
    for upper in enum_multigraphs(b, u):
        yield _graph_design(b, upper)


# ---------------------------------------------------------------------------
# optimisation over the class


def _criterion(spec: FullDesignSpec, criterion: str) -> float:
    if criterion == "A":
        return a_value(spec)[0]
    if criterion == "MV":
        return mv_value(spec).total
    if criterion == "A1":
        return a2_value(spec)[0]
    if criterion == "A2":
        return a2_value(spec)[1]
    raise ValueError(f"criterion must be one of {CRITERIA}, got {criterion!r}")


@dataclass
class EnumerationResult:
    u: int
    b: int
    k: int
    criterion: str
    optimum: float
    optimizers: list[BlockDesign]
    n_classes: int
    n_feasible: int
    values: list[float] = field(default_factory=list, repr=False)

    @property
    def optimizer(self) -> BlockDesign:
        return self.optimizers[0]


def _feasible_subdesigns(u: int, b: int, k: int):
    if b * k - 2 * u <= 0:
        raise DesignError(f"w = bk - 2u = {b * k - 2 * u} must be positive")
    for g in enum_duals(b, u):
        d = dual(g)
        if d.k_max <= k:
            yield d


def best_binary(u: int, b: int, k: int, criterion: str = "A", *, rtol: float = 1e-9) -> EnumerationResult:
    """Minimise a criterion of ``d0`` over all connected binary subdesigns for ``(u, b, k)``.

    All tied optimizers are returned, in canonical order.
    """
    criterion = criterion.upper()
    if criterion not in CRITERIA:
        raise ValueError(f"criterion must be one of {CRITERIA}, got {criterion!r}")
    _check_cap(b, u)
    designs, values = [], []
    for d in _feasible_subdesigns(u, b, k):
        designs.append(d)
        values.append(_criterion(FullDesignSpec(d, k), criterion))
    if not designs:
        raise DesignError(f"no feasible binary subdesign for u={u}, b={b}, k={k}")
    vals = np.array(values)
    opt = float(vals.min())
    tie = vals <= opt + rtol * max(1.0, abs(opt))
    return EnumerationResult(
        u=u, b=b, k=k, criterion=criterion, optimum=opt,
        optimizers=[d for d, t in zip(designs, tie) if t],
        n_classes=len(enum_multigraphs(b, u)), n_feasible=len(designs), values=values,
    )


def block_mv(d: BlockDesign) -> float:
    """MV-criterion of an ordinary block design: its largest pairwise contrast variance."""
    cp = pinv(intrablock_matrix(d))
    dg = np.diag(cp)
    pv = dg[:, None] + dg[None, :] - 2.0 * cp
    return float(pv[np.triu_indices(cp.shape[0], 1)].max())


@lru_cache(maxsize=128)
def mv_min(b: int, u: int) -> float:
    """Smallest MV value among connected designs with ``b`` treatments in ``u`` blocks of size 2."""
    return min(block_mv(g) for g in enum_duals(b, u))


def min_feasible_k(u: int, b: int) -> int:
    """Smallest ``k`` for which some connected binary subdesign fits with ``w > 0``."""
    _check_cap(b, u)
    k = 2 * u // b + 1
    while not any(g for g in _feasible_subdesigns(u, b, k)):
        k += 1
    return k


def compare_criteria(u: int, b: int, k: int, *, rtol: float = 1e-9) -> dict:
    """Does the A-optimal binary subdesign also minimise A_WW and A_UW + A_WW?

    Returns the optima and a flag per variant; a False flag is an exception
    to report, not an error.
    """
    rows = []
    for d in _feasible_subdesigns(u, b, k):
        spec = FullDesignSpec(d, k)
        a_ww, a2_sum, _, _ = a2_value(spec)
        rows.append((a_value(spec)[0], a_ww, a2_sum))
    if not rows:
        raise DesignError(f"no feasible binary subdesign for u={u}, b={b}, k={k}")
    vals = np.array(rows)
    mins = vals.min(axis=0)
    tol = rtol * np.maximum(1.0, np.abs(mins))
    a_opt = np.flatnonzero(vals[:, 0] <= mins[0] + tol[0])
    return {
        "u": u, "b": b, "k": k, "n_feasible": len(rows),
        "a_min": float(mins[0]), "a1_min": float(mins[1]), "a2_min": float(mins[2]),
        "a1_agrees": bool((vals[a_opt, 1] <= mins[1] + tol[1]).any()),
        "a2_agrees": bool((vals[a_opt, 2] <= mins[2] + tol[2]).any()),
    }
