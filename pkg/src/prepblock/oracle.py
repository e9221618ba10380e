"""Brute-force variances computed straight from the full design.

This path never touches the subdesign formulas: it builds the full
``v x v`` information matrix ``C0``, inverts it with the Jacobi-based
pseudoinverse, and reads off every pairwise contrast variance. The
case-by-case closed forms (U-U, W-W in one block, W-W across blocks, U-W)
are in :func:`prop1_variances` so the two can be compared entry by entry.
"""

from __future__ import annotations

import numpy as np

from .linalg import pinv
from .model import (
    BlockDesign,
    DesignError,
    FullDesignSpec,
    full_design,
    incidence,
    info_C,
    info_Ctilde,
    is_connected,
    require_valid,
)

__all__ = [
    "full_info_C0",
    "oracle_variances",
    "prop1_variances",
    "random_spec",
    "variance_partial_sums",
]


def full_info_C0(d0: BlockDesign, k: int) -> np.ndarray:
    """``R - N0 N0^T / k`` for a full design with every block of size ``k``."""
    if set(d0.block_sizes) != {k}:
        raise DesignError(f"every block must have size k={k}, got sizes {sorted(set(d0.block_sizes))}")
    n0 = np.zeros((d0.num_treatments, d0.num_blocks))
    row = {t: i for i, t in enumerate(d0.treatments)}
    for j, blk in enumerate(d0.blocks):
        for t in blk:
            n0[row[t], j] += 1.0
    c0 = np.diag(n0.sum(axis=1)) - n0 @ n0.T / k
    return (c0 + c0.T) / 2.0


def oracle_variances(d0: BlockDesign, k: int, method: str = "jacobi") -> np.ndarray:
    """``v x v`` matrix of contrast variances ``(e_t - e_t')^T C0^+ (e_t - e_t')``."""
    if not is_connected(d0):
        raise DesignError("full design is not connected")
    c0p = pinv(full_info_C0(d0, k), method=method)
    dg = np.diag(c0p)
    var = dg[:, None] + dg[None, :] - 2.0 * c0p
    np.fill_diagonal(var, 0.0)
    return (var + var.T) / 2.0


def prop1_variances(spec: FullDesignSpec) -> np.ndarray:
    """Same matrix as :func:`oracle_variances` of ``full_design(spec)``, via the subdesign.

    Rows/columns: the ``u`` subdesign treatments (sorted), then the ``w``
    singly replicated ones in block order.
    """
    require_valid(spec)
    u, w = spec.u, spec.w
    n = incidence(spec.sub).astype(float)
    cp = pinv(info_C(spec))
    ctp = pinv(info_Ctilde(spec))
    home = np.repeat(np.arange(spec.b), spec.s)   # block of each W treatment
    v = u + w
    var = np.zeros((v, v))

    dg = np.diag(cp)
    var[:u, :u] = dg[:, None] + dg[None, :] - 2.0 * cp

    dgt = np.diag(ctp)
    block_pair = dgt[:, None] + dgt[None, :] - 2.0 * ctp
    ww = 2.0 + block_pair[np.ix_(home, home)]
    same = home[:, None] == home[None, :]
    ww[same] = 2.0
    var[u:, u:] = ww

    uw = np.empty((u, w))
    for i in range(u):
        for h, j in enumerate(home):
            xi = -0.5 * n[i]
            xi[j] += 1.0
            uw[i, h] = 1.5 + xi @ ctp @ xi
    var[:u, u:] = uw
    var[u:, :u] = uw.T
    np.fill_diagonal(var, 0.0)
    return var


def variance_partial_sums(var: np.ndarray, u: int) -> tuple[float, float, float, float]:
    """``(total, UU, WW, UW)`` sums over unordered pairs of a variance matrix."""
    iu = np.triu_indices(var.shape[0], 1)
    total = float(var[iu].sum())
    uu = float(var[:u, :u][np.triu_indices(u, 1)].sum())
    w = var.shape[0] - u
    ww = float(var[u:, u:][np.triu_indices(w, 1)].sum())
    uw = float(var[:u, u:].sum())
    return total, uu, ww, uw


def random_spec(rng: np.random.Generator, *, b_range=(3, 6), u_max: int = 12,
                k_max: int = 12, loop_prob: float = 0.15) -> FullDesignSpec:
    """A random valid spec, built from a random connected multigraph as the dual.

    Vertices are the ``b`` blocks, edges the ``u`` treatments. A spanning
    tree guarantees connectivity; extra edges are random pairs, occasionally
    a loop (a treatment twice in one block, i.e. a non-binary subdesign).
    ``k`` is drawn from the feasible range up to ``k_max``; draws with no
    feasible ``k`` are rejected.
    """
    while True:
        b = int(rng.integers(b_range[0], b_range[1] + 1))
        u = int(rng.integers(b - 1, u_max + 1))
        order = rng.permutation(b)
        edges = [(int(order[i]), int(order[rng.integers(0, i)])) for i in range(1, b)]
        while len(edges) < u:
            x, y = (int(t) for t in rng.integers(0, b, size=2))
            if x == y and rng.random() >= loop_prob:
                continue
            edges.append((x, y))
        perm = rng.permutation(u)
        blocks = [[] for _ in range(b)]
        for label, idx in enumerate(perm, start=1):
            x, y = edges[idx]
            blocks[x].append(label)
            blocks[y].append(label)
        if any(not blk for blk in blocks):
            continue
        d = BlockDesign(blocks)
        lo = d.k_max + 1 if d.constant_block_size else d.k_max
        if lo > k_max:
            continue
        spec = FullDesignSpec(d, int(rng.integers(lo, k_max + 1)))
        if spec.w > 0:
            return spec
