"""Block designs, full-design specs, and the subdesign information matrices.

A partially replicated full design ``d0`` has ``b`` blocks of common size
``k``. Its ``u`` twice-replicated treatments form the subdesign ``d``; the
remaining ``w = bk - 2u`` singly replicated treatments fill the ``s_j = k -
|block j of d|`` leftover plots of each block. Everything about ``d0`` is
determined by ``d`` and ``k``, so :class:`FullDesignSpec` is just that pair.
"""

from __future__ import annotations

from collections import Counter, deque
from dataclasses import dataclass, field
from functools import cached_property
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np

from .linalg import as_symmetric

__all__ = [
    "BlockDesign",
    "DesignError",
    "FullDesignSpec",
    "ValidationReport",
    "dual",
    "full_design",
    "incidence",
    "info_C",
    "info_Ctilde",
    "intrablock_matrix",
    "is_connected",
    "normalize_labels",
    "read_blocks",
    "parse_blocks",
    "format_blocks",
    "validate",
    "write_blocks",
]


class DesignError(ValueError):
    """A design or full-design spec that violates a structural requirement."""


@dataclass(frozen=True)
class BlockDesign:
    """An ordered list of blocks, each a multiset of positive integer labels.

    Blocks keep their order; labels inside a block are stored sorted, so a
    repeated label encodes multiplicity.
    """

    blocks: tuple[tuple[int, ...], ...]

    def __init__(self, blocks: Iterable[Iterable[int]]):
        norm = []
        for j, blk in enumerate(blocks, start=1):
            blk = tuple(sorted(int(t) for t in blk))
            if not blk:
                raise DesignError(f"block {j} is empty")
            if blk[0] < 1:
                raise DesignError(f"block {j} has a non-positive label {blk[0]}")
            norm.append(blk)
        if not norm:
            raise DesignError("a design needs at least one block")
        object.__setattr__(self, "blocks", tuple(norm))

    def __len__(self) -> int:
        return len(self.blocks)

    def __iter__(self):
        return iter(self.blocks)

    def __repr__(self) -> str:
        inner = ", ".join("{" + ", ".join(map(str, b)) + "}" for b in self.blocks)
        return f"BlockDesign([{inner}])"

    @cached_property
    def treatments(self) -> tuple[int, ...]:
        """Sorted treatment labels; row order of :func:`incidence`."""
        return tuple(sorted({t for blk in self.blocks for t in blk}))

    @property
    def num_blocks(self) -> int:
        return len(self.blocks)

    @property
    def num_treatments(self) -> int:
        return len(self.treatments)

    @property
    def block_sizes(self) -> tuple[int, ...]:
        return tuple(len(blk) for blk in self.blocks)

    @cached_property
    def replications(self) -> dict[int, int]:
        return dict(sorted(Counter(t for blk in self.blocks for t in blk).items()))

    @property
    def is_binary(self) -> bool:
        return all(len(set(blk)) == len(blk) for blk in self.blocks)

    @property
    def k_max(self) -> int:
        return max(self.block_sizes)

    @property
    def constant_block_size(self) -> bool:
        return len(set(self.block_sizes)) == 1


def incidence(d: BlockDesign) -> np.ndarray:
    """Treatments x blocks multiplicity matrix, rows in sorted label order."""
    row = {t: i for i, t in enumerate(d.treatments)}
    n = np.zeros((d.num_treatments, d.num_blocks), dtype=int)
    for j, blk in enumerate(d.blocks):
        for t in blk:
            n[row[t], j] += 1
    return n


def dual(d: BlockDesign) -> BlockDesign:
    """The design with incidence ``N^T``.

    Dual treatments are the block indices ``1..b``; dual block ``i``
    corresponds to the ``i``-th treatment of ``d`` in sorted label order.
    """
    n = incidence(d)
    return BlockDesign(
        [j + 1 for j in range(n.shape[1]) for _ in range(n[i, j])]
        for i in range(n.shape[0])
    )


def normalize_labels(d: BlockDesign) -> BlockDesign:
    """Relabel treatments ``1..u`` in order of first occurrence."""
    mapping: dict[int, int] = {}
    for blk in d.blocks:
        for t in blk:
            mapping.setdefault(t, len(mapping) + 1)
    return BlockDesign([mapping[t] for t in blk] for blk in d.blocks)


def is_connected(d: BlockDesign) -> bool:
    """Whether the treatment-block incidence graph is connected."""
    tblocks: dict[int, list[int]] = {}
    for j, blk in enumerate(d.blocks):
        for t in set(blk):
            tblocks.setdefault(t, []).append(j)
    seen_blocks = {0}
    seen_trt: set[int] = set()
    queue = deque([0])
    while queue:
        j = queue.popleft()
        for t in set(d.blocks[j]):
            if t in seen_trt:
                continue
            seen_trt.add(t)
            for j2 in tblocks[t]:
                if j2 not in seen_blocks:
                    seen_blocks.add(j2)
                    queue.append(j2)
    return len(seen_blocks) == d.num_blocks and len(seen_trt) == d.num_treatments


def intrablock_matrix(d: BlockDesign) -> np.ndarray:
    """``R - N K^{-1} N^T`` for an arbitrary block design (unequal sizes allowed)."""
    n = incidence(d).astype(float)
    r = n.sum(axis=1)
    ksz = n.sum(axis=0)
    return as_symmetric(np.diag(r) - (n / ksz) @ n.T)


@dataclass(frozen=True)
class FullDesignSpec:
    """A subdesign ``sub`` together with the full-design block size ``k``."""

    sub: BlockDesign
    k: int

    @property
    def u(self) -> int:
        return self.sub.num_treatments

    @property
    def b(self) -> int:
        return self.sub.num_blocks

    @property
    def w(self) -> int:
        return self.b * self.k - 2 * self.u

    @property
    def v(self) -> int:
        return self.u + self.w

    @property
    def f(self) -> float:
        return self.w / self.v

    @property
    def s(self) -> np.ndarray:
        return self.k - np.asarray(self.sub.block_sizes, dtype=int)


@dataclass
class ValidationReport:
    u: int
    b: int
    k: int
    w: int
    v: int
    f: float
    s: tuple[int, ...]
    binary: bool
    errors: list[str] = field(default_factory=list)

    @property
    def valid(self) -> bool:
        return not self.errors


def validate(spec: FullDesignSpec) -> ValidationReport:
    """Check every structural requirement on ``(d, k)`` and report them all."""
    d, k = spec.sub, spec.k
    s = tuple(int(x) for x in spec.s)
    rep = ValidationReport(
        u=spec.u, b=spec.b, k=k, w=spec.w, v=spec.v,
        f=spec.w / spec.v if spec.v else float("nan"),
        s=s, binary=d.is_binary,
    )
    if k < 1:
        rep.errors.append(f"block size k={k} must be positive")
    bad = {t: r for t, r in d.replications.items() if r != 2}
    if bad:
        shown = ", ".join(f"{t}:{r}" for t, r in list(bad.items())[:6])
        rep.errors.append(f"double replication violated (treatment:replication {shown})")
    if spec.u < spec.b - 1:
        rep.errors.append(f"u >= b-1 violated: u={spec.u}, b={spec.b}")
    over = [j + 1 for j, x in enumerate(s) if x < 0]
    if over:
        rep.errors.append(f"s_j >= 0 violated: blocks {over} exceed k={k}")
    if spec.w <= 0:
        rep.errors.append(f"no singly replicated treatments: w = bk - 2u = {spec.w}")
    # s_j <= k-1 holds automatically since BlockDesign blocks are nonempty
    if not is_connected(d):
        rep.errors.append("subdesign is not connected")
    return rep


def require_valid(spec: FullDesignSpec) -> None:
    rep = validate(spec)
    if not rep.valid:
        raise DesignError("; ".join(rep.errors))


def info_C(spec: FullDesignSpec) -> np.ndarray:
    """``C = 2 I_u - N (k I_b - S)^{-1} N^T`` (the subdesign's C-matrix)."""
    require_valid(spec)
    n = incidence(spec.sub).astype(float)
    sizes = spec.k - spec.s
    return as_symmetric(2.0 * np.eye(spec.u) - (n / sizes) @ n.T)


def info_Ctilde(spec: FullDesignSpec) -> np.ndarray:
    """``C~ = k I_b - S - N^T N / 2`` (the dual's C-matrix)."""
    require_valid(spec)
    n = incidence(spec.sub).astype(float)
    return as_symmetric(np.diag(spec.k - spec.s).astype(float) - 0.5 * n.T @ n)


def full_design(spec: FullDesignSpec) -> BlockDesign:
    """Assemble ``d0``: block ``j`` of ``d`` plus ``s_j`` fresh singly replicated labels.

    Subdesign treatments are renumbered ``1..u`` in sorted order; the new
    labels ``u+1..u+w`` are handed out in block order.
    """
    require_valid(spec)
    d = spec.sub
    relabel = {t: i + 1 for i, t in enumerate(d.treatments)}
    nxt = spec.u + 1
    blocks = []
    for blk, sj in zip(d.blocks, spec.s):
        extra = list(range(nxt, nxt + int(sj)))
        nxt += int(sj)
        blocks.append([relabel[t] for t in blk] + extra)
    return BlockDesign(blocks)


# ---------------------------------------------------------------------------
# ".blocks" text format


def parse_blocks(text: str, *, normalize: bool = True) -> BlockDesign:
    """Parse ``.blocks`` text: one block per line, ``#`` comments.

    With ``normalize`` the labels are mapped to ``1..u`` in first-occurrence
    order, unless they already are exactly ``1..u`` (then printed labels are
    kept so that edit scripts can refer to them).
    """
    blocks = []
    for lineno, line in enumerate(text.splitlines(), start=1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        try:
            labels = [int(tok) for tok in line.split()]
        except ValueError as exc:
            raise DesignError(f"line {lineno}: {exc}") from None
        if any(t < 1 for t in labels):
            raise DesignError(f"line {lineno}: labels must be positive integers")
        blocks.append(labels)
    d = BlockDesign(blocks)
    if normalize and d.treatments != tuple(range(1, d.num_treatments + 1)):
        d = normalize_labels(d)
    return d


def read_blocks(path: str | Path, *, normalize: bool = True) -> BlockDesign:
    return parse_blocks(Path(path).read_text(encoding="utf-8"), normalize=normalize)


def format_blocks(d: BlockDesign, header: Sequence[str] = ()) -> str:
    lines = [f"# {h}" for h in header]
    lines += [" ".join(map(str, blk)) for blk in d.blocks]
    return "\n".join(lines) + "\n"


def write_blocks(d: BlockDesign, path: str | Path, header: Sequence[str] = ()) -> None:
    Path(path).write_text(format_blocks(d, header), encoding="utf-8")
