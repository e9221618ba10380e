"""Constructors for the subdesign families, plus block/treatment edits."""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from typing import Iterable, Sequence

from .model import BlockDesign, DesignError, dual

__all__ = [
    "EGDSpec",
    "Edit",
    "egd_design",
    "linked_block",
    "modify",
    "parse_edit_script",
    "square_lattice",
]


def linked_block(lam: int, b: int) -> BlockDesign:
    """Two-replicate linked block design on ``lam * C(b, 2)`` treatments.

    Treatment ``t`` is the ``t``-th pair ``{j, j*}`` in lexicographic order
    (each pair repeated ``lam`` times consecutively) and sits in blocks ``j``
    and ``j*``. Equivalently, the dual of the BIBD whose blocks are all pairs.
    """
    if lam < 1:
        raise DesignError(f"lambda must be >= 1, got {lam}")
    if b < 3:
        raise DesignError(f"linked block design needs b >= 3, got {b}")
    pairs = [p for p in itertools.combinations(range(1, b + 1), 2) for _ in range(lam)]
    return dual(BlockDesign(pairs))


@dataclass(frozen=True)
class EGDSpec:
    m: tuple[int, ...]

    def __init__(self, m: Iterable[int]):
        m = tuple(int(x) for x in m)
        if len(m) < 2 or min(m) < 2:
            raise DesignError(f"EGD needs p >= 2 dimensions each of size >= 2, got {m}")
        object.__setattr__(self, "m", m)


def egd_design(spec: EGDSpec | Sequence[int]) -> BlockDesign:
    """Block-size-2 design on an ``m_1 x ... x m_p`` array of treatments.

    Cells are numbered ``1..prod(m)`` in lexicographic order. Blocks are all
    unordered pairs inside every one-dimensional slice; slices along the last
    dimension come first, then the second to last, and so on. Slices of one
    dimension are listed by their smallest label.
    """
    if not isinstance(spec, EGDSpec):
        spec = EGDSpec(spec)
    m = spec.m
    p = len(m)
    strides = [math.prod(m[i + 1:]) for i in range(p)]
    blocks = []
    for axis in reversed(range(p)):
        others = [range(m[i]) for i in range(p) if i != axis]
        bases = []
        for idx in itertools.product(*others):
            cell = list(idx)
            cell.insert(axis, 0)
            bases.append(1 + sum(c * st for c, st in zip(cell, strides)))
        for base in sorted(bases):
            line = [base + h * strides[axis] for h in range(m[axis])]
            blocks.extend(itertools.combinations(line, 2))
    return BlockDesign(blocks)


def square_lattice(n: int) -> BlockDesign:
    """Simple lattice on ``n^2`` treatments: the rows, then the columns, of an n x n array."""
    if n < 2:
        raise DesignError(f"square lattice needs n >= 2, got {n}")
    rows = [[r * n + c + 1 for c in range(n)] for r in range(n)]
    cols = [[r * n + c + 1 for r in range(n)] for c in range(n)]
    return BlockDesign(rows + cols)


# ---------------------------------------------------------------------------
# edits

EDIT_KINDS = {
    "add_treatment",     # label, block indices...
    "delete_treatment",  # label
    "add_block",         # labels...
    "delete_block",      # block index
    "remove_block",      # labels... (first block equal to this multiset)
    "move_treatment",    # label, from block, to block
}


@dataclass(frozen=True)
class Edit:
    """One edit command. Block indices are 1-based, as printed."""

    kind: str
    args: tuple[int, ...]

    def __post_init__(self):
        if self.kind not in EDIT_KINDS:
            raise DesignError(f"unknown edit {self.kind!r}")

    def __str__(self) -> str:
        return " ".join([self.kind, *map(str, self.args)])


def _block_index(blocks: list[list[int]], j: int) -> int:
    if not 1 <= j <= len(blocks):
        raise DesignError(f"block {j} does not exist (design has {len(blocks)} blocks)")
    return j - 1


def modify(d: BlockDesign, edits: Iterable[Edit | tuple]) -> BlockDesign:
    """Apply edits in order. Nothing is relabeled."""
    blocks = [list(blk) for blk in d.blocks]
    for e in edits:
        if not isinstance(e, Edit):
            e = Edit(e[0], tuple(int(a) for a in e[1:]))
        kind, args = e.kind, e.args
        present = {t for blk in blocks for t in blk}
        if kind == "add_treatment":
            label, *where = args
            if not where:
                raise DesignError("add_treatment needs at least one block")
            for j in where:
                blocks[_block_index(blocks, j)].append(label)
        elif kind == "delete_treatment":
            (label,) = args
            if label not in present:
                raise DesignError(f"treatment {label} does not occur")
            blocks = [[t for t in blk if t != label] for blk in blocks]
            empty = [j + 1 for j, blk in enumerate(blocks) if not blk]
            if empty:
                raise DesignError(f"deleting {label} empties blocks {empty}")
        elif kind == "add_block":
            if not args:
                raise DesignError("add_block needs labels")
            blocks.append(list(args))
        elif kind == "delete_block":
            (j,) = args
            del blocks[_block_index(blocks, j)]
        elif kind == "remove_block":
            target = sorted(args)
            for j, blk in enumerate(blocks):
                if sorted(blk) == target:
                    del blocks[j]
                    break
            else:
                raise DesignError(f"no block equal to {{{', '.join(map(str, target))}}}")
        elif kind == "move_treatment":
            label, src, dst = args
            bs = blocks[_block_index(blocks, src)]
            _block_index(blocks, dst)
            if label not in bs:
                raise DesignError(f"treatment {label} is not in block {src}")
            bs.remove(label)
            if not bs:
                raise DesignError(f"moving {label} empties block {src}")
            blocks[dst - 1].append(label)
    return BlockDesign(blocks)


def parse_edit_script(text: str) -> list[Edit]:
    """One edit per line, e.g. ``add_treatment 16 1 2``; ``#`` starts a comment."""
    edits = []
    for lineno, line in enumerate(text.splitlines(), start=1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        kind, *rest = line.split()
        try:
            edits.append(Edit(kind, tuple(int(x) for x in rest)))
        except ValueError as exc:
            raise DesignError(f"line {lineno}: {exc}") from None
    return edits
