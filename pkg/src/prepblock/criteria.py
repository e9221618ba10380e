"""A-, MV-, A1- and A2-criteria of a full design, their lower bounds and efficiencies.

All variances are in units of sigma^2. The closed forms work entirely on
the small subdesign: ``C`` (order u) and ``C~`` (order b) from
:mod:`prepblock.model`. Neither matrix depends on ``k``, so their
pseudoinverses are cached per subdesign and a scan over ``k`` is cheap.
"""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass
from functools import lru_cache
from typing import Iterable, Sequence

import numpy as np

from .linalg import pinv, trace_product
from .model import (
    BlockDesign,
    DesignError,
    FullDesignSpec,
    incidence,
    info_C,
    info_Ctilde,
    is_connected,
    require_valid,
)

__all__ = [
    "CriteriaReport",
    "TraceCheck",
    "a2_value",
    "a_bound",
    "a_eff",
    "a_value",
    "criteria_report",
    "k0",
    "k_thresholds",
    "lemma1_check",
    "mv_bound_a",
    "mv_eff",
    "mv_thresholds",
    "mv_value",
    "round_eff",
    "round_half_away",
]

TOL = 1e-8


def round_half_away(x: float, ndigits: int = 3) -> float:
    """Round half away from zero, the way printed tables do."""
    q = 10.0 ** ndigits
    return math.copysign(math.floor(abs(x) * q + 0.5) / q, x)


def round_eff(x: float, ndigits: int = 3) -> float:
    """Round an efficiency for printing; only an exact 1 (to ``TOL``) prints as 1.

    An efficiency short of 1 is capped at ``1 - 10**-ndigits`` so a near-optimal
    design is never shown as attaining the bound.
    """
    r = round_half_away(x, ndigits)
    if r >= 1.0 and x < 1.0 - TOL:
        return 1.0 - 10.0 ** -ndigits
    return r


@dataclass(frozen=True)
class _Pieces:
    n: np.ndarray        # incidence, u x b
    cp: np.ndarray       # C^+
    ctp: np.ndarray      # C~^+
    ct: np.ndarray       # C~
    sizes: np.ndarray    # block sizes of d


@lru_cache(maxsize=512)
def _pieces_for(d: BlockDesign) -> _Pieces:
    # C and C~ depend on d only; any k >= k_max(d) gives the same matrices
    spec = FullDesignSpec(d, d.k_max + 1)
    ct = info_Ctilde(spec)
    p = _Pieces(
        n=incidence(d).astype(float),
        cp=pinv(info_C(spec)),
        ctp=pinv(ct),
        ct=ct,
        sizes=np.asarray(d.block_sizes, dtype=float),
    )
    for arr in (p.n, p.cp, p.ctp, p.ct, p.sizes):
        arr.setflags(write=False)
    return p


def _pieces(spec: FullDesignSpec) -> _Pieces:
    require_valid(spec)
    return _pieces_for(spec.sub)


# ---------------------------------------------------------------------------
# A-criterion


def a_value(spec: FullDesignSpec) -> tuple[float, float, float, float]:
    """Sum of all pairwise contrast variances of ``d0``, and its three parts.

    Returns ``(a_total, a_uu, a_ww, a_uw)`` where the parts collect the
    U-U, W-W and U-W contrasts respectively.
    """
    p = _pieces(spec)
    u, b, k, w = spec.u, spec.b, spec.k, spec.w
    s = spec.s.astype(float)
    S = np.diag(s)
    ss = np.outer(s, s)
    tr_cp = float(np.trace(p.cp))
    tr_ctp = float(np.trace(p.ctp))
    tr_ctp_s = float(np.diag(p.ctp) @ s)

    a_uu = u * tr_cp
    a_ww = w * (w - 1) + trace_product(p.ctp, w * S - ss)
    a_uw = (1.5 * u * w - 0.5 * w * (b - 1)
            + trace_product(p.ctp, (u - w / 2) * S + ss + 0.5 * w * k * np.eye(b)))
    a_total = (0.5 * w * (3 * u + 2 * w - b - 1) + u * tr_cp
               + 0.5 * k * (w * tr_ctp + b * tr_ctp_s))
    return a_total, a_uu, a_ww, a_uw


def a_bound(u: int, b: int, k: int) -> float:
    """Design-independent lower bound on ``A(d0)`` over all connected competitors."""
    w = b * k - 2 * u
    if w <= 0:
        raise DesignError(f"w = bk - 2u = {w} must be positive")
    if b < 2 or u < b - 1:
        raise DesignError(f"need b >= 2 and u >= b-1, got u={u}, b={b}")
    return (0.5 * w * (3 * u + 2 * w - b - 1)
            + u * (u - 1) ** 2 / (2 * u - b)
            + k * w * (b - 1) ** 2 / u)


def a_eff(spec: FullDesignSpec) -> float:
    return a_bound(spec.u, spec.b, spec.k) / a_value(spec)[0]


def k0(d: BlockDesign) -> int:
    """Smallest full-design block size leaving room for a singly replicated treatment."""
    return d.k_max + 1 if d.constant_block_size else d.k_max


def k_thresholds(
    d: BlockDesign,
    alphas: Sequence[float] = (0.90, 0.95, 0.98),
    k_cap: int = 20,
) -> tuple[int, dict[float, int | None]]:
    """``k0`` and, for each level, the least ``k`` from which ``A_eff`` stays >= level.

    The "stays" part is checked by scanning every ``k`` up to ``k_cap``.
    ``None`` means the level is never reached for good (printed as X).
    """
    if not is_connected(d):
        raise DesignError("subdesign is not connected")
    kk0 = k0(d)
    effs = {k: a_eff(FullDesignSpec(d, k)) for k in range(kk0, k_cap + 1)}
    out: dict[float, int | None] = {}
    for alpha in alphas:
        best = None
        for k in range(k_cap, kk0 - 1, -1):
            if effs[k] >= alpha:
                best = k
            else:
                break
        out[alpha] = best
    return kk0, out


# ---------------------------------------------------------------------------
# MV-criterion


def _pair_variances(m: np.ndarray) -> np.ndarray:
    """``(e_i - e_j)^T m (e_i - e_j)`` for all i, j."""
    dg = np.diag(m)
    return dg[:, None] + dg[None, :] - 2.0 * m


@dataclass(frozen=True)
class MVParts:
    total: float
    uu: float | None
    ww: float | None
    uw: float | None
    within_block: float | None   # 2.0 when some block holds >= 2 singly replicated treatments
    populated: tuple[int, ...]   # 1-based blocks with s_j >= 1

    def __iter__(self):
        return iter((self.total, self.uu, self.ww, self.uw, self.populated))


def mv_value(spec: FullDesignSpec) -> MVParts:
    """Largest pairwise contrast variance of ``d0``, split by contrast type.

    ``ww`` only covers contrasts between different populated blocks and is
    ``None`` when fewer than two blocks hold singly replicated treatments.
    Contrasts inside one block have variance exactly 2; that constant is
    reported separately and enters the total.
    """
    p = _pieces(spec)
    s = spec.s
    G = np.flatnonzero(s >= 1)
    uu = None
    if spec.u >= 2:
        pv = _pair_variances(p.cp)
        uu = float(pv[np.triu_indices(spec.u, 1)].max())
    ww = None
    if G.size >= 2:
        pv = _pair_variances(p.ctp)[np.ix_(G, G)]
        ww = 2.0 + float(pv[np.triu_indices(G.size, 1)].max())
    uw = None
    if G.size >= 1:
        # xi_ij = e_j - N^T e_i / 2; quadratic forms for all i, j in one go
        half = 0.5 * p.n                                   # u x b, row i = N^T e_i / 2
        a = np.einsum("ib,bc,ic->i", half, p.ctp, half)     # (N^T e_i/2)^T C~+ (N^T e_i/2)
        cross = half @ p.ctp                               # u x b
        q = np.diag(p.ctp)[None, :] - 2.0 * cross + a[:, None]
        uw = 1.5 + float(q[:, G].max())
    within = 2.0 if (s >= 2).any() else None
    parts = [x for x in (uu, ww, uw, within) if x is not None]
    return MVParts(max(parts), uu, ww, uw, within, tuple(int(j) + 1 for j in G))


def mv_thresholds(spec_or_design, *, strict: bool = True) -> tuple[int, int, int]:
    """``(k_sharp, k_plus, k_star)`` for a subdesign (or spec, whose ``k`` is ignored)."""
    d = spec_or_design.sub if isinstance(spec_or_design, FullDesignSpec) else spec_or_design
    u, b = d.num_treatments, d.num_blocks
    if b < 3:
        raise DesignError("MV thresholds need b >= 3")
    k_sharp = -(-2 * u // (b - 1))
    k_plus = 2 * (u + 1) - b
    k_star = max(k_sharp, d.k_max + 1)
    if strict:
        if u < b - 1:
            raise DesignError(f"u >= b-1 violated: u={u}, b={b}")
        assert k_plus > k_sharp, (k_plus, k_sharp)
        assert d.k_max <= k_plus - 1, (d.k_max, k_plus)
    return k_sharp, k_plus, k_star


def mv_bound_a(u: int, b: int) -> float:
    """Lower bound on ``MV(d0)`` valid once ``k >= k_sharp``."""
    return 2.0 + 2.0 * (b - 1) / u


def mv_eff(spec: FullDesignSpec, mv_min: float | None = None) -> float:
    """MV-efficiency against the general bound, or against ``2 + mv_min`` if given.

    The general bound needs ``k >= k_star``; the ``mv_min`` form needs
    ``k >= k_plus``.
    """
    k_sharp, k_plus, k_star = mv_thresholds(spec)
    mv = mv_value(spec).total
    if mv_min is None:
        if spec.k < k_star:
            raise DesignError(f"MV bound needs k >= k* = {k_star}, got k={spec.k}")
        bound = mv_bound_a(spec.u, spec.b)
    else:
        if spec.k < k_plus:
            raise DesignError(f"MV_min bound needs k >= k+ = {k_plus}, got k={spec.k}")
        bound = 2.0 + mv_min
    if bound > mv + TOL * max(1.0, mv):
        raise AssertionError(f"MV lower bound {bound} exceeds MV(d0) = {mv}")
    return bound / mv


# ---------------------------------------------------------------------------
# A2 (W-W plus U-W contrasts)


def a2_value(spec: FullDesignSpec) -> tuple[float, float, float, float]:
    """``(a_ww, a_uw + a_ww, A2 bound, A2 efficiency)``."""
    p = _pieces(spec)
    u, b, k, w = spec.u, spec.b, spec.k, spec.w
    s = spec.s.astype(float)
    a_ww = w * (w - 1) + trace_product(p.ctp, w * np.diag(s) - np.outer(s, s))
    a2_sum = (0.5 * w * (3 * u + 2 * w - b - 1)
              + 0.5 * k * (w * float(np.trace(p.ctp)) + b * float(np.diag(p.ctp) @ s)))
    bound = 0.5 * w * (3 * u + 2 * w - b - 1) + k * w * (b - 1) ** 2 / u
    return a_ww, a2_sum, bound, bound / a2_sum


# ---------------------------------------------------------------------------
# the inequality behind the bounds


@dataclass(frozen=True)
class TraceCheck:
    lhs: float            # tr(C~ D) tr(C~+ D)
    rhs: float            # (tr D - 1'D1/b)^2
    holds: bool
    diag_lhs: float | None = None   # tr(C~ D) for diagonal D
    diag_rhs: float | None = None   # sum (k - s_j) d_j / 2
    diag_holds: bool | None = None


def lemma1_check(spec: FullDesignSpec, delta) -> TraceCheck:
    """Evaluate the trace inequality for a nonnegative definite ``delta``.

    For diagonal ``delta`` also checks ``tr(C~ delta) <= sum (k - s_j) delta_j / 2``.
    """
    p = _pieces(spec)
    delta = np.asarray(delta, dtype=float)
    b = spec.b
    if delta.shape != (b, b) or not np.allclose(delta, delta.T):
        raise DesignError(f"delta must be a symmetric {b}x{b} matrix")
    ev = np.linalg.eigvalsh(delta)
    if ev.min(initial=0.0) < -1e-10 * max(1.0, np.abs(ev).max(initial=0.0)):
        raise DesignError("delta is not nonnegative definite")
    lhs = trace_product(p.ct, delta) * trace_product(p.ctp, delta)
    rhs = (np.trace(delta) - delta.sum() / b) ** 2
    scale = max(1.0, abs(rhs))
    res = dict(lhs=lhs, rhs=float(rhs), holds=bool(lhs >= rhs - 1e-9 * scale))
    if np.count_nonzero(delta - np.diag(np.diag(delta))) == 0:
        dl = trace_product(p.ct, delta)
        dr = 0.5 * float((spec.k - spec.s) @ np.diag(delta))
        res.update(diag_lhs=dl, diag_rhs=dr,
                   diag_holds=bool(dl <= dr + 1e-9 * max(1.0, abs(dr))))
    return TraceCheck(**res)


# ---------------------------------------------------------------------------
# full report


@dataclass
class CriteriaReport:
    u: int
    b: int
    k: int
    w: int
    v: int
    f: float
    a_total: float
    a_uu: float
    a_ww: float
    a_uw: float
    a_bound: float
    a_eff: float
    mv_total: float
    mv_uu: float | None
    mv_ww: float | None
    mv_uw: float | None
    mv_bound_a: float | None
    mv_bound_b: float | None
    mv_eff: float | None
    k0: int
    k_sharp: int
    k_plus: int
    k_star: int
    a2_sum: float
    a2_bound: float
    a2_eff: float

    def to_dict(self) -> dict:
        return asdict(self)


def criteria_report(spec: FullDesignSpec, mv_min: float | None = None) -> CriteriaReport:
    """Every criterion for one ``(d, k)``.

    ``mv_eff`` uses the ``mv_min`` bound when it is supplied and applicable,
    otherwise the general bound when ``k >= k_star``, otherwise ``None``.
    """
    a_total, a_uu, a_ww, a_uw = a_value(spec)
    bound = a_bound(spec.u, spec.b, spec.k)
    mv = mv_value(spec)
    k_sharp, k_plus, k_star = mv_thresholds(spec)
    mb_a = mv_bound_a(spec.u, spec.b) if spec.k >= k_sharp else None
    mb_b = 2.0 + mv_min if (mv_min is not None and spec.k >= k_plus) else None
    eff = None
    if mb_b is not None:
        eff = mv_eff(spec, mv_min)
    elif spec.k >= k_star:
        eff = mv_eff(spec)
    _, a2_sum, a2_bound, a2_eff = a2_value(spec)
    return CriteriaReport(
        u=spec.u, b=spec.b, k=spec.k, w=spec.w, v=spec.v, f=spec.f,
        a_total=a_total, a_uu=a_uu, a_ww=a_ww, a_uw=a_uw,
        a_bound=bound, a_eff=bound / a_total,
        mv_total=mv.total, mv_uu=mv.uu, mv_ww=mv.ww, mv_uw=mv.uw,
        mv_bound_a=mb_a, mv_bound_b=mb_b, mv_eff=eff,
        k0=k0(spec.sub), k_sharp=k_sharp, k_plus=k_plus, k_star=k_star,
        a2_sum=a2_sum, a2_bound=a2_bound, a2_eff=a2_eff,
    )
