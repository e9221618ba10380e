"""Dense symmetric-matrix kernel.

Everything here works on plain ``numpy`` arrays. Two eigensolvers are
available: LAPACK (``numpy.linalg.eigh``) for speed, and a cyclic Jacobi
solver written out in full, which the brute-force oracle uses so that it
never shares an eigen routine with the closed-form criteria.
"""

from __future__ import annotations

import numpy as np

__all__ = [
    "ConvergenceError",
    "as_symmetric",
    "eigen_sym",
    "jacobi_eigh",
    "pinv",
    "quad_form",
    "trace",
    "trace_product",
]

RANK_TOL = 1e-9
JACOBI_TOL = 1e-12
JACOBI_MAX_SWEEPS = 100


class ConvergenceError(ArithmeticError):
    """Raised when the Jacobi sweeps hit their cap without converging."""


def as_symmetric(m, *, atol: float = 1e-12) -> np.ndarray:
    """Return ``m`` as a float array that is symmetric bit for bit.

    Matrices assembled from products such as ``N D N^T`` can pick up
    rounding asymmetry of a few ulps; that is averaged away. Anything larger
    than ``atol`` relative to the largest entry is a usage error.
    """
    a = np.array(m, dtype=float)
    if a.ndim != 2 or a.shape[0] != a.shape[1] or a.shape[0] < 1:
        raise ValueError(f"expected a non-empty square matrix, got shape {a.shape}")
    scale = max(1.0, float(np.abs(a).max(initial=0.0)))
    if np.abs(a - a.T).max(initial=0.0) > atol * scale:
        raise ValueError("matrix is not symmetric")
    return (a + a.T) / 2.0


def _round_robin(n: int):
    """Yield n-1 (or n) rounds of disjoint index pairs covering every pair once."""
    m = n + (n % 2)
    players = list(range(m))
    for _ in range(m - 1):
        pairs = []
        for i in range(m // 2):
            p, q = players[i], players[m - 1 - i]
            if p < n and q < n:
                pairs.append((min(p, q), max(p, q)))
        yield pairs
        players = [players[0], players[-1]] + players[1:-1]


def jacobi_eigh(m, *, tol: float = JACOBI_TOL, max_sweeps: int = JACOBI_MAX_SWEEPS):
    """Cyclic Jacobi eigendecomposition of a symmetric matrix.

    Rotations are scheduled in round-robin order so that each round is a set
    of disjoint plane rotations, applied together as vectorized row and
    column updates. Stops once the off-diagonal Frobenius norm drops below
    ``tol * ||m||_F``.

    Returns eigenvalues in ascending order and the matching orthonormal
    eigenvectors as columns, like ``numpy.linalg.eigh``.
    """
    a = as_symmetric(m)
    n = a.shape[0]
    v = np.eye(n)
    norm = np.linalg.norm(a)
    if n == 1 or norm == 0.0:
        return np.diag(a).copy(), v
    rounds = [(np.array([p for p, _ in r]), np.array([q for _, q in r]))
              for r in _round_robin(n)]
    offdiag = ~np.eye(n, dtype=bool)
    for _ in range(max_sweeps):
        off = np.linalg.norm(a[offdiag])
        if off < tol * norm:
            w = np.diag(a).copy()
            order = np.argsort(w, kind="stable")
            return w[order], v[:, order]
        for P, Q in rounds:
            apq = a[P, Q]
            app = a[P, P]
            aqq = a[Q, Q]
            nz = apq != 0.0
            t = np.zeros_like(apq)
            theta = (aqq[nz] - app[nz]) / (2.0 * apq[nz])
            t[nz] = np.sign(theta) / (np.abs(theta) + np.hypot(1.0, theta))
            t[nz & (t == 0.0)] = 1.0  # theta == 0 exactly: rotate by pi/4
            c = 1.0 / np.sqrt(1.0 + t * t)
            s = t * c
            c_, s_ = c[:, None], s[:, None]
            rp, rq = a[P, :].copy(), a[Q, :].copy()
            a[P, :] = c_ * rp - s_ * rq
            a[Q, :] = s_ * rp + c_ * rq
            cp, cq = a[:, P].copy(), a[:, Q].copy()
            a[:, P] = cp * c - cq * s
            a[:, Q] = cp * s + cq * c
            vp, vq = v[:, P].copy(), v[:, Q].copy()
            v[:, P] = vp * c - vq * s
            v[:, Q] = vp * s + vq * c
            a[P, Q] = 0.0
            a[Q, P] = 0.0
    raise ConvergenceError(
        f"Jacobi eigensolver did not converge in {max_sweeps} sweeps (order {n})"
    )


def eigen_sym(m, method: str = "lapack"):
    """Eigenvalues (descending) and orthonormal eigenvectors of ``m``.

    ``method`` is ``"lapack"`` or ``"jacobi"``.
    """
    a = as_symmetric(m)
    if method == "lapack":
        w, q = np.linalg.eigh(a)
    elif method == "jacobi":
        w, q = jacobi_eigh(a)
    else:
        raise ValueError(f"unknown eigensolver {method!r}")
    return w[::-1].copy(), q[:, ::-1].copy()


def pinv(m, tol: float = RANK_TOL, method: str = "lapack") -> np.ndarray:
    """Moore-Penrose inverse of a symmetric matrix.

    Eigenvalues with ``|lambda| <= tol * max|lambda|`` are treated as zero.
    """
    if tol <= 0:
        raise ValueError("tol must be positive")
    w, q = eigen_sym(m, method=method)
    big = np.abs(w).max(initial=0.0)
    if big == 0.0:
        return np.zeros_like(q)
    keep = np.abs(w) > tol * big
    qk = q[:, keep]
    out = (qk / w[keep]) @ qk.T
    return (out + out.T) / 2.0


def quad_form(m, x) -> float:
    """``x^T m x``."""
    a = np.asarray(m, dtype=float)
    x = np.asarray(x, dtype=float)
    if a.ndim != 2 or x.ndim != 1 or a.shape != (x.size, x.size):
        raise ValueError(f"shape mismatch: matrix {a.shape}, vector {x.shape}")
    return float(x @ a @ x)


def trace(m) -> float:
    a = np.asarray(m, dtype=float)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise ValueError(f"trace needs a square matrix, got shape {a.shape}")
    return float(np.trace(a))


def trace_product(a, b) -> float:
    """``tr(a b)`` without forming the product."""
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    if a.ndim != 2 or b.ndim != 2 or a.shape[1] != b.shape[0] or a.shape[0] != b.shape[1]:
        raise ValueError(f"shape mismatch: {a.shape} and {b.shape}")
    return float(np.sum(a * b.T))
