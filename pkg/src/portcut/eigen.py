"""Cyclic Jacobi eigendecomposition for real symmetric matrices.

Deterministic row-cyclic sweeps with a fixed rotation order make results
reproducible bit-for-bit across runs, which the partition pipeline relies on.
Intended for desk-scale problems (hundreds of vertices); no attempt is made
at sparse or iterative methods.
"""

from __future__ import annotations

import math

import numpy as np

from .errors import InvalidInputError, NumericalFailureError

__all__ = ["jacobi_eigh"]


def _off_norm(a: np.ndarray) -> float:
    off = a - np.diag(np.diag(a))
    return float(np.sqrt(np.sum(off * off)))


def jacobi_eigh(matrix, *, rel_tol: float = 1e-12, max_sweeps: int = 100):
    """Eigenvalues and eigenvectors of a symmetric matrix by cyclic Jacobi.

    Sweeps rotate every off-diagonal pair (p, q), p < q, in row order until
    the off-diagonal Frobenius norm falls below ``rel_tol`` times the
    Frobenius norm of the input.

    Parameters
    ----------
    matrix : array_like, shape (n, n)
        Real symmetric matrix. Symmetry is assumed, not checked beyond a
        cheap max-difference guard.
    rel_tol : float
        Convergence threshold on off(A) relative to ||A||_F.
    max_sweeps : int
        Sweep budget before giving up.

    Returns
    -------
    (eigenvalues, eigenvectors)
        Eigenvalues ascending; eigenvectors as orthonormal columns aligned
        with them. Each column is sign-fixed so its largest-magnitude entry
        is positive.

    Raises
    ------
    NumericalFailureError
        If the sweep budget is exhausted before convergence; diagnostics
        carry the sweep count and the remaining off-diagonal norm.
    """
    a = np.array(matrix, dtype=float)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise InvalidInputError(f"expected a square matrix, got shape {a.shape}")
    n = a.shape[0]
    if n == 0:
        raise InvalidInputError("empty matrix")
    if not np.all(np.isfinite(a)):
        raise InvalidInputError("matrix contains non-finite entries")
    asym = np.max(np.abs(a - a.T)) if n > 1 else 0.0
    scale = np.max(np.abs(a)) if n > 1 else 0.0
    if scale > 0 and asym > 1e-10 * scale:
        raise InvalidInputError("matrix is not symmetric")
    a = (a + a.T) / 2.0

    v = np.eye(n)
    if n == 1:
        return np.array([a[0, 0]]), v

    fro = float(np.sqrt(np.sum(a * a)))
    target = rel_tol * fro
    if fro == 0.0 or _off_norm(a) <= target:
        return _finalize(a, v)

    # Skipping pivots below target/n keeps correctness: if a full sweep
    # rotates nothing, off(A) <= n * (target/n) = target and we are done.
    skip = target / n

    for sweep in range(1, max_sweeps + 1):
        rotated = False
        for p in range(n - 1):
            for q in range(p + 1, n):
                apq = a[p, q]
                if abs(apq) <= skip:
                    continue
                rotated = True
                theta = (a[q, q] - a[p, p]) / (2.0 * apq)
                t = math.copysign(1.0, theta) / (abs(theta) + math.hypot(theta, 1.0))
                c = 1.0 / math.sqrt(t * t + 1.0)
                s = t * c

                col_p = a[:, p].copy()
                col_q = a[:, q].copy()
                a[:, p] = c * col_p - s * col_q
                a[:, q] = s * col_p + c * col_q
                row_p = a[p, :].copy()
                row_q = a[q, :].copy()
                a[p, :] = c * row_p - s * row_q
                a[q, :] = s * row_p + c * row_q
                a[p, q] = 0.0
                a[q, p] = 0.0

                vec_p = v[:, p].copy()
                vec_q = v[:, q].copy()
                v[:, p] = c * vec_p - s * vec_q
                v[:, q] = s * vec_p + c * vec_q
        if not rotated or _off_norm(a) <= target:
            return _finalize(a, v)

    raise NumericalFailureError(
        f"Jacobi eigensolver did not converge in {max_sweeps} sweeps "
        f"(off-diagonal norm {_off_norm(a):.3e}, target {target:.3e})",
        diagnostics={
            "sweeps": max_sweeps,
            "off_norm": _off_norm(a),
            "target": target,
        },
    )


def _finalize(a: np.ndarray, v: np.ndarray):
    evals = np.diag(a).copy()
    order = np.argsort(evals, kind="stable")
    evals = evals[order]
    vecs = v[:, order]
    for j in range(vecs.shape[1]):
        k = int(np.argmax(np.abs(vecs[:, j])))
        if vecs[k, j] < 0.0:
            vecs[:, j] = -vecs[:, j]
    return evals, vecs
