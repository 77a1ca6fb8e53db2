"""Symmetric eigendecomposition by cyclic Jacobi rotations."""

import numpy as np

from .errors import NoConvergence, NotSymmetric

SYMMETRY_TOL = 1e-9


def _round_robin(n):
    """Yield ``n - 1`` rounds of disjoint index pairs covering every pair once.

    ``n`` must be even. Standard tournament schedule: index 0 stays fixed, the
    rest rotate one position per round.
    """
    others = list(range(1, n))
    for _ in range(n - 1):
        ring = [0] + others
        p = np.array(ring[: n // 2])
        q = np.array(ring[n // 2:][::-1])
        yield np.minimum(p, q), np.maximum(p, q)
        others = others[-1:] + others[:-1]


def _sign_normalize(vectors):
    """Flip each column so that its largest-magnitude entry is positive."""
    idx = np.argmax(np.abs(vectors), axis=0)
    signs = np.sign(vectors[idx, np.arange(vectors.shape[1])])
    signs[signs == 0] = 1.0
    return vectors * signs


def eigh_symmetric(a, tol=1e-12, max_sweeps=100):
    """Eigenvalues (descending) and orthonormal eigenvectors of a symmetric matrix.

    Each sweep visits every off-diagonal pair once, in rounds of disjoint
    pairs that are rotated together.  Iteration stops once the off-diagonal
    Frobenius norm drops below ``tol`` times the Frobenius norm of ``a``.

    Eigenvector columns are sign-normalized so their largest-magnitude entry
    is positive; exactly equal eigenvalues are ordered by the lexicographic
    order of their eigenvectors.

    Raises
    ------
    NotSymmetric
        If ``a`` is not square or deviates from symmetry by more than 1e-9
        (relative to its largest entry when that exceeds one).
    NoConvergence
        If ``max_sweeps`` sweeps do not reach the tolerance.
    """
    a = np.array(a, dtype=np.float64)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise NotSymmetric(f"expected a square matrix, got shape {a.shape}")
    if not np.all(np.isfinite(a)):
        raise NotSymmetric("matrix has non-finite entries")
    n = a.shape[0]
    if n == 0:
        return np.zeros(0), np.zeros((0, 0))
    scale = max(1.0, float(np.max(np.abs(a))))
    if np.max(np.abs(a - a.T)) > SYMMETRY_TOL * scale:
        raise NotSymmetric("matrix is not symmetric within 1e-9")
    a = 0.5 * (a + a.T)

    m = n + (n % 2)  # pad odd sizes with a decoupled dummy index
    work = np.zeros((m, m))
    work[:n, :n] = a
    v = np.eye(m)
    norm = np.linalg.norm(a)
    rounds = list(_round_robin(m)) if m > 1 else []
    offdiag = ~np.eye(m, dtype=bool)

    for _ in range(max_sweeps + 1):
        off = np.linalg.norm(work[offdiag])
        if off <= tol * norm:
            break
        for p, q in rounds:
            apq = work[p, q]
            active = apq != 0.0
            if not active.any():
                continue
            app, aqq = work[p, p], work[q, q]
            d = aqq - app
            # tan of the rotation angle, smaller root; overflow-free form
            sgn = np.where(d < 0.0, -1.0, 1.0)
            with np.errstate(invalid="ignore", divide="ignore"):
                t = sgn * 2.0 * apq / (np.abs(d) + np.hypot(d, 2.0 * apq))
            t = np.where(active, t, 0.0)
            c = 1.0 / np.sqrt(t * t + 1.0)
            s = t * c

            rp, rq = work[p, :], work[q, :]
            work[p, :] = c[:, None] * rp - s[:, None] * rq
            work[q, :] = s[:, None] * rp + c[:, None] * rq
            cp, cq = work[:, p], work[:, q]
            work[:, p] = cp * c - cq * s
            work[:, q] = cp * s + cq * c
            work[p, p] = app - t * apq
            work[q, q] = aqq + t * apq
            work[p, q] = 0.0
            work[q, p] = 0.0

            vp, vq = v[:, p], v[:, q]
            v[:, p] = vp * c - vq * s
            v[:, q] = vp * s + vq * c
    else:
        raise NoConvergence(f"off-diagonal norm {off:.3e} after {max_sweeps} sweeps")

    values = np.diag(work)[:n].copy()
    vectors = _sign_normalize(v[:n, :n].copy())
    order = sorted(range(n), key=lambda i: (-values[i], tuple(vectors[:, i])))
    return values[order], vectors[:, order]
