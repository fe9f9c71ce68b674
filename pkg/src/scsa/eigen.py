"""Dense symmetric eigendecomposition.

Two backends share one post-processing step (stable ascending sort, sign
normalization):

``"lapack"``
    ``numpy.linalg.eigh`` (divide and conquer). Default; fast enough for the
    hundreds of 1201x1201 solves an h sweep needs.
``"ql"``
    Householder reduction to tridiagonal form followed by implicit-shift QL
    with eigenvector accumulation. Pure numpy, no LAPACK eigen routine.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import DomainError, NumericError

EPS = np.finfo(float).eps
MAX_QL_ITERATIONS = 50


@dataclass(frozen=True, eq=False)
class EigenDecomposition:
    eigenvalues: np.ndarray
    eigenvectors: np.ndarray

    def __len__(self):
        return self.eigenvalues.shape[0]


def default_tol_neg(a) -> float:
    """Rounding-level threshold ``1e3 * eps * ||A||_inf`` for counting negatives."""
    return 1e3 * EPS * float(np.max(np.sum(np.abs(a), axis=1)))


def _check_symmetric(a):
    a = np.asarray(a, dtype=float)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise DomainError(f"expected a square matrix, got shape {a.shape}")
    if not np.all(np.isfinite(a)):
        raise DomainError("matrix contains NaN or Inf")
    scale = float(np.max(np.abs(a))) if a.size else 0.0
    asym = float(np.max(np.abs(a - a.T))) if a.size else 0.0
    if asym > 1e6 * EPS * scale:
        raise DomainError(f"matrix is not symmetric (max |A - A^T| = {asym:.3e})")
    return a


def tridiagonalize(a):
    """Householder reduction ``A = Q T Q^T``.

    Returns ``(d, e, q)`` with ``d`` the diagonal of ``T``, ``e[k]`` the
    coupling between rows ``k`` and ``k+1`` (``e[-1] = 0``) and ``q``
    orthogonal.
    """
    a = np.array(a, dtype=float)
    n = a.shape[0]
    q = np.eye(n)
    for k in range(n - 2):
        x = a[k + 1 :, k]
        tail = np.linalg.norm(x[1:])
        if tail == 0.0:
            continue
        alpha = -math.copysign(math.hypot(x[0], tail), x[0])
        v = x.copy()
        v[0] -= alpha
        v /= np.linalg.norm(v)
        # A <- H A H with H = I - 2 v v^T on the trailing block
        block = a[k + 1 :, k + 1 :]
        p = block @ v
        w = p - (v @ p) * v
        block -= 2.0 * (np.outer(v, w) + np.outer(w, v))
        a[k + 1 :, k] = 0.0
        a[k, k + 1 :] = 0.0
        a[k + 1, k] = a[k, k + 1] = alpha
        qk = q[:, k + 1 :]
        qk -= 2.0 * np.outer(qk @ v, v)
    d = np.diag(a).copy()
    e = np.zeros(n)
    e[: n - 1] = np.diag(a, 1)
    return d, e, q


def tridiagonal_ql(d, e, z=None):
    """Implicit-shift QL on a symmetric tridiagonal matrix.

    ``d`` is the diagonal, ``e[k]`` couples ``k`` and ``k+1``. If ``z`` is
    given, its columns are rotated along with the iteration so that on return
    column ``k`` of ``z`` is the eigenvector for ``d[k]`` (pass the
    Householder ``Q`` to get eigenvectors of the original matrix). Output is
    unsorted.
    """
    d = np.array(d, dtype=float)
    n = d.shape[0]
    e = _pad(e, n)
    e[n - 1] = 0.0
    # rows of zt are eigenvector candidates; row access keeps rotations contiguous
    zt = None if z is None else np.array(z, dtype=float).T.copy()
    for l in range(n):
        iterations = 0
        while True:
            m = l
            while m < n - 1:
                dd = abs(d[m]) + abs(d[m + 1])
                if abs(e[m]) <= EPS * dd:
                    break
                m += 1
            if m == l:
                break
            if iterations == MAX_QL_ITERATIONS:
                raise NumericError(
                    f"QL iteration did not converge for eigenvalue {l} "
                    f"after {MAX_QL_ITERATIONS} sweeps",
                    index=l,
                )
            iterations += 1
            g = (d[l + 1] - d[l]) / (2.0 * e[l])
            r = math.hypot(g, 1.0)
            g = d[m] - d[l] + e[l] / (g + math.copysign(r, g))
            s = c = 1.0
            p = 0.0
            underflow = False
            for i in range(m - 1, l - 1, -1):
                f = s * e[i]
                b = c * e[i]
                r = math.hypot(f, g)
                e[i + 1] = r
                if r == 0.0:
                    d[i + 1] -= p
                    e[m] = 0.0
                    underflow = True
                    break
                s = f / r
                c = g / r
                g = d[i + 1] - p
                r = (d[i] - g) * s + 2.0 * c * b
                p = s * r
                d[i + 1] = g + p
                g = c * r - b
                if zt is not None:
                    zi = zt[i].copy()
                    zt[i] = c * zi - s * zt[i + 1]
                    zt[i + 1] = s * zi + c * zt[i + 1]
            if underflow:
                continue
            d[l] -= p
            e[l] = g
            e[m] = 0.0
    return d, (None if zt is None else zt.T.copy())


def _pad(e, n):
    e = np.asarray(e, dtype=float)
    out = np.zeros(n)
    out[: min(n, e.shape[0])] = e[:n]
    return out


def _finalize(values, vectors):
    order = np.argsort(values, kind="stable")
    values = values[order]
    vectors = vectors[:, order]
    if vectors.size:
        pivot = np.argmax(np.abs(vectors), axis=0)
        signs = np.sign(vectors[pivot, np.arange(vectors.shape[1])])
        signs[signs == 0] = 1.0
        vectors = vectors * signs
    return EigenDecomposition(values, np.ascontiguousarray(vectors))


def symmetric_eigen(a, method="lapack") -> EigenDecomposition:
    """All eigenpairs of a dense symmetric matrix, eigenvalues ascending.

    Each eigenvector is flipped so its largest-magnitude component is
    positive.
    """
    a = _check_symmetric(a)
    if a.shape[0] == 0:
        return EigenDecomposition(np.zeros(0), np.zeros((0, 0)))
    if method == "lapack":
        try:
            values, vectors = np.linalg.eigh(a)
        except np.linalg.LinAlgError as exc:
            raise NumericError(f"LAPACK eigh failed: {exc}") from exc
    elif method == "ql":
        d, e, q = tridiagonalize(a)
        values, vectors = tridiagonal_ql(d, e, q)
    else:
        raise DomainError(f"unknown eigensolver method {method!r}")
    return _finalize(values, vectors)


def tridiagonal_eigen(diagonal, offdiagonal) -> EigenDecomposition:
    """Eigenpairs of a symmetric tridiagonal matrix given by its bands."""
    d = np.asarray(diagonal, dtype=float)
    n = d.shape[0]
    values, vectors = tridiagonal_ql(d, _pad(offdiagonal, n), np.eye(n))
    return _finalize(values, vectors)


def negative_count(decomp: EigenDecomposition, tol_neg=0.0) -> int:
    """Number of eigenvalues strictly below ``-tol_neg``."""
    return int(np.count_nonzero(decomp.eigenvalues < -tol_neg))
