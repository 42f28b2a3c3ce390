"""Complex dense linear-algebra kernels shared by the rest of the library.

Matrices are plain ``numpy.ndarray`` objects with complex entries; no wrapper
type is imposed.  The three kernels below are the only backend-facing
operations the design algorithms rely on, so swapping the LAPACK-backed
implementations for something else only requires keeping these contracts.
"""

import numpy as np
import scipy.linalg

__all__ = ["svd", "solve_hpd", "logdet_eval"]

# Relative pivot-ratio threshold below which a Cholesky factor is treated as
# numerically rank deficient.
_RANK_TOL = 1e-14


def _require_finite(a, name):
    if not np.all(np.isfinite(a)):
        raise ValueError(f"{name} contains non-finite entries (corrupted data)")


def svd(a):
    """Singular value decomposition A = U @ diag(s) @ V^H.

    Parameters
    ----------
    a : ndarray, shape (m, n)
        Complex matrix to factor.

    Returns
    -------
    u : ndarray, shape (m, k)
        Left singular vectors, orthonormal columns, k = min(m, n).
    s : ndarray, shape (k,)
        Singular values in decreasing order.
    v : ndarray, shape (n, k)
        Right singular vectors, orthonormal columns.  Note this is V, not
        V^H; reconstruct with ``u @ np.diag(s) @ v.conj().T``.
    """
    a = np.asarray(a)
    _require_finite(a, "svd input")
    u, s, vh = np.linalg.svd(a, full_matrices=False)
    return u, s, vh.conj().T


def solve_hpd(a, b):
    """Solve A @ X = B for Hermitian positive definite A via Cholesky.

    Raises ``numpy.linalg.LinAlgError`` when A is not positive definite
    within tolerance (rank-deficient Gram matrices land here).
    """
    a = np.asarray(a)
    b = np.asarray(b)
    _require_finite(a, "solve_hpd matrix")
    _require_finite(b, "solve_hpd right-hand side")
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise ValueError(f"expected square matrix, got shape {a.shape}")
    if b.shape[0] != a.shape[0]:
        raise ValueError(f"incompatible shapes {a.shape} and {b.shape}")
    try:
        factor = scipy.linalg.cho_factor(a, lower=True, check_finite=False)
    except scipy.linalg.LinAlgError as exc:
        raise np.linalg.LinAlgError(
            f"matrix is not positive definite: {exc}"
        ) from exc
    diag = np.abs(np.diag(factor[0]))
    if diag.min() ** 2 < _RANK_TOL * diag.max() ** 2:
        raise np.linalg.LinAlgError(
            "matrix is numerically rank deficient (Cholesky pivot ratio "
            f"{(diag.min() / diag.max()) ** 2:.3e})"
        )
    return scipy.linalg.cho_solve(factor, b, check_finite=False)


def logdet_eval(a):
    """log2 det(A) for Hermitian positive definite A, via Cholesky.

    Never forms the determinant directly, so it stays finite for the
    well-scaled Gram-type arguments it is meant for.
    """
    a = np.asarray(a)
    _require_finite(a, "logdet input")
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise ValueError(f"expected square matrix, got shape {a.shape}")
    scale = np.abs(a).max()
    if scale > 0 and np.abs(a - a.conj().T).max() > 1e-10 * scale:
        raise np.linalg.LinAlgError("matrix is not Hermitian")
    try:
        chol = np.linalg.cholesky(a)
    except np.linalg.LinAlgError as exc:
        raise np.linalg.LinAlgError(
            f"matrix is not positive definite: {exc}"
        ) from exc
    return 2.0 * float(np.sum(np.log2(np.real(np.diag(chol)))))
