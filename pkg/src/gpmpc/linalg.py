"""Shared dense linear-algebra helpers."""

import numpy as np
from scipy.linalg import LinAlgError, cho_solve, cholesky, solve_triangular

from .errors import NumericalError

# Jitter escalation: start at 1e-10 * scale, multiply by 10 up to 1e-4 * scale.
_JITTER_STEPS = tuple(10.0**e for e in range(-10, -3))


def chol_jittered(mat, scale):
    """Lower Cholesky factor of ``mat``, adding diagonal jitter on failure.

    Parameters
    ----------
    mat : ndarray (n, n)
        Symmetric matrix to factorize.  Not modified.
    scale : float
        Magnitude reference for the jitter ladder (e.g. lam + sigma_w_sq).

    Returns
    -------
    (L, jitter) : lower-triangular factor and the jitter actually added.

    Raises
    ------
    NumericalError
        If the factorization still fails at the largest jitter.
    """
    jitters = (0.0,) + tuple(scale * s for s in _JITTER_STEPS)
    eye = np.eye(mat.shape[0])
    last = 0.0
    for jit in jitters:
        last = jit
        try:
            return cholesky(mat + jit * eye, lower=True), jit
        except LinAlgError:
            continue
    raise NumericalError(
        f"Cholesky failed after jitter escalation up to {last:g}", jitter=last
    )


def chol_solve(lower, b):
    """Solve (L L^T) x = b given the lower factor."""
    return cho_solve((lower, True), b)


def tri_solve(lower, b, trans=0):
    """Triangular solve with a lower factor (``trans=1`` for L^T x = b)."""
    return solve_triangular(lower, b, lower=True, trans=trans)


def logdet_from_chol(lower):
    """log det(A) from A's lower Cholesky factor."""
    return 2.0 * float(np.sum(np.log(np.diag(lower))))


def symmetrize(mat):
    """(A + A^T) / 2."""
    return 0.5 * (mat + mat.T)


def psd_factor(mat, rel_tol=1e-10):
    """Square-root factor F with F F^T = mat for a PSD matrix.

    Tries Cholesky first; for singular-but-PSD matrices falls back to an
    eigendecomposition factor with negative eigenvalues (within
    ``rel_tol`` of the trace) clipped at zero.

    Raises
    ------
    ValueError
        If ``mat`` is significantly indefinite.
    """
    mat = symmetrize(np.asarray(mat, dtype=float))
    try:
        return cholesky(mat, lower=True)
    except LinAlgError:
        pass
    evals, evecs = np.linalg.eigh(mat)
    floor = -rel_tol * max(1.0, float(np.trace(mat)))
    if evals.min() < floor:
        raise ValueError(
            f"matrix is not PSD: min eigenvalue {evals.min():g} < {floor:g}"
        )
    return evecs * np.sqrt(np.clip(evals, 0.0, None))[None, :]
