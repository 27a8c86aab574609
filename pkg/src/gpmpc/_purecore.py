"""Pure-NumPy implementation of the hot numerical kernels.

This module mirrors the signatures of the compiled extension
``gpmpc._fastcore``; ``gpmpc.backend`` picks one of the two at import
time.  Everything here operates on float64 C-contiguous arrays and a
single squared-exponential output dimension; multi-output loops live in
the callers.
"""

import numpy as np

NAME = "python"


def sqdist(a, b):
    """Pairwise squared Euclidean distances between rows of ``a`` and ``b``.

    Uses the expansion |x-y|^2 = |x|^2 + |y|^2 - 2 x.y and clamps tiny
    negative round-off at zero.
    """
    a = np.asarray(a, dtype=np.float64)
    b = np.asarray(b, dtype=np.float64)
    na = np.sum(a * a, axis=1)[:, None]
    nb = np.sum(b * b, axis=1)[None, :]
    d = na + nb - 2.0 * (a @ b.T)
    np.maximum(d, 0.0, out=d)
    return d


def se_gram(a, b, lam, eta):
    """Squared-exponential Gram matrix lam * exp(-|x-y|^2 / (2 eta))."""
    d = sqdist(a, b)
    d *= -0.5 / eta
    np.exp(d, out=d)
    d *= lam
    return d


def se_kvec(z, c, lam, eta):
    """Kernel sections k(z, c_i) for a single query point."""
    diff = c - z[None, :]
    d = np.sum(diff * diff, axis=1)
    return lam * np.exp(-0.5 * d / eta)


def se_mean(z, c, w, lam, eta):
    """Posterior-mean evaluation k(z, C) . w for one output."""
    return float(se_kvec(z, c, lam, eta) @ w)


def se_predict(z, c, w, var_form, lam, eta):
    """Mean and latent variance for one output.

    ``var_form`` is the symmetric matrix V in var(z) = lam - k(z)^T V k(z).
    """
    k = se_kvec(z, c, lam, eta)
    mean = float(k @ w)
    var = lam - float(k @ var_form @ k)
    return mean, var


def se_predict_grad(z, c, w, var_form, lam, eta, order):
    """Mean, latent variance, and their input derivatives for one output.

    Returns ``(mean, var, dmu, dvar, d2var)``; ``d2var`` is None unless
    ``order >= 2``.  With k_i(z) = lam exp(-|z - c_i|^2 / (2 eta)):

        dk_i  = -(z - c_i) / eta * k_i
        mu    = k . w            var  = lam - k . V k
        dmu   = J w              dvar = -2 J (V k)
        d2var = -2 (J V J^T + sum_i (V k)_i H_i)

    where J has columns dk_i and H_i is the Hessian of k_i.
    """
    diff = z[None, :] - c
    d = np.sum(diff * diff, axis=1)
    k = lam * np.exp(-0.5 * d / eta)
    jac = -(diff / eta) * k[:, None]  # (m, n): row i is dk_i/dz
    mean = float(k @ w)
    vk = var_form @ k
    var = lam - float(k @ vk)
    dmu = jac.T @ w
    dvar = -2.0 * (jac.T @ vk)
    if order < 2:
        return mean, var, dmu, dvar, None
    n = z.shape[0]
    d2 = jac.T @ (var_form @ jac)
    # sum_i (V k)_i H_i with H_i = k_i ((z-c_i)(z-c_i)^T / eta^2 - I/eta)
    s = vk * k
    d2 += (diff * s[:, None]).T @ diff / (eta * eta)
    d2 -= np.eye(n) * (np.sum(s) / eta)
    return mean, var, dmu, dvar, -2.0 * d2


def se_predict_diag(zs, c, w, var_form, lam, eta):
    """Batched mean and latent variance over rows of ``zs`` for one output."""
    g = se_gram(zs, c, lam, eta)
    mean = g @ w
    var = lam - np.einsum("ij,ij->i", g @ var_form, g)
    return mean, var
