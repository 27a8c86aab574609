"""Exact Gaussian-process regression on residual data.

Output dimensions are treated independently: they share input locations
but carry their own hyperparameters, Cholesky factor, and weight vector.
Fitted posteriors are immutable; ``append_datum`` returns a new value
with a rank-one-extended factorization.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .backend import core
from .errors import NumericalError, TrainingError
from .kernels import KernelParams, gram, squared_distances
from .linalg import chol_jittered, chol_solve, logdet_from_chol, tri_solve
from .optimize import minimize_bfgs


@dataclass
class Dataset:
    """Training data: inputs Z (N, n_z) and residual targets Y (N, n_d)."""

    Z: np.ndarray
    Y: np.ndarray

    def __post_init__(self):
        self.Z = np.ascontiguousarray(self.Z, dtype=np.float64)
        self.Y = np.ascontiguousarray(self.Y, dtype=np.float64)
        if self.Z.ndim == 1:
            self.Z = self.Z[:, None]
        if self.Y.ndim == 1:
            self.Y = self.Y[:, None]
        if self.Z.ndim != 2 or self.Y.ndim != 2:
            raise ValueError("Z and Y must be 2-d arrays")
        if self.Z.shape[0] < 1:
            raise ValueError("dataset must contain at least one point")
        if self.Y.shape[0] != self.Z.shape[0]:
            raise ValueError(
                f"Z has {self.Z.shape[0]} rows but Y has {self.Y.shape[0]}"
            )
        if not (np.isfinite(self.Z).all() and np.isfinite(self.Y).all()):
            raise ValueError("dataset contains non-finite entries")

    @property
    def n_points(self):
        return self.Z.shape[0]

    @property
    def n_inputs(self):
        return self.Z.shape[1]

    @property
    def n_outputs(self):
        return self.Y.shape[1]


def _params_per_output(params, n_outputs) -> tuple[KernelParams, ...]:
    if isinstance(params, KernelParams):
        return (params,) * n_outputs
    params = tuple(params)
    if len(params) != n_outputs:
        raise ValueError(
            f"got {len(params)} parameter sets for {n_outputs} output dimensions"
        )
    return params


@dataclass
class GpPosterior:
    """Fitted exact GP: training data, per-output Cholesky factors of
    (K + sigma_w^2 I), and precomputed weight vectors alpha.

    Treat instances as immutable; ``append_datum`` returns a new value.
    """

    params: tuple[KernelParams, ...]
    Z: np.ndarray
    Y: np.ndarray
    chols: tuple[np.ndarray, ...]
    alpha: np.ndarray  # (N, n_d)
    jitters: tuple[float, ...]
    _var_forms: list = field(default=None, repr=False)

    @property
    def n_inputs(self):
        return self.Z.shape[1]

    @property
    def n_outputs(self):
        return self.Y.shape[1]

    @property
    def n_points(self):
        return self.Z.shape[0]

    @property
    def jitter_used(self) -> float:
        return max(self.jitters)

    @property
    def noise_variances(self):
        return np.array([p.sigma_w_sq for p in self.params])

    def var_form(self, j):
        """(K + sigma^2 I + jitter I)^{-1} for output j, cached."""
        if self._var_forms is None:
            object.__setattr__(self, "_var_forms", [None] * self.n_outputs)
        if self._var_forms[j] is None:
            n = self.n_points
            self._var_forms[j] = np.ascontiguousarray(
                chol_solve(self.chols[j], np.eye(n))
            )
        return self._var_forms[j]

    # --- single-point protocol used by the propagation module ---

    def predict_mean(self, z):
        z = np.ascontiguousarray(z, dtype=np.float64).ravel()
        return np.array(
            [
                core.se_mean(z, self.Z, np.ascontiguousarray(self.alpha[:, j]),
                             p.lam, p.eta)
                for j, p in enumerate(self.params)
            ]
        )

    def predict_point(self, z, include_noise=True):
        """Per-output posterior mean and variance at a single input.

        Negative round-off in the latent variance is clamped at zero;
        ``include_noise`` adds sigma_w^2.
        """
        z = np.ascontiguousarray(z, dtype=np.float64).ravel()
        if z.shape[0] != self.n_inputs:
            raise ValueError(f"query dim {z.shape[0]} != training dim {self.n_inputs}")
        mean = np.empty(self.n_outputs)
        var = np.empty(self.n_outputs)
        for j, p in enumerate(self.params):
            m, v = core.se_predict(
                z, self.Z, np.ascontiguousarray(self.alpha[:, j]),
                self.var_form(j), p.lam, p.eta
            )
            mean[j] = m
            var[j] = max(v, 0.0) + (p.sigma_w_sq if include_noise else 0.0)
        return mean, var

    def predict_diag(self, zs, include_noise=True):
        """Batched means and variances (no cross-covariances)."""
        zs = np.ascontiguousarray(np.atleast_2d(zs), dtype=np.float64)
        if zs.shape[1] != self.n_inputs:
            raise ValueError(f"query dim {zs.shape[1]} != training dim {self.n_inputs}")
        means = np.empty((zs.shape[0], self.n_outputs))
        variances = np.empty_like(means)
        for j, p in enumerate(self.params):
            m, v = core.se_predict_diag(
                zs, self.Z, np.ascontiguousarray(self.alpha[:, j]),
                self.var_form(j), p.lam, p.eta
            )
            means[:, j] = m
            variances[:, j] = np.clip(v, 0.0, None) + (
                p.sigma_w_sq if include_noise else 0.0
            )
        return means, variances

    def predict_gradients(self, z, order=2):
        return predict_gradients(self, z, order=order)


def fit(data: Dataset, params) -> GpPosterior:
    """Factorize (K + sigma_w^2 I) per output and precompute alpha.

    Raises
    ------
    NumericalError
        If a Cholesky factorization fails after jitter escalation.
    """
    params = _params_per_output(params, data.n_outputs)
    chols = []
    jitters = []
    alpha = np.empty_like(data.Y)
    for j, p in enumerate(params):
        k = gram(data.Z, data.Z, p)
        k[np.diag_indices_from(k)] += p.sigma_w_sq
        lower, jit = chol_jittered(k, p.lam + p.sigma_w_sq)
        chols.append(lower)
        jitters.append(jit)
        alpha[:, j] = chol_solve(lower, data.Y[:, j])
    return GpPosterior(
        params=params,
        Z=data.Z.copy(),
        Y=data.Y.copy(),
        chols=tuple(chols),
        alpha=alpha,
        jitters=tuple(jitters),
    )


def predict(gp: GpPosterior, z_star):
    """Posterior mean and full covariance at query points.

    Returns
    -------
    mean : ndarray (M, n_d)
    covs : list of ndarray (M, M), one per output dimension.
    """
    z_star = np.ascontiguousarray(np.atleast_2d(z_star), dtype=np.float64)
    if z_star.shape[1] != gp.n_inputs:
        raise ValueError(f"query dim {z_star.shape[1]} != training dim {gp.n_inputs}")
    m = z_star.shape[0]
    mean = np.empty((m, gp.n_outputs))
    covs = []
    for j, p in enumerate(gp.params):
        k_star = gram(z_star, gp.Z, p)
        mean[:, j] = k_star @ gp.alpha[:, j]
        v = tri_solve(gp.chols[j], k_star.T)
        cov = gram(z_star, z_star, p) - v.T @ v
        covs.append(0.5 * (cov + cov.T))
    return mean, covs


def nll(data: Dataset, params) -> float:
    """Marginal-likelihood objective, summed over output dimensions:

        Y^T (K + sigma^2 I)^{-1} Y + log det(K + sigma^2 I)

    (constants omitted; they do not move the optimum).
    """
    params = _params_per_output(params, data.n_outputs)
    total = 0.0
    for j, p in enumerate(params):
        k = gram(data.Z, data.Z, p)
        k[np.diag_indices_from(k)] += p.sigma_w_sq
        lower, _ = chol_jittered(k, p.lam + p.sigma_w_sq)
        w = tri_solve(lower, data.Y[:, j])
        total += float(w @ w) + logdet_from_chol(lower)
    return total


def _nll_and_grad_single(z, y, p: KernelParams):
    """Objective and gradient over (log lam, log eta, log sigma_w_sq)
    for one output dimension.

    Gradient assembled from tr(Kt^{-1} dKt) - alpha^T dKt alpha with
    Kt = K + sigma^2 I.
    """
    d = squared_distances(z, z)
    k = p.lam * np.exp(-0.5 * d / p.eta)
    kt = k.copy()
    kt[np.diag_indices_from(kt)] += p.sigma_w_sq
    lower, _ = chol_jittered(kt, p.lam + p.sigma_w_sq)
    alpha = chol_solve(lower, y)
    value = float(y @ alpha) + logdet_from_chol(lower)

    kt_inv = chol_solve(lower, np.eye(z.shape[0]))
    # trace(Kt^{-1} dK) - alpha^T dK alpha for each log-parameter
    diff = kt_inv - np.outer(alpha, alpha)
    dk_dlog_eta = k * (d / (2.0 * p.eta))
    grad = np.array(
        [
            float(np.sum(diff * k)),
            float(np.sum(diff * dk_dlog_eta)),
            p.sigma_w_sq * float(np.trace(diff)),
        ]
    )
    return value, grad


def nll_grad(data: Dataset, params):
    """Gradient of `nll` over (log lam, log eta, log sigma_w_sq), (n_d, 3)."""
    params = _params_per_output(params, data.n_outputs)
    out = np.empty((data.n_outputs, 3))
    for j, p in enumerate(params):
        _, out[j] = _nll_and_grad_single(data.Z, data.Y[:, j], p)
    return out


def train_hyperparams(data: Dataset, starts: Sequence[KernelParams],
                      budget: int = 200):
    """Multi-start marginal-likelihood training in log-space.

    Each output dimension is optimized independently with BFGS and
    backtracking line search from every start; the lowest-NLL result
    wins.  Deterministic for fixed inputs.

    Returns
    -------
    (params, nll_value) : list of per-output KernelParams and the total
    objective at the optimum.

    Raises
    ------
    TrainingError
        If every start fails on some output dimension.
    """
    starts = list(starts)
    if not starts:
        raise ValueError("need at least one starting point")

    best_params = []
    total = 0.0
    for j in range(data.n_outputs):
        y = data.Y[:, j]

        def fun_grad(logv, _y=y):
            try:
                p = KernelParams.from_log_vector(logv)
                return _nll_and_grad_single(data.Z, _y, p)
            except (NumericalError, FloatingPointError, OverflowError):
                return np.inf, np.zeros(3)

        best = None
        for s in starts:
            res = minimize_bfgs(fun_grad, s.log_vector(), max_iter=budget,
                                gtol=1e-7)
            if not np.isfinite(res.fun):
                continue
            if best is None or res.fun < best.fun:
                best = res
        if best is None:
            raise TrainingError(
                f"all {len(starts)} starts failed for output dimension {j}"
            )
        best_params.append(KernelParams.from_log_vector(best.x))
        total += best.fun
    return best_params, total


def predict_gradients(gp: GpPosterior, z, order=2):
    """Input derivatives of the posterior mean and latent variance.

    Returns
    -------
    dmu : ndarray (n_z, n_d)
    dvar : ndarray (n_z, n_d)
    d2var : ndarray (n_z, n_z, n_d), present only when ``order >= 2``
        (otherwise filled with zeros is NOT returned; the third element
        is None).
    """
    z = np.ascontiguousarray(z, dtype=np.float64).ravel()
    if z.shape[0] != gp.n_inputs:
        raise ValueError(f"query dim {z.shape[0]} != training dim {gp.n_inputs}")
    n = z.shape[0]
    dmu = np.empty((n, gp.n_outputs))
    dvar = np.empty((n, gp.n_outputs))
    d2var = np.empty((n, n, gp.n_outputs)) if order >= 2 else None
    for j, p in enumerate(gp.params):
        _, _, dm, dv, d2 = core.se_predict_grad(
            z, gp.Z, np.ascontiguousarray(gp.alpha[:, j]), gp.var_form(j),
            p.lam, p.eta, order
        )
        dmu[:, j] = dm
        dvar[:, j] = dv
        if order >= 2:
            d2var[:, :, j] = d2
    return dmu, dvar, d2var


def append_datum(gp: GpPosterior, z, y, tau: float):
    """Threshold-gated online append with a rank-one Cholesky extension.

    The datum is accepted when the prediction error exceeds ``tau``
    (max over outputs), or unconditionally for ``tau == 0``.  On
    acceptance a new posterior is returned whose factors extend the old
    ones by one row; hyperparameters are unchanged.  Otherwise the input
    posterior is returned with ``accepted=False``.
    """
    if tau < 0:
        raise ValueError("tau must be nonnegative")
    z = np.ascontiguousarray(z, dtype=np.float64).ravel()
    y = np.atleast_1d(np.asarray(y, dtype=np.float64)).ravel()
    if z.shape[0] != gp.n_inputs:
        raise ValueError(f"datum dim {z.shape[0]} != training dim {gp.n_inputs}")
    if y.shape[0] != gp.n_outputs:
        raise ValueError(f"target dim {y.shape[0]} != output dim {gp.n_outputs}")

    err = float(np.max(np.abs(y - gp.predict_mean(z))))
    if tau > 0.0 and err <= tau:
        return gp, False

    n = gp.n_points
    new_chols = []
    z_new = np.vstack([gp.Z, z[None, :]])
    y_new = np.vstack([gp.Y, y[None, :]])
    alpha_new = np.empty((n + 1, gp.n_outputs))
    for j, p in enumerate(gp.params):
        kvec = core.se_kvec(z, gp.Z, p.lam, p.eta)
        w = tri_solve(gp.chols[j], kvec)
        d_sq = p.lam + p.sigma_w_sq + gp.jitters[j] - float(w @ w)
        if d_sq <= 0.0:
            raise NumericalError(
                "rank-one extension lost positive definiteness",
                jitter=gp.jitters[j],
            )
        lower = np.zeros((n + 1, n + 1))
        lower[:n, :n] = gp.chols[j]
        lower[n, :n] = w
        lower[n, n] = np.sqrt(d_sq)
        new_chols.append(lower)
        alpha_new[:, j] = chol_solve(lower, y_new[:, j])
    out = GpPosterior(
        params=gp.params,
        Z=z_new,
        Y=y_new,
        chols=tuple(new_chols),
        alpha=alpha_new,
        jitters=gp.jitters,
    )
    return out, True
