"""Squared-exponential kernel: evaluation, Gram matrices, derivatives,
and the associated spectral density.

All functions are pure and operate on float64 arrays; they are safe to
call concurrently.  Only the isotropic squared-exponential kernel

    k(z, z') = lam * exp(-|z - z'|^2 / (2 eta))

is provided; ``lam`` acts as prior variance and ``eta`` is the squared
kernel width.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .backend import core


@dataclass(frozen=True)
class KernelParams:
    """Squared-exponential hyperparameters plus observation-noise variance.

    Parameters
    ----------
    lam : float
        Prior variance (output scale), > 0.
    eta : float
        Squared kernel width in input-space units squared, > 0.
    sigma_w_sq : float
        Observation-noise variance, >= 0.
    """

    lam: float
    eta: float
    sigma_w_sq: float

    def __post_init__(self):
        if not (self.lam > 0.0 and math.isfinite(self.lam)):
            raise ValueError(f"lam must be positive and finite, got {self.lam}")
        if not (self.eta > 0.0 and math.isfinite(self.eta)):
            raise ValueError(f"eta must be positive and finite, got {self.eta}")
        if not (self.sigma_w_sq >= 0.0 and math.isfinite(self.sigma_w_sq)):
            raise ValueError(
                f"sigma_w_sq must be nonnegative and finite, got {self.sigma_w_sq}"
            )

    def to_dict(self):
        return {"lambda": self.lam, "eta": self.eta, "sigma_w_sq": self.sigma_w_sq}

    @classmethod
    def from_dict(cls, d):
        return cls(lam=d["lambda"], eta=d["eta"], sigma_w_sq=d["sigma_w_sq"])

    def log_vector(self):
        """(log lam, log eta, log sigma_w_sq); requires sigma_w_sq > 0."""
        if self.sigma_w_sq <= 0.0:
            raise ValueError("log parameterization requires sigma_w_sq > 0")
        return np.log([self.lam, self.eta, self.sigma_w_sq])

    @classmethod
    def from_log_vector(cls, v):
        lam, eta, sig = np.exp(np.asarray(v, dtype=float))
        return cls(lam=float(lam), eta=float(eta), sigma_w_sq=float(sig))


def _as_points(a, name):
    a = np.ascontiguousarray(a, dtype=np.float64)
    if a.ndim == 1:
        a = a[None, :]
    if a.ndim != 2 or a.shape[0] == 0 or a.shape[1] == 0:
        raise ValueError(f"{name} must be a nonempty 2-d array of points")
    return a


def _as_vec(z, name):
    z = np.ascontiguousarray(z, dtype=np.float64).ravel()
    if z.size == 0:
        raise ValueError(f"{name} must be a nonempty vector")
    return z


def eval_kernel(za, zb, params: KernelParams) -> float:
    """Evaluate k(za, zb); result lies in (0, lam]."""
    za = _as_vec(za, "za")
    zb = _as_vec(zb, "zb")
    if za.shape != zb.shape:
        raise ValueError(f"dimension mismatch: {za.shape} vs {zb.shape}")
    d = za - zb
    return params.lam * math.exp(-0.5 * float(d @ d) / params.eta)


def squared_distances(a, b):
    """Pairwise squared distances between rows of ``a`` and ``b``.

    Computed via the |a|^2 + |b|^2 - 2 a.b expansion with negative
    round-off clamped at zero.
    """
    a = _as_points(a, "a")
    b = _as_points(b, "b")
    if a.shape[1] != b.shape[1]:
        raise ValueError(f"dimension mismatch: {a.shape[1]} vs {b.shape[1]}")
    return core.sqdist(a, b)


def gram(a, b, params: KernelParams):
    """Gram matrix [k(a_i, b_j)]; symmetric PSD up to round-off when a is b."""
    a = _as_points(a, "a")
    b = _as_points(b, "b")
    if a.shape[1] != b.shape[1]:
        raise ValueError(f"dimension mismatch: {a.shape[1]} vs {b.shape[1]}")
    return core.se_gram(a, b, params.lam, params.eta)


def kernel_grad_hyper(a, params: KernelParams):
    """Gram-matrix derivatives in the log parameterization.

    Returns ``(dK_dlog_lam, dK_dlog_eta)`` where

        dK/d(log lam) = K
        dK/d(log eta) = K o D / (2 eta)

    with D the squared-distance matrix (entrywise product).
    """
    a = _as_points(a, "a")
    d = core.sqdist(a, a)
    k = params.lam * np.exp(-0.5 * d / params.eta)
    return k, k * (d / (2.0 * params.eta))


def kernel_grad_input(za, zb, params: KernelParams):
    """Gradient of k(za, zb) with respect to ``za``: -(za-zb)/eta * k."""
    za = _as_vec(za, "za")
    zb = _as_vec(zb, "zb")
    if za.shape != zb.shape:
        raise ValueError(f"dimension mismatch: {za.shape} vs {zb.shape}")
    return -(za - zb) / params.eta * eval_kernel(za, zb, params)


def spectral_density(s, params: KernelParams) -> float:
    """Normalized spectral density of the squared-exponential kernel.

    p(s) = (2 pi eta)^(n/2) * exp(-2 pi^2 eta |s|^2), which integrates
    to one over R^n; the implied frequency distribution is zero-mean
    Gaussian with variance 1/(4 pi^2 eta) per coordinate.
    """
    s = _as_vec(s, "s")
    n = s.shape[0]
    return (2.0 * math.pi * params.eta) ** (n / 2.0) * math.exp(
        -2.0 * math.pi**2 * params.eta * float(s @ s)
    )
