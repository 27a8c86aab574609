import math

import numpy as np
import pytest

from gpmpc.kernels import (
    KernelParams,
    eval_kernel,
    gram,
    kernel_grad_hyper,
    kernel_grad_input,
    spectral_density,
    squared_distances,
)


def test_params_validation():
    with pytest.raises(ValueError):
        KernelParams(lam=0.0, eta=1.0, sigma_w_sq=0.1)
    with pytest.raises(ValueError):
        KernelParams(lam=1.0, eta=-1.0, sigma_w_sq=0.1)
    with pytest.raises(ValueError):
        KernelParams(lam=1.0, eta=1.0, sigma_w_sq=-0.1)


def test_params_round_trip_exact():
    p = KernelParams(lam=1.234567890123456, eta=0.987654321098765,
                     sigma_w_sq=1e-3)
    q = KernelParams.from_dict(p.to_dict())
    assert q.lam == p.lam and q.eta == p.eta and q.sigma_w_sq == p.sigma_w_sq


class TestEvalKernel:
    def test_zero_distance_gives_lam(self):
        p = KernelParams(lam=2.0, eta=0.5, sigma_w_sq=0.0)
        z = np.array([0.3, -1.2])
        assert eval_kernel(z, z, p) == 2.0

    def test_unit_case(self):
        # |za - zb|^2 = 2 with lam = eta = 1 forces exp(-1)
        p = KernelParams(lam=1.0, eta=1.0, sigma_w_sq=0.0)
        va = np.array([1.0, 0.0])
        vb = np.array([0.0, 1.0])
        assert eval_kernel(va, vb, p) == pytest.approx(0.3678794411714423,
                                                       abs=1e-7)

    def test_symmetry(self):
        rng = np.random.default_rng(3)
        p = KernelParams(lam=1.7, eta=0.3, sigma_w_sq=0.0)
        for _ in range(20):
            a = rng.standard_normal(4)
            b = rng.standard_normal(4)
            assert eval_kernel(a, b, p) == eval_kernel(b, a, p)

    def test_bounds(self):
        rng = np.random.default_rng(4)
        p = KernelParams(lam=2.5, eta=1.1, sigma_w_sq=0.0)
        for _ in range(50):
            a = rng.standard_normal(3)
            b = rng.standard_normal(3)
            v = eval_kernel(a, b, p)
            assert 0.0 < v <= p.lam

    def test_dimension_mismatch(self):
        p = KernelParams(lam=1.0, eta=1.0, sigma_w_sq=0.0)
        with pytest.raises(ValueError):
            eval_kernel(np.zeros(2), np.zeros(3), p)


class TestGram:
    def test_diagonal_equals_lam(self):
        rng = np.random.default_rng(0)
        p = KernelParams(lam=3.3, eta=0.8, sigma_w_sq=0.0)
        a = rng.standard_normal((10, 2))
        g = gram(a, a, p)
        np.testing.assert_allclose(np.diag(g), p.lam, rtol=0, atol=0)

    def test_exact_symmetry(self):
        rng = np.random.default_rng(1)
        p = KernelParams(lam=1.0, eta=2.0, sigma_w_sq=0.0)
        a = rng.standard_normal((15, 3))
        g = gram(a, a, p)
        assert np.max(np.abs(g - g.T)) == 0.0

    def test_psd_eigensolver_oracle(self):
        rng = np.random.default_rng(2)
        p = KernelParams(lam=1.0, eta=1.0, sigma_w_sq=0.0)
        a = rng.standard_normal((20, 3))
        g = gram(a, a, p)
        evals = np.linalg.eigvalsh(g)
        assert evals.min() >= -1e-10

    def test_min_eig_scaled_bound(self):
        # min eigenvalue >= -1e-10 * lam * N over random configurations
        rng = np.random.default_rng(5)
        for _ in range(10):
            n = int(rng.integers(2, 30))
            p = KernelParams(lam=float(rng.uniform(0.1, 5.0)),
                             eta=float(rng.uniform(0.1, 3.0)), sigma_w_sq=0.0)
            a = rng.standard_normal((n, int(rng.integers(1, 4))))
            evals = np.linalg.eigvalsh(gram(a, a, p))
            assert evals.min() >= -1e-10 * p.lam * n

    def test_sqdist_clamped_nonnegative(self):
        rng = np.random.default_rng(6)
        a = rng.standard_normal((30, 2)) * 1e-8 + 5.0
        d = squared_distances(a, a)
        assert d.min() >= 0.0


def _fd_hyper(a, params, which, step=1e-6):
    """Central finite differences of the Gram matrix in log-space."""
    logs = params.log_vector() if params.sigma_w_sq > 0 else np.log(
        [params.lam, params.eta, 1.0])

    def at(offset):
        v = logs.copy()
        v[which] += offset
        q = KernelParams(lam=float(np.exp(v[0])), eta=float(np.exp(v[1])),
                         sigma_w_sq=params.sigma_w_sq)
        return gram(a, a, q)

    return (at(step) - at(-step)) / (2.0 * step)


class TestGradHyper:
    def test_dlog_lam_is_gram(self):
        rng = np.random.default_rng(7)
        p = KernelParams(lam=2.2, eta=0.9, sigma_w_sq=0.0)
        a = rng.standard_normal((8, 2))
        dlam, _ = kernel_grad_hyper(a, p)
        np.testing.assert_allclose(np.diag(dlam), p.lam)
        np.testing.assert_allclose(dlam, gram(a, a, p))

    def test_dlog_eta_zero_at_zero_distance(self):
        p = KernelParams(lam=1.5, eta=0.4, sigma_w_sq=0.0)
        a = np.array([[0.7, -0.1]])
        _, deta = kernel_grad_hyper(a, p)
        assert deta[0, 0] == 0.0

    def test_single_pair_finite_difference(self):
        p = KernelParams(lam=1.3, eta=0.6, sigma_w_sq=0.0)
        a = np.array([[0.0, 0.0], [1.0, -0.5]])
        dlam, deta = kernel_grad_hyper(a, p)
        fd_lam = _fd_hyper(a, p, 0)
        fd_eta = _fd_hyper(a, p, 1)
        np.testing.assert_allclose(dlam, fd_lam, rtol=1e-6)
        assert abs(deta[0, 1] - fd_eta[0, 1]) / abs(fd_eta[0, 1]) < 1e-6

    def test_random_suite_matches_fd(self):
        rng = np.random.default_rng(8)
        for _ in range(100):
            p = KernelParams(lam=float(rng.uniform(0.2, 3.0)),
                             eta=float(rng.uniform(0.2, 3.0)), sigma_w_sq=0.0)
            a = rng.standard_normal((5, int(rng.integers(1, 4))))
            dlam, deta = kernel_grad_hyper(a, p)
            fd_lam = _fd_hyper(a, p, 0, step=1e-5)
            fd_eta = _fd_hyper(a, p, 1, step=1e-5)
            scale = np.abs(fd_lam) + 1e-12
            assert np.max(np.abs(dlam - fd_lam) / scale) < 1e-5
            scale = np.abs(fd_eta) + 1e-9
            assert np.max(np.abs(deta - fd_eta) / scale) < 1e-5


class TestGradInput:
    def test_zero_at_equal_points(self):
        p = KernelParams(lam=1.0, eta=1.0, sigma_w_sq=0.0)
        z = np.array([0.2, 0.4, -1.0])
        np.testing.assert_array_equal(kernel_grad_input(z, z, p), np.zeros(3))

    def test_finite_difference(self):
        p = KernelParams(lam=1.4, eta=0.7, sigma_w_sq=0.0)
        rng = np.random.default_rng(9)
        for _ in range(20):
            za = rng.standard_normal(3)
            zb = rng.standard_normal(3)
            g = kernel_grad_input(za, zb, p)
            for i in range(3):
                h = 1e-6
                zp = za.copy()
                zm = za.copy()
                zp[i] += h
                zm[i] -= h
                fd = (eval_kernel(zp, zb, p) - eval_kernel(zm, zb, p)) / (2 * h)
                assert abs(g[i] - fd) / (abs(fd) + 1e-12) < 1e-6

    def test_translation_antisymmetry(self):
        p = KernelParams(lam=1.0, eta=2.0, sigma_w_sq=0.0)
        rng = np.random.default_rng(10)
        za = rng.standard_normal(4)
        zb = rng.standard_normal(4)
        np.testing.assert_allclose(kernel_grad_input(za, zb, p),
                                   -kernel_grad_input(zb, za, p))


class TestSpectralDensity:
    def test_value_at_origin_1d(self):
        p = KernelParams(lam=1.0, eta=1.0, sigma_w_sq=0.0)
        assert spectral_density(np.array([0.0]), p) == pytest.approx(
            math.sqrt(2 * math.pi), rel=1e-12)

    def test_normalizes_by_trapezoid_quadrature(self):
        p = KernelParams(lam=1.0, eta=1.0, sigma_w_sq=0.0)
        s = np.linspace(-10.0, 10.0, 20001)
        vals = np.array([spectral_density(np.array([x]), p) for x in s])
        integral = np.trapz(vals, s)
        assert abs(integral - 1.0) < 1e-6

    def test_even_function(self):
        p = KernelParams(lam=1.0, eta=0.5, sigma_w_sq=0.0)
        rng = np.random.default_rng(11)
        for _ in range(10):
            s = rng.standard_normal(3)
            assert spectral_density(s, p) == spectral_density(-s, p)

    def test_gaussian_exponent_coefficient(self):
        # implied frequency variance per coordinate is 1/(4 pi^2 eta)
        eta = 0.8
        p = KernelParams(lam=1.0, eta=eta, sigma_w_sq=0.0)
        var = 1.0 / (4.0 * math.pi**2 * eta)
        s = np.array([0.13])
        expected = spectral_density(np.array([0.0]), p) * math.exp(
            -0.5 * s[0] ** 2 / var)
        assert spectral_density(s, p) == pytest.approx(expected, rel=1e-12)
