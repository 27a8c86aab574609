# cython: boundscheck=False, wraparound=False, cdivision=True, language_level=3
"""Compiled implementation of the hot numerical kernels.

Signature-compatible with gpmpc._purecore; see that module for the
reference semantics.  These routines dominate the runtime of MPC solves
(thousands of single-point GP evaluations per solve), where per-call
NumPy dispatch overhead matters more than BLAS throughput.
"""

import numpy as np

cimport numpy as cnp
from libc.math cimport exp

cnp.import_array()

NAME = "cython"


def sqdist(double[:, ::1] a not None, double[:, ::1] b not None):
    cdef Py_ssize_t n = a.shape[0], m = b.shape[0], k = a.shape[1]
    cdef Py_ssize_t i, j, t
    cdef double acc, diff
    out_arr = np.empty((n, m), dtype=np.float64)
    cdef double[:, ::1] out = out_arr
    for i in range(n):
        for j in range(m):
            acc = 0.0
            for t in range(k):
                diff = a[i, t] - b[j, t]
                acc += diff * diff
            out[i, j] = acc
    return out_arr


def se_gram(double[:, ::1] a not None, double[:, ::1] b not None,
            double lam, double eta):
    cdef Py_ssize_t n = a.shape[0], m = b.shape[0], k = a.shape[1]
    cdef Py_ssize_t i, j, t
    cdef double acc, diff, half_inv_eta = 0.5 / eta
    out_arr = np.empty((n, m), dtype=np.float64)
    cdef double[:, ::1] out = out_arr
    for i in range(n):
        for j in range(m):
            acc = 0.0
            for t in range(k):
                diff = a[i, t] - b[j, t]
                acc += diff * diff
            out[i, j] = lam * exp(-acc * half_inv_eta)
    return out_arr


def se_kvec(double[::1] z not None, double[:, ::1] c not None,
            double lam, double eta):
    cdef Py_ssize_t m = c.shape[0], k = c.shape[1]
    cdef Py_ssize_t i, t
    cdef double acc, diff, half_inv_eta = 0.5 / eta
    out_arr = np.empty(m, dtype=np.float64)
    cdef double[::1] out = out_arr
    for i in range(m):
        acc = 0.0
        for t in range(k):
            diff = z[t] - c[i, t]
            acc += diff * diff
        out[i] = lam * exp(-acc * half_inv_eta)
    return out_arr


def se_mean(double[::1] z not None, double[:, ::1] c not None,
            double[::1] w not None, double lam, double eta):
    cdef Py_ssize_t m = c.shape[0], k = c.shape[1]
    cdef Py_ssize_t i, t
    cdef double acc, diff, total = 0.0, half_inv_eta = 0.5 / eta
    for i in range(m):
        acc = 0.0
        for t in range(k):
            diff = z[t] - c[i, t]
            acc += diff * diff
        total += w[i] * lam * exp(-acc * half_inv_eta)
    return total


def se_predict(double[::1] z not None, double[:, ::1] c not None,
               double[::1] w not None, double[:, ::1] var_form not None,
               double lam, double eta):
    cdef Py_ssize_t m = c.shape[0], k = c.shape[1]
    cdef Py_ssize_t i, j, t
    cdef double acc, diff, mean = 0.0, quad = 0.0, vki
    cdef double half_inv_eta = 0.5 / eta
    kv_arr = np.empty(m, dtype=np.float64)
    cdef double[::1] kv = kv_arr
    for i in range(m):
        acc = 0.0
        for t in range(k):
            diff = z[t] - c[i, t]
            acc += diff * diff
        kv[i] = lam * exp(-acc * half_inv_eta)
        mean += w[i] * kv[i]
    for i in range(m):
        vki = 0.0
        for j in range(m):
            vki += var_form[i, j] * kv[j]
        quad += kv[i] * vki
    return mean, lam - quad


def se_predict_grad(double[::1] z not None, double[:, ::1] c not None,
                    double[::1] w not None, double[:, ::1] var_form not None,
                    double lam, double eta, int order):
    cdef Py_ssize_t m = c.shape[0], n = c.shape[1]
    cdef Py_ssize_t i, j, t, s
    cdef double acc, mean = 0.0, quad = 0.0, inv_eta = 1.0 / eta
    cdef double half_inv_eta = 0.5 / eta, ssum, hij

    kv_arr = np.empty(m, dtype=np.float64)
    diff_arr = np.empty((m, n), dtype=np.float64)
    vk_arr = np.empty(m, dtype=np.float64)
    dmu_arr = np.zeros(n, dtype=np.float64)
    dvar_arr = np.zeros(n, dtype=np.float64)
    cdef double[::1] kv = kv_arr, vk = vk_arr, dmu = dmu_arr, dvar = dvar_arr
    cdef double[:, ::1] diff = diff_arr

    for i in range(m):
        acc = 0.0
        for t in range(n):
            diff[i, t] = z[t] - c[i, t]
            acc += diff[i, t] * diff[i, t]
        kv[i] = lam * exp(-acc * half_inv_eta)
        mean += w[i] * kv[i]
    for i in range(m):
        acc = 0.0
        for j in range(m):
            acc += var_form[i, j] * kv[j]
        vk[i] = acc
        quad += kv[i] * acc
    # J rows: dk_i/dz = -(z - c_i)/eta * k_i
    for i in range(m):
        for t in range(n):
            acc = -diff[i, t] * inv_eta * kv[i]
            dmu[t] += acc * w[i]
            dvar[t] += -2.0 * acc * vk[i]
    if order < 2:
        return mean, lam - quad, dmu_arr, dvar_arr, None

    d2_arr = np.zeros((n, n), dtype=np.float64)
    cdef double[:, ::1] d2 = d2_arr
    # J^T V J term
    for i in range(m):
        for j in range(m):
            hij = var_form[i, j] * kv[i] * kv[j] * inv_eta * inv_eta
            for t in range(n):
                for s in range(n):
                    d2[t, s] += hij * diff[i, t] * diff[j, s]
    # sum_i (V k)_i H_i term
    ssum = 0.0
    for i in range(m):
        hij = vk[i] * kv[i]
        ssum += hij
        for t in range(n):
            for s in range(n):
                d2[t, s] += hij * diff[i, t] * diff[i, s] * inv_eta * inv_eta
    for t in range(n):
        d2[t, t] -= ssum * inv_eta
    for t in range(n):
        for s in range(n):
            d2[t, s] *= -2.0
    return mean, lam - quad, dmu_arr, dvar_arr, d2_arr


def se_predict_diag(double[:, ::1] zs not None, double[:, ::1] c not None,
                    double[::1] w not None, double[:, ::1] var_form not None,
                    double lam, double eta):
    cdef Py_ssize_t nq = zs.shape[0], m = c.shape[0], k = c.shape[1]
    cdef Py_ssize_t q, i, j, t
    cdef double acc, diff, mean, quad, vki, half_inv_eta = 0.5 / eta
    means_arr = np.empty(nq, dtype=np.float64)
    vars_arr = np.empty(nq, dtype=np.float64)
    kv_arr = np.empty(m, dtype=np.float64)
    cdef double[::1] means = means_arr, vars = vars_arr, kv = kv_arr
    for q in range(nq):
        mean = 0.0
        for i in range(m):
            acc = 0.0
            for t in range(k):
                diff = zs[q, t] - c[i, t]
                acc += diff * diff
            kv[i] = lam * exp(-acc * half_inv_eta)
            mean += w[i] * kv[i]
        quad = 0.0
        for i in range(m):
            vki = 0.0
            for j in range(m):
                vki += var_form[i, j] * kv[j]
            quad += kv[i] * vki
        means[q] = mean
        vars[q] = lam - quad
    return means_arr, vars_arr
