# cython: boundscheck=False, wraparound=False, cdivision=True, initializedcheck=False
"""Compiled hot kernels: flooding SPA message passing and Schnorr-Euchner CVP
enumeration.  Mirrors the `_kernels_py` fallback call for call."""

import numpy as np

cimport numpy as cnp
from libc.math cimport atanh, fabs, floor, tanh

cnp.import_array()

BACKEND = "compiled"

cdef double _ATANH_CAP = 1.0 - 1e-15


def spa_decode(llr_in, chk_ptr_in, chk_var_in, var_ptr_in, var_edge_in,
               int max_iter, double clip):
    """Flooding SPA; positive LLR favours bit 0.

    Returns (hard_bits uint8, iterations_used, converged, message_count).
    """
    cdef cnp.ndarray[cnp.float64_t, ndim=1] llr = np.clip(
        np.asarray(llr_in, dtype=np.float64), -clip, clip)
    cdef cnp.ndarray[cnp.int32_t, ndim=1] chk_ptr = np.ascontiguousarray(chk_ptr_in, dtype=np.int32)
    cdef cnp.ndarray[cnp.int32_t, ndim=1] chk_var = np.ascontiguousarray(chk_var_in, dtype=np.int32)
    cdef cnp.ndarray[cnp.int32_t, ndim=1] var_ptr = np.ascontiguousarray(var_ptr_in, dtype=np.int32)
    cdef cnp.ndarray[cnp.int32_t, ndim=1] var_edge = np.ascontiguousarray(var_edge_in, dtype=np.int32)

    cdef Py_ssize_t n = llr.shape[0]
    cdef Py_ssize_t m = chk_ptr.shape[0] - 1
    cdef Py_ssize_t E = chk_var.shape[0]

    cdef cnp.ndarray[cnp.float64_t, ndim=1] c2v = np.zeros(E)
    cdef cnp.ndarray[cnp.float64_t, ndim=1] v2c = np.zeros(E)
    cdef cnp.ndarray[cnp.float64_t, ndim=1] totals = np.zeros(n)
    cdef cnp.ndarray[cnp.uint8_t, ndim=1] hard = np.zeros(n, dtype=np.uint8)

    cdef Py_ssize_t maxdeg = 0, j, k, v, e, lo, hi, deg
    for j in range(m):
        deg = chk_ptr[j + 1] - chk_ptr[j]
        if deg > maxdeg:
            maxdeg = deg
    cdef cnp.ndarray[cnp.float64_t, ndim=1] pre = np.ones(maxdeg + 1)
    cdef cnp.ndarray[cnp.float64_t, ndim=1] tv = np.zeros(maxdeg + 1)

    cdef long long msg_count = 0
    cdef int iters = 0
    cdef bint converged = False
    cdef int it
    cdef double acc, prod, suf, val
    cdef int parity

    for it in range(1, max_iter + 1):
        iters = it
        # variable -> check
        for v in range(n):
            acc = llr[v]
            for k in range(var_ptr[v], var_ptr[v + 1]):
                acc += c2v[var_edge[k]]
            totals[v] = acc
        for e in range(E):
            val = totals[chk_var[e]] - c2v[e]
            if val > clip:
                val = clip
            elif val < -clip:
                val = -clip
            v2c[e] = val
        msg_count += E

        # check -> variable via prefix/suffix tanh products
        for j in range(m):
            lo = chk_ptr[j]
            hi = chk_ptr[j + 1]
            deg = hi - lo
            pre[0] = 1.0
            for k in range(deg):
                tv[k] = tanh(0.5 * v2c[lo + k])
                pre[k + 1] = pre[k] * tv[k]
            suf = 1.0
            for k in range(deg - 1, -1, -1):
                prod = pre[k] * suf
                if prod > _ATANH_CAP:
                    prod = _ATANH_CAP
                elif prod < -_ATANH_CAP:
                    prod = -_ATANH_CAP
                val = 2.0 * atanh(prod)
                if val > clip:
                    val = clip
                elif val < -clip:
                    val = -clip
                c2v[lo + k] = val
                suf *= tv[k]
        msg_count += E

        # hard decision and syndrome
        for v in range(n):
            acc = llr[v]
            for k in range(var_ptr[v], var_ptr[v + 1]):
                acc += c2v[var_edge[k]]
            totals[v] = acc
            hard[v] = 1 if acc < 0.0 else 0
        converged = True
        for j in range(m):
            parity = 0
            for k in range(chk_ptr[j], chk_ptr[j + 1]):
                parity ^= hard[chk_var[k]]
            if parity:
                converged = False
                break
        if converged:
            break

    return hard, iters, converged, msg_count


def babai_nearest(mu_in, bnorm2_in, tau_in):
    """Nearest-plane rounding over a Gram-Schmidt orthogonalisation."""
    cdef cnp.ndarray[cnp.float64_t, ndim=2] mu = np.ascontiguousarray(mu_in, dtype=np.float64)
    cdef cnp.ndarray[cnp.float64_t, ndim=1] tau = np.ascontiguousarray(tau_in, dtype=np.float64)
    cdef Py_ssize_t n = tau.shape[0]
    cdef cnp.ndarray[cnp.int64_t, ndim=1] z = np.zeros(n, dtype=np.int64)
    cdef Py_ssize_t i, j
    cdef double c
    for i in range(n - 1, -1, -1):
        c = tau[i]
        for j in range(i + 1, n):
            c -= z[j] * mu[j, i]
        z[i] = <long long> floor(c + 0.5)
    return z


cdef double _dist2(cnp.int64_t[::1] z, cnp.float64_t[:, ::1] mu,
                   cnp.float64_t[::1] bnorm2, cnp.float64_t[::1] tau):
    cdef Py_ssize_t n = tau.shape[0]
    cdef Py_ssize_t kk, jj
    cdef double acc = 0.0, s
    for kk in range(n):
        s = -tau[kk]
        for jj in range(kk, n):
            s += z[jj] * mu[jj, kk]
        acc += s * s * bnorm2[kk]
    return acc


def cvp_enumerate(mu_in, bnorm2_in, tau_in, double eps=1e-9):
    """Schnorr-Euchner enumeration; returns (z, dist2, tie candidates)."""
    cdef cnp.ndarray[cnp.float64_t, ndim=2] mu = np.ascontiguousarray(mu_in, dtype=np.float64)
    cdef cnp.ndarray[cnp.float64_t, ndim=1] bnorm2 = np.ascontiguousarray(bnorm2_in, dtype=np.float64)
    cdef cnp.ndarray[cnp.float64_t, ndim=1] tau = np.ascontiguousarray(tau_in, dtype=np.float64)
    cdef Py_ssize_t n = tau.shape[0]

    cdef cnp.ndarray[cnp.int64_t, ndim=1] z = np.zeros(n, dtype=np.int64)
    cdef cnp.ndarray[cnp.int64_t, ndim=1] dz = np.zeros(n, dtype=np.int64)
    cdef cnp.ndarray[cnp.float64_t, ndim=1] c = np.zeros(n)
    cdef cnp.ndarray[cnp.float64_t, ndim=1] part = np.zeros(n + 1)

    cdef double best = np.inf
    cdef cnp.ndarray[cnp.int64_t, ndim=1] best_z = np.zeros(n, dtype=np.int64)
    cdef bint have_best = False
    ties = []

    cdef Py_ssize_t i, j
    cdef double d, tol, cc

    i = n - 1
    cc = tau[i]
    c[i] = cc
    z[i] = <long long> floor(cc + 0.5)
    dz[i] = 1 if cc >= z[i] else -1

    while True:
        d = part[i + 1] + (z[i] - c[i]) * (z[i] - c[i]) * bnorm2[i]
        tol = eps * (1.0 + best) if have_best else 0.0
        if (not have_best) or d <= best + tol:
            if i == 0:
                if (not have_best) or d < best - tol:
                    best = d
                    best_z[:] = z
                    have_best = True
                    ties = [np.asarray(z).copy()]
                else:
                    ties.append(np.asarray(z).copy())
                    if d < best:
                        best = d
                        best_z[:] = z
                z[0] += dz[0]
                dz[0] = -dz[0] - (1 if dz[0] > 0 else -1)
            else:
                part[i] = d
                i -= 1
                cc = tau[i]
                for j in range(i + 1, n):
                    cc -= z[j] * mu[j, i]
                c[i] = cc
                z[i] = <long long> floor(cc + 0.5)
                dz[i] = 1 if cc >= z[i] else -1
        else:
            i += 1
            if i == n:
                break
            z[i] += dz[i]
            dz[i] = -dz[i] - (1 if dz[i] > 0 else -1)

    keep = []
    cdef cnp.ndarray[cnp.int64_t, ndim=1] cand
    for cand_obj in ties:
        cand = cand_obj
        if _dist2(cand, mu, bnorm2, tau) <= best + eps * (1.0 + best):
            keep.append(cand_obj)
    return best_z, best, keep
