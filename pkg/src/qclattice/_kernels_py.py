"""Pure-Python/numpy fallback for the hot kernels.

Same call signatures as the compiled `_kernels` extension: a flooding
sum-product decoder over CSR-style adjacency arrays, and Schnorr-Euchner
closest-vector enumeration plus Babai nearest-plane over a precomputed
Gram-Schmidt orthogonalisation.  Selected at import time by `_backend`.
"""

from __future__ import annotations

import numpy as np

BACKEND = "python"

_ATANH_CAP = 1.0 - 1e-15


def spa_decode(llr, chk_ptr, chk_var, var_ptr, var_edge, max_iter, clip):
    """Flooding SPA; positive LLR favours bit 0.

    Returns (hard_bits uint8, iterations_used, converged, message_count).
    """
    llr = np.clip(np.asarray(llr, dtype=np.float64), -clip, clip)
    chk_ptr = np.asarray(chk_ptr, dtype=np.int64)
    chk_var = np.asarray(chk_var, dtype=np.int64)
    var_ptr = np.asarray(var_ptr, dtype=np.int64)
    var_edge = np.asarray(var_edge, dtype=np.int64)
    n = llr.shape[0]
    m = chk_ptr.shape[0] - 1
    E = chk_var.shape[0]

    # edge e (in check-grouped order) touches variable chk_var[e] and check chk_of[e]
    chk_of = np.repeat(np.arange(m, dtype=np.int64), np.diff(chk_ptr))
    deg = np.diff(chk_ptr)

    c2v = np.zeros(E)
    msg_count = 0
    hard = np.zeros(n, dtype=np.uint8)
    converged = False
    iters = 0

    for it in range(1, max_iter + 1):
        iters = it
        # variable -> check
        totals = llr + np.bincount(chk_var, weights=c2v, minlength=n)
        v2c = np.clip(totals[chk_var] - c2v, -clip, clip)
        msg_count += E

        # check -> variable (tanh rule, zero-safe via sign/log-magnitude split)
        t = np.tanh(0.5 * v2c)
        sgn = np.where(t < 0, 1, 0).astype(np.int64)
        mag = np.abs(t)
        zero = mag == 0.0
        with np.errstate(divide="ignore"):
            logm = np.where(zero, 0.0, np.log(np.where(zero, 1.0, mag)))
        gsum = np.bincount(chk_of, weights=logm, minlength=m)
        gsgn = np.bincount(chk_of, weights=sgn, minlength=m).astype(np.int64)
        gzero = np.bincount(chk_of, weights=zero.astype(np.float64), minlength=m)
        gzero = gzero.astype(np.int64)

        loo_mag = np.exp(gsum[chk_of] - logm)
        loo_sgn = 1.0 - 2.0 * ((gsgn[chk_of] - sgn) & 1)
        nz = gzero[chk_of] - zero.astype(np.int64)  # zeros among the other edges
        prod = np.where(nz > 0, 0.0, loo_mag * loo_sgn)
        c2v = 2.0 * np.arctanh(np.clip(prod, -_ATANH_CAP, _ATANH_CAP))
        c2v = np.clip(c2v, -clip, clip)
        msg_count += E

        totals = llr + np.bincount(chk_var, weights=c2v, minlength=n)
        hard = (totals < 0).astype(np.uint8)
        syn = np.bincount(chk_of, weights=hard[chk_var].astype(np.float64), minlength=m)
        if not (syn.astype(np.int64) & 1).any():
            converged = True
            break

    return hard, iters, converged, msg_count


def _round_half_up(x: float) -> float:
    return np.floor(x + 0.5)


def babai_nearest(mu, bnorm2, tau):
    """Nearest-plane on a GSO: mu[i, j] = <b_i, b*_j>/||b*_j||^2, tau in b* coords."""
    mu = np.asarray(mu, dtype=np.float64)
    tau = np.asarray(tau, dtype=np.float64)
    n = tau.shape[0]
    z = np.zeros(n, dtype=np.int64)
    for i in range(n - 1, -1, -1):
        c = tau[i] - sum(z[j] * mu[j, i] for j in range(i + 1, n))
        z[i] = int(_round_half_up(c))
    return z


def cvp_enumerate(mu, bnorm2, tau, eps=1e-9):
    """Schnorr-Euchner enumeration of the closest lattice point.

    Returns (z int64, dist2, ties) where ties is a list of coefficient vectors
    whose distance is within the eps window of the best one (best included).
    """
    mu = np.asarray(mu, dtype=np.float64)
    bnorm2 = np.asarray(bnorm2, dtype=np.float64)
    tau = np.asarray(tau, dtype=np.float64)
    n = tau.shape[0]

    z = np.zeros(n, dtype=np.int64)
    c = np.zeros(n)
    dz = np.zeros(n, dtype=np.int64)
    part = np.zeros(n + 1)

    best = 0.0
    have_best = False
    best_z = None
    ties: list[np.ndarray] = []

    def center(i):
        return tau[i] - np.dot(z[i + 1 :].astype(np.float64), mu[i + 1 :, i])

    i = n - 1
    c[i] = center(i)
    z[i] = int(_round_half_up(c[i]))
    dz[i] = 1 if c[i] >= z[i] else -1

    while True:
        d = part[i + 1] + (z[i] - c[i]) ** 2 * bnorm2[i]
        tol = eps * (1.0 + best) if have_best else 0.0
        if not have_best or d <= best + tol:
            if i == 0:
                if not have_best or d < best - tol:
                    best = d
                    best_z = z.copy()
                    have_best = True
                    ties = [z.copy()]
                else:
                    ties.append(z.copy())
                    if d < best:
                        best = d
                        best_z = z.copy()
                # continue zig-zag at level 0
                z[0] += dz[0]
                dz[0] = -dz[0] - (1 if dz[0] > 0 else -1)
            else:
                part[i] = d
                i -= 1
                c[i] = center(i)
                z[i] = int(_round_half_up(c[i]))
                dz[i] = 1 if c[i] >= z[i] else -1
        else:
            i += 1
            if i == n:
                break
            z[i] += dz[i]
            dz[i] = -dz[i] - (1 if dz[i] > 0 else -1)

    # drop stale tie entries recorded before the final best was known
    keep = []
    for cand in ties:
        dd = _dist2(cand, mu, bnorm2, tau)
        if dd <= best + eps * (1.0 + best):
            keep.append(cand)
    return best_z, best, keep


def _dist2(z, mu, bnorm2, tau):
    n = len(z)
    acc = 0.0
    for k in range(n):
        s = sum(z[j] * mu[j, k] for j in range(k, n)) - tau[k]
        acc += s * s * bnorm2[k]
    return acc
