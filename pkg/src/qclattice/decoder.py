"""Sum-product decoding on the quasi-cyclic Tanner graph, and the two lattice
decoders built on it: the Conway-Sloane wrapper (fold the received point into
the decoding cube, SPA-decode the code layer, unfold) and the direct wrapper
(LLRs straight from the mod-4 residues, then re-estimate the integer layer).

The SPA core takes LLRs with the convention log Pr{bit 0} / Pr{bit 1}, i.e.
positive values favour the -1 symbol.  The flooding schedule runs on the
compiled kernel when available.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ._backend import kernels
from .binmat import QCArray
from .lattice import QCLattice

LLR_CLIP = 30.0
DEFAULT_MAX_ITER = 50


class TannerGraph:
    """CSR adjacency of the expanded parity-check matrix."""

    def __init__(self, h: QCArray):
        c, t, b = h.c, h.t, h.b
        self.n = t * b
        self.m = c * b
        chk_ptr = [0]
        chk_var: list[int] = []
        for i in range(c):
            row_conn: list[list[int]] = [[] for _ in range(b)]
            for j in range(t):
                for a in h.blocks[i][j].exponents:
                    for x in range(b):
                        row_conn[x].append(j * b + (x + a) % b)
            for x in range(b):
                row_conn[x].sort()
                chk_var.extend(row_conn[x])
                chk_ptr.append(len(chk_var))
        self.chk_ptr = np.asarray(chk_ptr, dtype=np.int32)
        self.chk_var = np.asarray(chk_var, dtype=np.int32)
        self.edges = int(self.chk_var.shape[0])

        order = np.argsort(self.chk_var, kind="stable")
        var_ptr = np.zeros(self.n + 1, dtype=np.int32)
        counts = np.bincount(self.chk_var, minlength=self.n)
        var_ptr[1:] = np.cumsum(counts)
        self.var_ptr = var_ptr
        self.var_edge = order.astype(np.int32)


@dataclass
class DecodeResult:
    x_hat: np.ndarray  # decoded lattice point (odd coordinates)
    c_hat: np.ndarray  # binary codeword estimate (0/1)
    z_hat: np.ndarray  # integer layer estimate
    iterations_used: int
    converged: bool


def spa_core(
    graph: TannerGraph, llr, max_iter: int = DEFAULT_MAX_ITER, clip: float = LLR_CLIP
):
    """Flooding sum-product; returns (hard bits, converged, iterations, messages)."""
    if max_iter < 1:
        raise ValueError("max_iter must be >= 1")
    hard, iters, conv, msgs = kernels.spa_decode(
        np.asarray(llr, dtype=np.float64),
        graph.chk_ptr,
        graph.chk_var,
        graph.var_ptr,
        graph.var_edge,
        int(max_iter),
        float(clip),
    )
    return np.asarray(hard, dtype=np.uint8), bool(conv), int(iters), int(msgs)


def round_half_up(x: np.ndarray) -> np.ndarray:
    """Nearest integer with half-integers rounded toward +inf."""
    return np.floor(np.asarray(x, dtype=np.float64) + 0.5)


def fold_into_cube(a: np.ndarray, s_mask: np.ndarray) -> np.ndarray:
    """The Conway-Sloane fold 2 - a on the index set S; an involution for fixed S."""
    out = np.asarray(a, dtype=np.float64).copy()
    out[s_mask] = 2.0 - out[s_mask]
    return out


def _normalise(x_hat: np.ndarray):
    """Rewrite an odd-coordinate point as c' + 4z with c' in {-1, +1}."""
    residue = np.mod(x_hat + 1, 4)  # 0 for c = -1, 2 for c = +1
    c_pm = np.where(residue == 2, 1, -1).astype(np.int64)
    z = (x_hat - c_pm) // 4
    return c_pm, z


class LatticeDecoder:
    """Holds per-lattice decoding state (graph and message buffers).

    One instance per worker: the graph is shareable, a decode call is not
    reentrant on the same instance.
    """

    def __init__(self, lat: QCLattice, max_iter: int = DEFAULT_MAX_ITER):
        self.lat = lat
        self.graph = TannerGraph(lat.h)
        self.max_iter = max_iter
        self.message_count = 0

    # -- Conway-Sloane + SPA ------------------------------------------------

    def decode_cs_spa(self, y, sigma: float, max_iter: int | None = None) -> DecodeResult:
        y = np.asarray(y, dtype=np.float64)
        z_hat = round_half_up((y - 1.0) / 4.0).astype(np.int64)
        a = y - 4.0 * z_hat
        if a.min() < -1.0 - 1e-9 or a.max() >= 3.0 + 1e-9:
            raise AssertionError("fold residues left [-1, 3); check the rounding rule")
        s_mask = a > 1.0
        a_hat = fold_into_cube(a, s_mask)
        gamma = 2.0 * a_hat / (sigma * sigma)
        # gamma favours +1 when positive; the SPA core wants log P(-1)/P(+1)
        bits, conv, iters, msgs = spa_core(
            self.graph, -gamma, max_iter or self.max_iter
        )
        self.message_count += msgs
        c_tilde = 2 * bits.astype(np.int64) - 1  # 0 -> -1, 1 -> +1
        c_hat = c_tilde.copy()
        c_hat[s_mask] = 2 - c_tilde[s_mask]
        x_hat = c_hat + 4 * z_hat
        c_pm, z = _normalise(x_hat)
        return DecodeResult(
            x_hat=x_hat,
            c_hat=((c_pm + 1) // 2).astype(np.uint8),
            z_hat=z,
            iterations_used=iters,
            converged=conv,
        )

    # -- direct SPA ----------------------------------------------------------

    def decode_spa(self, y, sigma: float, max_iter: int | None = None) -> DecodeResult:
        y = np.asarray(y, dtype=np.float64)
        rm = (y - 1.0) / 4.0
        rp = (y + 1.0) / 4.0
        dm = rm - round_half_up(rm)
        dp = rp - round_half_up(rp)
        gamma = 2.0 * (dm * dm - dp * dp) / (sigma * sigma)
        bits, conv, iters, msgs = spa_core(self.graph, gamma, max_iter or self.max_iter)
        self.message_count += msgs
        c_pm = (2 * bits.astype(np.int64) - 1).astype(np.int64)
        z_hat = round_half_up((y - c_pm) / 4.0).astype(np.int64)
        x_hat = c_pm + 4 * z_hat
        return DecodeResult(
            x_hat=x_hat,
            c_hat=bits,
            z_hat=z_hat,
            iterations_used=iters,
            converged=conv,
        )

    def decode(self, y, sigma: float, method: str = "spa") -> DecodeResult:
        if method == "cs-spa":
            return self.decode_cs_spa(y, sigma)
        if method == "spa":
            return self.decode_spa(y, sigma)
        raise ValueError(f"unknown decoder {method!r}")


def decode_cs_spa(lat: QCLattice, y, sigma: float, max_iter: int = DEFAULT_MAX_ITER):
    return LatticeDecoder(lat, max_iter).decode_cs_spa(y, sigma)


def decode_spa(lat: QCLattice, y, sigma: float, max_iter: int = DEFAULT_MAX_ITER):
    return LatticeDecoder(lat, max_iter).decode_spa(y, sigma)
