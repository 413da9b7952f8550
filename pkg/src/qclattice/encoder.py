"""Translate-lattice encoding through the quasi-cyclic structure, plus the
shift-register (SRAA) cost model for the different encoder architectures.

Encoding never materialises the lattice generator: the product u G splits into
the code part (circulant convolutions against stored first rows) and the 2-row
part (doubled entries at the dependent positions).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .lattice import QCLattice

_FFT_MIN_B = 256
_FFT_GUARD = float(2**52)


def cyclic_conv_int(u: np.ndarray, f: np.ndarray) -> np.ndarray:
    """Exact integer cyclic convolution: out[x] = sum_s u[s] f[(x - s) mod b]."""
    b = u.shape[0]
    nz = np.nonzero(f)[0]
    if nz.size <= 8:
        out = np.zeros(b, dtype=np.int64)
        for a in nz:
            out += np.roll(u, a) * int(f[a])
        return out
    if b >= _FFT_MIN_B:
        conv = np.fft.irfft(np.fft.rfft(u) * np.fft.rfft(f), n=b)
        if np.abs(conv).max() >= _FFT_GUARD:
            raise OverflowError("cyclic convolution exceeds exact float range")
        return np.rint(conv).astype(np.int64)
    full = np.convolve(u.astype(np.int64), f.astype(np.int64))
    out = full[:b].copy()
    out[: b - 1] += full[b:]
    return out


def code_row_product(lat: QCLattice, u1: np.ndarray) -> np.ndarray:
    """u1 @ G*_qc over the integers, blockwise through the stored first rows."""
    gen = lat.gen
    t, l, b = gen.t, gen.l, gen.b
    out = np.zeros(lat.n, dtype=np.int64)
    for i in range(t - l):
        useg = u1[i * b : (i + 1) * b]
        out[i * b : (i + 1) * b] += useg
        if not useg.any():
            continue
        for jj in range(l):
            seg = gen.g_parity[i][jj * b : (jj + 1) * b]
            if seg.any():
                lo = (t - l + jj) * b
                out[lo : lo + b] += cyclic_conv_int(useg, seg)
    off = (t - l) * b
    for i in range(l):
        di = gen.d[i]
        if di == 0:
            continue
        useg = u1[off : off + di]
        off += di
        if not useg.any():
            continue
        upad = np.zeros(b, dtype=np.int64)
        upad[:di] = useg
        for jj in range(l):
            seg = gen.q_first[i][jj * b : (jj + 1) * b]
            if seg.any():
                lo = (t - l + jj) * b
                out[lo : lo + b] += cyclic_conv_int(upad, seg)
    return out


def encode(lat: QCLattice, u) -> np.ndarray:
    """E(u) = 2 u G - (1, ..., 1); all output coordinates are odd."""
    u = np.asarray(u, dtype=np.int64)
    if u.shape[0] != lat.n:
        raise ValueError("info vector length must equal the lattice dimension")
    k = lat.num_code_rows
    out = code_row_product(lat, u[:k])
    out[lat.dep_positions] += 2 * u[k:]
    return 2 * out - 1


@dataclass(frozen=True)
class AdderModel:
    """Two-input gate counts per bit of a full adder (ripple-carry default)."""

    xor_per_bit: int = 2
    and_per_bit: int = 2
    or_per_bit: int = 1


@dataclass(frozen=True)
class SraaCost:
    scheme: str
    clock_cycles: int
    flip_flops: int
    xor_gates: int
    and_gates: int
    or_gates: int
    asymptotic: bool = False


SCHEMES = ("serial", "parallel", "two_stage", "regular")


def sraa_cost(
    scheme: str,
    c: int,
    t: int,
    b: int,
    L: int,
    w_c: int,
    adder: AdderModel = AdderModel(),
) -> SraaCost:
    """Closed-form encoder costs for the four shift-register architectures.

    The symbol width is N_b = ceil(log2 L) + w_c bits; (N_x, N_a, N_o) are the
    gate counts of one N_b-bit full adder under the configured model.  The
    two-stage entries are the dominant terms of their asymptotic counts.
    """
    if scheme not in SCHEMES:
        raise ValueError(f"unknown scheme {scheme!r}; expected one of {SCHEMES}")
    if min(c, t, b, L, w_c) <= 0 or c >= t:
        raise ValueError("need 0 < c < t, b > 0, L > 0, w_c > 0")
    n_b = (L - 1).bit_length() + w_c  # ceil(log2 L) + w_c
    n_x = adder.xor_per_bit * n_b
    n_a = adder.and_per_bit * n_b
    n_o = adder.or_per_bit * n_b

    if scheme == "serial":
        return SraaCost(
            scheme,
            clock_cycles=(t - c) * b,
            flip_flops=c * b * (n_b + 1),
            xor_gates=c * b * n_x,
            and_gates=c * b * n_b + c * b * n_a,
            or_gates=c * b * n_o,
        )
    if scheme == "parallel":
        p = (t - c) * b
        return SraaCost(
            scheme,
            clock_cycles=c * b,
            flip_flops=p * n_b,
            xor_gates=(p - 1) * n_x,
            and_gates=p * n_b + (p - 1) * n_a,
            or_gates=(p - 1) * n_o,
        )
    if scheme == "two_stage":
        return SraaCost(
            scheme,
            clock_cycles=b,
            flip_flops=t * b * n_b,
            xor_gates=n_x * c * c * b,
            and_gates=n_a * c * c * b,
            or_gates=n_o * c * c * b,
            asymptotic=True,
        )
    q = c * ((t - c) * b - 1)
    return SraaCost(
        scheme,
        clock_cycles=1,
        flip_flops=c * b * ((t - c) * b + n_b),
        xor_gates=q * n_x,
        and_gates=q * (n_a + n_b),
        or_gates=q * n_o,
    )
