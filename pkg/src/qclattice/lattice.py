"""Construction-A lattice over a QC-LDPC code: generator assembly, membership,
VNR helpers, and the odd-coordinate translate used for transmission.

The lattice generator stacks the code generator (lifted to integers) over rows
2*e_i at the dependent column positions; the 2-rows are kept as positions, not
as a dense block, so building a lattice stays linear in its dimension.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .binmat import QCArray
from .qccode import QCGenerator, dependent_positions, derive_generator


class NotMember(ValueError):
    """Vector is not in the (translate) lattice."""


@dataclass
class QCLattice:
    """QC-LDPC lattice: code + 2Z^n, with h playing the permuted check matrix."""

    h: QCArray  # H*_qc: the block-column-permuted parity check
    gen: QCGenerator
    r: int
    n: int
    dep_positions: list[int]

    @property
    def num_code_rows(self) -> int:
        return self.n - self.r

    def generator_matrix(self) -> np.ndarray:
        """Dense integer generator (desk scale only): code rows over 2e rows."""
        g = np.zeros((self.n, self.n), dtype=np.int64)
        g[: self.num_code_rows] = self.gen.dense_rows().astype(np.int64)
        for k, pos in enumerate(self.dep_positions):
            g[self.num_code_rows + k, pos] = 2
        return g

    def syndrome(self, x) -> np.ndarray:
        x = np.asarray(x)
        return self.h.mul_vec((x % 2).astype(np.uint8))


def build_lattice(h: QCArray) -> QCLattice:
    """Assemble the lattice of a QC parity-check array (Construction A, p = 2)."""
    gen = derive_generator(h)
    hstar = h.column_permuted(gen.perm)
    dep = dependent_positions(gen)
    return QCLattice(h=hstar, gen=gen, r=gen.r, n=gen.n, dep_positions=dep)


def is_member(lat: QCLattice, x) -> bool:
    """x in Lambda  <=>  H x^T = 0 (mod 2), x integer."""
    x = np.asarray(x)
    if x.shape[0] != lat.n:
        raise ValueError("length mismatch")
    if not np.all(np.equal(np.mod(x, 1), 0)):
        return False
    return not lat.syndrome(x.astype(np.int64)).any()


def vnr_sigma(lat: QCLattice, vnr_db: float) -> float:
    """Noise std dev sigma at a given VNR (dB) for the scaled translate 2*Lambda - 1.

    VNR = 4^((n + r)/n) / (2 pi e sigma^2).
    """
    n, r = lat.n, lat.r
    vnr = 10.0 ** (float(vnr_db) / 10.0)
    sigma2 = 4.0 ** ((n + r) / n) / (2.0 * np.pi * np.e * vnr)
    return float(np.sqrt(sigma2))


@dataclass
class TranslateLattice:
    """The odd-coordinate point set 2*Lambda - (1, ..., 1) = C(+-1) + 4Z^n."""

    base: QCLattice

    def is_member(self, x) -> bool:
        x = np.asarray(x, dtype=np.int64)
        if x.shape[0] != self.base.n:
            return False
        if np.any((x & 1) == 0):
            return False
        bits = ((x + 1) // 2) % 2
        return not self.base.h.mul_vec(bits.astype(np.uint8)).any()

    def identity_element(self) -> np.ndarray:
        return -np.ones(self.base.n, dtype=np.int64)


def oplus(lat: TranslateLattice, a, b) -> np.ndarray:
    """Closed addition on the translate: a (+) b = a + b + (1, ..., 1)."""
    a = np.asarray(a, dtype=np.int64)
    b = np.asarray(b, dtype=np.int64)
    if not lat.is_member(a) or not lat.is_member(b):
        raise NotMember("oplus operands must lie in the translate lattice")
    return a + b + 1
