"""Exact GF(2) linear algebra on bit-packed matrices, plus circulant helpers.

Rows are packed into uint64 words (LSB-first within each word) so that row
operations are word-level XORs.  This is what keeps rank / solve usable at
dimensions in the tens of thousands.  All public objects are immutable after
construction; operations allocate their own scratch copies.
"""

from __future__ import annotations

import numpy as np

_W = 64


class NoSolution(ValueError):
    """The constrained linear system is inconsistent."""


class NotUnique(ValueError):
    """The free positions do not pin down a unique solution."""


class BitMatrix:
    """Dense binary matrix, rows bit-packed into uint64 words."""

    __slots__ = ("rows", "cols", "words")

    def __init__(self, rows: int, cols: int, words: np.ndarray | None = None):
        self.rows = int(rows)
        self.cols = int(cols)
        nw = (self.cols + _W - 1) // _W if self.cols else 1
        if words is None:
            words = np.zeros((self.rows, nw), dtype=np.uint64)
        self.words = words

    # -- construction ------------------------------------------------------

    @classmethod
    def from_dense(cls, a) -> "BitMatrix":
        a = np.asarray(a, dtype=np.uint8) & 1
        if a.ndim != 2:
            raise ValueError("expected a 2-D array")
        rows, cols = a.shape
        m = cls(rows, cols)
        for j in range(cols):
            w, bit = divmod(j, _W)
            m.words[:, w] |= a[:, j].astype(np.uint64) << np.uint64(bit)
        return m

    @classmethod
    def identity(cls, n: int) -> "BitMatrix":
        m = cls(n, n)
        for i in range(n):
            w, bit = divmod(i, _W)
            m.words[i, w] = np.uint64(1) << np.uint64(bit)
        return m

    @classmethod
    def zeros(cls, rows: int, cols: int) -> "BitMatrix":
        return cls(rows, cols)

    @classmethod
    def from_rows(cls, rows_u8, cols: int | None = None) -> "BitMatrix":
        rows_u8 = [np.asarray(r, dtype=np.uint8) & 1 for r in rows_u8]
        if cols is None:
            cols = len(rows_u8[0]) if rows_u8 else 0
        dense = np.zeros((len(rows_u8), cols), dtype=np.uint8)
        for i, r in enumerate(rows_u8):
            dense[i, : len(r)] = r
        return cls.from_dense(dense)

    # -- access ------------------------------------------------------------

    def to_dense(self) -> np.ndarray:
        out = np.zeros((self.rows, self.cols), dtype=np.uint8)
        for j in range(self.cols):
            w, bit = divmod(j, _W)
            out[:, j] = (self.words[:, w] >> np.uint64(bit)).astype(np.uint8) & 1
        return out

    def get(self, i: int, j: int) -> int:
        w, bit = divmod(j, _W)
        return int((self.words[i, w] >> np.uint64(bit)) & np.uint64(1))

    def row_dense(self, i: int) -> np.ndarray:
        out = np.zeros(self.cols, dtype=np.uint8)
        for j in range(self.cols):
            w, bit = divmod(j, _W)
            out[j] = (int(self.words[i, w]) >> bit) & 1
        return out

    def copy(self) -> "BitMatrix":
        return BitMatrix(self.rows, self.cols, self.words.copy())

    def transpose(self) -> "BitMatrix":
        return BitMatrix.from_dense(self.to_dense().T)

    def take_columns(self, idx) -> "BitMatrix":
        """New matrix made of the listed columns, in the listed order."""
        idx = list(idx)
        out = BitMatrix(self.rows, len(idx))
        for k, j in enumerate(idx):
            w, bit = divmod(int(j), _W)
            ow, obit = divmod(k, _W)
            col = (self.words[:, w] >> np.uint64(bit)) & np.uint64(1)
            out.words[:, ow] |= col << np.uint64(obit)
        return out

    def vstack(self, other: "BitMatrix") -> "BitMatrix":
        if self.cols != other.cols:
            raise ValueError("column mismatch")
        return BitMatrix(
            self.rows + other.rows, self.cols, np.vstack([self.words, other.words])
        )

    # -- arithmetic --------------------------------------------------------

    def mul_vec(self, v) -> np.ndarray:
        """Matrix x column-vector over GF(2): returns uint8 vector of length rows."""
        vp = pack_vector(v, self.cols)
        acc = np.bitwise_count(self.words & vp[None, :]).sum(axis=1)
        return (acc & 1).astype(np.uint8)

    def mul_mat_t(self, other: "BitMatrix") -> np.ndarray:
        """self @ other^T over GF(2), returned dense uint8 (rows x other.rows)."""
        if self.cols != other.cols:
            raise ValueError("column mismatch")
        acc = np.bitwise_count(self.words[:, None, :] & other.words[None, :, :]).sum(
            axis=2
        )
        return (acc & 1).astype(np.uint8)

    def is_zero(self) -> bool:
        return not self.words.any()


def pack_vector(v, cols: int) -> np.ndarray:
    v = np.asarray(v, dtype=np.uint8) & 1
    if v.shape[0] != cols:
        raise ValueError("length mismatch")
    nw = (cols + _W - 1) // _W if cols else 1
    out = np.zeros(nw, dtype=np.uint64)
    idx = np.nonzero(v)[0]
    for j in idx:
        w, bit = divmod(int(j), _W)
        out[w] |= np.uint64(1) << np.uint64(bit)
    return out


def unpack_vector(words: np.ndarray, cols: int) -> np.ndarray:
    out = np.zeros(cols, dtype=np.uint8)
    for j in range(cols):
        w, bit = divmod(j, _W)
        out[j] = (int(words[w]) >> bit) & 1
    return out


def _echelon(words: np.ndarray, rows: int, cols: int, reduced: bool) -> list[int]:
    """In-place row echelon over GF(2); returns pivot column indices."""
    pivots: list[int] = []
    r = 0
    for col in range(cols):
        if r == rows:
            break
        w, bit = divmod(col, _W)
        mask = np.uint64(1) << np.uint64(bit)
        nz = np.nonzero(words[r:, w] & mask)[0]
        if nz.size == 0:
            continue
        p = r + int(nz[0])
        if p != r:
            words[[r, p]] = words[[p, r]]
        below = np.nonzero(words[r + 1 :, w] & mask)[0]
        if below.size:
            words[r + 1 + below] ^= words[r]
        if reduced and r:
            above = np.nonzero(words[:r, w] & mask)[0]
            if above.size:
                words[above] ^= words[r]
        pivots.append(col)
        r += 1
    return pivots


def rank_gf2(m: BitMatrix) -> int:
    """GF(2) row rank; the input is not modified."""
    return len(_echelon(m.words.copy(), m.rows, m.cols, reduced=False))


def independent_columns(m: BitMatrix) -> list[int]:
    """Lexicographically-smallest independent column set (left-to-right pivots)."""
    return _echelon(m.words.copy(), m.rows, m.cols, reduced=False)


def solve_affine(dstar: BitMatrix, fixed_positions, fixed_values, rhs=None) -> np.ndarray:
    """Solve dstar @ w^T = rhs with w pinned at the fixed positions.

    The unconstrained positions must index GF(2)-independent columns spanning
    the column space of dstar, so the solution is unique.  Raises NoSolution
    on an inconsistent fixed pattern and NotUnique when the free columns are
    dependent.
    """
    n = dstar.cols
    fixed_positions = [int(i) for i in fixed_positions]
    fixed_values = np.asarray(fixed_values, dtype=np.uint8) & 1
    if len(fixed_positions) != len(fixed_values):
        raise ValueError("fixed positions/values length mismatch")
    fixed_set = set(fixed_positions)
    free = [j for j in range(n) if j not in fixed_set]

    w_fixed = np.zeros(n, dtype=np.uint8)
    for p, v in zip(fixed_positions, fixed_values):
        w_fixed[p] = v
    target = dstar.mul_vec(w_fixed)
    if rhs is not None:
        target = target ^ (np.asarray(rhs, dtype=np.uint8) & 1)

    # augmented system over the free columns
    sub = dstar.take_columns(free)
    aug = BitMatrix(dstar.rows, len(free) + 1)
    aug.words[:, : sub.words.shape[1]] = sub.words
    w, bit = divmod(len(free), _W)
    aug.words[:, w] |= target.astype(np.uint64) << np.uint64(bit)

    pivots = _echelon(aug.words, aug.rows, aug.cols, reduced=True)
    if pivots and pivots[-1] == len(free):
        raise NoSolution("fixed pattern is inconsistent")
    if len(pivots) < len(free):
        raise NotUnique("free columns are GF(2)-dependent")

    sol = np.zeros(n, dtype=np.uint8)
    sol[fixed_positions] = fixed_values
    for r, col in enumerate(pivots):
        wj, bj = divmod(len(free), _W)
        val = (int(aug.words[r, wj]) >> bj) & 1
        sol[free[col]] = val
    return sol


def solve_constrained(dstar: BitMatrix, fixed_positions, fixed_values) -> np.ndarray:
    """Homogeneous case of solve_affine: dstar @ w^T = 0 with pinned bits."""
    return solve_affine(dstar, fixed_positions, fixed_values, rhs=None)


class Circulant:
    """b x b binary circulant, stored as its first row only.

    Row i of the expansion is the first row cyclically right-shifted i places.
    """

    __slots__ = ("b", "first_row")

    def __init__(self, b: int, first_row):
        self.b = int(b)
        fr = np.asarray(first_row, dtype=np.uint8) & 1
        if fr.shape[0] != self.b:
            raise ValueError("first_row length must equal b")
        self.first_row = fr
        self.first_row.setflags(write=False)

    @classmethod
    def from_exponents(cls, b: int, exponents) -> "Circulant":
        fr = np.zeros(b, dtype=np.uint8)
        for a in exponents:
            fr[int(a) % b] ^= 1
        return cls(b, fr)

    @property
    def exponents(self) -> list[int]:
        return [int(j) for j in np.nonzero(self.first_row)[0]]

    @property
    def weight(self) -> int:
        return int(self.first_row.sum())

    def is_zero(self) -> bool:
        return not self.first_row.any()

    def expand(self) -> np.ndarray:
        out = np.zeros((self.b, self.b), dtype=np.uint8)
        for i in range(self.b):
            out[i] = np.roll(self.first_row, i)
        return out


def circulant_mul_vec(cblk: Circulant, v) -> np.ndarray:
    """Expanded-matrix x vector over GF(2), via cyclic correlation of the first row."""
    v = np.asarray(v, dtype=np.uint8) & 1
    if v.shape[0] != cblk.b:
        raise ValueError("vector length must equal block size")
    out = np.zeros(cblk.b, dtype=np.uint8)
    for a in cblk.exponents:
        out ^= np.roll(v, -a)
    return out


def vec_mul_circulant(v, cblk: Circulant) -> np.ndarray:
    """Row-vector x expanded-matrix over GF(2) (the encoder-side orientation)."""
    v = np.asarray(v, dtype=np.uint8) & 1
    if v.shape[0] != cblk.b:
        raise ValueError("vector length must equal block size")
    out = np.zeros(cblk.b, dtype=np.uint8)
    for a in cblk.exponents:
        out ^= np.roll(v, a)
    return out


class QCArray:
    """c x t grid of b x b circulants (quasi-cyclic parity-check layout)."""

    __slots__ = ("c", "t", "b", "blocks")

    def __init__(self, c: int, t: int, b: int, blocks):
        self.c = int(c)
        self.t = int(t)
        self.b = int(b)
        if len(blocks) != self.c or any(len(row) != self.t for row in blocks):
            raise ValueError("blocks must form a c x t grid")
        for row in blocks:
            for blk in row:
                if blk.b != self.b:
                    raise ValueError("inconsistent block size")
        self.blocks = tuple(tuple(row) for row in blocks)

    @property
    def shape(self) -> tuple[int, int]:
        return (self.c * self.b, self.t * self.b)

    def expand_dense(self) -> np.ndarray:
        out = np.zeros(self.shape, dtype=np.uint8)
        for i in range(self.c):
            for j in range(self.t):
                out[i * self.b : (i + 1) * self.b, j * self.b : (j + 1) * self.b] = (
                    self.blocks[i][j].expand()
                )
        return out

    def to_bitmatrix(self) -> BitMatrix:
        return BitMatrix.from_dense(self.expand_dense())

    def column_permuted(self, perm) -> "QCArray":
        """Reorder the columns of circulants: new block-col k = old block-col perm[k]."""
        perm = [int(p) for p in perm]
        if sorted(perm) != list(range(self.t)):
            raise ValueError("perm must be a permutation of block columns")
        blocks = [[self.blocks[i][p] for p in perm] for i in range(self.c)]
        return QCArray(self.c, self.t, self.b, blocks)

    def mul_vec(self, v) -> np.ndarray:
        """H x v^T over GF(2) computed blockwise through the circulant structure."""
        v = np.asarray(v, dtype=np.uint8) & 1
        if v.shape[0] != self.t * self.b:
            raise ValueError("length mismatch")
        out = np.zeros(self.c * self.b, dtype=np.uint8)
        for i in range(self.c):
            seg = out[i * self.b : (i + 1) * self.b]
            for j in range(self.t):
                blk = self.blocks[i][j]
                if blk.is_zero():
                    continue
                seg ^= circulant_mul_vec(blk, v[j * self.b : (j + 1) * self.b])
        return out
