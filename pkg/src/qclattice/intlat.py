"""Exact integer-matrix utilities and closest-vector solvers.

Hermite normal form and determinants are exact: the fast path runs vectorized
int64 row operations with an overflow guard and falls back to arbitrary
precision Python integers when entries grow.  CVP offers Schnorr-Euchner
enumeration over an LLL-reduced basis (exact, dimension-limited) and the Babai
nearest-plane approximation; both run on the compiled kernel when available.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field

import numpy as np

from ._backend import kernels

log = logging.getLogger(__name__)

_INT64_GUARD = np.int64(1) << np.int64(52)
ENUM_DIM_LIMIT = 64
LLL_DELTA = 0.99
_TIE_EPS = 1e-9


class RankDeficient(ValueError):
    """Rows are linearly dependent over the rationals."""


class DimensionLimit(ValueError):
    """Exact enumeration requested above the configured dimension limit."""


class IntMatrix:
    """Exact signed-integer matrix (thin wrapper over an int64/object ndarray)."""

    __slots__ = ("rows", "cols", "entries")

    def __init__(self, entries):
        a = np.asarray(entries)
        if a.ndim != 2:
            raise ValueError("expected a 2-D array")
        if a.dtype == object:
            self.entries = a.copy()
        else:
            self.entries = a.astype(np.int64)
        self.rows, self.cols = self.entries.shape

    @classmethod
    def identity(cls, n: int) -> "IntMatrix":
        return cls(np.eye(n, dtype=np.int64))

    def to_array(self) -> np.ndarray:
        return self.entries.copy()

    def __eq__(self, other) -> bool:
        if not isinstance(other, IntMatrix):
            return NotImplemented
        return self.entries.shape == other.entries.shape and bool(
            (self.entries == other.entries).all()
        )

    def __hash__(self):  # immutable by convention
        return hash((self.rows, self.cols, self.entries.tobytes() if self.entries.dtype != object else str(self.entries)))

    def __repr__(self):
        return f"IntMatrix({self.rows}x{self.cols})"


def _as_matrix(m) -> np.ndarray:
    if isinstance(m, IntMatrix):
        return m.entries
    return np.asarray(m)


def _hnf_rows(a: np.ndarray) -> np.ndarray:
    """Row-style HNF of the row span; zero rows are dropped.

    int64 fast path with an overflow guard; redone with Python ints if any
    intermediate grows past the guard.
    """
    work = a.astype(np.int64, copy=True) if a.dtype != object else a.copy()
    try:
        return _hnf_core(work, guard=work.dtype != object)
    except OverflowError:
        work = np.array([[int(x) for x in row] for row in a], dtype=object)
        return _hnf_core(work, guard=False)


def _hnf_core(w: np.ndarray, guard: bool) -> np.ndarray:
    rows, cols = w.shape
    r = 0
    for col in range(cols):
        if r == rows:
            break
        # Euclidean passes: shrink the column below r to a single nonzero
        while True:
            nz = [i for i in range(r, rows) if w[i, col] != 0]
            if not nz:
                break
            piv = min(nz, key=lambda i: (abs(int(w[i, col])), i))
            if piv != r:
                w[[r, piv]] = w[[piv, r]]
            p = int(w[r, col])
            done = True
            for i in range(r + 1, rows):
                v = int(w[i, col])
                if v == 0:
                    continue
                q = v // p
                w[i] = w[i] - q * w[r]
                if w[i, col] != 0:
                    done = False
            if guard and np.abs(w).max() > _INT64_GUARD:
                raise OverflowError
            if done:
                break
        if w[r, col] == 0:
            continue
        if int(w[r, col]) < 0:
            w[r] = -w[r]
        p = int(w[r, col])
        for i in range(r):
            q = int(w[i, col]) // p  # floor keeps entries above in [0, p)
            if q:
                w[i] = w[i] - q * w[r]
        if guard and np.abs(w).max() > _INT64_GUARD:
            raise OverflowError
        r += 1
    return w[:r]


def hnf(m) -> IntMatrix:
    """Unique row-style Hermite normal form of a full-row-rank matrix."""
    a = _as_matrix(m)
    h = _hnf_rows(a)
    if h.shape[0] < a.shape[0]:
        raise RankDeficient("rows are dependent over the rationals")
    return IntMatrix(h)


def lattice_hnf(m) -> IntMatrix:
    """HNF basis of the integer row span; accepts generating sets with dependent rows."""
    return IntMatrix(_hnf_rows(_as_matrix(m)))


def int_rank(m) -> int:
    """Rank over the rationals (row count of the span HNF)."""
    return _hnf_rows(_as_matrix(m)).shape[0]


def det_abs(m) -> int:
    """Exact |det| of a square integer matrix.

    Bareiss fraction-free elimination for small matrices; for larger ones the
    HNF diagonal product (equal up to sign) avoids big-integer blowup.
    """
    a = _as_matrix(m)
    if a.shape[0] != a.shape[1]:
        raise ValueError("matrix must be square")
    n = a.shape[0]
    if n == 0:
        return 1
    if n > 80:
        h = _hnf_rows(a)
        if h.shape[0] < n:
            return 0
        prod = 1
        for i in range(n):
            prod *= int(h[i, i])
        return abs(prod)
    return abs(det_bareiss(a))


def det_bareiss(m) -> int:
    """Signed determinant by Bareiss fraction-free elimination (exact)."""
    a = _as_matrix(m)
    n = a.shape[0]
    w = [[int(x) for x in row] for row in a]
    sign = 1
    prev = 1
    for k in range(n - 1):
        if w[k][k] == 0:
            piv = next((i for i in range(k + 1, n) if w[i][k] != 0), None)
            if piv is None:
                return 0
            w[k], w[piv] = w[piv], w[k]
            sign = -sign
        for i in range(k + 1, n):
            for j in range(k + 1, n):
                w[i][j] = (w[i][j] * w[k][k] - w[i][k] * w[k][j]) // prev
            w[i][k] = 0
        prev = w[k][k]
    return sign * w[n - 1][n - 1]


# ---------------------------------------------------------------------------
# lattice reduction and CVP
# ---------------------------------------------------------------------------


def _gso(basis: np.ndarray):
    """Gram-Schmidt data: mu (unit lower-triangular coefficients) and ||b*_i||^2."""
    b = basis.astype(np.float64)
    n = b.shape[0]
    bstar = np.zeros_like(b)
    mu = np.zeros((n, n))
    norms = np.zeros(n)
    for i in range(n):
        if i:
            mu[i, :i] = (bstar[:i] @ b[i]) / norms[:i]
            v = b[i] - mu[i, :i] @ bstar[:i]
        else:
            v = b[i].copy()
        bstar[i] = v
        mu[i, i] = 1.0
        norms[i] = float(v @ v)
        if norms[i] <= 0:
            raise RankDeficient("basis rows are dependent")
    return mu, norms, bstar


def lll_reduce(basis, delta: float = LLL_DELTA):
    """LLL on integer basis rows; returns (reduced int64 basis, unimodular U).

    U satisfies reduced = U @ basis.  Size reductions update mu incrementally;
    swaps trigger a Gram-Schmidt refresh.  A swap budget guards against float
    jitter in the Lovasz test; hitting it still returns a valid basis, since
    reduction quality only affects enumeration speed, never correctness.
    """
    b = np.asarray(basis, dtype=np.int64).copy()
    n = b.shape[0]
    u = np.eye(n, dtype=np.int64)
    mu, norms, _ = _gso(b)
    k = 1
    swaps = 0
    max_swaps = 200 * n * n
    while k < n:
        for j in range(k - 1, -1, -1):
            q = int(np.floor(mu[k, j] + 0.5))
            if q:
                b[k] -= q * b[j]
                u[k] -= q * u[j]
                mu[k, : j + 1] -= q * mu[j, : j + 1]
        if norms[k] >= (delta - mu[k, k - 1] ** 2) * norms[k - 1] * (1.0 - 1e-12):
            k += 1
        else:
            swaps += 1
            if swaps > max_swaps:
                log.warning("LLL swap budget exhausted; returning current basis")
                break
            b[[k, k - 1]] = b[[k - 1, k]]
            u[[k, k - 1]] = u[[k - 1, k]]
            mu, norms, _ = _gso(b)
            k = max(k - 1, 1)
    return b, u


@dataclass
class CvpQuery:
    """A closest-vector query against the row lattice of `basis`."""

    basis: np.ndarray
    target: np.ndarray
    method: str = "exact"  # "exact" | "nearest_plane"
    enum_limit: int = ENUM_DIM_LIMIT

    def __post_init__(self):
        self.basis = np.asarray(self.basis, dtype=np.int64)
        self.target = np.asarray(self.target, dtype=np.float64)
        if self.basis.ndim != 2 or self.basis.shape[0] != self.basis.shape[1]:
            raise ValueError("basis must be square (full-rank rows)")
        if self.target.shape[0] != self.basis.shape[0]:
            raise ValueError("target length must match basis dimension")
        if self.method not in ("exact", "nearest_plane"):
            raise ValueError(f"unknown method {self.method!r}")


class CvpSolver:
    """Reusable CVP context: LLL reduction and GSO are done once per basis."""

    def __init__(self, basis, enum_limit: int = ENUM_DIM_LIMIT):
        self.basis = np.asarray(basis, dtype=np.int64)
        self.n = self.basis.shape[0]
        self.enum_limit = enum_limit
        self.reduced, self.u = lll_reduce(self.basis)
        self.mu, self.norms, self.bstar = _gso(self.reduced)
        self._binv = np.linalg.inv(self.reduced.astype(np.float64))
        self._bstar_scaled = self.bstar / self.norms[:, None]

    def _tau(self, target):
        return np.asarray(target, dtype=np.float64) @ self._bstar_scaled.T

    def nearest_plane(self, target) -> np.ndarray:
        z_red = kernels.babai_nearest(self.mu, self.norms, self._tau(target))
        return np.asarray(z_red, dtype=np.int64) @ self.u

    def exact(self, target) -> np.ndarray:
        if self.n > self.enum_limit:
            raise DimensionLimit(
                f"exact enumeration limited to {self.enum_limit} dims (got {self.n})"
            )
        z_red, dist, ties = kernels.cvp_enumerate(self.mu, self.norms, self._tau(target), _TIE_EPS)
        cands = [np.asarray(t, dtype=np.int64) @ self.u for t in ties]
        if not cands:
            cands = [np.asarray(z_red, dtype=np.int64) @ self.u]
        best = min(cands, key=lambda zz: tuple(zz))
        return best

    def solve(self, target, method: str = "exact") -> np.ndarray:
        if method == "exact":
            return self.exact(target)
        return self.nearest_plane(target)


def closest_point(q: CvpQuery) -> np.ndarray:
    """Coefficients z minimising ||target - z @ basis||, per the query method.

    Exact enumeration breaks distance ties toward the lexicographically
    smallest coefficient vector.
    """
    solver = CvpSolver(q.basis, enum_limit=q.enum_limit)
    return solver.solve(q.target, q.method)
