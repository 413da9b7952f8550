"""QC-LDPC code model: girth-conditioned random generation and the quasi-cyclic
generator matrix in systematic (full-rank) or partial-circulant (rank-deficient)
form.

Generation draws circulant shift exponents from a seeded RNG, accepting a block
column only if the exponent-domain cycle conditions (no 4-cycles; for girth 8
also no 6-cycles) hold against the columns already placed.  The derivation side
finds the smallest set of l circulant columns whose subarray D* carries the full
rank r, permutes them to the right, and solves for the partial-circulant rows of
Q with the unit/zero pattern pinned on the dependent positions of D*.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from itertools import combinations
from math import comb

import numpy as np

from .binmat import (
    BitMatrix,
    Circulant,
    QCArray,
    _echelon,
    independent_columns,
    rank_gf2,
)

_EXHAUSTIVE_T = 12  # exhaustive column-subset search up to this many block cols


class GirthUnreachable(RuntimeError):
    """No girth-compliant exponent assignment found within the restart budget."""


@dataclass(frozen=True)
class QCCodeSpec:
    """Parameters of a random quasi-cyclic LDPC code."""

    c: int
    t: int
    b: int
    row_weight: int | tuple[int, ...] = 1
    target_girth: int = 6
    seed: int = 0
    mask: frozenset = frozenset()  # block positions (i, j) forced to zero

    def __post_init__(self):
        if not (1 <= self.c < self.t):
            raise ValueError("need 1 <= c < t")
        if self.b < 2:
            raise ValueError("need b >= 2")
        if self.target_girth not in (6, 8):
            raise ValueError("target_girth must be 6 or 8")
        object.__setattr__(self, "mask", frozenset(self.mask))

    def weights(self) -> tuple[int, ...]:
        w = self.row_weight
        if isinstance(w, int):
            w = (w,) * self.c
        w = tuple(int(x) for x in w)
        if len(w) != self.c or any(not (1 <= x <= self.b) for x in w):
            raise ValueError("row_weight must give one weight in [1, b] per block row")
        return w


# ---------------------------------------------------------------------------
# girth conditions in the exponent domain
# ---------------------------------------------------------------------------


class _CycleTables:
    """Incremental 4-/6-cycle bookkeeping for weight-1 (CPM) grids.

    pair[(i1, i2)] marks used shift differences a(i1,j) - a(i2,j) mod b;
    triple[(i0, i1, i2)] marks sums d_{i0,i1}(j0) + d_{i1,i2}(j1) over ordered
    pairs of distinct placed columns.
    """

    def __init__(self, c: int, b: int, girth: int):
        self.c = c
        self.b = b
        self.girth = girth
        self.pair = {
            (i1, i2): np.zeros(b, dtype=bool)
            for i1 in range(c)
            for i2 in range(i1 + 1, c)
        }
        self.triple = {}
        if girth >= 8:
            for i0 in range(c):
                for i1 in range(c):
                    for i2 in range(c):
                        if len({i0, i1, i2}) == 3:
                            self.triple[(i0, i1, i2)] = np.zeros(b, dtype=bool)
        self.cols: list[dict[int, int]] = []

    def ok(self, col: dict[int, int]) -> bool:
        b = self.b
        for (i1, i2), used in self.pair.items():
            if i1 in col and i2 in col:
                if used[(col[i1] - col[i2]) % b]:
                    return False
        if self.girth >= 8:
            for (i0, i1, i2), used in self.triple.items():
                if i2 in col and i0 in col:
                    need = (-(col[i2] - col[i0])) % b
                    if used[need]:
                        return False
        return True

    def add(self, col: dict[int, int]) -> None:
        b = self.b
        if self.girth >= 8:
            for (i0, i1, i2), used in self.triple.items():
                for prior in self.cols:
                    if i0 in prior and i1 in prior and i1 in col and i2 in col:
                        used[((prior[i0] - prior[i1]) + (col[i1] - col[i2])) % b] = True
                    if i0 in col and i1 in col and i1 in prior and i2 in prior:
                        used[((col[i0] - col[i1]) + (prior[i1] - prior[i2])) % b] = True
        for (i1, i2), used in self.pair.items():
            if i1 in col and i2 in col:
                used[(col[i1] - col[i2]) % b] = True
        self.cols.append(dict(col))


def _walks_ok_full(grid, b: int, girth: int) -> bool:
    """Direct non-backtracking closed-walk search (any weights, small grids).

    grid[i][j] is a list of shift exponents (empty for a zero block).
    """
    edges = [
        (i, j, a)
        for i, row in enumerate(grid)
        for j, exps in enumerate(row)
        for a in exps
    ]
    by_col: dict[int, list] = {}
    by_row: dict[int, list] = {}
    for e in edges:
        by_row.setdefault(e[0], []).append(e)
        by_col.setdefault(e[1], []).append(e)

    # length-4 walks
    for e1 in edges:
        i0, j0, a1 = e1
        for e2 in by_col.get(j0, ()):
            if e2 == e1:
                continue
            i1, _, a2 = e2
            for e3 in by_row.get(i1, ()):
                if e3 == e2:
                    continue
                _, j1, a3 = e3
                for e4 in by_col.get(j1, ()):
                    if e4 == e3 or e4 == e1 or e4[0] != i0:
                        continue
                    if (a1 - a2 + a3 - e4[2]) % b == 0:
                        return False
    if girth < 8:
        return True
    # length-6 walks
    for e1 in edges:
        i0, j0, a1 = e1
        for e2 in by_col.get(j0, ()):
            if e2 == e1:
                continue
            i1, _, a2 = e2
            for e3 in by_row.get(i1, ()):
                if e3 == e2:
                    continue
                _, j1, a3 = e3
                for e4 in by_col.get(j1, ()):
                    if e4 == e3:
                        continue
                    i2, _, a4 = e4
                    for e5 in by_row.get(i2, ()):
                        if e5 == e4:
                            continue
                        _, j2, a5 = e5
                        for e6 in by_col.get(j2, ()):
                            if e6 == e5 or e6 == e1 or e6[0] != i0:
                                continue
                            if (a1 - a2 + a3 - a4 + a5 - e6[2]) % b == 0:
                                return False
    return True


def generate_code(
    spec: QCCodeSpec, max_restarts: int = 10_000, col_tries: int = 400
) -> QCArray:
    """Draw a girth-conditioned random QC array; deterministic given the seed."""
    weights = spec.weights()
    c, t, b = spec.c, spec.t, spec.b
    rng = np.random.default_rng(spec.seed)
    fast = all(w == 1 for w in weights)

    for _ in range(max_restarts):
        if fast:
            tables = _CycleTables(c, b, spec.target_girth)
            cols: list[dict[int, int]] = []
            failed = False
            for j in range(t):
                placed = None
                for _ in range(col_tries):
                    col = {
                        i: int(rng.integers(b))
                        for i in range(c)
                        if (i, j) not in spec.mask
                    }
                    if tables.ok(col):
                        placed = col
                        break
                if placed is None:
                    failed = True
                    break
                tables.add(placed)
                cols.append(placed)
            if not failed:
                blocks = [
                    [
                        Circulant.from_exponents(b, [cols[j][i]] if i in cols[j] else [])
                        for j in range(t)
                    ]
                    for i in range(c)
                ]
                return QCArray(c, t, b, blocks)
        else:
            grid: list[list[list[int]]] = [[[] for _ in range(t)] for _ in range(c)]
            failed = False
            for j in range(t):
                placed = None
                for _ in range(col_tries):
                    cand = [
                        []
                        if (i, j) in spec.mask
                        else sorted(
                            int(x) for x in rng.choice(b, size=weights[i], replace=False)
                        )
                        for i in range(c)
                    ]
                    for i in range(c):
                        grid[i][j] = cand[i]
                    if _walks_ok_full(
                        [row[: j + 1] for row in grid], b, spec.target_girth
                    ):
                        placed = cand
                        break
                if placed is None:
                    for i in range(c):
                        grid[i][j] = []
                    failed = True
                    break
            if not failed:
                blocks = [
                    [Circulant.from_exponents(b, grid[i][j]) for j in range(t)]
                    for i in range(c)
                ]
                return QCArray(c, t, b, blocks)
    raise GirthUnreachable(
        f"no girth-{spec.target_girth} assignment for {spec} within {max_restarts} restarts"
    )


# ---------------------------------------------------------------------------
# generator derivation
# ---------------------------------------------------------------------------


@dataclass
class QCGenerator:
    """Generator data for the code of a (possibly rank-deficient) QC array.

    The code matrix stacks a systematic part G (identity blocks plus parity
    circulants spanning the last l block columns) over the partial-circulant
    part Q whose block row i holds d_i blockwise cyclic shifts of q_first[i].
    """

    form: str  # "systematic_qc" | "partial_qc"
    c: int
    t: int
    b: int
    l: int
    r: int
    perm: list[int]  # H* block col k = H block col perm[k]
    g_parity: list[np.ndarray]  # per info block: parity first-row (length l*b)
    q_first: list[np.ndarray | None]  # per D* block row: w_i (length l*b), None if d_i=0
    d: list[int]

    @property
    def n(self) -> int:
        return self.t * self.b

    @property
    def num_rows(self) -> int:
        return self.n - self.r

    def dense_rows(self) -> np.ndarray:
        """Materialise the (tb - r) x tb code generator (test/desk scale only)."""
        t, l, b = self.t, self.l, self.b
        rows = np.zeros((self.num_rows, self.n), dtype=np.uint8)
        k = 0
        for i in range(t - l):
            for s in range(b):
                rows[k, i * b + s] = 1
                for jj in range(l):
                    seg = self.g_parity[i][jj * b : (jj + 1) * b]
                    rows[k, (t - l + jj) * b : (t - l + jj + 1) * b] = np.roll(seg, s)
                k += 1
        for i in range(l):
            if self.q_first[i] is None:
                continue
            for s in range(self.d[i]):
                for jj in range(l):
                    seg = self.q_first[i][jj * b : (jj + 1) * b]
                    rows[k, (t - l + jj) * b : (t - l + jj + 1) * b] = np.roll(seg, s)
                k += 1
        return rows

    def code_matrix(self) -> BitMatrix:
        return BitMatrix.from_dense(self.dense_rows())


def _subarray_rank(hbm: BitMatrix, block_cols, b: int) -> int:
    cols = [j * b + x for j in block_cols for x in range(b)]
    return rank_gf2(hbm.take_columns(cols))


def _choose_columns(h: QCArray, hbm: BitMatrix, r: int) -> tuple[int, tuple[int, ...]]:
    """Smallest l and the block-column subset whose subarray reaches rank r."""
    c, t, b = h.c, h.t, h.b
    exhaustive = t <= _EXHAUSTIVE_T
    if not exhaustive:
        gains = []
        for j in range(t):
            gains.append((-_subarray_rank(hbm, [j], b), j))
        order = [j for _, j in sorted(gains)]
    for l in range(c, t + 1):
        if exhaustive:
            for cand in combinations(range(t), l):
                if _subarray_rank(hbm, cand, b) == r:
                    return l, cand
        else:
            cand = tuple(sorted(order[:l]))
            if _subarray_rank(hbm, cand, b) == r:
                return l, cand
    # l = t always succeeds since rank(H) = r
    return t, tuple(range(t))


def _suffix_split(hstar_bm: BitMatrix, t: int, l: int, b: int, r: int) -> list[int]:
    """Per-block counts of dependent columns d_i of D*, via greedy suffix growth.

    Columns are scanned block by block, right-to-left inside each block; the
    greedy independent set is provably a suffix of every block (the circulant
    column spaces are shift-invariant), which the assertions double-check.
    """
    order = [
        (t - l + jj) * b + x for jj in range(l) for x in range(b - 1, -1, -1)
    ]
    sub = hstar_bm.take_columns(order)
    pivots = independent_columns(sub)
    if len(pivots) != r:
        raise AssertionError("greedy suffix selection missed the full rank")
    d = []
    for jj in range(l):
        seg = [p - jj * b for p in pivots if jj * b <= p < (jj + 1) * b]
        dbar = len(seg)
        if seg != list(range(dbar)):
            raise AssertionError("independent columns are not a block suffix")
        d.append(b - dbar)
    return d


def _solve_block(
    dstar: BitMatrix, free_local: list[int], rhs_list: list[np.ndarray]
) -> list[np.ndarray]:
    """Solve dstar_free @ w_free = rhs for many rhs with one elimination."""
    nfree = len(free_local)
    sub = dstar.take_columns(free_local)
    aug = BitMatrix(dstar.rows, nfree + len(rhs_list))
    aug.words[:, : sub.words.shape[1]] = sub.words
    for m, rhs in enumerate(rhs_list):
        col = nfree + m
        w, bit = divmod(col, 64)
        aug.words[:, w] |= (rhs.astype(np.uint64) & np.uint64(1)) << np.uint64(bit)
    pivots = _echelon(aug.words, aug.rows, aug.cols, reduced=True)
    if pivots[:nfree] != list(range(nfree)) or len(pivots) != nfree:
        raise AssertionError("free columns of D* are not independent / system inconsistent")
    sols = []
    for m in range(len(rhs_list)):
        col = nfree + m
        w, bit = divmod(col, 64)
        vals = (aug.words[:nfree, w] >> np.uint64(bit)).astype(np.uint8) & 1
        sols.append(vals)
    return sols


def derive_generator(h: QCArray) -> QCGenerator:
    """Generator of the code of h, in systematic or partial-circulant QC form."""
    c, t, b = h.c, h.t, h.b
    hbm = h.to_bitmatrix()
    r = rank_gf2(hbm)
    l, chosen = _choose_columns(h, hbm, r)
    perm = [j for j in range(t) if j not in chosen] + list(chosen)
    hstar = h.column_permuted(perm)
    hstar_bm = hstar.to_bitmatrix()

    d = _suffix_split(hstar_bm, t, l, b, r)
    free_local = [jj * b + x for jj in range(l) for x in range(d[jj], b)]
    dstar = hstar_bm.take_columns(range((t - l) * b, t * b))

    # right-hand sides: one per info block (parity solves), one per Q block row
    hstar_dense_cols = []
    rhs_list: list[np.ndarray] = []
    for i in range(t - l):
        col = i * b
        w, bit = divmod(col, 64)
        rhs_list.append(
            ((hstar_bm.words[:, w] >> np.uint64(bit)) & np.uint64(1)).astype(np.uint8)
        )
    q_rhs_index: dict[int, int] = {}
    for i in range(l):
        if d[i] == 0:
            continue
        col = i * b
        w, bit = divmod(col, 64)
        q_rhs_index[i] = len(rhs_list)
        rhs_list.append(
            ((dstar.words[:, w] >> np.uint64(bit)) & np.uint64(1)).astype(np.uint8)
        )

    sols = _solve_block(dstar, free_local, rhs_list) if rhs_list else []

    def spread(free_vals: np.ndarray) -> np.ndarray:
        out = np.zeros(l * b, dtype=np.uint8)
        out[free_local] = free_vals
        return out

    g_parity = [spread(sols[i]) for i in range(t - l)]
    q_first: list[np.ndarray | None] = []
    for i in range(l):
        if d[i] == 0:
            q_first.append(None)
            continue
        w_i = spread(sols[q_rhs_index[i]])
        w_i[i * b] ^= 1  # the unit of the pinned pattern
        q_first.append(w_i)

    form = "systematic_qc" if (r == c * b and l == c) else "partial_qc"
    return QCGenerator(
        form=form,
        c=c,
        t=t,
        b=b,
        l=l,
        r=r,
        perm=perm,
        g_parity=g_parity,
        q_first=q_first,
        d=d,
    )


def dependent_positions(gen: QCGenerator) -> list[int]:
    """Positions i_k of the GF(2)-dependent columns of the code generator.

    Closed form: the last (b - d_j) positions of each of the last l block
    columns.  These are exactly the columns where the lattice generator places
    its 2-rows.
    """
    t, l, b = gen.t, gen.l, gen.b
    return [
        (t - l + jj) * b + x for jj in range(l) for x in range(gen.d[jj], b)
    ]


# ---------------------------------------------------------------------------
# code file format
# ---------------------------------------------------------------------------


def dump_code(qc: QCArray, comments: list[str] | None = None) -> str:
    """Text form: header `b c t`, then c*t exponent lines (`-` = zero block)."""
    lines = [f"# {c}" for c in (comments or [])]
    lines.append(f"{qc.b} {qc.c} {qc.t}")
    for i in range(qc.c):
        for j in range(qc.t):
            exps = qc.blocks[i][j].exponents
            lines.append(" ".join(str(a) for a in exps) if exps else "-")
    return "\n".join(lines) + "\n"


def parse_code(text: str) -> QCArray:
    rows = [ln.strip() for ln in text.splitlines()]
    rows = [ln for ln in rows if ln and not ln.startswith("#")]
    if not rows:
        raise ValueError("empty code file")
    try:
        b, c, t = (int(x) for x in rows[0].split())
    except Exception as e:
        raise ValueError(f"malformed header line {rows[0]!r}") from e
    body = rows[1:]
    if len(body) != c * t:
        raise ValueError(f"expected {c * t} block lines, found {len(body)}")
    blocks = []
    k = 0
    for i in range(c):
        row = []
        for j in range(t):
            ln = body[k]
            k += 1
            if ln == "-":
                row.append(Circulant.from_exponents(b, []))
            else:
                exps = [int(x) for x in ln.split()]
                if any(not (0 <= a < b) for a in exps):
                    raise ValueError(f"exponent out of range in line {ln!r}")
                if len(set(exps)) != len(exps):
                    raise ValueError(f"repeated exponent in line {ln!r}")
                row.append(Circulant.from_exponents(b, exps))
        blocks.append(row)
    return QCArray(c, t, b, blocks)


def write_code_file(qc: QCArray, path, comments: list[str] | None = None) -> None:
    with open(path, "w") as f:
        f.write(dump_code(qc, comments))


def read_code_file(path) -> QCArray:
    with open(path) as f:
        return parse_code(f.read())
