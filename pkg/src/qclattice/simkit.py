"""AWGN channel, symbol-error-rate experiment runner, and the uncoded-layer
error-floor formula.

Monte-Carlo trials are split into fixed-size batches, each with its own RNG
substream derived from (seed, vnr index, batch index), and accumulated in batch
order; results are therefore byte-identical for any worker count.
"""

from __future__ import annotations

import math
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from .decoder import DEFAULT_MAX_ITER, LatticeDecoder
from .encoder import encode
from .lattice import QCLattice, vnr_sigma


class ConfigInvalid(ValueError):
    """Experiment configuration violates its invariants."""


def awgn(x, sigma: float, rng: np.random.Generator) -> np.ndarray:
    """y = x + e with e ~ N(0, sigma^2 I); deterministic given the rng state."""
    if sigma <= 0:
        raise ValueError("sigma must be positive")
    x = np.asarray(x, dtype=np.float64)
    return x + rng.normal(0.0, sigma, size=x.shape)


def qfunc(x: float) -> float:
    return 0.5 * math.erfc(x / math.sqrt(2.0))


def error_floor(p: int, rho: float) -> float:
    """SER floor of the uncoded p Z layer at VNR = 0 dB: 2 Q(sqrt(pi e / 2 * p^(2 rho)))."""
    if not (0.0 < rho <= 1.0):
        raise ValueError("code rate must lie in (0, 1]")
    if p < 2:
        raise ValueError("alphabet size must be >= 2")
    return 2.0 * qfunc(math.sqrt(math.pi * math.e / 2.0 * float(p) ** (2.0 * rho)))


def wilson_interval(errors: int, trials: int, z: float = 1.959964) -> tuple[float, float]:
    if trials == 0:
        return (0.0, 1.0)
    phat = errors / trials
    z2 = z * z
    denom = 1.0 + z2 / trials
    center = (phat + z2 / (2 * trials)) / denom
    half = z * math.sqrt(phat * (1 - phat) / trials + z2 / (4 * trials * trials)) / denom
    return (max(0.0, center - half), min(1.0, center + half))


@dataclass
class ExperimentConfig:
    vnr_grid_db: tuple[float, ...]
    max_iter: int = DEFAULT_MAX_ITER
    min_errors: int = 100  # block errors per point before stopping
    max_symbols: int = 2_000_000
    seed: int = 0
    decoder: str = "spa"  # "spa" | "cs-spa" | "both"
    info_bound_L: int = 1  # u_i uniform over {-L .. L-1}
    blocks_per_batch: int = 16
    batches_per_round: int = 16  # stopping rule applies between rounds
    workers: int = 1

    def __post_init__(self):
        self.vnr_grid_db = tuple(float(v) for v in self.vnr_grid_db)
        if not self.vnr_grid_db:
            raise ConfigInvalid("VNR grid must be nonempty")
        if self.min_errors < 50:
            raise ConfigInvalid("min_errors must be >= 50 per reported point")
        if self.decoder not in ("spa", "cs-spa", "both"):
            raise ConfigInvalid(f"unknown decoder {self.decoder!r}")
        if self.max_iter < 1 or self.max_symbols < 1 or self.info_bound_L < 1:
            raise ConfigInvalid("max_iter, max_symbols and info_bound_L must be positive")


@dataclass
class SerPoint:
    vnr_db: float
    decoder: str
    symbols_sent: int
    symbol_errors: int
    block_errors: int
    blocks_sent: int
    seed: int

    @property
    def ser(self) -> float:
        return self.symbol_errors / self.symbols_sent if self.symbols_sent else 0.0

    @property
    def wilson(self) -> tuple[float, float]:
        return wilson_interval(self.symbol_errors, self.symbols_sent)


CSV_HEADER = "vnr_db,n,r,decoder,symbols,errors,ser,ci_low,ci_high,seed"


def csv_rows(points: list[SerPoint], lat: QCLattice) -> list[str]:
    rows = []
    for p in points:
        lo, hi = p.wilson
        rows.append(
            f"{p.vnr_db},{lat.n},{lat.r},{p.decoder},{p.symbols_sent},"
            f"{p.symbol_errors},{p.ser:.6g},{lo:.6g},{hi:.6g},{p.seed}"
        )
    return rows


_CTX: dict = {}


def _worker_init(lat: QCLattice, cfg: ExperimentConfig):
    _CTX["lat"] = lat
    _CTX["decoder"] = LatticeDecoder(lat, cfg.max_iter)
    _CTX["cfg"] = cfg


def _run_batch(args):
    vnr_idx, batch_idx, sigma, nblocks = args
    lat: QCLattice = _CTX["lat"]
    dec: LatticeDecoder = _CTX["decoder"]
    cfg: ExperimentConfig = _CTX["cfg"]
    rng = np.random.default_rng(
        np.random.SeedSequence(entropy=cfg.seed, spawn_key=(vnr_idx, batch_idx))
    )
    methods = ("spa", "cs-spa") if cfg.decoder == "both" else (cfg.decoder,)
    sym_err = {m: 0 for m in methods}
    blk_err = {m: 0 for m in methods}
    L = cfg.info_bound_L
    for _ in range(nblocks):
        u = rng.integers(-L, L, size=lat.n, dtype=np.int64)
        x = encode(lat, u)
        y = awgn(x, sigma, rng)
        for m in methods:
            res = dec.decode(y, sigma, m)
            errs = int(np.count_nonzero(res.x_hat != x))
            sym_err[m] += errs
            blk_err[m] += 1 if errs else 0
    return vnr_idx, batch_idx, sym_err, blk_err, nblocks * lat.n, nblocks


def run_ser(lat: QCLattice, cfg: ExperimentConfig) -> list[SerPoint]:
    """SER over the VNR grid; one SerPoint per (grid point, decoder)."""
    methods = ("spa", "cs-spa") if cfg.decoder == "both" else (cfg.decoder,)
    workers = max(1, cfg.workers)
    points: list[SerPoint] = []

    pool = None
    if workers > 1:
        pool = ProcessPoolExecutor(
            max_workers=workers, initializer=_worker_init, initargs=(lat, cfg)
        )
    else:
        _worker_init(lat, cfg)

    try:
        for vnr_idx, vnr_db in enumerate(cfg.vnr_grid_db):
            sigma = vnr_sigma(lat, vnr_db)
            sym_err = {m: 0 for m in methods}
            blk_err = {m: 0 for m in methods}
            symbols = 0
            blocks = 0
            batch_idx = 0
            while True:
                if all(blk_err[m] >= cfg.min_errors for m in methods):
                    break
                # plan one round; its composition never depends on worker count
                round_wave = []
                planned = 0
                room_blocks = (cfg.max_symbols - symbols) // lat.n
                for _ in range(cfg.batches_per_round):
                    nb = min(cfg.blocks_per_batch, room_blocks - planned)
                    if nb <= 0:
                        break
                    round_wave.append((vnr_idx, batch_idx, sigma, nb))
                    batch_idx += 1
                    planned += nb
                if not round_wave:
                    break
                if pool is not None:
                    results = list(pool.map(_run_batch, round_wave))
                else:
                    results = [_run_batch(w) for w in round_wave]
                results.sort(key=lambda r: r[1])
                for _vi, _bi, se, be, nsym, nblk in results:
                    for m in methods:
                        sym_err[m] += se[m]
                        blk_err[m] += be[m]
                    symbols += nsym
                    blocks += nblk
            for m in methods:
                points.append(
                    SerPoint(
                        vnr_db=vnr_db,
                        decoder=m,
                        symbols_sent=symbols,
                        symbol_errors=sym_err[m],
                        block_errors=blk_err[m],
                        blocks_sent=blocks,
                        seed=cfg.seed,
                    )
                )
    finally:
        if pool is not None:
            pool.shutdown()
    return points


def default_workers() -> int:
    try:
        return max(1, int(os.environ.get("QCLAT_WORKERS", "1")))
    except ValueError:
        return 1
