"""Nested-lattice (Voronoi) shaping: digit encoding into the fundamental
Voronoi region of the scaled coarse lattice, Monte-Carlo estimation of the
normalized second moment, and the n-sphere baselines for gain and loss.

Conventions follow the transmit scaling of the encoder: the coding lattice is
2*Lambda and the shaping lattice is its M-fold scaling, so the estimator
normalises by det(2*Lambda)^(2/n) * M^2.  A codebook holds M^n points, one per
digit vector in {0..M-1}^n.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass

import numpy as np

from .encoder import code_row_product
from .intlat import ENUM_DIM_LIMIT, CvpSolver
from .lattice import QCLattice

log = logging.getLogger(__name__)


def info_product(lat: QCLattice, u) -> np.ndarray:
    """u @ G_Lambda over the integers via the stored quasi-cyclic structure."""
    u = np.asarray(u, dtype=np.int64)
    k = lat.num_code_rows
    out = code_row_product(lat, u[:k])
    out[lat.dep_positions] += 2 * u[k:]
    return out


class VoronoiCode:
    """Voronoi codebook of a QC-LDPC lattice inside V(M * coding lattice)."""

    def __init__(
        self,
        fine: QCLattice,
        M: int,
        quantizer: str = "exact",
        enum_limit: int = ENUM_DIM_LIMIT,
    ):
        if M < 2:
            raise ValueError("M must be >= 2")
        self.fine = fine
        self.M = int(M)
        if quantizer == "exact" and fine.n > enum_limit:
            log.warning(
                "dimension %d above the exact-enumeration limit %d; "
                "falling back to the nearest-plane quantizer",
                fine.n,
                enum_limit,
            )
            quantizer = "nearest_plane"
        self.quantizer = quantizer
        self._g = fine.generator_matrix()
        self._coarse = self.M * self._g
        self._solver = CvpSolver(self._coarse, enum_limit=enum_limit)

    @property
    def n(self) -> int:
        return self.fine.n

    def codebook_size(self) -> int:
        return self.M**self.n

    def quantize(self, target) -> np.ndarray:
        """Closest point of the coarse lattice M*Lambda (as a vector)."""
        z = self._solver.solve(np.asarray(target, dtype=np.float64), self.quantizer)
        return z @ self._coarse

    def fold(self, v) -> np.ndarray:
        """v minus its coarse quantisation: the representative inside V(M*Lambda)."""
        return np.asarray(v, dtype=np.float64) - self.quantize(v)


def shape_encode(vc: VoronoiCode, digits):
    """Map a digit vector b in {0..M-1}^n to (x_b, transmitted 2 x_b - 1)."""
    digits = np.asarray(digits, dtype=np.int64)
    if digits.shape[0] != vc.n:
        raise ValueError("digit vector length must equal the dimension")
    if digits.min() < 0 or digits.max() >= vc.M:
        raise ValueError("digits must lie in {0..M-1}")
    p = info_product(vc.fine, digits)
    x_b = p - self_quantize_int(vc, p)
    return x_b, 2 * x_b - 1


def self_quantize_int(vc: VoronoiCode, p) -> np.ndarray:
    q = vc.quantize(np.asarray(p, dtype=np.float64))
    return np.rint(q).astype(np.int64)


@dataclass
class ShapingReport:
    n: int
    M: int
    samples: int
    G_est: float
    gain_db: float
    loss_db: float
    stderr_db: float
    seed: int

    def csv_row(self) -> str:
        return (
            f"{self.n},{self.M},{self.samples},{self.G_est:.8g},"
            f"{self.gain_db:.5f},{self.loss_db:.5f},{self.stderr_db:.5f},{self.seed}"
        )


CSV_HEADER = "n,M,samples,G_est,gain_db,loss_db,stderr,seed"


def estimate_G(
    vc: VoronoiCode, samples: int = 100_000, seed: int = 0, batch: int = 512
) -> ShapingReport:
    """Monte-Carlo normalized second moment of the shaping region.

    Samples are uniform over the fundamental Voronoi region, obtained by
    drawing uniformly in the fundamental parallelepiped of the coarse lattice
    and folding with the configured quantizer.
    """
    if samples < 1_000:
        raise ValueError("need at least 1e3 samples for a meaningful estimate")
    n, M, r = vc.n, vc.M, vc.fine.r
    basis = vc._coarse.astype(np.float64)
    # det(2 Lambda_c)^{2/n} * M^2 with det(2 Lambda_c) = 2^{n+r}
    norm = (2.0 ** ((n + r) * 2.0 / n)) * M * M

    total = 0.0
    total_sq = 0.0
    done = 0
    bi = 0
    while done < samples:
        k = min(batch, samples - done)
        rng = np.random.default_rng(
            np.random.SeedSequence(entropy=seed, spawn_key=(bi,))
        )
        frac = rng.random((k, n))
        pts = frac @ basis
        for row in pts:
            folded = vc.fold(row)
            # transmit-domain point is 2 * folded; statistic per paper formula
            val = 4.0 * float(folded @ folded) / (n * norm)
            total += val
            total_sq += val * val
        done += k
        bi += 1

    g_est = total / samples
    var = max(total_sq / samples - g_est * g_est, 0.0)
    stderr = math.sqrt(var / samples)
    gain_db = -10.0 * math.log10(12.0 * g_est)
    loss_db = 10.0 * math.log10(g_est / sphere_G(n))
    stderr_db = 10.0 / math.log(10.0) * (stderr / g_est) if g_est > 0 else float("nan")
    return ShapingReport(
        n=n,
        M=M,
        samples=samples,
        G_est=g_est,
        gain_db=gain_db,
        loss_db=loss_db,
        stderr_db=stderr_db,
        seed=seed,
    )


# ---------------------------------------------------------------------------
# sphere baselines
# ---------------------------------------------------------------------------


def sphere_params(n: int, r: float):
    """(volume, per-dimension power, normalized second moment) of an n-sphere."""
    if n % 2 or n <= 0:
        raise ValueError("n must be a positive even integer")
    if r <= 0:
        raise ValueError("radius must be positive")
    log_vol = (n / 2.0) * math.log(math.pi * r * r) - math.lgamma(n / 2.0 + 1.0)
    vol = math.exp(log_vol)
    power = r * r / (n + 2.0)
    return vol, power, sphere_G(n)


def sphere_G(n: int) -> float:
    """G of the n-sphere; radius-free: Gamma(n/2+1)^(2/n) / (pi (n+2))."""
    return math.exp((2.0 / n) * math.lgamma(n / 2.0 + 1.0)) / (math.pi * (n + 2.0))


def sphere_gain_db(n: int) -> float:
    return -10.0 * math.log10(12.0 * sphere_G(n))


def ultimate_gain_db() -> float:
    return 10.0 * math.log10(math.pi * math.e / 6.0)
