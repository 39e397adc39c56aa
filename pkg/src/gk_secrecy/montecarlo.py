"""Monte-Carlo SOP estimation straight from the outage event.

The sample index space is cut into fixed blocks of ``BLOCK_SIZE`` draws.
Block ``b`` owns a Philox stream keyed by ``(seed, b)``, so its draws do
not depend on which worker runs it, and block results are reduced in
index order. The estimate is therefore bit-identical for any worker count.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from .errors import DomainError
from .gk_model import GkParams
from .sop_engine import SecrecyScenario

BLOCK_SIZE = 1 << 18
MIN_SAMPLES = 10_000


@dataclass(frozen=True)
class McConfig:
    samples: int = 10_000_000
    seed: int = 42
    workers: int = 1

    def __post_init__(self):
        if int(self.samples) != self.samples or self.samples < MIN_SAMPLES:
            raise DomainError(f"samples must be an integer >= {MIN_SAMPLES}, got {self.samples!r}")
        if int(self.seed) != self.seed or not 0 <= self.seed < 2**64:
            raise DomainError(f"seed must be a 64-bit unsigned integer, got {self.seed!r}")
        if int(self.workers) != self.workers or self.workers < 1:
            raise DomainError(f"workers must be a positive integer, got {self.workers!r}")


@dataclass(frozen=True)
class McResult:
    estimate: float
    stderr: float
    samples: int
    seed: int
    mean_gamma_d: float
    mean_gamma_e: float


def make_stream(seed: int, block: int = 0) -> np.random.Generator:
    """Counter-based stream for one sample block."""
    return np.random.Generator(np.random.Philox(np.random.SeedSequence(seed, spawn_key=(block,))))


def sample_gamma_variate(shape: float, stream: np.random.Generator, size=None):
    """Gamma(shape, 1) variate(s); numpy uses Marsaglia-Tsang with the shape < 1 boost."""
    if not shape > 0:
        raise DomainError(f"shape must be > 0, got {shape!r}")
    return stream.standard_gamma(shape, size=size)


def sample_gk_snr(p: GkParams, stream: np.random.Generator, size=None):
    """GK SNR draw(s): ``mean * X * Y / (k m)``."""
    shape = p._gamma_limit_shape()
    if shape is not None:
        # X / k -> 1 in the no-shadowing limit
        return p.mean_snr * sample_gamma_variate(shape, stream, size) / shape
    x = sample_gamma_variate(p.k, stream, size)
    y = sample_gamma_variate(p.m, stream, size)
    return p.mean_snr * x * y / (p.k * p.m)


def outage_event(gamma_d, gamma_e, lam: float):
    """Indicator of ``(1 + g_d) <= lam (1 + g_e)``, i.e. secrecy capacity at or below ``log2(lam)``."""
    return (1.0 + np.asarray(gamma_d)) <= lam * (1.0 + np.asarray(gamma_e))


def _run_block(s: SecrecyScenario, seed: int, block: int, n: int) -> tuple[int, float, float]:
    stream = make_stream(seed, block)
    g_d = sample_gk_snr(s.main, stream, n)
    g_e = sample_gk_snr(s.eve, stream, n)
    hits = int(np.count_nonzero(outage_event(g_d, g_e, s.lam)))
    return hits, float(g_d.sum()), float(g_e.sum())


def sop_mc(s: SecrecyScenario, cfg: McConfig) -> McResult:
    n = int(cfg.samples)
    sizes = [BLOCK_SIZE] * (n // BLOCK_SIZE)
    if n % BLOCK_SIZE:
        sizes.append(n % BLOCK_SIZE)
    jobs = list(enumerate(sizes))
    if cfg.workers == 1:
        parts = [_run_block(s, cfg.seed, b, size) for b, size in jobs]
    else:
        with ThreadPoolExecutor(max_workers=cfg.workers) as pool:
            parts = list(pool.map(lambda job: _run_block(s, cfg.seed, *job), jobs))
    hits = sum(p[0] for p in parts)
    sum_d = math.fsum(p[1] for p in parts)
    sum_e = math.fsum(p[2] for p in parts)
    est = hits / n
    return McResult(
        estimate=est,
        stderr=math.sqrt(est * (1.0 - est) / n),
        samples=n,
        seed=int(cfg.seed),
        mean_gamma_d=sum_d / n,
        mean_gamma_e=sum_e / n,
    )
