"""
AWGN channel and the Monte-Carlo BER/SER estimator.

SNR normalization: pulses have unit amplitude and every slot receives
independent Gaussian noise of variance ``1 / (4 * gamma * eta)``. Two
codewords at Hamming distance ``d`` are then confused with probability
``0.5 * erfc(sqrt(d * gamma * eta / 2))``, the per-pair term of the union
bound, so simulated and analytic curves share one gamma axis.

Trials are grouped in fixed-size blocks. Block ``b`` of sweep point ``p``
draws from a Philox stream keyed by ``(seed, p, b)``, so the result depends
only on the seed and never on how blocks are spread over workers. Blocks
are accumulated in order and the run stops after the first block at which
the stopping rule holds.
"""

from __future__ import annotations

import math
from concurrent.futures import Executor, ProcessPoolExecutor
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .constellation import Constellation
from .errors import InvalidParameters, NonPositive
from .transceiver import SlotFrame, demodulate_batch, modulate_batch

__all__ = [
    "ChannelParams",
    "MonteCarloConfig",
    "BerEstimate",
    "gamma_fso",
    "gamma_uwb",
    "noise_variance",
    "block_rng",
    "add_awgn",
    "simulate_block",
    "run_ber_point",
    "run_ber_sweep",
    "db_to_linear",
    "linear_to_db",
]

Z95 = 1.959963984540054


def db_to_linear(x_db):
    return 10.0 ** (np.asarray(x_db, dtype=np.float64) / 10.0)


def linear_to_db(x):
    return 10.0 * np.log10(x)


def _positive(**kw):
    for name, v in kw.items():
        if not v > 0:
            raise NonPositive(f"{name} must be positive, got {v}")


def gamma_fso(rho: float, p0: float, n0: float, rb: float) -> float:
    """Average SNR of an optical link: rho^2 P0^2 / (N0 Rb)."""
    _positive(rho=rho, p0=p0, n0=n0, rb=rb)
    return rho * rho * p0 * p0 / (n0 * rb)


def gamma_uwb(e_t: float, rb: float, delta_f: float, n0: float) -> float:
    """Average SNR of an impulse-radio link: E_T Rb / (2 df N0)."""
    _positive(e_t=e_t, rb=rb, delta_f=delta_f, n0=n0)
    return e_t * rb / (2.0 * delta_f * n0)


def noise_variance(gamma: float, eta: float) -> float:
    _positive(gamma=gamma, eta=eta)
    return 1.0 / (4.0 * gamma * eta)


@dataclass(frozen=True)
class ChannelParams:
    gamma: float
    eta: float

    def __post_init__(self):
        _positive(gamma=self.gamma, eta=self.eta)

    @property
    def sigma2(self) -> float:
        return noise_variance(self.gamma, self.eta)

    @classmethod
    def for_constellation(cls, c: Constellation, gamma: float) -> "ChannelParams":
        return cls(gamma, c.eta)


@dataclass(frozen=True)
class MonteCarloConfig:
    """Stopping rule and seeding for one simulation.

    The run stops at the first block boundary where ``target_errors`` bit
    errors have been seen and at least ``min_trials`` trials were run, or
    when ``max_trials`` is reached. When ``target_ber`` is set the minimum
    is raised to ``ceil(10 / target_ber)``.
    """

    seed: int = 1
    min_trials: int = 0
    max_trials: int = 10**6
    target_errors: int = 100
    target_ber: float | None = None
    block_size: int = 1 << 15

    def __post_init__(self):
        if self.min_trials > self.max_trials:
            raise InvalidParameters("min_trials must not exceed max_trials")
        if self.target_errors < 1:
            raise InvalidParameters("target_errors must be >= 1")
        if self.block_size < 1 or self.max_trials < 1:
            raise InvalidParameters("block_size and max_trials must be >= 1")
        if self.target_ber is not None and not 0 < self.target_ber < 1:
            raise InvalidParameters("target_ber must lie in (0, 1)")

    @property
    def required_trials(self) -> int:
        need = self.min_trials
        if self.target_ber is not None:
            need = max(need, math.ceil(10.0 / self.target_ber))
        return min(need, self.max_trials)


@dataclass(frozen=True)
class BerEstimate:
    trials: int
    bits_per_symbol: int
    bit_errors: int
    symbol_errors: int

    @property
    def ber(self) -> float:
        return self.bit_errors / (self.trials * self.bits_per_symbol) if self.trials else math.nan

    @property
    def ser(self) -> float:
        return self.symbol_errors / self.trials if self.trials else math.nan

    @property
    def ber_stderr(self) -> float:
        n = self.trials * self.bits_per_symbol
        p = self.ber
        return math.sqrt(p * (1.0 - p) / n) if n else math.nan

    @property
    def ser_stderr(self) -> float:
        p = self.ser
        return math.sqrt(p * (1.0 - p) / self.trials) if self.trials else math.nan

    @property
    def ci95_halfwidth(self) -> float:
        return Z95 * self.ber_stderr

    @property
    def ser_ci95_halfwidth(self) -> float:
        return Z95 * self.ser_stderr

    def __add__(self, other: "BerEstimate") -> "BerEstimate":
        return BerEstimate(self.trials + other.trials, self.bits_per_symbol,
                           self.bit_errors + other.bit_errors,
                           self.symbol_errors + other.symbol_errors)


def block_rng(seed: int, point: int, block: int) -> np.random.Generator:
    ss = np.random.SeedSequence(entropy=seed, spawn_key=(point, block))
    return np.random.Generator(np.random.Philox(ss))


def add_awgn(x, sigma2: float, rng: np.random.Generator):
    """Add i.i.d. N(0, sigma2) noise to every slot of ``x``."""
    _positive(sigma2=sigma2)
    if isinstance(x, SlotFrame):
        noisy = add_awgn(x.amplitudes, sigma2, rng)
        return SlotFrame(noisy, x.a_pulse)
    x = np.asarray(x, dtype=np.float64)
    return x + rng.normal(0.0, math.sqrt(sigma2), size=x.shape)


_POPCOUNT = np.array([bin(i).count("1") for i in range(256)], dtype=np.int64)


def _popcount(v: np.ndarray) -> np.ndarray:
    v = v.astype(np.uint64)
    out = np.zeros(v.shape, dtype=np.int64)
    while np.any(v):
        out += _POPCOUNT[(v & np.uint64(0xFF)).astype(np.int64)]
        v = v >> np.uint64(8)
    return out


def simulate_block(c: Constellation, sigma2: float, seed: int, point: int,
                   block: int, n: int) -> BerEstimate:
    """Run ``n`` trials drawn from the stream of ``(seed, point, block)``."""
    rng = block_rng(seed, point, block)
    labels = rng.integers(0, c.m_mapped, size=n)
    x = modulate_batch(c.mapped[labels], c)
    y = add_awgn(x, sigma2, rng)
    decided = c.label_of(demodulate_batch(y, c))
    wrong = decided != labels
    bit_errors = int(_popcount(labels[wrong] ^ decided[wrong]).sum())
    return BerEstimate(n, c.bits_per_symbol, bit_errors, int(wrong.sum()))


def _block_plan(cfg: MonteCarloConfig):
    b = 0
    while b * cfg.block_size < cfg.max_trials:
        yield b, min(cfg.block_size, cfg.max_trials - b * cfg.block_size)
        b += 1


def _done(est: BerEstimate, cfg: MonteCarloConfig) -> bool:
    return est.bit_errors >= cfg.target_errors and est.trials >= cfg.required_trials


def run_ber_point(c: Constellation, gamma: float, cfg: MonteCarloConfig,
                  point: int = 0, executor: Executor | None = None,
                  workers: int = 1) -> BerEstimate:
    """Estimate BER and SER of ``c`` at linear SNR ``gamma``."""
    sigma2 = ChannelParams(gamma, c.eta).sigma2
    total = BerEstimate(0, c.bits_per_symbol, 0, 0)
    plan = list(_block_plan(cfg))
    if executor is None or workers <= 1:
        for b, n in plan:
            total = total + simulate_block(c, sigma2, cfg.seed, point, b, n)
            if _done(total, cfg):
                break
        return total
    for start in range(0, len(plan), workers):
        wave = plan[start:start + workers]
        futures = [executor.submit(simulate_block, c, sigma2, cfg.seed, point, b, n)
                   for b, n in wave]
        for fut in futures:
            total = total + fut.result()
            if _done(total, cfg):
                for rest in futures:
                    rest.cancel()
                return total
    return total


def run_ber_sweep(c: Constellation, gamma_db: Sequence[float], cfg: MonteCarloConfig,
                  workers: int = 1) -> list[BerEstimate]:
    """One estimate per SNR point (in dB); point ``i`` uses stream index ``i``."""
    gamma_db = list(gamma_db)
    if not gamma_db:
        raise InvalidParameters("empty SNR list")
    gammas = [float(g) for g in db_to_linear(gamma_db)]
    if workers <= 1:
        return [run_ber_point(c, g, cfg, point=i) for i, g in enumerate(gammas)]
    with ProcessPoolExecutor(max_workers=workers) as ex:
        return [run_ber_point(c, g, cfg, point=i, executor=ex, workers=workers)
                for i, g in enumerate(gammas)]
