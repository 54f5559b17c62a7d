"""
Slot-level modulation and the cyclic differential correlation receiver.

For a cyclic codebook the receiver never stores the codebook: it correlates
the received frame against the q cyclic shifts of the generator and forms

    Z_j = <x, c_j> - Gamma * <x, not c_j>,   Gamma = lam / (k - lam).

With noiseless ``x = c_l`` this gives ``Z_l = k`` and ``Z_j = 0`` elsewhere.
Since ``Z_j = (1 + Gamma) <x, c_j> - Gamma * sum(x)``, its argmax equals the
plain-correlation argmax.

Batch functions take frames of shape ``(n, q)``; the single-frame functions
are thin wrappers kept for readability in tests and examples.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .constellation import Constellation, Scheme
from .errors import IndexOutOfRange, SchemeMismatch

__all__ = [
    "SlotFrame",
    "DecisionStatistics",
    "modulate",
    "modulate_batch",
    "cyclic_correlation",
    "decision_statistics",
    "decision_statistics_batch",
    "demodulate",
    "demodulate_batch",
]


@dataclass(frozen=True)
class SlotFrame:
    amplitudes: np.ndarray = field(repr=False)
    a_pulse: float = 1.0

    @property
    def q(self) -> int:
        return self.amplitudes.shape[-1]


@dataclass(frozen=True)
class DecisionStatistics:
    """Receiver outputs for one frame.

    ``z`` holds ``Z_1..Z_q``; ``decision_set`` appends ``-Z_1..-Z_q`` for
    AEPPM.
    """

    z: np.ndarray
    gamma_weight: float
    augmented: bool = False

    @property
    def decision_set(self) -> np.ndarray:
        if self.augmented:
            return np.concatenate([self.z, -self.z])
        return self.z


def modulate_batch(indices, c: Constellation, a_pulse: float = 1.0) -> np.ndarray:
    idx = np.asarray(indices)
    if idx.size and (idx.min() < 0 or idx.max() >= c.m):
        raise IndexOutOfRange(f"symbol index out of range [0, {c.m})")
    return c.codewords[idx].astype(np.float64) * a_pulse


def modulate(symbol_index: int, c: Constellation, a_pulse: float = 1.0) -> SlotFrame:
    if not 0 <= symbol_index < c.m:
        raise IndexOutOfRange(f"symbol index {symbol_index} out of range [0, {c.m})")
    return SlotFrame(modulate_batch(symbol_index, c, a_pulse), a_pulse)


def _frames(x) -> np.ndarray:
    if isinstance(x, SlotFrame):
        x = x.amplitudes
    return np.asarray(x, dtype=np.float64)


def cyclic_correlation(x, residues, q: int) -> np.ndarray:
    """``<x, c_j>`` for every cyclic shift ``j`` of the generator.

    Emulates the shift register: the stored frame is read at offsets
    ``r + j`` for each generator element ``r``. Works on ``(..., q)``.
    """
    x = _frames(x)
    taps = (np.asarray(residues)[:, None] + np.arange(q)[None, :]) % q
    return x[..., taps].sum(axis=-2)


def decision_statistics_batch(x, c: Constellation) -> np.ndarray:
    if c.residues is None or c.scheme not in (Scheme.PPM, Scheme.EPPM, Scheme.AEPPM):
        raise SchemeMismatch(f"no cyclic receiver for {c.scheme}")
    x = _frames(x)
    corr = cyclic_correlation(x, c.residues, c.q)
    g = c.gamma_weight
    if g == 0.0:
        return corr
    total = x.sum(axis=-1, keepdims=True)
    return corr - g * (total - corr)


def decision_statistics(x, c: Constellation) -> DecisionStatistics:
    z = decision_statistics_batch(x, c)
    return DecisionStatistics(z, c.gamma_weight, augmented=c.scheme is Scheme.AEPPM)


def demodulate_batch(x, c: Constellation) -> np.ndarray:
    """Decide the codeword index for each frame among the mapped symbols.

    Ties go to the lowest mapped label.
    """
    x = _frames(x)
    if x.ndim == 1:
        x = x[None, :]
    if c.scheme in (Scheme.PPM, Scheme.EPPM):
        z = decision_statistics_batch(x, c)
        winners = np.argmax(z[:, c.mapped], axis=1)
    elif c.scheme is Scheme.AEPPM:
        z = decision_statistics_batch(x, c)
        # mapped indices >= q are complements, scored by -Z
        cols = c.mapped % c.q
        sign = np.where(c.mapped < c.q, 1.0, -1.0)
        winners = np.argmax(z[:, cols] * sign, axis=1)
    elif c.scheme is Scheme.MPPM:
        corr = x @ c.codewords[c.mapped].T.astype(np.float64)
        winners = np.argmax(corr, axis=1)
    else:
        # OOK and custom codebooks: minimum Euclidean distance
        cw = c.codewords[c.mapped].astype(np.float64)
        metric = x @ cw.T - 0.5 * (cw * cw).sum(axis=1)
        winners = np.argmax(metric, axis=1)
    return c.mapped[winners]


def demodulate(x, c: Constellation) -> int:
    return int(demodulate_batch(x, c)[0])
