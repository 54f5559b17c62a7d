"""
Union bounds, BER relations, required-SNR solving and the spectral
efficiency frontier.

All bounds take the linear average SNR ``gamma`` and use the modulation
efficiency ``eta = log2(M_mapped) / q``. Every pairwise term is
``0.5 * erfc(sqrt(d * gamma * eta / 2))`` for Hamming distance ``d``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Iterable, Sequence

import numpy as np
from scipy.special import erfc

from .constellation import Constellation, Scheme, distance_profile
from .errors import InvalidParameters, NotBracketed

__all__ = [
    "pair_error",
    "union_bound_from_spectrum",
    "union_bound_generic",
    "union_bound_ppm",
    "union_bound_mppm",
    "union_bound_mppm_high_snr",
    "union_bound_eppm",
    "union_bound_aeppm",
    "union_bound_ook",
    "ber_from_ser_equidistant",
    "ber_bound_mapped",
    "SchemeSpec",
    "BoundCurve",
    "bound_curve",
    "required_gamma",
    "FrontierPoint",
    "spectral_efficiency_frontier",
    "frontier_schemes",
    "FRONTIER_PPM_Q",
    "FRONTIER_EPPM_Q",
]

FRONTIER_PPM_Q = tuple(2**i for i in range(2, 9))
FRONTIER_EPPM_Q = (7, 11, 19, 35, 67, 131, 263)


def _mapped_count(m: int) -> int:
    return 1 << (m.bit_length() - 1)


def pair_error(d, gamma, eta):
    """Pairwise error term 0.5 erfc(sqrt(d gamma eta / 2))."""
    return 0.5 * erfc(np.sqrt(np.asarray(d) * gamma * eta / 2.0))


def union_bound_from_spectrum(spectrum: dict[int, int], m: int, gamma, eta: float):
    """(1/2M) sum_i sum_{j!=i} erfc(...) grouped by distance."""
    gamma = np.asarray(gamma, dtype=np.float64)
    total = np.zeros_like(gamma)
    for d, n in spectrum.items():
        total = total + n * pair_error(d, gamma, eta)
    return total / m


def union_bound_generic(c: Constellation, gamma):
    prof = distance_profile(c)
    return union_bound_from_spectrum(prof.spectrum, c.m, gamma, c.eta)


def union_bound_ppm(q: int, gamma, m: int | None = None):
    m = _mapped_count(q) if m is None else m
    eta = math.log2(m) / q
    return (q - 1) * pair_error(2, gamma, eta)


def union_bound_mppm(q: int, k: int, m_mapped: int, gamma):
    if not 1 <= k < q:
        raise InvalidParameters(f"need 1 <= k < q, got q={q}, k={k}")
    eta = math.log2(m_mapped) / q
    total = 0.0
    for j in range(1, min(k, q - k) + 1):
        total = total + math.comb(k, j) * math.comb(q - k, j) * pair_error(2 * j, gamma, eta)
    return total


def union_bound_mppm_high_snr(q: int, k: int, m_mapped: int, gamma):
    """Nearest-neighbour approximation k(q-k)/2 erfc(sqrt(gamma eta))."""
    eta = math.log2(m_mapped) / q
    return k * (q - k) * pair_error(2, gamma, eta)


def union_bound_eppm(q: int, k: int, lam: int, m_mapped: int, gamma):
    if lam * (q - 1) != k * (k - 1):
        raise InvalidParameters(f"({q},{k},{lam}) is not a symmetric design")
    eta = math.log2(m_mapped) / q
    return (q - 1) * pair_error(2 * (k - lam), gamma, eta)


def _aeppm_spectrum(q: int, k: int, lam: int) -> dict[int, int]:
    # per codeword: q-1 same-side words at 2(k-lam), its own complement at q,
    # q-1 opposite-side words at 2 lam + 1
    spec: dict[int, int] = {}
    for d, n in ((2 * (k - lam), q - 1), (q, 1), (2 * lam + 1, q - 1)):
        spec[d] = spec.get(d, 0) + 2 * q * n
    return spec


def union_bound_aeppm(q: int, k: int, lam: int, m_mapped: int, gamma):
    if lam * (q - 1) != k * (k - 1):
        raise InvalidParameters(f"({q},{k},{lam}) is not a symmetric design")
    eta = math.log2(m_mapped) / q
    return union_bound_from_spectrum(_aeppm_spectrum(q, k, lam), 2 * q, gamma, eta)


def union_bound_ook(gamma):
    return pair_error(1, gamma, 1.0)


def ber_from_ser_equidistant(ser, m: int):
    if m < 2:
        raise InvalidParameters("m must be >= 2")
    return np.asarray(ser) * m / (2.0 * (m - 1))


def ber_bound_mapped(c: Constellation, gamma, labels: Sequence[int] | None = None):
    """Bit error bound over the mapped symbols for a given labelling.

    ``labels[i]`` is the bit label of mapped symbol ``i`` (default: natural
    order). Returns ``(bound, best_case)`` where ``best_case`` is the union
    SER bound of the mapped set divided by ``log2 M``.
    """
    m = c.m_mapped
    b = c.bits_per_symbol
    labels = np.arange(m) if labels is None else np.asarray(labels)
    if sorted(labels.tolist()) != list(range(m)):
        raise InvalidParameters("labels must be a permutation of range(M)")
    cw = c.codewords[c.mapped].astype(np.int64)
    w = cw.sum(axis=1)
    dist = w[:, None] + w[None, :] - 2 * cw @ cw.T
    x = labels[:, None] ^ labels[None, :]
    bitdist = np.array([bin(v).count("1") for v in x.ravel()]).reshape(x.shape)
    gamma = np.asarray(gamma, dtype=np.float64)
    off = ~np.eye(m, dtype=bool)
    bound = np.zeros_like(gamma)
    ser = np.zeros_like(gamma)
    # group by (distance, bit distance) to keep it O(#distinct) in gamma
    keys, counts = np.unique(np.stack([dist[off], bitdist[off]]), axis=1, return_counts=True)
    for (d, nb), n in zip(keys.T, counts):
        term = pair_error(d, gamma, c.eta)
        bound = bound + n * term * nb / b
        ser = ser + n * term
    return bound / m, ser / m / b


@dataclass(frozen=True)
class SchemeSpec:
    """Scheme identity for analytic work; no codebook is built.

    BER conventions: PPM, EPPM and AEPPM use ``M/(2(M-1))`` times the SER
    bound (AEPPM as a worst case); MPPM uses the best case ``SER/log2 M``;
    OOK's BER equals its SER.
    """

    scheme: Scheme
    q: int
    k: int = 1
    lam: int | None = None
    m: int | None = None

    def __post_init__(self):
        object.__setattr__(self, "scheme", Scheme(self.scheme))
        if self.scheme is Scheme.PPM and self.lam is None:
            object.__setattr__(self, "lam", 0)
        if self.m is None:
            object.__setattr__(self, "m", _mapped_count(self.full_size))

    @property
    def full_size(self) -> int:
        s = self.scheme
        if s is Scheme.PPM or s is Scheme.EPPM:
            return self.q
        if s is Scheme.AEPPM:
            return 2 * self.q
        if s is Scheme.MPPM:
            return math.comb(self.q, self.k)
        if s is Scheme.OOK:
            return 2
        raise InvalidParameters(f"no analytic bound for {s}")

    @property
    def eta(self) -> float:
        return math.log2(self.m) / self.q

    @property
    def label(self) -> str:
        s = self.scheme
        if s is Scheme.PPM:
            return f"{self.m}-ary PPM (Q={self.q})"
        if s is Scheme.MPPM:
            return f"{self.m}-ary MPPM (Q={self.q}, K={self.k})"
        if s is Scheme.OOK:
            return "OOK"
        return f"{self.m}-ary {s} (Q={self.q}, K={self.k}, lambda={self.lam})"

    def ser_bound(self, gamma):
        s = self.scheme
        if s is Scheme.PPM:
            return union_bound_ppm(self.q, gamma, self.m)
        if s is Scheme.MPPM:
            return union_bound_mppm(self.q, self.k, self.m, gamma)
        if s is Scheme.EPPM:
            return union_bound_eppm(self.q, self.k, self.lam, self.m, gamma)
        if s is Scheme.AEPPM:
            return union_bound_aeppm(self.q, self.k, self.lam, self.m, gamma)
        return union_bound_ook(gamma)

    def ber_bound(self, gamma):
        ser = self.ser_bound(gamma)
        if self.scheme is Scheme.MPPM:
            return ser / math.log2(self.m)
        if self.scheme is Scheme.OOK:
            return ser
        return ber_from_ser_equidistant(ser, self.m)

    @classmethod
    def eppm_family(cls, q: int, m: int | None = None, augmented: bool = False):
        """The ``q = 2k+1, k = 2 lam + 1`` design for ``q = 3 mod 4``."""
        if q % 4 != 3:
            raise InvalidParameters(f"q={q} is not 3 mod 4")
        scheme = Scheme.AEPPM if augmented else Scheme.EPPM
        return cls(scheme, q, (q - 1) // 2, (q - 3) // 4, m)

    @classmethod
    def from_constellation(cls, c: Constellation) -> "SchemeSpec":
        return cls(c.scheme, c.q, c.k, c.lam, c.m_mapped)


@dataclass(frozen=True)
class BoundCurve:
    spec: SchemeSpec
    gamma_db: np.ndarray = field(repr=False)
    ser_bound: np.ndarray = field(repr=False)
    ber_bound: np.ndarray = field(repr=False)

    @property
    def points(self) -> list[tuple[float, float, float]]:
        return list(zip(self.gamma_db.tolist(), self.ser_bound.tolist(),
                        self.ber_bound.tolist()))


def bound_curve(spec: SchemeSpec, gamma_db: Iterable[float]) -> BoundCurve:
    g_db = np.asarray(list(gamma_db), dtype=np.float64)
    g = 10.0 ** (g_db / 10.0)
    ser = np.asarray(spec.ser_bound(g), dtype=np.float64)
    ber = np.asarray(spec.ber_bound(g), dtype=np.float64)
    return BoundCurve(spec, g_db, ser, ber)


def required_gamma(ber_of_gamma: Callable[[float], float] | SchemeSpec,
                   target_ber: float, lo_db: float = -30.0, hi_db: float = 80.0,
                   rel_tol: float = 1e-6) -> float:
    """SNR in dB at which a decreasing BER curve crosses ``target_ber``.

    Bisection on the dB axis until the bracket is narrower than ``rel_tol``
    in linear gamma.
    """
    if not 0 < target_ber < 0.5:
        raise InvalidParameters("target_ber must lie in (0, 0.5)")
    f = ber_of_gamma.ber_bound if isinstance(ber_of_gamma, SchemeSpec) else ber_of_gamma

    def excess(g_db):
        return float(f(10.0 ** (g_db / 10.0))) - target_ber

    if excess(lo_db) < 0 or excess(hi_db) > 0:
        raise NotBracketed(f"target {target_ber} not bracketed by [{lo_db}, {hi_db}] dB")
    tol_db = 10.0 * math.log10(1.0 + rel_tol)
    while hi_db - lo_db > tol_db:
        mid = 0.5 * (lo_db + hi_db)
        if excess(mid) > 0:
            lo_db = mid
        else:
            hi_db = mid
    return 0.5 * (lo_db + hi_db)


@dataclass(frozen=True)
class FrontierPoint:
    spec: SchemeSpec
    eta: float
    required_gamma_db: float


def spectral_efficiency_frontier(specs: Iterable[SchemeSpec],
                                 target_ber: float = 1e-5) -> list[FrontierPoint]:
    return [FrontierPoint(s, s.eta, required_gamma(s, target_ber)) for s in specs]


def frontier_schemes(mppm_q: Sequence[int] = (4, 8, 12, 16, 24, 32)) -> list[SchemeSpec]:
    """Scheme families plotted on the efficiency/SNR plane.

    PPM at ``Q = 2^i`` (i = 2..8), EPPM and AEPPM at Q = 7 ... 263, MPPM
    with ``K = Q/2`` at ``mppm_q`` and the single OOK point.
    """
    out = [SchemeSpec(Scheme.OOK, 1)]
    out += [SchemeSpec(Scheme.PPM, q) for q in FRONTIER_PPM_Q]
    out += [SchemeSpec.eppm_family(q) for q in FRONTIER_EPPM_Q]
    out += [SchemeSpec.eppm_family(q, augmented=True) for q in FRONTIER_EPPM_Q]
    out += [SchemeSpec(Scheme.MPPM, q, q // 2) for q in mppm_q]
    return out
