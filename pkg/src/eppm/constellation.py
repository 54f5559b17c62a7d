"""
Codebooks for pulse-position schemes and their distance structure.

Every constellation is a binary matrix of ``m`` codewords over ``q`` slots.
Only the first ``2**bits_per_symbol`` symbols of the labelling carry data;
``mapped`` lists which codeword each bit label selects (natural binary
order). For AEPPM the mapped set is the first ``h`` rows followed by their
complements, so that the +/- receiver stays symmetric.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field
from fractions import Fraction
from itertools import combinations
from typing import Sequence, TextIO

import numpy as np

from .designs import IncidenceMatrix
from .errors import BadLength, InvalidParameters, ParseError, TooLarge

__all__ = [
    "Scheme",
    "Constellation",
    "DistanceProfile",
    "MPPM_SIZE_CAP",
    "build_ppm",
    "build_mppm",
    "build_eppm",
    "build_aeppm",
    "build_ook",
    "from_codewords",
    "mapped_subset",
    "map_bits",
    "unmap_symbol",
    "distance_profile",
    "equidistance_gap",
    "write_constellation",
    "read_constellation",
]

MPPM_SIZE_CAP = 2**20


class Scheme(str, enum.Enum):
    PPM = "PPM"
    MPPM = "MPPM"
    EPPM = "EPPM"
    AEPPM = "AEPPM"
    OOK = "OOK"
    CUSTOM = "CUSTOM"

    def __str__(self):
        return self.value


@dataclass(frozen=True, eq=False)
class Constellation:
    """An ordered binary codebook plus its bit labelling.

    Attributes
    ----------
    scheme : Scheme
    q : int
        Slots per symbol.
    k : int
        Codeword weight (AEPPM complements have weight ``q - k``).
    lam : int or None
        Pairwise correlation of the underlying design (PPM: 0).
    codewords : ndarray, shape (m, q), uint8
    mapped : ndarray of int
        ``mapped[label]`` is the codeword index sent for bit label ``label``.
    residues : tuple of int or None
        Generator of a cyclic codebook; enables the shift-register receiver.
    """

    scheme: Scheme
    q: int
    k: int
    lam: int | None
    codewords: np.ndarray = field(repr=False)
    mapped: np.ndarray = field(repr=False)
    residues: tuple[int, ...] | None = field(default=None, repr=False)

    def __post_init__(self):
        cw = np.ascontiguousarray(self.codewords, dtype=np.uint8)
        cw.flags.writeable = False
        mp = np.asarray(self.mapped, dtype=np.int64)
        mp.flags.writeable = False
        object.__setattr__(self, "codewords", cw)
        object.__setattr__(self, "mapped", mp)
        if cw.ndim != 2 or cw.shape[1] != self.q:
            raise InvalidParameters(f"codewords must have shape (m, {self.q})")
        n = len(mp)
        if n < 2 or n & (n - 1):
            raise InvalidParameters("mapped symbol count must be a power of two >= 2")
        if mp.min() < 0 or mp.max() >= cw.shape[0] or len(set(mp.tolist())) != n:
            raise InvalidParameters("mapped indices must be distinct codeword indices")

    @property
    def m(self) -> int:
        return self.codewords.shape[0]

    @property
    def m_mapped(self) -> int:
        return len(self.mapped)

    @property
    def bits_per_symbol(self) -> int:
        return len(self.mapped).bit_length() - 1

    @property
    def eta(self) -> float:
        """Modulation efficiency in bits per slot."""
        return self.bits_per_symbol / self.q

    @property
    def gamma_weight(self) -> float:
        """Differential weight lam/(k - lam) of the cyclic receiver."""
        if self.lam is None:
            return 0.0
        return self.lam / (self.k - self.lam)

    @property
    def weights(self) -> np.ndarray:
        return self.codewords.sum(axis=1, dtype=np.int64)

    def label_of(self, index):
        """Inverse of ``mapped``: bit label of each codeword index (-1 if unused)."""
        inv = np.full(self.m, -1, dtype=np.int64)
        inv[self.mapped] = np.arange(self.m_mapped)
        return inv[index]

    def __repr__(self):
        lam = "-" if self.lam is None else self.lam
        return (f"Constellation({self.scheme}, q={self.q}, k={self.k}, "
                f"lambda={lam}, m={self.m}, mapped={self.m_mapped})")


def _natural(m: int) -> np.ndarray:
    return np.arange(1 << (m.bit_length() - 1))


def build_ppm(q: int) -> Constellation:
    if q < 2:
        raise InvalidParameters("PPM needs q >= 2")
    return Constellation(Scheme.PPM, q, 1, 0, np.eye(q, dtype=np.uint8),
                         _natural(q), residues=(0,))


def build_mppm(q: int, k: int, cap: int = MPPM_SIZE_CAP) -> Constellation:
    """All weight-``k`` words of length ``q`` in lexicographic order.

    Lexicographic on the 0/1 strings, so ``110...`` comes first.
    """
    if not 1 <= k < q:
        raise InvalidParameters(f"MPPM needs 1 <= k < q, got q={q}, k={k}")
    m = math.comb(q, k)
    if m > cap:
        raise TooLarge(f"C({q},{k}) = {m} exceeds the cap of {cap} codewords")
    cw = np.zeros((m, q), dtype=np.uint8)
    for i, pos in enumerate(combinations(range(q), k)):
        cw[i, list(pos)] = 1
    return Constellation(Scheme.MPPM, q, k, None, cw, _natural(m))


def build_eppm(matrix: IncidenceMatrix, residues: Sequence[int] | None = None) -> Constellation:
    p = matrix.params
    if residues is None:
        residues = tuple(np.flatnonzero(matrix.rows[0]).tolist())
    scheme = Scheme.EPPM
    return Constellation(scheme, p.q, p.k, p.lam, matrix.rows, _natural(p.q),
                         residues=tuple(residues))


def build_aeppm(matrix: IncidenceMatrix, residues: Sequence[int] | None = None) -> Constellation:
    """EPPM rows followed by their complements (``2q`` codewords)."""
    p = matrix.params
    if residues is None:
        residues = tuple(np.flatnonzero(matrix.rows[0]).tolist())
    rows = np.asarray(matrix.rows, dtype=np.uint8)
    cw = np.vstack([rows, 1 - rows])
    half = 1 << ((2 * p.q).bit_length() - 2)
    mapped = np.concatenate([np.arange(half), p.q + np.arange(half)])
    return Constellation(Scheme.AEPPM, p.q, p.k, p.lam, cw, mapped,
                         residues=tuple(residues))


def build_ook() -> Constellation:
    return Constellation(Scheme.OOK, 1, 1, None, np.array([[0], [1]]), np.arange(2))


def from_codewords(codewords, mapped=None) -> Constellation:
    """Arbitrary binary codebook, decoded by minimum Euclidean distance."""
    cw = np.asarray(codewords, dtype=np.uint8)
    if cw.ndim != 2 or cw.shape[0] < 2:
        raise InvalidParameters("need at least two codewords")
    if np.any(cw > 1):
        raise InvalidParameters("codewords must be binary")
    if mapped is None:
        mapped = _natural(cw.shape[0])
    w = cw.sum(axis=1)
    return Constellation(Scheme.CUSTOM, cw.shape[1], int(w.max()), None, cw, mapped)


def mapped_subset(c: Constellation) -> Constellation:
    """The codebook restricted to the symbols that carry data."""
    return Constellation(Scheme.CUSTOM, c.q, c.k, c.lam, c.codewords[c.mapped],
                         np.arange(c.m_mapped))


def map_bits(bits, c: Constellation) -> int:
    """Codeword index for a bit string (MSB first, natural binary)."""
    if isinstance(bits, str):
        bits = [int(b) for b in bits]
    bits = list(bits)
    if len(bits) != c.bits_per_symbol:
        raise BadLength(f"expected {c.bits_per_symbol} bits, got {len(bits)}")
    label = 0
    for b in bits:
        if b not in (0, 1):
            raise BadLength(f"not a bit: {b!r}")
        label = (label << 1) | b
    return int(c.mapped[label])


def unmap_symbol(index: int, c: Constellation) -> str:
    """Bit string carried by a mapped codeword index."""
    label = int(c.label_of(index))
    if label < 0:
        raise InvalidParameters(f"codeword {index} carries no bit label")
    return format(label, f"0{c.bits_per_symbol}b")


@dataclass(frozen=True)
class DistanceProfile:
    pair_sum: int
    mean_distance: Fraction
    spectrum: dict[int, int]
    a_total: int
    column_weights: tuple[int, ...]

    def cauchy_bound(self, m: int) -> Fraction:
        """Upper bound 2A(m - A/q) on ``pair_sum``."""
        a = self.a_total
        return 2 * a * (m - Fraction(a, len(self.column_weights)))


def _pairwise_spectrum(cw: np.ndarray, chunk: int = 2048) -> dict[int, int]:
    x = cw.astype(np.int32)
    w = x.sum(axis=1)
    q = cw.shape[1]
    counts = np.zeros(q + 1, dtype=np.int64)
    for s in range(0, len(x), chunk):
        blk = x[s:s + chunk]
        d = w[s:s + chunk, None] + w[None, :] - 2 * (blk @ x.T)
        counts += np.bincount(d.ravel(), minlength=q + 1)
    counts[0] -= len(x)
    return {int(d): int(n) for d, n in enumerate(counts) if n}


def _mppm_spectrum(q: int, k: int) -> dict[int, int]:
    m = math.comb(q, k)
    return {2 * j: m * math.comb(k, j) * math.comb(q - k, j)
            for j in range(1, min(k, q - k) + 1)}


def distance_profile(c: Constellation) -> DistanceProfile:
    """Exact distance structure over all ``m`` codewords.

    ``pair_sum`` counts ordered pairs, so it is twice the unordered sum.
    """
    if c.scheme is Scheme.MPPM:
        spectrum = _mppm_spectrum(c.q, c.k)
    else:
        spectrum = _pairwise_spectrum(c.codewords)
    pair_sum = sum(d * n for d, n in spectrum.items())
    cols = c.codewords.sum(axis=0, dtype=np.int64)
    a = int(cols.sum())
    identity = 2 * (c.m * a - int((cols * cols).sum()))
    if pair_sum != identity:
        raise AssertionError(f"distance-sum identity violated: {pair_sum} != {identity}")
    return DistanceProfile(
        pair_sum=pair_sum,
        mean_distance=Fraction(pair_sum, c.m * (c.m - 1)),
        spectrum=dict(sorted(spectrum.items())),
        a_total=a,
        column_weights=tuple(int(v) for v in cols),
    )


def equidistance_gap(q: int) -> tuple[Fraction, int, Fraction]:
    """Best mean distance versus best integer common distance for odd ``q``.

    Returns ``(d_max, d_int, d_max - d_int)`` with ``d_max = q^2/(2(q-1))``
    and ``d_int = (q+1)/2``; the gap is exactly ``1/(2(q-1))``.
    """
    if q < 3 or q % 2 == 0:
        raise InvalidParameters("q must be odd and >= 3")
    d_max = Fraction(q * q, 2 * (q - 1))
    d_int = (q + 1) // 2
    return d_max, d_int, d_max - d_int


def write_constellation(c: Constellation, stream: TextIO) -> None:
    lam = "-" if c.lam is None else c.lam
    stream.write(f"{c.scheme} {c.q} {c.k} {lam} {c.m}\n")
    for row in c.codewords:
        stream.write("".join("1" if b else "0" for b in row) + "\n")


def read_constellation(stream: TextIO) -> tuple[str, int, int, int | None, np.ndarray]:
    """Parse the export format back into ``(scheme, q, k, lam, codewords)``."""
    lines = [ln.strip() for ln in stream if ln.strip() and not ln.startswith("#")]
    if not lines:
        raise ParseError("empty constellation stream")
    head = lines[0].split()
    if len(head) != 5:
        raise ParseError("header must be 'SCHEME Q K LAMBDA M'")
    try:
        scheme = head[0]
        q, k, m = int(head[1]), int(head[2]), int(head[4])
        lam = None if head[3] == "-" else int(head[3])
    except ValueError as exc:
        raise ParseError(str(exc)) from None
    rows = lines[1:]
    if len(rows) != m or any(len(r) != q or set(r) - {"0", "1"} for r in rows):
        raise ParseError(f"expected {m} rows of {q} binary characters")
    cw = np.array([[int(ch) for ch in r] for r in rows], dtype=np.uint8)
    return scheme, q, k, lam, cw
