"""
Cyclic symmetric block designs used as EPPM codebooks.

A ``(q, k, lam)`` cyclic difference set is a k-subset of Z_q whose nonzero
differences cover every nonzero residue exactly ``lam`` times. Its q
translates are the blocks of a symmetric BIBD, and the block indicators are
the rows of the incidence matrix.

Three sources are supported:

* quadratic residues modulo a prime q = 3 (mod 4), giving
  ``(q, (q-1)/2, (q-3)/4)``;
* the twin-prime construction over Z_p x Z_(p+2), relabelled into
  Z_(p(p+2)) through the CRT;
* a deterministic backtracking search for small parameters.

Anything else can be loaded from the one-line text format
``Q K LAMBDA : r1 r2 ... rK``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Iterable, TextIO

import numpy as np

from .errors import (
    InvalidParameters,
    NotFound,
    NotPrime,
    NotTwinPrimes,
    ParseError,
    VerificationFailed,
    WrongResidueClass,
)

__all__ = [
    "BibdParams",
    "DifferenceSet",
    "IncidenceMatrix",
    "VerificationReport",
    "is_prime",
    "qr_difference_set",
    "twin_prime_difference_set",
    "brute_force_search",
    "verify_difference_set",
    "expand_incidence",
    "construct",
    "load_difference_set",
    "load_difference_sets",
    "format_difference_set",
    "DEFAULT_SEARCH_BUDGET",
]

DEFAULT_SEARCH_BUDGET = 10**8


def is_prime(n: int) -> bool:
    """Deterministic trial division."""
    if n < 2:
        return False
    if n < 4:
        return True
    if n % 2 == 0:
        return False
    for f in range(3, math.isqrt(n) + 1, 2):
        if n % f == 0:
            return False
    return True


@dataclass(frozen=True)
class BibdParams:
    """Parameters ``(q, k, lam)`` of a symmetric design.

    ``q`` is the code length (number of slots and of codewords), ``k`` the
    codeword weight and ``lam`` the pairwise block intersection.
    """

    q: int
    k: int
    lam: int

    def __post_init__(self):
        q, k, lam = self.q, self.k, self.lam
        if q < 3 or not 1 <= k < q or not 0 <= lam < k:
            raise InvalidParameters(
                f"need q >= 3, 1 <= k < q, 0 <= lambda < k; got ({q}, {k}, {lam})"
            )
        if lam * (q - 1) != k * (k - 1):
            raise InvalidParameters(
                f"lambda*(q-1) != k*(k-1) for ({q}, {k}, {lam}): "
                f"{lam * (q - 1)} != {k * (k - 1)}"
            )

    @property
    def distance(self) -> int:
        """Common Hamming distance between distinct blocks."""
        return 2 * (self.k - self.lam)

    def __str__(self):
        return f"({self.q},{self.k},{self.lam})"


@dataclass(frozen=True)
class DifferenceSet:
    params: BibdParams
    residues: tuple[int, ...]

    def __post_init__(self):
        res = tuple(sorted(int(r) for r in self.residues))
        object.__setattr__(self, "residues", res)
        q, k = self.params.q, self.params.k
        if len(res) != k:
            raise InvalidParameters(f"expected {k} residues, got {len(res)}")
        if len(set(res)) != k:
            raise InvalidParameters("residues must be distinct")
        if res and (res[0] < 0 or res[-1] >= q):
            raise InvalidParameters(f"residues must lie in [0, {q})")

    @property
    def q(self) -> int:
        return self.params.q

    @property
    def k(self) -> int:
        return self.params.k

    @property
    def lam(self) -> int:
        return self.params.lam

    def indicator(self) -> np.ndarray:
        row = np.zeros(self.q, dtype=np.uint8)
        row[list(self.residues)] = 1
        return row


@dataclass(frozen=True)
class VerificationReport:
    """Outcome of :func:`verify_difference_set`.

    ``counts[d]`` is the number of ordered pairs of distinct residues whose
    difference is ``d`` mod q (``counts[0]`` is always 0).
    """

    passed: bool
    counts: tuple[int, ...]
    identity_holds: bool
    failures: tuple[str, ...] = field(default=())

    def summary(self) -> str:
        status = "PASS" if self.passed else "FAIL"
        lines = [f"verification: {status}"]
        lines.extend(self.failures)
        return "\n".join(lines)


@dataclass(frozen=True)
class IncidenceMatrix:
    params: BibdParams
    rows: np.ndarray = field(repr=False)

    @property
    def q(self) -> int:
        return self.params.q


def _difference_counts(residues: Iterable[int], q: int) -> np.ndarray:
    r = np.asarray(list(residues), dtype=np.int64)
    diff = (r[:, None] - r[None, :]) % q
    counts = np.bincount(diff.ravel(), minlength=q)
    counts[0] -= len(r)  # drop the a - a pairs
    return counts


def verify_difference_set(ds: DifferenceSet) -> VerificationReport:
    q, k, lam = ds.q, ds.k, ds.lam
    counts = _difference_counts(ds.residues, q)
    identity = lam * (q - 1) == k * (k - 1)
    failures = []
    if not identity:
        failures.append(f"lambda*(q-1) = {lam * (q - 1)} != k*(k-1) = {k * (k - 1)}")
    bad = np.nonzero(counts[1:] != lam)[0] + 1
    for d in bad[:10]:
        failures.append(f"difference {d} occurs {counts[d]} times, expected {lam}")
    if len(bad) > 10:
        failures.append(f"... {len(bad) - 10} more residues with wrong counts")
    return VerificationReport(
        passed=identity and len(bad) == 0,
        counts=tuple(int(c) for c in counts),
        identity_holds=identity,
        failures=tuple(failures),
    )


def _checked(ds: DifferenceSet) -> DifferenceSet:
    report = verify_difference_set(ds)
    if not report.passed:
        raise VerificationFailed(f"{ds.params} set failed verification", report)
    return ds


def qr_difference_set(q: int) -> DifferenceSet:
    """Nonzero quadratic residues modulo a prime ``q = 3 (mod 4)``."""
    if not is_prime(q):
        raise NotPrime(f"{q} is not prime")
    if q % 4 != 3:
        raise WrongResidueClass(f"{q} mod 4 = {q % 4}, need 3")
    residues = {(x * x) % q for x in range(1, q)}
    params = BibdParams(q, (q - 1) // 2, (q - 3) // 4)
    return _checked(DifferenceSet(params, tuple(residues)))


def _legendre(x: int, p: int) -> int:
    x %= p
    if x == 0:
        return 0
    return 1 if pow(x, (p - 1) // 2, p) == 1 else -1


def twin_prime_difference_set(p: int) -> DifferenceSet:
    """Twin-prime difference set over Z_(p(p+2)).

    The pair ``(x, y)`` in Z_p x Z_(p+2) is kept when ``y = 0`` or when x and
    y are both nonzero with equal quadratic character; it is labelled by the
    unique ``z`` with ``z = x (mod p)`` and ``z = y (mod p+2)``.
    """
    if not (is_prime(p) and is_prime(p + 2)):
        raise NotTwinPrimes(f"{p} and {p + 2} are not both prime")
    r = p + 2
    q = p * r
    residues = []
    for z in range(q):
        x, y = z % p, z % r
        if y == 0:
            residues.append(z)
        elif x != 0 and _legendre(x, p) == _legendre(y, r):
            residues.append(z)
    params = BibdParams(q, (q - 1) // 2, (q - 3) // 4)
    return _checked(DifferenceSet(params, tuple(residues)))


def brute_force_search(
    params: BibdParams, budget: int = DEFAULT_SEARCH_BUDGET
) -> DifferenceSet:
    """Backtracking search for a difference set with the given parameters.

    The first element is fixed to 0 and candidates are tried in increasing
    order, so the result is the lexicographically smallest such set.
    ``budget`` bounds the number of candidate extensions examined.
    """
    q, k, lam = params.q, params.k, params.lam
    if k == 1:
        return _checked(DifferenceSet(params, (0,)))

    counts = [0] * q
    chosen = [0]
    spent = 0

    def extend(start: int) -> bool:
        nonlocal spent
        if len(chosen) == k:
            return True
        # leave room for the remaining elements
        last = q - (k - len(chosen)) + 1
        for c in range(start, last):
            spent += 1
            if spent > budget:
                raise NotFound(f"budget of {budget} candidates exhausted for {params}")
            touched = []
            ok = True
            for a in chosen:
                for d in ((c - a) % q, (a - c) % q):
                    counts[d] += 1
                    touched.append(d)
                    if counts[d] > lam:
                        ok = False
                if not ok:
                    break
            if ok:
                chosen.append(c)
                if extend(c + 1):
                    return True
                chosen.pop()
            for d in touched:
                counts[d] -= 1
        return False

    if not extend(1):
        raise NotFound(f"no cyclic difference set with parameters {params}")
    return _checked(DifferenceSet(params, tuple(chosen)))


def expand_incidence(ds: DifferenceSet) -> IncidenceMatrix:
    """Row ``j`` is the indicator of the block ``{r + j mod q}``."""
    q = ds.q
    res = np.asarray(ds.residues, dtype=np.int64)
    rows = np.zeros((q, q), dtype=np.uint8)
    shifts = np.arange(q)[:, None]
    rows[np.repeat(np.arange(q), len(res)), ((res[None, :] + shifts) % q).ravel()] = 1
    rows.flags.writeable = False
    return IncidenceMatrix(ds.params, rows)


def _twin_prime_factor(q: int) -> int | None:
    for p in range(3, math.isqrt(q) + 1, 2):
        if p * (p + 2) == q and is_prime(p) and is_prime(p + 2):
            return p
    return None


def construct(q: int, k: int | None = None, lam: int | None = None,
              budget: int = DEFAULT_SEARCH_BUDGET) -> DifferenceSet:
    """Pick a construction for ``q`` (and optionally ``k``, ``lam``).

    With only ``q`` given, the ``q = 2k+1, k = 2 lam + 1`` family is built
    from quadratic residues or twin primes. Explicit ``(k, lam)`` outside
    that family falls back to :func:`brute_force_search`.
    """
    family = k is None and lam is None
    if not family:
        if k is None or lam is None:
            raise InvalidParameters("give both k and lambda, or neither")
        params = BibdParams(q, k, lam)
        if (k, lam) != ((q - 1) // 2, (q - 3) // 4) or q % 4 != 3:
            return brute_force_search(params, budget)
    if is_prime(q) and q % 4 == 3:
        return qr_difference_set(q)
    p = _twin_prime_factor(q)
    if p is not None:
        return twin_prime_difference_set(p)
    if family:
        raise InvalidParameters(
            f"no construction for q={q}: need a prime q = 3 mod 4 or q = p(p+2)"
        )
    return brute_force_search(BibdParams(q, k, lam), budget)


def format_difference_set(ds: DifferenceSet) -> str:
    return f"{ds.q} {ds.k} {ds.lam} : " + " ".join(str(r) for r in ds.residues)


def _parse_line(line: str, lineno: int) -> DifferenceSet:
    head, sep, tail = line.partition(":")
    if not sep:
        raise ParseError(f"line {lineno}: missing ':' separator")
    try:
        q, k, lam = (int(t) for t in head.split())
        residues = tuple(int(t) for t in tail.split())
    except ValueError as exc:
        raise ParseError(f"line {lineno}: {exc}") from None
    try:
        ds = DifferenceSet(BibdParams(q, k, lam), residues)
    except InvalidParameters as exc:
        raise ParseError(f"line {lineno}: {exc}") from None
    report = verify_difference_set(ds)
    if not report.passed:
        raise VerificationFailed(f"line {lineno}: {ds.params} set failed verification", report)
    return ds


def load_difference_sets(stream: TextIO) -> list[DifferenceSet]:
    """Parse and verify every design in ``stream``."""
    out = []
    for lineno, raw in enumerate(stream, 1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        out.append(_parse_line(line, lineno))
    return out


def load_difference_set(stream: TextIO) -> DifferenceSet:
    """Parse the first design in ``stream``."""
    sets = load_difference_sets(stream)
    if not sets:
        raise ParseError("no difference set found in stream")
    return sets[0]
