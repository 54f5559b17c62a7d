"""Expurgated pulse-position modulation built from cyclic symmetric designs."""

from .analysis import (
    SchemeSpec,
    ber_bound_mapped,
    ber_from_ser_equidistant,
    required_gamma,
    spectral_efficiency_frontier,
    union_bound_eppm,
    union_bound_generic,
    union_bound_mppm,
    union_bound_ppm,
)
from .channel import MonteCarloConfig, run_ber_point, run_ber_sweep
from .constellation import (
    Constellation,
    Scheme,
    build_aeppm,
    build_eppm,
    build_mppm,
    build_ook,
    build_ppm,
    distance_profile,
    map_bits,
    unmap_symbol,
)
from .designs import (
    BibdParams,
    DifferenceSet,
    brute_force_search,
    construct,
    expand_incidence,
    load_difference_set,
    qr_difference_set,
    twin_prime_difference_set,
    verify_difference_set,
)
from .transceiver import decision_statistics, demodulate, modulate

__version__ = "0.1.0"


def eppm_constellation(q: int, augmented: bool = False) -> Constellation:
    """EPPM (or AEPPM) codebook for the ``q = 2k+1`` design family."""
    ds = construct(q)
    inc = expand_incidence(ds)
    return build_aeppm(inc, ds.residues) if augmented else build_eppm(inc, ds.residues)
