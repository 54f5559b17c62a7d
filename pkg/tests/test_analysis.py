import math

import mpmath
import numpy as np
import pytest
from scipy.special import erfc

from eppm import eppm_constellation
from eppm.analysis import (
    FRONTIER_EPPM_Q,
    FRONTIER_PPM_Q,
    SchemeSpec,
    ber_bound_mapped,
    ber_from_ser_equidistant,
    bound_curve,
    frontier_schemes,
    required_gamma,
    spectral_efficiency_frontier,
    union_bound_aeppm,
    union_bound_eppm,
    union_bound_from_spectrum,
    union_bound_generic,
    union_bound_mppm,
    union_bound_mppm_high_snr,
    union_bound_ook,
    union_bound_ppm,
)
from eppm.constellation import (
    Scheme,
    build_mppm,
    build_ook,
    build_ppm,
    distance_profile,
    from_codewords,
    mapped_subset,
)
from eppm.errors import InvalidParameters, NotBracketed

GAMMAS = 10 ** (np.linspace(-2, 18, 21) / 10)


def erfc_series(x):
    """High-precision oracle: erfc via mpmath's own series at 50 digits."""
    with mpmath.workdps(50):
        return mpmath.erfc(mpmath.mpf(x))


def union_bound_pairs(c, gamma):
    """Plain O(M^2) evaluation of the union bound."""
    cw = c.codewords.astype(int)
    total = 0.0
    for i in range(c.m):
        for j in range(c.m):
            if i != j:
                d = int(np.abs(cw[i] - cw[j]).sum())
                total += math.erfc(math.sqrt(d * gamma * c.eta / 2))
    return total / (2 * c.m)


def test_erfc_accuracy():
    xs = np.linspace(0.0, 8.0, 20)
    for x in xs:
        ref = erfc_series(x)
        assert abs(erfc(x) - float(ref)) <= 1e-14 * float(ref)


class TestSpecialized:
    def test_ppm_value(self):
        c = build_ppm(8)
        gamma = 4.0 / c.eta
        expected = 3.5 * float(erfc_series(2.0))
        assert union_bound_ppm(8, gamma) == pytest.approx(expected, rel=1e-13)
        assert union_bound_ppm(8, gamma) == pytest.approx(1.637e-2, rel=1e-3)

    def test_ppm_boundary(self):
        assert union_bound_ppm(2, 0.0) == 0.5

    @pytest.mark.parametrize("q", [2, 4, 8, 16, 64])
    def test_ppm_vs_generic(self, q):
        c = build_ppm(q)
        assert np.allclose(union_bound_ppm(q, GAMMAS), union_bound_generic(c, GAMMAS),
                           rtol=1e-12, atol=0)

    @pytest.mark.parametrize("q,k", [(12, 2), (8, 4), (10, 3), (7, 1)])
    def test_mppm_vs_generic(self, q, k):
        c = build_mppm(q, k)
        assert np.allclose(union_bound_mppm(q, k, c.m_mapped, GAMMAS),
                           union_bound_generic(c, GAMMAS), rtol=1e-12, atol=0)

    def test_mppm_coefficients(self):
        g = 3.0
        eta = 6 / 12
        expected = 20 * 0.5 * erfc(math.sqrt(g * eta)) + 45 * 0.5 * erfc(math.sqrt(2 * g * eta))
        assert union_bound_mppm(12, 2, 64, g) == pytest.approx(expected, rel=1e-14)

    def test_mppm_k1_is_ppm(self):
        for q in (4, 8, 16):
            assert np.allclose(union_bound_mppm(q, 1, q, GAMMAS), union_bound_ppm(q, GAMMAS),
                               rtol=1e-14)

    def test_mppm_high_snr(self):
        eta = 0.5
        # gamma where the leading term k(q-k)/2 erfc(sqrt(gamma eta)) hits 1e-8 and 1e-6
        for level, tol in ((1e-8, 1e-3), (1e-6, 1e-2)):
            g = required_gamma(lambda x: union_bound_mppm_high_snr(12, 2, 64, x), level)
            g = 10 ** (g / 10)
            ratio = union_bound_mppm(12, 2, 64, g) / union_bound_mppm_high_snr(12, 2, 64, g)
            assert abs(ratio - 1) < tol
        assert eta == 6 / 12

    @pytest.mark.parametrize("q", [7, 11, 19])
    def test_eppm_vs_generic(self, q):
        c = eppm_constellation(q)
        assert np.allclose(union_bound_eppm(q, c.k, c.lam, c.m_mapped, GAMMAS),
                           union_bound_generic(c, GAMMAS), rtol=1e-12, atol=0)

    def test_eppm_q11_value(self):
        g = 5.0
        assert union_bound_eppm(11, 5, 2, 8, g) == pytest.approx(
            5 * erfc(math.sqrt(3 * g * 3 / 11)), rel=1e-14)

    def test_eppm_degenerate_is_ppm(self):
        assert np.array_equal(union_bound_eppm(8, 1, 0, 8, GAMMAS), union_bound_ppm(8, GAMMAS))

    def test_eppm_non_design(self):
        with pytest.raises(InvalidParameters):
            union_bound_eppm(8, 3, 1, 8, 1.0)

    @pytest.mark.parametrize("q", [7, 11, 19])
    def test_aeppm_vs_generic(self, q):
        c = eppm_constellation(q, augmented=True)
        assert np.allclose(union_bound_aeppm(q, c.k, c.lam, c.m_mapped, GAMMAS),
                           union_bound_generic(c, GAMMAS), rtol=1e-12, atol=0)

    def test_generic_vs_pair_loop(self):
        for c in (eppm_constellation(7, augmented=True), build_mppm(6, 3), build_ook(),
                  from_codewords([[1, 0, 1], [0, 1, 1], [1, 1, 0], [0, 0, 0]])):
            for g in (0.5, 3.0, 20.0):
                assert union_bound_generic(c, g) == pytest.approx(union_bound_pairs(c, g),
                                                                  rel=1e-12)

    def test_ook(self):
        assert union_bound_ook(2.0) == pytest.approx(0.5 * math.erfc(1.0))
        assert union_bound_generic(build_ook(), 2.0) == pytest.approx(union_bound_ook(2.0))


class TestBer:
    def test_factor(self):
        assert ber_from_ser_equidistant(0.3, 2) == 0.3
        assert ber_from_ser_equidistant(0.7, 8) == pytest.approx(0.4)
        assert ber_from_ser_equidistant(1.0, 10**9) == pytest.approx(0.5)
        with pytest.raises(InvalidParameters):
            ber_from_ser_equidistant(0.1, 1)

    def test_mapped_equidistant(self):
        c = eppm_constellation(7)
        for g in (0.5, 2.0, 10.0):
            bound, _ = ber_bound_mapped(c, g)
            ser = union_bound_generic(mapped_subset(c), g)
            assert bound == pytest.approx(ber_from_ser_equidistant(ser, c.m_mapped), rel=1e-12)

    def test_mapping_independent_when_equidistant(self):
        c = eppm_constellation(19)
        rng = np.random.default_rng(0)
        ref, _ = ber_bound_mapped(c, 4.0)
        for _ in range(5):
            perm = rng.permutation(c.m_mapped)
            assert ber_bound_mapped(c, 4.0, perm)[0] == pytest.approx(ref, rel=1e-12)

    def test_two_codewords(self):
        c = from_codewords([[1, 1, 0, 0], [0, 0, 1, 1]])
        bound, best = ber_bound_mapped(c, 3.0)
        assert bound == pytest.approx(0.5 * math.erfc(math.sqrt(4 * 3.0 * 0.25 / 2)))
        assert best == pytest.approx(bound)

    def test_mppm_best_case(self):
        c = build_mppm(12, 2)
        bound, best = ber_bound_mapped(c, 8.0)
        ser = union_bound_generic(mapped_subset(c), 8.0)
        assert best == pytest.approx(ser / 6)
        assert bound >= best

    def test_bad_labels(self):
        with pytest.raises(InvalidParameters):
            ber_bound_mapped(eppm_constellation(7), 1.0, [0, 0, 1, 2])

    def test_aeppm_worst_case_relation(self):
        s = SchemeSpec.eppm_family(11, augmented=True)
        assert s.m == 16
        assert s.ber_bound(10.0) == pytest.approx(s.ser_bound(10.0) * 16 / 30)


class TestCurves:
    @pytest.mark.parametrize("spec", [
        SchemeSpec(Scheme.PPM, 8), SchemeSpec(Scheme.MPPM, 12, 2, m=64),
        SchemeSpec.eppm_family(11), SchemeSpec.eppm_family(11, augmented=True),
        SchemeSpec(Scheme.OOK, 1),
    ])
    def test_decreasing(self, spec):
        curve = bound_curve(spec, np.arange(0.0, 14.0, 0.5))
        assert np.all(np.diff(curve.ser_bound) < 0)
        assert np.all(np.diff(curve.ber_bound) < 0)
        if spec.scheme in (Scheme.PPM, Scheme.EPPM):
            assert np.all(curve.ber_bound <= curve.ser_bound)
        assert len(curve.points) == 28

    def test_spec_defaults(self):
        assert SchemeSpec(Scheme.PPM, 8).m == 8
        assert SchemeSpec(Scheme.MPPM, 12, 2).m == 64
        assert SchemeSpec.eppm_family(67).m == 64
        assert SchemeSpec.eppm_family(67, augmented=True).m == 128
        assert SchemeSpec(Scheme.OOK, 1).eta == 1.0
        with pytest.raises(InvalidParameters):
            SchemeSpec.eppm_family(13)


class TestRequiredGamma:
    def test_inverts(self):
        spec = SchemeSpec.eppm_family(11)
        g_db = required_gamma(spec, 1e-6)
        assert float(spec.ber_bound(10 ** (g_db / 10))) == pytest.approx(1e-6, rel=1e-4)

    def test_bad_target(self):
        with pytest.raises(InvalidParameters):
            required_gamma(SchemeSpec(Scheme.PPM, 8), 0.7)

    def test_not_bracketed(self):
        with pytest.raises(NotBracketed):
            required_gamma(SchemeSpec(Scheme.PPM, 8), 1e-9, lo_db=20, hi_db=30)

    def test_ppm_rises_with_q(self):
        req = [required_gamma(SchemeSpec(Scheme.PPM, q), 1e-5) for q in FRONTIER_PPM_Q]
        assert all(a < b for a, b in zip(req, req[1:]))

    def test_coding_gain_ordering(self):
        # at equal q and m, the k - lam gain shows as a lower required SNR
        ppm = required_gamma(lambda g: union_bound_ppm(11, g, 8), 1e-6)
        eppm = required_gamma(lambda g: union_bound_eppm(11, 5, 2, 8, g), 1e-6)
        assert ppm - eppm == pytest.approx(10 * math.log10(3), abs=0.3)


class TestFrontier:
    def test_families(self):
        specs = frontier_schemes()
        ppm = [s.q for s in specs if s.scheme is Scheme.PPM]
        eppm = [s.q for s in specs if s.scheme is Scheme.EPPM]
        assert ppm == [4, 8, 16, 32, 64, 128, 256]
        assert eppm == [7, 11, 19, 35, 67, 131, 263]
        assert tuple(eppm) == FRONTIER_EPPM_Q

    def test_shape(self):
        pts = spectral_efficiency_frontier(frontier_schemes(), 1e-5)
        fam = lambda s: [p for p in pts if p.spec.scheme is s]  # noqa: E731
        e = [p.required_gamma_db for p in fam(Scheme.EPPM)]
        a = [p.required_gamma_db for p in fam(Scheme.AEPPM)]
        p = [p.required_gamma_db for p in fam(Scheme.PPM)]
        assert all(x > y for x, y in zip(e, e[1:]))
        assert all(x > y for x, y in zip(a, a[1:]))
        assert all(x < y for x, y in zip(p, p[1:]))
        eta = [p.eta for p in fam(Scheme.EPPM)]
        assert all(x > y for x, y in zip(eta, eta[1:]))
        mppm_max = max(p.eta for p in fam(Scheme.MPPM))
        assert mppm_max > max(p.eta for p in pts if p.spec.scheme in
                              (Scheme.PPM, Scheme.EPPM, Scheme.AEPPM))
        ook = fam(Scheme.OOK)
        assert len(ook) == 1 and ook[0].eta == 1.0


class TestJensen:
    def test_equidistant_is_best(self):
        """Random weight-k codebooks never beat the cyclic design."""
        rng = np.random.default_rng(2024)
        cases = [(7, 3), (11, 5), (15, 7)]
        for trial in range(1000):
            q, k = cases[trial % len(cases)]
            eppm = eppm_constellation(q)
            cw = np.zeros((q, q), dtype=np.uint8)
            for row in cw:
                row[rng.choice(q, size=k, replace=False)] = 1
            c = from_codewords(cw, mapped=eppm.mapped)
            assert c.eta == eppm.eta
            for g in (0.5, 4.0):
                assert union_bound_generic(c, g) >= union_bound_generic(eppm, g) * (1 - 1e-12)


class TestAugmentedTradeoff:
    @pytest.mark.parametrize("q", [7, 11, 19, 35])
    def test_both_directions(self, q):
        e = SchemeSpec.eppm_family(q)
        a = SchemeSpec.eppm_family(q, augmented=True)
        assert a.eta > e.eta
        # more neighbours: worse at low SNR
        assert a.ser_bound(10 ** (-0.5)) > e.ser_bound(10 ** (-0.5))
        # larger eta: better at the operating points
        assert a.ser_bound(10 ** 1.2) < e.ser_bound(10 ** 1.2)
        assert required_gamma(a, 1e-5) < required_gamma(e, 1e-5)


def test_spectrum_helper_matches_profile():
    c = eppm_constellation(11, augmented=True)
    prof = distance_profile(c)
    assert prof.spectrum == {5: 220, 6: 220, 11: 22}
    assert union_bound_from_spectrum(prof.spectrum, c.m, 2.0, c.eta) == pytest.approx(
        union_bound_generic(c, 2.0))
