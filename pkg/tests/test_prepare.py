"""Single-mode state preparation and photon statistics."""

import math

import numpy as np
import pytest

from ramancavity.prepare import (
    LeakageError,
    ModeSpec,
    VacuumStatisticsError,
    amplitude_for_mean,
    build_mode,
    coherent_amplitudes,
    cutoff_for,
    fock_amplitudes,
    photon_stats,
    raw_coherent_amplitudes,
    raw_squeezed_amplitudes,
    spec_for_mean,
    squeezed_amplitudes,
    superpose_fock,
)


def test_fock_vacuum():
    m = fock_amplitudes(0, 5)
    np.testing.assert_array_equal(m.amps, [1, 0, 0, 0, 0, 0])


def test_fock_top_of_grid():
    m = fock_amplitudes(3, 3)
    np.testing.assert_array_equal(m.amps, [0, 0, 0, 1])


def test_fock_beyond_cutoff_rejected():
    with pytest.raises(ValueError):
        fock_amplitudes(4, 3)


def test_coherent_vacuum_limit():
    m = coherent_amplitudes(0.0, 4)
    np.testing.assert_array_equal(m.amps, [1, 0, 0, 0, 0])


def test_coherent_ground_amplitude():
    # amps[0] = e^{-|nu|^2 / 2} = e^{-2} for nu = 2.
    m = coherent_amplitudes(2.0, 40)
    assert m.amps[0].real == pytest.approx(math.exp(-2.0), rel=1e-12)


def test_coherent_large_field_mean():
    # Fig.-scale field: nbar = 150 resolvable at cutoff 250.
    m = coherent_amplitudes(math.sqrt(150.0), 250)
    stats = photon_stats(m)
    assert stats.mean == pytest.approx(150.0, abs=1e-6)


def test_coherent_leakage_error_at_small_cutoff():
    with pytest.raises(LeakageError):
        coherent_amplitudes(math.sqrt(150.0), 60)


def test_coherent_recurrence_ratio():
    nu = 1.7 + 0.4j
    m = coherent_amplitudes(nu, 30)
    amps = m.amps
    for n in range(29):
        if abs(amps[n]) > 1e-100:
            assert amps[n + 1] / amps[n] == pytest.approx(nu / math.sqrt(n + 1), rel=1e-12)


def test_squeezed_reduces_to_coherent_at_tiny_r():
    # The deviation from the coherent amplitudes is linear in r (~1.01 r for
    # nu = 3), so the 1e-8 agreement holds from r ~ 1e-9 down.
    nu = 3.0
    coherent = coherent_amplitudes(nu, 40)
    squeezed = squeezed_amplitudes(nu, 1e-9, 40)
    np.testing.assert_allclose(squeezed.amps, coherent.amps, atol=1e-8)
    dev_coarse = np.max(np.abs(squeezed_amplitudes(nu, 1e-6, 40).amps - coherent.amps))
    dev_fine = np.max(np.abs(squeezed_amplitudes(nu, 1e-7, 40).amps - coherent.amps))
    assert dev_coarse < 2e-6
    assert dev_coarse / dev_fine == pytest.approx(10.0, rel=0.05)


def test_squeezed_is_sub_poissonian():
    m = squeezed_amplitudes(math.sqrt(150.0), 1.0, 120)
    assert photon_stats(m).mandel_q < 0.0


def test_squeezed_literal_formula_moments():
    # The printed closed form has measured mean nu^2 e^{-2r} + sinh^2 r
    # (frozen from the moment-summation oracle), not the nominal |nu|^2.
    nu, r = math.sqrt(150.0), 1.0
    m = squeezed_amplitudes(nu, r, 120)
    expected = nu**2 * math.exp(-2 * r) + math.sinh(r) ** 2
    assert expected == pytest.approx(21.6813903310337, rel=1e-12)
    assert photon_stats(m).mean == pytest.approx(expected, abs=1e-6)


def test_squeezed_matches_direct_hermite_evaluation():
    # Low orders are safe for raw Hermite values; the recurrence must agree.
    nu, r, cutoff = 2.5, 0.6, 25
    t = math.tanh(r)
    x = nu / math.sqrt(math.sinh(2 * r))
    expected = np.zeros(cutoff + 1)
    h_prev, h = 1.0, 2.0 * x
    for n in range(cutoff + 1):
        hn = h_prev if n == 0 else (h if n == 1 else None)
        if hn is None:
            h_prev, h = h, 2 * x * h - 2 * (n - 1) * h_prev
            hn = h
        expected[n] = (
            t ** (n / 2.0)
            / math.sqrt(math.factorial(n) * 2**n * math.cosh(r))
            * math.exp(-(nu**2) * (1 - t) / 2.0)
            * hn
        )
    np.testing.assert_allclose(raw_squeezed_amplitudes(nu, r, cutoff).real, expected, atol=1e-13)


def test_squeezed_vacuum_has_even_support_only():
    spec = ModeSpec("squeezed", nu=0.0, r=0.8)
    m = build_mode(spec)
    assert np.all(m.amps[1::2] == 0.0)
    assert abs(m.amps[2]) > 0.0


def test_squeezed_rejects_negative_r():
    with pytest.raises(ValueError):
        squeezed_amplitudes(1.0, -0.5, 20)


def test_superpose_fock_plus_minus():
    plus = superpose_fock([(0, 1.0), (3, 1.0)], 5)
    minus = superpose_fock([(0, 1.0), (3, -1.0)], 5)
    assert plus.amps[0] == pytest.approx(1 / math.sqrt(2))
    assert plus.amps[3] == pytest.approx(1 / math.sqrt(2))
    assert minus.amps[3] == pytest.approx(-1 / math.sqrt(2))
    assert abs(np.vdot(plus.amps, minus.amps)) < 1e-15


def test_superpose_fock_single_term_normalizes():
    m = superpose_fock([(2, 5.0)], 4)
    assert m.amps[2] == 1.0


def test_superpose_fock_zero_vector_rejected():
    with pytest.raises(ValueError):
        superpose_fock([(1, 1.0), (1, -1.0)], 3)


def test_photon_stats_fock():
    stats = photon_stats(fock_amplitudes(3, 6))
    assert stats.mean == 3.0
    assert stats.variance == 0.0
    assert stats.mandel_q == -1.0


def test_photon_stats_coherent_poisson_moments():
    m = coherent_amplitudes(math.sqrt(50.0), 130)
    stats = photon_stats(m)
    assert stats.mean == pytest.approx(50.0, abs=1e-6)
    assert stats.variance == pytest.approx(50.0, abs=1e-4)
    assert abs(stats.mandel_q) < 1e-5


def test_photon_stats_squeezed_sub_poissonian():
    stats = photon_stats(squeezed_amplitudes(math.sqrt(50.0), 1.0, 120))
    assert stats.mandel_q < 0.0


def test_mandel_q_vacuum_signalled():
    stats = photon_stats(fock_amplitudes(0, 3))
    with pytest.raises(VacuumStatisticsError):
        _ = stats.mandel_q


def test_cutoff_for_fock():
    assert cutoff_for(ModeSpec("fock", n=3)) == 5


def test_cutoff_for_large_coherent():
    c = cutoff_for(ModeSpec("coherent", nu=math.sqrt(150.0)), leak_tol=1e-10)
    assert 230 <= c <= 280
    # The chosen cutoff really does bound the tail.
    raw = raw_coherent_amplitudes(math.sqrt(150.0), c)
    assert 1.0 - np.sum(np.abs(raw) ** 2) < 1e-10


def test_cutoff_for_squeezed_narrower_than_coherent():
    coh = cutoff_for(ModeSpec("coherent", nu=math.sqrt(150.0)), leak_tol=1e-10)
    sq = cutoff_for(ModeSpec("squeezed", nu=math.sqrt(150.0), r=1.0), leak_tol=1e-10)
    assert sq <= coh


def test_pre_renormalization_leakage_within_budget():
    # Raw (pre-renormalization) norms at the chosen cutoff stay in
    # [1 - leak_tol, 1] for every family.
    for spec in (
        ModeSpec("coherent", nu=math.sqrt(150.0)),
        ModeSpec("squeezed", nu=20.0, r=1.0),
        ModeSpec("squeezed", nu=0.0, r=0.9),
    ):
        cutoff = cutoff_for(spec, leak_tol=1e-10)
        if spec.family == "coherent":
            raw = raw_coherent_amplitudes(spec.nu, cutoff)
        else:
            raw = raw_squeezed_amplitudes(float(spec.nu.real if isinstance(spec.nu, complex) else spec.nu), spec.r, cutoff)
        norm_sq = float(np.sum(np.abs(raw) ** 2))
        assert 1.0 - 1e-10 <= norm_sq <= 1.0 + 1e-12


def test_renormalization_applied_exactly():
    for mode in (
        coherent_amplitudes(2.0, 25),
        squeezed_amplitudes(3.0, 0.5, 40),
        superpose_fock([(0, 2.0), (4, 1.0)], 6),
    ):
        assert np.sum(mode.probabilities()) == pytest.approx(1.0, abs=1e-14)


def test_amplitude_for_mean_round_trip():
    # Solving the measured-mean relation really lands on the target mean.
    for family, nbar, r in (("coherent", 150.0, 0.0), ("squeezed", 150.0, 1.0), ("squeezed", 50.0, 1.0)):
        spec = spec_for_mean(family, nbar, r)
        mode = build_mode(spec)
        assert photon_stats(mode).mean == pytest.approx(nbar, abs=1e-6)


def test_amplitude_for_mean_unreachable():
    with pytest.raises(ValueError):
        amplitude_for_mean("squeezed", 0.5, r=2.0)
