import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from scipy.special import digamma

from ncspec.errors import InsufficientDataError, InvalidInputError
from ncspec.spectra import (Kind, SpectralSequence, dixmier_macaev_norm, log_mean_series,
                            partial_sums, read_spectrum_csv, sort_sequence, split_signed,
                            strong_tauberian_remainder, tauberian_limit, weak_quasi_norm,
                            write_spectrum_csv)

EULER_GAMMA = 0.5772156649015329


def harmonic(n):
    # independent oracle: H_n = psi(n + 1) + gamma
    return digamma(np.asarray(n, dtype=float) + 1.0) + EULER_GAMMA


def t0(n):
    return SpectralSequence(1.0 / np.arange(1, n + 1))


def circle(n_pairs):
    k = np.repeat(np.arange(1, n_pairs + 1), 2)
    return SpectralSequence(1.0 / k)


finite = st.floats(-1e3, 1e3, allow_nan=False, allow_infinity=False)


class TestSortSequence:
    def test_modulus_order(self):
        assert np.array_equal(sort_sequence([0.5, -1, 0.25]).values, [-1, 0.5, 0.25])

    def test_empty(self):
        seq = sort_sequence([])
        assert len(seq) == 0

    def test_ties_by_real_part(self):
        assert np.array_equal(sort_sequence([1j, 1]).values, [1, 1j])

    def test_real_before_negative_at_same_modulus(self):
        assert np.array_equal(sort_sequence([-2, 2, 1]).values, [2, -2, 1])

    def test_unsorted_rejected(self):
        with pytest.raises(InvalidInputError):
            SpectralSequence([1, 2])

    def test_nonfinite_rejected(self):
        with pytest.raises(InvalidInputError):
            sort_sequence([1, np.nan])

    def test_singular_values_nonnegative(self):
        with pytest.raises(InvalidInputError):
            SpectralSequence([2, -1], Kind.SINGULAR_VALUES)

    def test_values_read_only(self):
        seq = sort_sequence([3, 1])
        with pytest.raises(ValueError):
            seq.values[0] = 0

    @given(st.lists(st.complex_numbers(max_magnitude=1e3, allow_nan=False, allow_infinity=False)))
    def test_sorted_permutation(self, raw):
        seq = sort_sequence(raw)
        assert np.all(np.diff(np.abs(seq.values)) <= 0)
        assert sorted(map(complex, seq.values), key=lambda z: (z.real, z.imag)) == \
            sorted(map(complex, raw), key=lambda z: (z.real, z.imag))


class TestLogMeans:
    def test_t0_at_100(self):
        sigma = log_mean_series(t0(100))
        assert sigma[99] == pytest.approx(harmonic(100) / math.log(100), rel=1e-13)
        assert sigma[99] == pytest.approx(1.1264, abs=5e-5)

    def test_sigma_one_is_zero(self):
        assert log_mean_series(t0(5))[0] == 0

    def test_zero_sequence(self):
        assert np.all(log_mean_series(SpectralSequence(np.zeros(10))) == 0)

    def test_circle_closed_form(self):
        seq = circle(500000)
        sigma = log_mean_series(seq)
        n = len(seq)
        # S_{2k} = 2 H_k
        assert sigma[-1] == pytest.approx(2 * harmonic(n // 2) / math.log(n), rel=1e-12)
        assert abs(sigma[-1] - 2) < 0.04

    def test_empty_rejected(self):
        with pytest.raises(InsufficientDataError):
            log_mean_series(SpectralSequence([]))

    @given(st.lists(finite, min_size=2, max_size=50), finite)
    def test_homogeneous(self, raw, c):
        seq = sort_sequence(raw)
        lhs = log_mean_series(seq.scaled(c))
        rhs = c * log_mean_series(seq)
        # scaling may reorder ties; partial sums agree once all equal-modulus entries are in
        mod = np.abs(seq.values)
        ends = np.r_[np.flatnonzero(np.diff(mod) != 0), len(seq) - 1]
        ends = ends[ends >= 1]
        np.testing.assert_allclose(lhs[ends], rhs[ends], atol=1e-9 * (1 + abs(c)) * (1 + np.abs(mod).sum()))


class TestNorms:
    def test_weak_t0(self):
        assert weak_quasi_norm(t0(1000), 1) == pytest.approx(1.0)

    def test_weak_diag(self):
        assert weak_quasi_norm(SpectralSequence([3, 1], Kind.SINGULAR_VALUES), 1) == 3

    def test_weak_square_decay(self):
        seq = SpectralSequence(1.0 / np.arange(1, 200) ** 2)
        assert weak_quasi_norm(seq, 1) == 1

    def test_weak_negative_rejected(self):
        with pytest.raises(InvalidInputError):
            weak_quasi_norm(SpectralSequence([1, -0.5]), 1)

    def test_weak_bad_p(self):
        with pytest.raises(InvalidInputError):
            weak_quasi_norm(t0(3), 0)

    def test_dm_t0(self):
        assert dixmier_macaev_norm(t0(10000)) == pytest.approx(1 / math.log(2))

    def test_dm_zero_and_single(self):
        assert dixmier_macaev_norm(SpectralSequence(np.zeros(4))) == 0
        assert dixmier_macaev_norm(SpectralSequence([1.0])) == pytest.approx(1 / math.log(2))

    def test_dm_negative_rejected(self):
        with pytest.raises(InvalidInputError):
            dixmier_macaev_norm(SpectralSequence([-1.0]))

    @given(st.lists(st.floats(0, 1e3), min_size=1, max_size=40), st.floats(1e-3, 1e3),
           st.sampled_from([0.5, 1.0, 2.0]))
    def test_weak_homogeneous(self, raw, t, p):
        seq = sort_sequence(raw, Kind.SINGULAR_VALUES)
        assert weak_quasi_norm(seq.scaled(t), p) == pytest.approx(t * weak_quasi_norm(seq, p), rel=1e-12, abs=1e-300)

    @given(st.lists(st.floats(0, 1e3), min_size=1, max_size=40))
    def test_dm_zero_iff_zero(self, raw):
        seq = sort_sequence(raw, Kind.SINGULAR_VALUES)
        norm = dixmier_macaev_norm(seq)
        assert norm >= 0
        assert (norm == 0) == (not np.any(seq.values))


class TestSplitSigned:
    def test_mixed(self):
        plus, minus = split_signed(sort_sequence([3, -2, 1]))
        assert list(plus.values) == [3, 1] and list(minus.values) == [2]

    def test_all_positive(self):
        plus, minus = split_signed(sort_sequence([2, 1]))
        assert list(plus.values) == [2, 1] and len(minus) == 0

    def test_all_negative(self):
        plus, minus = split_signed(sort_sequence([-1, -1]))
        assert len(plus) == 0 and list(minus.values) == [1, 1]

    def test_complex_rejected(self):
        with pytest.raises(InvalidInputError):
            split_signed(sort_sequence([1j]))

    @given(st.lists(finite, max_size=60))
    def test_recombine(self, raw):
        seq = sort_sequence(raw)
        plus, minus = split_signed(seq)
        merged = sort_sequence(np.r_[plus.values, -minus.values, np.zeros(np.count_nonzero(seq.values == 0))])
        assert np.array_equal(merged.values, seq.values)

    def test_signed_sum_offset_bounded(self, rng):
        # sum_{j<N} lambda_j vs sum of leading parts: difference stays O(1)
        ks = np.arange(1, 200001)
        raw = np.r_[1.0 / ks, -0.5 / ks]
        seq = sort_sequence(raw)
        plus, minus = split_signed(seq)
        s = partial_sums(seq)
        n_plus = np.cumsum(seq.values > 0)
        n_minus = np.cumsum(seq.values < 0)
        sp = np.r_[0, np.cumsum(plus.values)][n_plus]
        sm = np.r_[0, np.cumsum(minus.values)][n_minus]
        diff = s - (sp - sm)
        assert np.max(np.abs(diff)) < 1e-8


class TestTauberian:
    def test_t0(self):
        rep = tauberian_limit(t0(10 ** 6), tol=0.05)
        assert rep.converged
        assert rep.limit_estimate == pytest.approx(1.0, abs=0.05)
        assert rep.window == (500001, 10 ** 6)
        assert rep.length == 10 ** 6

    def test_t0_frozen_oracle(self):
        # window mean of H_N / ln N over N in [500001, 10^6], evaluated through digamma
        n = np.arange(500001, 10 ** 6 + 1)
        oracle = np.mean(harmonic(n) / np.log(n))
        rep = tauberian_limit(t0(10 ** 6))
        assert rep.limit_estimate == pytest.approx(oracle, rel=1e-12)
        assert rep.limit_estimate == pytest.approx(1.0427385521, rel=1e-9)

    def test_oscillating_direct_summation(self):
        # sigma_N oscillates: over the full range the log-means do not settle
        j = np.arange(10 ** 6, dtype=float)
        seq = sort_sequence((1 + np.sin(np.log(np.log(j + 2)))) / (j + 1))
        rep = tauberian_limit(seq, window_fraction=1.0)
        assert not rep.converged
        assert rep.dispersion > 0.1

    def test_zero_sequence(self):
        rep = tauberian_limit(SpectralSequence(np.zeros(20)))
        assert rep.converged and rep.limit_estimate == 0

    def test_too_short(self):
        with pytest.raises(InsufficientDataError):
            tauberian_limit(t0(15))

    def test_converged_implies_dispersion(self):
        for tol in (1e-4, 1e-2, 1e-1):
            rep = tauberian_limit(t0(5000), tol=tol)
            assert rep.converged == (rep.dispersion <= tol)
            assert rep.surrogate_spread >= 0

    def test_complex_estimate(self):
        seq = sort_sequence((1 + 1j) / np.arange(1, 1001))
        rep = tauberian_limit(seq)
        assert rep.limit_estimate.real == pytest.approx(rep.limit_estimate.imag)

    def test_reference_remainder(self):
        rep = tauberian_limit(t0(100), reference=1.0)
        assert rep.remainder_bound == pytest.approx(1.5 - math.log(2))


class TestRemainder:
    def test_t0_sup_at_two(self):
        # H_N - ln N decreases from H_2 - ln 2 towards gamma
        assert strong_tauberian_remainder(t0(10 ** 5), 1.0) == pytest.approx(1.5 - math.log(2), rel=1e-14)

    def test_zero(self):
        assert strong_tauberian_remainder(SpectralSequence(np.zeros(10)), 0.0) == 0

    def test_unbounded_with_wrong_limit(self):
        small = strong_tauberian_remainder(t0(10 ** 3), 0.0)
        large = strong_tauberian_remainder(t0(10 ** 6), 0.0)
        assert large - small == pytest.approx(math.log(1000), rel=1e-3)


class TestCsv:
    def test_roundtrip(self, tmp_path, rng):
        raw = rng.standard_normal(50) + 1j * rng.standard_normal(50)
        seq = sort_sequence(raw)
        path = tmp_path / "spectrum.csv"
        write_spectrum_csv(seq, path)
        back = read_spectrum_csv(path)
        assert np.array_equal(back.values, seq.values)
        assert path.read_bytes().startswith(b"index,re,im\n")

    def test_unsorted_rows(self, tmp_path):
        path = tmp_path / "s.csv"
        path.write_text("index,re,im\n0,0.5,0\n1,-1,0\n2,0.25,0\n", encoding="utf-8")
        assert list(read_spectrum_csv(path).values) == [-1, 0.5, 0.25]

    def test_bad_header(self, tmp_path):
        path = tmp_path / "s.csv"
        path.write_text("a,b\n1,2\n", encoding="utf-8")
        with pytest.raises(InvalidInputError):
            read_spectrum_csv(path)
