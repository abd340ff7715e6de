import numpy as np
import pytest

from entrosig.distributions import (
    DegenerateDistributionError,
    DiscreteDistribution,
    Frame,
    HistogramConfig,
    SignalBuffer,
    SpectralConfig,
    dist_spectral,
    dist_time_grouped,
    dist_time_histogram,
    dist_time_samples,
    frame_signal,
    grouping_edges,
    spectral_power_density,
)

from conftest import random_simplex


def make_frame(samples):
    return Frame(samples=np.asarray(samples, dtype=float), start_index=0, start_time=0.0)


class TestDiscreteDistribution:
    def test_rejects_negative_entries(self):
        with pytest.raises(ValueError):
            DiscreteDistribution(np.array([1.2, -0.2]))

    def test_rejects_bad_sum(self):
        with pytest.raises(ValueError):
            DiscreteDistribution(np.array([0.5, 0.4]))

    def test_rejects_empty(self):
        with pytest.raises(ValueError):
            DiscreteDistribution(np.array([]))

    def test_from_weights_normalizes(self):
        d = DiscreteDistribution.from_weights([3.0, 1.0])
        assert np.allclose(d.probs, [0.75, 0.25])

    def test_from_weights_zero_total_is_degenerate(self):
        with pytest.raises(DegenerateDistributionError):
            DiscreteDistribution.from_weights([0.0, 0.0])

    def test_probs_are_immutable(self):
        d = DiscreteDistribution.uniform(4)
        with pytest.raises(ValueError):
            d.probs[0] = 0.9


class TestFrameSignal:
    def test_exact_division(self):
        buf = SignalBuffer(np.arange(10.0), 10)
        frames = frame_signal(buf, window=5, hop=5)
        assert [f.start_index for f in frames] == [0, 5]

    def test_tail_dropped_by_default(self):
        buf = SignalBuffer(np.arange(11.0), 10)
        frames = frame_signal(buf, window=5, hop=5)
        assert len(frames) == 2

    def test_overlapping_hop_offsets(self):
        # 8 samples, W=4, hop=2: valid starts are 0, 2, 4 (start 6 would
        # need samples 6..9)
        buf = SignalBuffer(np.arange(8.0), 8)
        frames = frame_signal(buf, window=4, hop=2)
        assert [f.start_index for f in frames] == [0, 2, 4]
        assert all(len(f) == 4 for f in frames)

    def test_pad_tail(self):
        buf = SignalBuffer(np.arange(11.0), 10)
        frames = frame_signal(buf, window=5, hop=5, pad_tail=True)
        assert len(frames) == 3
        assert list(frames[2].samples) == [10.0, 0.0, 0.0, 0.0, 0.0]

    def test_start_times(self):
        buf = SignalBuffer(np.arange(10.0), 10)
        frames = frame_signal(buf, window=5, hop=5)
        assert [f.start_time for f in frames] == [0.0, 0.5]

    def test_empty_buffer_rejected(self):
        with pytest.raises(ValueError):
            frame_signal(SignalBuffer(np.array([]), 10), window=4)

    def test_window_longer_than_buffer_rejected(self):
        with pytest.raises(ValueError):
            frame_signal(SignalBuffer(np.arange(3.0), 10), window=4)

    def test_bad_hop_rejected(self):
        with pytest.raises(ValueError):
            frame_signal(SignalBuffer(np.arange(8.0), 10), window=4, hop=0)


class TestTimeHistogram:
    def test_symmetric_split(self):
        d = dist_time_histogram(make_frame([0, 0, 1, 1]), HistogramConfig(n_levels=2))
        assert np.allclose(d.probs, [0.5, 0.5])

    def test_uniform_occupancy(self):
        d = dist_time_histogram(make_frame([0, 1, 2, 3]), HistogramConfig(n_levels=4))
        assert np.allclose(d.probs, [0.25, 0.25, 0.25, 0.25])

    def test_hand_binned_edges(self):
        # edges 0,1,2,3: three zeros in [0,1), one 3 in the closed top bin
        d = dist_time_histogram(make_frame([0, 0, 0, 3]), HistogramConfig(n_levels=3))
        assert np.allclose(d.probs, [0.75, 0.0, 0.25])

    def test_interior_edge_goes_to_higher_bin(self):
        # value 1 sits exactly on the 0|1|2 interior edge
        d = dist_time_histogram(make_frame([0, 1, 2, 2]), HistogramConfig(n_levels=2))
        assert np.allclose(d.probs, [0.25, 0.75])

    def test_constant_frame_is_delta(self):
        d = dist_time_histogram(make_frame([5.0, 5.0, 5.0]), HistogramConfig(n_levels=4))
        assert d.probs[0] == 1.0

    def test_counts_sum_to_window(self, rng):
        x = rng.normal(0, 1, 512)
        cfg = HistogramConfig(n_levels=16)
        counts, _ = np.histogram(x, bins=16, range=(x.min(), x.max()))
        assert counts.sum() == 512
        d = dist_time_histogram(make_frame(x), cfg)
        assert np.allclose(d.probs * 512, counts)

    def test_small_alphabet_rejected(self):
        with pytest.raises(ValueError):
            HistogramConfig(n_levels=1)


class TestTimeSamples:
    def test_constant_positive(self):
        d = dist_time_samples(make_frame([1, 1, 1, 1]))
        assert np.allclose(d.probs, 0.25)

    def test_alternating_sign_constant_magnitude(self):
        d = dist_time_samples(make_frame([1, -1, 1, -1]))
        assert np.allclose(d.probs, 0.25)

    def test_hand_normalization(self):
        d = dist_time_samples(make_frame([3, 1, 0, 0]))
        assert np.allclose(d.probs, [0.75, 0.25, 0.0, 0.0])

    def test_all_zero_frame_is_degenerate(self):
        with pytest.raises(DegenerateDistributionError):
            dist_time_samples(make_frame([0.0, 0.0, 0.0]))

    def test_squared_transform(self):
        d = dist_time_samples(make_frame([2.0, -2.0, 0.0]), "squared")
        assert np.allclose(d.probs, [0.5, 0.5, 0.0])

    def test_raw_shifted_transform(self):
        d = dist_time_samples(make_frame([-1.0, 0.0, 3.0]), "raw_shifted")
        assert np.allclose(d.probs, [0.0, 0.2, 0.8])

    def test_raw_shifted_constant_is_degenerate(self):
        with pytest.raises(DegenerateDistributionError):
            dist_time_samples(make_frame([2.0, 2.0]), "raw_shifted")

    def test_unknown_transform_rejected(self):
        with pytest.raises(ValueError):
            dist_time_samples(make_frame([1.0, 2.0]), "cubed")


def brute_force_grouping(p0: DiscreteDistribution, n_levels: int):
    """Per-index classifier applying the level-interval definition directly.

    Walks the levels from the top for each entry so that shared edges go
    to the higher level, with the top edge kept in the last level.
    """
    edges = grouping_edges(float(p0.probs.max()), n_levels)
    mass = np.zeros(n_levels)
    counts = np.zeros(n_levels)
    for value in p0.probs:
        assigned = None
        for j in range(n_levels, 0, -1):  # highest feasible level wins
            if value >= edges[j - 1]:
                assigned = min(j, n_levels) - 1
                break
        mass[assigned] += value
        counts[assigned] += 1
    return mass / mass.sum(), counts / len(p0.probs)


class TestTimeGrouped:
    def test_uniform_collapses_to_top_level(self):
        p0 = DiscreteDistribution.uniform(8)
        p1, pt = dist_time_grouped(p0, 4)
        assert np.allclose(p1.probs, [0, 0, 0, 1])
        assert np.allclose(pt.probs, [0, 0, 0, 1])

    def test_hand_application_of_level_sets(self):
        p0 = DiscreteDistribution(np.array([0.5, 0.5, 0.0, 0.0]))
        p1, pt = dist_time_grouped(p0, 2)
        assert np.allclose(p1.probs, [0.0, 1.0])
        assert np.allclose(pt.probs, [0.5, 0.5])

    def test_matches_brute_force_classifier(self, rng):
        for _ in range(50):
            n = int(rng.integers(2, 12))
            p0 = DiscreteDistribution(random_simplex(rng, int(rng.integers(4, 40))))
            p1, pt = dist_time_grouped(p0, n)
            bf_p1, bf_pt = brute_force_grouping(p0, n)
            assert np.array_equal(p1.probs, bf_p1)
            assert np.array_equal(pt.probs, bf_pt)

    def test_descending_example_against_brute_force(self):
        p0 = DiscreteDistribution(np.array([0.4, 0.3, 0.2, 0.1]))
        p1, pt = dist_time_grouped(p0, 2)
        bf_p1, bf_pt = brute_force_grouping(p0, 2)
        assert np.array_equal(p1.probs, bf_p1)
        assert np.array_equal(pt.probs, bf_pt)
        # 0.2 sits on the shared edge and belongs to the upper level
        assert np.allclose(p1.probs, [0.1, 0.9])
        assert np.allclose(pt.probs, [0.25, 0.75])

    def test_both_outputs_sum_to_one(self, rng):
        p0 = DiscreteDistribution(random_simplex(rng, 100))
        p1, pt = dist_time_grouped(p0, 16)
        assert abs(p1.probs.sum() - 1.0) < 1e-9
        assert abs(pt.probs.sum() - 1.0) < 1e-9

    def test_small_alphabet_rejected(self):
        with pytest.raises(ValueError):
            dist_time_grouped(DiscreteDistribution.uniform(4), 1)


class TestSpectral:
    def test_constant_frame_two_sided_is_dc_delta(self):
        d = dist_spectral(make_frame(np.full(16, 3.0)), SpectralConfig(n_fft=16, sidedness="two_sided"))
        assert d.probs[0] > 1.0 - 1e-12
        assert np.all(d.probs[1:] < 1e-12)

    def test_bin_aligned_cosine_is_delta_at_bin(self):
        # analytic DFT of cos(2 pi k t / N): mass only at bins +-k
        n, k = 64, 5
        t = np.arange(n)
        frame = make_frame(np.cos(2 * np.pi * k * t / n))
        d = dist_spectral(frame, SpectralConfig(n_fft=n, sidedness="one_sided"))
        assert d.probs[k] > 1.0 - 1e-12
        mask = np.ones(d.size, dtype=bool)
        mask[k] = False
        assert np.all(d.probs[mask] < 1e-12)

    def test_amplitude_scale_invariance(self, rng):
        x = rng.normal(0, 1, 128)
        cfg = SpectralConfig(n_fft=128)
        base = dist_spectral(make_frame(x), cfg)
        for alpha in (0.25, -3.0, 1e6):
            scaled = dist_spectral(make_frame(alpha * x), cfg)
            assert np.max(np.abs(scaled.probs - base.probs)) < 1e-12

    def test_parseval_two_sided(self, rng):
        x = rng.normal(0, 2, 256)
        s = spectral_power_density(x, SpectralConfig(n_fft=256, sidedness="two_sided"))
        expected = np.sum(x**2) / 256
        assert abs(s.sum() - expected) / expected < 1e-6

    def test_all_zero_frame_is_degenerate(self):
        with pytest.raises(DegenerateDistributionError):
            dist_spectral(make_frame(np.zeros(8)), SpectralConfig(n_fft=8))

    def test_one_sided_bin_count(self):
        d = dist_spectral(make_frame(np.sin(np.arange(32.0))), SpectralConfig(n_fft=32))
        assert d.size == 17

    def test_zero_padding_shorter_frame(self):
        d = dist_spectral(make_frame(np.ones(10)), SpectralConfig(n_fft=16))
        assert d.size == 9

    def test_frame_longer_than_n_fft_rejected(self):
        with pytest.raises(ValueError):
            dist_spectral(make_frame(np.ones(32)), SpectralConfig(n_fft=16))

    def test_hann_window_accepted(self, rng):
        x = rng.normal(0, 1, 64)
        d = dist_spectral(make_frame(x), SpectralConfig(n_fft=64, window_function="hann"))
        assert abs(d.probs.sum() - 1.0) < 1e-9


class TestValidation:
    def test_signal_buffer_requires_positive_rate(self):
        with pytest.raises(ValueError):
            SignalBuffer(np.ones(4), 0)

    def test_spectral_config_bounds(self):
        with pytest.raises(ValueError):
            SpectralConfig(n_fft=1)
        with pytest.raises(ValueError):
            SpectralConfig(n_fft=8, sidedness="diagonal")

    def test_every_distribution_is_normalized(self, rng):
        x = rng.normal(0, 100, 2048)
        frame = make_frame(x)
        outputs = [
            dist_time_histogram(frame, HistogramConfig(n_levels=64)),
            dist_time_samples(frame),
            dist_spectral(frame, SpectralConfig(n_fft=2048)),
            *dist_time_grouped(dist_time_samples(frame), 64),
        ]
        for d in outputs:
            assert np.all(d.probs >= 0.0)
            assert abs(d.probs.sum() - 1.0) < 1e-9
