"""Acceptance gate: one test per release criterion, at its stated tolerance.

Run with `pytest -v -s tests/test_acceptance.py` to get one line per
criterion; each test also enforces its runtime budget.
"""

import math
import time

import numpy as np
import pytest
from scipy.integrate import quad

from entrosig import cli, pipeline, wavio
from entrosig.criteria import (
    GaussianParams,
    d_sq,
    disequilibrium,
    entropy,
    gaussian_disequilibrium,
    gaussian_entropy,
    jsd,
    normalized_entropy,
)
from entrosig.distributions import (
    DiscreteDistribution,
    SpectralConfig,
    dist_spectral,
    dist_time_grouped,
    frame_signal,
)
from entrosig.pipeline import (
    AnalysisConfig,
    NoiseSpec,
    SynthSpec,
    ThresholdPolicy,
    detect,
    generate_white_noise,
    mix,
    run_criteria,
    separation_margin,
    synthesize,
)
from entrosig.variation import connection_check, residual_order_check
from entrosig.multidim import (
    ProductDistribution2D,
    complexity_2d,
    complexity_2d_factored,
    disequilibrium_2d_direct,
    disequilibrium_2d_factored,
)
from entrosig.verification import _order_check_direction, _random_distribution

# the -15 dB benchmark: bin-aligned 6 kHz tone bursts (amplitude 500) in
# sigma=2000 white noise; burst-interval SNR = 10*log10(500^2/(2*2000^2))
# = -15.05 dB
FS = 48000
DURATION_S = 12.0
BENCH_SPEC = SynthSpec(
    kind="tone_burst", carrier_hz=6000.0, bursts=((3.0, 5.0), (7.0, 9.5)), amplitude=500.0
)
BENCH_SIGMA = 2000.0
BENCH_POLICY = ThresholdPolicy(calibration=2.5, k_sigma=3.0, min_event_frames=2)
BENCH_CONFIG = AnalysisConfig(window=2048)
BENCH_SEEDS = range(20)
COMPETITORS = ("h_pt", "h_p0", "h_ps", "sid", "jsd", "c_jsd")


def report(number: int, detail: str) -> None:
    print(f"ACCEPTANCE {number:02d} PASS  {detail}", flush=True)


def event_covers_half_a_burst(events, bursts) -> bool:
    for event in events:
        for start_s, end_s in bursts:
            overlap = max(0.0, min(event.end_s, end_s) - max(event.start_s, start_s))
            if overlap >= 0.5 * (end_s - start_s):
                return True
    return False


@pytest.fixture(scope="module")
def benchmark():
    """20 seeded -15 dB runs: per-criterion margins and detection flags."""
    t0 = time.perf_counter()
    clean = synthesize(BENCH_SPEC, FS, DURATION_S)
    criteria_ids = ("c_sq",) + COMPETITORS
    margins = {cid: [] for cid in criteria_ids}
    detected = {cid: [] for cid in criteria_ids}
    snr_db = None
    for seed in BENCH_SEEDS:
        noise = generate_white_noise(NoiseSpec(BENCH_SIGMA, seed), len(clean), FS)
        mixed = mix(clean, noise, BENCH_SPEC.bursts)
        snr_db = mixed.snr_db
        for track in run_criteria(mixed.buffer, criteria_ids, BENCH_CONFIG):
            margins[track.criterion_id].append(separation_margin(track, BENCH_SPEC.bursts))
            events = detect(track, BENCH_POLICY).events
            detected[track.criterion_id].append(
                event_covers_half_a_burst(events, BENCH_SPEC.bursts)
            )
    return {
        "margins": margins,
        "detected": detected,
        "snr_db": snr_db,
        "build_seconds": time.perf_counter() - t0,
    }


def test_criterion_01_analytical_identities():
    t0 = time.perf_counter()
    rng = np.random.default_rng(1)
    worst_dsq = 0.0
    worst_jsd = 0.0
    for _ in range(10_000):
        n = int(rng.integers(2, 65))
        w = rng.random(n)
        p = DiscreteDistribution(w / w.sum())
        u = DiscreteDistribution.uniform(n)
        worst_dsq = max(worst_dsq, abs(d_sq(p) - disequilibrium(p, u)))
        w2 = rng.random(n)
        q = DiscreteDistribution(w2 / w2.sum())
        m = DiscreteDistribution((p.probs + q.probs) / 2.0)
        dual = entropy(m) - 0.5 * (entropy(p) + entropy(q))
        worst_jsd = max(worst_jsd, abs(jsd(p, q) - dual))
    elapsed = time.perf_counter() - t0
    assert worst_dsq <= 1e-12
    assert worst_jsd <= 1e-12
    assert elapsed < 5.0
    report(1, f"d_sq gap {worst_dsq:.2e}, jsd dual gap {worst_jsd:.2e} over 1e4 points ({elapsed:.1f}s)")


def test_criterion_02_expansion_order():
    t0 = time.perf_counter()
    rng = np.random.default_rng(2)
    slopes = []
    for n in (4, 16, 64):
        for _ in range(7):
            q = _random_distribution(rng, n, floor=0.5)
            direction = _order_check_direction(rng, q)
            slopes.append(residual_order_check(q, direction).slope)
    elapsed = time.perf_counter() - t0
    assert len(slopes) >= 20
    assert all(2.7 <= s <= 3.3 for s in slopes)
    assert elapsed < 10.0
    report(2, f"{len(slopes)} slopes in [{min(slopes):.3f}, {max(slopes):.3f}] ({elapsed:.1f}s)")


def test_criterion_03_gaussian_closed_forms():
    t0 = time.perf_counter()
    assert gaussian_entropy(GaussianParams(0.0, 1.0)) == pytest.approx(2.047096, abs=1e-5)

    def log_density(x, mu, sigma):
        return -((x - mu) ** 2) / (2 * sigma**2) - math.log(sigma * math.sqrt(2 * math.pi))

    worst_rel = 0.0
    for d_mu in (0.0, 0.5, 1.0, 1.5, 2.0):
        for ratio in (0.5, 0.75, 1.1, 1.25, 1.35):
            gp = GaussianParams(d_mu, ratio)
            gq = GaussianParams(0.0, 1.0)
            assert 2 * gq.sigma**2 > gp.sigma**2
            integral, _ = quad(
                lambda x: math.exp(2 * log_density(x, gp.mu, gp.sigma) - log_density(x, gq.mu, gq.sigma)),
                -np.inf,
                np.inf,
                epsabs=1e-13,
                epsrel=1e-13,
            )
            reference = integral - 1.0
            rel = abs(gaussian_disequilibrium(gp, gq) - reference) / abs(reference)
            worst_rel = max(worst_rel, rel)
    elapsed = time.perf_counter() - t0
    assert worst_rel <= 1e-6
    assert elapsed < 10.0
    report(3, f"entropy at sigma=1 ok, quadrature worst rel err {worst_rel:.2e} ({elapsed:.1f}s)")


def test_criterion_04_two_dimensional_equivalence():
    t0 = time.perf_counter()
    rng = np.random.default_rng(4)
    worst_d = 0.0
    worst_c = 0.0
    for _ in range(1000):
        pd = ProductDistribution2D(
            _random_distribution(rng, int(rng.integers(2, 33))),
            _random_distribution(rng, int(rng.integers(2, 33))),
        )
        worst_d = max(worst_d, abs(disequilibrium_2d_factored(pd) - disequilibrium_2d_direct(pd)))
        worst_c = max(worst_c, abs(complexity_2d_factored(pd) - complexity_2d(pd)))
    elapsed = time.perf_counter() - t0
    assert worst_d <= 1e-12
    assert worst_c <= 1e-10
    assert elapsed < 5.0
    report(4, f"disequilibrium gap {worst_d:.2e}, complexity gap {worst_c:.2e} ({elapsed:.1f}s)")


def test_criterion_05_connection_identity():
    t0 = time.perf_counter()
    rng = np.random.default_rng(5)
    worst_gap = 0.0
    for _ in range(100):
        n_levels = int(rng.integers(2, 17))
        counts = rng.integers(1, 9, size=n_levels)
        levels = (np.arange(n_levels) + 0.5) / n_levels
        levels[-1] = 1.0
        raw = np.repeat(levels, counts)
        p0 = DiscreteDistribution(raw / raw.sum())
        worst_gap = max(worst_gap, abs(connection_check(p0, n_levels).gap))

    worst_closed_form = 0.0
    for n_levels in (2, 4, 8, 16):
        counts = np.full(n_levels, 5)
        levels = (np.arange(n_levels) + 0.5) / n_levels
        levels[-1] = 1.0
        raw = np.repeat(levels, counts)
        p0 = DiscreteDistribution(raw / raw.sum())
        p1, pt = dist_time_grouped(p0, n_levels)
        assert np.allclose(pt.probs, 1.0 / n_levels)  # occupancy is uniform
        closed_form = math.log2(p0.size) - math.log2(n_levels) + entropy(p1)
        worst_closed_form = max(worst_closed_form, abs(entropy(p0) - closed_form))
    elapsed = time.perf_counter() - t0
    assert worst_gap <= 1e-9
    assert worst_closed_form <= 1e-9
    assert elapsed < 5.0
    report(5, f"gap {worst_gap:.2e} on 100 inputs, uniform case gap {worst_closed_form:.2e} ({elapsed:.1f}s)")


def test_criterion_06_detection_at_minus_15_db(benchmark):
    t0 = time.perf_counter()
    assert benchmark["snr_db"] == pytest.approx(-15.0, abs=0.5)
    hits = sum(benchmark["detected"]["c_sq"])
    assert hits >= 18

    false_events = 0
    minutes = 10
    for seed in range(100, 100 + minutes):
        noise = generate_white_noise(NoiseSpec(BENCH_SIGMA, seed), int(60.0 * FS), FS)
        (track,) = run_criteria(noise, ["c_sq"], BENCH_CONFIG)
        false_events += len(detect(track, BENCH_POLICY).events)
    assert false_events <= minutes  # at most one false event per minute
    elapsed = time.perf_counter() - t0 + benchmark["build_seconds"]
    assert elapsed < 60.0
    report(6, f"{hits}/20 seeds detected at {benchmark['snr_db']:.2f} dB, "
              f"{false_events} false events in {minutes} noise minutes ({elapsed:.1f}s)")


def test_criterion_07_complexity_margin_dominates(benchmark):
    t0 = time.perf_counter()
    c_sq_margins = np.array(benchmark["margins"]["c_sq"])
    wins = {}
    for competitor in COMPETITORS:
        wins[competitor] = int(np.sum(c_sq_margins >= np.array(benchmark["margins"][competitor])))
        assert wins[competitor] >= 16, f"c_sq beats {competitor} in only {wins[competitor]}/20 seeds"
    elapsed = time.perf_counter() - t0
    assert elapsed + benchmark["build_seconds"] < 120.0
    summary = ", ".join(f"{k}:{v}/20" for k, v in wins.items())
    report(7, summary)


def test_criterion_08_time_criteria_degrade_first(benchmark):
    median_h_pt = float(np.median(benchmark["margins"]["h_pt"]))
    median_h_p0 = float(np.median(benchmark["margins"]["h_p0"]))
    median_h_ps = float(np.median(benchmark["margins"]["h_ps"]))
    assert median_h_pt < 1.0
    assert median_h_p0 < 1.0
    assert median_h_ps > 3.0
    report(8, f"median margins: h_pt {median_h_pt:.2f}, h_p0 {median_h_p0:.2f}, h_ps {median_h_ps:.2f}")


def test_criterion_09_white_noise_baselines():
    t0 = time.perf_counter()
    # larger window so the per-frame estimate sits near the true maximum
    window = 16384
    noise = generate_white_noise(NoiseSpec(1.0, 9), 40 * window, FS)
    values = [
        normalized_entropy(dist_spectral(frame, SpectralConfig(n_fft=window)))
        for frame in frame_signal(noise, window)
    ]
    noise_mean = float(np.mean(values))
    assert noise_mean > 0.95

    tone = synthesize(
        SynthSpec(kind="tone_burst", carrier_hz=6000.0, bursts=((0.0, 1.0),), amplitude=500.0),
        FS,
        1.0,
    )
    frame = frame_signal(tone, 2048)[0]
    spectral = dist_spectral(frame, SpectralConfig(n_fft=2048))
    tone_entropy = normalized_entropy(spectral)
    tone_d_sq = d_sq(spectral)
    max_d_sq = 1.0 - 1.0 / spectral.size
    assert tone_entropy < 0.05
    assert tone_d_sq > 0.995 * max_d_sq
    elapsed = time.perf_counter() - t0
    assert elapsed < 10.0
    report(9, f"noise H mean {noise_mean:.4f} (W={window}), tone H {tone_entropy:.1e}, "
              f"tone D_SQ {tone_d_sq:.6f}/{max_d_sq:.6f} ({elapsed:.1f}s)")


def test_criterion_10_cli_reproducibility(tmp_path):
    t0 = time.perf_counter()
    spec = "kind=tone_burst,carrier=1000,amplitude=500,rate=8000,duration=6,bursts=3-4.5"
    base = ["--synth", spec, "--sigma", "400", "--seed", "11", "--window", "512",
            "--calib-secs", "2"]
    pairs = {}
    for name, args in (
        ("analyze", ["analyze", *base, "--criteria", "h_ps,c_sq"]),
        ("detect", ["detect", *base]),
        ("sweep", ["sweep", "--synth", spec, "--sigma", "400,800", "--criteria", "h_ps,c_sq",
                   "--window", "512", "--calib-secs", "2", "--seed", "11"]),
    ):
        outputs = []
        for run in ("a", "b"):
            out = tmp_path / f"{name}_{run}"
            assert cli.main(args + ["--output", str(out)]) == 0
            outputs.append(out.read_bytes())
        pairs[name] = outputs[0] == outputs[1]
    assert all(pairs.values()), pairs

    wav = tmp_path / "round.wav"
    assert cli.main(["synth", "--synth", spec, "--sigma", "400", "--seed", "11",
                     "--output", str(wav)]) == 0
    parsed_spec, rate, duration = cli.parse_synth_spec(spec)
    clean = synthesize(parsed_spec, rate, duration)
    noise = generate_white_noise(NoiseSpec(400.0, 11), len(clean), rate)
    expected = mix(clean, noise, parsed_spec.bursts).buffer
    back = wavio.read_wav(wav)
    max_error = float(np.max(np.abs(back.samples - expected.samples)))
    assert max_error <= 1.0
    elapsed = time.perf_counter() - t0
    assert elapsed < 30.0
    report(10, f"analyze/detect/sweep byte-identical, wav round-trip error {max_error:.2f} LSB ({elapsed:.1f}s)")
