"""Windowed detection pipeline: synthetic signals, noise mixing, criterion
tracks, threshold detection and SNR sweeps.

A buffer is cut into frames of W samples, each frame is reduced to the
distributions the requested criteria need, and every criterion becomes a
per-frame track. Detection thresholds each track against statistics of a
leading noise-only calibration region.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace
from functools import cached_property
from typing import Callable, Sequence

import numpy as np

from entrosig import criteria
from entrosig.criteria import GaussianParams
from entrosig.distributions import (
    DEFAULT_LEVELS,
    DEFAULT_WINDOW,
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
)

RISES_ON_SIGNAL = "rises_on_signal"
FALLS_ON_SIGNAL = "falls_on_signal"

SYNTH_KINDS = ("tone_burst", "chirp", "multi_tone")

# noise levels swept by default; 2000 is the conventional heavy-noise preset
DEFAULT_SWEEP_SIGMAS = (500.0, 1000.0, 2000.0, 4000.0)


class CalibrationError(ValueError):
    """The calibration region is unusable (too short, empty or zero-variance)."""


@dataclass(frozen=True)
class NoiseSpec:
    """Standard deviation and seed of a synthetic white-noise source."""

    sigma: float
    seed: int = 0

    def __post_init__(self) -> None:
        if self.sigma < 0.0:
            raise ValueError("sigma must be non-negative")


@dataclass(frozen=True)
class SynthSpec:
    """Synthetic test signal: a carrier active inside burst intervals.

    Kinds: "tone_burst" (pure sine), "chirp" (linear sweep from carrier_hz
    to sweep_to_hz over each burst, default one octave up), "multi_tone"
    (sum of sines at carrier_hz times each harmonic multiplier, amplitude
    each). The signal is exactly zero outside the bursts.
    """

    kind: str
    carrier_hz: float
    bursts: tuple[tuple[float, float], ...]
    amplitude: float
    sweep_to_hz: float | None = None
    harmonics: tuple[float, ...] = (1.0, 2.0, 3.0)

    def __post_init__(self) -> None:
        if self.kind not in SYNTH_KINDS:
            raise ValueError(f"unknown synth kind {self.kind!r}")
        if self.carrier_hz <= 0.0:
            raise ValueError("carrier_hz must be positive")
        if self.amplitude < 0.0:
            raise ValueError("amplitude must be non-negative")
        bursts = tuple((float(a), float(b)) for a, b in self.bursts)
        prev_end = -math.inf
        for start, end in bursts:
            if start < 0.0 or end <= start:
                raise ValueError(f"invalid burst interval ({start}, {end})")
            if start < prev_end:
                raise ValueError("burst intervals must be ordered and non-overlapping")
            prev_end = end
        object.__setattr__(self, "bursts", bursts)
        object.__setattr__(self, "harmonics", tuple(float(h) for h in self.harmonics))


@dataclass(frozen=True)
class ThresholdPolicy:
    """Noise-calibrated threshold rule: mean +/- k_sigma * std.

    calibration is either a leading noise-only duration in seconds or an
    explicit (start, stop) frame-index range. Supra-threshold runs shorter
    than min_event_frames are discarded.
    """

    calibration: float | tuple[int, int] = 2.0
    k_sigma: float = 3.0
    min_event_frames: int = 2

    def __post_init__(self) -> None:
        if self.k_sigma <= 0.0:
            raise ValueError("k_sigma must be positive")
        if self.min_event_frames < 1:
            raise ValueError("min_event_frames must be at least 1")
        if isinstance(self.calibration, (int, float)) and not isinstance(self.calibration, bool):
            if float(self.calibration) <= 0.0:
                raise ValueError("calibration duration must be positive")
        else:
            start, stop = self.calibration
            if start < 0 or stop <= start:
                raise ValueError("calibration frame range must be non-empty")


@dataclass(frozen=True, eq=False)
class CriterionTrack:
    """Per-frame values of one criterion, with timing and polarity metadata."""

    criterion_id: str
    values: np.ndarray
    frame_times: np.ndarray
    frame_duration: float
    polarity: str
    normalized: bool = False

    def __post_init__(self) -> None:
        values = np.asarray(self.values, dtype=np.float64)
        times = np.asarray(self.frame_times, dtype=np.float64)
        if values.shape != times.shape or values.ndim != 1:
            raise ValueError("values and frame_times must be matching 1-D arrays")
        if self.polarity not in (RISES_ON_SIGNAL, FALLS_ON_SIGNAL):
            raise ValueError(f"unknown polarity {self.polarity!r}")
        if self.normalized and values.size and (values.min() < 0.0 or values.max() > 1.0):
            raise ValueError("normalized track values must lie in [0, 1]")
        object.__setattr__(self, "values", values)
        object.__setattr__(self, "frame_times", times)

    def __len__(self) -> int:
        return int(self.values.size)


@dataclass(frozen=True)
class DetectionEvent:
    """One thresholded event: time span, extreme value and source criterion."""

    start_s: float
    end_s: float
    peak_value: float
    criterion_id: str


@dataclass(frozen=True)
class DetectionReport:
    """Detection events plus the calibration statistics that produced them."""

    criterion_id: str
    polarity: str
    events: tuple[DetectionEvent, ...]
    calibration_mean: float
    calibration_std: float
    threshold_used: float
    k_sigma: float


@dataclass(frozen=True)
class MixResult:
    """Signal/noise sum and the SNR of the mix over the measured intervals."""

    buffer: SignalBuffer
    snr_db: float


@dataclass(frozen=True)
class SweepRow:
    """One benchmark cell: noise level, criterion, margin and detection flag."""

    sigma: float
    criterion_id: str
    separation_margin: float
    detected: bool


@dataclass(frozen=True)
class AnalysisConfig:
    """Framing, alphabet and spectral settings shared by all criteria."""

    window: int = DEFAULT_WINDOW
    hop: int | None = None
    n_fft: int | None = None
    n_levels: int = DEFAULT_LEVELS
    transform: str = "absolute"
    sidedness: str = "one_sided"
    window_function: str = "rectangular"
    noise_params: GaussianParams | None = None

    @property
    def resolved_hop(self) -> int:
        return self.window if self.hop is None else self.hop

    @property
    def resolved_n_fft(self) -> int:
        return self.window if self.n_fft is None else self.n_fft

    def histogram_config(self) -> HistogramConfig:
        return HistogramConfig(n_levels=self.n_levels, amplitude_transform=self.transform)

    def spectral_config(self) -> SpectralConfig:
        return SpectralConfig(
            n_fft=self.resolved_n_fft,
            sidedness=self.sidedness,
            window_function=self.window_function,
        )


class FrameContext:
    """Lazily builds and caches the distributions one frame can provide.

    Degenerate frames (all-zero after the amplitude transform, or zero
    spectral power) substitute a delta distribution so that every
    criterion still yields a defined value (entropies collapse to 0)
    instead of aborting the track.
    """

    def __init__(self, frame: Frame, config: AnalysisConfig):
        self.frame = frame
        self.config = config

    @cached_property
    def p_t(self) -> DiscreteDistribution:
        return dist_time_histogram(self.frame, self.config.histogram_config())

    @cached_property
    def p_0(self) -> DiscreteDistribution:
        try:
            return dist_time_samples(self.frame, self.config.transform)
        except DegenerateDistributionError:
            return DiscreteDistribution.delta(len(self.frame), 0)

    @cached_property
    def p_1(self) -> DiscreteDistribution:
        return dist_time_grouped(self.p_0, self.config.n_levels)[0]

    @cached_property
    def p_s(self) -> DiscreteDistribution:
        cfg = self.config.spectral_config()
        try:
            return dist_spectral(self.frame, cfg)
        except DegenerateDistributionError:
            return DiscreteDistribution.delta(cfg.n_bins, 0)

    @cached_property
    def spectral_uniform(self) -> DiscreteDistribution:
        return DiscreteDistribution.uniform(self.config.spectral_config().n_bins)


def _lh_value(ctx: FrameContext) -> float:
    noise = ctx.config.noise_params
    x = ctx.frame.samples
    mu = float(x.mean())
    sd = float(x.std())
    if sd > 0.0:
        return criteria.gaussian_lh(GaussianParams(mu, sd), noise)
    # zero-variance frame: the closed form's sigma_p -> 0 limit
    return (mu - noise.mu) ** 2 / (2.0 * noise.sigma**2) - 0.5


@dataclass(frozen=True)
class CriterionDef:
    """Registry entry: identifier, polarity and the per-frame evaluator."""

    criterion_id: str
    polarity: str
    evaluate: Callable[[FrameContext], float]
    needs_noise_params: bool = False


CRITERIA: dict[str, CriterionDef] = {
    d.criterion_id: d
    for d in (
        # time-domain polarities follow the measured tone/chirp behaviour of
        # this implementation's absolute-value transform; they are weak,
        # signal-dependent indicators (which is the point of the spectral ones)
        CriterionDef("h_pt", RISES_ON_SIGNAL, lambda ctx: criteria.normalized_entropy(ctx.p_t)),
        CriterionDef("h_p0", RISES_ON_SIGNAL, lambda ctx: criteria.normalized_entropy(ctx.p_0)),
        CriterionDef("h_p1", RISES_ON_SIGNAL, lambda ctx: criteria.normalized_entropy(ctx.p_1)),
        CriterionDef("h_ps", FALLS_ON_SIGNAL, lambda ctx: criteria.normalized_entropy(ctx.p_s)),
        CriterionDef("lh", RISES_ON_SIGNAL, _lh_value, needs_noise_params=True),
        CriterionDef(
            "sid",
            RISES_ON_SIGNAL,
            lambda ctx: criteria.sid(ctx.p_s, ctx.spectral_uniform, epsilon_floor=True),
        ),
        CriterionDef("jsd", RISES_ON_SIGNAL, lambda ctx: criteria.jsd(ctx.p_s, ctx.spectral_uniform)),
        CriterionDef("c_sq", RISES_ON_SIGNAL, lambda ctx: criteria.c_sq(ctx.p_s)),
        CriterionDef("c_jsd", RISES_ON_SIGNAL, lambda ctx: criteria.c_jsd(ctx.p_s)),
    )
}

DEFAULT_DETECT_CRITERION = "c_sq"


def criterion_ids() -> tuple[str, ...]:
    return tuple(CRITERIA)


def generate_white_noise(spec: NoiseSpec, n_samples: int, sample_rate: int) -> SignalBuffer:
    """Seeded i.i.d. Gaussian samples with mean 0 and std spec.sigma."""
    if n_samples < 1:
        raise ValueError("n_samples must be positive")
    rng = np.random.default_rng(spec.seed)
    return SignalBuffer(rng.normal(0.0, spec.sigma, n_samples), sample_rate)


def synthesize(spec: SynthSpec, sample_rate: int, duration_s: float) -> SignalBuffer:
    """Render a synthetic signal; zero outside the burst intervals."""
    n = int(round(duration_s * sample_rate))
    if n < 1:
        raise ValueError("duration must cover at least one sample")
    if spec.bursts and spec.bursts[-1][1] > duration_s + 1e-9:
        raise ValueError("burst intervals extend beyond the signal duration")

    out = np.zeros(n)
    for start_s, end_s in spec.bursts:
        i0 = int(round(start_s * sample_rate))
        i1 = min(int(round(end_s * sample_rate)), n)
        if i1 <= i0:
            continue
        tau = np.arange(i1 - i0) / sample_rate
        if spec.kind == "tone_burst":
            wave = np.sin(2.0 * math.pi * spec.carrier_hz * tau)
        elif spec.kind == "chirp":
            f1 = spec.sweep_to_hz if spec.sweep_to_hz is not None else 2.0 * spec.carrier_hz
            span = (i1 - i0) / sample_rate
            phase = 2.0 * math.pi * (spec.carrier_hz * tau + (f1 - spec.carrier_hz) * tau**2 / (2.0 * span))
            wave = np.sin(phase)
        else:  # multi_tone
            wave = np.zeros_like(tau)
            for h in spec.harmonics:
                wave += np.sin(2.0 * math.pi * spec.carrier_hz * h * tau)
        out[i0:i1] = spec.amplitude * wave
    return SignalBuffer(out, sample_rate)


def _interval_mask(n: int, sample_rate: int, intervals: Sequence[tuple[float, float]] | None) -> np.ndarray:
    if intervals is None:
        return np.ones(n, dtype=bool)
    mask = np.zeros(n, dtype=bool)
    for start_s, end_s in intervals:
        i0 = max(int(round(start_s * sample_rate)), 0)
        i1 = min(int(round(end_s * sample_rate)), n)
        if i1 > i0:
            mask[i0:i1] = True
    return mask


def mix(
    signal: SignalBuffer,
    noise: SignalBuffer,
    intervals: Sequence[tuple[float, float]] | None = None,
) -> MixResult:
    """Samplewise sum of signal and noise, with the SNR of the mix in dB.

    Powers are measured over `intervals` (normally the burst intervals, so
    the SNR describes the signal while it is active); the whole buffer
    when omitted. A zero-power noise gives +inf, a zero-power signal -inf.
    """
    if len(signal) != len(noise):
        raise ValueError("signal and noise lengths differ")
    if signal.sample_rate != noise.sample_rate:
        raise ValueError("signal and noise sample rates differ")
    mask = _interval_mask(len(signal), signal.sample_rate, intervals)
    if not mask.any():
        raise ValueError("power-measurement intervals contain no samples")
    p_signal = float(np.mean(signal.samples[mask] ** 2))
    p_noise = float(np.mean(noise.samples[mask] ** 2))
    if p_noise == 0.0:
        snr_db = math.inf
    elif p_signal == 0.0:
        snr_db = -math.inf
    else:
        snr_db = 10.0 * math.log10(p_signal / p_noise)
    return MixResult(
        buffer=SignalBuffer(signal.samples + noise.samples, signal.sample_rate),
        snr_db=snr_db,
    )


def run_criteria(
    buf: SignalBuffer,
    criteria_ids: Sequence[str],
    config: AnalysisConfig = AnalysisConfig(),
) -> list[CriterionTrack]:
    """Evaluate the requested criteria on every frame of the buffer.

    Returns one raw (unnormalized) track per criterion, in request order.
    Each frame's distributions are built at most once and shared by all
    criteria that need them.
    """
    defs = []
    for cid in criteria_ids:
        if cid not in CRITERIA:
            raise ValueError(f"unknown criterion {cid!r}; expected one of {sorted(CRITERIA)}")
        defs.append(CRITERIA[cid])
    if any(d.needs_noise_params for d in defs) and config.noise_params is None:
        raise ValueError("the lh criterion needs noise_params (estimate or configure them first)")

    frames = frame_signal(buf, config.window, config.resolved_hop)
    times = np.array([f.start_time for f in frames])
    values = np.empty((len(defs), len(frames)))
    for j, frame in enumerate(frames):
        ctx = FrameContext(frame, config)
        for i, d in enumerate(defs):
            values[i, j] = d.evaluate(ctx)

    duration = config.window / buf.sample_rate
    return [
        CriterionTrack(
            criterion_id=d.criterion_id,
            values=values[i],
            frame_times=times,
            frame_duration=duration,
            polarity=d.polarity,
        )
        for i, d in enumerate(defs)
    ]


def normalize_track(track: CriterionTrack) -> CriterionTrack:
    """Min-max scale a track to [0, 1]; constant tracks map to all zeros."""
    values = track.values
    lo, hi = float(values.min()), float(values.max())
    scaled = np.zeros_like(values) if hi == lo else (values - lo) / (hi - lo)
    return replace(track, values=scaled, normalized=True)


def _calibration_slice(track: CriterionTrack, policy: ThresholdPolicy) -> np.ndarray:
    if isinstance(policy.calibration, tuple):
        start, stop = policy.calibration
        calib = track.values[start:stop]
    else:
        limit = float(policy.calibration) + 1e-9
        ends = track.frame_times + track.frame_duration
        calib = track.values[ends <= limit]
    if calib.size < 8:
        raise CalibrationError(
            f"calibration region holds {calib.size} frames; need at least 8"
        )
    return calib


def detect(track: CriterionTrack, policy: ThresholdPolicy) -> DetectionReport:
    """Threshold a track against its noise-only calibration statistics.

    Rising criteria fire above mean + k*std, falling criteria below
    mean - k*std. Runs of at least min_event_frames consecutive
    supra-threshold frames become events.
    """
    calib = _calibration_slice(track, policy)
    mean = float(calib.mean())
    std = float(calib.std())
    if track.polarity == RISES_ON_SIGNAL:
        threshold = mean + policy.k_sigma * std
        above = track.values > threshold
    else:
        threshold = mean - policy.k_sigma * std
        above = track.values < threshold

    events = []
    n = len(track)
    i = 0
    while i < n:
        if not above[i]:
            i += 1
            continue
        j = i
        while j + 1 < n and above[j + 1]:
            j += 1
        if j - i + 1 >= policy.min_event_frames:
            run = track.values[i : j + 1]
            peak = float(run.max() if track.polarity == RISES_ON_SIGNAL else run.min())
            events.append(
                DetectionEvent(
                    start_s=float(track.frame_times[i]),
                    end_s=float(track.frame_times[j] + track.frame_duration),
                    peak_value=peak,
                    criterion_id=track.criterion_id,
                )
            )
        i = j + 1

    return DetectionReport(
        criterion_id=track.criterion_id,
        polarity=track.polarity,
        events=tuple(events),
        calibration_mean=mean,
        calibration_std=std,
        threshold_used=threshold,
        k_sigma=policy.k_sigma,
    )


def frame_truth_masks(
    frame_times: np.ndarray,
    frame_duration: float,
    bursts: Sequence[tuple[float, float]],
) -> tuple[np.ndarray, np.ndarray]:
    """Classify frames against truth bursts by overlap fraction.

    A frame counts as a signal frame when at least half of it overlaps a
    burst, and as a noise frame when it does not overlap any burst at all;
    frames in between belong to neither mask.
    """
    times = np.asarray(frame_times, dtype=np.float64)
    overlap = np.zeros_like(times)
    for start_s, end_s in bursts:
        lo = np.maximum(times, start_s)
        hi = np.minimum(times + frame_duration, end_s)
        overlap += np.maximum(hi - lo, 0.0)
    fraction = overlap / frame_duration
    return fraction >= 0.5, fraction <= 1e-12


def separation_margin(track: CriterionTrack, bursts: Sequence[tuple[float, float]]) -> float:
    """Distance between signal-frame and noise-frame means, in noise stds."""
    signal_mask, noise_mask = frame_truth_masks(track.frame_times, track.frame_duration, bursts)
    if not signal_mask.any() or not noise_mask.any():
        raise ValueError("bursts leave no usable signal or noise frames")
    mean_signal = float(track.values[signal_mask].mean())
    noise_values = track.values[noise_mask]
    mean_noise = float(noise_values.mean())
    std_noise = float(noise_values.std())
    gap = abs(mean_signal - mean_noise)
    if std_noise == 0.0:
        return math.inf if gap > 0.0 else 0.0
    return gap / std_noise


def _event_overlaps_burst(
    event: DetectionEvent, bursts: Sequence[tuple[float, float]], min_fraction: float = 0.5
) -> bool:
    for start_s, end_s in bursts:
        overlap = max(0.0, min(event.end_s, end_s) - max(event.start_s, start_s))
        if overlap >= min_fraction * (end_s - start_s):
            return True
    return False


def sweep(
    synth: SynthSpec,
    sample_rate: int,
    duration_s: float,
    sigmas: Sequence[float] = DEFAULT_SWEEP_SIGMAS,
    criteria_ids: Sequence[str] = ("h_pt", "h_p0", "h_ps", "sid", "jsd", "c_sq", "c_jsd"),
    seed: int = 0,
    config: AnalysisConfig = AnalysisConfig(),
    policy: ThresholdPolicy = ThresholdPolicy(),
) -> list[SweepRow]:
    """Benchmark every criterion across noise levels against known truth.

    For each sigma the same seed (hence the same standardized noise draw)
    is mixed with the clean signal; each criterion's track is scored by
    its separation margin and by whether detection recovers at least one
    event covering half of a truth burst.
    """
    clean = synthesize(synth, sample_rate, duration_s)
    rows = []
    for sigma in sigmas:
        noise = generate_white_noise(NoiseSpec(sigma=float(sigma), seed=seed), len(clean), sample_rate)
        mixed = mix(clean, noise, synth.bursts).buffer
        run_config = config
        if any(CRITERIA[c].needs_noise_params for c in criteria_ids):
            run_config = replace(config, noise_params=estimate_noise_sigma(mixed, _leading_seconds(policy)))
        tracks = run_criteria(mixed, criteria_ids, run_config)
        for track in tracks:
            margin = separation_margin(track, synth.bursts)
            report = detect(track, policy)
            detected = any(_event_overlaps_burst(e, synth.bursts) for e in report.events)
            rows.append(
                SweepRow(
                    sigma=float(sigma),
                    criterion_id=track.criterion_id,
                    separation_margin=margin,
                    detected=detected,
                )
            )
    return rows


def _leading_seconds(policy: ThresholdPolicy) -> float:
    if isinstance(policy.calibration, tuple):
        raise ValueError("noise estimation from a frame-range calibration needs explicit seconds")
    return float(policy.calibration)


def estimate_noise_sigma(
    buf: SignalBuffer, region: float | tuple[float, float]
) -> GaussianParams:
    """Sample mean and std over a noise-only region of the buffer.

    The region is a leading duration in seconds, or an explicit
    (start_s, end_s) pair. A constant region has no usable variance and
    raises CalibrationError.
    """
    if isinstance(region, tuple):
        start_s, end_s = region
    else:
        start_s, end_s = 0.0, float(region)
    i0 = max(int(round(start_s * buf.sample_rate)), 0)
    i1 = min(int(round(end_s * buf.sample_rate)), len(buf))
    chunk = buf.samples[i0:i1]
    if chunk.size < 2:
        raise CalibrationError("calibration region holds fewer than 2 samples")
    sigma = float(chunk.std())
    if sigma == 0.0:
        raise CalibrationError("calibration region is constant; sigma estimate is zero")
    return GaussianParams(mu=float(chunk.mean()), sigma=sigma)
