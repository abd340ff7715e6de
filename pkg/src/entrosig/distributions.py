"""Probability distributions built from windowed samples of a signal.

Four families are supported, all returned as validated probability
vectors:

* amplitude-level histogram of a frame (relative occupancy of equal-width
  level bins),
* the normalized sample magnitudes themselves (one "letter" per sample),
* the level-grouped pair derived from the normalized samples (mass per
  level and occupancy per level),
* the normalized periodogram of a frame.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence, Union

import numpy as np

DEFAULT_WINDOW = 2048
DEFAULT_LEVELS = 64

AMPLITUDE_TRANSFORMS = ("absolute", "squared", "raw_shifted")
SIDEDNESS_MODES = ("one_sided", "two_sided")
WINDOW_FUNCTIONS = ("rectangular", "hann")

_SUM_TOL = 1e-9


class DegenerateDistributionError(ValueError):
    """The input carries no usable probability mass (e.g. an all-zero frame)."""


@dataclass(frozen=True, eq=False)
class DiscreteDistribution:
    """Finite probability vector: non-negative entries summing to 1.

    The entry array is copied and frozen on construction, so instances are
    immutable values that are safe to share across threads.
    """

    probs: np.ndarray

    def __post_init__(self) -> None:
        probs = np.array(self.probs, dtype=np.float64)
        if probs.ndim != 1 or probs.size < 1:
            raise ValueError("distribution must be a non-empty 1-D vector")
        if np.any(probs < 0.0):
            raise ValueError("distribution entries must be non-negative")
        total = float(probs.sum())
        if abs(total - 1.0) > _SUM_TOL:
            raise ValueError(f"distribution sums to {total}, expected 1.0 within {_SUM_TOL}")
        probs.setflags(write=False)
        object.__setattr__(self, "probs", probs)

    @property
    def size(self) -> int:
        return int(self.probs.size)

    @classmethod
    def from_weights(cls, weights) -> "DiscreteDistribution":
        """Normalize non-negative weights into a distribution.

        Raises DegenerateDistributionError when the weights sum to zero.
        """
        w = np.asarray(weights, dtype=np.float64)
        if np.any(w < 0.0):
            raise ValueError("weights must be non-negative")
        total = float(w.sum())
        if total <= 0.0:
            raise DegenerateDistributionError("weights sum to zero")
        return cls(w / total)

    @classmethod
    def uniform(cls, n: int) -> "DiscreteDistribution":
        if n < 1:
            raise ValueError("n must be positive")
        return cls(np.full(n, 1.0 / n))

    @classmethod
    def delta(cls, n: int, index: int = 0) -> "DiscreteDistribution":
        if not 0 <= index < n:
            raise ValueError("index out of range")
        probs = np.zeros(n)
        probs[index] = 1.0
        return cls(probs)


@dataclass(frozen=True, eq=False)
class SignalBuffer:
    """Contiguous real samples with sample-rate metadata.

    Samples stay in whatever amplitude scale the source used (e.g. native
    16-bit integer range for WAV input); nothing here rescales them.
    """

    samples: np.ndarray
    sample_rate: int

    def __post_init__(self) -> None:
        samples = np.array(self.samples, dtype=np.float64)
        if samples.ndim != 1:
            raise ValueError("samples must be 1-D")
        rate = int(self.sample_rate)
        if rate <= 0:
            raise ValueError("sample_rate must be positive")
        samples.setflags(write=False)
        object.__setattr__(self, "samples", samples)
        object.__setattr__(self, "sample_rate", rate)

    def __len__(self) -> int:
        return int(self.samples.size)

    @property
    def duration_s(self) -> float:
        return self.samples.size / self.sample_rate


@dataclass(frozen=True, eq=False)
class Frame:
    """One analysis window of samples with its position in the parent buffer."""

    samples: np.ndarray
    start_index: int
    start_time: float

    def __post_init__(self) -> None:
        samples = np.asarray(self.samples, dtype=np.float64)
        if samples.ndim != 1 or samples.size < 1:
            raise ValueError("frame samples must be a non-empty 1-D vector")
        object.__setattr__(self, "samples", samples)

    def __len__(self) -> int:
        return int(self.samples.size)


@dataclass(frozen=True)
class HistogramConfig:
    """Alphabet size and amplitude transform for the time-domain distributions."""

    n_levels: int = DEFAULT_LEVELS
    amplitude_transform: str = "absolute"

    def __post_init__(self) -> None:
        if self.n_levels < 2:
            raise ValueError("n_levels must be at least 2")
        if self.amplitude_transform not in AMPLITUDE_TRANSFORMS:
            raise ValueError(f"unknown amplitude transform {self.amplitude_transform!r}")


@dataclass(frozen=True)
class SpectralConfig:
    """Transform size, sidedness and taper for the spectral distribution."""

    n_fft: int
    sidedness: str = "one_sided"
    window_function: str = "rectangular"

    def __post_init__(self) -> None:
        if self.n_fft < 2:
            raise ValueError("n_fft must be at least 2")
        if self.sidedness not in SIDEDNESS_MODES:
            raise ValueError(f"unknown sidedness {self.sidedness!r}")
        if self.window_function not in WINDOW_FUNCTIONS:
            raise ValueError(f"unknown window function {self.window_function!r}")

    @property
    def n_bins(self) -> int:
        return self.n_fft // 2 + 1 if self.sidedness == "one_sided" else self.n_fft


FrameLike = Union[Frame, Sequence[float], np.ndarray]


def _frame_samples(frame: FrameLike) -> np.ndarray:
    if isinstance(frame, Frame):
        return frame.samples
    samples = np.asarray(frame, dtype=np.float64)
    if samples.ndim != 1 or samples.size < 1:
        raise ValueError("frame must be a non-empty 1-D sample vector")
    return samples


def frame_signal(
    buf: SignalBuffer,
    window: int = DEFAULT_WINDOW,
    hop: int | None = None,
    *,
    pad_tail: bool = False,
) -> list[Frame]:
    """Split a buffer into frames of `window` samples every `hop` samples.

    Frame k starts at sample k*hop. By default the incomplete tail is
    dropped; with pad_tail=True trailing partial frames are zero-padded to
    the full window length.
    """
    n = len(buf)
    if n == 0:
        raise ValueError("cannot frame an empty buffer")
    if window < 1 or window > n:
        raise ValueError(f"window must be in [1, {n}], got {window}")
    hop = window if hop is None else hop
    if hop < 1:
        raise ValueError("hop must be at least 1")

    starts = list(range(0, n - window + 1, hop))
    padded_from = len(starts)
    if pad_tail:
        nxt = starts[-1] + hop if starts else 0
        while nxt < n:
            starts.append(nxt)
            nxt += hop

    rate = buf.sample_rate
    frames = []
    for k, start in enumerate(starts):
        if k < padded_from:
            chunk = buf.samples[start : start + window]
        else:
            chunk = np.zeros(window)
            tail = buf.samples[start:]
            chunk[: tail.size] = tail
        frames.append(Frame(samples=chunk, start_index=start, start_time=start / rate))
    return frames


def dist_time_histogram(
    frame: FrameLike, cfg: HistogramConfig | None = None
) -> DiscreteDistribution:
    """Relative occupancy of equal-width amplitude levels over [min, max].

    Values exactly on an interior bin edge fall in the higher bin and the
    top bin is right-closed (np.histogram convention). A zero-range frame
    yields the delta distribution in the first bin, so its entropy is 0.
    """
    x = _frame_samples(frame)
    cfg = cfg or HistogramConfig()
    lo, hi = float(x.min()), float(x.max())
    if lo == hi:
        return DiscreteDistribution.delta(cfg.n_levels, 0)
    counts, _ = np.histogram(x, bins=cfg.n_levels, range=(lo, hi))
    return DiscreteDistribution(counts / x.size)


def dist_time_samples(frame: FrameLike, transform: str = "absolute") -> DiscreteDistribution:
    """Normalize the (transformed) samples themselves into a distribution.

    Each sample is one "letter": entry i is g(x_i) / sum_k g(x_k) where g
    is the configured non-negative transform. The default absolute value
    keeps the normalization well defined for signed audio.
    """
    x = _frame_samples(frame)
    if transform == "absolute":
        g = np.abs(x)
    elif transform == "squared":
        g = x * x
    elif transform == "raw_shifted":
        g = x - x.min()
    else:
        raise ValueError(f"unknown amplitude transform {transform!r}")
    total = float(g.sum())
    if total <= 0.0:
        raise DegenerateDistributionError(
            "transformed frame has zero total mass; cannot form a sample distribution"
        )
    return DiscreteDistribution(g / total)


def grouping_edges(max_prob: float, n_levels: int) -> np.ndarray:
    """Level-bin edges for grouping sample probabilities: j * max/n for j=0..n."""
    return np.arange(n_levels + 1) * (max_prob / n_levels)


def dist_time_grouped(
    p0: DiscreteDistribution, n_levels: int = DEFAULT_LEVELS
) -> tuple[DiscreteDistribution, DiscreteDistribution]:
    """Group sample probabilities into amplitude levels.

    Level j (1-based) covers sample probabilities in
    [(j-1)/n * max, j/n * max]. The first return value carries the summed
    probability mass per level; the second the relative occupancy count
    per level. Values on a shared interior edge go to the higher level;
    the top edge belongs to the last level.
    """
    if n_levels < 2:
        raise ValueError("n_levels must be at least 2")
    probs = p0.probs
    top = float(probs.max())
    if top <= 0.0:
        raise DegenerateDistributionError("sample distribution has zero maximum")
    edges = grouping_edges(top, n_levels)
    # searchsorted(side="right") sends an exact interior edge to the higher
    # bin; the clip sends the top edge into the last bin.
    idx = np.searchsorted(edges, probs, side="right")
    idx = np.clip(idx, 1, n_levels) - 1
    mass = np.bincount(idx, weights=probs, minlength=n_levels)
    counts = np.bincount(idx, minlength=n_levels)
    p1 = DiscreteDistribution(mass / mass.sum())
    pt = DiscreteDistribution(counts / probs.size)
    return p1, pt


def spectral_power_density(samples: np.ndarray, cfg: SpectralConfig) -> np.ndarray:
    """Per-bin spectral power of one frame, |X_i|^2 / n_fft with unitary X.

    Frames shorter than n_fft are zero-padded; longer frames are an error.
    With the rectangular window the two-sided bins sum to
    sum(x^2) / n_fft (Parseval).
    """
    x = np.asarray(samples, dtype=np.float64)
    if x.size > cfg.n_fft:
        raise ValueError(f"frame of {x.size} samples exceeds n_fft={cfg.n_fft}")
    if cfg.window_function == "hann":
        x = x * np.hanning(x.size)
    if cfg.sidedness == "one_sided":
        spectrum = np.fft.rfft(x, cfg.n_fft)
    else:
        spectrum = np.fft.fft(x, cfg.n_fft)
    return np.abs(spectrum) ** 2 / float(cfg.n_fft) ** 2


def dist_spectral(frame: FrameLike, cfg: SpectralConfig | None = None) -> DiscreteDistribution:
    """Normalized periodogram of a frame.

    One-sided mode covers DC..Nyquist (n_fft/2 + 1 bins); two-sided mode
    keeps all n_fft bins. Amplitude scaling of the input cancels in the
    normalization. An all-zero frame has no spectral mass and raises
    DegenerateDistributionError.
    """
    x = _frame_samples(frame)
    cfg = cfg or SpectralConfig(n_fft=x.size)
    power = spectral_power_density(x, cfg)
    total = float(power.sum())
    if total <= 0.0:
        raise DegenerateDistributionError("frame has zero spectral power")
    return DiscreteDistribution(power / total)
