"""Windowed information criteria for detecting signals buried in noise.

The package computes time and spectral entropies, divergences,
disequilibrium and statistical complexity over sliding windows of a
sampled signal, and thresholds them against noise-calibrated statistics
to flag where a useful signal appears.
"""

from entrosig.criteria import (
    GaussianParams,
    SupportMismatchError,
    c_general,
    c_jsd,
    c_sq,
    cross_entropy,
    d_sq,
    disequilibrium,
    entropy,
    gaussian_disequilibrium,
    gaussian_entropy,
    gaussian_lh,
    jsd,
    kl_divergence,
    lh,
    normalized_entropy,
    sid,
    symmetrized_kl,
)
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
from entrosig.multidim import (
    ProductDistribution2D,
    complexity_2d,
    complexity_2d_factored,
    disequilibrium_2d_direct,
    disequilibrium_2d_factored,
    entropy_2d,
)
from entrosig.pipeline import (
    AnalysisConfig,
    CalibrationError,
    CriterionTrack,
    DetectionEvent,
    DetectionReport,
    NoiseSpec,
    SynthSpec,
    ThresholdPolicy,
    detect,
    estimate_noise_sigma,
    generate_white_noise,
    mix,
    normalize_track,
    run_criteria,
    separation_margin,
    sweep,
    synthesize,
)
from entrosig.variation import (
    connection_check,
    entropy_variation,
    gaussianity_check,
    grouping_stability,
    decompose_entropy_variation,
    residual_order_check,
)
from entrosig.wavio import WavFormatError, read_wav, write_wav

__version__ = "0.1.0"
