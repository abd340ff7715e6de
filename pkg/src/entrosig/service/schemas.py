"""Pydantic request/response models for the HTTP service."""

from __future__ import annotations

from typing import Literal, Optional

from pydantic import BaseModel, Field, model_validator


class SynthModel(BaseModel):
    kind: Literal["tone_burst", "chirp", "multi_tone"]
    carrier_hz: float = Field(gt=0)
    amplitude: float = Field(ge=0)
    bursts: list[tuple[float, float]]
    sweep_to_hz: Optional[float] = None
    harmonics: Optional[list[float]] = None


class NoiseModel(BaseModel):
    sigma: float = Field(ge=0)
    seed: int = 0


class SignalSource(BaseModel):
    """Either inline samples or a synthetic spec (optionally with noise)."""

    samples: Optional[list[float]] = None
    sample_rate: int = Field(default=48000, gt=0)
    synth: Optional[SynthModel] = None
    noise: Optional[NoiseModel] = None
    duration_s: Optional[float] = None

    @model_validator(mode="after")
    def _check_source(self):
        if (self.samples is None) == (self.synth is None):
            raise ValueError("provide exactly one of samples or synth")
        if self.synth is not None and (self.duration_s is None or self.duration_s <= 0):
            raise ValueError("a synth source needs a positive duration_s")
        return self


class AnalysisModel(BaseModel):
    window: int = Field(default=2048, ge=1)
    hop: Optional[int] = Field(default=None, ge=1)
    n_fft: Optional[int] = Field(default=None, ge=2)
    n_levels: int = Field(default=64, ge=2)
    transform: Literal["absolute", "squared", "raw_shifted"] = "absolute"
    sidedness: Literal["one_sided", "two_sided"] = "one_sided"
    window_function: Literal["rectangular", "hann"] = "rectangular"


class PolicyModel(BaseModel):
    calib_secs: float = Field(default=2.0, gt=0)
    k_sigma: float = Field(default=3.0, gt=0)
    min_event_frames: int = Field(default=2, ge=1)


class AnalyzeRequest(BaseModel):
    source: SignalSource
    criteria: list[str] = ["h_ps", "c_sq"]
    analysis: AnalysisModel = AnalysisModel()
    calib_secs: float = Field(default=2.0, gt=0)


class TrackModel(BaseModel):
    criterion_id: str
    polarity: str
    frame_start_s: list[float]
    frame_duration_s: float
    values: list[float]
    normalized_values: list[float]


class AnalyzeResponse(BaseModel):
    sample_rate: int
    n_frames: int
    tracks: list[TrackModel]


class DetectRequest(BaseModel):
    source: SignalSource
    criterion: str = "c_sq"
    analysis: AnalysisModel = AnalysisModel()
    policy: PolicyModel = PolicyModel()


class EventModel(BaseModel):
    start_s: float
    end_s: float
    peak_value: float
    criterion_id: str


class DetectResponse(BaseModel):
    schema_version: int
    criterion: str
    polarity: str
    events: list[EventModel]
    calibration_mean: float
    calibration_std: float
    threshold_used: float


class SweepRequest(BaseModel):
    synth: SynthModel
    sample_rate: int = Field(default=48000, gt=0)
    duration_s: float = Field(gt=0)
    sigmas: list[float] = [500.0, 1000.0, 2000.0, 4000.0]
    criteria: list[str] = ["h_pt", "h_p0", "h_ps", "sid", "jsd", "c_sq", "c_jsd"]
    seed: int = 0
    analysis: AnalysisModel = AnalysisModel()
    policy: PolicyModel = PolicyModel()


class SweepRowModel(BaseModel):
    sigma: float
    criterion_id: str
    separation_margin: float
    detected: bool


class SweepResponse(BaseModel):
    rows: list[SweepRowModel]


class SynthesizeRequest(BaseModel):
    synth: SynthModel
    sample_rate: int = Field(default=48000, gt=0)
    duration_s: float = Field(gt=0)
    noise: Optional[NoiseModel] = None


class SynthesizeResponse(BaseModel):
    sample_rate: int
    samples: list[float]
    snr_db: Optional[float] = None


class CheckModel(BaseModel):
    name: str
    passed: bool
    value: float
    threshold: float
    detail: str


class VerifyResponse(BaseModel):
    passed: bool
    checks: list[CheckModel]


class HealthResponse(BaseModel):
    status: str
    version: str
