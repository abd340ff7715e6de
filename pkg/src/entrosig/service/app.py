"""FastAPI application wrapping the core analysis package.

All endpoints delegate straight to the library; the service adds only
validation and serialization. Infinite SNR values are serialized as null.
"""

from __future__ import annotations

import math

from fastapi import FastAPI
from fastapi.responses import JSONResponse

import entrosig
from entrosig import pipeline, verification
from entrosig.criteria import GaussianParams
from entrosig.pipeline import (
    AnalysisConfig,
    NoiseSpec,
    SignalBuffer,
    SynthSpec,
    ThresholdPolicy,
)
from entrosig.service import schemas


def _synth_spec(model: schemas.SynthModel) -> SynthSpec:
    kwargs = dict(
        kind=model.kind,
        carrier_hz=model.carrier_hz,
        bursts=tuple(tuple(b) for b in model.bursts),
        amplitude=model.amplitude,
        sweep_to_hz=model.sweep_to_hz,
    )
    if model.harmonics is not None:
        kwargs["harmonics"] = tuple(model.harmonics)
    return SynthSpec(**kwargs)


def _build_buffer(source: schemas.SignalSource) -> tuple[SignalBuffer, float | None]:
    if source.samples is not None:
        return SignalBuffer(source.samples, source.sample_rate), None
    spec = _synth_spec(source.synth)
    clean = pipeline.synthesize(spec, source.sample_rate, source.duration_s)
    if source.noise is None:
        return clean, None
    noise = pipeline.generate_white_noise(
        NoiseSpec(sigma=source.noise.sigma, seed=source.noise.seed),
        len(clean),
        source.sample_rate,
    )
    mixed = pipeline.mix(clean, noise, spec.bursts)
    return mixed.buffer, mixed.snr_db


def _analysis_config(
    model: schemas.AnalysisModel, noise_params: GaussianParams | None = None
) -> AnalysisConfig:
    return AnalysisConfig(
        window=model.window,
        hop=model.hop,
        n_fft=model.n_fft,
        n_levels=model.n_levels,
        transform=model.transform,
        sidedness=model.sidedness,
        window_function=model.window_function,
        noise_params=noise_params,
    )


def _policy(model: schemas.PolicyModel) -> ThresholdPolicy:
    return ThresholdPolicy(
        calibration=model.calib_secs,
        k_sigma=model.k_sigma,
        min_event_frames=model.min_event_frames,
    )


def _finite_or_none(value: float | None) -> float | None:
    if value is None or not math.isfinite(value):
        return None
    return value


def create_app() -> FastAPI:
    app = FastAPI(title="entrosig service", version=entrosig.__version__)

    @app.exception_handler(ValueError)
    async def _value_error(request, exc: ValueError):
        return JSONResponse(status_code=400, content={"detail": str(exc)})

    @app.get("/health", response_model=schemas.HealthResponse)
    def health():
        return schemas.HealthResponse(status="ok", version=entrosig.__version__)

    @app.post("/analyze", response_model=schemas.AnalyzeResponse)
    def analyze(request: schemas.AnalyzeRequest):
        buf, _ = _build_buffer(request.source)
        noise_params = None
        if "lh" in request.criteria:
            noise_params = pipeline.estimate_noise_sigma(buf, request.calib_secs)
        tracks = pipeline.run_criteria(
            buf, request.criteria, _analysis_config(request.analysis, noise_params)
        )
        models = []
        for track in tracks:
            normalized = pipeline.normalize_track(track)
            models.append(
                schemas.TrackModel(
                    criterion_id=track.criterion_id,
                    polarity=track.polarity,
                    frame_start_s=track.frame_times.tolist(),
                    frame_duration_s=track.frame_duration,
                    values=track.values.tolist(),
                    normalized_values=normalized.values.tolist(),
                )
            )
        return schemas.AnalyzeResponse(
            sample_rate=buf.sample_rate,
            n_frames=len(tracks[0]) if tracks else 0,
            tracks=models,
        )

    @app.post("/detect", response_model=schemas.DetectResponse)
    def detect(request: schemas.DetectRequest):
        buf, _ = _build_buffer(request.source)
        noise_params = None
        if request.criterion == "lh":
            noise_params = pipeline.estimate_noise_sigma(buf, request.policy.calib_secs)
        (track,) = pipeline.run_criteria(
            buf, [request.criterion], _analysis_config(request.analysis, noise_params)
        )
        report = pipeline.detect(track, _policy(request.policy))
        return schemas.DetectResponse(
            schema_version=1,
            criterion=report.criterion_id,
            polarity=report.polarity,
            events=[
                schemas.EventModel(
                    start_s=e.start_s,
                    end_s=e.end_s,
                    peak_value=e.peak_value,
                    criterion_id=e.criterion_id,
                )
                for e in report.events
            ],
            calibration_mean=report.calibration_mean,
            calibration_std=report.calibration_std,
            threshold_used=report.threshold_used,
        )

    @app.post("/sweep", response_model=schemas.SweepResponse)
    def sweep(request: schemas.SweepRequest):
        rows = pipeline.sweep(
            _synth_spec(request.synth),
            request.sample_rate,
            request.duration_s,
            sigmas=request.sigmas,
            criteria_ids=request.criteria,
            seed=request.seed,
            config=_analysis_config(request.analysis),
            policy=_policy(request.policy),
        )
        return schemas.SweepResponse(
            rows=[
                schemas.SweepRowModel(
                    sigma=r.sigma,
                    criterion_id=r.criterion_id,
                    separation_margin=r.separation_margin,
                    detected=r.detected,
                )
                for r in rows
            ]
        )

    @app.post("/synthesize", response_model=schemas.SynthesizeResponse)
    def synthesize(request: schemas.SynthesizeRequest):
        source = schemas.SignalSource(
            synth=request.synth,
            sample_rate=request.sample_rate,
            duration_s=request.duration_s,
            noise=request.noise,
        )
        buf, snr_db = _build_buffer(source)
        return schemas.SynthesizeResponse(
            sample_rate=buf.sample_rate,
            samples=buf.samples.tolist(),
            snr_db=_finite_or_none(snr_db),
        )

    @app.post("/verify", response_model=schemas.VerifyResponse)
    def verify(seed: int = 0):
        results = verification.run_verification(seed=seed)
        return schemas.VerifyResponse(
            passed=verification.all_passed(results),
            checks=[
                schemas.CheckModel(
                    name=r.name,
                    passed=r.passed,
                    value=r.value,
                    threshold=r.threshold,
                    detail=r.detail,
                )
                for r in results
            ],
        )

    return app


app = create_app()
