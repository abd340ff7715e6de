"""Batch command-line front end.

Subcommands: analyze (criterion tracks as CSV), detect (thresholded events
as JSON), sweep (noise-level benchmark as CSV), verify (built-in identity
checks), synth (write a synthetic WAV), serve (run the HTTP service).

Settings merge in three layers: built-in defaults, then a flat key=value
config file (--config), then explicit flags. Exit codes: 0 success,
1 verification or detection-policy failure, 2 usage/parse errors.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import os
import sys
from dataclasses import dataclass

import numpy as np

from entrosig import pipeline, verification, wavio
from entrosig.pipeline import (
    AnalysisConfig,
    CalibrationError,
    NoiseSpec,
    SignalBuffer,
    SynthSpec,
    ThresholdPolicy,
)
from entrosig.wavio import WavFormatError

EXIT_OK = 0
EXIT_CHECK_FAILED = 1
EXIT_USAGE = 2

ENV_SEED = "ENTROSIG_SEED"
SCHEMA_VERSION = 1

DEFAULT_CRITERIA_ANALYZE = ("h_ps", "c_sq")
DEFAULT_CRITERIA_DETECT = ("c_sq",)
DEFAULT_CRITERIA_SWEEP = ("h_pt", "h_p0", "h_ps", "sid", "jsd", "c_sq", "c_jsd")


class UsageError(Exception):
    """Bad flags, config values or input specs; maps to exit code 2."""


@dataclass(frozen=True)
class RunConfig:
    """Fully merged run settings for one subcommand invocation."""

    input: str | None
    synth: str | None
    window: int
    n_fft: int | None
    hop: int | None
    levels: int
    criteria: tuple[str, ...]
    sigma: tuple[float, ...]
    seed: int
    k_sigma: float
    calib_secs: float
    min_event_frames: int
    fmt: str
    output: str | None
    pow2: bool

    def __post_init__(self) -> None:
        if self.pow2:
            for name, value in (("window", self.window), ("n-fft", self.n_fft)):
                if value is not None and value & (value - 1):
                    raise UsageError(
                        f"--{name} must be a power of two (got {value}); pass --pow2 off to allow any size"
                    )
        unknown = [c for c in self.criteria if c not in pipeline.CRITERIA]
        if unknown:
            raise UsageError(
                f"unknown criteria {unknown}; available: {', '.join(pipeline.criterion_ids())}"
            )

    def analysis_config(self, noise_params=None) -> AnalysisConfig:
        return AnalysisConfig(
            window=self.window,
            hop=self.hop,
            n_fft=self.n_fft,
            n_levels=self.levels,
            noise_params=noise_params,
        )

    def policy(self) -> ThresholdPolicy:
        return ThresholdPolicy(
            calibration=self.calib_secs,
            k_sigma=self.k_sigma,
            min_event_frames=self.min_event_frames,
        )


_DEFAULTS = {
    "input": None,
    "synth": None,
    "window": "2048",
    "n_fft": None,
    "hop": None,
    "levels": "64",
    "criteria": None,
    "sigma": None,
    "seed": None,
    "k_sigma": "3.0",
    "calib_secs": "2.0",
    "min_event_frames": "2",
    "format": None,
    "output": None,
    "pow2": "on",
}


def parse_config_file(path: str) -> dict[str, str]:
    """Flat key = value lines mirroring the flags; '#' starts a comment."""
    entries: dict[str, str] = {}
    try:
        text = open(path, encoding="utf-8").read()
    except OSError as exc:
        raise UsageError(f"cannot read config file: {exc}") from exc
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise UsageError(f"{path}:{lineno}: expected key = value")
        key, value = line.split("=", 1)
        key = key.strip().replace("-", "_")
        if key not in _DEFAULTS:
            raise UsageError(f"{path}:{lineno}: unknown config key {key!r}")
        entries[key] = value.strip()
    return entries


def parse_synth_spec(text: str) -> tuple[SynthSpec, int, float]:
    """Parse a synth spec string.

    Comma-separated key=value pairs: kind, carrier, amplitude, rate,
    duration, bursts (semicolon-separated start-end pairs, default the
    whole duration), and optionally sweep_to and harmonics (colon-
    separated multipliers). Example:

        kind=tone_burst,carrier=6000,amplitude=500,rate=48000,duration=12,bursts=3-5;7-9.5
    """
    fields: dict[str, str] = {}
    for part in text.split(","):
        part = part.strip()
        if not part:
            continue
        if "=" not in part:
            raise UsageError(f"synth spec entry {part!r} is not key=value")
        key, value = part.split("=", 1)
        fields[key.strip()] = value.strip()

    required = ("kind", "carrier", "rate", "duration")
    missing = [k for k in required if k not in fields]
    if missing:
        raise UsageError(f"synth spec is missing {missing}")
    try:
        rate = int(fields["rate"])
        duration = float(fields["duration"])
        carrier = float(fields["carrier"])
        amplitude = float(fields.get("amplitude", "1.0"))
        if "bursts" in fields:
            bursts = []
            for chunk in fields["bursts"].split(";"):
                start_s, end_s = chunk.split("-", 1)
                bursts.append((float(start_s), float(end_s)))
        else:
            bursts = [(0.0, duration)]
        sweep_to = float(fields["sweep_to"]) if "sweep_to" in fields else None
        harmonics = (
            tuple(float(h) for h in fields["harmonics"].split(":"))
            if "harmonics" in fields
            else (1.0, 2.0, 3.0)
        )
        spec = SynthSpec(
            kind=fields["kind"],
            carrier_hz=carrier,
            bursts=tuple(bursts),
            amplitude=amplitude,
            sweep_to_hz=sweep_to,
            harmonics=harmonics,
        )
    except (ValueError, TypeError) as exc:
        raise UsageError(f"bad synth spec: {exc}") from exc
    if rate < 1 or duration <= 0.0:
        raise UsageError("synth spec needs rate >= 1 and duration > 0")
    return spec, rate, duration


def _merge_config(args: argparse.Namespace, default_criteria: tuple[str, ...]) -> RunConfig:
    merged = dict(_DEFAULTS)
    if getattr(args, "config", None):
        merged.update(parse_config_file(args.config))
    for key in _DEFAULTS:
        flag_value = getattr(args, key, None)
        if flag_value is not None:
            merged[key] = flag_value

    def opt_int(key):
        return None if merged[key] is None else int(merged[key])

    try:
        criteria = (
            tuple(c.strip() for c in merged["criteria"].split(",") if c.strip())
            if merged["criteria"]
            else default_criteria
        )
        sigma = (
            tuple(float(s) for s in str(merged["sigma"]).split(","))
            if merged["sigma"] is not None
            else ()
        )
        if merged["seed"] is not None:
            seed = int(merged["seed"])
        elif os.environ.get(ENV_SEED):
            seed = int(os.environ[ENV_SEED])
        else:
            seed = 0
        return RunConfig(
            input=merged["input"],
            synth=merged["synth"],
            window=int(merged["window"]),
            n_fft=opt_int("n_fft"),
            hop=opt_int("hop"),
            levels=int(merged["levels"]),
            criteria=criteria,
            sigma=sigma,
            seed=seed,
            k_sigma=float(merged["k_sigma"]),
            calib_secs=float(merged["calib_secs"]),
            min_event_frames=int(merged["min_event_frames"]),
            fmt=merged["format"] or "csv",
            output=merged["output"],
            pow2=str(merged["pow2"]).lower() not in ("off", "false", "0", "no"),
        )
    except UsageError:
        raise
    except (ValueError, TypeError) as exc:
        raise UsageError(f"bad setting: {exc}") from exc


def _build_source(cfg: RunConfig) -> tuple[SignalBuffer, dict]:
    """Load or synthesize the input buffer, returning it with a config echo."""
    if cfg.input and cfg.synth:
        raise UsageError("pass either --input or --synth, not both")
    if cfg.input:
        buf = wavio.read_wav(cfg.input)
        return buf, {"input": cfg.input}
    if cfg.synth:
        spec, rate, duration = parse_synth_spec(cfg.synth)
        clean = pipeline.synthesize(spec, rate, duration)
        echo: dict = {"synth": cfg.synth}
        if cfg.sigma:
            if len(cfg.sigma) != 1:
                raise UsageError("this command takes a single --sigma value")
            noise = pipeline.generate_white_noise(
                NoiseSpec(sigma=cfg.sigma[0], seed=cfg.seed), len(clean), rate
            )
            mixed = pipeline.mix(clean, noise, spec.bursts)
            echo.update({"sigma": cfg.sigma[0], "seed": cfg.seed, "snr_db": mixed.snr_db})
            return mixed.buffer, echo
        return clean, echo
    raise UsageError("an input is required: pass --input FILE.wav or --synth SPEC")


def _fmt(value) -> str:
    if isinstance(value, float):
        return f"{value:.12g}"
    if isinstance(value, (bool, np.bool_)):
        return "true" if value else "false"
    return str(value)


def _round12(obj):
    if isinstance(obj, float):
        return float(f"{obj:.12g}") if math.isfinite(obj) else str(obj)
    if isinstance(obj, dict):
        return {k: _round12(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_round12(v) for v in obj]
    return obj


def _emit(text: str, output: str | None) -> None:
    if output:
        with open(output, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _config_echo(cfg: RunConfig, source: dict) -> dict:
    return {
        **source,
        "window": cfg.window,
        "n_fft": cfg.n_fft if cfg.n_fft is not None else cfg.window,
        "hop": cfg.hop if cfg.hop is not None else cfg.window,
        "levels": cfg.levels,
        "criteria": list(cfg.criteria),
        "k_sigma": cfg.k_sigma,
        "calib_secs": cfg.calib_secs,
        "min_event_frames": cfg.min_event_frames,
    }


def cmd_analyze(cfg: RunConfig) -> int:
    buf, _ = _build_source(cfg)
    noise_params = None
    if "lh" in cfg.criteria:
        noise_params = pipeline.estimate_noise_sigma(buf, cfg.calib_secs)
    tracks = pipeline.run_criteria(buf, cfg.criteria, cfg.analysis_config(noise_params))

    out = io.StringIO()
    writer = csv.writer(out, lineterminator="\n")
    header = ["frame_start_s", "frame_end_s"]
    for track in tracks:
        header += [track.criterion_id, f"{track.criterion_id}_norm"]
    writer.writerow(header)
    normalized = [pipeline.normalize_track(t) for t in tracks]
    first = tracks[0]
    for i in range(len(first)):
        row = [_fmt(float(first.frame_times[i])), _fmt(float(first.frame_times[i] + first.frame_duration))]
        for raw, norm in zip(tracks, normalized):
            row += [_fmt(float(raw.values[i])), _fmt(float(norm.values[i]))]
        writer.writerow(row)
    _emit(out.getvalue(), cfg.output)
    return EXIT_OK


def cmd_detect(cfg: RunConfig) -> int:
    if len(cfg.criteria) != 1:
        raise UsageError("detect uses exactly one criterion (default c_sq)")
    buf, source = _build_source(cfg)
    noise_params = None
    if "lh" in cfg.criteria:
        noise_params = pipeline.estimate_noise_sigma(buf, cfg.calib_secs)
    (track,) = pipeline.run_criteria(buf, cfg.criteria, cfg.analysis_config(noise_params))
    report = pipeline.detect(track, cfg.policy())

    payload = {
        "schema_version": SCHEMA_VERSION,
        "criterion": report.criterion_id,
        "polarity": report.polarity,
        "events": [
            {
                "start_s": e.start_s,
                "end_s": e.end_s,
                "peak_value": e.peak_value,
                "criterion_id": e.criterion_id,
            }
            for e in report.events
        ],
        "calibration_mean": report.calibration_mean,
        "calibration_std": report.calibration_std,
        "threshold_used": report.threshold_used,
        "config": _config_echo(cfg, source),
    }
    _emit(json.dumps(_round12(payload), indent=2) + "\n", cfg.output)
    return EXIT_OK


def cmd_sweep(cfg: RunConfig) -> int:
    if not cfg.synth:
        raise UsageError("sweep needs --synth SPEC")
    spec, rate, duration = parse_synth_spec(cfg.synth)
    sigmas = cfg.sigma if cfg.sigma else pipeline.DEFAULT_SWEEP_SIGMAS
    rows = pipeline.sweep(
        spec,
        rate,
        duration,
        sigmas=sigmas,
        criteria_ids=cfg.criteria,
        seed=cfg.seed,
        config=cfg.analysis_config(),
        policy=cfg.policy(),
    )
    out = io.StringIO()
    writer = csv.writer(out, lineterminator="\n")
    writer.writerow(["sigma", "criterion", "separation_margin", "detected"])
    for row in rows:
        writer.writerow(
            [_fmt(row.sigma), row.criterion_id, _fmt(row.separation_margin), _fmt(row.detected)]
        )
    _emit(out.getvalue(), cfg.output)
    return EXIT_OK


def cmd_verify(cfg: RunConfig) -> int:
    results = verification.run_verification(seed=cfg.seed)
    passed = verification.all_passed(results)
    if cfg.fmt == "json":
        payload = {
            "passed": passed,
            "checks": [
                {
                    "name": r.name,
                    "passed": r.passed,
                    "value": r.value,
                    "threshold": r.threshold,
                    "detail": r.detail,
                }
                for r in results
            ],
        }
        _emit(json.dumps(_round12(payload), indent=2) + "\n", cfg.output)
    else:
        lines = []
        for r in results:
            status = "PASS" if r.passed else "FAIL"
            lines.append(f"{status} {r.name}: value={r.value:.6g} threshold={r.threshold:.6g}")
        lines.append(f"{sum(r.passed for r in results)}/{len(results)} checks passed")
        _emit("\n".join(lines) + "\n", cfg.output)
    return EXIT_OK if passed else EXIT_CHECK_FAILED


def cmd_synth(cfg: RunConfig) -> int:
    if not cfg.synth:
        raise UsageError("synth needs --synth SPEC")
    if not cfg.output:
        raise UsageError("synth needs --output FILE.wav")
    buf, source = _build_source(cfg)
    wavio.write_wav(cfg.output, buf)
    snr = source.get("snr_db")
    suffix = f", snr_db={snr:.2f}" if isinstance(snr, float) and math.isfinite(snr) else ""
    print(f"wrote {cfg.output} ({len(buf)} samples at {buf.sample_rate} Hz{suffix})")
    return EXIT_OK


def cmd_serve(args: argparse.Namespace) -> int:
    import uvicorn

    uvicorn.run("entrosig.service.app:app", host=args.host, port=args.port)
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="entrosig", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="flat key=value settings file; flags override it")
    common.add_argument("--input", help="input WAV file")
    common.add_argument("--synth", help="synthetic source spec (see analyze --help)")
    common.add_argument("--window", help="frame length W in samples")
    common.add_argument("--n-fft", dest="n_fft", help="FFT size (default: window)")
    common.add_argument("--hop", help="frame hop in samples (default: window)")
    common.add_argument("--levels", help="alphabet size for time distributions")
    common.add_argument("--criteria", help="comma-separated criterion ids")
    common.add_argument("--sigma", help="noise std (comma-separated list for sweep)")
    common.add_argument("--seed", help=f"noise seed (fallback: ${ENV_SEED}, then 0)")
    common.add_argument("--k-sigma", dest="k_sigma", help="threshold multiplier")
    common.add_argument("--calib-secs", dest="calib_secs", help="leading calibration duration")
    common.add_argument(
        "--min-event-frames", dest="min_event_frames", help="shortest reported event"
    )
    common.add_argument("--format", choices=("csv", "json", "text"), help="output format")
    common.add_argument("--output", help="output path (default: stdout)")
    common.add_argument("--pow2", choices=("on", "off"), help="require power-of-two sizes")

    sub.add_parser("analyze", parents=[common], help="write criterion tracks as CSV")
    sub.add_parser("detect", parents=[common], help="threshold one criterion, report JSON events")
    sub.add_parser("sweep", parents=[common], help="noise-level benchmark table as CSV")
    sub.add_parser("verify", parents=[common], help="run the built-in identity checks")
    sub.add_parser("synth", parents=[common], help="write a synthetic (optionally noisy) WAV")

    serve = sub.add_parser("serve", help="run the HTTP service")
    serve.add_argument("--host", default="127.0.0.1")
    serve.add_argument("--port", type=int, default=8000)
    return parser


_DEFAULT_CRITERIA = {
    "analyze": DEFAULT_CRITERIA_ANALYZE,
    "detect": DEFAULT_CRITERIA_DETECT,
    "sweep": DEFAULT_CRITERIA_SWEEP,
    "verify": DEFAULT_CRITERIA_DETECT,
    "synth": DEFAULT_CRITERIA_DETECT,
}

_COMMANDS = {
    "analyze": cmd_analyze,
    "detect": cmd_detect,
    "sweep": cmd_sweep,
    "verify": cmd_verify,
    "synth": cmd_synth,
}


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    if args.command == "serve":
        return cmd_serve(args)
    try:
        cfg = _merge_config(args, _DEFAULT_CRITERIA[args.command])
        return _COMMANDS[args.command](cfg)
    except UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except WavFormatError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except CalibrationError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CHECK_FAILED
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
