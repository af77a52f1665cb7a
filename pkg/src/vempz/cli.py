"""``vempz`` command line: synth, analyze, mc, eval-sd."""

from __future__ import annotations

import argparse
import dataclasses
import json
import sys
from pathlib import Path

import numpy as np

from .analysis import METHODS, analyze
from .errors import (
    DimensionError,
    FormatError,
    InvalidInput,
    NumericalError,
    RankError,
    UsageError,
    VempzError,
)
from .experiment import ExperimentConfig, rows_to_csv, run_experiment
from .io import (
    analysis_to_json,
    dump_json,
    load_json,
    load_model,
    read_synth_json,
    read_wav,
    synth_frame_to_json,
    write_csv,
    write_wav,
)
from .metrics import spectral_distortion
from .model import PoleZeroModel
from .synthesis import LfParams, ResonatorSpec, SynthSpec, synth_frame

__all__ = ["main", "build_parser", "EXIT_CODES"]

EXIT_CODES = {
    UsageError: 2,
    FormatError: 3,
    InvalidInput: 4,
    DimensionError: 4,
    RankError: 5,
    NumericalError: 5,
}


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


def _pairs(text: str) -> tuple:
    """Parse ``F:BW[,F:BW...]``; an empty string means none."""
    if not text:
        return ()
    out = []
    for item in text.split(","):
        try:
            f, bw = item.split(":")
            out.append((float(f), float(bw)))
        except ValueError:
            raise UsageError(f"expected F:BW pairs, got {item!r}") from None
    return tuple(out)


def _describe(model: PoleZeroModel, fs: float) -> str:
    def roots(r):
        upper = sorted((z for z in r if z.imag >= 0), key=lambda z: np.angle(z))
        return ", ".join(
            f"{np.angle(z) * fs / (2 * np.pi):.0f} Hz (bw {-np.log(abs(z)) * fs / np.pi:.0f} Hz)" for z in upper
        ) or "none"

    return f"K={model.k} L={model.l} gain={model.gain:.6g}\n  poles: {roots(model.poles())}\n  zeros: {roots(model.zeros())}"


def cmd_synth(args) -> int:
    try:
        resonator = ResonatorSpec(_pairs(args.formants), _pairs(args.antiformants), args.fs)
        spec = SynthSpec(
            f0=args.f0,
            sample_rate=args.fs,
            n_samples=args.n,
            resonator=resonator,
            lf=LfParams(ee=args.ee, tp=args.tp, te=args.te, ta=args.ta, tc=args.tc),
            ratio_db=args.ratio_db,
            seed=args.seed,
        )
    except InvalidInput as exc:
        raise UsageError(str(exc)) from exc
    sf = synth_frame(spec)
    extra = {}
    if args.wav:
        peak = float(np.max(np.abs(sf.y)))
        scale = 0.9 / peak if peak > 0 else 1.0
        write_wav(args.wav, sf.y * scale, int(args.fs))
        extra["wav_scale"] = scale
    dump_json(synth_frame_to_json(sf, **extra), args.out)
    print(f"wrote {args.out}: {spec.n_samples} samples at {spec.sample_rate:g} Hz, onset {sf.onset}")
    print(_describe(sf.model_true, spec.sample_rate))
    return 0


def _load_frames(args):
    path = Path(args.input)
    if path.suffix.lower() == ".wav":
        frames = list(read_wav(path, args.frame_length, args.hop))
        if not frames:
            raise FormatError(f"{path}: shorter than one frame of {args.frame_length} samples")
        return frames, True
    frame, _, _ = read_synth_json(path)
    return [frame], False


def cmd_analyze(args) -> int:
    frames, is_wav = _load_frames(args)
    if not 0 <= args.frame < len(frames):
        raise UsageError(f"--frame {args.frame} out of range; input has {len(frames)} frame(s)")
    frame = frames[args.frame]
    k, l = args.k, args.l
    if is_wav and args.method in ("vem-pz", "ts-ls-pz"):
        k = 10 if k is None else k
        l = 10 if l is None else l
    result = analyze(
        frame,
        args.method,
        k=k,
        l=l,
        block_size=args.block,
        max_iters=args.max_iter,
        tol=args.tol,
        long_order=args.long_order,
    )
    rec = analysis_to_json(result, frame, source=str(args.input), frame_index=args.frame)
    dump_json(rec, args.out)
    if args.response_csv:
        resp = rec["frequency_response"]
        write_csv(
            args.response_csv,
            ("freq_hz", "model_db", "periodogram_db"),
            ([f"{v:.6f}" for v in row] for row in zip(resp["freq_hz"], resp["model_db"], resp["periodogram_db"])),
        )
    print(f"{result.method}: K={result.model.k} L={result.model.l} iterations={result.iterations} -> {args.out}")
    return 0


def cmd_mc(args) -> int:
    config = ExperimentConfig.from_dict(load_json(args.config))
    if args.runs is not None:
        config = dataclasses.replace(config, runs=args.runs)
    out = args.out or config.output
    rows = run_experiment(config, workers=args.workers)
    text = rows_to_csv(rows, out)
    if out is None:
        sys.stdout.write(text)
    else:
        print(f"wrote {len(rows)} rows to {out}")
    return 0


def cmd_eval_sd(args) -> int:
    sd = spectral_distortion(load_model(args.truth), load_model(args.estimate), args.order)
    print(json.dumps({"spectral_distortion": sd, "order": args.order}))
    return 0


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="vempz", description="Pole-zero speech analysis with block-sparse excitation.")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    s = sub.add_parser("synth", help="generate a synthetic frame")
    s.add_argument("--f0", type=float, default=200.0)
    s.add_argument("--fs", type=float, default=8000.0)
    s.add_argument("--n", type=int, default=240)
    s.add_argument("--formants", default="257:32,1891:100", help="F:BW[,F:BW...] in Hz")
    s.add_argument("--antiformants", default="1223:52", help="F:BW[,F:BW...] in Hz; empty for none")
    s.add_argument("--ratio-db", type=float, default=30.0, help="pulse-to-noise power ratio; 'inf' for none")
    s.add_argument("--seed", type=int, default=0)
    s.add_argument("--ee", type=float, default=1.0)
    s.add_argument("--tp", type=float, default=0.4554)
    s.add_argument("--te", type=float, default=0.575)
    s.add_argument("--ta", type=float, default=0.009)
    s.add_argument("--tc", type=float, default=1.0)
    s.add_argument("--out", required=True)
    s.add_argument("--wav", help="also write y, peak-normalized to 0.9, as 16-bit WAV")
    s.set_defaults(func=cmd_synth)

    a = sub.add_parser("analyze", help="estimate a model from a JSON or WAV frame")
    a.add_argument("input")
    a.add_argument("--method", choices=METHODS, default="vem-pz")
    a.add_argument("--k", type=int)
    a.add_argument("--l", type=int)
    a.add_argument("--block", type=int, default=8)
    a.add_argument("--max-iter", type=int, default=100)
    a.add_argument("--tol", type=float, default=1e-6)
    a.add_argument("--long-order", type=int, help="ts-ls-pz first-stage AR order")
    a.add_argument("--frame", type=int, default=0, help="frame index for WAV input")
    a.add_argument("--frame-length", type=int, default=240)
    a.add_argument("--hop", type=int, default=240)
    a.add_argument("--out", required=True)
    a.add_argument("--response-csv", help="write the 512-point response and periodogram as CSV")
    a.set_defaults(func=cmd_analyze)

    m = sub.add_parser("mc", help="Monte Carlo spectral-distortion table")
    m.add_argument("config")
    m.add_argument("--out")
    m.add_argument("--runs", type=int, help="override the configured run count")
    m.add_argument("--workers", type=int, default=1)
    m.set_defaults(func=cmd_mc)

    e = sub.add_parser("eval-sd", help="spectral distortion between two model records")
    e.add_argument("truth")
    e.add_argument("estimate")
    e.add_argument("--order", type=int, default=300)
    e.set_defaults(func=cmd_eval_sd)
    return p


def main(argv=None) -> int:
    try:
        args = build_parser().parse_args(argv)
        return args.func(args)
    except VempzError as exc:
        code = next((c for t, c in EXIT_CODES.items() if isinstance(exc, t)), 1)
        print(f"vempz: error: {exc}", file=sys.stderr)
        return code
    except OSError as exc:
        print(f"vempz: error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
