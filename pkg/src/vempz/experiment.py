"""Monte Carlo spectral-distortion study over F0 and estimator settings."""

from __future__ import annotations

import dataclasses
import io as _io
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from .analysis import METHODS, analyze
from .errors import FormatError, InvalidInput, VempzError
from .io import check_schema, write_csv
from .metrics import spectral_distortion
from .synthesis import SynthSpec, synth_frame

__all__ = [
    "MethodSpec",
    "ExperimentConfig",
    "ResultRow",
    "CSV_COLUMNS",
    "f0_grid_config",
    "run_seed",
    "run_experiment",
    "rows_to_csv",
]

CSV_COLUMNS = ("method", "f0_hz", "block_size", "k", "l", "sd_mean", "sd_stderr", "runs", "failed_runs")


@dataclass(frozen=True)
class MethodSpec:
    """One estimator setting; ``block_size`` only applies to the VEM methods."""

    name: str
    k: int
    l: int = 0
    block_size: int | None = None

    def __post_init__(self):
        if self.name not in METHODS:
            raise InvalidInput(f"unknown method {self.name!r}; choose from {', '.join(METHODS)}")
        is_vem = self.name.startswith("vem")
        if is_vem and self.block_size is None:
            raise InvalidInput(f"{self.name} needs a block_size")
        if not is_vem and self.block_size is not None:
            object.__setattr__(self, "block_size", None)
        if self.name in ("lp2", "lp1", "vem-ap") and self.l:
            raise InvalidInput(f"{self.name} is all-pole; l must be 0")


@dataclass(frozen=True)
class ExperimentConfig:
    """F0 grid, run count, estimator list and the synthesis template.

    The template's ``f0`` and ``seed`` are overwritten per run.
    """

    f0_hz: tuple
    runs: int
    methods: tuple
    synth: SynthSpec = field(default_factory=SynthSpec)
    output: str | None = None
    master_seed: int = 0
    max_iters: int = 100
    tol: float = 1e-6
    sd_order: int = 300

    def __post_init__(self):
        object.__setattr__(self, "f0_hz", tuple(float(f) for f in self.f0_hz))
        object.__setattr__(self, "methods", tuple(self.methods))
        if self.runs < 1:
            raise InvalidInput("runs must be at least 1")
        if not self.f0_hz or not self.methods:
            raise InvalidInput("f0_hz and methods must be non-empty")
        if len(set(self.f0_hz)) != len(self.f0_hz):
            raise InvalidInput("duplicate f0 values")

    @classmethod
    def from_dict(cls, d: dict) -> "ExperimentConfig":
        check_schema(d, "experiment")
        try:
            methods = tuple(MethodSpec(**m) for m in d["methods"])
            return cls(
                f0_hz=d["f0_hz"],
                runs=int(d["runs"]),
                methods=methods,
                synth=SynthSpec.from_dict(d.get("synth", {})),
                output=d.get("output"),
                master_seed=int(d.get("master_seed", 0)),
                max_iters=int(d.get("max_iters", 100)),
                tol=float(d.get("tol", 1e-6)),
                sd_order=int(d.get("sd_order", 300)),
            )
        except (KeyError, TypeError) as exc:
            raise FormatError(f"bad experiment config: {exc!r}") from exc

    def to_dict(self) -> dict:
        return {
            "schema": "vempz.experiment/1.0",
            "f0_hz": list(self.f0_hz),
            "runs": self.runs,
            "methods": [dataclasses.asdict(m) for m in self.methods],
            "synth": self.synth.to_dict(),
            "output": self.output,
            "master_seed": self.master_seed,
            "max_iters": self.max_iters,
            "tol": self.tol,
            "sd_order": self.sd_order,
        }


@dataclass(frozen=True)
class ResultRow:
    method: str
    f0_hz: float
    block_size: int | None
    k: int
    l: int
    sd_mean: float
    sd_stderr: float
    runs: int
    failed_runs: int

    def as_csv(self) -> list[str]:
        return [
            self.method,
            f"{self.f0_hz:g}",
            "n/a" if self.block_size is None else str(self.block_size),
            str(self.k),
            str(self.l),
            f"{self.sd_mean:.6f}",
            f"{self.sd_stderr:.6f}",
            str(self.runs),
            str(self.failed_runs),
        ]


def f0_grid_config(runs: int = 500, master_seed: int = 0) -> ExperimentConfig:
    """F0 from 200 to 400 Hz in 50 Hz steps against eight estimator settings."""
    methods = (
        MethodSpec("lp2", 10),
        MethodSpec("ts-ls-pz", 5, 5),
        MethodSpec("lp1", 10),
        MethodSpec("vem-ap", 10, 0, 6),
        MethodSpec("vem-pz", 5, 5, 1),
        MethodSpec("vem-pz", 5, 5, 5),
        MethodSpec("vem-pz", 5, 5, 7),
        MethodSpec("vem-pz", 5, 5, 8),
    )
    return ExperimentConfig(
        f0_hz=(200, 250, 300, 350, 400), runs=runs, methods=methods, master_seed=master_seed
    )


def run_seed(master_seed: int, f0_hz: float, run: int) -> int:
    """Per-run synthesis seed; depends on the F0 value, not its list position."""
    ss = np.random.SeedSequence([master_seed, int(round(f0_hz * 1000)), run])
    return int(ss.generate_state(1, dtype=np.uint64)[0])


def _one_run(config: ExperimentConfig, f0: float, run: int) -> list[float | None]:
    """Spectral distortion of every method on one synthetic frame (None on failure)."""
    spec = dataclasses.replace(config.synth, f0=f0, seed=run_seed(config.master_seed, f0, run))
    sf = synth_frame(spec)
    out = []
    for m in config.methods:
        try:
            res = analyze(
                sf.frame,
                m.name,
                k=m.k,
                l=m.l,
                block_size=m.block_size or 1,
                max_iters=config.max_iters,
                tol=config.tol,
            )
            sd = spectral_distortion(sf.model_true, res.model, config.sd_order)
            out.append(sd if np.isfinite(sd) else None)
        except (VempzError, np.linalg.LinAlgError, FloatingPointError):
            out.append(None)
    return out


def _run_batch(args):
    config, f0, runs = args
    return [_one_run(config, f0, r) for r in runs]


def run_experiment(config: ExperimentConfig, workers: int = 1) -> list[ResultRow]:
    """Score every (F0, method) cell; failures are counted, never raised.

    With ``workers > 1`` runs are spread over processes; results are merged by
    (F0, run index) so the output does not depend on scheduling.
    """
    tasks = []
    chunk = max(1, config.runs // max(workers, 1))
    for f0 in config.f0_hz:
        for start in range(0, config.runs, chunk):
            tasks.append((config, f0, range(start, min(start + chunk, config.runs))))

    if workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            batches = list(pool.map(_run_batch, tasks))
    else:
        batches = [_run_batch(t) for t in tasks]

    scores: dict[float, list] = {f0: [] for f0 in config.f0_hz}
    for (_, f0, _), batch in zip(tasks, batches):
        scores[f0].extend(batch)

    rows = []
    for f0, per_run in scores.items():
        table = np.array([[np.nan if v is None else v for v in r] for r in per_run], dtype=float)
        for j, m in enumerate(config.methods):
            col = table[:, j]
            ok = col[np.isfinite(col)]
            mean = float(ok.mean()) if ok.size else float("nan")
            stderr = float(ok.std(ddof=1) / np.sqrt(ok.size)) if ok.size > 1 else float("nan")
            rows.append(
                ResultRow(m.name, f0, m.block_size, m.k, m.l, mean, stderr, config.runs, int(col.size - ok.size))
            )
    rows.sort(key=lambda r: (r.method, r.f0_hz, -1 if r.block_size is None else r.block_size, r.k, r.l))
    return rows


def rows_to_csv(rows, path=None) -> str:
    """CSV text (and optionally a file) with :data:`CSV_COLUMNS`."""
    buf = _io.StringIO()
    write_csv(buf, CSV_COLUMNS, [r.as_csv() for r in rows])
    text = buf.getvalue()
    if path is not None:
        with open(path, "w", newline="", encoding="utf-8") as fh:
            fh.write(text)
    return text
