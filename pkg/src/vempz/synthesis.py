"""Synthetic voiced frames: LF glottal-derivative train through a formant filter.

The observation obeys ``A y = B e + m`` exactly, where ``e`` is a periodic
Liljencrants-Fant pulse train and ``m`` white Gaussian noise scaled to a
prescribed energy ratio.
"""

from __future__ import annotations

from dataclasses import asdict, dataclass, field

import numpy as np
from scipy.signal import lfilter

from .errors import InvalidInput, NumericalError
from .model import Frame, PoleZeroModel

__all__ = [
    "LfParams",
    "LfShape",
    "ResonatorSpec",
    "SynthSpec",
    "SynthFrame",
    "solve_lf",
    "lf_pulse",
    "build_resonator",
    "synth_frame",
    "NASAL_N",
]


@dataclass(frozen=True)
class LfParams:
    """LF timing as fractions of the pitch period; ``ee`` is the negative peak size.

    Defaults are a modal-voice configuration.
    """

    ee: float = 1.0
    tp: float = 0.4554
    te: float = 0.575
    ta: float = 0.009
    tc: float = 1.0

    def __post_init__(self):
        if not self.ee > 0:
            raise InvalidInput("ee must be positive")
        if not (0 < self.tp < self.te <= self.tc <= 1):
            raise InvalidInput("LF timing must satisfy 0 < tp < te <= tc <= 1")
        if not self.ta > 0:
            raise InvalidInput("ta must be positive")


@dataclass(frozen=True)
class LfShape:
    """Solved LF constants for one period of ``period`` samples (time in samples)."""

    params: LfParams
    period: float
    alpha: float
    epsilon: float
    omega: float

    @property
    def t_e(self) -> float:
        return self.params.te * self.period

    @property
    def t_a(self) -> float:
        return self.params.ta * self.period

    @property
    def t_c(self) -> float:
        return self.params.tc * self.period

    @property
    def e0(self) -> float:
        return -self.params.ee / (np.exp(self.alpha * self.t_e) * np.sin(self.omega * self.t_e))

    def open_phase(self, t) -> np.ndarray:
        t = np.asarray(t, dtype=float)
        return self.e0 * np.exp(self.alpha * t) * np.sin(self.omega * t)

    def return_phase(self, t) -> np.ndarray:
        t = np.asarray(t, dtype=float)
        ee, eps = self.params.ee, self.epsilon
        tail = np.exp(-eps * (self.t_c - self.t_e))
        return -(ee / (eps * self.t_a)) * (np.exp(-eps * (t - self.t_e)) - tail)

    def __call__(self, t) -> np.ndarray:
        t = np.asarray(t, dtype=float)
        out = np.zeros_like(t)
        op = (t >= 0) & (t <= self.t_e)
        rp = (t > self.t_e) & (t <= self.t_c)
        out[op] = self.open_phase(t[op])
        if self.t_c > self.t_e:
            out[rp] = self.return_phase(t[rp])
        return out


def _newton(fun, x0, what, max_steps=100, tol=1e-13):
    """Damped scalar Newton; ``fun`` returns (value, derivative)."""
    x = x0
    f, df = fun(x)
    for _ in range(max_steps):
        if abs(f) <= tol:
            return x
        if df == 0 or not np.isfinite(df):
            break
        step = f / df
        for _ in range(60):
            fx, dfx = fun(x - step)
            if np.isfinite(fx) and abs(fx) < abs(f):
                break
            step /= 2
        else:
            break
        x, f, df = x - step, fx, dfx
    if abs(f) <= max(tol, 1e-11):
        return x
    raise NumericalError(f"Newton iteration for {what} did not converge (residual {f:.3g})")


def solve_lf(lf: LfParams, period: float) -> LfShape:
    """Solve the return-phase constant and the open-phase growth rate.

    ``epsilon`` satisfies ``epsilon * Ta = 1 - exp(-epsilon (Tc - Te))``; the
    growth rate is chosen so the pulse sampled at ``0, 1, ..., period-1``
    sums to zero (zero net flow over one period).
    """
    t_e, t_a, t_c = lf.te * period, lf.ta * period, lf.tc * period
    omega = np.pi / (lf.tp * period)

    if t_c > t_e:
        span = t_c - t_e

        def eps_eq(eps):
            ex = np.exp(-eps * span)
            return eps * t_a - 1.0 + ex, t_a - span * ex

        epsilon = _newton(eps_eq, 1.0 / t_a, "the return-phase constant")
    else:
        epsilon = 1.0 / t_a

    n = np.arange(int(np.ceil(period - 1e-9)))
    shape0 = LfShape(lf, period, 0.0, epsilon, omega)
    ret = shape0(n) * ((n > t_e) & (n <= t_c))
    return_area = ret.sum()
    open_n = n[n <= t_e]
    base = -lf.ee * np.sin(omega * open_n) / np.sin(omega * t_e)
    lag = open_n - t_e

    def area_eq(alpha):
        w = base * np.exp(alpha * lag)
        return w.sum() + return_area, (w * lag).sum()

    alpha = _newton(area_eq, 0.0, "the open-phase growth rate", tol=1e-12 * lf.ee)
    return LfShape(lf, period, alpha, epsilon, omega)


def lf_pulse(lf: LfParams, f0: float, sample_rate: float) -> np.ndarray:
    """One period of the LF glottal flow derivative, ``round(fs/f0)`` samples long."""
    period = int(round(sample_rate / f0))
    if period < 8:
        raise InvalidInput(f"pitch period of {period} samples is too short")
    shape = solve_lf(lf, period)
    return shape(np.arange(period))


@dataclass(frozen=True)
class ResonatorSpec:
    """Formant and antiformant (frequency, bandwidth) pairs in Hz."""

    formants: tuple = ()
    antiformants: tuple = ()
    sample_rate: float = 8000.0

    def __post_init__(self):
        object.__setattr__(self, "formants", tuple(tuple(map(float, p)) for p in self.formants))
        object.__setattr__(self, "antiformants", tuple(tuple(map(float, p)) for p in self.antiformants))
        nyq = self.sample_rate / 2
        for f, bw in self.formants + self.antiformants:
            if not 0 < f < nyq:
                raise InvalidInput(f"frequency {f} Hz outside (0, {nyq}) Hz")
            if not bw > 0:
                raise InvalidInput(f"bandwidth must be positive, got {bw}")


# /n/ at 8 kHz: two formants and one antiformant
NASAL_N = ResonatorSpec(
    formants=((257.0, 32.0), (1891.0, 100.0)),
    antiformants=((1223.0, 52.0),),
    sample_rate=8000.0,
)


def _resonance_poly(pairs, fs) -> np.ndarray:
    poly = np.array([1.0])
    for f, bw in pairs:
        r = np.exp(-np.pi * bw / fs)
        theta = 2 * np.pi * f / fs
        poly = np.convolve(poly, [1.0, -2 * r * np.cos(theta), r * r])
    return poly


def build_resonator(spec: ResonatorSpec) -> PoleZeroModel:
    """Conjugate pole pair per formant, conjugate zero pair per antiformant.

    Radius ``exp(-pi Bw / fs)``, angle ``2 pi F / fs``.
    """
    a = _resonance_poly(spec.formants, spec.sample_rate)[1:]
    b = _resonance_poly(spec.antiformants, spec.sample_rate)[1:]
    return PoleZeroModel(a, b, 1.0)


@dataclass(frozen=True)
class SynthSpec:
    f0: float = 200.0
    sample_rate: float = 8000.0
    n_samples: int = 240
    resonator: ResonatorSpec = NASAL_N
    lf: LfParams = field(default_factory=LfParams)
    ratio_db: float = 30.0
    seed: int = 0

    def __post_init__(self):
        if not 50 < self.f0 < self.sample_rate / 4:
            raise InvalidInput(f"f0 {self.f0} Hz outside (50, fs/4)")
        if self.n_samples < 1:
            raise InvalidInput("n_samples must be positive")
        if np.isnan(self.ratio_db) or self.ratio_db == -np.inf:
            raise InvalidInput("ratio_db must be finite or +inf")
        if self.resonator.sample_rate != self.sample_rate:
            raise InvalidInput("resonator and frame sample rates differ")

    def to_dict(self) -> dict:
        d = asdict(self)
        d["ratio_db"] = "inf" if np.isinf(self.ratio_db) else self.ratio_db
        d["resonator"] = {k: [list(p) for p in v] if k != "sample_rate" else v for k, v in d["resonator"].items()}
        return d

    @classmethod
    def from_dict(cls, d: dict) -> "SynthSpec":
        """Inverse of :meth:`to_dict`; missing keys take the defaults."""
        d = dict(d)
        fs = float(d.pop("sample_rate", 8000.0))
        res = d.pop("resonator", None)
        resonator = NASAL_N if res is None else ResonatorSpec(
            formants=res.get("formants", ()), antiformants=res.get("antiformants", ()), sample_rate=fs
        )
        lf = LfParams(**d.pop("lf", {}))
        unknown = set(d) - {"f0", "n_samples", "ratio_db", "seed"}
        if unknown:
            raise InvalidInput(f"unknown synth fields: {sorted(unknown)}")
        return cls(
            f0=float(d.get("f0", 200.0)),
            sample_rate=fs,
            n_samples=int(d.get("n_samples", 240)),
            resonator=resonator,
            lf=lf,
            ratio_db=float(d.get("ratio_db", 30.0)),
            seed=int(d.get("seed", 0)),
        )


@dataclass(frozen=True)
class SynthFrame:
    y: np.ndarray
    e_true: np.ndarray
    m_true: np.ndarray
    model_true: PoleZeroModel
    spec: SynthSpec
    onset: int = 0

    @property
    def frame(self) -> Frame:
        return Frame(self.y, self.spec.sample_rate)


def synth_frame(spec: SynthSpec) -> SynthFrame:
    """Generate one frame; deterministic given ``spec.seed``.

    The pulse train starts at a random offset within the first period and
    the Gaussian component is scaled so that
    ``10 log10(||e||^2 / ||m||^2) == spec.ratio_db``.
    """
    rng = np.random.default_rng(spec.seed)
    model = build_resonator(spec.resonator)
    pulse = lf_pulse(spec.lf, spec.f0, spec.sample_rate)
    period = pulse.size
    n = spec.n_samples

    onset = int(rng.integers(period))
    e = np.zeros(n)
    for start in range(onset, n, period):
        stop = min(start + period, n)
        e[start:stop] = pulse[: stop - start]

    noise = rng.standard_normal(n)
    if np.isinf(spec.ratio_db):
        m = np.zeros(n)
    else:
        m = noise * np.sqrt((e @ e) / (noise @ noise) * 10.0 ** (-spec.ratio_db / 10.0))

    drive = lfilter(model.numerator, [1.0], e) + m
    y = lfilter([1.0], model.denominator, drive)
    return SynthFrame(y=y, e_true=e, m_true=m, model_true=model.with_power_gain(y), spec=spec, onset=onset)
