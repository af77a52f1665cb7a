"""Frames and pole-zero filter models."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from scipy.signal import freqz, lfilter

from .errors import InvalidInput
from .linalg import fir_apply, monic, poly_roots

__all__ = ["Frame", "PoleZeroModel", "as_samples"]


@dataclass(frozen=True)
class Frame:
    """One analysis window of audio."""

    samples: np.ndarray
    sample_rate: float = 8000.0

    def __post_init__(self):
        y = np.array(self.samples, dtype=float).ravel()
        if y.size == 0:
            raise InvalidInput("empty frame")
        if not np.all(np.isfinite(y)):
            raise InvalidInput("frame contains non-finite samples")
        y.setflags(write=False)
        object.__setattr__(self, "samples", y)

    def __len__(self):
        return self.samples.size


def as_samples(frame) -> np.ndarray:
    """Accept a :class:`Frame` or anything array-like."""
    if isinstance(frame, Frame):
        return frame.samples
    return np.asarray(frame, dtype=float).ravel()


@dataclass(frozen=True)
class PoleZeroModel:
    """Transfer function ``gain * B(z) / A(z)`` with monic A and B.

    ``a`` and ``b`` exclude the leading unit coefficient, so
    ``A(z) = 1 + a[0] z^-1 + ... + a[K-1] z^-K``.
    """

    a: np.ndarray = field(default_factory=lambda: np.zeros(0))
    b: np.ndarray = field(default_factory=lambda: np.zeros(0))
    gain: float = 1.0

    def __post_init__(self):
        a = np.array(self.a, dtype=float).ravel()
        b = np.array(self.b, dtype=float).ravel()
        if not (np.all(np.isfinite(a)) and np.all(np.isfinite(b))):
            raise InvalidInput("model coefficients must be finite")
        if not (np.isfinite(self.gain) and self.gain > 0):
            raise InvalidInput(f"gain must be positive, got {self.gain}")
        a.setflags(write=False)
        b.setflags(write=False)
        object.__setattr__(self, "a", a)
        object.__setattr__(self, "b", b)
        object.__setattr__(self, "gain", float(self.gain))

    @property
    def k(self) -> int:
        return self.a.size

    @property
    def l(self) -> int:  # noqa: E743
        return self.b.size

    @property
    def denominator(self) -> np.ndarray:
        return monic(self.a)

    @property
    def numerator(self) -> np.ndarray:
        return monic(self.b)

    def poles(self) -> np.ndarray:
        return poly_roots(self.denominator) if self.k else np.zeros(0, complex)

    def zeros(self) -> np.ndarray:
        return poly_roots(self.numerator) if self.l else np.zeros(0, complex)

    def frequency_response(self, n_points: int = 512, sample_rate: float = 2 * np.pi):
        """Complex response at ``n_points`` frequencies uniformly spaced on [0, fs/2]."""
        freqs, h = freqz(
            self.numerator, self.denominator, worN=n_points, whole=False,
            include_nyquist=True, fs=sample_rate,
        )
        return freqs, self.gain * h

    def residual(self, y) -> np.ndarray:
        """Excitation ``B^{-1} A y`` (zero initial conditions)."""
        return lfilter(self.denominator, self.numerator, as_samples(y))

    def analysis(self, y) -> np.ndarray:
        """``A y``."""
        return fir_apply(self.denominator, as_samples(y))

    def with_power_gain(self, y, n_grid: int = 4096) -> "PoleZeroModel":
        """Copy whose gain makes unit-variance white excitation reproduce the power of ``y``.

        The power gain of ``B/A`` is the mean of ``|B/A|^2`` on a uniform grid,
        which is finite for any model without unit-circle poles.
        """
        y = as_samples(y)
        num = np.abs(np.fft.rfft(self.numerator, 2 * n_grid)) ** 2
        den = np.abs(np.fft.rfft(self.denominator, 2 * n_grid)) ** 2
        with np.errstate(divide="ignore", invalid="ignore"):
            power = np.mean(num / den)
        sig = np.mean(y**2)
        if not np.isfinite(power) or power <= 0 or sig <= 0:
            return PoleZeroModel(self.a, self.b, 1.0)
        return PoleZeroModel(self.a, self.b, float(np.sqrt(sig / power)))

    def to_dict(self) -> dict:
        return {"a": self.a.tolist(), "b": self.b.tolist(), "gain": self.gain}

    @classmethod
    def from_dict(cls, d: dict) -> "PoleZeroModel":
        return cls(d.get("a", []), d.get("b", []), d.get("gain", 1.0))
