"""Spectral distortion between pole-zero models and related summaries."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DimensionError, InvalidInput, NumericalError
from .model import PoleZeroModel, as_samples

__all__ = [
    "CepstralCoefficients",
    "minimum_phase",
    "power_cepstrum",
    "spectral_distortion",
    "periodogram",
    "sparsity_ratio",
]

_UNIT_CIRCLE_TOL = 1e-8


@dataclass(frozen=True)
class CepstralCoefficients:
    """One-sided power cepstrum ``values[n] = c_n`` for ``n = 0..order``."""

    order: int
    values: np.ndarray

    @property
    def c0(self) -> float:
        return float(self.values[0])

    def two_sided(self) -> np.ndarray:
        """``c_{-S}, ..., c_S``."""
        return np.concatenate((self.values[:0:-1], self.values))


def _reflect(roots):
    """Reflect roots outside the unit circle; return new roots and the magnitude product."""
    mags = np.abs(roots)
    bad = np.abs(mags - 1.0) <= _UNIT_CIRCLE_TOL
    if np.any(bad):
        raise NumericalError(f"root on the unit circle: {roots[bad][0]}")
    outside = mags > 1.0
    out = roots.copy()
    out[outside] = 1.0 / np.conj(roots[outside])
    return out, float(np.prod(mags[outside])), bool(np.any(outside))


def minimum_phase(model: PoleZeroModel) -> PoleZeroModel:
    """Reflect every pole and zero outside the unit circle to ``1/conj(root)``.

    The gain is rescaled so the magnitude response is unchanged. A model that
    is already minimum phase is returned as is.

    Raises
    ------
    NumericalError
        If a pole or zero lies on the unit circle.
    """
    poles, pole_scale, moved_p = _reflect(model.poles())
    zeros, zero_scale, moved_z = _reflect(model.zeros())
    if not (moved_p or moved_z):
        return model
    a = np.poly(poles).real[1:] if moved_p else model.a
    b = np.poly(zeros).real[1:] if moved_z else model.b
    return PoleZeroModel(a, b, model.gain * zero_scale / pole_scale)


def power_cepstrum(model: PoleZeroModel, order: int) -> CepstralCoefficients:
    """Cepstrum of ``log |H|^2`` from root power sums.

    For a minimum-phase model ``c_n = (sum_i p_i^n - sum_j q_j^n) / n``,
    ``n >= 1``, over poles ``p`` and zeros ``q``; ``c_0 = log gain^2``.
    """
    poles, zeros = model.poles(), model.zeros()
    roots = np.concatenate((poles, zeros))
    if roots.size and np.max(np.abs(roots)) >= 1.0:
        raise InvalidInput("model is not minimum phase")
    n = np.arange(1, order + 1)
    sums = np.zeros(order)
    if poles.size:
        sums += np.power.outer(poles, n).sum(axis=0).real
    if zeros.size:
        sums -= np.power.outer(zeros, n).sum(axis=0).real
    values = np.concatenate(([2.0 * np.log(model.gain)], sums / n))
    return CepstralCoefficients(order, values)


def spectral_distortion(truth: PoleZeroModel, estimate: PoleZeroModel, order: int = 300) -> float:
    """Truncated power-cepstral distance ``sum_{n=-S..S, n!=0} (c_n - c^_n)^2``.

    Both models are reflected to minimum phase first. The ``n = 0`` term is
    left out so the measure ignores gain.
    """
    c = power_cepstrum(minimum_phase(truth), order).values[1:]
    c_hat = power_cepstrum(minimum_phase(estimate), order).values[1:]
    return float(2.0 * np.sum((c - c_hat) ** 2))


def periodogram(frame, nfft: int = 512) -> np.ndarray:
    """``|DFT(y, nfft)|^2 / N`` over all ``nfft`` bins."""
    y = as_samples(frame)
    if nfft < y.size:
        raise DimensionError(f"nfft={nfft} is shorter than the frame ({y.size})")
    if nfft & (nfft - 1):
        raise DimensionError(f"nfft={nfft} is not a power of two")
    return np.abs(np.fft.fft(y, nfft)) ** 2 / y.size


def sparsity_ratio(x) -> float:
    """``||x||_1 / (sqrt(N) ||x||_2)`` in (0, 1]; smaller means sparser."""
    x = np.asarray(x, dtype=float).ravel()
    l2 = np.linalg.norm(x)
    if l2 == 0:
        raise InvalidInput("sparsity of a zero vector is undefined")
    return float(np.sum(np.abs(x)) / (np.sqrt(x.size) * l2))
