"""Discrete Fourier analysis of drive signals.

Rectangular window (the envelopes already vanish at both ends), zero
padding for interpolation, spectral amplitudes scaled by the sample
interval so that Parseval's identity holds bin for bin.  Frequencies
are ordinary (GHz); only the non-negative half of the conjugate-
symmetric spectrum of the real signal is kept.
"""

import math
from dataclasses import dataclass

import numpy as np

from . import pulses
from .errors import ValidationError
from .pulses import DriveConfig
from .truncation import TruncatedModel

_MIN_SAMPLES_PER_PERIOD = 20

# reference configuration whose carrier peak defines magnitude 1
_REF_W = 1.0
_REF_TP = 15.0


@dataclass(frozen=True)
class SpectrumResult:
    """One-sided magnitude spectrum on a uniform GHz grid."""

    freqs: np.ndarray
    magnitude: np.ndarray
    sample_dt: float
    pad_factor: int
    n_padded: int
    scale: float = 1.0  # magnitude divisor applied for normalization

    def peak_frequency(self):
        return float(self.freqs[int(np.argmax(self.magnitude))])

    def total_power(self):
        """Sum |S|^2 df over the full (two-sided) spectrum, unnormalized."""
        mag2 = (self.magnitude * self.scale) ** 2
        df = 1.0 / (self.n_padded * self.sample_dt)
        weight = np.full(mag2.size, 2.0)
        weight[0] = 1.0
        if self.n_padded % 2 == 0:
            weight[-1] = 1.0
        return float(np.sum(weight * mag2) * df)


def spectrum_of_samples(samples, sample_dt, pad_factor=8) -> SpectrumResult:
    """Magnitude spectrum of a real sample train, zero-padded pad_factor x."""
    if pad_factor < 1:
        raise ValidationError("pad_factor must be at least 1")
    samples = np.asarray(samples, dtype=float)
    n_padded = int(samples.size * pad_factor)
    spec = np.abs(np.fft.rfft(samples, n=n_padded)) * sample_dt
    freqs = np.fft.rfftfreq(n_padded, d=sample_dt)
    return SpectrumResult(freqs=freqs, magnitude=spec, sample_dt=sample_dt,
                          pad_factor=pad_factor, n_padded=n_padded)


def _sample_times(t_p, sample_dt):
    n = int(math.floor(t_p / sample_dt + 1e-9)) + 1
    return np.arange(n) * sample_dt


def power_spectrum(drive: DriveConfig, model: TruncatedModel,
                   sample_dt=0.002, pad_factor=8,
                   normalize=True) -> SpectrumResult:
    """Spectrum of the sampled drive S(t) on [0, t_p].

    Rejects undersampling (fewer than 20 samples per carrier period).
    With ``normalize`` the magnitudes are scaled so the carrier peak of
    the no-DRAG, W=1, t_p=15 ns reference pulse equals one, making
    curves for different (A_y, W, t_p) directly comparable.
    """
    wd = pulses.carrier_frequency(drive, model)
    period = 2.0 * math.pi / wd
    if sample_dt > period / _MIN_SAMPLES_PER_PERIOD:
        raise ValidationError(
            f"sample_dt={sample_dt} ns undersamples the carrier "
            f"(need <= {period / _MIN_SAMPLES_PER_PERIOD:.4g} ns)")
    times = _sample_times(drive.t_p, sample_dt)
    spec = spectrum_of_samples(pulses.drive_signal(times, drive, model),
                               sample_dt, pad_factor)
    if not normalize:
        return spec
    ref_env = pulses.GaussianEnvelope(t_p=_REF_TP, w=_REF_W)
    ref_drive = DriveConfig(envelope=ref_env, a_x=1.0, a_y=0.0, detuning=0.0)
    ref_times = _sample_times(_REF_TP, sample_dt)
    ref = spectrum_of_samples(pulses.drive_signal(ref_times, ref_drive, model),
                              sample_dt, pad_factor)
    scale = float(np.max(ref.magnitude))
    return SpectrumResult(freqs=spec.freqs, magnitude=spec.magnitude / scale,
                          sample_dt=sample_dt, pad_factor=pad_factor,
                          n_padded=spec.n_padded, scale=scale)


def spectral_hole_depth(spec_drag: SpectrumResult, spec_plain: SpectrumResult,
                        window) -> float:
    """Minimum of |S_drag|/|S_plain| over a GHz window (< 1 means a net dip)."""
    if (spec_drag.freqs.size != spec_plain.freqs.size
            or not np.allclose(spec_drag.freqs, spec_plain.freqs)):
        raise ValidationError("spectra are on different frequency grids")
    lo, hi = window
    mask = (spec_drag.freqs >= lo) & (spec_drag.freqs <= hi)
    if not np.any(mask):
        raise ValidationError("window contains no frequency bins")
    ratio = (spec_drag.magnitude[mask] * spec_drag.scale) / (
        spec_plain.magnitude[mask] * spec_plain.scale)
    return float(np.min(ratio))


def linewidth(spec: SpectrumResult, threshold) -> float:
    """Width (GHz) of the contiguous band >= threshold x peak around the peak."""
    if threshold > 1.0:
        raise ValidationError("threshold exceeds the peak; band undefined")
    if threshold <= 0.0:
        raise ValidationError("threshold must be positive")
    mag = spec.magnitude
    peak_idx = int(np.argmax(mag))
    cut = threshold * mag[peak_idx]
    left = peak_idx
    while left > 0 and mag[left - 1] >= cut:
        left -= 1
    right = peak_idx
    while right < mag.size - 1 and mag[right + 1] >= cut:
        right += 1
    return float(spec.freqs[right] - spec.freqs[left])
