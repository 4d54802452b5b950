"""Pulse envelopes and the two-quadrature lab-frame drive signal.

Gaussian-with-cutoff envelopes follow the truncated-Gaussian form

    xi(t) = [exp(-(t - tp/2)^2 / gamma^2) - G] / N,   G = exp(-2/W^2),

with gamma = W*tp/(2*sqrt(2)) and N the exact integral of the numerator
over [0, tp], so the envelope vanishes at both ends and has unit
time-integral.  Cosine-series envelopes are

    xi(t) = theta/tp + (2*pi/tp) * sum_k alpha_k cos(2*k*pi*t/tp),

k = 1..len(alphas), whose integral is theta for any coefficients.

The full drive is S(t) = S_x(t) + S_y(t) with

    S_x = A_x * B * cos(w_d t) * xi(t)
    S_y = A_y * B * (r^2 / (4*Delta_2)) * sin(w_d t) * dxi/dt,

r = lambda_12/lambda_01.  The derivative quadrature's sign and the
coupling-ratio coefficient are fixed by requiring the spectral hole to
sit *below* the carrier, on the leakage transition at w_d - Delta_2
(first order: the hole falls at w_d - 4*Delta_2/(A_y*r^2), i.e. A_y ~ 2
centers it on the leakage line).  B = pi / (lambda_01 * integral(xi))
makes A_x = 1 a nominal resonant pi pulse, so optimized amplitudes read
as small percentage corrections.
"""

import math
from dataclasses import dataclass

import numpy as np

from .errors import ValidationError
from .truncation import TruncatedModel

_DOMAIN_SLACK = 1e-9  # ns, absorbs roundoff at the pulse edges


def _check_domain(t, t_p):
    t = np.asarray(t, dtype=float)
    if np.any(t < -_DOMAIN_SLACK) or np.any(t > t_p + _DOMAIN_SLACK):
        raise ValidationError(f"time sample outside [0, {t_p}] ns")
    return t


@dataclass(frozen=True)
class GaussianEnvelope:
    """Unit-norm truncated Gaussian; ``w`` sets the endpoint cutoff exp(-2/W^2)."""

    t_p: float
    w: float

    def __post_init__(self):
        if self.t_p <= 0 or self.w <= 0:
            raise ValidationError("pulse width and cutoff must be positive")

    @property
    def gamma(self):
        return self.w * self.t_p / (2.0 * math.sqrt(2.0))

    @property
    def cutoff(self):
        return math.exp(-2.0 / self.w**2)

    @property
    def center(self):
        return 0.5 * self.t_p

    @property
    def norm(self):
        # exact integral of exp(-(t-tc)^2/g^2) - G over [0, tp]
        return (self.gamma * math.sqrt(math.pi) * math.erf(math.sqrt(2.0) / self.w)
                - self.t_p * self.cutoff)

    def integral(self):
        return 1.0

    def value(self, t):
        t = _check_domain(t, self.t_p)
        u = (t - self.center) / self.gamma
        return (np.exp(-u * u) - self.cutoff) / self.norm

    def derivative(self, t):
        t = _check_domain(t, self.t_p)
        x = t - self.center
        u = x / self.gamma
        return (-2.0 * x / self.gamma**2) * np.exp(-u * u) / self.norm

    def second_derivative(self, t):
        t = _check_domain(t, self.t_p)
        x = t - self.center
        u = x / self.gamma
        g2 = self.gamma**2
        return (4.0 * x * x / g2 - 2.0) / g2 * np.exp(-u * u) / self.norm


@dataclass(frozen=True)
class CosineEnvelope:
    """Cosine-harmonic envelope of rotation angle ``theta``.

    alphas[k-1] multiplies cos(2*k*pi*t/t_p); the harmonics integrate to
    zero, so the time-integral is theta regardless of the coefficients.
    The plain 1-cos pi pulse is theta=pi, alphas=(-0.5,).
    """

    t_p: float
    theta: float = math.pi
    alphas: tuple = (-0.5,)

    def __post_init__(self):
        if self.t_p <= 0:
            raise ValidationError("pulse width must be positive")
        if len(self.alphas) == 0:
            raise ValidationError("cosine envelope needs at least one coefficient")
        object.__setattr__(self, "alphas", tuple(float(a) for a in self.alphas))

    def integral(self):
        return self.theta

    def _harmonics(self, t):
        k = np.arange(1, len(self.alphas) + 1, dtype=float)
        return 2.0 * np.pi * np.outer(np.asarray(t, dtype=float), k) / self.t_p, k

    def value(self, t):
        t = _check_domain(t, self.t_p)
        scalar = np.ndim(t) == 0
        phase, _ = self._harmonics(np.atleast_1d(t))
        out = self.theta / self.t_p + (2.0 * np.pi / self.t_p) * (
            np.cos(phase) @ np.asarray(self.alphas))
        return float(out[0]) if scalar else out

    def derivative(self, t):
        t = _check_domain(t, self.t_p)
        scalar = np.ndim(t) == 0
        phase, k = self._harmonics(np.atleast_1d(t))
        coeff = np.asarray(self.alphas) * (2.0 * np.pi * k / self.t_p)
        out = -(2.0 * np.pi / self.t_p) * (np.sin(phase) @ coeff)
        return float(out[0]) if scalar else out

    def second_derivative(self, t):
        t = _check_domain(t, self.t_p)
        scalar = np.ndim(t) == 0
        phase, k = self._harmonics(np.atleast_1d(t))
        coeff = np.asarray(self.alphas) * (2.0 * np.pi * k / self.t_p) ** 2
        out = -(2.0 * np.pi / self.t_p) * (np.cos(phase) @ coeff)
        return float(out[0]) if scalar else out


# spec-facing functional aliases

def gaussian_envelope(t, env: GaussianEnvelope):
    return env.value(t)


def gaussian_envelope_derivative(t, env: GaussianEnvelope):
    return env.derivative(t)


def cosine_envelope(t, env: CosineEnvelope):
    return env.value(t)


def cosine_envelope_derivative(t, env: CosineEnvelope):
    return env.derivative(t)


@dataclass(frozen=True)
class DriveConfig:
    """Two-quadrature drive: amplitudes, detuning (rad/ns) and envelope.

    a_y = 0 disables the derivative quadrature; 1 and 2 are the half- and
    full-DRAG operating points.  The carrier is omega01 + detuning, with
    omega01 taken from the model the signal is evaluated against.
    """

    envelope: object
    a_x: float = 1.0
    a_y: float = 0.0
    detuning: float = 0.0

    @property
    def t_p(self):
        return self.envelope.t_p

    def with_params(self, a_x=None, a_y=None, detuning=None):
        return DriveConfig(
            envelope=self.envelope,
            a_x=self.a_x if a_x is None else a_x,
            a_y=self.a_y if a_y is None else a_y,
            detuning=self.detuning if detuning is None else detuning,
        )


def calibrate_base_amplitude(model: TruncatedModel, envelope) -> float:
    """Scale factor making a resonant cos-carrier drive a pi rotation.

    In the rotating-wave approximation the Bloch angle of the drive
    B*cos(w01 t)*xi(t)*Sigma_x on the qubit pair is lambda01 * B *
    integral(xi), so B = pi / (lambda01 * integral(xi)).
    """
    lam01 = model.lambda01
    if lam01 == 0.0:
        raise ValidationError("lambda01 vanishes; cannot calibrate drive")
    return math.pi / (lam01 * envelope.integral())


def _drag_coefficient(cfg: DriveConfig, model: TruncatedModel) -> float:
    if cfg.a_y == 0.0:
        return 0.0
    if model.delta2 == 0.0:
        raise ValidationError("DRAG coefficient singular: delta2 = 0 with a_y != 0")
    r2 = (model.sigma_x[1, 2] / model.sigma_x[0, 1]) ** 2
    return r2 / (4.0 * model.delta2)


def carrier_frequency(cfg: DriveConfig, model: TruncatedModel) -> float:
    wd = model.omega01 + cfg.detuning
    if wd <= 0:
        raise ValidationError("carrier frequency must be positive")
    return wd


def signal_components(t, cfg: DriveConfig, model: TruncatedModel):
    """(S_x, S_y) at time(s) t in ns; the full signal is their sum."""
    base = calibrate_base_amplitude(model, cfg.envelope)
    wd = carrier_frequency(cfg, model)
    drag = _drag_coefficient(cfg, model)
    t = np.asarray(t, dtype=float)
    s_x = cfg.a_x * base * np.cos(wd * t) * cfg.envelope.value(t)
    if drag == 0.0:
        s_y = np.zeros_like(s_x)
    else:
        s_y = cfg.a_y * base * drag * np.sin(wd * t) * cfg.envelope.derivative(t)
    return s_x, s_y


def drive_signal(t, cfg: DriveConfig, model: TruncatedModel):
    """Scalar drive S(t); H(t) = diag(h0) + S(t) * Sigma_x."""
    s_x, s_y = signal_components(t, cfg, model)
    total = s_x + s_y
    return float(total) if np.ndim(t) == 0 else total


def drive_signal_derivative(t, cfg: DriveConfig, model: TruncatedModel):
    """Analytic dS/dt, used by the adiabatic leakage estimate."""
    base = calibrate_base_amplitude(model, cfg.envelope)
    wd = carrier_frequency(cfg, model)
    drag = _drag_coefficient(cfg, model)
    t = np.asarray(t, dtype=float)
    env = cfg.envelope
    ds = cfg.a_x * base * (np.cos(wd * t) * env.derivative(t)
                           - wd * np.sin(wd * t) * env.value(t))
    if drag != 0.0:
        ds = ds + cfg.a_y * base * drag * (
            np.sin(wd * t) * env.second_derivative(t)
            + wd * np.cos(wd * t) * env.derivative(t))
    return float(ds) if np.ndim(t) == 0 else ds
