"""Figures of merit of a weight vector: Doppler spread, efficiency, beam, PSD, pattern."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DegenerateBeamError, InvalidArgumentError
from .geometry import ArrayConfig, DirectionBank, steering_vector, window

DB_FLOOR = -200.0
# w^H C0 w below this fraction of lambda_max ||w||^2 counts as "radiates nothing"
_DEGENERATE_RTOL = 1e-15


@dataclass(frozen=True, eq=False)
class WeightVector:
    """Complex per-antenna weights. Only the direction matters to every metric."""

    weights: np.ndarray

    def __post_init__(self):
        w = np.asarray(self.weights, dtype=complex).ravel()
        if w.size == 0 or not np.all(np.isfinite(w)):
            raise InvalidArgumentError("weights must be a nonempty finite vector")
        if not np.any(w != 0):
            raise InvalidArgumentError("weights must not be identically zero")
        w.setflags(write=False)
        object.__setattr__(self, "weights", w)

    def __len__(self):
        return self.weights.size

    def __array__(self, dtype=None, copy=None):
        return self.weights if dtype is None else self.weights.astype(dtype)


def as_weights(w) -> np.ndarray:
    """Return the raw complex array behind ``w`` (a WeightVector or array)."""
    if isinstance(w, WeightVector):
        return w.weights
    return WeightVector(w).weights


def _hform(a, w):
    return float(np.real(np.vdot(w, a @ w)))


def quotient(w, mm) -> float:
    """Squared normalized Doppler spread ``w^H C2 w / w^H C0 w``."""
    w = as_weights(w)
    den = _hform(mm.c0, w)
    if den <= _DEGENERATE_RTOL * mm.lambda_max_c0 * np.vdot(w, w).real:
        raise DegenerateBeamError("w^H C0 w is numerically zero")
    return max(_hform(mm.c2, w), 0.0) / den


def normalized_doppler_spread(w, mm) -> float:
    return float(np.sqrt(quotient(w, mm)))


def doppler_spread(w, mm, f_d: float) -> float:
    """Doppler spread in rad/s for maximum Doppler shift ``f_d`` in Hz."""
    return 2.0 * np.pi * f_d * normalized_doppler_spread(w, mm)


def radiation_efficiency(w, mm):
    """Return ``(w^H C0 w / w^H w, that / lambda_max(C0))``."""
    w = as_weights(w)
    eff = _hform(mm.c0, w) / np.vdot(w, w).real
    return eff, eff / mm.lambda_max_c0


def beam_function(w, omega_tilde, config: ArrayConfig):
    """Squared normalized array factor ``|(1/M) sum_m w_m exp(-j 2 pi d m omega)|^2``."""
    w = as_weights(w)
    if w.size != config.m_antennas:
        raise InvalidArgumentError(f"weight length {w.size} != M = {config.m_antennas}")
    g = steering_vector(-np.asarray(omega_tilde, float), config) @ w / config.m_antennas
    out = np.abs(g) ** 2
    return out if out.ndim else float(out)


def psd(w, omega, mm, f_d: float):
    """Channel power spectral density at angular frequency ``omega`` (rad/s)."""
    wd = 2.0 * np.pi * f_d
    x = np.asarray(omega, float) / wd
    return beam_function(w, x, mm.config) * window(x, mm.region) / wd


def radiation_pattern(w, bank: DirectionBank, theta_grid, config: ArrayConfig,
                      branch: int | None = None):
    """Composite radiated power versus angle.

    Parameters
    ----------
    w : WeightVector or array_like
    bank : DirectionBank
        Compensation directions; every branch is steered by one of them.
    theta_grid : array_like
        Evaluation angles in radians.
    config : ArrayConfig
    branch : int, optional
        Restrict to a single branch instead of the incoherent sum over all.

    Returns
    -------
    theta, gain, gain_db : numpy.ndarray
    """
    theta = np.asarray(theta_grid, float).ravel()
    if theta.size == 0:
        raise InvalidArgumentError("theta_grid must be nonempty")
    cq = bank.cosines if branch is None else bank.cosines[[branch]]
    lag = cq[:, None] - np.cos(theta)[None, :]
    gain = beam_function(w, lag.ravel(), config).reshape(lag.shape).sum(axis=0)
    return theta, gain, to_db(gain)


def to_db(gain):
    with np.errstate(divide="ignore"):
        return np.maximum(10.0 * np.log10(gain), DB_FLOOR)


def default_theta_grid() -> np.ndarray:
    """0.1 degree steps strictly inside (0, 180) degrees, in radians."""
    return np.deg2rad(np.arange(1, 1800) * 0.1)


def lobe_levels(theta, gain, region):
    """Peak gain inside the region and the largest gain outside it."""
    theta = np.asarray(theta)
    inside = (theta >= region.theta_l) & (theta <= region.theta_r)
    if not inside.any() or inside.all():
        raise InvalidArgumentError("grid must sample both inside and outside the region")
    return float(np.max(gain[inside])), float(np.max(gain[~inside]))
