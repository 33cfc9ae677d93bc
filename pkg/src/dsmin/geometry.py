"""Array response vectors, Equi-cos compensation directions and the Doppler window."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import InvalidArgumentError

_CLAMP_TOL = 1e-12


@dataclass(frozen=True)
class AngleRegion:
    """Angle-of-departure interval ``(theta_l, theta_r)`` in radians."""

    theta_l: float
    theta_r: float

    def __post_init__(self):
        tl, tr = float(self.theta_l), float(self.theta_r)
        if not (np.isfinite(tl) and np.isfinite(tr)):
            raise InvalidArgumentError("theta_l and theta_r must be finite")
        if not (0.0 < tl < tr < np.pi):
            raise InvalidArgumentError(
                f"region must satisfy 0 < theta_l < theta_r < pi, got ({tl}, {tr})"
            )
        object.__setattr__(self, "theta_l", tl)
        object.__setattr__(self, "theta_r", tr)

    @classmethod
    def from_degrees(cls, theta_l_deg: float, theta_r_deg: float) -> "AngleRegion":
        return cls(np.deg2rad(theta_l_deg), np.deg2rad(theta_r_deg))

    @classmethod
    def centered(cls, spread_deg: float, center_deg: float = 90.0) -> "AngleRegion":
        """Region of total width ``spread_deg`` around ``center_deg``."""
        half = 0.5 * spread_deg
        return cls.from_degrees(center_deg - half, center_deg + half)

    @property
    def mu(self) -> float:
        """Half-width of the Doppler support, ``cos(theta_l) - cos(theta_r)``."""
        return float(np.cos(self.theta_l) - np.cos(self.theta_r))

    @property
    def delta_theta(self) -> float:
        return self.theta_r - self.theta_l


@dataclass(frozen=True)
class ArrayConfig:
    """Uniform linear array with ``m_antennas`` elements at normalized spacing ``spacing``."""

    m_antennas: int
    spacing: float

    def __post_init__(self):
        if int(self.m_antennas) != self.m_antennas or self.m_antennas < 1:
            raise InvalidArgumentError(f"m_antennas must be a positive integer, got {self.m_antennas}")
        if not (np.isfinite(self.spacing) and self.spacing > 0):
            raise InvalidArgumentError(f"spacing must be positive, got {self.spacing}")
        object.__setattr__(self, "m_antennas", int(self.m_antennas))
        object.__setattr__(self, "spacing", float(self.spacing))


@dataclass(frozen=True)
class DirectionBank:
    """Ordered compensation directions ``directions`` (radians) inside ``region``."""

    directions: np.ndarray
    region: AngleRegion

    @property
    def cosines(self) -> np.ndarray:
        return np.cos(self.directions)

    def __len__(self):
        return len(self.directions)


def steering_vector(cos_arg, config: ArrayConfig) -> np.ndarray:
    """Array response ``exp(j 2 pi d m cos_arg)`` for ``m = 0..M-1``.

    Parameters
    ----------
    cos_arg : float or array_like
        Direction cosine. An array input yields one row per value.
    config : ArrayConfig

    Returns
    -------
    numpy.ndarray
        Complex vector of length M, or an array of shape ``(len(cos_arg), M)``.
    """
    m = np.arange(config.m_antennas)
    phase = 2.0 * np.pi * config.spacing * np.multiply.outer(np.asarray(cos_arg, float), m)
    return np.exp(1j * phase)


def equicos_directions(region: AngleRegion, q_count: int) -> DirectionBank:
    """Place ``q_count`` directions at the midpoints of equal cosine sub-intervals."""
    if int(q_count) != q_count or q_count < 1:
        raise InvalidArgumentError(f"q_count must be a positive integer, got {q_count}")
    q = np.arange(q_count, 0, -1) - 0.5
    cosines = np.cos(region.theta_r) + q * region.mu / q_count
    return DirectionBank(np.arccos(cosines), region)


def window(omega_tilde, region: AngleRegion):
    """Doppler-domain image of a uniform angle-of-departure density.

    Parameters
    ----------
    omega_tilde : float or array_like
        Normalized Doppler frequency.
    region : AngleRegion

    Returns
    -------
    float or numpy.ndarray
        Window value, zero outside ``[-mu, mu]``; integrates to ``2 pi``.
    """
    x = np.asarray(omega_tilde, dtype=float)
    tl, tr, mu = region.theta_l, region.theta_r, region.mu
    scale = 2.0 * np.pi / (region.delta_theta * mu)
    out = np.zeros_like(x)
    neg = (x >= -mu) & (x < 0)
    pos = (x >= 0) & (x <= mu)
    out[neg] = np.arccos(_clamp(np.cos(tr) - x[neg])) - tl
    out[pos] = tr - np.arccos(_clamp(np.cos(tl) - x[pos]))
    out = np.maximum(out, 0.0) * scale
    return out if out.ndim else float(out)


def _clamp(arg):
    # rounding can push the argument just past +-1 at the support edges
    if np.any(np.abs(arg) > 1.0 + _CLAMP_TOL):
        raise InvalidArgumentError("arccos argument outside [-1, 1] beyond rounding tolerance")
    return np.clip(arg, -1.0, 1.0)
