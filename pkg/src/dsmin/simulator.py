"""Monte-Carlo synthesis of the equivalent flat-fading channel and PSD estimation.

Every branch ``q`` steers toward an Equi-cos direction and is pre-compensated
by ``exp(-j w_d cos(vartheta_q) t)``. A path leaving at angle ``theta_p`` then
arrives with residual phase rate ``w_d (cos theta_p - cos vartheta_q)`` and
complex gain ``G_pq = (1/M) sum_m w_m exp(j 2 pi d m (cos theta_p - cos vartheta_q))``.
The beam function evaluates ``G`` at the normalized Doppler
``cos vartheta_q - cos theta_p``, which is minus the residual frequency over
``f_d``. The periodogram axis is mapped with that sign.
"""
from __future__ import annotations

from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field, replace

import numpy as np

from .errors import DegenerateBeamError, InvalidArgumentError
from .geometry import AngleRegion, ArrayConfig, DirectionBank, equicos_directions, window
from .metrics import as_weights, beam_function

# trials per synthesis batch; fixes the reduction tree independently of worker count
BATCH = 200
# bytes allowed for one block of the path-to-sample kernel
_KERNEL_BYTES = 64 * 2**20


def default_sampling_interval(region: AngleRegion, f_d: float, oversample: float = 1.1) -> float:
    """Sampling interval whose Nyquist band covers the Doppler support with margin."""
    return 1.0 / (oversample * 2.0 * region.mu * f_d)


@dataclass(frozen=True, eq=False)
class ChannelConfig:
    """Monte-Carlo scenario. ``block_len`` is the number of samples per block."""

    region: AngleRegion
    config: ArrayConfig
    bank: DirectionBank
    f_d: float
    t_s: float
    block_len: int = 1024
    n_paths: int = 512
    n_realizations: int = 10_000
    seed: int = 0
    random_angles: bool = False
    path_angles: np.ndarray | None = field(default=None)

    def __post_init__(self):
        if not self.f_d > 0:
            raise InvalidArgumentError(f"f_d must be positive, got {self.f_d}")
        if not self.t_s > 0:
            raise InvalidArgumentError(f"t_s must be positive, got {self.t_s}")
        if int(self.block_len) != self.block_len or self.block_len < 2:
            raise InvalidArgumentError(f"block_len must be an integer >= 2, got {self.block_len}")
        if int(self.n_paths) != self.n_paths or self.n_paths < 1:
            raise InvalidArgumentError(f"n_paths must be a positive integer, got {self.n_paths}")
        if int(self.n_realizations) != self.n_realizations or self.n_realizations < 1:
            raise InvalidArgumentError(
                f"n_realizations must be a positive integer, got {self.n_realizations}")
        if self.path_angles is not None and len(self.path_angles) != self.n_paths:
            raise InvalidArgumentError("path_angles must have n_paths entries")

    @classmethod
    def default(cls, region, config, f_d=5000.0, q_count=64, **kw):
        bank = equicos_directions(region, q_count)
        if "t_s" not in kw:
            if not f_d > 0:
                raise InvalidArgumentError(f"f_d must be positive, got {f_d}")
            kw["t_s"] = default_sampling_interval(region, f_d)
        return cls(region, config, bank, f_d, **kw)

    def with_(self, **kw) -> "ChannelConfig":
        return replace(self, **kw)

    def grid_angles(self) -> np.ndarray:
        if self.path_angles is not None:
            return np.asarray(self.path_angles, float)
        r = self.region
        return r.theta_l + (np.arange(self.n_paths) + 0.5) * r.delta_theta / self.n_paths


@dataclass(frozen=True, eq=False)
class ChannelRealization:
    """Sampled channel ``g(n t_s)`` with the random draw that produced it."""

    samples: np.ndarray
    gains: np.ndarray
    angles: np.ndarray
    phases: np.ndarray
    trial: int


@dataclass(frozen=True)
class SpectrumSample:
    omega_tilde: float
    value: float


@dataclass(frozen=True, eq=False)
class PsdEstimate:
    """Power spectrum on an ascending normalized-Doppler axis, summing to one."""

    omega_tilde: np.ndarray
    value: np.ndarray
    f_d: float
    bin_width: float

    def __len__(self):
        return self.omega_tilde.size

    def __iter__(self):
        for x, v in zip(self.omega_tilde, self.value):
            yield SpectrumSample(float(x), float(v))


def _draw(cfg: ChannelConfig, trial: int):
    rng = np.random.default_rng([int(cfg.seed), int(trial)])
    var = cfg.region.delta_theta / cfg.n_paths
    gains = (rng.standard_normal(cfg.n_paths) + 1j * rng.standard_normal(cfg.n_paths)) * np.sqrt(var / 2)
    phases = rng.uniform(0.0, 2.0 * np.pi, len(cfg.bank))
    if cfg.random_angles:
        angles = np.sort(rng.uniform(cfg.region.theta_l, cfg.region.theta_r, cfg.n_paths))
    else:
        angles = cfg.grid_angles()
    return gains, angles, phases


def _path_gains(cfg, w, angles):
    m = np.arange(cfg.config.m_antennas)
    diff = np.cos(angles)[:, None] - cfg.bank.cosines[None, :]
    steer = np.exp(2j * np.pi * cfg.config.spacing * diff[:, :, None] * m)
    return steer @ w / cfg.config.m_antennas


def _synthesize(cfg, w, angles, gains, phases):
    """Samples for a batch sharing one set of path angles; ``gains`` is (B, P)."""
    w = as_weights(w)
    zeta = 1.0 / (np.linalg.norm(w) * np.sqrt(len(cfg.bank)))
    G = _path_gains(cfg, w, angles)
    n = np.arange(cfg.block_len)
    wd = 2.0 * np.pi * cfg.f_d
    Ep = np.exp(1j * wd * cfg.t_s * np.outer(np.cos(angles), n))
    Eq = np.exp(-1j * wd * cfg.t_s * np.outer(cfg.bank.cosines, n))
    P, Q, T = len(angles), len(cfg.bank), cfg.block_len
    step = max(1, _KERNEL_BYTES // (16 * P * T))
    out = np.zeros((gains.shape[0], T), complex)
    for q0 in range(0, Q, step):
        q1 = min(Q, q0 + step)
        K = (G[:, q0:q1, None] * Ep[:, None, :]).reshape(P, (q1 - q0) * T)
        X = (gains @ K).reshape(gains.shape[0], q1 - q0, T)
        out += np.einsum("bq,bqt,qt->bt", np.exp(1j * phases[:, q0:q1]), X, Eq[q0:q1])
    return zeta * out


def generate_channel(cfg: ChannelConfig, w, trial: int) -> ChannelRealization:
    """One realization, reproducible from ``(cfg, trial)``."""
    w = _check_weights(cfg, w)
    gains, angles, phases = _draw(cfg, trial)
    g = _synthesize(cfg, w, angles, gains[None, :], phases[None, :])[0]
    return ChannelRealization(g, gains, angles, phases, int(trial))


def _check_weights(cfg, w):
    w = as_weights(w)
    if w.size != cfg.config.m_antennas:
        raise InvalidArgumentError(f"weight length {w.size} != M = {cfg.config.m_antennas}")
    return w


def _axis(cfg):
    f = np.fft.fftfreq(cfg.block_len, cfg.t_s)
    om = -f / cfg.f_d
    order = np.argsort(om, kind="stable")
    return om[order], order


def empirical_psd(realizations, cfg: ChannelConfig) -> PsdEstimate:
    """Averaged rectangular-window periodogram, normalized to unit sum.

    The resolution is ``1 / (block_len t_s)`` Hz per bin.
    """
    realizations = list(realizations)
    if not realizations:
        raise InvalidArgumentError("at least one realization is required")
    acc = np.zeros(cfg.block_len)
    for r in realizations:
        acc += np.abs(np.fft.fft(r.samples)) ** 2
    return _finish(acc, cfg)


def _finish(acc, cfg):
    om, order = _axis(cfg)
    tot = acc.sum()
    if not tot > 0:
        raise DegenerateBeamError("periodogram has no power")
    return PsdEstimate(om, acc[order] / tot, cfg.f_d, 1.0 / (cfg.block_len * cfg.t_s * cfg.f_d))


def _batch_stats(args):
    cfg, w, start, stop = args
    acc = np.zeros(cfg.block_len)
    power = 0.0
    if cfg.random_angles:
        for t in range(start, stop):
            g = generate_channel(cfg, w, t).samples
            acc += np.abs(np.fft.fft(g)) ** 2
            power += np.mean(np.abs(g) ** 2)
        return acc, power
    draws = [_draw(cfg, t) for t in range(start, stop)]
    gains = np.array([d[0] for d in draws])
    phases = np.array([d[2] for d in draws])
    g = _synthesize(cfg, w, cfg.grid_angles(), gains, phases)
    acc += np.sum(np.abs(np.fft.fft(g, axis=1)) ** 2, axis=0)
    power += float(np.sum(np.mean(np.abs(g) ** 2, axis=1)))
    return acc, power


@dataclass(frozen=True, eq=False)
class MonteCarloResult:
    psd: PsdEstimate
    mean_power: float
    batch_power: np.ndarray


def monte_carlo_psd(cfg: ChannelConfig, w, workers: int = 1) -> MonteCarloResult:
    """Averaged periodogram over ``cfg.n_realizations`` trials.

    Trials are grouped into fixed batches and reduced in batch order, so the
    result does not depend on ``workers``.
    """
    w = _check_weights(cfg, w)
    R = cfg.n_realizations
    jobs = [(cfg, w, s, min(R, s + BATCH)) for s in range(0, R, BATCH)]
    if workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as ex:
            parts = list(ex.map(_batch_stats, jobs))
    else:
        parts = [_batch_stats(j) for j in jobs]
    acc = np.sum(np.stack([p[0] for p in parts]), axis=0)
    sizes = np.array([j[3] - j[2] for j in jobs])
    bpow = np.array([p[1] for p in parts]) / sizes
    return MonteCarloResult(_finish(acc, cfg), float(np.sum(bpow * sizes) / R), bpow)


def analytic_psd_bins(w, mm, psd_est: PsdEstimate, sub: int = 41) -> np.ndarray:
    """Analytic PSD averaged over each periodogram bin, normalized to unit sum."""
    off = (np.arange(sub) + 0.5) / sub - 0.5
    x = psd_est.omega_tilde[:, None] + off[None, :] * psd_est.bin_width
    val = beam_function(w, x.ravel(), mm.config) * window(x.ravel(), mm.region)
    pa = val.reshape(x.shape).mean(axis=1)
    return pa / pa.sum()


def l1_distance(psd_est: PsdEstimate, analytic: np.ndarray) -> float:
    return float(np.abs(psd_est.value - analytic).sum())


def empirical_doppler_spread(psd_samples, f_d: float | None = None) -> float:
    """``w_d sqrt(sum x^2 P / sum P)`` over the spectrum samples (rad/s).

    Accepts a ``PsdEstimate`` (which carries ``f_d``) or an iterable of
    ``SpectrumSample`` together with ``f_d``.
    """
    if isinstance(psd_samples, PsdEstimate):
        x, p = psd_samples.omega_tilde, psd_samples.value
        f_d = psd_samples.f_d if f_d is None else f_d
    else:
        pts = list(psd_samples)
        if not pts:
            raise InvalidArgumentError("spectrum must be nonempty")
        x = np.array([s.omega_tilde for s in pts])
        p = np.array([s.value for s in pts])
    if f_d is None:
        raise InvalidArgumentError("f_d is required for a plain sample list")
    if np.any(p < 0):
        raise InvalidArgumentError("spectrum values must be nonnegative")
    tot = p.sum()
    if not tot > 0:
        raise DegenerateBeamError("spectrum has no power")
    return float(2.0 * np.pi * f_d * np.sqrt(np.sum(x * x * p) / tot))


def analytic_received_power(w, mm) -> float:
    """Expected ``|g|^2`` under the unit transmit-power normalization."""
    w = as_weights(w)
    M = mm.config.m_antennas
    return float(mm.region.delta_theta / (2.0 * np.pi * M * M)
                 * np.real(np.vdot(w, mm.c0 @ w)) / np.real(np.vdot(w, w)))
