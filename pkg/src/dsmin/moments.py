"""Spectral moment matrices C0 and C2 of the Doppler window.

Both matrices are Hermitian Toeplitz, so each is fixed by M lag integrals

    c_k = int omega^p W(omega) exp(j 2 pi d k omega) d omega,   p in {0, 2}.

The two branches of the window (negative and positive Doppler) are integrated
as separate Gauss-Legendre panels. Inside each panel the variable is changed to
the angle ``phi`` through ``omega = cos(theta_edge) - cos(phi)``, which turns the
arccos-shaped window into a polynomial times ``sin(phi)``. That removes the
square-root behaviour near the endpoints when the region approaches 0 or pi.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np
import scipy.linalg as sla

from .errors import InvalidArgumentError, NumericalFailure
from .geometry import AngleRegion, ArrayConfig

DEFAULT_NODES = 32
MAX_NODES = 8192
QUAD_RTOL = 1e-10


@dataclass(frozen=True, eq=False)
class MomentMatrices:
    """Moment matrices of one (region, array) pair.

    Attributes
    ----------
    c0, c2 : numpy.ndarray
        M-by-M Hermitian Toeplitz matrices.
    lambda_max_c0 : float
        Largest eigenvalue of ``c0``.
    region : AngleRegion
    config : ArrayConfig
    quad_nodes : int
        Gauss-Legendre nodes per panel at which quadrature converged.
    """

    c0: np.ndarray
    c2: np.ndarray
    lambda_max_c0: float
    region: AngleRegion
    config: ArrayConfig
    quad_nodes: int = field(default=0)

    @property
    def m(self) -> int:
        return self.c0.shape[0]

    def restrict(self, support) -> "MomentMatrices":
        """Principal submatrices on ``support`` with their own ``lambda_max``.

        The result keeps the parent's region and config for bookkeeping; it is
        no longer Toeplitz when the support is not contiguous.
        """
        idx = np.asarray(sorted(support), dtype=int)
        if idx.size == 0:
            raise InvalidArgumentError("support must be nonempty")
        c0 = self.c0[np.ix_(idx, idx)]
        c2 = self.c2[np.ix_(idx, idx)]
        lam = float(np.linalg.eigvalsh(c0)[-1])
        return MomentMatrices(c0, c2, lam, self.region, self.config, self.quad_nodes)


@lru_cache(maxsize=32)
def _gauss_legendre(n: int):
    return np.polynomial.legendre.leggauss(n)


def _panel_rule(region: AngleRegion, n: int):
    """Nodes ``omega`` and weights ``W(omega) d omega`` for both branches."""
    g, wg = _gauss_legendre(n)
    tl, tr = region.theta_l, region.theta_r
    half = 0.5 * (tr - tl)
    phi = tl + half * (g + 1.0)
    jac = half * wg * np.sin(phi)
    scale = 2.0 * np.pi / (region.delta_theta * region.mu)
    om_neg = np.cos(tr) - np.cos(phi)
    om_pos = np.cos(tl) - np.cos(phi)
    w_neg = scale * (phi - tl) * jac
    w_pos = scale * (tr - phi) * jac
    return np.concatenate([om_neg, om_pos]), np.concatenate([w_neg, w_pos])


def _lag_sums(lags, region, config, n):
    om, wt = _panel_rule(region, n)
    phase = np.exp(2j * np.pi * config.spacing * np.multiply.outer(np.asarray(lags, float), om))
    return phase @ wt, phase @ (wt * om * om)


def _converged(lags, region, config, n0, power=None):
    n = int(n0)
    if n < 2:
        raise InvalidArgumentError(f"quadrature node count must be >= 2, got {n0}")
    prev = _lag_sums(lags, region, config, n)
    while True:
        n2 = 2 * n
        cur = _lag_sums(lags, region, config, n2)
        parts = (0, 1) if power is None else ((0,) if power == 0 else (1,))
        ok = True
        for i in parts:
            diff = np.max(np.abs(cur[i] - prev[i]))
            ref = max(np.max(np.abs(cur[i])), np.finfo(float).tiny)
            if diff > QUAD_RTOL * ref:
                ok = False
        if ok:
            return cur, n2
        if n2 >= MAX_NODES:
            raise NumericalFailure(
                f"lag quadrature did not converge with {n2} nodes per panel",
                estimates=(prev, cur),
            )
        prev, n = cur, n2


def lag_integral(lag: int, weight_power: int, region: AngleRegion, config: ArrayConfig,
                 nodes: int = DEFAULT_NODES) -> complex:
    """Integral of ``omega**weight_power * W(omega) * exp(j 2 pi d lag omega)``.

    Parameters
    ----------
    lag : int
        Lag ``m - n`` with ``|lag| <= M - 1``.
    weight_power : {0, 2}
    region : AngleRegion
    config : ArrayConfig
    nodes : int
        Starting Gauss-Legendre nodes per panel; doubled until converged.

    Returns
    -------
    complex

    Raises
    ------
    NumericalFailure
        Two successive refinements still differ by more than 1e-10 relative
        at the node cap. The exception carries both estimates.
    """
    if weight_power not in (0, 2):
        raise InvalidArgumentError(f"weight_power must be 0 or 2, got {weight_power}")
    if abs(int(lag)) > config.m_antennas - 1:
        raise InvalidArgumentError(f"lag {lag} outside [-(M-1), M-1]")
    k = abs(int(lag))
    (v0, v2), _ = _converged([k], region, config, nodes, weight_power)
    val = complex((v0 if weight_power == 0 else v2)[0])
    return val.conjugate() if lag < 0 else val


def build_moments(region: AngleRegion, config: ArrayConfig,
                  nodes: int = DEFAULT_NODES) -> MomentMatrices:
    """Assemble C0, C2 and ``lambda_max(C0)``.

    Parameters
    ----------
    region : AngleRegion
    config : ArrayConfig
    nodes : int
        Starting Gauss-Legendre nodes per panel.

    Returns
    -------
    MomentMatrices
    """
    lags = np.arange(config.m_antennas)
    (c0, c2), n = _converged(lags, region, config, nodes)
    # lag 0 is real by construction; drop the rounding residue
    c0[0] = c0[0].real
    c2[0] = c2[0].real
    C0 = sla.toeplitz(c0, np.conj(c0))
    C2 = sla.toeplitz(c2, np.conj(c2))
    lam = float(np.linalg.eigvalsh(C0)[-1])
    return MomentMatrices(C0, C2, lam, region, config, n)


def write_matrix(path, mat, header=()) -> None:
    """Write a complex matrix as row-major text, one row per line of ``re,im`` pairs.

    ``header`` lines are written first, each prefixed with ``#``.
    """
    mat = np.asarray(mat)
    with open(path, "w", encoding="utf-8") as fh:
        for line in header:
            fh.write(f"# {line}\n")
        for row in mat:
            fh.write(" ".join(f"{z.real:.17g},{z.imag:.17g}" for z in row))
            fh.write("\n")


def read_matrix(path) -> np.ndarray:
    rows = []
    with open(path, encoding="utf-8") as fh:
        for line in fh:
            if line.strip() and not line.startswith("#"):
                rows.append([complex(float(a), float(b))
                             for a, b in (p.split(",") for p in line.split())])
    return np.array(rows, dtype=complex)
