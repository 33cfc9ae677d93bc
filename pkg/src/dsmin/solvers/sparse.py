"""Antenna selection: l1-relaxed sparsity subproblem, bisection on the spread bound, refit.

The spread bound ``sigma`` always refers to the squared normalized quotient,
``w^H C2 w <= sigma`` together with ``w^H C0 w >= 1``.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from scipy.optimize import brentq

from ..errors import InfeasibleError, InvalidArgumentError, NumericalFailure
from ..metrics import WeightVector, as_weights
from ..socp import ConeDims, solve_socp
from .baseline import SUBSPACE_RTOL, min_ds_weights, min_quotient
from .spca import EfficiencyConstraint, SolverReport, spca_minimize_ds

DEFAULT_ZERO_TOL = 1e-6
# accept an interior-point solve whose combined residual is below this
_SOCP_ACCEPT = 1e-6


@dataclass(frozen=True, eq=False)
class SelectionResult:
    """Outcome of antenna selection.

    Attributes
    ----------
    support : tuple of int
        Selected antenna indices, ascending.
    sigma_final : float
        Spread bound at which the support was obtained.
    weights : WeightVector
        Full-length weights, exactly zero off the support.
    report : SolverReport or None
        Trace of the refit stage (None for selection alone).
    visits : tuple of (sigma, support size)
        Bisection probes in visiting order.
    """

    support: tuple
    sigma_final: float
    weights: WeightVector
    report: SolverReport | None = None
    visits: tuple = field(default=())

    @property
    def visits_monotone(self) -> bool:
        """Support size is non-increasing in sigma over the probes."""
        pts = sorted(self.visits)
        return all(b[1] <= a[1] for a, b in zip(pts, pts[1:]))


def support_of(w, zero_tol: float = DEFAULT_ZERO_TOL) -> tuple:
    """Indices whose modulus exceeds ``zero_tol`` times the largest modulus."""
    aw = np.abs(as_weights(w))
    return tuple(int(i) for i in np.flatnonzero(aw > zero_tol * aw.max()))


def _whitened(c0):
    lam, V = np.linalg.eigh(c0)
    keep = lam > SUBSPACE_RTOL * lam[-1]
    return V[:, keep] / np.sqrt(lam[keep])


def strict_start(mm, sigma: float, sigma_min: float):
    """A point with ``w^H C0 w > 1`` and ``w^H C2 w < sigma``.

    Follows the minimizers of ``w^H (C2 + rho I) w / w^H C0 w`` from the spread
    minimizer (``rho -> 0``) toward the efficiency maximizer, stopping where the
    quotient reaches the midpoint of ``[sigma_min, sigma]``, then scales it into
    the interior.
    """
    B = _whitened(mm.c0)
    eye = np.eye(mm.m)

    def vec(rho):
        A = B.conj().T @ (mm.c2 + rho * eye) @ B
        _, Y = np.linalg.eigh(0.5 * (A + A.conj().T))
        w = B @ Y[:, 0]
        return w / np.sqrt(np.real(np.vdot(w, mm.c0 @ w)))

    target = 0.5 * (sigma_min + sigma)

    def gap(t):
        w = vec(np.exp(t))
        return np.real(np.vdot(w, mm.c2 @ w)) - target

    lo = np.log(1e-14 * mm.lambda_max_c0)
    hi = np.log(1e3 * mm.lambda_max_c0)
    if gap(hi) < 0:
        w = vec(np.exp(hi))
    elif gap(lo) > 0:
        w = vec(np.exp(lo))
    else:
        w = vec(np.exp(brentq(gap, lo, hi, xtol=1e-3)))
    q = np.real(np.vdot(w, mm.c2 @ w))
    kappa = np.sqrt(sigma / max(q, 1e-300))
    return w * np.sqrt(kappa)


def _l1_socp(c2_factor, a, r, sigma, sc):
    """Real-embedded cone program for ``min sum|w_i|`` on one linearization.

    Variables are ``(Re y, Im y, t)`` with ``w = sc * y``; cones are the
    linearized efficiency row, one 3-cone ``|y_i| <= t_i`` per antenna and one
    cone bounding ``||F w|| <= sqrt(sigma)`` with ``F^H F = C2``.
    """
    M = a.size
    n2 = 2 * M
    F = np.block([[c2_factor.real, -c2_factor.imag], [c2_factor.imag, c2_factor.real]])
    av = np.concatenate([a.real, a.imag])
    na = np.linalg.norm(av)
    G = np.zeros((1 + 3 * M + n2 + 1, 3 * M))
    h = np.zeros(G.shape[0])
    G[0, :n2] = -2.0 * av * sc / na
    h[0] = -r / na
    idx = np.arange(M)
    G[1 + 3 * idx, n2 + idx] = -1.0
    G[2 + 3 * idx, idx] = -1.0
    G[3 + 3 * idx, M + idx] = -1.0
    o = 1 + 3 * M
    h[o] = 1.0
    G[o + 1:, :n2] = -F * (sc / np.sqrt(sigma))
    cvec = np.concatenate([np.zeros(n2), np.ones(M)])
    return cvec, G, h, ConeDims(1, (3,) * M + (n2 + 1,))


def _l1_run(mm, sigma, anchor, tol, max_outer):
    s, U = np.linalg.eigh(mm.c2)
    factor = np.sqrt(np.clip(s, 0.0, None))[:, None] * U.conj().T
    w = np.asarray(anchor, complex)
    M = w.size
    trace = []
    prev = np.inf
    for _ in range(max_outer):
        a = mm.c0 @ w
        r = 1.0 + np.real(np.vdot(w, a))
        sc = np.linalg.norm(w)
        cvec, G, h, dims = _l1_socp(factor, a, r, sigma, sc)
        res = solve_socp(cvec, G, h, dims)
        if res.error > _SOCP_ACCEPT:
            raise NumericalFailure(f"l1 cone program stalled (residual {res.error:.1e})",
                                   estimates=w)
        w = sc * (res.x[:M] + 1j * res.x[M:2 * M])
        l1 = float(np.abs(w).sum())
        trace.append(l1)
        if abs(prev - l1) < tol * l1:
            break
        prev = l1
    return w, trace


def l1_subproblem(mm, sigma: float, anchor=None, tol: float = 1e-8, max_outer: int = 100,
                  return_trace: bool = False):
    """Minimize ``sum_i |w_i|`` subject to the spread bound and efficiency floor.

    The efficiency floor ``w^H C0 w >= 1`` is replaced by its tangent at the
    anchor and re-linearized at each solution until the l1 value settles.

    Parameters
    ----------
    mm : MomentMatrices
    sigma : float
        Bound on ``w^H C2 w`` (squared normalized spread).
    anchor : WeightVector, optional
        Linearization point satisfying both constraints. Built with
        ``strict_start`` when omitted.
    tol : float
        Relative l1 change that ends the re-linearization loop.
    max_outer : int
    return_trace : bool
        Also return the l1 value after every outer step.

    Returns
    -------
    WeightVector, or (WeightVector, list) with ``return_trace``.

    Raises
    ------
    InfeasibleError
        ``sigma`` is below the smallest achievable quotient.
    """
    smin = min_quotient(mm.c0, mm.c2)
    if not sigma > smin:
        raise InfeasibleError(f"sigma = {sigma:.6e} is not above the minimum quotient {smin:.6e}")
    if anchor is None:
        w0 = strict_start(mm, sigma, smin)
    else:
        w0 = as_weights(anchor)
        if w0.size != mm.m:
            raise InvalidArgumentError(f"anchor length {w0.size} != M = {mm.m}")
        if (np.real(np.vdot(w0, mm.c0 @ w0)) < 1.0 - 1e-12
                or np.real(np.vdot(w0, mm.c2 @ w0)) > sigma * (1 + 1e-12)):
            raise InvalidArgumentError("anchor violates the constraints of the l1 subproblem")
    w, trace = _l1_run(mm, sigma, w0, tol, max_outer)
    out = WeightVector(w)
    return (out, trace) if return_trace else out


def _embed(M, support, w_sub):
    w = np.zeros(M, complex)
    w[list(support)] = as_weights(w_sub)
    return WeightVector(w)


def _refit_quotient(mm, support):
    idx = list(support)
    return min_quotient(mm.c0[np.ix_(idx, idx)], mm.c2[np.ix_(idx, idx)])


def select_antennas(mm, n_budget: int, zero_tol: float = DEFAULT_ZERO_TOL,
                    width_rtol: float = 1e-4, max_probes: int = 80) -> SelectionResult:
    """Pick at most ``n_budget`` antennas by bisection on the spread bound.

    Each probe solves ``l1_subproblem`` and counts its support. The interval
    starts at ``[sigma_min(M elements), sigma_min(first N elements)]``; its upper
    end is widened while the probe there is still over budget. Every visited
    support within budget, the N largest entries of every over-budget probe
    and the contiguous first-N array are then refit, and the candidate with the
    smallest refit quotient wins.

    Parameters
    ----------
    mm : MomentMatrices
    n_budget : int
        RF-chain budget ``N`` with ``1 <= N <= M``.
    zero_tol : float
        Entries below ``zero_tol * max|w|`` count as zero.
    width_rtol : float
        Stop once the interval is narrower than ``width_rtol * sigma_high``.
    max_probes : int

    Returns
    -------
    SelectionResult
        Weights are the unconstrained spread minimizer on the chosen support.
    """
    M = mm.m
    if int(n_budget) != n_budget or not (1 <= n_budget <= M):
        raise InvalidArgumentError(f"n_budget must be an integer in [1, {M}], got {n_budget}")
    n_budget = int(n_budget)
    smin = min_quotient(mm.c0, mm.c2)
    if n_budget == M:
        w, _ = min_ds_weights(mm)
        return SelectionResult(tuple(range(M)), smin, w)

    contiguous = tuple(range(n_budget))
    s_contig = _refit_quotient(mm, contiguous)
    # one antenna alone meets any bound above this, so S(sigma) = 1 there
    s_single = float(np.min(np.real(np.diag(mm.c2)) / np.real(np.diag(mm.c0))))
    candidates = {contiguous: s_contig}
    visits = []

    def probe(sig):
        w = l1_subproblem(mm, sig)
        sup = support_of(w, zero_tol)
        visits.append((float(sig), len(sup)))
        if len(sup) <= n_budget:
            candidates.setdefault(sup, sig)
        else:
            top = np.argsort(-np.abs(as_weights(w)), kind="stable")[:n_budget]
            candidates.setdefault(tuple(sorted(int(i) for i in top)), sig)
        return len(sup)

    lo, hi = smin, s_contig
    hit = False
    while len(visits) < max_probes:
        k = probe(hi)
        if k <= n_budget:
            hit = k == n_budget
            break
        if hi >= s_single:
            break
        lo, hi = hi, min(1.5 * hi, s_single)
    else:
        hi = lo

    while not hit and len(visits) < max_probes and hi - lo >= width_rtol * hi:
        sig = 0.5 * (lo + hi)
        k = probe(sig)
        if k > n_budget:
            lo = sig
        elif k < n_budget:
            hi = sig
        else:
            break

    scored = sorted((_refit_quotient(mm, sup), sup) for sup in candidates)
    best_q, best = scored[0]
    idx = list(best)
    w_sub, _ = min_ds_weights(mm.restrict(idx))
    return SelectionResult(best, float(candidates[best]), _embed(M, best, w_sub),
                           visits=tuple(visits))


def two_step_select_and_weight(mm, n_budget: int, c: EfficiencyConstraint | None,
                               zero_tol: float = DEFAULT_ZERO_TOL, **spca_kw) -> SelectionResult:
    """Select antennas, then redesign the weights on the selected subarray.

    Parameters
    ----------
    mm : MomentMatrices
    n_budget : int
    c : EfficiencyConstraint or None
        Efficiency target for the refit, measured against the subarray's own
        ``lambda_max``. ``None`` refits with no efficiency constraint.
    zero_tol : float
    **spca_kw
        Forwarded to ``spca_minimize_ds``.

    Returns
    -------
    SelectionResult
    """
    stage1 = select_antennas(mm, n_budget, zero_tol)
    sub = mm.restrict(stage1.support)
    if c is None:
        return stage1
    report = spca_minimize_ds(sub, c, **spca_kw)
    w = _embed(mm.m, stage1.support, report.final_weights)
    return SelectionResult(stage1.support, stage1.sigma_final, w, report, stage1.visits)
