"""Efficiency-constrained spread minimization by sequential convex approximation.

The non-convex problem

    minimize  w^H C2 w   s.t.   w^H w <= 1 / (eps * lambda_max),   w^H C0 w >= 1

is solved by replacing ``w^H C0 w`` with its tangent lower bound at the current
iterate. Each step is then a ball-and-halfspace constrained quadratic program,
solved exactly through its one-dimensional secular equation.
"""
from __future__ import annotations

import enum
from dataclasses import dataclass, field

import numpy as np
from scipy.optimize import brentq

from ..errors import InfeasibleError, InvalidArgumentError, NumericalFailure
from ..metrics import WeightVector, as_weights, radiation_efficiency
from .baseline import min_ds_weights


@dataclass(frozen=True)
class EfficiencyConstraint:
    """Minimum normalized radiation efficiency ``epsilon`` in (0, 1)."""

    epsilon: float

    def __post_init__(self):
        e = float(self.epsilon)
        if not (0.0 < e < 1.0):
            raise InvalidArgumentError(f"epsilon must lie in (0, 1), got {self.epsilon}")
        object.__setattr__(self, "epsilon", e)


class Termination(str, enum.Enum):
    CONVERGED = "converged"
    MAX_ITERS = "max_iters"
    INFEASIBLE_START = "infeasible-start"


@dataclass(frozen=True, eq=False)
class SolverReport:
    """Trace of one sequential run.

    ``iterates[k]`` and ``feasibility_residuals[k]`` describe the k-th point,
    with index 0 the starting point.
    """

    iterates: tuple
    feasibility_residuals: tuple
    termination: Termination
    final_weights: WeightVector
    label: str = "spca"
    extra: dict = field(default_factory=dict)

    def to_trace(self) -> str:
        lines = [f"# run = {self.label}", f"# termination = {self.termination.value}",
                 "iteration,objective,residual"]
        for k, (obj, res) in enumerate(zip(self.iterates, self.feasibility_residuals)):
            lines.append(f"{k},{obj:.17g},{res:.6e}")
        return "\n".join(lines) + "\n"


@dataclass(frozen=True, eq=False)
class QcqpSolution:
    """Subproblem minimizer with its multipliers and KKT residuals."""

    weights: np.ndarray
    lambda_ball: float
    lambda_half: float
    stationarity: float
    slackness: tuple


def feasible_init(mm, c: EfficiencyConstraint) -> WeightVector:
    """Scaled dominant eigenvector of C0 inside the admissible norm interval.

    The scale is the geometric midpoint of ``[1/lambda_max, 1/(eps lambda_max)]``,
    so both constraints hold with margin for every ``eps < 1``.
    """
    lam, V = np.linalg.eigh(mm.c0)
    t = np.sqrt(1.0 / (np.sqrt(c.epsilon) * lam[-1]))
    return WeightVector(t * V[:, -1])


def default_init(mm, c: EfficiencyConstraint) -> WeightVector:
    """Start from the unconstrained minimizer when it already meets the efficiency target."""
    w, _ = min_ds_weights(mm)
    _, eta = radiation_efficiency(w, mm)
    if eta >= c.epsilon:
        w = as_weights(w)
        return WeightVector(w / np.sqrt(np.real(np.vdot(w, mm.c0 @ w))))
    return feasible_init(mm, c)


def _ball_radius_sq(mm, c):
    return 1.0 / (c.epsilon * mm.lambda_max_c0)


def feasibility_residual(w, mm, c: EfficiencyConstraint) -> float:
    """Worst violation of the two original constraints.

    The ball term is relative to its radius, the efficiency term is absolute
    (its right-hand side is 1).
    """
    w = as_weights(w)
    R = _ball_radius_sq(mm, c)
    ball = np.vdot(w, w).real / R - 1.0
    eff = 1.0 - np.real(np.vdot(w, mm.c0 @ w))
    return float(max(0.0, ball, eff))


class _Qcqp:
    """Reusable eigendecomposition of C2 for repeated subproblem solves."""

    def __init__(self, c2):
        s, U = np.linalg.eigh(c2)
        self.c2 = c2
        self.s = np.clip(s, 0.0, None)
        self.U = U
        self.norm_c2 = float(max(abs(s[0]), abs(s[-1])))

    def solve(self, radius_sq, a, r) -> QcqpSolution:
        a = np.asarray(a, complex)
        if r <= 0:
            raise InvalidArgumentError("halfspace offset must be positive")
        na2 = np.vdot(a, a).real
        if na2 == 0.0 or r * r / (4.0 * na2) > radius_sq:
            raise InfeasibleError("halfspace does not meet the ball")
        s, U = self.s, self.U
        b = U.conj().T @ a
        b2 = np.abs(b) ** 2

        def norm2(lmb):
            a1 = np.sum(b2 / (s + lmb))
            a2 = np.sum(b2 / (s + lmb) ** 2)
            return (0.5 * r) ** 2 * a2 / (a1 * a1)

        scale = max(self.norm_c2, 1e-300)
        floor = 1e-14 * scale
        if s[0] > floor and norm2(0.0) <= radius_sq:
            lmb = 0.0
        elif norm2(floor) <= radius_sq:
            # nullspace of C2 reaches the halfspace inside the ball
            lmb = floor
        elif r * r / (4.0 * na2) >= radius_sq * (1.0 - 1e-14):
            # ball just touches the halfspace: only the minimum-norm point is feasible
            w = (r / (2.0 * na2)) * a
            return self._certify(w, np.inf, 0.0, a, radius_sq, r)
        else:
            hi = scale
            while norm2(hi) > radius_sq:
                hi *= 10.0
                if hi > 1e300:
                    raise NumericalFailure("ball multiplier bracket overflow")
            lo = floor
            f = lambda t: np.log(norm2(np.exp(t))) - np.log(radius_sq)
            lmb = float(np.exp(brentq(f, np.log(lo), np.log(hi), xtol=1e-14, rtol=1e-15, maxiter=500)))
        a1 = np.sum(b2 / (s + lmb))
        lam2 = r / (2.0 * a1)
        w = U @ (lam2 * b / (s + lmb))
        # snap onto the active constraints, removing root-finding residue
        w *= r / (2.0 * np.real(np.vdot(a, w)))
        nw = np.vdot(w, w).real
        if lmb > floor and nw > radius_sq:
            w *= np.sqrt(radius_sq / nw)
        return self._certify(w, lmb, lam2, a, radius_sq, r)

    def _certify(self, w, lmb, lam2, a, radius_sq, r):
        if not np.all(np.isfinite(w)):
            raise NumericalFailure("subproblem produced non-finite weights", estimates=w)
        if np.isinf(lmb):
            stat = 0.0
            lmb_v = np.inf
        else:
            stat = float(np.linalg.norm(self.c2 @ w + lmb * w - lam2 * a))
            lmb_v = lmb
        slack_ball = radius_sq - np.vdot(w, w).real
        slack_half = 2.0 * np.real(np.vdot(a, w)) - r
        comp = (0.0 if np.isinf(lmb_v) else lmb_v * slack_ball, lam2 * slack_half)
        return QcqpSolution(w, float(lmb_v), float(lam2), stat, (float(comp[0]), float(comp[1])))


def qcqp_subproblem(c2, ball_radius_sq: float, affine) -> QcqpSolution:
    """Minimize ``w^H c2 w`` over ``{||w||^2 <= R} & {2 Re(a^H w) >= r}``.

    Parameters
    ----------
    c2 : (M, M) Hermitian PSD array
    ball_radius_sq : float
        Squared ball radius ``R``.
    affine : tuple (a, r)
        Halfspace normal and offset.

    Returns
    -------
    QcqpSolution
        Minimizer plus multipliers and KKT residuals
        (``stationarity = ||c2 w + l1 w - l2 a||``).

    Raises
    ------
    InfeasibleError
        The halfspace lies farther than ``sqrt(R)`` from the origin.
    """
    a, r = affine
    return _Qcqp(np.asarray(c2, complex)).solve(float(ball_radius_sq), a, float(r))


def spca_minimize_ds(mm, c: EfficiencyConstraint, init=None, tol: float = 1e-8,
                     max_iters: int = 200) -> SolverReport:
    """Sequential convex approximation for the efficiency-constrained problem.

    Parameters
    ----------
    mm : MomentMatrices
    c : EfficiencyConstraint
    init : WeightVector, optional
        Feasible starting point. When omitted, the unconstrained minimizer is
        returned directly if it meets the efficiency target, and the loop
        otherwise starts from ``feasible_init``.
    tol : float
        Stop once the relative objective decrease falls below this.
    max_iters : int

    Returns
    -------
    SolverReport
    """
    if init is None:
        w0, _ = min_ds_weights(mm)
        if radiation_efficiency(w0, mm)[1] >= c.epsilon:
            # the certified unconstrained minimizer is feasible, hence optimal
            w = as_weights(default_init(mm, c))
            return SolverReport((float(np.real(np.vdot(w, mm.c2 @ w))),),
                                (feasibility_residual(w, mm, c),), Termination.CONVERGED,
                                WeightVector(w), extra={"stationarity": ()})
        init = feasible_init(mm, c)
    w = as_weights(init).copy()
    if w.size != mm.m:
        raise InvalidArgumentError(f"init length {w.size} != M = {mm.m}")
    R = _ball_radius_sq(mm, c)
    res0 = feasibility_residual(w, mm, c)
    obj = float(np.real(np.vdot(w, mm.c2 @ w)))
    if res0 > 1e-8:
        return SolverReport((obj,), (res0,), Termination.INFEASIBLE_START, WeightVector(w))

    sub = _Qcqp(mm.c2)
    objs, resid, kkt = [obj], [res0], []
    term = Termination.MAX_ITERS
    for _ in range(max_iters):
        a = mm.c0 @ w
        r = 1.0 + np.real(np.vdot(w, a))
        sol = sub.solve(R, a, r)
        new = float(np.real(np.vdot(sol.weights, mm.c2 @ sol.weights)))
        if new > obj:
            # the previous iterate is feasible for this subproblem, so a rise is rounding
            term = Termination.CONVERGED
            break
        w = sol.weights
        kkt.append(sol.stationarity)
        decrease = obj - new
        obj = new
        objs.append(obj)
        resid.append(feasibility_residual(w, mm, c))
        if decrease <= tol * max(abs(obj), 1e-300):
            term = Termination.CONVERGED
            break
    return SolverReport(tuple(objs), tuple(resid), term, WeightVector(w),
                        extra={"stationarity": tuple(kkt)})
