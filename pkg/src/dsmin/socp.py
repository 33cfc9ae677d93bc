"""Primal-dual interior-point method for small dense second-order cone programs.

Solves

    minimize    c^T x
    subject to  G x + s = h,   s in K

where K is a product of a nonnegative orthant and second-order cones. The
iteration is the Mehrotra predictor-corrector on Nesterov-Todd scaled
directions. The scaled KKT system is solved through a QR factorization of the
scaled constraint matrix, followed by two steps of iterative refinement.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import scipy.linalg as sla

from . import cones


@dataclass(frozen=True)
class ConeDims:
    """``l`` orthant entries followed by second-order blocks of sizes ``q``."""

    l: int
    q: tuple

    @property
    def size(self) -> int:
        return self.l + int(sum(self.q))

    @property
    def degree(self) -> int:
        return self.l + len(self.q)

    def q_array(self) -> np.ndarray:
        return np.asarray(self.q, dtype=np.int64)

    def identity(self) -> np.ndarray:
        e = np.zeros(self.size)
        e[: self.l] = 1.0
        o = self.l
        for k in self.q:
            e[o] = 1.0
            o += k
        return e


@dataclass(frozen=True)
class SocpResult:
    x: np.ndarray
    s: np.ndarray
    z: np.ndarray
    status: str
    iterations: int
    error: float


def solve_socp(c, G, h, dims: ConeDims, tol: float = 1e-9, max_iters: int = 100) -> SocpResult:
    """Solve the cone program; returns the best iterate seen.

    ``status`` is ``"optimal"`` when the combined relative primal residual,
    dual residual and gap fall below ``tol``; otherwise ``"stalled"``, with the
    achieved value in ``error``.
    """
    c = np.asarray(c, float)
    G = np.asarray(G, float)
    h = np.asarray(h, float)
    l, q = dims.l, dims.q_array()
    e = dims.identity()
    nu = dims.degree
    hn = max(1.0, np.linalg.norm(h))
    cn = max(1.0, np.linalg.norm(c))

    Qg, Rg = np.linalg.qr(G)
    x = sla.solve_triangular(Rg, Qg.T @ h)
    s = h - G @ x
    z = -Qg @ sla.solve_triangular(Rg, c, trans="T")
    for v in (s, z):
        a = cones.min_eig(v, l, q)
        if a <= 0:
            v += (1.0 - a) * e

    best = (np.inf, x, s, z, 0)
    it = 0
    for it in range(max_iters):
        rx = G.T @ z + c
        rz = G @ x + s - h
        gap = s @ z
        pobj = c @ x
        err = max(np.linalg.norm(rz) / hn, np.linalg.norm(rx) / cn, gap / max(1.0, abs(pobj)))
        if not np.isfinite(err):
            break
        if err < best[0]:
            best = (err, x.copy(), s.copy(), z.copy(), it)
        if err < tol or it - best[4] >= 4:
            break

        dl, beta, vv = cones.nt_scaling(s, z, l, q)
        if not (np.all(np.isfinite(dl)) and np.all(np.isfinite(beta)) and np.all(np.isfinite(vv))):
            break

        def W(y, dl=dl, beta=beta, vv=vv):
            return cones.apply_scaling(dl, beta, vv, y, l, q, False)

        def Wi(y, dl=dl, beta=beta, vv=vv):
            return cones.apply_scaling(dl, beta, vv, y, l, q, True)

        lam = W(z)
        Gh = Wi(G)
        Qf, Rf = np.linalg.qr(Gh)

        def kkt(bx, bz, Gh=Gh, Qf=Qf, Rf=Rf, Wi=Wi):
            bh = Wi(bz)
            y = sla.solve_triangular(Rf, bx, trans="T")
            dx = sla.solve_triangular(Rf, y + Qf.T @ bh)
            return dx, Wi(Gh @ dx - bh)

        def direction(ds, rx=rx, rz=rz, lam=lam, W=W, kkt=kkt):
            bx = -rx
            bz = -rz - W(cones.jdiv(lam, ds, l, q))
            dx, dz = kkt(bx, bz)
            for _ in range(2):
                cx, cz = kkt(bx - G.T @ dz, bz - (G @ dx - W(W(dz))))
                dx = dx + cx
                dz = dz + cz
            return dx, -rz - G @ dx, dz

        mu = gap / nu
        ll = cones.jprod(lam, lam, l, q)
        dxa, dsa, dza = direction(-ll)
        aa = min(1.0, cones.max_step(s, dsa, l, q), cones.max_step(z, dza, l, q))
        sig = ((s + aa * dsa) @ (z + aa * dza) / gap) ** 3
        ds = -ll - cones.jprod(Wi(dsa), W(dza), l, q) + sig * mu * e
        dx, dss, dz = direction(ds)
        step = min(1.0, 0.99 * min(cones.max_step(s, dss, l, q), cones.max_step(z, dz, l, q)))
        x = x + step * dx
        s = s + step * dss
        z = z + step * dz

    err, x, s, z, bit = best
    return SocpResult(x, s, z, "optimal" if err < tol else "stalled", max(it, bit), float(err))
