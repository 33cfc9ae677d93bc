"""Pure-Python cone algebra for the interior-point solver.

A cone vector is laid out as ``l`` nonnegative-orthant entries followed by
second-order cone blocks of sizes ``q[0], q[1], ...``. The compiled module
``_cones`` exposes the same functions with the same signatures.
"""
import numpy as np


def _blocks(l, q):
    o = l
    for k in q:
        yield o, o + k
        o += k


def jprod(u, v, l, q):
    """Jordan product ``u o v``."""
    r = np.empty_like(u)
    r[:l] = u[:l] * v[:l]
    for a, b in _blocks(l, q):
        ua, va = u[a:b], v[a:b]
        r[a] = ua @ va
        r[a + 1:b] = ua[0] * va[1:] + va[0] * ua[1:]
    return r


def jdiv(lam, d, l, q):
    """Solve ``lam o x = d`` for ``x``."""
    r = np.empty_like(d)
    r[:l] = d[:l] / lam[:l]
    for a, b in _blocks(l, q):
        la, da = lam[a:b], d[a:b]
        n1 = np.linalg.norm(la[1:])
        det = (la[0] - n1) * (la[0] + n1)
        x0 = (la[0] * da[0] - la[1:] @ da[1:]) / det
        r[a] = x0
        r[a + 1:b] = (da[1:] - x0 * la[1:]) / la[0]
    return r


def min_eig(u, l, q):
    """Smallest Jordan eigenvalue; positive iff ``u`` is interior."""
    m = np.min(u[:l]) if l else np.inf
    for a, b in _blocks(l, q):
        m = min(m, u[a] - np.linalg.norm(u[a + 1:b]))
    return float(m)


def nt_scaling(s, z, l, q):
    """Nesterov-Todd scaling of the pair ``(s, z)``.

    Returns
    -------
    dl : ndarray
        Orthant part, ``sqrt(s / z)``.
    beta : ndarray
        One scale factor per second-order block.
    v : ndarray
        Hyperbolic Householder vectors, concatenated over blocks.
    """
    dl = np.sqrt(s[:l] / z[:l])
    beta = np.empty(len(q))
    v = np.empty(int(np.sum(q)) if len(q) else 0)
    vo = 0
    for i, (a, b) in enumerate(_blocks(l, q)):
        sk, zk = s[a:b], z[a:b]
        ns = np.linalg.norm(sk[1:])
        nz = np.linalg.norm(zk[1:])
        sn = np.sqrt((sk[0] - ns) * (sk[0] + ns))
        zn = np.sqrt((zk[0] - nz) * (zk[0] + nz))
        sb = sk / sn
        zb = zk / zn
        gam = np.sqrt(0.5 * (1.0 + sb @ zb))
        wb = sb / (2 * gam)
        wb[0] += zb[0] / (2 * gam)
        wb[1:] -= zb[1:] / (2 * gam)
        vk = wb.copy()
        vk[0] += 1.0
        vk /= np.sqrt(2.0 * (wb[0] + 1.0))
        beta[i] = np.sqrt(sn / zn)
        v[vo:vo + (b - a)] = vk
        vo += b - a
    return dl, beta, v


def apply_scaling(dl, beta, v, x, l, q, inverse):
    """Apply ``W`` (or ``W^{-1}``) to a vector or to every column of a matrix."""
    x = np.asarray(x, dtype=float)
    out = np.empty_like(x)
    if x.ndim == 1:
        out[:l] = x[:l] / dl if inverse else x[:l] * dl
    else:
        out[:l] = x[:l] / dl[:, None] if inverse else x[:l] * dl[:, None]
    vo = 0
    for i, (a, b) in enumerate(_blocks(l, q)):
        vk = v[vo:vo + (b - a)].copy()
        vo += b - a
        xa = x[a:b]
        jx = xa.copy()
        jx[1:] = -jx[1:]
        if inverse:
            vk[1:] = -vk[1:]
            out[a:b] = (2.0 * np.multiply.outer(vk, vk @ xa) - jx) / beta[i]
        else:
            out[a:b] = beta[i] * (2.0 * np.multiply.outer(vk, vk @ xa) - jx)
    return out


def max_step(u, d, l, q):
    """Largest ``t >= 0`` with ``u + t d`` in the closed cone (``inf`` if unbounded)."""
    t = np.inf
    if l:
        neg = d[:l] < 0
        if np.any(neg):
            t = min(t, float(np.min(-u[:l][neg] / d[:l][neg])))
    for a, b in _blocks(l, q):
        u0, u1, d0, d1 = u[a], u[a + 1:b], d[a], d[a + 1:b]
        qa = d0 * d0 - d1 @ d1
        qb = 2.0 * (u0 * d0 - u1 @ d1)
        qc = u0 * u0 - u1 @ u1
        if d0 < 0:
            t = min(t, -u0 / d0)
        if abs(qa) < 1e-300:
            if qb < 0:
                t = min(t, -qc / qb)
            continue
        disc = qb * qb - 4.0 * qa * qc
        if disc >= 0:
            qq = -0.5 * (qb + np.copysign(np.sqrt(disc), qb))
            for root in (qq / qa, qc / qq if qq != 0 else np.inf):
                if root > 0:
                    t = min(t, root)
    return float(t)
