"""Unconstrained Doppler-spread minimization (the generalized-eigenvalue baseline)."""
from __future__ import annotations

import numpy as np

from ..errors import NumericalFailure
from ..metrics import WeightVector

# C0 eigenvalues below this fraction of lambda_max are treated as exact zeros
SUBSPACE_RTOL = 1e-12


def _canonical(w):
    w = w / np.linalg.norm(w)
    k = int(np.argmax(np.abs(w)))
    return w * (abs(w[k]) / w[k])


def generalized_spectrum(c0, c2, rtol: float = SUBSPACE_RTOL):
    """Generalized eigenpairs of ``(c2, c0)`` on the numerically resolved range of ``c0``.

    ``c0`` is nearly singular for large arrays (its spectrum decays to rounding
    level). Directions with ``c0`` eigenvalue below ``rtol * lambda_max`` carry
    no radiated power and make the quotient meaningless, so the problem is
    whitened on the complementary subspace and solved as a standard Hermitian
    eigenproblem there.

    Returns
    -------
    values : numpy.ndarray
        Ascending generalized eigenvalues.
    vectors : numpy.ndarray
        Columns normalized to ``v^H c0 v = 1``.
    """
    try:
        lam, V = np.linalg.eigh(c0)
        keep = lam > rtol * lam[-1]
        B = V[:, keep] / np.sqrt(lam[keep])
        A = B.conj().T @ c2 @ B
        vals, Y = np.linalg.eigh(0.5 * (A + A.conj().T))
    except np.linalg.LinAlgError as exc:
        raise NumericalFailure(f"eigensolver failed: {exc}") from exc
    if not np.all(np.isfinite(vals)):
        raise NumericalFailure("eigensolver returned non-finite values")
    return vals, B @ Y


def min_ds_weights(mm):
    """Weights minimizing the Doppler-spread quotient with no further constraint.

    Parameters
    ----------
    mm : MomentMatrices

    Returns
    -------
    weights : WeightVector
        Unit-norm minimizer, phase fixed so its largest entry is real positive.
    normalized_ds : float
        Square root of the smallest generalized eigenvalue.
    """
    vals, vecs = generalized_spectrum(mm.c0, mm.c2)
    smin = max(float(vals[0]), 0.0)
    w = vecs[:, 0]
    # certificate: the returned quotient is the bottom of the computed spectrum
    q = np.real(np.vdot(w, mm.c2 @ w)) / np.real(np.vdot(w, mm.c0 @ w))
    if not np.isfinite(q) or q > vals[0] + 1e-8 * max(abs(vals[-1]), 1e-300):
        raise NumericalFailure("generalized eigenvector does not attain the spectral minimum",
                               estimates=(q, vals[0]))
    return WeightVector(_canonical(w)), float(np.sqrt(smin))


def min_quotient(c0, c2) -> float:
    """Smallest generalized eigenvalue (the squared minimum normalized spread)."""
    return max(float(generalized_spectrum(c0, c2)[0][0]), 0.0)
