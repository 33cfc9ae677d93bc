import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from dsmin import _cones_py as py_k
from dsmin import cones

try:
    from dsmin import _cones as c_k
except ImportError:  # extension not built
    c_k = None

BACKENDS = [py_k] + ([c_k] if c_k is not None else [])


def _interior(rng, l, q, margin=0.3):
    u = rng.standard_normal(l + int(np.sum(q)))
    u[:l] = np.abs(u[:l]) + margin
    o = l
    for k in q:
        u[o] = np.linalg.norm(u[o + 1:o + k]) + margin
        o += k
    return u


dims_st = st.tuples(st.integers(0, 4), st.lists(st.integers(1, 6), min_size=0, max_size=5)) \
    .filter(lambda d: d[0] + len(d[1]) > 0)


@pytest.mark.parametrize("k", BACKENDS, ids=lambda m: m.__name__)
@given(dims=dims_st, seed=st.integers(0, 2**31))
@settings(max_examples=60, deadline=None)
def test_cone_algebra_identities(k, dims, seed):
    rng = np.random.default_rng(seed)
    l, q = dims[0], np.array(dims[1], dtype=np.int64)
    s, z = _interior(rng, l, q), _interior(rng, l, q)
    x = rng.standard_normal(s.size)
    # jdiv inverts jprod
    np.testing.assert_allclose(k.jdiv(s, k.jprod(s, x, l, q), l, q), x, rtol=1e-8, atol=1e-8)
    dl, beta, v = k.nt_scaling(s, z, l, q)
    # Nesterov-Todd: W z = W^{-1} s, and W^{-1} undoes W
    np.testing.assert_allclose(k.apply_scaling(dl, beta, v, z, l, q, False),
                               k.apply_scaling(dl, beta, v, s, l, q, True), rtol=1e-8, atol=1e-10)
    wx = k.apply_scaling(dl, beta, v, x, l, q, False)
    np.testing.assert_allclose(k.apply_scaling(dl, beta, v, wx, l, q, True), x, rtol=1e-8, atol=1e-9)
    assert k.min_eig(s, l, q) > 0


@pytest.mark.parametrize("k", BACKENDS, ids=lambda m: m.__name__)
@given(dims=dims_st, seed=st.integers(0, 2**31))
@settings(max_examples=60, deadline=None)
def test_max_step_lands_on_boundary(k, dims, seed):
    rng = np.random.default_rng(seed)
    l, q = dims[0], np.array(dims[1], dtype=np.int64)
    u = _interior(rng, l, q)
    d = rng.standard_normal(u.size)
    t = k.max_step(u, d, l, q)
    if np.isfinite(t):
        assert abs(k.min_eig(u + t * d, l, q)) < 1e-7 * (1 + np.abs(u).max() + t * np.abs(d).max())
        assert k.min_eig(u + 0.99 * t * d, l, q) > -1e-12
    else:
        assert k.min_eig(u + 1e6 * d, l, q) >= -1e-6


@pytest.mark.skipif(c_k is None, reason="compiled kernel not built")
def test_backends_agree():
    rng = np.random.default_rng(0)
    l, q = 3, np.array([3, 5, 1, 4, 3], dtype=np.int64)
    s, z = _interior(rng, l, q), _interior(rng, l, q)
    d = rng.standard_normal(s.size)
    X = rng.standard_normal((s.size, 5))
    for f in ("jprod", "jdiv"):
        np.testing.assert_allclose(getattr(c_k, f)(s, z, l, q), getattr(py_k, f)(s, z, l, q), atol=1e-13)
    a, b = c_k.nt_scaling(s, z, l, q), py_k.nt_scaling(s, z, l, q)
    for x, y in zip(a, b):
        np.testing.assert_allclose(x, y, atol=1e-13)
    for inv in (False, True):
        np.testing.assert_allclose(c_k.apply_scaling(*a, X, l, q, inv), py_k.apply_scaling(*b, X, l, q, inv), atol=1e-12)
    assert c_k.max_step(s, d, l, q) == pytest.approx(py_k.max_step(s, d, l, q), rel=1e-12)
    assert c_k.min_eig(s, l, q) == pytest.approx(py_k.min_eig(s, l, q), rel=1e-12)


def test_backend_selected():
    assert cones.BACKEND in ("compiled", "python")
    if c_k is not None:
        assert cones.BACKEND == "compiled"


def test_fallback_warns_when_extension_missing():
    import subprocess
    import sys
    code = (
        "import sys, warnings\n"
        "sys.modules['dsmin._cones'] = None\n"
        "with warnings.catch_warnings(record=True) as rec:\n"
        "    warnings.simplefilter('always')\n"
        "    from dsmin import cones\n"
        "assert cones.BACKEND == 'python', cones.BACKEND\n"
        "assert any(issubclass(r.category, RuntimeWarning) for r in rec)\n"
        "from dsmin import AngleRegion, ArrayConfig, build_moments\n"
        "from dsmin.solvers import select_antennas\n"
        "mm = build_moments(AngleRegion.from_degrees(30, 60), ArrayConfig(6, 0.45))\n"
        "print(len(select_antennas(mm, 3).support))\n"
    )
    out = subprocess.run([sys.executable, "-c", code], capture_output=True, text=True, timeout=300)
    assert out.returncode == 0, out.stderr
    assert int(out.stdout.strip()) <= 3
