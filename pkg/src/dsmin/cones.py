"""Cone-algebra backend selection: compiled kernel if built, else pure Python."""
import warnings

try:
    from . import _cones as _impl

    BACKEND = "compiled"
except ImportError:
    warnings.warn(
        "compiled cone kernel not available, falling back to the slower pure-Python "
        "implementation (build it with `pip install -e . --no-build-isolation`)",
        RuntimeWarning,
        stacklevel=2,
    )
    from . import _cones_py as _impl

    BACKEND = "python"

jprod = _impl.jprod
jdiv = _impl.jdiv
min_eig = _impl.min_eig
nt_scaling = _impl.nt_scaling
apply_scaling = _impl.apply_scaling
max_step = _impl.max_step
