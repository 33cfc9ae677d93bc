"""Compare the compiled cone kernels with the pure-Python fallback.

Times the individual kernels on the cone layout of the sparse-selection
program (one linear row, M three-dimensional cones, one cone of size 2M+1)
and then a complete sparse-selection subproblem solve under each backend.

    python benchmarks/bench_cones.py [--m 16 32 64] [--repeat 5]
"""
import argparse
import contextlib
import timeit

import numpy as np

from dsmin import AngleRegion, ArrayConfig, build_moments, cones
from dsmin import _cones_py
from dsmin.solvers import l1_subproblem, min_quotient

KERNELS = ("jprod", "jdiv", "min_eig", "nt_scaling", "apply_scaling", "max_step")


def _compiled():
    try:
        from dsmin import _cones
    except ImportError:
        return None
    return _cones


@contextlib.contextmanager
def backend(module):
    saved = {k: getattr(cones, k) for k in KERNELS}
    try:
        for k in KERNELS:
            setattr(cones, k, getattr(module, k))
        yield
    finally:
        for k, f in saved.items():
            setattr(cones, k, f)


def _interior(rng, l, q):
    """Random point strictly inside the cone product."""
    parts = [rng.uniform(0.5, 2.0, l)]
    for n in q:
        tail = rng.standard_normal(n - 1)
        parts.append(np.concatenate([[np.linalg.norm(tail) + rng.uniform(0.5, 2.0)], tail]))
    return np.concatenate(parts)


def kernel_cases(mod, m, rng):
    l = 1
    q = np.array([3] * m + [2 * m + 1], dtype=np.int64)
    s, z = _interior(rng, l, q), _interior(rng, l, q)
    d = rng.standard_normal(s.size)
    dl, beta, v = mod.nt_scaling(s, z, l, q)
    lam = mod.apply_scaling(dl, beta, v, z, l, q, False)
    return {
        "jprod": lambda: mod.jprod(s, z, l, q),
        "jdiv": lambda: mod.jdiv(lam, d, l, q),
        "min_eig": lambda: mod.min_eig(s, l, q),
        "nt_scaling": lambda: mod.nt_scaling(s, z, l, q),
        "apply_scaling": lambda: mod.apply_scaling(dl, beta, v, d, l, q, False),
        "max_step": lambda: mod.max_step(s, d, l, q),
    }


def best_of(fn, repeat, number):
    return min(timeit.repeat(fn, repeat=repeat, number=number)) / number


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__, formatter_class=argparse.RawDescriptionHelpFormatter)
    ap.add_argument("--m", type=int, nargs="+", default=[16, 32, 64])
    ap.add_argument("--repeat", type=int, default=5)
    args = ap.parse_args(argv)

    compiled = _compiled()
    if compiled is None:
        print("compiled kernel not built; only the Python fallback can be timed")
    mods = {"python": _cones_py}
    if compiled is not None:
        mods["compiled"] = compiled

    print(f"{'M':>4} {'kernel':<14} " + " ".join(f"{k + ' [us]':>14}" for k in mods) + f" {'speedup':>8}")
    for m in args.m:
        per = {}
        for name, mod in mods.items():
            cases = kernel_cases(mod, m, np.random.default_rng(m))
            per[name] = {k: best_of(f, args.repeat, 200) for k, f in cases.items()}
        for k in KERNELS:
            times = [per[n][k] * 1e6 for n in mods]
            sp = f"{times[0] / times[1]:8.1f}" if len(times) == 2 else ""
            print(f"{m:>4} {k:<14} " + " ".join(f"{t:14.2f}" for t in times) + f" {sp}")

    print()
    print(f"{'M':>4} {'full l1 solve':<14} " + " ".join(f"{k + ' [ms]':>14}" for k in mods) + f" {'speedup':>8}")
    for m in args.m:
        mm = build_moments(AngleRegion.from_degrees(30, 60), ArrayConfig(m, 0.45))
        sigma = 1.5 * min_quotient(mm.c0, mm.c2)
        times, sols = [], []
        for mod in mods.values():
            with backend(mod):
                sols.append(np.asarray(l1_subproblem(mm, sigma).weights))
                times.append(best_of(lambda: l1_subproblem(mm, sigma), max(1, args.repeat // 2), 1) * 1e3)
        sp = f"{times[0] / times[1]:8.1f}" if len(times) == 2 else ""
        print(f"{m:>4} {'':<14} " + " ".join(f"{t:14.1f}" for t in times) + f" {sp}")
        if len(sols) == 2:
            diff = np.abs(np.asarray(sols[0]) - np.asarray(sols[1])).max()
            print(f"{'':>4} {'max |dw|':<14} {diff:14.2e}")


if __name__ == "__main__":
    main()
