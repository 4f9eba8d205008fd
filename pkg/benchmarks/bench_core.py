"""Compare the compiled and numpy backends on the two hot kernels.

    python3 benchmarks/bench_core.py [--repeat 5]
"""
from __future__ import annotations

import argparse
import timeit

import numpy as np

from bohrfact import _pycore

try:
    from bohrfact import _core
except ImportError:  # extension not built
    _core = None


def _poly_arrays(rng, n_terms, box):
    j = rng.integers(-box, box + 1, n_terms)
    k = rng.integers(-box, box + 1, n_terms)
    c = rng.standard_normal(n_terms) + 1j * rng.standard_normal(n_terms)
    return j.astype(np.int64), k.astype(np.int64), c


def cases(seed: int = 0):
    rng = np.random.default_rng(seed)
    for n_terms, box in [(50, 10), (400, 20), (2000, 200)]:
        a = _poly_arrays(rng, n_terms, box)
        b = _poly_arrays(rng, n_terms, box)
        yield f"cauchy_product {n_terms}x{n_terms} terms, box {box}", "cauchy_product", (*a, *b)
    for kind, name in [(0, "D"), (1, "H"), (3, "1/2+A")]:
        for n in (16, 256):
            yield f"kernel_abs_integral {name}_{n}", "kernel_abs_integral", (kind, n, 1e-8)


def main(argv=None) -> None:
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--repeat", type=int, default=5)
    parser.add_argument("--seed", type=int, default=0)
    args = parser.parse_args(argv)
    if _core is None:
        print("compiled backend not built; only timing the numpy fallback")
    print(f"{'case':48s} {'python ms':>10s} {'cython ms':>10s} {'speedup':>8s}")
    for label, fn, fargs in cases(args.seed):
        times = {}
        for name, mod in (("python", _pycore), ("cython", _core)):
            if mod is None:
                continue
            f = getattr(mod, fn)
            number = 3
            best = min(timeit.repeat(lambda: f(*fargs), number=number, repeat=args.repeat)) / number
            times[name] = best * 1e3
        cy = times.get("cython")
        speed = f"{times['python'] / cy:8.1f}" if cy else "     n/a"
        cy_s = f"{cy:10.3f}" if cy else "       n/a"
        print(f"{label:48s} {times['python']:10.3f} {cy_s} {speed}")


if __name__ == "__main__":
    main()
