"""Time the compiled kernels against the numpy fallback.

    python benchmarks/bench_kernels.py [--rows 100000] [--repeat 20]
"""

import argparse
import timeit

import numpy as np

from bnscore import _kernels_py

try:
    from bnscore import _kernels as compiled
except ImportError:
    compiled = None


def cases(rows, rng):
    cards = (3, 2, 4, 3, 2)
    data = np.ascontiguousarray(np.column_stack([rng.integers(0, r, size=rows) for r in cards]).astype(np.int64))
    alpha = rng.uniform(0.1, 2.0, size=(24, 3))
    counts = rng.integers(0, 500, size=(24, 3)).astype(np.int64)
    return {
        "config_counts (4 vars)": lambda k: k.config_counts(data, [0, 1, 2, 3], cards),
        "bde_family (24x3)": lambda k: k.bde_family(alpha, counts),
        "lgamma_shift_sum (72)": lambda k: k.lgamma_shift_sum(alpha.ravel(), counts.ravel()),
    }


def main():
    parser = argparse.ArgumentParser()
    parser.add_argument("--rows", type=int, default=100_000)
    parser.add_argument("--repeat", type=int, default=20)
    args = parser.parse_args()
    rng = np.random.default_rng(0)
    backends = {"python": _kernels_py}
    if compiled is not None:
        backends["compiled"] = compiled
    else:
        print("compiled extension not built; timing the fallback only")
    print(f"{'kernel':28s} " + " ".join(f"{name:>12s}" for name in backends) + "     speedup")
    for label, fn in cases(args.rows, rng).items():
        times = {name: min(timeit.repeat(lambda: fn(k), number=1, repeat=args.repeat)) for name, k in backends.items()}
        cells = " ".join(f"{times[name] * 1e6:10.1f}us" for name in backends)
        speedup = f"{times['python'] / times['compiled']:8.1f}x" if "compiled" in times else ""
        print(f"{label:28s} {cells} {speedup}")


if __name__ == "__main__":
    main()
