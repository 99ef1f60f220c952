"""Time the compiled kernels against the numpy fallback.

    python benchmarks/bench_kernels.py --n 128 256 --repeat 20

Prints one line per (kernel, n) with the median time of each backend and the
speedup, and checks that both backends agree before timing them.
"""
import argparse
import json
import statistics
import sys
import time

import numpy as np

from micropolar._kernels import backends


def _inputs(n, rng):
    shape_c = (n, n // 2 + 1)
    w = rng.standard_normal(shape_c) + 1j * rng.standard_normal(shape_c)
    h = rng.standard_normal(shape_c) + 1j * rng.standard_normal(shape_c)
    e = [rng.standard_normal(shape_c) for _ in range(4)]
    ksq = rng.uniform(0.0, n * n / 4.0, size=shape_c)
    inv = np.where(ksq > 0, 1.0 / np.where(ksq > 0, ksq, 1.0), 0.0)
    weight = np.full(shape_c, 2.0)
    phys = [rng.standard_normal((n, n)) for _ in range(6)]
    return {
        "apply_propagator": (w, h, *e),
        "transport": tuple(phys),
        "quadratic_moments": (w, h, ksq, inv, weight),
        "masked_sum": (w, ksq, inv, weight, n * n / 16.0),
    }


def _median_time(fn, args, repeat):
    fn(*args)
    times = []
    for _ in range(repeat):
        t0 = time.perf_counter()
        fn(*args)
        times.append(time.perf_counter() - t0)
    return statistics.median(times)


def _agree(a, b):
    if isinstance(a, tuple):
        return all(_agree(x, y) for x, y in zip(a, b))
    a, b = np.asarray(a), np.asarray(b)
    scale = max(float(np.abs(a).max()), 1e-300)
    return float(np.abs(a - b).max()) <= 1e-12 * scale


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--n", type=int, nargs="+", default=[64, 128, 256])
    ap.add_argument("--repeat", type=int, default=20)
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--json", metavar="PATH", help="also write results as JSON")
    args = ap.parse_args(argv)

    found = backends()
    if "compiled" not in found:
        print("compiled backend not built; timing the python fallback only", file=sys.stderr)
    rng = np.random.default_rng(args.seed)
    results = []
    for n in args.n:
        inputs = _inputs(n, rng)
        for name, fargs in inputs.items():
            row = {"kernel": name, "n": n}
            outs = {}
            for bname, mod in found.items():
                fn = getattr(mod, name)
                outs[bname] = fn(*fargs)
                row[bname] = _median_time(fn, fargs, args.repeat)
            if "compiled" in outs:
                row["agree"] = _agree(outs["python"], outs["compiled"])
                row["speedup"] = row["python"] / row["compiled"]
            results.append(row)
            line = f"{name:18s} n={n:4d} python={row['python'] * 1e3:9.3f} ms"
            if "compiled" in row:
                line += f"  compiled={row['compiled'] * 1e3:9.3f} ms  speedup={row['speedup']:5.2f}x  agree={row['agree']}"
            print(line)
    if args.json:
        with open(args.json, "w", encoding="utf-8") as fh:
            json.dump(results, fh, indent=2)
    return 0 if all(r.get("agree", True) for r in results) else 1


if __name__ == "__main__":
    sys.exit(main())
