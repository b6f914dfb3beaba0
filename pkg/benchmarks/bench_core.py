"""Time the compiled kernel core against the NumPy fallback.

    python3 benchmarks/bench_core.py [--n 400] [--repeat 3]

Both backends evaluate the same Wright-family batches; the script reports the best
wall time of each and the largest relative disagreement in magnitude.
"""
import argparse
import time

import numpy as np

from fracdo import _backend


def best_time(fn, repeat):
    times = []
    for _ in range(repeat):
        start = time.perf_counter()
        fn()
        times.append(time.perf_counter() - start)
    return min(times)


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--n", type=int, default=400, help="points per batch")
    ap.add_argument("--repeat", type=int, default=3)
    args = ap.parse_args(argv)

    impls = _backend.implementations()
    if "cython" not in impls:
        print("compiled core not built; only the fallback is available")
    x = np.geomspace(1e-3, 50.0, args.n)
    print(f"{'alpha':>6} {'kind':>5} " + " ".join(f"{name:>10}" for name in impls) + "   speedup  max rel diff")
    for alpha in (0.3, 0.7):
        for kind in _backend.KINDS:
            vals, secs = {}, {}
            for name, mod in impls.items():
                vals[name] = mod.wright_family(alpha, kind, x, 1e-13)
                secs[name] = best_time(lambda: mod.wright_family(alpha, kind, x, 1e-13), args.repeat)
            line = f"{alpha:6.2f} {kind:>5} " + " ".join(f"{secs[n] * 1e3:8.2f}ms" for n in impls)
            if "cython" in impls:
                # values are (mantissa, log-scale) pairs; compare m e^s in log form
                (ma, sa), (mb, sb) = vals["cython"], vals["python"]
                ok = (ma != 0) & (mb != 0) & np.isfinite(sa) & np.isfinite(sb)
                la = np.log(np.abs(ma[ok])) + sa[ok]
                lb = np.log(np.abs(mb[ok])) + sb[ok]
                rel = float(np.max(np.abs(np.expm1(la - lb)))) if ok.any() else 0.0
                line += f"  {secs['python'] / secs['cython']:7.1f}x  {rel:.1e}"
            print(line)


if __name__ == "__main__":
    main()
