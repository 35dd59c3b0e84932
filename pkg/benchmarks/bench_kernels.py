"""Time the numba and numpy backends on the same basis searches.

    python benchmarks/bench_kernels.py                   # n=500, d=100, about 15 s
    python benchmarks/bench_kernels.py --rows 1000 --cols 150 --rank 30

Both backends must return the same selection; the script exits non-zero if not.
The first numba call (JIT compile or cache load) is timed separately.
"""

import argparse
import sys
import time

from faultbasis.kernels import available_backends
from faultbasis.synth import SynthSpec, synth
from faultbasis.wrongselect import SearchConfig, wrong_select


def instance(rows: int, cols: int, planted: int, seed: int):
    extra = max(rows - planted, 0)
    spec = SynthSpec(planted_rank=planted, d=cols, extra_dependent_rows=extra * 3 // 4,
                     noise_rows=extra - extra * 3 // 4, seed=seed)
    return synth(spec, f"bench{seed}").matrix


def time_backend(M, cfg, backend, repeats):
    best = float("inf")
    result = None
    for _ in range(repeats):
        t0 = time.perf_counter()
        sel, trace = wrong_select(M, cfg, backend=backend)
        best = min(best, time.perf_counter() - t0)
        result = (sel, sum(trace.steps()))
    return best, result


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--rows", type=int, default=500)
    ap.add_argument("--cols", type=int, default=100)
    ap.add_argument("--rank", type=int, default=20)
    ap.add_argument("--restarts", type=int, default=5)
    ap.add_argument("--steps", type=int, default=1000)
    ap.add_argument("--repeats", type=int, default=1)
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args(argv)

    M = instance(args.rows, args.cols, args.rank, args.seed)
    cfg = SearchConfig(restarts=args.restarts, max_steps=args.steps, seed=args.seed, early_stop_on_zero=False)
    print(f"matrix: n={M.n} d={M.d}; restarts={cfg.restarts} max_steps={cfg.max_steps}")

    backends = available_backends()
    if "numba" in backends:
        t0 = time.perf_counter()
        wrong_select(M, SearchConfig(restarts=1, max_steps=1), backend="numba")
        print(f"numba warm-up (compile or cache load): {time.perf_counter() - t0:.2f}s")

    results = {}
    for name in backends:
        secs, (sel, steps) = time_backend(M, cfg, name, args.repeats)
        results[name] = (secs, sel)
        print(f"{name:>6}: {secs:8.3f}s best of {args.repeats}, {steps} moves, F={float(sel.diversity):.6f}")

    if len(results) == 2:
        (a_t, a), (b_t, b) = results["numba"], results["numpy"]
        print(f"speedup numba over numpy: {b_t / a_t:.1f}x")
        if a.indices != b.indices or a.diversity != b.diversity:
            print("backends disagree", file=sys.stderr)
            return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
