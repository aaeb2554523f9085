"""Benchmark the compiled rank kernel against the numpy fallback.

Run with::

    python3 benchmarks/bench_rank_kernel.py [--trials N]

Both backends draw identical stream words and produce identical count
arrays, so the comparison is purely about throughput. The compiled backend
is skipped (with a note) when the extension is not built.
"""

from __future__ import annotations

import argparse
import time

from shardprice import kernels


def _time_backend(backend: str, k: int, q: int, trials: int, mix: bool) -> float:
    start = time.perf_counter()
    kernels.innovation_experiment(k, q, trials, seed=42, mix_units=mix, backend=backend)
    return time.perf_counter() - start


def main() -> int:
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--trials", type=int, default=2000,
                        help="trials per configuration (default 2000)")
    args = parser.parse_args()

    backends = kernels.available_backends()
    configs = [
        (32, 2, False),
        (32, 2, True),
        (32, 256, False),
        (32, 65536, False),
        (64, 65536, False),
    ]

    print(f"backends: {', '.join(backends)}   trials per cell: {args.trials}")
    header = f"{'k':>4} {'q':>7} {'mixed':>6}"
    for b in backends:
        header += f" {b + ' (s)':>12}"
    if len(backends) == 2:
        header += f" {'speedup':>9}"
    print(header)

    for k, q, mix in configs:
        row = f"{k:>4} {q:>7} {str(mix).lower():>6}"
        times = []
        for b in backends:
            # warm once so table construction is not billed to the kernel
            kernels.innovation_experiment(k, q, 8, seed=1, mix_units=mix, backend=b)
            times.append(_time_backend(b, k, q, args.trials, mix))
            row += f" {times[-1]:>12.4f}"
        if len(times) == 2:
            row += f" {times[1] / times[0]:>8.1f}x"
        print(row)

    if len(backends) == 1:
        print("compiled kernel not built; showing the numpy backend only")
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
