#!/usr/bin/env python3
"""Benchmark the compiled kernels against the pure-Python fallback.

Workloads mirror production shapes: caption-sized word-id lists for the
two dynamic programs, and a large hash stream for the sketch update.

    python benchmarks/bench_kernels.py [--quick]
"""

import argparse
import random
import time

from capsforge._kernels import _pure

try:
    from capsforge._kernels import _speedups
except ImportError:
    _speedups = None


def _caption_pairs(n_pairs, rng):
    pairs = []
    for _ in range(n_pairs):
        vocab = rng.randrange(40, 200)
        a = [rng.randrange(vocab) for _ in range(rng.randrange(8, 40))]
        b = [rng.randrange(vocab) for _ in range(rng.randrange(20, 130))]
        pairs.append((a, b))
    return pairs


def _time(fn, *args):
    started = time.perf_counter()
    fn(*args)
    return time.perf_counter() - started


def bench_dp(impl, pairs, kernel):
    fn = getattr(impl, kernel)

    def run():
        for a, b in pairs:
            fn(a, b)

    return _time(run)


def bench_hll(impl, hashes, p):
    registers = bytearray(1 << p)
    return _time(impl.hll_update, registers, hashes, p)


def main():
    parser = argparse.ArgumentParser()
    parser.add_argument("--quick", action="store_true", help="smaller workloads")
    args = parser.parse_args()

    rng = random.Random(1234)
    n_pairs = 2_000 if args.quick else 10_000
    n_hashes = 200_000 if args.quick else 1_000_000
    pairs = _caption_pairs(n_pairs, rng)
    hashes = [rng.getrandbits(64) for _ in range(n_hashes)]

    backends = [("pure", _pure)]
    if _speedups is not None:
        backends.append(("compiled", _speedups))
    else:
        print("NOTE: compiled extension not built; benchmarking pure only\n")

    workloads = [
        ("lcs_substring_len", lambda impl: bench_dp(impl, pairs, "lcs_substring_len"),
         f"{n_pairs} caption pairs"),
        ("edit_distance", lambda impl: bench_dp(impl, pairs, "edit_distance"),
         f"{n_pairs} caption pairs"),
        ("hll_update (p=14)", lambda impl: bench_hll(impl, hashes, 14),
         f"{n_hashes} hashes"),
    ]

    print(f"{'kernel':<22} {'workload':<22} " + "".join(f"{name:>12}" for name, _ in backends)
          + ("     speedup" if _speedups is not None else ""))
    print("-" * (46 + 12 * len(backends) + (12 if _speedups is not None else 0)))
    for name, runner, workload in workloads:
        times = {bname: runner(impl) for bname, impl in backends}
        row = f"{name:<22} {workload:<22} "
        row += "".join(f"{times[bname]:>11.3f}s" for bname, _ in backends)
        if _speedups is not None:
            row += f"{times['pure'] / times['compiled']:>11.1f}x"
        print(row)


if __name__ == "__main__":
    main()
