"""Compare the numba and numpy kernel backends.

    python3 benchmarks/bench_kernels.py [--repeat 5]

Times the two hot loops (rank-one slice fit, degeneracy search) on fixed
random problems and a full strong-detection run, per backend.  The first
numba call includes compilation and is reported separately.
"""
import argparse
import time

import numpy as np

from boundarystab import kernels
from boundarystab.fixtures import FixtureSpec, generate
from boundarystab.jumping import _family, detect_strong
from boundarystab.tensor import Format


def rank1_args(fmt, seed):
    A = generate(FixtureSpec("random", Format(fmt), seed=seed)).tensor
    B, dims = _family(A, None)
    d0 = B.shape[0]
    rng = np.random.default_rng(seed)
    cg = np.zeros((len(dims), int(dims.max())), dtype=np.complex128)
    for g in range(1, len(dims)):
        cg[g, : dims[g]] = rng.normal(size=dims[g])
    x0 = rng.normal(size=d0 + int(dims.sum())) + 1j * rng.normal(size=d0 + int(dims.sum()))
    return (B / np.abs(B).max(), kernels.index_table(dims), dims, kernels.offsets(d0, dims),
            rng.normal(size=d0) + 0j, cg, np.zeros((0, d0), np.complex128), x0, 100, 1e-12)


def degen_args(fmt, seed):
    A = generate(FixtureSpec("random", Format(fmt), seed=seed)).tensor
    T = A.to_complex()
    dims = np.array(A.dims[1:], dtype=np.int64)
    y = np.random.default_rng(seed).normal(size=int(dims.sum())) + 0j
    return (T.reshape(A.dims[0], -1), kernels.index_table(dims), dims, kernels.offsets(0, dims), y, 100, 1e-12)


def best_of(fn, repeat):
    times = []
    for _ in range(repeat):
        t = time.perf_counter()
        fn()
        times.append(time.perf_counter() - t)
    return min(times)


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--repeat", type=int, default=5)
    args = ap.parse_args()
    cases = [(2, 1, 1), (4, 2, 2), (4, 1, 1, 2), (6, 2, 2, 2)]
    print(f"{'kernel':<14}{'format':<14}" + "".join(f"{b:>12}" for b in kernels.BACKENDS) + "   (seconds)")
    for name in kernels.BACKENDS:
        be = kernels.get_backend(name)
        t = time.perf_counter()
        be.rank1_solve(*rank1_args((2, 1, 1), 0))
        be.degen_solve(*degen_args((2, 1, 1), 0))
        print(f"# {name}: first call {time.perf_counter() - t:.3f}s")
    for fmt in cases:
        r = rank1_args(fmt, 1)
        d = degen_args(fmt, 1)
        row_r = [best_of(lambda: kernels.get_backend(b).rank1_solve(*r), args.repeat) for b in kernels.BACKENDS]
        row_d = [best_of(lambda: kernels.get_backend(b).degen_solve(*d), args.repeat) for b in kernels.BACKENDS]
        print(f"{'rank1_solve':<14}{str(fmt):<14}" + "".join(f"{t:12.5f}" for t in row_r))
        print(f"{'degen_solve':<14}{str(fmt):<14}" + "".join(f"{t:12.5f}" for t in row_d))
    A = generate(FixtureSpec("random", Format((4, 2, 2)), seed=0)).tensor
    row = [best_of(lambda: detect_strong(A, restarts=64, backend=b), 1) for b in kernels.BACKENDS]
    print(f"{'detect_strong':<14}{'(4;2,2) x64':<14}" + "".join(f"{t:12.5f}" for t in row))


if __name__ == "__main__":
    main()
