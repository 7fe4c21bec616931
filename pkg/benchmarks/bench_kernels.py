"""Compare the compiled kernels against the pure-Python fallback.

The sign/permutation kernels sit in the innermost loop of every residual
and axiom check; this script times both backends on the raw kernels and on
one end-to-end residual evaluation.

Run:  python benchmarks/bench_kernels.py
"""
import itertools
import random
import time
from fractions import Fraction


def bench_raw(mod, label, rounds=200_000):
    rng = random.Random(1)
    perms, degs, words = [], [], []
    for _ in range(200):
        n = rng.randint(2, 8)
        p = list(range(n))
        rng.shuffle(p)
        perms.append(tuple(p))
        degs.append(tuple(rng.randint(-1, 2) for _ in range(n)))
        words.append(tuple(rng.randint(0, 3) for _ in range(n)))
    t0 = time.perf_counter()
    acc = 0
    for i in range(rounds):
        k = i % 200
        acc += mod.koszul_sign(perms[k], degs[k])
        mod.apply_perm_to_word(perms[k], words[k])
    dt = time.perf_counter() - t0
    print(f"  {label:10s} koszul+apply: {rounds / dt / 1e6:6.2f} M ops/s "
          f"({dt:.2f}s)")
    return dt


def bench_precompose(mod, label, rounds=3000):
    rng = random.Random(2)
    degrees = (0, 1, -1, 2)
    entries = {
        w: Fraction(rng.randint(1, 5), rng.randint(1, 3))
        for w in itertools.product(range(4), repeat=5)
    }
    perms = []
    for _ in range(50):
        p = list(range(5))
        rng.shuffle(p)
        perms.append(tuple(p))
    t0 = time.perf_counter()
    for i in range(rounds):
        mod.precompose_entries(entries, perms[i % 50], degrees)
    dt = time.perf_counter() - t0
    rate = rounds * len(entries) / dt / 1e6
    print(f"  {label:10s} tensor transport: {rate:6.2f} M entries/s ({dt:.2f}s)")
    return dt


def bench_residual(label):
    import operad_forge._kernels as K
    import operad_forge.ftalgebra as FT
    from operad_forge.graded import rich_space

    rng = random.Random(3)
    V = rich_space(4, with_differential=True)
    data = FT.random_algebra("quantum_ainfty", V, 3, 4, rng)
    t0 = time.perf_counter()
    for key in FT.enumerate_keys("quantum_ainfty", 3, 4):
        FT.ft_residual(data, key)
        FT.quantum_residual(data, key.bseq, key.g)
    dt = time.perf_counter() - t0
    print(f"  {label:10s} residual sweep (backend={K.BACKEND}): {dt:.2f}s")
    return dt


def main():
    import operad_forge._kernels as K
    from operad_forge._kernels import _fallback

    print(f"active backend: {K.BACKEND}")
    print("raw kernels:")
    t_active = bench_raw(K, K.BACKEND)
    t_pure = bench_raw(_fallback, "python")
    print("tensor transport:")
    p_active = bench_precompose(K, K.BACKEND)
    p_pure = bench_precompose(_fallback, "python")
    if K.BACKEND == "compiled":
        print(f"speedup: {t_pure / t_active:.1f}x raw, "
              f"{p_pure / p_active:.1f}x transport")
    print("end to end (set OPERAD_FORGE_PURE=1 to time the fallback):")
    bench_residual("active")


if __name__ == "__main__":
    main()
