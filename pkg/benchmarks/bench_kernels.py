"""Compare the compiled and numpy kernel backends.

    python3 benchmarks/bench_kernels.py [--n 1000] [--iters 5000] [--repeat 5]
"""
import argparse
import math
import time

import numpy as np

from pgev import dist, specfun
from pgev._backend import available_backends, get_backend
from pgev.dist import ModelParams


def best_of(fn, repeat):
    times = []
    for _ in range(repeat):
        t0 = time.perf_counter()
        out = fn()
        times.append(time.perf_counter() - t0)
    return min(times), out


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--n", type=int, default=1000)
    ap.add_argument("--iters", type=int, default=5000)
    ap.add_argument("--repeat", type=int, default=5)
    args = ap.parse_args()

    truth = ModelParams.pgev(4.3614, 0.2853, -0.2386, 1)
    w = np.log(dist.sample(truth, args.n, specfun.rng_new(1)).values)
    gen = specfun.rng_new(2)
    normals = gen.standard_normal((args.iters, 3))
    uniforms = specfun.rng_uniform(gen, (args.iters, 3))
    init = [truth.mu, math.log(truth.sigma), truth.xi]

    backends = available_backends()
    results = {}
    print(f"n={args.n} iters={args.iters} backends={backends}")
    for name in backends:
        k = get_backend(name)
        t_ll, ll = best_of(lambda: [k.pgev_loglik(w, 1, truth.mu, truth.sigma, truth.xi)
                                    for _ in range(1000)][-1], args.repeat)
        t_ch, (draws, acc) = best_of(lambda: k.mwg_chain(w, k.FAMILY_PGEV, 1, init,
                                                         [1e4] * 3, [0.02, 0.05, 0.05],
                                                         normals, uniforms), args.repeat)
        results[name] = (ll, np.asarray(draws))
        print(f"{name:>7}: 1000 log-likelihoods {t_ll * 1e3:9.2f} ms   "
              f"chain {t_ch * 1e3:9.2f} ms")
        results[name + "_t"] = (t_ll, t_ch)
    if "cython" in backends:
        a, b = results["cython"], results["python"]
        print(f"loglik difference {abs(a[0] - b[0]):.3e}; "
              f"max draw difference {np.max(np.abs(a[1] - b[1])):.3e}")
        (c1, c2), (p1, p2) = results["cython_t"], results["python_t"]
        print(f"speedup: log-likelihood {p1 / c1:.1f}x, chain {p2 / c2:.1f}x")


if __name__ == "__main__":
    main()
