"""Time the exact residual kernels on their three evaluation paths.

* ``int64``   integer-scaled tensors downcast to machine integers (default)
* ``pyint``   integer-scaled tensors kept as Python ints (``FAST_KERNELS`` off)
* ``fraction`` the public residual functions applied to the Fraction tensor

Usage: python benchmarks/bench_kernels.py [--dims 3 4 5 6] [--repeat 5]
"""

import argparse
import time

import numpy as np

import weylcurv.tensor_core as tc
from weylcurv.curvature import (
    random_in_class,
    residual_antisym12,
    residual_bianchi,
    residual_interchange,
    residual_pair_antisym34,
    residual_weyl,
    sigma,
    symmetry_report,
)
from weylcurv.tensor_core import InnerProduct, max_abs


def fraction_path(A, h):
    return [max_abs(f(A)) for f in (residual_antisym12, residual_bianchi,
                                    residual_pair_antisym34, residual_interchange)] + [
        max_abs(residual_weyl(A, h))]


def sigma_fraction_path(psi, h):
    g = h.matrix
    return (2 * np.einsum("ij,kl->ijkl", psi, g) + np.einsum("ik,jl->ijkl", psi, g)
            - np.einsum("jk,il->ijkl", psi, g) - np.einsum("il,jk->ijkl", psi, g)
            + np.einsum("jl,ik->ijkl", psi, g))


def timed(fn, repeat):
    best = float("inf")
    for _ in range(repeat):
        start = time.perf_counter()
        fn()
        best = min(best, time.perf_counter() - start)
    return best


def main(argv=None):
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--dims", type=int, nargs="+", default=[3, 4, 5, 6])
    parser.add_argument("--repeat", type=int, default=5)
    args = parser.parse_args(argv)

    print(f"{'n':>3} {'kernel':>10} {'int64 ms':>10} {'pyint ms':>10} {'fraction ms':>12} {'speedup':>8}")
    for n in args.dims:
        h = InnerProduct.from_signature(n - 1, 1)
        A = random_in_class("W", n, h, seed=n)
        psi = random_in_class("two_form", n, h, seed=n)
        # divide by 3 so the tensors carry real denominators
        A3, psi3 = tc.scale(A, 1, 3), tc.scale(psi, 1, 3)
        kernels = {
            "residuals": (lambda: symmetry_report(A3, h), lambda: fraction_path(A3, h)),
            "sigma": (lambda: sigma(psi3, h), lambda: sigma_fraction_path(psi3, h)),
        }
        for name, (fast, slow) in kernels.items():
            tc.FAST_KERNELS = True
            t_int = timed(fast, args.repeat)
            tc.FAST_KERNELS = False
            t_py = timed(fast, args.repeat)
            tc.FAST_KERNELS = True
            t_frac = timed(slow, args.repeat)
            print(f"{n:>3} {name:>10} {1e3 * t_int:>10.2f} {1e3 * t_py:>10.2f} {1e3 * t_frac:>12.2f} "
                  f"{t_frac / t_int:>7.1f}x")


if __name__ == "__main__":
    main()
