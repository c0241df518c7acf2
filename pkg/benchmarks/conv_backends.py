"""Compare the compiled and NumPy convolution kernels shape by shape.

Run from the repository root after an editable install:

    python3 benchmarks/conv_backends.py

The shapes below are the layers the texture networks actually execute at
the desk scale (32x32 images, base width 16, batch 24), plus two small
probes.  The routing heuristic in texthouse.autodiff.kernels was frozen
from the numbers this script prints; re-run it after touching either
kernel implementation.
"""

import time

import numpy as np

from texthouse.autodiff import conv_numpy, kernels

# (label, x_shape, w_shape, stride, padding)
SHAPES = [
    ("gen up1", (24, 131, 2, 2), (128, 131, 5, 5), 1, 2),
    ("gen up2", (24, 128, 4, 4), (64, 128, 5, 5), 1, 2),
    ("gen up3", (24, 64, 8, 8), (32, 64, 5, 5), 1, 2),
    ("gen up4", (24, 32, 16, 16), (16, 32, 5, 5), 1, 2),
    ("gen rgb", (24, 16, 32, 32), (3, 16, 5, 5), 1, 2),
    ("disc 1", (24, 3, 32, 32), (16, 3, 5, 5), 2, 2),
    ("disc 2", (24, 16, 16, 16), (32, 16, 5, 5), 2, 2),
    ("disc 3", (24, 32, 8, 8), (64, 32, 5, 5), 2, 2),
    ("disc 4", (24, 64, 4, 4), (128, 64, 5, 5), 2, 2),
    ("disc 5", (24, 128, 2, 2), (128, 128, 5, 5), 2, 2),
    ("tiny", (2, 3, 8, 8), (4, 3, 3, 3), 1, 1),
    ("wide row", (4, 3, 64, 64), (8, 3, 5, 5), 1, 2),
]


def time_call(fn, *args, repeats=5):
    best = float("inf")
    for _ in range(repeats):
        t0 = time.perf_counter()
        fn(*args)
        best = min(best, time.perf_counter() - t0)
    return best


def main():
    if kernels.BACKEND != "cython":
        raise SystemExit(
            "compiled extension not available; build it first "
            "(pip install -e . --no-build-isolation)"
        )
    compiled = kernels._compiled
    rng = np.random.default_rng(0)

    header = f"{'layer':<10} {'shape':<24} {'numpy ms':>9} {'cython ms':>10} {'routed':>8}"
    print(header)
    print("-" * len(header))
    for label, xs, ws, stride, padding in SHAPES:
        x = rng.normal(size=xs)
        w = rng.normal(size=ws)
        y = conv_numpy.conv2d_forward(x, w, stride, padding)
        g = rng.normal(size=y.shape)

        t_np = time_call(conv_numpy.conv2d_forward, x, w, stride, padding)
        t_np += time_call(conv_numpy.conv2d_backward, x, w, g, stride, padding)
        t_cy = time_call(compiled.conv2d_forward, x, w, stride, padding)
        t_cy += time_call(compiled.conv2d_backward, x, w, g, stride, padding)

        yc = compiled.conv2d_forward(x, w, stride, padding)
        assert np.allclose(y, yc, atol=1e-10), f"backend mismatch on {label}"

        routed = "cython" if kernels._use_compiled(xs, ws, stride) else "numpy"
        chosen = t_cy if routed == "cython" else t_np
        best = min(t_np, t_cy)
        flag = "" if chosen <= best * 1.5 else "  <- routing loses here"
        print(
            f"{label:<10} {str(xs):<24} {t_np * 1e3:>9.3f} {t_cy * 1e3:>10.3f} "
            f"{routed:>8}{flag}"
        )


if __name__ == "__main__":
    main()
