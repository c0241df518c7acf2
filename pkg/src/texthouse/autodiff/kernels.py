"""Kernel backend selection: compiled extension when built, NumPy otherwise.

The two implementations have complementary strengths, measured on this
code base (see benchmarks/conv_backends.py): the compiled loops win on
wide spatial maps with few channels and on tiny problems, while the
im2col + BLAS path wins on channel-heavy layers with small spatial
extent.  When the extension is available, each call is routed by shape;
otherwise everything runs on NumPy.

Set TEXTHOUSE_FORCE_NUMPY=1 to skip the extension (used by the benchmark
and by tests that compare the two backends).
"""

import os

from . import conv_numpy

BACKEND = "numpy"
_compiled = None

if not os.environ.get("TEXTHOUSE_FORCE_NUMPY"):
    try:
        from . import _convkernels as _compiled

        BACKEND = "cython"
    except ImportError:
        _compiled = None


def _use_compiled(x_shape, w_shape, stride):
    if _compiled is None:
        return False
    n, c, h, w = x_shape
    f, _, kh, kw = w_shape
    # tiny problems: im2col set-up cost dominates
    if n * c * h * w * f * kh * kw <= 50_000:
        return True
    # wide rows with a light per-pixel dot product vectorise well
    return stride == 1 and w >= 16 and c * kh * kw <= 800


def conv2d_forward(x, w, stride, padding):
    if _use_compiled(x.shape, w.shape, stride):
        return _compiled.conv2d_forward(x, w, stride, padding)
    return conv_numpy.conv2d_forward(x, w, stride, padding)


def conv2d_backward(x, w, gout, stride, padding):
    if _use_compiled(x.shape, w.shape, stride):
        return _compiled.conv2d_backward(x, w, gout, stride, padding)
    return conv_numpy.conv2d_backward(x, w, gout, stride, padding)
