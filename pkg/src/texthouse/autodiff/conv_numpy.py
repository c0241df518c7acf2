"""Pure-NumPy conv2d kernels (im2col); import-time fallback for the
compiled extension and the reference side of the kernel benchmark."""

import numpy as np
from numpy.lib.stride_tricks import sliding_window_view


def _cols(xp, kh, kw, stride):
    # (N, C, H', W', kh, kw) window view, strided to the output grid
    view = sliding_window_view(xp, (kh, kw), axis=(2, 3))
    return view[:, :, ::stride, ::stride]


def conv2d_forward(x, w, stride, padding):
    f, c, kh, kw = w.shape
    xp = np.pad(x, ((0, 0), (0, 0), (padding, padding), (padding, padding)))
    cols = _cols(xp, kh, kw, stride)
    out = np.tensordot(cols, w, axes=([1, 4, 5], [1, 2, 3]))
    return np.ascontiguousarray(out.transpose(0, 3, 1, 2))


def conv2d_backward(x, w, gout, stride, padding):
    f, c, kh, kw = w.shape
    n = x.shape[0]
    xp = np.pad(x, ((0, 0), (0, 0), (padding, padding), (padding, padding)))
    oh, ow = gout.shape[2], gout.shape[3]

    cols = _cols(xp, kh, kw, stride)
    # gout (N,F,OH,OW) x cols (N,C,OH,OW,kh,kw) -> (F,C,kh,kw)
    gw = np.tensordot(gout, cols, axes=([0, 2, 3], [0, 2, 3]))

    # scatter back through the window view, one kernel offset at a time
    gxp = np.zeros_like(xp)
    tmp = np.tensordot(gout, w, axes=([1], [0]))  # (N, OH, OW, C, kh, kw)
    for a in range(kh):
        for b in range(kw):
            gxp[:, :, a : a + stride * oh : stride, b : b + stride * ow : stride] += tmp[
                :, :, :, :, a, b
            ].transpose(0, 3, 1, 2)
    if padding:
        gx = gxp[:, :, padding:-padding, padding:-padding]
    else:
        gx = gxp
    return np.ascontiguousarray(gx), gw
