# cython: boundscheck=False, wraparound=False, cdivision=True
"""Compiled conv2d forward/backward kernels (the training hot loop).

The input is copied into a zero-padded buffer once so the inner loops are
branch-free; all indexing is flat pointer arithmetic with the row offsets
hoisted out of the innermost loop, which runs contiguously along the
output row and auto-vectorises for stride 1.
"""

import numpy as np
cimport numpy as cnp

cnp.import_array()


def conv2d_forward(cnp.ndarray[double, ndim=4] x,
                   cnp.ndarray[double, ndim=4] w,
                   int stride, int padding):
    cdef int n = x.shape[0], c = x.shape[1], h = x.shape[2], ww = x.shape[3]
    cdef int f = w.shape[0], kh = w.shape[2], kw = w.shape[3]
    cdef int oh = (h + 2 * padding - kh) // stride + 1
    cdef int ow = (ww + 2 * padding - kw) // stride + 1
    cdef int ph = h + 2 * padding, pw = ww + 2 * padding
    cdef cnp.ndarray[double, ndim=4] xp_arr = np.zeros((n, c, ph, pw))
    xp_arr[:, :, padding:padding + h, padding:padding + ww] = x
    cdef cnp.ndarray[double, ndim=4] out = np.zeros((n, f, oh, ow))
    cdef double* xp = <double*> cnp.PyArray_DATA(xp_arr)
    cdef double* wd = <double*> cnp.PyArray_DATA(w)
    cdef double* od = <double*> cnp.PyArray_DATA(out)
    cdef Py_ssize_t ni, fi, ci, i, j, a, b
    cdef Py_ssize_t xbase, obase, wbase
    cdef double wk
    cdef double* xrow
    cdef double* orow
    for ni in range(n):
        for fi in range(f):
            for ci in range(c):
                wbase = ((fi * c) + ci) * kh * kw
                for a in range(kh):
                    for b in range(kw):
                        wk = wd[wbase + a * kw + b]
                        if wk == 0.0:
                            continue
                        for i in range(oh):
                            xrow = xp + (((ni * c) + ci) * ph + i * stride + a) * pw + b
                            orow = od + (((ni * f) + fi) * oh + i) * ow
                            if stride == 1:
                                for j in range(ow):
                                    orow[j] += wk * xrow[j]
                            else:
                                for j in range(ow):
                                    orow[j] += wk * xrow[j * stride]
    return out


def conv2d_backward(cnp.ndarray[double, ndim=4] x,
                    cnp.ndarray[double, ndim=4] w,
                    cnp.ndarray[double, ndim=4] gout,
                    int stride, int padding):
    cdef int n = x.shape[0], c = x.shape[1], h = x.shape[2], ww = x.shape[3]
    cdef int f = w.shape[0], kh = w.shape[2], kw = w.shape[3]
    cdef int oh = gout.shape[2], ow = gout.shape[3]
    cdef int ph = h + 2 * padding, pw = ww + 2 * padding
    cdef cnp.ndarray[double, ndim=4] xp_arr = np.zeros((n, c, ph, pw))
    xp_arr[:, :, padding:padding + h, padding:padding + ww] = x
    cdef cnp.ndarray[double, ndim=4] gxp_arr = np.zeros_like(xp_arr)
    cdef cnp.ndarray[double, ndim=4] gw = np.zeros((f, c, kh, kw))
    cdef double* xp = <double*> cnp.PyArray_DATA(xp_arr)
    cdef double* wd = <double*> cnp.PyArray_DATA(w)
    cdef double* gd = <double*> cnp.PyArray_DATA(gout)
    cdef double* gxp = <double*> cnp.PyArray_DATA(gxp_arr)
    cdef double* gwd = <double*> cnp.PyArray_DATA(gw)
    cdef Py_ssize_t ni, fi, ci, i, j, a, b
    cdef Py_ssize_t wbase
    cdef double wk, acc
    cdef double* xrow
    cdef double* grow
    cdef double* gxrow
    for ni in range(n):
        for fi in range(f):
            for ci in range(c):
                wbase = ((fi * c) + ci) * kh * kw
                for a in range(kh):
                    for b in range(kw):
                        wk = wd[wbase + a * kw + b]
                        acc = 0.0
                        for i in range(oh):
                            xrow = xp + (((ni * c) + ci) * ph + i * stride + a) * pw + b
                            gxrow = gxp + (((ni * c) + ci) * ph + i * stride + a) * pw + b
                            grow = gd + (((ni * f) + fi) * oh + i) * ow
                            if stride == 1:
                                for j in range(ow):
                                    acc += grow[j] * xrow[j]
                                    gxrow[j] += grow[j] * wk
                            else:
                                for j in range(ow):
                                    acc += grow[j] * xrow[j * stride]
                                    gxrow[j * stride] += grow[j] * wk
                        gwd[wbase + a * kw + b] += acc
    cdef cnp.ndarray gx
    if padding > 0:
        gx = gxp_arr[:, :, padding:padding + h, padding:padding + ww].copy()
    else:
        gx = gxp_arr
    return gx, gw
