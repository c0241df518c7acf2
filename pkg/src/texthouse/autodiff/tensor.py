"""Dense float64 tensors with tape-based reverse-mode differentiation.

Every operation computes its forward value eagerly and, when gradients
are being tracked, records a backward rule on the active tape.
``backward(loss)`` replays the tape in reverse and leaves d(loss)/d(leaf)
in each leaf's ``grad`` buffer.
"""

from __future__ import annotations

import contextlib

import numpy as np

from . import kernels


class ShapeMismatch(ValueError):
    def __init__(self, op, *shapes):
        super().__init__(f"{op}: incompatible shapes {' vs '.join(str(s) for s in shapes)}")


class NonScalarLoss(ValueError):
    pass


class Tensor:
    def __init__(self, data, requires_grad=False):
        self.data = np.asarray(data, dtype=np.float64)
        self.requires_grad = requires_grad
        self.grad = None

    @property
    def shape(self):
        return self.data.shape

    def __repr__(self):
        return f"Tensor(shape={self.data.shape}, requires_grad={self.requires_grad})"

    def zero_grad(self):
        self.grad = np.zeros_like(self.data)

    def detach(self):
        return Tensor(self.data.copy())


class Tape:
    """Recorded operations in forward order; backward walks them reversed."""

    def __init__(self):
        self.entries = []  # (out, inputs, backward_fn)

    def record(self, out, inputs, backward_fn):
        self.entries.append((out, inputs, backward_fn))

    def clear(self):
        self.entries.clear()


_tape = Tape()
_recording = True


def get_tape() -> Tape:
    return _tape


@contextlib.contextmanager
def no_grad():
    global _recording
    prev = _recording
    _recording = False
    try:
        yield
    finally:
        _recording = prev


def _track(out, inputs, backward_fn):
    if _recording and any(t.requires_grad for t in inputs):
        out.requires_grad = True
        _tape.record(out, inputs, backward_fn)
    return out


def _accum(t: Tensor, g):
    if t.grad is None:
        t.grad = np.zeros_like(t.data)
    t.grad += g


def backward(loss: Tensor):
    """Accumulate d(loss)/d(x) into every tracked tensor; clears the tape."""
    if loss.data.size != 1:
        raise NonScalarLoss(f"loss has shape {loss.shape}")
    loss.grad = np.ones_like(loss.data)
    for out, inputs, backward_fn in reversed(_tape.entries):
        if out.grad is None:
            continue
        grads = backward_fn(out.grad)
        for t, g in zip(inputs, grads):
            if g is not None and t.requires_grad:
                _accum(t, g)
    _tape.clear()


def _unbroadcast(g, shape):
    """Sum g down to `shape` (inverse of numpy broadcasting)."""
    while g.ndim > len(shape):
        g = g.sum(axis=0)
    for axis, extent in enumerate(shape):
        if extent == 1 and g.shape[axis] != 1:
            g = g.sum(axis=axis, keepdims=True)
    return g


# ---------------------------------------------------------------------------
# elementwise / linear algebra


def add(a: Tensor, b: Tensor) -> Tensor:
    try:
        out = Tensor(a.data + b.data)
    except ValueError:
        raise ShapeMismatch("add", a.shape, b.shape)
    return _track(out, (a, b), lambda g: (_unbroadcast(g, a.shape), _unbroadcast(g, b.shape)))


def sub(a: Tensor, b: Tensor) -> Tensor:
    try:
        out = Tensor(a.data - b.data)
    except ValueError:
        raise ShapeMismatch("sub", a.shape, b.shape)
    return _track(out, (a, b), lambda g: (_unbroadcast(g, a.shape), _unbroadcast(-g, b.shape)))


def mul(a: Tensor, b: Tensor) -> Tensor:
    try:
        out = Tensor(a.data * b.data)
    except ValueError:
        raise ShapeMismatch("mul", a.shape, b.shape)
    return _track(
        out,
        (a, b),
        lambda g: (_unbroadcast(g * b.data, a.shape), _unbroadcast(g * a.data, b.shape)),
    )


def scale(a: Tensor, k: float) -> Tensor:
    out = Tensor(a.data * k)
    return _track(out, (a,), lambda g: (g * k,))


def matmul(a: Tensor, b: Tensor) -> Tensor:
    if a.data.ndim != 2 or b.data.ndim != 2 or a.shape[1] != b.shape[0]:
        raise ShapeMismatch("matmul", a.shape, b.shape)
    out = Tensor(a.data @ b.data)
    return _track(out, (a, b), lambda g: (g @ b.data.T, a.data.T @ g))


def concat(tensors, axis=0) -> Tensor:
    arrays = [t.data for t in tensors]
    try:
        out = Tensor(np.concatenate(arrays, axis=axis))
    except ValueError:
        raise ShapeMismatch("concat", *[t.shape for t in tensors])
    sizes = [a.shape[axis] for a in arrays]
    splits = np.cumsum(sizes)[:-1]

    def bwd(g):
        return tuple(np.split(g, splits, axis=axis))

    return _track(out, tuple(tensors), bwd)


def reshape(a: Tensor, shape) -> Tensor:
    out = Tensor(a.data.reshape(shape))
    return _track(out, (a,), lambda g: (g.reshape(a.shape),))


def mean_all(a: Tensor) -> Tensor:
    out = Tensor(a.data.mean())
    n = a.data.size
    return _track(out, (a,), lambda g: (np.full(a.shape, g / n),))


def sum_all(a: Tensor) -> Tensor:
    out = Tensor(a.data.sum())
    return _track(out, (a,), lambda g: (np.full(a.shape, g),))


# ---------------------------------------------------------------------------
# nonlinearities


def relu(a: Tensor) -> Tensor:
    out = Tensor(np.maximum(a.data, 0.0))
    mask = a.data > 0
    return _track(out, (a,), lambda g: (g * mask,))


def leaky_relu(a: Tensor, slope=0.2) -> Tensor:
    out = Tensor(np.where(a.data > 0, a.data, slope * a.data))
    mask = np.where(a.data > 0, 1.0, slope)
    return _track(out, (a,), lambda g: (g * mask,))


def tanh(a: Tensor) -> Tensor:
    y = np.tanh(a.data)
    out = Tensor(y)
    return _track(out, (a,), lambda g: (g * (1.0 - y * y),))


def sigmoid(a: Tensor) -> Tensor:
    y = 1.0 / (1.0 + np.exp(-a.data))
    out = Tensor(y)
    return _track(out, (a,), lambda g: (g * y * (1.0 - y),))


def softmax(a: Tensor, axis=-1) -> Tensor:
    shifted = a.data - a.data.max(axis=axis, keepdims=True)
    e = np.exp(shifted)
    y = e / e.sum(axis=axis, keepdims=True)
    out = Tensor(y)

    def bwd(g):
        dot = (g * y).sum(axis=axis, keepdims=True)
        return ((g - dot) * y,)

    return _track(out, (a,), bwd)


# ---------------------------------------------------------------------------
# spatial ops (N, C, H, W)


def spatial_mean(a: Tensor) -> Tensor:
    """Average an (N, C, H, W) tensor over its spatial axes, giving (N, C)."""
    if a.data.ndim != 4:
        raise ShapeMismatch("spatial_mean", a.shape)
    n, c, h, w = a.shape
    out = Tensor(a.data.mean(axis=(2, 3)))

    def bwd(g):
        return (np.broadcast_to(g.reshape(n, c, 1, 1), (n, c, h, w)) / (h * w),)

    return _track(out, (a,), bwd)


def upsample2x_nearest(a: Tensor) -> Tensor:
    if a.data.ndim != 4:
        raise ShapeMismatch("upsample2x_nearest", a.shape)
    out = Tensor(a.data.repeat(2, axis=2).repeat(2, axis=3))

    def bwd(g):
        n, c, h2, w2 = g.shape
        return (g.reshape(n, c, h2 // 2, 2, w2 // 2, 2).sum(axis=(3, 5)),)

    return _track(out, (a,), bwd)


def conv2d(x: Tensor, w: Tensor, b: Tensor | None = None, stride=1, padding=0) -> Tensor:
    """2D convolution, layout (N, C, H, W) with weight (F, C, kh, kw)."""
    if x.data.ndim != 4 or w.data.ndim != 4 or x.shape[1] != w.shape[1]:
        raise ShapeMismatch("conv2d", x.shape, w.shape)
    y = kernels.conv2d_forward(x.data, w.data, stride, padding)
    if b is not None:
        y = y + b.data.reshape(1, -1, 1, 1)
    out = Tensor(y)

    def bwd(g):
        gx, gw = kernels.conv2d_backward(x.data, w.data, np.ascontiguousarray(g), stride, padding)
        gb = g.sum(axis=(0, 2, 3)) if b is not None else None
        return (gx, gw, gb)

    inputs = (x, w, b) if b is not None else (x, w)
    if b is None:
        return _track(out, inputs, lambda g: bwd(g)[:2])
    return _track(out, inputs, bwd)


def batchnorm2d(x: Tensor, gamma: Tensor, beta: Tensor, running_mean, running_var,
                training=True, momentum=0.1, eps=1e-5) -> Tensor:
    """Per-channel batch normalisation over (N, H, W).

    running_mean/running_var are plain arrays mutated in place during
    training; inference mode normalises with them instead.
    """
    if x.data.ndim != 4:
        raise ShapeMismatch("batchnorm2d", x.shape)
    c = x.shape[1]
    gview = gamma.data.reshape(1, c, 1, 1)

    if training:
        m = x.data.shape[0] * x.data.shape[2] * x.data.shape[3]
        mean = x.data.mean(axis=(0, 2, 3))
        var = x.data.var(axis=(0, 2, 3))
        running_mean += momentum * (mean - running_mean)
        running_var += momentum * (var - running_var)
        invstd = 1.0 / np.sqrt(var + eps)
        xhat = (x.data - mean.reshape(1, c, 1, 1)) * invstd.reshape(1, c, 1, 1)
        out = Tensor(gview * xhat + beta.data.reshape(1, c, 1, 1))

        def bwd(g):
            dgamma = (g * xhat).sum(axis=(0, 2, 3))
            dbeta = g.sum(axis=(0, 2, 3))
            dxhat = g * gview
            s1 = dxhat.sum(axis=(0, 2, 3), keepdims=True)
            s2 = (dxhat * xhat).sum(axis=(0, 2, 3), keepdims=True)
            dx = (dxhat - s1 / m - xhat * s2 / m) * invstd.reshape(1, c, 1, 1)
            return (dx, dgamma, dbeta)

        return _track(out, (x, gamma, beta), bwd)

    invstd = 1.0 / np.sqrt(running_var + eps)
    xhat = (x.data - running_mean.reshape(1, c, 1, 1)) * invstd.reshape(1, c, 1, 1)
    out = Tensor(gview * xhat + beta.data.reshape(1, c, 1, 1))

    def bwd_eval(g):
        dgamma = (g * xhat).sum(axis=(0, 2, 3))
        dbeta = g.sum(axis=(0, 2, 3))
        dx = g * gview * invstd.reshape(1, c, 1, 1)
        return (dx, dgamma, dbeta)

    return _track(out, (x, gamma, beta), bwd_eval)


# ---------------------------------------------------------------------------
# losses

_EPS = 1e-7


def bce_loss(pred: Tensor, target) -> Tensor:
    """Mean binary cross-entropy; probabilities clipped away from {0, 1}."""
    t = target.data if isinstance(target, Tensor) else np.asarray(target, dtype=np.float64)
    if pred.shape != t.shape:
        raise ShapeMismatch("bce_loss", pred.shape, t.shape)
    p = np.clip(pred.data, _EPS, 1.0 - _EPS)
    out = Tensor(-(t * np.log(p) + (1.0 - t) * np.log(1.0 - p)).mean())
    n = p.size
    inside = (pred.data > _EPS) & (pred.data < 1.0 - _EPS)

    def bwd(g):
        return (g * inside * (p - t) / (p * (1.0 - p)) / n,)

    return _track(out, (pred,), bwd)


def softmax_cross_entropy(logits: Tensor, labels) -> Tensor:
    """Mean cross-entropy between row-wise softmax(logits) and integer labels."""
    labels = np.asarray(labels, dtype=np.int64)
    if logits.data.ndim != 2 or labels.shape[0] != logits.shape[0]:
        raise ShapeMismatch("softmax_cross_entropy", logits.shape, labels.shape)
    shifted = logits.data - logits.data.max(axis=1, keepdims=True)
    logz = np.log(np.exp(shifted).sum(axis=1))
    n = logits.shape[0]
    nll = logz - shifted[np.arange(n), labels]
    out = Tensor(nll.mean())
    probs = np.exp(shifted) / np.exp(shifted).sum(axis=1, keepdims=True)

    def bwd(g):
        d = probs.copy()
        d[np.arange(n), labels] -= 1.0
        return (g * d / n,)

    return _track(out, (logits,), bwd)


def mse_loss(pred: Tensor, target) -> Tensor:
    t = target.data if isinstance(target, Tensor) else np.asarray(target, dtype=np.float64)
    if pred.shape != t.shape:
        raise ShapeMismatch("mse_loss", pred.shape, t.shape)
    diff = pred.data - t
    out = Tensor((diff * diff).mean())
    n = diff.size
    return _track(out, (pred,), lambda g: (g * 2.0 * diff / n,))


def dense(x: Tensor, w: Tensor, b: Tensor) -> Tensor:
    """x @ w + b with b broadcast over rows."""
    return add(matmul(x, w), b)
