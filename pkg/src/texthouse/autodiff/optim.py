"""Adam optimizer and parameter initialisation."""

from __future__ import annotations

import numpy as np

from .tensor import Tensor


class MissingGrad(RuntimeError):
    def __init__(self, index):
        super().__init__(f"parameter {index} has no gradient; run backward() first")


class AdamState:
    def __init__(self, params, lr=0.0002, beta1=0.5, beta2=0.999, eps=1e-8):
        self.params = list(params)
        self.lr = lr
        self.beta1 = beta1
        self.beta2 = beta2
        self.eps = eps
        self.step_count = 0
        self.m = [np.zeros_like(p.data) for p in self.params]
        self.v = [np.zeros_like(p.data) for p in self.params]


def adam_step(state: AdamState) -> None:
    """One bias-corrected Adam update; zeroes grads afterwards."""
    for i, p in enumerate(state.params):
        if p.grad is None:
            raise MissingGrad(i)
    state.step_count += 1
    t = state.step_count
    b1, b2 = state.beta1, state.beta2
    for i, p in enumerate(state.params):
        g = p.grad
        state.m[i] = b1 * state.m[i] + (1.0 - b1) * g
        state.v[i] = b2 * state.v[i] + (1.0 - b2) * g * g
        mhat = state.m[i] / (1.0 - b1**t)
        vhat = state.v[i] / (1.0 - b2**t)
        p.data -= state.lr * mhat / (np.sqrt(vhat) + state.eps)
        p.grad = np.zeros_like(p.data)


def init_normal(shape, mean=0.0, stddev=0.02, seed=0) -> Tensor:
    """Gaussian-initialised parameter tensor, deterministic per seed."""
    if stddev <= 0:
        raise ValueError("stddev must be positive")
    rng = np.random.default_rng(seed)
    return Tensor(rng.normal(mean, stddev, size=shape), requires_grad=True)


def init_zeros(shape) -> Tensor:
    return Tensor(np.zeros(shape), requires_grad=True)
