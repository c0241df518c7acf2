import numpy as np
import pytest

from texthouse import autodiff as ad

RNG = np.random.default_rng(1234)


def numeric_grad(f, tensors, h=1e-3):
    """Central finite differences of scalar f() w.r.t. each tensor's data."""
    grads = []
    for t in tensors:
        g = np.zeros_like(t.data)
        flat = t.data.reshape(-1)
        gflat = g.reshape(-1)
        for i in range(flat.size):
            orig = flat[i]
            flat[i] = orig + h
            with ad.no_grad():
                fp = f().data.item()
            flat[i] = orig - h
            with ad.no_grad():
                fm = f().data.item()
            flat[i] = orig
            gflat[i] = (fp - fm) / (2 * h)
        grads.append(g)
    return grads


def check_grads(f, tensors, tol=1e-4):
    for t in tensors:
        t.requires_grad = True
        t.grad = None
    loss = f()
    ad.backward(loss)
    numeric = numeric_grad(f, tensors)
    for t, ng in zip(tensors, numeric):
        denom = max(np.abs(ng).max(), np.abs(t.grad).max(), 1e-8)
        rel = np.abs(t.grad - ng).max() / denom
        assert rel < tol, f"gradient mismatch: rel err {rel}"


def rand_tensor(*shape, scale=1.0):
    return ad.Tensor(RNG.normal(0, scale, size=shape))


def test_matmul_grad():
    a, b = rand_tensor(3, 4), rand_tensor(4, 2)
    check_grads(lambda: ad.sum_all(ad.matmul(a, b)), [a, b])


def test_add_mul_broadcast_grad():
    a, b = rand_tensor(3, 4), rand_tensor(1, 4)
    check_grads(lambda: ad.sum_all(ad.mul(ad.add(a, b), a)), [a, b])


def test_relu_leaky_tanh_sigmoid_grads():
    x = rand_tensor(4, 5)
    x.data += 0.05  # keep away from the relu kink
    check_grads(lambda: ad.sum_all(ad.relu(x)), [x])
    check_grads(lambda: ad.sum_all(ad.leaky_relu(x)), [x])
    check_grads(lambda: ad.mean_all(ad.tanh(x)), [x])
    check_grads(lambda: ad.mean_all(ad.sigmoid(x)), [x])


def test_softmax_rows_sum_to_one():
    x = rand_tensor(6, 9)
    y = ad.softmax(x, axis=1)
    assert np.allclose(y.data.sum(axis=1), 1.0, atol=1e-9)
    assert np.all(y.data > 0)


def test_softmax_of_zeros_uniform():
    y = ad.softmax(ad.Tensor(np.zeros((1, 8))), axis=1)
    assert np.allclose(y.data, 1 / 8)


def test_softmax_grad():
    x = rand_tensor(3, 5)
    w = rand_tensor(3, 5)
    check_grads(lambda: ad.sum_all(ad.mul(ad.softmax(x, axis=1), w)), [x])


def test_concat_grad():
    a, b = rand_tensor(2, 3), rand_tensor(2, 5)
    w = rand_tensor(2, 8)
    check_grads(lambda: ad.sum_all(ad.mul(ad.concat([a, b], axis=1), w)), [a, b])


def test_conv2d_shape_same_padding():
    x = rand_tensor(1, 8, 10, 10)
    w = rand_tensor(4, 8, 5, 5, scale=0.1)
    y = ad.conv2d(x, w, stride=1, padding=2)
    assert y.shape == (1, 4, 10, 10)


def test_conv2d_grad():
    x = rand_tensor(2, 3, 6, 6)
    w = rand_tensor(4, 3, 3, 3, scale=0.3)
    b = rand_tensor(4)
    check_grads(lambda: ad.mean_all(ad.conv2d(x, w, b, stride=1, padding=1)), [x, w, b], tol=1e-4)


def test_conv2d_strided_grad():
    x = rand_tensor(1, 2, 7, 7)
    w = rand_tensor(3, 2, 3, 3, scale=0.3)
    mask = rand_tensor(1, 3, 4, 4)
    check_grads(
        lambda: ad.sum_all(ad.mul(ad.conv2d(x, w, stride=2, padding=1), mask)), [x, w]
    )


def test_conv2d_matches_direct_loops():
    x = RNG.normal(size=(2, 3, 5, 6))
    w = RNG.normal(size=(4, 3, 3, 3))
    stride, padding = 2, 1
    y = ad.conv2d(ad.Tensor(x), ad.Tensor(w), stride=stride, padding=padding).data
    # 6-loop reference
    xp = np.pad(x, ((0, 0), (0, 0), (padding, padding), (padding, padding)))
    oh = (x.shape[2] + 2 * padding - 3) // stride + 1
    ow = (x.shape[3] + 2 * padding - 3) // stride + 1
    ref = np.zeros((2, 4, oh, ow))
    for n in range(2):
        for f in range(4):
            for i in range(oh):
                for j in range(ow):
                    acc = 0.0
                    for c in range(3):
                        for a in range(3):
                            for bb in range(3):
                                acc += w[f, c, a, bb] * xp[n, c, i * stride + a, j * stride + bb]
                    ref[n, f, i, j] = acc
    assert np.abs(y - ref).max() < 1e-10


def test_kernel_backends_agree():
    from texthouse.autodiff import conv_numpy, kernels

    x = RNG.normal(size=(2, 3, 8, 8))
    w = RNG.normal(size=(5, 3, 5, 5))
    g = RNG.normal(size=(2, 5, 4, 4))
    y1 = kernels.conv2d_forward(x, w, 2, 2)
    y2 = conv_numpy.conv2d_forward(x, w, 2, 2)
    assert np.abs(y1 - y2).max() < 1e-10
    gx1, gw1 = kernels.conv2d_backward(x, w, g, 2, 2)
    gx2, gw2 = conv_numpy.conv2d_backward(x, w, g, 2, 2)
    assert np.abs(gx1 - gx2).max() < 1e-10
    assert np.abs(gw1 - gw2).max() < 1e-10


def test_upsample_shape_and_grad():
    x = rand_tensor(1, 3, 5, 5)
    y = ad.upsample2x_nearest(x)
    assert y.shape == (1, 3, 10, 10)
    mask = rand_tensor(1, 3, 10, 10)
    check_grads(lambda: ad.sum_all(ad.mul(ad.upsample2x_nearest(x), mask)), [x])


def test_batchnorm_normalises():
    x = rand_tensor(8, 4, 6, 6, scale=3.0)
    gamma = ad.Tensor(np.ones(4))
    beta = ad.Tensor(np.zeros(4))
    rm, rv = np.zeros(4), np.ones(4)
    y = ad.batchnorm2d(x, gamma, beta, rm, rv, training=True)
    mean = y.data.mean(axis=(0, 2, 3))
    var = y.data.var(axis=(0, 2, 3))
    assert np.abs(mean).max() < 1e-6
    assert np.abs(var - 1.0).max() < 1e-4


def test_batchnorm_grad():
    x = rand_tensor(4, 2, 3, 3)
    gamma = rand_tensor(2)
    gamma.data += 1.0
    beta = rand_tensor(2)
    mask = rand_tensor(4, 2, 3, 3)

    def f():
        rm, rv = np.zeros(2), np.ones(2)
        return ad.sum_all(ad.mul(ad.batchnorm2d(x, gamma, beta, rm, rv, training=True), mask))

    check_grads(f, [x, gamma, beta], tol=2e-4)


def test_losses_values():
    # perfect predictions give zero loss
    p = ad.Tensor(np.array([[1.0, 0.0]]))
    assert ad.bce_loss(p, np.array([[1.0, 0.0]])).data.item() < 1e-5
    assert ad.mse_loss(ad.Tensor(np.ones(4)), np.ones(4)).data.item() == 0.0
    # uniform 0.5 scores: mean BCE is ln 2
    half = ad.Tensor(np.full((3, 2), 0.5))
    assert ad.bce_loss(half, np.ones((3, 2))).data.item() == pytest.approx(np.log(2))
    # uniform k-way softmax cross-entropy is ln k
    logits = ad.Tensor(np.zeros((5, 19)))
    assert ad.softmax_cross_entropy(logits, np.zeros(5, dtype=int)).data.item() == pytest.approx(np.log(19))


def test_loss_grads():
    p = rand_tensor(4, 3)
    t = RNG.uniform(0.2, 0.8, size=(4, 3))
    probs = ad.Tensor(RNG.uniform(0.2, 0.8, size=(4, 3)))
    check_grads(lambda: ad.bce_loss(ad.sigmoid(p), t), [p])
    check_grads(lambda: ad.bce_loss(probs, t), [probs])
    logits = rand_tensor(5, 7)
    labels = RNG.integers(0, 7, size=5)
    check_grads(lambda: ad.softmax_cross_entropy(logits, labels), [logits])
    pred = rand_tensor(6, 2)
    check_grads(lambda: ad.mse_loss(pred, np.zeros((6, 2))), [pred])


def test_backward_square_rule():
    w = ad.Tensor(np.array([3.0]), requires_grad=True)
    loss = ad.sum_all(ad.mul(w, w))
    ad.backward(loss)
    assert np.allclose(w.grad, [6.0])


def test_backward_independent_leaf_zero_grad():
    w = ad.Tensor(np.array([3.0]), requires_grad=True)
    u = ad.Tensor(np.array([2.0]), requires_grad=True)
    u.zero_grad()
    loss = ad.sum_all(ad.mul(w, w))
    ad.backward(loss)
    assert np.all(u.grad == 0)


def test_non_scalar_loss_raises():
    with pytest.raises(ad.NonScalarLoss):
        ad.backward(ad.Tensor(np.zeros(3)))


def test_shape_mismatch_mentions_shapes():
    with pytest.raises(ad.ShapeMismatch) as exc:
        ad.matmul(ad.Tensor(np.zeros((2, 3))), ad.Tensor(np.zeros((2, 3))))
    assert "(2, 3)" in str(exc.value)


def test_adam_first_step_magnitude():
    w = ad.Tensor(np.zeros(4), requires_grad=True)
    w.grad = np.ones(4)
    state = ad.AdamState([w], lr=0.01)
    ad.adam_step(state)
    assert np.allclose(w.data, -0.01, atol=1e-6)
    assert state.step_count == 1
    assert np.all(w.grad == 0)


def test_adam_zero_grad_no_move():
    w = ad.Tensor(np.ones(3), requires_grad=True)
    w.zero_grad()
    state = ad.AdamState([w])
    ad.adam_step(state)
    assert np.allclose(w.data, 1.0)
    assert state.step_count == 1


def test_adam_missing_grad():
    w = ad.Tensor(np.ones(3), requires_grad=True)
    with pytest.raises(ad.MissingGrad):
        ad.adam_step(ad.AdamState([w]))


def test_adam_matches_hand_recurrence():
    # loss = 0.5 * w^2 on a scalar, two steps tracked by hand
    lr, b1, b2, eps = 0.1, 0.5, 0.999, 1e-8
    w = ad.Tensor(np.array([2.0]), requires_grad=True)
    state = ad.AdamState([w], lr=lr, beta1=b1, beta2=b2, eps=eps)
    wref, m, v = 2.0, 0.0, 0.0
    for t in (1, 2):
        loss = ad.scale(ad.sum_all(ad.mul(w, w)), 0.5)
        ad.backward(loss)
        ad.adam_step(state)
        g = wref
        m = b1 * m + (1 - b1) * g
        v = b2 * v + (1 - b2) * g * g
        wref -= lr * (m / (1 - b1**t)) / (np.sqrt(v / (1 - b2**t)) + eps)
        assert w.data[0] == pytest.approx(wref, abs=1e-12)


def test_init_normal_statistics():
    t = ad.init_normal((1000, 1000), 0.0, 0.02, seed=7)
    assert abs(t.data.mean()) < 3 * 0.02 / 1000
    assert 0.0195 < t.data.std() < 0.0205
    t2 = ad.init_normal((1000, 1000), 0.0, 0.02, seed=7)
    assert np.array_equal(t.data, t2.data)


def test_checkpoint_roundtrip(tmp_path):
    params = {"w0": rand_tensor(3, 4), "bias": rand_tensor(5)}
    path = tmp_path / "model.params"
    ad.save_checkpoint(path, params, {"lr": 0.0002, "seed": 3})
    loaded, hyper = ad.load_checkpoint(path)
    assert hyper == {"lr": 0.0002, "seed": 3}
    for name in params:
        assert np.array_equal(loaded[name], params[name].data)


def test_gradient_suite_randomized():
    """Finite-difference sweep across every op, many random instances."""
    for trial in range(10):
        x = rand_tensor(2, 3)
        w = rand_tensor(3, 2)
        m = rand_tensor(2, 2)
        check_grads(
            lambda: ad.sum_all(ad.mul(ad.softmax(ad.tanh(ad.matmul(x, w)), axis=1), m)),
            [x, w],
        )
