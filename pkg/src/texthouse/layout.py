"""Room-box layout prediction.

The learned predictor runs a two-layer graph convolution over the room
feature matrix, adds the result back onto the input features, and
regresses one canvas-normalised bounding box per room through a small
MLP.  Two baselines ship alongside: a rule-based placer (anchor +
random aspect ratio) and the same regressor with the graph stage
removed.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from . import autodiff as ad
from .parsing import HouseSpec
from .vocab import CANVAS_AREA_SQM, POSITION_ANCHORS, Vocabularies


class LengthMismatch(ValueError):
    pass


class EmptyDataset(ValueError):
    pass


@dataclass
class BBox:
    x0: float
    y0: float
    x1: float
    y1: float

    @property
    def area(self) -> float:
        return max(self.x1 - self.x0, 0.0) * max(self.y1 - self.y0, 0.0)

    def as_array(self):
        return np.array([self.x0, self.y0, self.x1, self.y1])


MIN_EXTENT = 1.0 / 512  # one pixel on the canvas


def clamp_box(b: BBox) -> BBox:
    """Clamp to the unit canvas, reorder corners, inflate degenerate boxes."""
    x0, x1 = sorted((min(max(b.x0, 0.0), 1.0), min(max(b.x1, 0.0), 1.0)))
    y0, y1 = sorted((min(max(b.y0, 0.0), 1.0), min(max(b.y1, 0.0), 1.0)))
    if x1 - x0 < MIN_EXTENT:
        mid = min(max((x0 + x1) / 2, MIN_EXTENT / 2), 1.0 - MIN_EXTENT / 2)
        x0, x1 = mid - MIN_EXTENT / 2, mid + MIN_EXTENT / 2
    if y1 - y0 < MIN_EXTENT:
        mid = min(max((y0 + y1) / 2, MIN_EXTENT / 2), 1.0 - MIN_EXTENT / 2)
        y0, y1 = mid - MIN_EXTENT / 2, mid + MIN_EXTENT / 2
    return BBox(x0, y0, x1, y1)


@dataclass
class TrainConfig:
    lr: float = 0.0002
    epochs: int = 300
    seed: int = 0
    hidden: int = 64
    gcn_on: bool = True
    softmax_on: bool = True


class GcLpnParams:
    """Two D x D graph-convolution weights plus the D -> H -> 4 box MLP."""

    def __init__(self, feature_dim: int, hidden: int = 64, seed: int = 0, gcn_on=True, softmax_on=True):
        self.feature_dim = feature_dim
        self.hidden = hidden
        self.gcn_on = gcn_on
        self.softmax_on = softmax_on
        d = feature_dim
        self.w0 = ad.init_normal((d, d), 0.0, 0.02, seed=seed * 7 + 1)
        self.w1 = ad.init_normal((d, d), 0.0, 0.02, seed=seed * 7 + 2)
        self.mlp_w1 = ad.init_normal((d, hidden), 0.0, 0.02, seed=seed * 7 + 3)
        self.mlp_b1 = ad.init_zeros((1, hidden))
        self.mlp_w2 = ad.init_normal((hidden, 4), 0.0, 0.02, seed=seed * 7 + 4)
        self.mlp_b2 = ad.init_zeros((1, 4))

    def parameters(self):
        return [self.w0, self.w1, self.mlp_w1, self.mlp_b1, self.mlp_w2, self.mlp_b2]

    def named_parameters(self):
        return {
            "w0": self.w0,
            "w1": self.w1,
            "mlp_w1": self.mlp_w1,
            "mlp_b1": self.mlp_b1,
            "mlp_w2": self.mlp_w2,
            "mlp_b2": self.mlp_b2,
        }

    def save(self, path):
        ad.save_checkpoint(
            path,
            self.named_parameters(),
            {
                "feature_dim": self.feature_dim,
                "hidden": self.hidden,
                "gcn_on": self.gcn_on,
                "softmax_on": self.softmax_on,
            },
        )

    @classmethod
    def load(cls, path) -> "GcLpnParams":
        arrays, hyper = ad.load_checkpoint(path)
        params = cls(
            hyper["feature_dim"],
            hyper["hidden"],
            gcn_on=hyper.get("gcn_on", True),
            softmax_on=hyper.get("softmax_on", True),
        )
        for name, tensor in params.named_parameters().items():
            tensor.data = arrays[name]
        return params


def gcn_forward(x, a, params: GcLpnParams) -> ad.Tensor:
    """Structured feature S = X + Softmax(A ReLU(A X W0) W1), softmax row-wise."""
    xt = x if isinstance(x, ad.Tensor) else ad.Tensor(x)
    at = a if isinstance(a, ad.Tensor) else ad.Tensor(a)
    if xt.shape[1] != params.feature_dim or at.shape[0] != xt.shape[0]:
        raise ad.ShapeMismatch("gcn_forward", xt.shape, at.shape)
    hidden = ad.relu(ad.matmul(ad.matmul(at, xt), params.w0))
    pre = ad.matmul(ad.matmul(at, hidden), params.w1)
    y = ad.softmax(pre, axis=1) if params.softmax_on else pre
    return ad.add(xt, y)


def predict_box_tensor(s: ad.Tensor, params: GcLpnParams) -> ad.Tensor:
    h = ad.relu(ad.dense(s, params.mlp_w1, params.mlp_b1))
    return ad.dense(h, params.mlp_w2, params.mlp_b2)


def predict_boxes(s, params: GcLpnParams) -> list[BBox]:
    """Raw (unclamped) per-room boxes from a structured feature matrix."""
    st = s if isinstance(s, ad.Tensor) else ad.Tensor(s)
    with ad.no_grad():
        out = predict_box_tensor(st, params)
    return [BBox(*row) for row in out.data]


def clpn_forward(x, params: GcLpnParams) -> list[BBox]:
    """Ablation: box MLP applied to raw features, graph stage skipped."""
    return predict_boxes(x, params)


def gclpn_predict(x, a, params: GcLpnParams) -> list[BBox]:
    if params.gcn_on:
        with ad.no_grad():
            s = gcn_forward(x, a, params)
        return predict_boxes(s, params)
    return clpn_forward(x, params)


def layout_loss(pred: ad.Tensor, truth) -> ad.Tensor:
    """Mean squared L2 norm of the per-room 4-coordinate error."""
    t = truth.data if isinstance(truth, ad.Tensor) else np.asarray(truth, dtype=np.float64)
    if pred.shape != t.shape:
        raise LengthMismatch(f"{pred.shape} vs {t.shape}")
    return ad.scale(ad.mse_loss(pred, t), 4.0)


def train_gclpn(dataset, config: TrainConfig, params: GcLpnParams | None = None):
    """Adam-fit the box regressor; returns (params, per-epoch loss trace).

    dataset: list of (X, A, gt_boxes) with gt_boxes an N x 4 array.
    """
    if not dataset:
        raise EmptyDataset("no training layouts")
    if params is None:
        params = GcLpnParams(
            dataset[0][0].shape[1],
            config.hidden,
            seed=config.seed,
            gcn_on=config.gcn_on,
            softmax_on=config.softmax_on,
        )
    state = ad.AdamState(params.parameters(), lr=config.lr, beta1=0.5)
    for p in params.parameters():
        p.zero_grad()
    trace = []
    order = np.arange(len(dataset))
    rng = np.random.default_rng(config.seed)
    for _ in range(config.epochs):
        rng.shuffle(order)
        total = 0.0
        for idx in order:
            x, a, gt = dataset[idx]
            if params.gcn_on:
                s = gcn_forward(x, a, params)
            else:
                s = ad.Tensor(np.asarray(x, dtype=np.float64))
            pred = predict_box_tensor(s, params)
            loss = layout_loss(pred, gt)
            ad.backward(loss)
            ad.adam_step(state)
            total += loss.data.item()
        trace.append(total / len(dataset))
    return params, trace


def mlg_baseline(spec: HouseSpec, seed: int = 0, vocab: Vocabularies | None = None) -> list[BBox]:
    """Rule-based layout: box centred on the room's position anchor, the
    stated area, and a seed-random aspect ratio in (2/3, 3/2)."""
    if vocab is None:
        vocab = Vocabularies()
    rng = np.random.default_rng(seed)
    boxes = []
    for room in spec.rooms:
        anchor = POSITION_ANCHORS[vocab.positions[room.position]]
        rho = rng.uniform(2 / 3, 3 / 2)
        area = room.size_sqm / CANVAS_AREA_SQM
        w = np.sqrt(area * rho)
        h = np.sqrt(area / rho)
        boxes.append(BBox(anchor[0] - w / 2, anchor[1] - h / 2, anchor[0] + w / 2, anchor[1] + h / 2))
    return boxes
