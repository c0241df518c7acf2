"""Evaluation metrics: layout IoU, texture MS-SSIM and condition alignment.

MS-SSIM algorithm, fixed so independent implementations can agree: images
are resized to 64x64 (bilinear), converted to grayscale in [0, 1], then
scored over 5 scales with the canonical weights (0.0448, 0.2856, 0.3001,
0.2363, 0.1333).  Local statistics use an 11x11 Gaussian window with
sigma 1.5 and reflect padding; scales are linked by 2x2 average pooling;
C1 = 0.01^2 and C2 = 0.03^2 on the unit intensity range.  The luminance
term enters at the coarsest scale only.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field

import numpy as np
from PIL import Image
from scipy.ndimage import gaussian_filter

from . import autodiff as ad
from .layout import BBox
from .texture import COLOUR_DIM, MATERIAL_DIM, generate_texture

MS_SSIM_WEIGHTS = (0.0448, 0.2856, 0.3001, 0.2363, 0.1333)
_C1 = 0.01**2
_C2 = 0.03**2


class TooSmall(ValueError):
    pass


class UntrainedProbe(RuntimeError):
    pass


@dataclass
class EvalReport:
    mean_iou: float
    per_room_iou: list
    ms_ssim: float
    material_acc: float
    colour_acc: float
    probe_real_acc: tuple
    n_samples: int
    note: str = (
        "FID is not reported: it requires a pretrained Inception network; "
        "MS-SSIM diversity and probe alignment stand in for it"
    )

    def to_json(self) -> str:
        doc = {
            "mean_iou": self.mean_iou,
            "per_room_iou": self.per_room_iou,
            "ms_ssim": self.ms_ssim,
            "material_acc": self.material_acc,
            "colour_acc": self.colour_acc,
            "probe_real_acc": list(self.probe_real_acc),
            "n_samples": self.n_samples,
            "note": self.note,
        }
        return json.dumps(doc, indent=2, sort_keys=True)


def format_report(report: EvalReport) -> str:
    lines = [
        "metric          value",
        "--------------  ------",
        f"mean IoU        {report.mean_iou:.4f}",
        f"MS-SSIM         {report.ms_ssim:.4f}",
        f"material acc    {report.material_acc:.4f}",
        f"colour acc      {report.colour_acc:.4f}",
        f"probe real acc  {report.probe_real_acc[0]:.4f} / {report.probe_real_acc[1]:.4f}",
        f"samples         {report.n_samples}",
        "",
        report.note,
    ]
    return "\n".join(lines) + "\n"


# ---------------------------------------------------------------------------
# IoU


def iou(a: BBox, b: BBox) -> float:
    ox = max(0.0, min(a.x1, b.x1) - max(a.x0, b.x0))
    oy = max(0.0, min(a.y1, b.y1) - max(a.y0, b.y0))
    inter = ox * oy
    union = a.area + b.area - inter
    if union <= 0:
        return 0.0
    return inter / union


def mean_iou(predictions, ground_truth) -> float:
    """Average per-room IoU over all rooms of all layouts.

    predictions/ground_truth: aligned lists of per-layout box lists.
    """
    values = per_room_iou(predictions, ground_truth)
    return float(np.mean(values)) if values else 0.0


def per_room_iou(predictions, ground_truth) -> list:
    values = []
    for pred, gt in zip(predictions, ground_truth):
        for p, g in zip(pred, gt):
            values.append(iou(p, g))
    return values


# ---------------------------------------------------------------------------
# MS-SSIM


def _to_gray64(img: np.ndarray) -> np.ndarray:
    arr = np.asarray(img, dtype=np.float64)
    if arr.ndim == 3:
        arr = arr @ np.array([0.299, 0.587, 0.114])
    if arr.max() > 1.5:  # 8-bit convention
        arr = arr / 255.0
    elif arr.min() < 0:  # [-1, 1] convention
        arr = (arr + 1.0) / 2.0
    arr = np.clip(arr, 0.0, 1.0)
    im = Image.fromarray((arr * 255).astype(np.uint8), mode="L")
    im = im.resize((64, 64), Image.BILINEAR)
    return np.asarray(im, dtype=np.float64) / 255.0


def _gfilter(x: np.ndarray) -> np.ndarray:
    # 11x11 Gaussian window: sigma 1.5 with the radius truncated at 5
    return gaussian_filter(x, 1.5, truncate=5.0 / 1.5, mode="reflect")


def _ssim_terms(x: np.ndarray, y: np.ndarray):
    mu_x = _gfilter(x)
    mu_y = _gfilter(y)
    xx = _gfilter(x * x)
    yy = _gfilter(y * y)
    xy = _gfilter(x * y)
    var_x = xx - mu_x * mu_x
    var_y = yy - mu_y * mu_y
    cov = xy - mu_x * mu_y
    lum = (2 * mu_x * mu_y + _C1) / (mu_x**2 + mu_y**2 + _C1)
    cs = (2 * cov + _C2) / (var_x + var_y + _C2)
    return float(lum.mean()), float(cs.mean())


def _downsample2(x: np.ndarray) -> np.ndarray:
    h, w = x.shape
    return x[: h - h % 2, : w - w % 2].reshape(h // 2, 2, w // 2, 2).mean(axis=(1, 3))


def ms_ssim(img_a, img_b) -> float:
    a, b = np.asarray(img_a), np.asarray(img_b)
    if a.shape != b.shape:
        raise TooSmall(f"shape mismatch: {a.shape} vs {b.shape}")
    if a.shape[0] != a.shape[1] or a.shape[0] < 32:
        raise TooSmall(f"need square images with side >= 32, got {a.shape}")
    x, y = _to_gray64(a), _to_gray64(b)
    score = 1.0
    for level, weight in enumerate(MS_SSIM_WEIGHTS):
        lum, cs = _ssim_terms(x, y)
        if level == len(MS_SSIM_WEIGHTS) - 1:
            term = lum * cs
        else:
            term = cs
            x, y = _downsample2(x), _downsample2(y)
        score *= max(term, 0.0) ** weight
    return float(score)


def diversity_score(gen_params, cond, n: int, seed: int = 0) -> float:
    """Mean pairwise MS-SSIM of n generations sharing a condition.

    Higher means more similar outputs; 1.0 flags a collapsed generator."""
    if n < 2:
        raise ValueError("need at least two samples")
    images = [generate_texture(gen_params, cond, seed=seed + k) for k in range(n)]
    scores = []
    for i in range(n):
        for j in range(i + 1, n):
            scores.append(ms_ssim(images[i], images[j]))
    return float(np.mean(scores))


# ---------------------------------------------------------------------------
# alignment probe


class ProbeParams:
    """Small CNN texture classifier with material and colour heads,
    trained on real corpus images only."""

    def __init__(self, seed: int = 0):
        self.conv1_w = ad.init_normal((8, 3, 5, 5), stddev=0.1, seed=seed * 10 + 1)
        self.conv1_b = ad.init_zeros((8,))
        self.conv2_w = ad.init_normal((16, 8, 5, 5), stddev=0.1, seed=seed * 10 + 2)
        self.conv2_b = ad.init_zeros((16,))
        self.mat_w = ad.init_normal((16, MATERIAL_DIM), stddev=0.1, seed=seed * 10 + 3)
        self.mat_b = ad.init_zeros((MATERIAL_DIM,))
        self.col_w = ad.init_normal((16, COLOUR_DIM), stddev=0.1, seed=seed * 10 + 4)
        self.col_b = ad.init_zeros((COLOUR_DIM,))
        self.trained = False

    def parameters(self):
        return [
            self.conv1_w, self.conv1_b, self.conv2_w, self.conv2_b,
            self.mat_w, self.mat_b, self.col_w, self.col_b,
        ]

    def forward(self, images):
        x = ad.Tensor(images)
        x = ad.leaky_relu(ad.conv2d(x, self.conv1_w, self.conv1_b, stride=2, padding=2))
        x = ad.leaky_relu(ad.conv2d(x, self.conv2_w, self.conv2_b, stride=2, padding=2))
        feat = ad.spatial_mean(x)
        return (
            ad.dense(feat, self.mat_w, self.mat_b),
            ad.dense(feat, self.col_w, self.col_b),
        )

    def predict(self, images_hwc):
        """Argmax labels for a list of HxWx3 images in [-1, 1]."""
        if not self.trained:
            raise UntrainedProbe("probe must be trained before prediction")
        batch = np.stack([np.transpose(np.asarray(im), (2, 0, 1)) for im in images_hwc])
        with ad.no_grad():
            mat, col = self.forward(batch)
        return np.argmax(mat.data, axis=1), np.argmax(col.data, axis=1)


def train_probe(dataset, epochs: int = 30, lr: float = 0.002, batch_size: int = 16,
                seed: int = 0):
    """dataset: list of (HxWx3 image in [-1, 1], material_idx, colour_idx).

    Returns (probe, (material_acc, colour_acc)) with accuracies measured on
    a held-out fifth of the data."""
    if not dataset:
        raise ValueError("empty probe dataset")
    rng = np.random.default_rng(seed)
    order = rng.permutation(len(dataset))
    split = max(1, len(dataset) // 5)
    test_ids, train_ids = order[:split], order[split:]

    images = np.stack([np.transpose(np.asarray(d[0]), (2, 0, 1)) for d in dataset])
    mats = np.array([d[1] for d in dataset])
    cols = np.array([d[2] for d in dataset])

    probe = ProbeParams(seed=seed)
    state = ad.AdamState(probe.parameters(), lr=lr, beta1=0.9)
    for _ in range(epochs):
        perm = rng.permutation(train_ids)
        for start in range(0, len(perm), batch_size):
            idx = perm[start:start + batch_size]
            m_logits, c_logits = probe.forward(images[idx])
            loss = ad.add(
                ad.softmax_cross_entropy(m_logits, mats[idx]),
                ad.softmax_cross_entropy(c_logits, cols[idx]),
            )
            ad.backward(loss)
            ad.adam_step(state)
    probe.trained = True

    with ad.no_grad():
        m_logits, c_logits = probe.forward(images[test_ids])
    mat_acc = float((np.argmax(m_logits.data, axis=1) == mats[test_ids]).mean())
    col_acc = float((np.argmax(c_logits.data, axis=1) == cols[test_ids]).mean())
    return probe, (mat_acc, col_acc)


def alignment_accuracy(gen_params, conditions, probe: ProbeParams, seed: int = 0):
    """Fraction of generated textures whose probe labels match the request."""
    if not probe.trained:
        raise UntrainedProbe("probe must be trained before evaluation")
    images, want_m, want_c = [], [], []
    for k, cond in enumerate(conditions):
        images.append(generate_texture(gen_params, cond, seed=seed + k))
        want_m.append(int(np.argmax(cond.p)))
        want_c.append(int(np.argmax(cond.q)))
    got_m, got_c = probe.predict(images)
    return (
        float((got_m == np.array(want_m)).mean()),
        float((got_c == np.array(want_c)).mean()),
    )
