"""Conditional texture synthesis.

A fully convolutional generator turns a small spatial noise block,
concatenated with broadcast material and colour one-hots, into an RGB
texture; five 2x upsampling blocks fix the output at 32x the input
resolution.  The discriminator scores real/fake and carries material and
colour classifier heads on a shared trunk, giving the three-part
objective (adversarial + material + colour cross-entropies).
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field

import numpy as np
from PIL import Image

from . import autodiff as ad
from .parsing import TextureCondition

NOISE_DIM = 100
MATERIAL_DIM = 19
COLOUR_DIM = 12
INPUT_CHANNELS = NOISE_DIM + MATERIAL_DIM + COLOUR_DIM  # 131


class EmptyDataset(ValueError):
    pass


class NonConformingImage(ValueError):
    pass


@dataclass
class LossWeights:
    lambda1: float = 1.0
    lambda2: float = 1.0

    def __post_init__(self):
        if self.lambda1 < 0 or self.lambda2 < 0:
            raise ValueError("loss weights must be non-negative")


@dataclass
class TextureTrainConfig:
    f: int = 16
    iterations: int = 500
    batch_size: int = 24
    lr: float = 0.0002
    g_lr: float | None = None  # defaults to lr
    beta1: float = 0.5
    seed: int = 0
    weights: LossWeights = field(default_factory=LossWeights)
    use_material: bool = True
    use_colour: bool = True


def make_condition(material_idx: int, colour_idx: int) -> TextureCondition:
    p = np.zeros(MATERIAL_DIM)
    q = np.zeros(COLOUR_DIM)
    p[material_idx] = 1.0
    q[colour_idx] = 1.0
    return TextureCondition(p=p, q=q)


def build_input(cond: TextureCondition, w: int = 5, h: int = 5, seed: int = 0,
                rng=None) -> np.ndarray:
    """Spatial noise block with the condition broadcast to every cell.

    Returns shape (w, h, 131): 100 noise channels then p then q.
    """
    if w < 1 or h < 1:
        raise ValueError("spatial dims must be >= 1")
    if rng is None:
        rng = np.random.default_rng(seed)
    z = np.empty((w, h, INPUT_CHANNELS))
    z[..., :NOISE_DIM] = rng.standard_normal((w, h, NOISE_DIM))
    z[..., NOISE_DIM:NOISE_DIM + MATERIAL_DIM] = cond.p
    z[..., NOISE_DIM + MATERIAL_DIM:] = cond.q
    return z


def _inputs_to_batch(inputs) -> np.ndarray:
    """(w, h, C) inputs to an (N, C, w, h) batch."""
    return np.stack([np.transpose(z, (2, 0, 1)) for z in inputs])


# ---------------------------------------------------------------------------
# generator


class GeneratorParams:
    """Five upsampling conv blocks, widths (131) -> 8F -> 4F -> 2F -> F -> 3."""

    def __init__(self, f: int = 16, in_channels: int = INPUT_CHANNELS, seed: int = 0):
        self.f = f
        self.in_channels = in_channels
        widths = [in_channels, 8 * f, 4 * f, 2 * f, f, 3]
        self.conv_w, self.conv_b = [], []
        self.bn_gamma, self.bn_beta, self.bn_mean, self.bn_var = [], [], [], []
        for i in range(5):
            c_in, c_out = widths[i], widths[i + 1]
            self.conv_w.append(ad.init_normal((c_out, c_in, 5, 5), seed=seed * 100 + i))
            self.conv_b.append(ad.init_zeros((c_out,)))
            if i < 4:
                self.bn_gamma.append(ad.Tensor(np.ones(c_out), requires_grad=True))
                self.bn_beta.append(ad.init_zeros((c_out,)))
                self.bn_mean.append(np.zeros(c_out))
                self.bn_var.append(np.ones(c_out))

    def parameters(self):
        return self.conv_w + self.conv_b + self.bn_gamma + self.bn_beta

    def zero_grads(self):
        for p in self.parameters():
            p.grad = None

    def _named(self):
        out = {}
        for i in range(5):
            out[f"g.conv{i}.w"] = self.conv_w[i].data
            out[f"g.conv{i}.b"] = self.conv_b[i].data
        for i in range(4):
            out[f"g.bn{i}.gamma"] = self.bn_gamma[i].data
            out[f"g.bn{i}.beta"] = self.bn_beta[i].data
            out[f"g.bn{i}.mean"] = self.bn_mean[i]
            out[f"g.bn{i}.var"] = self.bn_var[i]
        return out

    def save(self, path):
        ad.save_checkpoint(path, self._named(), {"f": self.f, "in_channels": self.in_channels})

    @classmethod
    def load(cls, path):
        arrays, hyper = ad.load_checkpoint(path)
        obj = cls(f=int(hyper["f"]), in_channels=int(hyper["in_channels"]))
        for i in range(5):
            obj.conv_w[i].data = arrays[f"g.conv{i}.w"]
            obj.conv_b[i].data = arrays[f"g.conv{i}.b"]
        for i in range(4):
            obj.bn_gamma[i].data = arrays[f"g.bn{i}.gamma"]
            obj.bn_beta[i].data = arrays[f"g.bn{i}.beta"]
            obj.bn_mean[i] = arrays[f"g.bn{i}.mean"]
            obj.bn_var[i] = arrays[f"g.bn{i}.var"]
        return obj


def generator_forward(z, params: GeneratorParams, training: bool = True) -> ad.Tensor:
    """(N, 131, w, h) noise block to an (N, 3, 32w, 32h) image in (-1, 1)."""
    x = z if isinstance(z, ad.Tensor) else ad.Tensor(z)
    if x.data.ndim != 4 or x.shape[1] != params.in_channels:
        raise ad.ShapeMismatch("generator_forward", x.shape)
    for i in range(5):
        x = ad.upsample2x_nearest(x)
        x = ad.conv2d(x, params.conv_w[i], params.conv_b[i], stride=1, padding=2)
        if i < 4:
            x = ad.batchnorm2d(
                x, params.bn_gamma[i], params.bn_beta[i],
                params.bn_mean[i], params.bn_var[i], training=training,
            )
            x = ad.relu(x)
    return ad.tanh(x)


# ---------------------------------------------------------------------------
# discriminator


class DiscriminatorParams:
    """Five stride-2 leaky-ReLU convs (3 -> F -> 2F -> 4F -> 8F -> 8F), then
    real/fake, material and colour heads on spatially pooled features."""

    def __init__(self, f: int = 16, seed: int = 1):
        self.f = f
        widths = [3, f, 2 * f, 4 * f, 8 * f, 8 * f]
        self.conv_w, self.conv_b = [], []
        for i in range(5):
            self.conv_w.append(ad.init_normal((widths[i + 1], widths[i], 5, 5), seed=seed * 100 + i))
            self.conv_b.append(ad.init_zeros((widths[i + 1],)))
        top = 8 * f
        self.head_adv_w = ad.init_normal((top, 1), seed=seed * 100 + 10)
        self.head_adv_b = ad.init_zeros((1,))
        self.head_mat_w = ad.init_normal((top, MATERIAL_DIM), seed=seed * 100 + 11)
        self.head_mat_b = ad.init_zeros((MATERIAL_DIM,))
        self.head_col_w = ad.init_normal((top, COLOUR_DIM), seed=seed * 100 + 12)
        self.head_col_b = ad.init_zeros((COLOUR_DIM,))

    def parameters(self):
        return self.conv_w + self.conv_b + [
            self.head_adv_w, self.head_adv_b,
            self.head_mat_w, self.head_mat_b,
            self.head_col_w, self.head_col_b,
        ]

    def zero_grads(self):
        for p in self.parameters():
            p.grad = None

    def _named(self):
        out = {}
        for i in range(5):
            out[f"d.conv{i}.w"] = self.conv_w[i].data
            out[f"d.conv{i}.b"] = self.conv_b[i].data
        for name in ("adv", "mat", "col"):
            out[f"d.head_{name}.w"] = getattr(self, f"head_{name}_w").data
            out[f"d.head_{name}.b"] = getattr(self, f"head_{name}_b").data
        return out

    def save(self, path):
        ad.save_checkpoint(path, self._named(), {"f": self.f})

    @classmethod
    def load(cls, path):
        arrays, hyper = ad.load_checkpoint(path)
        obj = cls(f=int(hyper["f"]))
        for i in range(5):
            obj.conv_w[i].data = arrays[f"d.conv{i}.w"]
            obj.conv_b[i].data = arrays[f"d.conv{i}.b"]
        for name in ("adv", "mat", "col"):
            getattr(obj, f"head_{name}_w").data = arrays[f"d.head_{name}.w"]
            getattr(obj, f"head_{name}_b").data = arrays[f"d.head_{name}.b"]
        return obj


def discriminator_forward(x, params: DiscriminatorParams):
    """Returns (real/fake probability (N, 1), material logits, colour logits)."""
    t = x if isinstance(x, ad.Tensor) else ad.Tensor(x)
    if t.data.ndim != 4 or t.shape[1] != 3:
        raise ad.ShapeMismatch("discriminator_forward", t.shape)
    for i in range(5):
        t = ad.conv2d(t, params.conv_w[i], params.conv_b[i], stride=2, padding=2)
        t = ad.leaky_relu(t, 0.2)
    feat = ad.spatial_mean(t)
    score = ad.sigmoid(ad.dense(feat, params.head_adv_w, params.head_adv_b))
    mat = ad.dense(feat, params.head_mat_w, params.head_mat_b)
    col = ad.dense(feat, params.head_col_w, params.head_col_b)
    return score, mat, col


# ---------------------------------------------------------------------------
# losses


def loss_d_adv(score_real: ad.Tensor, score_fake: ad.Tensor) -> ad.Tensor:
    ones = np.ones(score_real.shape)
    zeros = np.zeros(score_fake.shape)
    return ad.add(ad.bce_loss(score_real, ones), ad.bce_loss(score_fake, zeros))


def loss_g_adv(score_fake: ad.Tensor) -> ad.Tensor:
    return ad.bce_loss(score_fake, np.ones(score_fake.shape))


def loss_material(logits_real: ad.Tensor, logits_fake: ad.Tensor, labels) -> ad.Tensor:
    return ad.add(
        ad.softmax_cross_entropy(logits_real, labels),
        ad.softmax_cross_entropy(logits_fake, labels),
    )


def loss_colour(logits_real: ad.Tensor, logits_fake: ad.Tensor, labels) -> ad.Tensor:
    return loss_material(logits_real, logits_fake, labels)


def loss_g_total(adv: ad.Tensor, mat: ad.Tensor, col: ad.Tensor,
                 weights: LossWeights | None = None) -> ad.Tensor:
    w = weights or LossWeights()
    return ad.add(adv, ad.add(ad.scale(mat, w.lambda1), ad.scale(col, w.lambda2)))


# ---------------------------------------------------------------------------
# training


def _validate_dataset(dataset):
    if not dataset:
        raise EmptyDataset("texture dataset is empty")
    side = None
    for img, cond in dataset:
        arr = np.asarray(img)
        if arr.ndim != 3 or arr.shape[2] != 3 or arr.shape[0] != arr.shape[1]:
            raise NonConformingImage(f"expected square HxWx3 image, got {arr.shape}")
        if arr.shape[0] % 32 != 0:
            raise NonConformingImage(f"side {arr.shape[0]} is not a multiple of 32")
        if side is None:
            side = arr.shape[0]
        elif arr.shape[0] != side:
            raise NonConformingImage("mixed image sizes in dataset")
        if int(cond.p.sum()) != 1 or int(cond.q.sum()) != 1:
            raise NonConformingImage("condition vectors must be one-hot")
    return side


def train_lctgan(dataset, config: TextureTrainConfig,
                 gen: GeneratorParams | None = None,
                 disc: DiscriminatorParams | None = None):
    """Alternating one D-step, one G-step Adam optimisation.

    dataset: list of (HxWx3 image in [-1, 1], TextureCondition).
    Returns (gen, disc, traces) with per-iteration loss traces under keys
    d_adv, g_adv, material, colour.
    """
    side = _validate_dataset(dataset)
    spatial = side // 32
    rng = np.random.default_rng(config.seed)

    if gen is None:
        gen = GeneratorParams(f=config.f, seed=config.seed)
    if disc is None:
        disc = DiscriminatorParams(f=config.f, seed=config.seed + 1)

    w = LossWeights(
        config.weights.lambda1 if config.use_material else 0.0,
        config.weights.lambda2 if config.use_colour else 0.0,
    )
    g_lr = config.lr if config.g_lr is None else config.g_lr
    g_state = ad.AdamState(gen.parameters(), lr=g_lr, beta1=config.beta1)
    d_state = ad.AdamState(disc.parameters(), lr=config.lr, beta1=config.beta1)

    images = np.stack([np.transpose(np.asarray(img), (2, 0, 1)) for img, _ in dataset])
    mats = np.array([int(np.argmax(c.p)) for _, c in dataset])
    cols = np.array([int(np.argmax(c.q)) for _, c in dataset])
    conds = [c for _, c in dataset]

    traces = {"d_adv": [], "g_adv": [], "material": [], "colour": []}
    n = len(dataset)
    for _it in range(config.iterations):
        idx = rng.choice(n, size=min(config.batch_size, n), replace=False)
        real = images[idx]
        lm, lc = mats[idx], cols[idx]
        z = _inputs_to_batch(
            [build_input(conds[i], spatial, spatial, rng=rng) for i in idx]
        )

        # discriminator step on a detached fake batch
        with ad.no_grad():
            fake_data = generator_forward(z, gen, training=True).data
        s_real, m_real, c_real = discriminator_forward(real, disc)
        s_fake, m_fake, c_fake = discriminator_forward(fake_data, disc)
        l_adv_d = loss_d_adv(s_real, s_fake)
        l_mat = loss_material(m_real, m_fake, lm)
        l_col = loss_colour(c_real, c_fake, lc)
        ad.backward(loss_g_total(l_adv_d, l_mat, l_col, w))
        ad.adam_step(d_state)
        traces["d_adv"].append(l_adv_d.data.item())

        # generator step; the discriminator's gradients are discarded
        fake = generator_forward(z, gen, training=True)
        s_fake, m_fake, c_fake = discriminator_forward(fake, disc)
        l_adv_g = loss_g_adv(s_fake)
        l_mat = ad.softmax_cross_entropy(m_fake, lm)
        l_col = ad.softmax_cross_entropy(c_fake, lc)
        ad.backward(loss_g_total(l_adv_g, l_mat, l_col, w))
        ad.adam_step(g_state)
        disc.zero_grads()
        traces["g_adv"].append(l_adv_g.data.item())
        traces["material"].append(l_mat.data.item())
        traces["colour"].append(l_col.data.item())

    return gen, disc, traces


# ---------------------------------------------------------------------------
# inference


def generate_texture(gen: GeneratorParams, cond: TextureCondition,
                     w: int = 1, h: int = 1, seed: int = 0) -> np.ndarray:
    """One texture as an (32w, 32h, 3) array in (-1, 1); inference-mode BN."""
    z = _inputs_to_batch([build_input(cond, w, h, seed=seed)])
    with ad.no_grad():
        out = generator_forward(z, gen, training=False)
    return np.transpose(out.data[0], (1, 2, 0))


def interpolate_conditions(gen: GeneratorParams, cond_a: TextureCondition,
                           cond_b: TextureCondition, steps: int,
                           w: int = 1, h: int = 1, seed: int = 0):
    """Images along the straight line between two condition embeddings,
    sharing one noise block."""
    if steps < 2:
        raise ValueError("steps must be >= 2")
    rng = np.random.default_rng(seed)
    noise = rng.standard_normal((w, h, NOISE_DIM))
    out = []
    for t in np.linspace(0.0, 1.0, steps):
        p = (1 - t) * cond_a.p + t * cond_b.p
        q = (1 - t) * cond_a.q + t * cond_b.q
        z = np.empty((w, h, INPUT_CHANNELS))
        z[..., :NOISE_DIM] = noise
        z[..., NOISE_DIM:NOISE_DIM + MATERIAL_DIM] = p
        z[..., NOISE_DIM + MATERIAL_DIM:] = q
        with ad.no_grad():
            img = generator_forward(_inputs_to_batch([z]), gen, training=False)
        out.append(np.transpose(img.data[0], (1, 2, 0)))
    return out


def generate_novel(gen: GeneratorParams, cond: TextureCondition, seen_pairs,
                   w: int = 1, h: int = 1, seed: int = 0):
    """Generate for a possibly unseen (material, colour) pairing.

    seen_pairs: set of (material_idx, colour_idx) observed in training.
    Returns (image, metadata dict)."""
    pair = (int(np.argmax(cond.p)), int(np.argmax(cond.q)))
    img = generate_texture(gen, cond, w=w, h=h, seed=seed)
    meta = {
        "material_index": pair[0],
        "colour_index": pair[1],
        "seed": seed,
        "out_of_distribution": pair not in set(seen_pairs),
    }
    return img, meta


def write_texture_png(path, img: np.ndarray, metadata: dict) -> None:
    """PNG in [0, 255] plus a JSON sidecar with the generation metadata."""
    arr = np.clip((img + 1.0) * 127.5, 0, 255).astype(np.uint8)
    Image.fromarray(arr).save(path)
    with open(str(path) + ".json", "w") as fh:
        json.dump(metadata, fh, indent=2, sort_keys=True)
