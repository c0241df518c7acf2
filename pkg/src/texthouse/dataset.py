"""Synthetic corpus generation: ground-truth layouts on the 512 px
canvas, template descriptions that re-parse exactly, and a labelled
procedural texture corpus.

Layouts are built by recursively splitting the canvas into rectangles,
so ground-truth boxes tile the dwelling and every wall is shared.
"""

from __future__ import annotations

import json
from collections import Counter
from dataclasses import dataclass
from pathlib import Path

import numpy as np
from PIL import Image

from .layout import BBox
from .parsing import HouseSpec, RoomSpec
from .vocab import CANVAS_AREA_SQM, CANVAS_METERS, POSITION_ANCHORS, Vocabularies


@dataclass
class SyntheticHouse:
    spec: HouseSpec
    gt_boxes: list
    description: str

    def to_dict(self):
        return {
            "spec": self.spec.to_dict(),
            "gt_boxes": [list(b.as_array()) for b in self.gt_boxes],
            "description": self.description,
        }

    @classmethod
    def from_dict(cls, d):
        return cls(
            spec=HouseSpec.from_dict(d["spec"]),
            gt_boxes=[BBox(*b) for b in d["gt_boxes"]],
            description=d["description"],
        )


MIN_ROOM_SQM = 9.0
MIN_SIDE = 2.0 / CANVAS_METERS  # never split below 2 m on a side


def _split_rects(n_rooms: int, rng) -> list[tuple]:
    """Recursively split the unit canvas into n_rooms tiling rectangles."""
    for _ in range(64):
        rects = [(0.0, 0.0, 1.0, 1.0)]
        ok = True
        while len(rects) < n_rooms:
            # split the largest rectangle along its longer axis
            areas = [(r[2] - r[0]) * (r[3] - r[1]) for r in rects]
            i = int(np.argmax(areas))
            x0, y0, x1, y1 = rects.pop(i)
            w, h = x1 - x0, y1 - y0
            frac = rng.uniform(0.35, 0.65)
            if w >= h:
                cut = x0 + w * frac
                a, b = (x0, y0, cut, y1), (cut, y0, x1, y1)
            else:
                cut = y0 + h * frac
                a, b = (x0, y0, x1, cut), (x0, cut, x1, y1)
            if min(a[2] - a[0], a[3] - a[1], b[2] - b[0], b[3] - b[1]) < MIN_SIDE:
                ok = False
                break
            rects.extend([a, b])
        if ok and all((r[2] - r[0]) * (r[3] - r[1]) * CANVAS_AREA_SQM >= MIN_ROOM_SQM for r in rects):
            return rects
    raise RuntimeError("could not split canvas into valid rooms")


def _nearest_position(cx, cy, vocab: Vocabularies) -> int:
    best, best_d = 0, float("inf")
    for name, (ax, ay) in POSITION_ANCHORS.items():
        d = (cx - ax) ** 2 + (cy - ay) ** 2
        if d < best_d:
            best, best_d = vocab.position_index(name), d
    return best


def shared_boundary_length(a: BBox, b: BBox) -> float:
    """Length (canvas units) of the common boundary of two tiling boxes."""
    tol = 1e-9
    if abs(a.x1 - b.x0) < tol or abs(b.x1 - a.x0) < tol:
        return max(0.0, min(a.y1, b.y1) - max(a.y0, b.y0))
    if abs(a.y1 - b.y0) < tol or abs(b.y1 - a.y0) < tol:
        return max(0.0, min(a.x1, b.x1) - max(a.x0, b.x0))
    return 0.0


MIN_SHARED_WALL_M = 0.5


def generate_layout(n_rooms: int, seed: int, vocab: Vocabularies | None = None) -> SyntheticHouse:
    """One synthetic house: tiling gt boxes, derived room specs, and a
    description rendered from the sentence templates."""
    if not 3 <= n_rooms <= 10:
        raise ValueError("n_rooms must be in [3, 10]")
    if vocab is None:
        vocab = Vocabularies()
    rng = np.random.default_rng(seed)
    rects = _split_rects(n_rooms, rng)
    boxes = [BBox(*r) for r in rects]

    # largest box is the living room; the rest draw from the other types
    areas = [b.area for b in boxes]
    living = int(np.argmax(areas))
    other_types = [i for i, t in enumerate(vocab.room_types) if t != "livingroom"]
    type_counts: Counter = Counter()
    rooms = []
    for i, box in enumerate(boxes):
        t = vocab.room_type_index("livingroom") if i == living else int(rng.choice(other_types))
        type_counts[t] += 1
        size = max(1, round(box.area * CANVAS_AREA_SQM))
        cx, cy = (box.x0 + box.x1) / 2, (box.y0 + box.y1) / 2
        rooms.append(
            RoomSpec(
                id=f"{vocab.room_types[t]}{type_counts[t]}",
                room_type=t,
                position=_nearest_position(cx, cy, vocab),
                size_sqm=float(size),
                floor_material=int(rng.integers(len(vocab.materials))),
                floor_colour=int(rng.integers(len(vocab.colours))),
                wall_material=int(rng.integers(len(vocab.materials))),
                wall_colour=int(rng.integers(len(vocab.colours))),
            )
        )

    adjacency = set()
    threshold = MIN_SHARED_WALL_M / CANVAS_METERS
    for i in range(n_rooms):
        for j in range(i + 1, n_rooms):
            if shared_boundary_length(boxes[i], boxes[j]) >= threshold:
                adjacency.add((i, j))

    spec = HouseSpec(rooms=rooms, adjacency=adjacency)
    description = render_description(spec, seed=seed + 1, vocab=vocab)
    return SyntheticHouse(spec=spec, gt_boxes=boxes, description=description)


_COUNT_WORDS = ["zero", "one", "two", "three", "four", "five", "six", "seven", "eight", "nine", "ten"]


def _size_sentence(room, pos, rng) -> str:
    k = int(room.size_sqm)
    forms = [
        f"{room.id} has {k} squares in {pos}.",
        f"{room.id} has {k} square meters in {pos}.",
        f"{room.id} covers {k} square meters located in {pos}.",
        f"{room.id} is in {pos} with {k} square meters.",
    ]
    return forms[rng.integers(len(forms))]


def _texture_sentence(room, vocab, rng) -> str:
    cf = vocab.colours[room.floor_colour]
    mf = vocab.materials[room.floor_material]
    cw = vocab.colours[room.wall_colour]
    mw = vocab.materials[room.wall_material]
    forms = [
        f"{room.id} has {cf} {mf} floor, and wall is {mw} and {cw}.",
        f"{room.id} has {cf} {mf} floor as well as has {cw} {mw} wall.",
        f"{room.id} wall is {cw} {mw} while uses {cf} {mf} for floor.",
        f"{room.id} floor is {cf} {mf}, and has {cw} {mw} wall.",
        f"wall of {room.id} is {mw} and {cw}, and has {cf} {mf} floor.",
        f"floor of {room.id} is {mf} and {cf}, and wall is {mw} and {cw}.",
        f"{room.id} uses {cf} {mf} for floor, and wall is {cw} {mw}.",
    ]
    return forms[rng.integers(len(forms))]


_CONNECTIVE_PREFIXES = ["", "Specifically, ", "Besides, ", "Moreover, ", "Additionally, ", "In addition, "]


def render_description(spec: HouseSpec, seed: int = 0, vocab: Vocabularies | None = None) -> str:
    """Template-render a spec; the result re-parses to the same spec."""
    if vocab is None:
        vocab = Vocabularies()
    rng = np.random.default_rng(seed)
    sentences = []

    counts = Counter(r.room_type for r in spec.rooms)
    parts = []
    for t, c in sorted(counts.items()):
        name = vocab.room_types[t] + ("s" if c > 1 else "")
        parts.append(f"{_COUNT_WORDS[c]} {name}")
    if len(parts) > 1:
        inventory = ", ".join(parts[:-1]) + f", and {parts[-1]}"
    else:
        inventory = parts[0]
    sentences.append(f"The building contains {inventory}.")

    has_textures = all(r.floor_material is not None and r.wall_material is not None for r in spec.rooms)
    for room in spec.rooms:
        pos = vocab.positions[room.position]
        prefix = _CONNECTIVE_PREFIXES[rng.integers(len(_CONNECTIVE_PREFIXES))]
        sentences.append(prefix + _size_sentence(room, pos, rng))
        if has_textures:
            sentences.append(_texture_sentence(room, vocab, rng))

    neighbours: dict[int, list[int]] = {}
    for i, j in sorted(spec.adjacency):
        neighbours.setdefault(i, []).append(j)
    for i, js in neighbours.items():
        relation = "adjacent" if rng.integers(2) else "next"
        listed = ", ".join(spec.rooms[j].id for j in sorted(js))
        sentences.append(f"{spec.rooms[i].id} is {relation} to {listed}.")

    return " ".join(sentences)


# ---------------------------------------------------------------------------
# procedural texture corpus


_PLANK_MATERIALS = {"Log", "Wood_Veneer", "Wood_Grain", "Pure_Color_Wood", "Bamboo", "Cork"}
_CELL_MATERIALS = {
    "Marble",
    "Jade",
    "Mosaic",
    "Tile",
    "Stone_Brick",
    "Granite",
    "Brick",
    "Limestone",
    "Slate",
}
# everything else renders as flat noise (Coating, Wall_Cloth, Concrete, Plaster)

COLOUR_RGB = {
    "White": (0.92, 0.92, 0.92),
    "Black": (0.18, 0.18, 0.18),
    "Blue": (0.15, 0.35, 0.95),
    "Yellow": (0.95, 0.85, 0.15),
    "Orange": (0.95, 0.55, 0.12),
    "Pink": (0.95, 0.55, 0.75),
    "Wood_color": (0.78, 0.58, 0.35),
    "Earth_color": (0.62, 0.47, 0.30),
    "Red": (0.90, 0.18, 0.15),
    "Green": (0.20, 0.75, 0.30),
    "Grey": (0.55, 0.55, 0.55),
    "Purple": (0.60, 0.25, 0.80),
}


def _plank_intensity(size, rng):
    rows = rng.integers(4, 7)
    band = np.repeat(rng.uniform(0.55, 1.0, rows), int(np.ceil(size / rows)))[:size]
    img = np.tile(band[:, None], (1, size))
    seam = size // rows
    if seam > 1:
        img[::seam, :] *= 0.45
    return img


def _cell_intensity(size, rng):
    cells = rng.integers(3, 6)
    block = int(np.ceil(size / cells))
    vals = rng.uniform(0.55, 1.0, (cells, cells))
    img = np.kron(vals, np.ones((block, block)))[:size, :size]
    if block > 1:
        img[::block, :] *= 0.5
        img[:, ::block] *= 0.5
    return img


def _flat_intensity(size, rng):
    coarse = rng.uniform(0.7, 1.0, (4, 4))
    block = int(np.ceil(size / 4))
    return np.kron(coarse, np.ones((block, block)))[:size, :size]


def texture_image(material: str, colour: str, size: int, rng) -> np.ndarray:
    """One procedural texture as float RGB in [0, 1], hue set by colour."""
    if material in _PLANK_MATERIALS:
        intensity = _plank_intensity(size, rng)
    elif material in _CELL_MATERIALS:
        intensity = _cell_intensity(size, rng)
    else:
        intensity = _flat_intensity(size, rng)
    intensity = np.clip(intensity * rng.uniform(0.97, 1.03, intensity.shape), 0.35, 1.0)
    base = np.array(COLOUR_RGB[colour])
    return np.clip(intensity[:, :, None] * base[None, None, :], 0.0, 1.0)


def generate_texture_corpus(k: int, size: int, seed: int, out_dir, vocab: Vocabularies | None = None) -> dict:
    """Write k labelled PNGs plus index.json; returns the index mapping."""
    if k < 1:
        raise ValueError("k must be >= 1")
    if vocab is None:
        vocab = Vocabularies()
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    rng = np.random.default_rng(seed)
    index = {}
    for i in range(k):
        material = vocab.materials[int(rng.integers(len(vocab.materials)))]
        colour = vocab.colours[int(rng.integers(len(vocab.colours)))]
        img = texture_image(material, colour, size, rng)
        name = f"tex_{i:04d}.png"
        Image.fromarray((img * 255).astype(np.uint8)).save(out_dir / name)
        index[name] = {"material": material, "colour": colour}
    with open(out_dir / "index.json", "w", encoding="utf-8") as fh:
        json.dump(index, fh, indent=2, sort_keys=True)
    return index


def load_texture_corpus(dir_path):
    """Returns list of (float RGB array in [-1, 1], material word, colour word)."""
    dir_path = Path(dir_path)
    with open(dir_path / "index.json", encoding="utf-8") as fh:
        index = json.load(fh)
    out = []
    for name in sorted(index):
        arr = np.asarray(Image.open(dir_path / name), dtype=np.float64) / 255.0
        out.append((arr * 2.0 - 1.0, index[name]["material"], index[name]["colour"]))
    return out


# ---------------------------------------------------------------------------
# corpus on disk


def write_corpus(out_dir, n_houses: int, seed: int, n_textures: int = 64, texture_size: int = 32,
                 train_fraction: float = 0.8, vocab: Vocabularies | None = None) -> None:
    """Full corpus layout: houses/NNNN.json, textures/, split.json."""
    out_dir = Path(out_dir)
    houses_dir = out_dir / "houses"
    houses_dir.mkdir(parents=True, exist_ok=True)
    rng = np.random.default_rng(seed)
    for i in range(n_houses):
        n_rooms = int(rng.integers(4, 8))
        house = generate_layout(n_rooms, seed=seed * 100003 + i, vocab=vocab)
        with open(houses_dir / f"{i:04d}.json", "w", encoding="utf-8") as fh:
            json.dump(house.to_dict(), fh, indent=2)
    generate_texture_corpus(n_textures, texture_size, seed + 1, out_dir / "textures", vocab=vocab)

    ids = list(range(n_houses))
    split_rng = np.random.default_rng(seed + 2)
    split_rng.shuffle(ids)
    cut = int(round(n_houses * train_fraction))
    split = {"seed": seed, "train": sorted(ids[:cut]), "test": sorted(ids[cut:])}
    with open(out_dir / "split.json", "w", encoding="utf-8") as fh:
        json.dump(split, fh, indent=2)


def load_corpus(dir_path):
    """Returns (houses list, split dict)."""
    dir_path = Path(dir_path)
    houses = []
    for p in sorted((dir_path / "houses").glob("*.json")):
        with open(p, encoding="utf-8") as fh:
            houses.append(SyntheticHouse.from_dict(json.load(fh)))
    with open(dir_path / "split.json", encoding="utf-8") as fh:
        split = json.load(fh)
    return houses, split
