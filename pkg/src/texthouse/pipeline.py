"""End-to-end generation: description text to plan, textures and mesh.

This is the single code path behind both the CLI `generate` command and
the HTTP generation endpoint, so their artifacts are byte-identical for
the same text, seed and checkpoints.
"""

from __future__ import annotations

import base64
import io
import time
from dataclasses import dataclass, field, replace

import numpy as np
from PIL import Image

from . import layout as lo
from . import postproc as pp
from . import scene3d as s3
from . import texture as tx
from .parsing import encode_layout_features, parse_house
from .vocab import Vocabularies

DEFAULT_SEED = 0

# surfaces the text leaves unspecified fall back to a neutral scheme
DEFAULT_FLOOR = ("Log", "Wood_color")
DEFAULT_WALL = ("Coating", "White")


@dataclass
class GenerationResult:
    house_spec: dict
    boxes: list  # [[x0, y0, x1, y1] in canvas units]
    plan: pp.FloorPlan
    plan_json: str
    plan_svg: str
    topview_svg: str
    textures: dict  # room id -> {"floor": ndarray, "wall": ndarray}
    obj_text: str
    mtl_text: str
    seed: int
    timings: dict = field(default_factory=dict)


def fill_default_textures(spec, vocab: Vocabularies):
    """Complete unspecified surface materials with the default scheme."""
    rooms = []
    for room in spec.rooms:
        updates = {}
        if room.floor_material is None or room.floor_colour is None:
            updates["floor_material"] = vocab.material_index(DEFAULT_FLOOR[0])
            updates["floor_colour"] = vocab.colour_index(DEFAULT_FLOOR[1])
        if room.wall_material is None or room.wall_colour is None:
            updates["wall_material"] = vocab.material_index(DEFAULT_WALL[0])
            updates["wall_colour"] = vocab.colour_index(DEFAULT_WALL[1])
        rooms.append(replace(room, **updates) if updates else room)
    return replace(spec, rooms=rooms)


def png_bytes(img: np.ndarray) -> bytes:
    arr = np.clip((np.asarray(img) + 1.0) * 127.5, 0, 255).astype(np.uint8)
    buf = io.BytesIO()
    Image.fromarray(arr).save(buf, format="PNG")
    return buf.getvalue()


def png_base64(img: np.ndarray) -> str:
    return base64.b64encode(png_bytes(img)).decode("ascii")


def run_generation(text: str, layout_params: lo.GcLpnParams,
                   gen_params: tx.GeneratorParams, seed: int = DEFAULT_SEED,
                   vocab: Vocabularies | None = None) -> GenerationResult:
    """text -> spec -> boxes -> floor plan -> textures -> mesh."""
    if vocab is None:
        vocab = Vocabularies()
    timings = {}

    t0 = time.monotonic()
    spec = parse_house(text, vocab)
    spec = fill_default_textures(spec, vocab)
    timings["parse"] = time.monotonic() - t0

    t0 = time.monotonic()
    x, a = encode_layout_features(spec, vocab)
    raw = lo.gclpn_predict(x, a, layout_params)
    boxes = [lo.clamp_box(b) for b in raw]
    timings["layout"] = time.monotonic() - t0

    t0 = time.monotonic()
    plan = pp.boxes_to_plan(boxes, spec.rooms, vocab)
    plan_json = plan.to_json()
    plan_svg = pp.render_plan_svg(plan, vocab)
    timings["postprocess"] = time.monotonic() - t0

    t0 = time.monotonic()
    textures = {}
    room_by_id = {r.id: r for r in spec.rooms}
    for k, room in enumerate(plan.rooms):
        src = room_by_id[room.id]
        floor = tx.generate_texture(
            gen_params,
            tx.make_condition(src.floor_material, src.floor_colour),
            seed=seed * 1000 + 2 * k,
        )
        wall = tx.generate_texture(
            gen_params,
            tx.make_condition(src.wall_material, src.wall_colour),
            seed=seed * 1000 + 2 * k + 1,
        )
        textures[room.id] = {"floor": floor, "wall": wall}
    timings["textures"] = time.monotonic() - t0

    t0 = time.monotonic()
    walls = s3.build_walls(plan)
    mesh = s3.extrude(walls, plan)
    materials = {}
    for room in plan.rooms:
        materials[f"floor_{room.id}"] = {"texture": f"textures/floor_{room.id}.png"}
        materials[f"wall_{room.id}"] = {"texture": f"textures/wall_{room.id}.png"}
    obj_text, mtl_text = s3.export_obj(mesh, materials)
    topview = s3.render_topview_svg(
        plan, {r.id: png_base64(textures[r.id]["floor"]) for r in plan.rooms}
    )
    timings["mesh"] = time.monotonic() - t0

    return GenerationResult(
        house_spec=spec.to_dict(),
        boxes=[list(b.as_array()) for b in boxes],
        plan=plan,
        plan_json=plan_json,
        plan_svg=plan_svg,
        topview_svg=topview,
        textures=textures,
        obj_text=obj_text,
        mtl_text=mtl_text,
        seed=seed,
        timings=timings,
    )


def write_result(result: GenerationResult, out_dir) -> None:
    """Persist a GenerationResult as the CLI artifact directory."""
    from pathlib import Path

    out = Path(out_dir)
    (out / "textures").mkdir(parents=True, exist_ok=True)
    (out / "plan.json").write_text(result.plan_json)
    (out / "plan.svg").write_text(result.plan_svg)
    (out / "topview.svg").write_text(result.topview_svg)
    (out / "house.obj").write_text(result.obj_text)
    (out / "house.mtl").write_text(result.mtl_text)
    for room_id, pair in result.textures.items():
        for kind in ("floor", "wall"):
            (out / "textures" / f"{kind}_{room_id}.png").write_bytes(
                png_bytes(pair[kind])
            )
    import json

    summary = {
        "house_spec": result.house_spec,
        "boxes": result.boxes,
        "seed": result.seed,
        "timings": result.timings,
    }
    (out / "result.json").write_text(json.dumps(summary, indent=2, sort_keys=True))


def result_to_api_dict(result: GenerationResult) -> dict:
    """JSON-safe inline form served by the HTTP API."""
    import json

    return {
        "house_spec": result.house_spec,
        "boxes": result.boxes,
        "plan": json.loads(result.plan_json),
        "plan_svg": result.plan_svg,
        "topview_svg": result.topview_svg,
        "textures": {
            rid: {kind: png_base64(img) for kind, img in pair.items()}
            for rid, pair in result.textures.items()
        },
        "obj": result.obj_text,
        "mtl": result.mtl_text,
        "seed": result.seed,
        "timings": result.timings,
    }
