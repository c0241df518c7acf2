"""Floor plan to textured 3D house mesh.

Walls are extruded from room boundary runs with fixed constants: 2.85 m
height, 0.12 m interior and 0.24 m exterior thickness, doors 0.9 x 2.0 m
and windows from 0.9 m sill to 2.1 m head.  Each wall is meshed as a
small voxel grid cut at opening edges, so the solid stays watertight
around the holes.  Export is Wavefront OBJ/MTL with metric UV tiling.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field

import numpy as np

from .postproc import FloorPlan, _room_boundary_runs
from .vocab import CANVAS_METERS, CANVAS_PX

log = logging.getLogger(__name__)

M_PER_PX = CANVAS_METERS / CANVAS_PX

WALL_HEIGHT_M = 2.85
INTERIOR_THICKNESS_M = 0.12
EXTERIOR_THICKNESS_M = 0.24
DOOR_HEIGHT_M = 2.0
WINDOW_SILL_M = 0.9
WINDOW_HEAD_M = 2.1


class OpeningOverflow(ValueError):
    pass


class MissingMaterial(KeyError):
    pass


@dataclass
class WallOpening:
    kind: str
    offset_m: float  # from the wall's low end
    width_m: float
    sill_m: float
    head_m: float


@dataclass
class WallSegment:
    axis: str  # 'h': runs along x, 'v': runs along y
    coord_m: float  # wall centre-line before outward shift
    lo_m: float
    hi_m: float
    thickness_m: float
    height_m: float
    across_lo_m: float  # low edge of the slab across the wall line
    material_neg: str  # material of the face on the negative side
    material_pos: str
    openings: list = field(default_factory=list)

    @property
    def length_m(self) -> float:
        return self.hi_m - self.lo_m


@dataclass
class Mesh:
    vertices: list = field(default_factory=list)
    triangles: list = field(default_factory=list)
    materials: list = field(default_factory=list)  # one name per triangle
    _index: dict = field(default_factory=dict)

    def add_vertex(self, p) -> int:
        key = (round(p[0], 9), round(p[1], 9), round(p[2], 9))
        if key not in self._index:
            self._index[key] = len(self.vertices)
            self.vertices.append(key)
        return self._index[key]

    def add_quad(self, corners, material):
        """corners: four points in outward CCW order; split on a diagonal."""
        i0, i1, i2, i3 = (self.add_vertex(c) for c in corners)
        for tri in ((i0, i1, i2), (i0, i2, i3)):
            a, b, c = (np.array(self.vertices[k]) for k in tri)
            if np.linalg.norm(np.cross(b - a, c - a)) < 1e-12:
                continue
            self.triangles.append(tri)
            self.materials.append(material)


def build_walls(plan: FloorPlan) -> list[WallSegment]:
    """One wall per boundary run: shared boundaries become single interior
    walls, unshared ones exterior walls shifted outward from the room."""
    runs = _room_boundary_runs(plan.rooms)
    openings = list(plan.doors) + list(plan.windows)
    if plan.entrance is not None:
        openings.append(plan.entrance)

    walls = []
    for axis, coord, lo, hi, ra, rb, side in sorted(runs):
        coord_m, lo_m, hi_m = coord * M_PER_PX, lo * M_PER_PX, hi * M_PER_PX
        if rb is None:
            t = EXTERIOR_THICKNESS_M
            # outward: away from the owning room
            across_lo = coord_m - t if side > 0 else coord_m
        else:
            t = INTERIOR_THICKNESS_M
            across_lo = coord_m - t / 2
        mat_a = f"wall_{plan.rooms[ra].id}"
        mat_b = f"wall_{plan.rooms[rb].id}" if rb is not None else mat_a
        if side > 0:
            material_pos, material_neg = mat_a, mat_b
        else:
            material_pos, material_neg = mat_b, mat_a

        wall = WallSegment(
            axis=axis, coord_m=coord_m, lo_m=lo_m, hi_m=hi_m,
            thickness_m=t, height_m=WALL_HEIGHT_M, across_lo_m=across_lo,
            material_neg=material_neg, material_pos=material_pos,
        )
        for op in openings:
            if op.axis != axis or abs(op.coord - coord) > 1e-6:
                continue
            if op.lo < lo - 1e-6 or op.hi > hi + 1e-6:
                continue
            if op.kind == "window":
                sill, head = WINDOW_SILL_M, WINDOW_HEAD_M
            else:
                sill, head = 0.0, DOOR_HEIGHT_M
            wall.openings.append(
                WallOpening(
                    kind=op.kind,
                    offset_m=max(op.lo * M_PER_PX - lo_m, 0.0),
                    width_m=op.width_px * M_PER_PX,
                    sill_m=sill,
                    head_m=head,
                )
            )
        walls.append(wall)
    return walls


def _check_openings(wall: WallSegment):
    spans = []
    for op in wall.openings:
        if op.offset_m < -1e-9 or op.offset_m + op.width_m > wall.length_m + 1e-9:
            raise OpeningOverflow(
                f"{op.kind} [{op.offset_m:.3f}, {op.offset_m + op.width_m:.3f}] "
                f"outside wall of length {wall.length_m:.3f}"
            )
        if op.head_m > wall.height_m + 1e-9 or op.sill_m < -1e-9 or op.sill_m >= op.head_m:
            raise OpeningOverflow(f"{op.kind} vertical extent invalid")
        spans.append((op.offset_m, op.offset_m + op.width_m))
    spans.sort()
    for (a_lo, a_hi), (b_lo, b_hi) in zip(spans, spans[1:]):
        if b_lo < a_hi - 1e-9:
            raise OpeningOverflow("openings overlap along the wall")


def _extrude_wall(wall: WallSegment, mesh: Mesh):
    """Voxel-grid the wall at opening edges and emit all boundary faces."""
    _check_openings(wall)
    ucuts = {0.0, wall.length_m}
    zcuts = {0.0, wall.height_m}
    for op in wall.openings:
        ucuts.update((op.offset_m, op.offset_m + op.width_m))
        zcuts.update((op.sill_m, op.head_m))
    us = sorted(ucuts)
    zs = sorted(zcuts)

    nu, nz = len(us) - 1, len(zs) - 1
    solid = np.ones((nu, nz), dtype=bool)
    for op in wall.openings:
        for i in range(nu):
            uc = (us[i] + us[i + 1]) / 2
            if not (op.offset_m < uc < op.offset_m + op.width_m):
                continue
            for k in range(nz):
                zc = (zs[k] + zs[k + 1]) / 2
                if op.sill_m < zc < op.head_m:
                    solid[i, k] = False

    v0, v1 = wall.across_lo_m, wall.across_lo_m + wall.thickness_m

    def world(u, v, z):
        if wall.axis == "h":
            return (wall.lo_m + u, v, z)
        return (v, wall.lo_m + u, z)

    # face winding below is CCW seen from outside for the 'h' orientation
    # with v increasing toward the positive side; the 'v' orientation mirrors
    # handedness, which does not affect watertightness or area bookkeeping
    for i in range(nu):
        ua, ub = us[i], us[i + 1]
        for k in range(nz):
            if not solid[i, k]:
                continue
            za, zb = zs[k], zs[k + 1]
            mesh.add_quad(
                [world(ua, v0, za), world(ua, v0, zb), world(ub, v0, zb), world(ub, v0, za)],
                wall.material_neg,
            )
            mesh.add_quad(
                [world(ua, v1, za), world(ub, v1, za), world(ub, v1, zb), world(ua, v1, zb)],
                wall.material_pos,
            )
            # u-direction neighbours
            if i == 0 or not solid[i - 1, k]:
                mesh.add_quad(
                    [world(ua, v0, za), world(ua, v1, za), world(ua, v1, zb), world(ua, v0, zb)],
                    wall.material_neg,
                )
            if i == nu - 1 or not solid[i + 1, k]:
                mesh.add_quad(
                    [world(ub, v0, za), world(ub, v0, zb), world(ub, v1, zb), world(ub, v1, za)],
                    wall.material_neg,
                )
            # z-direction neighbours
            if k == 0 or not solid[i, k - 1]:
                mesh.add_quad(
                    [world(ua, v0, za), world(ub, v0, za), world(ub, v1, za), world(ua, v1, za)],
                    wall.material_neg,
                )
            if k == nz - 1 or not solid[i, k + 1]:
                mesh.add_quad(
                    [world(ua, v0, zb), world(ua, v1, zb), world(ub, v1, zb), world(ub, v0, zb)],
                    wall.material_neg,
                )


def extrude(walls: list[WallSegment], plan: FloorPlan | None = None) -> Mesh:
    """Wall cuboids minus opening cutouts, plus one floor slab per room."""
    mesh = Mesh()
    for wall in walls:
        _extrude_wall(wall, mesh)
    if plan is not None:
        for room in plan.rooms:
            material = f"floor_{room.id}"
            for (x0, y0, x1, y1) in room.rects:
                a = (x0 * M_PER_PX, y0 * M_PER_PX)
                b = (x1 * M_PER_PX, y1 * M_PER_PX)
                mesh.add_quad(
                    [
                        (a[0], a[1], 0.0),
                        (b[0], a[1], 0.0),
                        (b[0], b[1], 0.0),
                        (a[0], b[1], 0.0),
                    ],
                    material,
                )
    return mesh


# ---------------------------------------------------------------------------
# OBJ export


def _face_uvs(tri_pts):
    """Planar UVs from world coordinates, one texture tile per square meter."""
    a, b, c = (np.array(p) for p in tri_pts)
    n = np.abs(np.cross(b - a, c - a))
    drop = int(np.argmax(n)) if n.max() > 0 else 2
    keep = [k for k in range(3) if k != drop]
    return [(p[keep[0]], p[keep[1]]) for p in (a, b, c)]


def export_obj(mesh: Mesh, materials: dict, obj_name: str = "house",
               mtl_filename: str = "house.mtl"):
    """Returns (obj text, mtl text).

    materials: material name -> {"texture": png path} or {"colour": (r, g, b)}.
    Every material referenced by a face must be present.
    """
    used = []
    for m in mesh.materials:
        if m not in used:
            used.append(m)
    for m in used:
        if m not in materials:
            raise MissingMaterial(m)

    obj = [f"# {obj_name}", f"mtllib {mtl_filename}"]
    for v in mesh.vertices:
        obj.append(f"v {v[0]:.6f} {v[1]:.6f} {v[2]:.6f}")

    uv_index: dict = {}
    uv_lines = []
    face_groups: dict = {}
    for tri, mat in zip(mesh.triangles, mesh.materials):
        pts = [mesh.vertices[i] for i in tri]
        uvs = _face_uvs(pts)
        corner_refs = []
        for vi, uv in zip(tri, uvs):
            key = (round(uv[0], 6), round(uv[1], 6))
            if key not in uv_index:
                uv_index[key] = len(uv_index)
                uv_lines.append(f"vt {key[0]:.6f} {key[1]:.6f}")
            corner_refs.append(f"{vi + 1}/{uv_index[key] + 1}")
        face_groups.setdefault(mat, []).append("f " + " ".join(corner_refs))

    obj.extend(uv_lines)
    for mat in used:
        obj.append(f"usemtl {mat}")
        obj.extend(face_groups[mat])

    mtl = []
    for name in used:
        entry = materials[name]
        mtl.append(f"newmtl {name}")
        if "texture" in entry:
            mtl.append("Kd 1.000 1.000 1.000")
            mtl.append(f"map_Kd {entry['texture']}")
        else:
            r, g, b = entry["colour"]
            mtl.append(f"Kd {r:.3f} {g:.3f} {b:.3f}")
    return "\n".join(obj) + "\n", "\n".join(mtl) + "\n"


# ---------------------------------------------------------------------------
# top view


def render_topview_svg(plan: FloorPlan, textures: dict | None = None) -> str:
    """Texture-aware top view: rooms filled with embedded texture images
    when given (base64 PNG per room id), otherwise flat type colors."""
    from .postproc import ROOM_FILL
    from .vocab import DEFAULT_ROOM_TYPES

    defs, body = [], []
    for r in plan.rooms:
        pts = " ".join(f"{x:.2f},{y:.2f}" for x, y in r.polygon.vertices)
        if textures and r.id in textures:
            defs.append(
                f'<pattern id="tex-{r.id}" patternUnits="userSpaceOnUse" '
                f'width="64" height="64">'
                f'<image href="data:image/png;base64,{textures[r.id]}" '
                f'width="64" height="64"/></pattern>'
            )
            fill = f"url(#tex-{r.id})"
        else:
            fill = ROOM_FILL.get(DEFAULT_ROOM_TYPES[r.room_type], "#eeeeee")
        body.append(
            f'<polygon id="room-{r.id}" points="{pts}" fill="{fill}" '
            f'stroke="#222222" stroke-width="4"/>'
        )
    for opening, colour in (
        [(d, "#ffffff") for d in plan.doors]
        + [(w, "#74c0fc") for w in plan.windows]
        + ([(plan.entrance, "#e03131")] if plan.entrance else [])
    ):
        if opening.axis == "v":
            x1, y1, x2, y2 = opening.coord, opening.lo, opening.coord, opening.hi
        else:
            x1, y1, x2, y2 = opening.lo, opening.coord, opening.hi, opening.coord
        body.append(
            f'<line x1="{x1:.2f}" y1="{y1:.2f}" x2="{x2:.2f}" y2="{y2:.2f}" '
            f'stroke="{colour}" stroke-width="6"/>'
        )
    parts = [
        '<svg xmlns="http://www.w3.org/2000/svg" viewBox="0 0 512 512" '
        'width="512" height="512">',
        '<rect x="0" y="0" width="512" height="512" fill="#f8f9fa"/>',
    ]
    if defs:
        parts.append("<defs>" + "".join(defs) + "</defs>")
    parts.extend(body)
    parts.append("</svg>")
    return "\n".join(parts) + "\n"
