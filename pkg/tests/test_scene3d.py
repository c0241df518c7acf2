import numpy as np
import pytest

from texthouse import dataset as ds
from texthouse import postproc as pp
from texthouse import scene3d as s3
from texthouse.vocab import Vocabularies

VOCAB = Vocabularies()


def two_room_plan(with_openings=False):
    """Two rooms side by side across x=256, canvas-filling."""
    left = pp.PlanRoom(
        id="livingroom1",
        room_type=VOCAB.room_types.index("livingroom"),
        polygon=pp.rects_to_polygon([(0, 0, 256, 512)]),
        rects=[(0, 0, 256, 512)],
    )
    right = pp.PlanRoom(
        id="bedroom1",
        room_type=VOCAB.room_types.index("bedroom"),
        polygon=pp.rects_to_polygon([(256, 0, 512, 512)]),
        rects=[(256, 0, 512, 512)],
    )
    if with_openings:
        return pp.add_openings([left, right], VOCAB.room_types)
    return pp.FloorPlan(rooms=[left, right])


def full_plan(seed=0, n_rooms=5):
    house = ds.generate_layout(n_rooms, seed=seed)
    return pp.boxes_to_plan(house.gt_boxes, house.spec.rooms, VOCAB)


def material_table(plan):
    out = {}
    for r in plan.rooms:
        out[f"wall_{r.id}"] = {"colour": (0.8, 0.8, 0.8)}
        out[f"floor_{r.id}"] = {"colour": (0.5, 0.4, 0.3)}
    return out


def edge_counts(mesh):
    counts = {}
    for tri in mesh.triangles:
        for a, b in ((tri[0], tri[1]), (tri[1], tri[2]), (tri[2], tri[0])):
            key = (min(a, b), max(a, b))
            counts[key] = counts.get(key, 0) + 1
    return counts


def parse_obj(text):
    """Minimal independent OBJ reader used as a round-trip oracle."""
    verts, uvs, faces = [], [], []
    material = None
    for line in text.splitlines():
        parts = line.split()
        if not parts:
            continue
        if parts[0] == "v":
            verts.append(tuple(float(x) for x in parts[1:4]))
        elif parts[0] == "vt":
            uvs.append(tuple(float(x) for x in parts[1:3]))
        elif parts[0] == "usemtl":
            material = parts[1]
        elif parts[0] == "f":
            refs = [tuple(int(t) for t in p.split("/")) for p in parts[1:]]
            faces.append((refs, material))
    return verts, uvs, faces


# ---------------------------------------------------------------------------
# walls


def test_shared_boundary_yields_single_interior_wall():
    plan = two_room_plan()
    walls = s3.build_walls(plan)
    interior = [w for w in walls if w.thickness_m == s3.INTERIOR_THICKNESS_M]
    assert len(interior) == 1
    w = interior[0]
    assert w.axis == "v"
    assert w.coord_m == pytest.approx(256 * 18 / 512)
    # centred on the boundary
    assert w.across_lo_m == pytest.approx(w.coord_m - 0.06)


def test_exterior_walls_thick_and_outward():
    plan = two_room_plan()
    walls = s3.build_walls(plan)
    exterior = [w for w in walls if w.thickness_m == s3.EXTERIOR_THICKNESS_M]
    assert len(exterior) == 6  # 3 sides per room
    for w in exterior:
        # the slab sits entirely outside the canvas, preserving room areas
        outside_low = w.across_lo_m == pytest.approx(-s3.EXTERIOR_THICKNESS_M)
        outside_high = w.across_lo_m == pytest.approx(18.0)
        assert outside_low or outside_high


def test_wall_lengths_in_meters():
    plan = two_room_plan()
    walls = s3.build_walls(plan)
    full_span = [w for w in walls if w.length_m == pytest.approx(18.0)]
    assert full_span  # the 512 px sides map to 18 m


def test_openings_transferred():
    plan = two_room_plan(with_openings=True)
    walls = s3.build_walls(plan)
    kinds = sorted(op.kind for w in walls for op in w.openings)
    assert "door" in kinds
    assert "entrance" in kinds
    assert "window" in kinds
    for w in walls:
        for op in w.openings:
            if op.kind in ("door", "entrance"):
                assert op.sill_m == 0.0 and op.head_m == s3.DOOR_HEIGHT_M
            else:
                assert op.sill_m == s3.WINDOW_SILL_M and op.head_m == s3.WINDOW_HEAD_M


# ---------------------------------------------------------------------------
# extrusion


def solid_wall(length=4.0):
    return s3.WallSegment(
        axis="h", coord_m=0.0, lo_m=0.0, hi_m=length, thickness_m=0.24,
        height_m=s3.WALL_HEIGHT_M, across_lo_m=0.0,
        material_neg="wall_a", material_pos="wall_a",
    )


def test_solid_wall_is_a_cuboid():
    mesh = s3.extrude([solid_wall()])
    assert len(mesh.vertices) == 8
    assert len(mesh.triangles) == 12
    counts = edge_counts(mesh)
    assert all(c == 2 for c in counts.values())


def test_wall_with_door_watertight_and_area():
    wall = solid_wall(4.0)
    wall.openings.append(s3.WallOpening("door", 1.5, 0.9, 0.0, 2.0))
    mesh = s3.extrude([wall])
    counts = edge_counts(mesh)
    assert all(c == 2 for c in counts.values())
    # big-face area per side = solid area - door area
    side_area = 0.0
    for tri in mesh.triangles:
        a, b, c = (np.array(mesh.vertices[i]) for i in tri)
        if a[1] == b[1] == c[1] == 0.0:
            side_area += 0.5 * np.linalg.norm(np.cross(b - a, c - a))
    assert side_area == pytest.approx(4.0 * s3.WALL_HEIGHT_M - 0.9 * 2.0)


def test_wall_with_window_watertight():
    wall = solid_wall(5.0)
    wall.openings.append(s3.WallOpening("window", 2.0, 1.5, 0.9, 2.1))
    mesh = s3.extrude([wall])
    assert all(c == 2 for c in edge_counts(mesh).values())
    zs = [v[2] for v in mesh.vertices]
    assert min(zs) == 0.0 and max(zs) == pytest.approx(s3.WALL_HEIGHT_M)


def test_opening_overflow_detected():
    wall = solid_wall(2.0)
    wall.openings.append(s3.WallOpening("door", 1.5, 0.9, 0.0, 2.0))
    with pytest.raises(s3.OpeningOverflow):
        s3.extrude([wall])

    tall = solid_wall(4.0)
    tall.openings.append(s3.WallOpening("window", 1.0, 1.0, 0.9, 3.5))
    with pytest.raises(s3.OpeningOverflow):
        s3.extrude([tall])

    overlapping = solid_wall(4.0)
    overlapping.openings.append(s3.WallOpening("door", 1.0, 0.9, 0.0, 2.0))
    overlapping.openings.append(s3.WallOpening("door", 1.5, 0.9, 0.0, 2.0))
    with pytest.raises(s3.OpeningOverflow):
        s3.extrude([overlapping])


def test_full_plan_mesh_bounds_and_floor_area():
    plan = full_plan(seed=1, n_rooms=5)
    walls = s3.build_walls(plan)
    mesh = s3.extrude(walls, plan)
    verts = np.array(mesh.vertices)
    assert verts[:, 2].min() >= 0.0
    assert verts[:, 2].max() <= s3.WALL_HEIGHT_M + 1e-9
    lo, hi = -s3.EXTERIOR_THICKNESS_M, 18.0 + s3.EXTERIOR_THICKNESS_M
    assert verts[:, 0].min() >= lo - 1e-9 and verts[:, 0].max() <= hi + 1e-9
    assert verts[:, 1].min() >= lo - 1e-9 and verts[:, 1].max() <= hi + 1e-9

    floor_area = 0.0
    for tri, mat in zip(mesh.triangles, mesh.materials):
        if mat.startswith("floor_"):
            a, b, c = (np.array(mesh.vertices[i]) for i in tri)
            floor_area += 0.5 * np.linalg.norm(np.cross(b - a, c - a))
    poly_area = sum(r.polygon.area for r in plan.rooms) * s3.M_PER_PX**2
    assert floor_area == pytest.approx(poly_area, abs=1e-6)


def test_every_wall_watertight_in_full_plan():
    plan = full_plan(seed=3, n_rooms=6)
    for wall in s3.build_walls(plan):
        mesh = s3.Mesh()
        s3._extrude_wall(wall, mesh)
        assert all(c == 2 for c in edge_counts(mesh).values()), wall


# ---------------------------------------------------------------------------
# export


def test_export_empty_mesh():
    obj, mtl = s3.export_obj(s3.Mesh(), {})
    assert obj.startswith("#")
    assert "mtllib" in obj
    assert "\nv " not in obj and "\nf " not in obj


def test_export_cuboid_counts():
    mesh = s3.extrude([solid_wall()])
    obj, mtl = s3.export_obj(mesh, {"wall_a": {"colour": (1, 1, 1)}})
    verts, uvs, faces = parse_obj(obj)
    assert len(verts) == 8
    assert len(faces) == 12
    assert "newmtl wall_a" in mtl


def test_export_missing_material():
    mesh = s3.extrude([solid_wall()])
    with pytest.raises(s3.MissingMaterial):
        s3.export_obj(mesh, {})


def test_obj_roundtrip_full_plan(tmp_path):
    plan = full_plan(seed=2, n_rooms=4)
    walls = s3.build_walls(plan)
    mesh = s3.extrude(walls, plan)
    mats = material_table(plan)
    mats["wall_livingroom1"] = {"texture": "wall_livingroom1.png"}
    obj, mtl = s3.export_obj(mesh, mats)
    verts, uvs, faces = parse_obj(obj)
    assert len(verts) == len(mesh.vertices)
    assert len(faces) == len(mesh.triangles)
    assert "map_Kd wall_livingroom1.png" in mtl
    # every face's material matches the mesh's assignment
    by_material = {}
    for refs, mat in faces:
        by_material[mat] = by_material.get(mat, 0) + 1
    expected = {}
    for m in mesh.materials:
        expected[m] = expected.get(m, 0) + 1
    assert by_material == expected
    # all index references in range
    for refs, _ in faces:
        for vi, ti in refs:
            assert 1 <= vi <= len(verts)
            assert 1 <= ti <= len(uvs)


def test_export_deterministic():
    plan = full_plan(seed=2, n_rooms=4)
    mesh1 = s3.extrude(s3.build_walls(plan), plan)
    mesh2 = s3.extrude(s3.build_walls(plan), plan)
    o1, m1 = s3.export_obj(mesh1, material_table(plan))
    o2, m2 = s3.export_obj(mesh2, material_table(plan))
    assert o1 == o2 and m1 == m2


# ---------------------------------------------------------------------------
# top view


def test_topview_svg():
    plan = full_plan(seed=0, n_rooms=4)
    svg = s3.render_topview_svg(plan)
    assert svg == s3.render_topview_svg(plan)
    assert 'viewBox="0 0 512 512"' in svg
    assert svg.count("<polygon") == len(plan.rooms)


def test_topview_svg_with_textures():
    plan = full_plan(seed=0, n_rooms=4)
    rid = plan.rooms[0].id
    svg = s3.render_topview_svg(plan, {rid: "aGVsbG8="})
    assert f'id="tex-{rid}"' in svg
    assert "base64,aGVsbG8=" in svg
