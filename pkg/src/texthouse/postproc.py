"""From a predicted box soup to a closed rectilinear floor plan.

Stages: box boundaries -> segment merging -> alignment (snapping to
weighted-mean wall lines) -> arrangement cells -> Gaussian-weight room
assignment -> rule-based doors, windows and entrance.

All geometry here lives on the 512 px canvas (512 px == 18 m).
"""

from __future__ import annotations

import json
import logging
import math
from dataclasses import dataclass, field

import numpy as np

from .layout import BBox
from .vocab import CANVAS_METERS, CANVAS_PX

log = logging.getLogger(__name__)

PX_PER_M = CANVAS_PX / CANVAS_METERS

DOOR_WIDTH_MM = 900
DOOR_HEIGHT_MM = 2000
WINDOW_WALL_FRACTION = 0.30
DEFAULT_TOL_PX = 4.0
DEFAULT_SNAP_PX = 8.0


class DegenerateLayout(ValueError):
    pass


class NoLivingRoom(ValueError):
    pass


class SharedWallTooShort(ValueError):
    def __init__(self, room_a, room_b, length_px):
        self.rooms = (room_a, room_b)
        super().__init__(
            f"shared wall between {room_a} and {room_b} is {length_px / PX_PER_M:.2f} m, "
            f"shorter than the door"
        )


@dataclass
class Segment:
    axis: str  # 'h' (fixed y) or 'v' (fixed x)
    coord: float
    lo: float
    hi: float

    @property
    def length(self) -> float:
        return self.hi - self.lo


@dataclass
class RectiPolygon:
    vertices: list  # [(x, y), ...] closed implicitly, CCW (positive shoelace)

    @property
    def area(self) -> float:
        return abs(self.signed_area)

    @property
    def signed_area(self) -> float:
        s = 0.0
        pts = self.vertices
        for i in range(len(pts)):
            x1, y1 = pts[i]
            x2, y2 = pts[(i + 1) % len(pts)]
            s += x1 * y2 - x2 * y1
        return s / 2.0

    def contains(self, x, y) -> bool:
        inside = False
        pts = self.vertices
        for i in range(len(pts)):
            x1, y1 = pts[i]
            x2, y2 = pts[(i + 1) % len(pts)]
            if (y1 > y) != (y2 > y):
                xc = x1 + (y - y1) / (y2 - y1) * (x2 - x1)
                if x < xc:
                    inside = not inside
        return inside

    def to_rects(self) -> list[tuple]:
        """Exact decomposition into axis-aligned rectangles via the vertex grid."""
        xs = sorted({p[0] for p in self.vertices})
        ys = sorted({p[1] for p in self.vertices})
        rects = []
        for i in range(len(xs) - 1):
            for j in range(len(ys) - 1):
                cx, cy = (xs[i] + xs[i + 1]) / 2, (ys[j] + ys[j + 1]) / 2
                if self.contains(cx, cy):
                    rects.append((xs[i], ys[j], xs[i + 1], ys[j + 1]))
        return rects


@dataclass
class GaussianWeightSpec:
    c_x: float
    c_y: float
    w: float
    h: float


@dataclass
class Opening:
    kind: str  # door | open_wall | window | entrance
    axis: str
    coord: float
    center: float  # along the wall, px
    width_px: float
    rooms: tuple  # (room_index, other_room_index_or_None)

    @property
    def lo(self):
        return self.center - self.width_px / 2

    @property
    def hi(self):
        return self.center + self.width_px / 2

    def to_dict(self):
        return {
            "kind": self.kind,
            "axis": self.axis,
            "coord": self.coord,
            "center": self.center,
            "width_mm": round(self.width_px / PX_PER_M * 1000),
            "rooms": list(self.rooms),
        }


@dataclass
class PlanRoom:
    id: str
    room_type: int
    polygon: RectiPolygon
    rects: list  # elementary rectangles, px

    @property
    def area(self) -> float:
        return sum((r[2] - r[0]) * (r[3] - r[1]) for r in self.rects)


@dataclass
class FloorPlan:
    rooms: list
    doors: list = field(default_factory=list)
    windows: list = field(default_factory=list)
    entrance: Opening | None = None

    def to_dict(self):
        return {
            "canvas_px": CANVAS_PX,
            "rooms": [
                {
                    "id": r.id,
                    "room_type": r.room_type,
                    "polygon": [list(p) for p in r.polygon.vertices],
                    "rects": [list(rc) for rc in r.rects],
                }
                for r in self.rooms
            ],
            "doors": [d.to_dict() for d in self.doors],
            "windows": [w.to_dict() for w in self.windows],
            "entrance": self.entrance.to_dict() if self.entrance else None,
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2, sort_keys=True)


# ---------------------------------------------------------------------------
# steps (a), (b), (c)


def extract_boundaries(boxes: list[BBox]) -> list[Segment]:
    """Four pixel-quantised boundary segments per box."""
    segs = []
    for b in boxes:
        x0, y0 = round(b.x0 * CANVAS_PX), round(b.y0 * CANVAS_PX)
        x1, y1 = round(b.x1 * CANVAS_PX), round(b.y1 * CANVAS_PX)
        segs.append(Segment("v", float(x0), float(y0), float(y1)))
        segs.append(Segment("v", float(x1), float(y0), float(y1)))
        segs.append(Segment("h", float(y0), float(x0), float(x1)))
        segs.append(Segment("h", float(y1), float(x0), float(x1)))
    return segs


def merge_segments(segs: list[Segment], tol_px: float = DEFAULT_TOL_PX) -> list[Segment]:
    """Union same-axis segments whose lines are within tol and whose spans
    overlap or touch; iterated to a fixpoint."""
    segs = [Segment(s.axis, s.coord, s.lo, s.hi) for s in segs]
    changed = True
    while changed:
        changed = False
        out: list[Segment] = []
        for s in segs:
            merged = False
            for t in out:
                if (
                    t.axis == s.axis
                    and abs(t.coord - s.coord) <= tol_px
                    and s.lo <= t.hi and s.hi >= t.lo
                ):
                    total = t.length + s.length
                    if total > 0:
                        t.coord = (t.coord * t.length + s.coord * s.length) / total
                    t.lo, t.hi = min(t.lo, s.lo), max(t.hi, s.hi)
                    merged = True
                    changed = True
                    break
            if not merged:
                out.append(s)
        segs = out
    return segs


def _cluster_coords(segs: list[Segment], snap_px: float) -> dict:
    """Single-linkage clusters of the fixed coordinates; returns
    {original coord id: snapped coord}, snapping to length-weighted means."""
    order = sorted(range(len(segs)), key=lambda i: segs[i].coord)
    snapped = {}
    cluster: list[int] = []

    def flush():
        if not cluster:
            return
        total = sum(segs[i].length for i in cluster)
        if total > 0:
            target = sum(segs[i].coord * segs[i].length for i in cluster) / total
        else:
            target = sum(segs[i].coord for i in cluster) / len(cluster)
        for i in cluster:
            snapped[i] = target

    for i in order:
        if cluster and segs[i].coord - segs[cluster[-1]].coord > snap_px:
            flush()
            cluster = []
        cluster.append(i)
    flush()
    return snapped


def align_segments(segs: list[Segment], snap_px: float = DEFAULT_SNAP_PX) -> list[Segment]:
    """Snap parallel walls onto shared lines and close the arrangement by
    snapping every endpoint to the nearest perpendicular line."""
    vs = [s for s in segs if s.axis == "v"]
    hs = [s for s in segs if s.axis == "h"]
    vsnap = _cluster_coords(vs, snap_px)
    hsnap = _cluster_coords(hs, snap_px)
    vlines = sorted(set(vsnap.values()))
    hlines = sorted(set(hsnap.values()))

    def nearest(lines, value):
        return min(lines, key=lambda c: abs(c - value)) if lines else value

    out = []
    for i, s in enumerate(vs):
        lo, hi = nearest(hlines, s.lo), nearest(hlines, s.hi)
        if hi > lo:
            out.append(Segment("v", vsnap[i], lo, hi))
    for i, s in enumerate(hs):
        lo, hi = nearest(vlines, s.lo), nearest(vlines, s.hi)
        if hi > lo:
            out.append(Segment("h", hsnap[i], lo, hi))
    return merge_segments(out, tol_px=0.0)


def snap_box(b: BBox, segs_after) -> tuple:
    """Snap a box's sides onto the nearest aligned wall lines (px coords)."""
    vlines = sorted({s.coord for s in segs_after if s.axis == "v"})
    hlines = sorted({s.coord for s in segs_after if s.axis == "h"})

    def nearest(lines, value):
        return min(lines, key=lambda c: abs(c - value)) if lines else value

    x0 = nearest(vlines, b.x0 * CANVAS_PX)
    x1 = nearest(vlines, b.x1 * CANVAS_PX)
    y0 = nearest(hlines, b.y0 * CANVAS_PX)
    y1 = nearest(hlines, b.y1 * CANVAS_PX)
    return (x0, y0, x1, y1)


# ---------------------------------------------------------------------------
# arrangement cells


class _Grid:
    """Elementary-cell arrangement of the aligned segments."""

    def __init__(self, segs: list[Segment], covered_boxes: list[tuple]):
        self.xs = sorted({s.coord for s in segs if s.axis == "v"})
        self.ys = sorted({s.coord for s in segs if s.axis == "h"})
        self.segs = segs
        self.covered = set()
        eps = 1e-9
        for i in range(len(self.xs) - 1):
            for j in range(len(self.ys) - 1):
                cx = (self.xs[i] + self.xs[i + 1]) / 2
                cy = (self.ys[j] + self.ys[j + 1]) / 2
                for (bx0, by0, bx1, by1) in covered_boxes:
                    if bx0 - eps < cx < bx1 + eps and by0 - eps < cy < by1 + eps:
                        self.covered.add((i, j))
                        break

    def _blocked_v(self, xi, j) -> bool:
        """Is the vertical edge at xs[xi] spanning ys[j]..ys[j+1] a wall?"""
        y0, y1 = self.ys[j], self.ys[j + 1]
        eps = 1e-6
        for s in self.segs:
            if s.axis == "v" and abs(s.coord - self.xs[xi]) < eps and s.lo <= y0 + eps and s.hi >= y1 - eps:
                return True
        return False

    def _blocked_h(self, yj, i) -> bool:
        x0, x1 = self.xs[i], self.xs[i + 1]
        eps = 1e-6
        for s in self.segs:
            if s.axis == "h" and abs(s.coord - self.ys[yj]) < eps and s.lo <= x0 + eps and s.hi >= x1 - eps:
                return True
        return False

    def regions(self) -> list[list]:
        """Connected covered cells not separated by walls; each returned as
        a list of (x0, y0, x1, y1) elementary rects."""
        seen = set()
        out = []
        for start in sorted(self.covered):
            if start in seen:
                continue
            stack = [start]
            seen.add(start)
            cells = []
            while stack:
                i, j = stack.pop()
                cells.append((i, j))
                for ni, nj, blocked in (
                    (i - 1, j, lambda: self._blocked_v(i, j)),
                    (i + 1, j, lambda: self._blocked_v(i + 1, j)),
                    (i, j - 1, lambda: self._blocked_h(j, i)),
                    (i, j + 1, lambda: self._blocked_h(j + 1, i)),
                ):
                    n = (ni, nj)
                    if n in self.covered and n not in seen and not blocked():
                        seen.add(n)
                        stack.append(n)
            rects = [
                (self.xs[i], self.ys[j], self.xs[i + 1], self.ys[j + 1]) for (i, j) in sorted(cells)
            ]
            out.append(rects)
        return out


def rects_to_polygon(rects: list[tuple]) -> RectiPolygon:
    """Outer boundary of a connected union of non-overlapping rectangles.

    Each rectangle's perimeter is emitted as directed unit edges with the
    interior on the left; shared edges cancel (they appear in both
    directions), what remains is the boundary.
    """
    xs = sorted({r[0] for r in rects} | {r[2] for r in rects})
    ys = sorted({r[1] for r in rects} | {r[3] for r in rects})

    directed = set()
    for (x0, y0, x1, y1) in rects:
        xc = [x for x in xs if x0 <= x <= x1]
        yc = [y for y in ys if y0 <= y <= y1]
        for k in range(len(xc) - 1):
            directed.add(((xc[k], y0), (xc[k + 1], y0)))
            directed.add(((xc[k + 1], y1), (xc[k], y1)))
        for k in range(len(yc) - 1):
            directed.add(((x1, yc[k]), (x1, yc[k + 1])))
            directed.add(((x0, yc[k + 1]), (x0, yc[k])))

    boundary = {e for e in directed if (e[1], e[0]) not in directed}
    if not boundary:
        raise DegenerateLayout("region has no boundary")

    outgoing: dict = {}
    for a, b in boundary:
        outgoing.setdefault(a, []).append(b)

    def turn_score(din, dout):
        cross = din[0] * dout[1] - din[1] * dout[0]
        dot = din[0] * dout[0] + din[1] * dout[1]
        if cross > 0:
            return 0  # left turn keeps the interior on the left
        if cross == 0 and dot > 0:
            return 1  # straight
        if cross < 0:
            return 2  # right turn
        return 3  # reversal

    loops = []
    remaining = set(boundary)
    while remaining:
        a, b = min(remaining)
        loop = [a, b]
        remaining.discard((a, b))
        prev, cur = a, b
        while cur != loop[0]:
            din = (cur[0] - prev[0], cur[1] - prev[1])
            nxts = [p for p in outgoing.get(cur, []) if (cur, p) in remaining]
            if not nxts:
                break
            nxt = min(nxts, key=lambda p: turn_score(din, (p[0] - cur[0], p[1] - cur[1])))
            remaining.discard((cur, nxt))
            loop.append(nxt)
            prev, cur = cur, nxt
        if loop[-1] == loop[0]:
            loop.pop()
        loops.append(loop)

    loop = max(loops, key=lambda lp: abs(RectiPolygon(lp).signed_area))
    # drop collinear midpoints
    cleaned = []
    n = len(loop)
    for i in range(n):
        px, py = loop[(i - 1) % n]
        cx, cy = loop[i]
        nx, ny = loop[(i + 1) % n]
        if (px == cx == nx) or (py == cy == ny):
            continue
        cleaned.append(loop[i])
    poly = RectiPolygon(cleaned)
    if poly.signed_area < 0:
        poly = RectiPolygon(list(reversed(cleaned)))
    return poly


# ---------------------------------------------------------------------------
# Eq-style Gaussian weight and assignment


def _rect_weight(spec: GaussianWeightSpec, x0, y0, x1, y1) -> float:
    ex = math.erf((x1 - spec.c_x) / spec.w) - math.erf((x0 - spec.c_x) / spec.w)
    ey = math.erf((y1 - spec.c_y) / spec.h) - math.erf((y0 - spec.c_y) / spec.h)
    return (math.pi / 4.0) * ex * ey


def polygon_weight(spec: GaussianWeightSpec, poly: RectiPolygon) -> float:
    """Integral of (1/(w h)) exp(-((x-cx)/w)^2 - ((y-cy)/h)^2) over the
    polygon, via exact rectangle decomposition and the error function."""
    return sum(_rect_weight(spec, *r) for r in poly.to_rects())


def rects_weight(spec: GaussianWeightSpec, rects) -> float:
    return sum(_rect_weight(spec, *r) for r in rects)


def assign_polygons(cells: list[RectiPolygon], boxes: list[tuple]) -> list[tuple]:
    """Assign each cell to the box with maximum Gaussian weight.

    boxes: list of ((x0, y0, x1, y1) px, room_key); ties break on the
    smallest room index.  Returns [(cell, room_key), ...].
    """
    specs = []
    for (x0, y0, x1, y1), _room in boxes:
        specs.append(
            GaussianWeightSpec(
                c_x=(x0 + x1) / 2,
                c_y=(y0 + y1) / 2,
                w=max((x1 - x0) / 2, 1e-6),
                h=max((y1 - y0) / 2, 1e-6),
            )
        )
    out = []
    for cell in cells:
        weights = [polygon_weight(spec, cell) for spec in specs]
        best = int(np.argmax(weights))  # argmax returns the first maximum
        out.append((cell, boxes[best][1]))
    return out


# ---------------------------------------------------------------------------
# step (e): openings


def _room_boundary_runs(rooms: list[PlanRoom]):
    """Boundary edges of every room, fused into maximal runs.

    Returns tuples (axis, coord, lo, hi, room_index,
    neighbour_index_or_None, side) where side is +1 when the owning room
    lies on the positive side of the wall line and -1 otherwise.
    """
    xs = sorted({v for r in rooms for rect in r.rects for v in (rect[0], rect[2])})
    ys = sorted({v for r in rooms for rect in r.rects for v in (rect[1], rect[3])})

    # unit edge -> owning rooms on each side
    owner: dict = {}
    for ri, room in enumerate(rooms):
        for (x0, y0, x1, y1) in room.rects:
            xcuts = [x for x in xs if x0 <= x <= x1]
            ycuts = [y for y in ys if y0 <= y <= y1]
            # a rect's low edge has the rect on the positive side of the line
            for k in range(len(ycuts) - 1):
                owner.setdefault(("v", x0, ycuts[k], ycuts[k + 1]), []).append((ri, 1))
                owner.setdefault(("v", x1, ycuts[k], ycuts[k + 1]), []).append((ri, -1))
            for k in range(len(xcuts) - 1):
                owner.setdefault(("h", y0, xcuts[k], xcuts[k + 1]), []).append((ri, 1))
                owner.setdefault(("h", y1, xcuts[k], xcuts[k + 1]), []).append((ri, -1))

    # for each unit edge: owning rooms (interior edges within one room occur
    # twice for the same room and are dropped)
    unit_edges = []
    for key, occupants in owner.items():
        room_ids = sorted({ri for ri, _side in occupants})
        if len(room_ids) == 1:
            if len({side for _ri, side in occupants}) == 2:
                continue  # interior to the room
            unit_edges.append((key, room_ids[0], None, occupants[0][1]))
        else:
            side_a = next(side for ri, side in occupants if ri == room_ids[0])
            unit_edges.append((key, room_ids[0], room_ids[1], side_a))

    # fuse collinear unit edges with identical (room, neighbour)
    runs = []
    by_line: dict = {}
    for (axis, coord, lo, hi), ra, rb, side in unit_edges:
        by_line.setdefault((axis, coord, ra, rb, side), []).append((lo, hi))
    for (axis, coord, ra, rb, side), spans in by_line.items():
        spans.sort()
        cur_lo, cur_hi = spans[0]
        for lo, hi in spans[1:]:
            if lo <= cur_hi + 1e-9:
                cur_hi = max(cur_hi, hi)
            else:
                runs.append((axis, coord, cur_lo, cur_hi, ra, rb, side))
                cur_lo, cur_hi = lo, hi
        runs.append((axis, coord, cur_lo, cur_hi, ra, rb, side))
    return runs


def add_openings(rooms: list[PlanRoom], vocab_room_types) -> FloorPlan:
    """Doors between the living room and each wall-sharing room, a window
    per room on its longest exterior wall, an entrance on the biggest
    living room."""
    living = [i for i, r in enumerate(rooms) if vocab_room_types[r.room_type] == "livingroom"]
    if not living:
        raise NoLivingRoom("plan has no living room")
    biggest_living = max(living, key=lambda i: rooms[i].area)

    runs = _room_boundary_runs(rooms)
    door_px = DOOR_WIDTH_MM / 1000 * PX_PER_M

    plan = FloorPlan(rooms=rooms)

    # doors / open walls: living room vs every adjacent room
    for lr in living:
        partners: dict = {}
        for axis, coord, lo, hi, ra, rb, _side in runs:
            if rb is None:
                continue
            if lr in (ra, rb):
                other = rb if ra == lr else ra
                if vocab_room_types[rooms[other].room_type] == "livingroom" and other < lr:
                    continue  # handled from the other living room's side
                best = partners.get(other)
                if best is None or hi - lo > best[3] - best[2]:
                    partners[other] = (axis, coord, lo, hi)
        for other, (axis, coord, lo, hi) in sorted(partners.items()):
            length = hi - lo
            if length >= door_px:
                plan.doors.append(
                    Opening("door", axis, coord, (lo + hi) / 2, door_px, (lr, other))
                )
            elif length > 0:
                # too short for a door: open the whole shared wall
                plan.doors.append(
                    Opening("open_wall", axis, coord, (lo + hi) / 2, length, (lr, other))
                )
            else:
                raise SharedWallTooShort(rooms[lr].id, rooms[other].id, length)

    # entrance: longest exterior wall of the biggest living room (any wall
    # as a fallback when it is fully interior)
    candidates = [r for r in runs if r[4] == biggest_living and r[5] is None]
    if not candidates:
        candidates = [r for r in runs if biggest_living in (r[4], r[5])]
    axis, coord, lo, hi, *_ = max(candidates, key=lambda r: r[3] - r[2])
    width = min(door_px, hi - lo)
    plan.entrance = Opening("entrance", axis, coord, (lo + hi) / 2, width, (biggest_living, None))
    entrance_wall = (axis, coord, lo, hi)

    # windows: longest exterior wall per room, skipping the entrance wall
    for ri, room in enumerate(rooms):
        ext = [
            r
            for r in runs
            if r[4] == ri and r[5] is None and (ri != biggest_living or (r[0], r[1], r[2], r[3]) != entrance_wall)
        ]
        if not ext:
            log.info("room %s has no exterior wall, window skipped", room.id)
            continue
        axis, coord, lo, hi, *_ = max(ext, key=lambda r: r[3] - r[2])
        width = (hi - lo) * WINDOW_WALL_FRACTION
        plan.windows.append(Opening("window", axis, coord, (lo + hi) / 2, width, (ri, None)))

    return plan


# ---------------------------------------------------------------------------
# full pipeline


def boxes_to_plan(boxes: list[BBox], room_specs, vocab, tol_px=DEFAULT_TOL_PX, snap_px=DEFAULT_SNAP_PX) -> FloorPlan:
    """Run steps (a)-(e) on clamped predicted boxes with room identities."""
    segs = extract_boundaries(boxes)
    merged = merge_segments(segs, tol_px)
    aligned = align_segments(merged, snap_px)

    snapped_boxes = []
    for b in boxes:
        sb = snap_box(b, aligned)
        if sb[2] - sb[0] <= 0 or sb[3] - sb[1] <= 0:
            raise DegenerateLayout(f"box collapsed by snapping: {sb}")
        snapped_boxes.append(sb)

    grid = _Grid(aligned, snapped_boxes)
    regions = grid.regions()
    if not regions:
        raise DegenerateLayout("no cells in arrangement")

    cells = [rects_to_polygon(r) for r in regions]
    assignment = assign_polygons(cells, [(sb, i) for i, sb in enumerate(snapped_boxes)])

    per_room_rects: dict = {}
    for region_rects, (cell, room_idx) in zip(regions, assignment):
        per_room_rects.setdefault(room_idx, []).extend(region_rects)

    rooms = []
    for room_idx in sorted(per_room_rects):
        spec = room_specs[room_idx]
        # a room keeps only its largest connected piece; stray cells that
        # ended up disconnected are left out of the plan
        rects = _largest_component(per_room_rects[room_idx])
        poly = rects_to_polygon(rects)
        rooms.append(PlanRoom(id=spec.id, room_type=spec.room_type, polygon=poly, rects=rects))

    return add_openings(rooms, vocab.room_types)


def _largest_component(rects: list[tuple]) -> list[tuple]:
    """Connected component of the rect union with the largest area."""
    n = len(rects)
    parent = list(range(n))

    def find(i):
        while parent[i] != i:
            parent[i] = parent[parent[i]]
            i = parent[i]
        return i

    def touch(a, b):
        ax0, ay0, ax1, ay1 = a
        bx0, by0, bx1, by1 = b
        if ax1 < bx0 or bx1 < ax0 or ay1 < by0 or by1 < ay0:
            return False
        # sharing a positive-length edge, not just a corner
        ox = min(ax1, bx1) - max(ax0, bx0)
        oy = min(ay1, by1) - max(ay0, by0)
        return (ox > 0 and oy >= 0) or (oy > 0 and ox >= 0)

    for i in range(n):
        for j in range(i + 1, n):
            if touch(rects[i], rects[j]):
                parent[find(i)] = find(j)
    groups: dict = {}
    for i in range(n):
        groups.setdefault(find(i), []).append(rects[i])
    return max(groups.values(), key=lambda g: sum((r[2] - r[0]) * (r[3] - r[1]) for r in g))


# ---------------------------------------------------------------------------
# SVG


ROOM_FILL = {
    "washroom": "#9ecae1",
    "bedroom": "#fdd0a2",
    "livingroom": "#a1d99b",
    "kitchen": "#fcbba1",
    "balcony": "#c7e9c0",
    "study": "#bcbddc",
    "storage": "#d9d9d9",
}


def render_plan_svg(plan: FloorPlan, vocab) -> str:
    """Deterministic SVG: one path per room, openings as overlays."""
    lines = [
        '<svg xmlns="http://www.w3.org/2000/svg" viewBox="0 0 512 512" '
        'width="512" height="512">',
        '<rect x="0" y="0" width="512" height="512" fill="#ffffff"/>',
    ]
    for r in plan.rooms:
        fill = ROOM_FILL.get(vocab.room_types[r.room_type], "#eeeeee")
        pts = " ".join(f"{x:.2f},{y:.2f}" for x, y in r.polygon.vertices)
        lines.append(
            f'<polygon id="room-{r.id}" points="{pts}" fill="{fill}" '
            f'stroke="#333333" stroke-width="3"/>'
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
        lines.append(
            f'<line x1="{x1:.2f}" y1="{y1:.2f}" x2="{x2:.2f}" y2="{y2:.2f}" '
            f'stroke="{colour}" stroke-width="5"/>'
        )
    for r in plan.rooms:
        cx = sum(p[0] for p in r.polygon.vertices) / len(r.polygon.vertices)
        cy = sum(p[1] for p in r.polygon.vertices) / len(r.polygon.vertices)
        lines.append(
            f'<text x="{cx:.2f}" y="{cy:.2f}" font-size="14" text-anchor="middle" '
            f'fill="#111111">{r.id}</text>'
        )
    lines.append("</svg>")
    return "\n".join(lines) + "\n"
