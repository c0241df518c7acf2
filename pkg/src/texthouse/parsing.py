"""Rule-based parsing of house descriptions into scene graphs and specs.

The description corpus is template-derived, so a fixed set of sentence
patterns covers it: an inventory sentence, size/position sentences,
adjacency sentences and floor/wall texture sentences.  Parsing goes in
two stages: text -> SceneGraph (objects with attribute sets plus
relations) -> HouseSpec (typed rooms plus an adjacency pair set).
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field, replace

import numpy as np

from .vocab import CANVAS_AREA_SQM, Vocabularies


class ParseError(ValueError):
    pass


class UnparsableSentence(ParseError):
    def __init__(self, index: int, sentence: str):
        self.index = index
        self.sentence = sentence
        super().__init__(f"sentence {index} matches no known pattern: {sentence!r}")


class MissingAttribute(ParseError):
    def __init__(self, room: str, kind: str):
        self.room = room
        self.kind = kind
        super().__init__(f"room {room!r} is missing its {kind}")


class UnknownWord(ParseError):
    def __init__(self, word: str):
        self.word = word
        super().__init__(f"{word!r} is in neither the material nor the colour vocabulary")


@dataclass
class SceneNode:
    object: str
    attributes: set = field(default_factory=set)


@dataclass
class SceneEdge:
    subject: str
    relation: str
    object: str | None


@dataclass
class SceneGraph:
    nodes: list
    edges: list

    def node(self, identifier: str) -> SceneNode | None:
        for n in self.nodes:
            if n.object == identifier:
                return n
        return None


@dataclass
class RoomSpec:
    id: str
    room_type: int
    position: int
    size_sqm: float
    floor_material: int | None = None
    floor_colour: int | None = None
    wall_material: int | None = None
    wall_colour: int | None = None


@dataclass
class HouseSpec:
    rooms: list
    adjacency: set  # of (i, j) with i < j

    def to_dict(self) -> dict:
        return {
            "rooms": [vars(r).copy() for r in self.rooms],
            "adjacency": sorted(list(p) for p in self.adjacency),
        }

    @classmethod
    def from_dict(cls, d: dict) -> "HouseSpec":
        rooms = [RoomSpec(**r) for r in d["rooms"]]
        adjacency = {tuple(sorted(p)) for p in d["adjacency"]}
        return cls(rooms=rooms, adjacency=adjacency)


@dataclass
class TextureCondition:
    p: np.ndarray  # material one-hot, 19 entries
    q: np.ndarray  # colour one-hot, 12 entries


_CONNECTIVES = (
    "specifically",
    "to be specific",
    "more specifically",
    "in practice",
    "besides",
    "moreover",
    "additionally",
    "in addition",
    "also",
    "furthermore",
)

_WORD = r"[A-Za-z_]+"


def _split_sentences(text: str) -> list[str]:
    parts = [p.strip() for p in text.replace("\n", " ").split(".")]
    out = []
    for p in parts:
        if not p:
            continue
        low = p.lower()
        for c in _CONNECTIVES:
            if low.startswith(c + ","):
                p = p[len(c) + 1 :].strip()
                break
            if low.startswith(c + " "):
                p = p[len(c) + 1 :].strip()
                break
        out.append(p)
    return out


def _split_id_list(blob: str) -> list[str]:
    blob = blob.replace(" and ", ", ")
    return [t.strip() for t in blob.split(",") if t.strip()]


class _Patterns:
    """Compiled sentence patterns for one vocabulary."""

    def __init__(self, vocab: Vocabularies):
        types = "|".join(re.escape(t) for t in vocab.room_types)
        pos = "|".join(re.escape(p) for p in vocab.positions)
        rid = rf"(?:{types})\d+"
        self.room_id = re.compile(rf"\b({rid})\b")
        self.inventory = re.compile(
            rf"^the\s+(?:building|house|home)(?:\s+(?:plan|layout))?\s+"
            rf"(?:contains|has|includes)\s+.*(?:{types})",
            re.IGNORECASE,
        )
        self.size_pos = [
            re.compile(rf"^({rid}) has (\d+) squares? in ({pos})$"),
            re.compile(rf"^({rid}) has (\d+) square meters? in ({pos})$"),
            re.compile(rf"^({rid}) covers (\d+) square meters? located in ({pos})$"),
            re.compile(rf"^({rid}) is in ({pos}) with (\d+) square meters?$"),
        ]
        self.adjacent = re.compile(rf"^({rid}) is (next|adjacent) to ((?:{rid}(?:,? and |, )?)+)$")
        self.connected = re.compile(rf"^((?:{rid}(?:,? and |, )?)+) are connected$")
        surface = r"(floor|wall)"
        w = rf"({_WORD})"
        self.texture_clauses = [
            # "washroom1 has Blue Marble floor" / "has Orange Pure_Color_Wood wall"
            re.compile(rf"^(?:({rid}) )?has {w} {w} {surface}$"),
            # "livingroom1 wall is Earth_color Wall_Cloth" / "wall is Wall_Cloth and White"
            re.compile(rf"^(?:({rid}) )?{surface} is {w}(?: and | ){w}$"),
            # "floor of livingroom1 is Wood_Grain and Wood_color"
            re.compile(rf"^{surface} of ({rid}) is {w}(?: and | ){w}$"),
            # "bedroom1 uses Black Log for floor"
            re.compile(rf"^(?:({rid}) )?uses {w} {w} for {surface}$"),
        ]


_CLAUSE_SPLIT = re.compile(r", and | as well as | while |; ")


def _parse_texture_sentence(sentence: str, pats: _Patterns):
    """Return [(room_id_or_None, surface, word1, word2), ...] or None."""
    clauses = _CLAUSE_SPLIT.split(sentence)
    results = []
    for clause in clauses:
        clause = clause.strip().rstrip(",")
        hit = None
        for k, rx in enumerate(pats.texture_clauses):
            m = rx.match(clause)
            if not m:
                continue
            g = m.groups()
            if k == 0:
                hit = (g[0], g[3], g[1], g[2])
            elif k == 1:
                hit = (g[0], g[1], g[2], g[3])
            elif k == 2:
                hit = (g[1], g[0], g[2], g[3])
            else:
                hit = (g[0], g[3], g[1], g[2])
            break
        if hit is None:
            return None
        results.append(hit)
    return results


def parse_scene_graph(text: str, vocab: Vocabularies | None = None) -> SceneGraph:
    """Parse a description into a scene graph.

    Room mentions become nodes (merged by identifier, attribute-set
    union); floor/wall descriptions become satellite nodes linked by
    "has" edges; adjacency phrasings become room-to-room edges.
    Sentences that match no pattern and mention no room are ignored.
    """
    if vocab is None:
        vocab = Vocabularies()
    if not text.strip():
        raise ParseError("empty description")
    pats = _Patterns(vocab)

    nodes: list[SceneNode] = []
    index: dict[str, SceneNode] = {}
    edges: list[SceneEdge] = []

    def get_node(identifier: str) -> SceneNode:
        if identifier not in index:
            node = SceneNode(object=identifier)
            index[identifier] = node
            nodes.append(node)
        return index[identifier]

    for i, sentence in enumerate(_split_sentences(text)):
        if pats.inventory.match(sentence):
            continue

        matched = False
        for rx in pats.size_pos:
            m = rx.match(sentence)
            if m:
                g = m.groups()
                if rx.pattern.startswith("^(" ) and " is in " in rx.pattern:
                    rid, posw, size = g
                else:
                    rid, size, posw = g
                node = get_node(rid)
                node.attributes.add(posw)
                node.attributes.add(f"{size} squares")
                matched = True
                break
        if matched:
            continue

        m = pats.adjacent.match(sentence)
        if m:
            subj = get_node(m.group(1))
            relation = "is " + m.group(2)
            for other in _split_id_list(m.group(3)):
                edges.append(SceneEdge(subject=subj.object, relation=relation, object=get_node(other).object))
            continue

        m = pats.connected.match(sentence)
        if m:
            ids = _split_id_list(m.group(1))
            for a_i in range(len(ids)):
                for b_i in range(a_i + 1, len(ids)):
                    edges.append(
                        SceneEdge(
                            subject=get_node(ids[a_i]).object,
                            relation="are connected",
                            object=get_node(ids[b_i]).object,
                        )
                    )
            continue

        tex = _parse_texture_sentence(sentence, pats)
        if tex is not None:
            subject = None
            for rid, surface, w1, w2 in tex:
                if rid is not None:
                    subject = rid
                if subject is None:
                    raise UnparsableSentence(i, sentence)
                room = get_node(subject)
                sat = get_node(f"{subject}:{surface}")
                sat.attributes.update((w1, w2))
                if not any(e.subject == room.object and e.object == sat.object for e in edges):
                    edges.append(SceneEdge(subject=room.object, relation="has", object=sat.object))
            continue

        if pats.room_id.search(sentence):
            raise UnparsableSentence(i, sentence)
        # filler sentence: skipped

    return SceneGraph(nodes=nodes, edges=edges)


_SIZE_ATTR = re.compile(r"^(\d+) squares?$")


def extract_house_spec(graph: SceneGraph, vocab: Vocabularies | None = None) -> HouseSpec:
    """Reduce a scene graph to the ordered room list plus adjacency pairs."""
    if vocab is None:
        vocab = Vocabularies()
    type_rx = re.compile(r"^(" + "|".join(re.escape(t) for t in vocab.room_types) + r")\d+$")

    room_nodes = [n for n in graph.nodes if type_rx.match(n.object)]
    order = {n.object: i for i, n in enumerate(room_nodes)}

    rooms = []
    for node in room_nodes:
        room_type = vocab.room_type_index(type_rx.match(node.object).group(1))
        position = None
        size = None
        for attr in node.attributes:
            if attr in vocab.positions:
                position = vocab.position_index(attr)
                continue
            m = _SIZE_ATTR.match(attr)
            if m:
                size = float(m.group(1))
        if position is None:
            raise MissingAttribute(node.object, "position")
        if size is None or size <= 0:
            raise MissingAttribute(node.object, "size")

        tex: dict[str, tuple[int, int]] = {}
        for surface in ("floor", "wall"):
            sat = graph.node(f"{node.object}:{surface}")
            if sat is None:
                continue
            material = colour = None
            for word in sat.attributes:
                if vocab.is_material(word):
                    material = vocab.material_index(word)
                elif vocab.is_colour(word):
                    colour = vocab.colour_index(word)
                else:
                    raise UnknownWord(word)
            if material is None:
                raise MissingAttribute(node.object, f"{surface} material")
            if colour is None:
                raise MissingAttribute(node.object, f"{surface} colour")
            tex[surface] = (material, colour)

        rooms.append(
            RoomSpec(
                id=node.object,
                room_type=room_type,
                position=position,
                size_sqm=size,
                floor_material=tex.get("floor", (None, None))[0],
                floor_colour=tex.get("floor", (None, None))[1],
                wall_material=tex.get("wall", (None, None))[0],
                wall_colour=tex.get("wall", (None, None))[1],
            )
        )

    adjacency = set()
    for edge in graph.edges:
        if edge.subject in order and edge.object in order:
            a, b = order[edge.subject], order[edge.object]
            if a != b:
                adjacency.add((min(a, b), max(a, b)))

    return HouseSpec(rooms=rooms, adjacency=adjacency)


def parse_house(text: str, vocab: Vocabularies | None = None) -> HouseSpec:
    return extract_house_spec(parse_scene_graph(text, vocab), vocab)


def encode_layout_features(spec: HouseSpec, vocab: Vocabularies | None = None):
    """Build the N x D feature matrix and N x N 0/1 adjacency matrix.

    Row layout: room-type one-hot, size normalised by the canvas area,
    position one-hot.  D = |types| + 1 + |positions| (17 by default).
    """
    if vocab is None:
        vocab = Vocabularies()
    n = len(spec.rooms)
    nt, npos = len(vocab.room_types), len(vocab.positions)
    x = np.zeros((n, vocab.layout_feature_dim))
    for i, room in enumerate(spec.rooms):
        x[i, room.room_type] = 1.0
        x[i, nt] = room.size_sqm / CANVAS_AREA_SQM
        x[i, nt + 1 + room.position] = 1.0
    a = np.zeros((n, n))
    for i, j in spec.adjacency:
        a[i, j] = a[j, i] = 1.0
    return x, a


def encode_texture_features(spec: HouseSpec, vocab: Vocabularies | None = None) -> list[TextureCondition]:
    """One (material, colour) one-hot pair per texture: floor then wall,
    per room, room order preserved (2N conditions)."""
    if vocab is None:
        vocab = Vocabularies()
    conditions = []
    for room in spec.rooms:
        for surface in ("floor", "wall"):
            material = getattr(room, f"{surface}_material")
            colour = getattr(room, f"{surface}_colour")
            if material is None or colour is None:
                raise MissingAttribute(room.id, f"{surface} texture")
            p = np.zeros(len(vocab.materials))
            q = np.zeros(len(vocab.colours))
            p[material] = 1.0
            q[colour] = 1.0
            conditions.append(TextureCondition(p=p, q=q))
    return conditions
