"""Word vocabularies shared by the parser, the encoders and the generators.

Four ordered word lists drive every one-hot encoding in the pipeline:
room types, canvas positions, texture materials and texture colours.
The material and colour lists are fixed at 19 and 12 entries so the
encoded feature widths stay constant.
"""

from __future__ import annotations

from dataclasses import dataclass, field

DEFAULT_ROOM_TYPES = [
    "washroom",
    "bedroom",
    "livingroom",
    "kitchen",
    "balcony",
    "study",
    "storage",
]

DEFAULT_POSITIONS = [
    "center",
    "north",
    "northeast",
    "east",
    "southeast",
    "south",
    "southwest",
    "west",
    "northwest",
]

# 19 entries.  The first ten appear in real descriptions; the rest pad the
# list out to the fixed width with plausible interior materials.
DEFAULT_MATERIALS = [
    "Marble",
    "Wall_Cloth",
    "Log",
    "Wood_Veneer",
    "Wood_Grain",
    "Pure_Color_Wood",
    "Coating",
    "Jade",
    "Mosaic",
    "Stone_Brick",
    "Tile",
    "Granite",
    "Bamboo",
    "Brick",
    "Concrete",
    "Plaster",
    "Limestone",
    "Cork",
    "Slate",
]

# 12 entries, same padding story.
DEFAULT_COLOURS = [
    "White",
    "Black",
    "Blue",
    "Yellow",
    "Orange",
    "Pink",
    "Wood_color",
    "Earth_color",
    "Red",
    "Green",
    "Grey",
    "Purple",
]

# Canvas convention: 512 px == 18 m, so the full canvas covers 324 m^2.
CANVAS_PX = 512
CANVAS_METERS = 18.0
CANVAS_AREA_SQM = CANVAS_METERS * CANVAS_METERS


class VocabError(ValueError):
    pass


@dataclass(frozen=True)
class Vocabularies:
    room_types: tuple = tuple(DEFAULT_ROOM_TYPES)
    positions: tuple = tuple(DEFAULT_POSITIONS)
    materials: tuple = tuple(DEFAULT_MATERIALS)
    colours: tuple = tuple(DEFAULT_COLOURS)

    def __post_init__(self):
        if len(self.materials) != 19:
            raise VocabError(f"materials must have 19 entries, got {len(self.materials)}")
        if len(self.colours) != 12:
            raise VocabError(f"colours must have 12 entries, got {len(self.colours)}")
        for name in ("room_types", "positions", "materials", "colours"):
            entries = getattr(self, name)
            if len(set(entries)) != len(entries):
                raise VocabError(f"duplicate entries in {name}")

    @property
    def layout_feature_dim(self) -> int:
        # type one-hot + size scalar + position one-hot
        return len(self.room_types) + 1 + len(self.positions)

    def room_type_index(self, word: str) -> int:
        return self.room_types.index(word)

    def position_index(self, word: str) -> int:
        return self.positions.index(word)

    def material_index(self, word: str) -> int:
        return self.materials.index(word)

    def colour_index(self, word: str) -> int:
        return self.colours.index(word)

    def is_material(self, word: str) -> bool:
        return word in self.materials

    def is_colour(self, word: str) -> bool:
        return word in self.colours


_SECTION_FIELDS = {
    "room_types": "room_types",
    "positions": "positions",
    "materials": "materials",
    "colours": "colours",
}


def load_vocabularies(path) -> Vocabularies:
    """Read a sectioned word-list file.

    Format: one entry per line, sections headed by ``[room_types]``,
    ``[positions]``, ``[materials]``, ``[colours]``.  Blank lines and
    ``#`` comments are ignored.
    """
    sections: dict[str, list[str]] = {k: [] for k in _SECTION_FIELDS}
    current = None
    with open(path, encoding="utf-8") as fh:
        for raw in fh:
            line = raw.strip()
            if not line or line.startswith("#"):
                continue
            if line.startswith("[") and line.endswith("]"):
                name = line[1:-1]
                if name not in sections:
                    raise VocabError(f"unknown section {name!r}")
                current = name
                continue
            if current is None:
                raise VocabError(f"entry {line!r} before any section header")
            sections[current].append(line)
    return Vocabularies(
        room_types=tuple(sections["room_types"]),
        positions=tuple(sections["positions"]),
        materials=tuple(sections["materials"]),
        colours=tuple(sections["colours"]),
    )


def save_vocabularies(vocab: Vocabularies, path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        for section, attr in _SECTION_FIELDS.items():
            fh.write(f"[{section}]\n")
            for entry in getattr(vocab, attr):
                fh.write(entry + "\n")
            fh.write("\n")


# Anchor points of the nine named positions on the unit canvas (x, y),
# x growing east and y growing south.
POSITION_ANCHORS = {
    "center": (0.5, 0.5),
    "north": (0.5, 0.25),
    "northeast": (0.75, 0.25),
    "east": (0.75, 0.5),
    "southeast": (0.75, 0.75),
    "south": (0.5, 0.75),
    "southwest": (0.25, 0.75),
    "west": (0.25, 0.5),
    "northwest": (0.25, 0.25),
}
