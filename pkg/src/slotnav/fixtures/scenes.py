"""Eight synthetic multi-object scenes for overfitting and golden tests."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from ..autodiff import Array
from ..objectives import AnnotationSet
from ..promptgen import CaptionRecord, GenerationClient, ObjectRecord, PoseRecord

#: RGB fill of every noun.
NOUN_COLORS: dict[str, tuple[float, float, float]] = {
    "sofa": (0.9, 0.1, 0.1),
    "lamp": (0.9, 0.9, 0.1),
    "bed": (0.1, 0.2, 0.9),
    "plant": (0.1, 0.8, 0.2),
    "chair": (0.8, 0.1, 0.8),
    "table": (0.1, 0.8, 0.8),
}
BACKGROUND = 0.05

# pixel boxes (x1, y1, x2, y2) on a 16x16 canvas, end-exclusive
_QUADRANTS = ((1, 1, 7, 7), (9, 1, 15, 7), (1, 9, 7, 15), (9, 9, 15, 15))
_LAYOUT: tuple[tuple[tuple[str, int], ...], ...] = (
    (("sofa", 0), ("lamp", 3)),
    (("bed", 1), ("plant", 2)),
    (("chair", 2), ("table", 1)),
    (("sofa", 1), ("plant", 2), ("table", 3)),
    (("lamp", 0), ("bed", 3)),
    (("chair", 0), ("sofa", 2), ("bed", 1)),
    (("plant", 3), ("lamp", 1), ("chair", 0)),
    (("table", 0), ("bed", 2)),
)
SIZE = 16


@dataclass(frozen=True, slots=True, eq=False)
class Scene:
    """Rendered image plus its object nouns and normalised boxes."""

    image_id: str
    image: Array = field(repr=False)
    nouns: tuple[str, ...]
    boxes: tuple[tuple[float, float, float, float], ...]

    def annotations(self, captions: tuple[str, ...] | None = None) -> AnnotationSet:
        return AnnotationSet(captions or self.nouns, np.array(self.boxes, dtype=np.float64))


def render_scene(objects: tuple[tuple[str, tuple[int, int, int, int]], ...], size: int = SIZE) -> Array:
    """Paint axis-aligned rectangles of each noun's colour on a dark canvas."""
    image = np.full((size, size, 3), BACKGROUND)
    for noun, (x1, y1, x2, y2) in objects:
        image[y1:y2, x1:x2] = NOUN_COLORS[noun]
    return image


def desk_scenes() -> list[Scene]:
    """The eight bundled scenes, ids ``scene0`` .. ``scene7``.

    Example:
        >>> scenes = desk_scenes()
        >>> len(scenes), scenes[0].nouns, scenes[0].boxes[0]
        (8, ('sofa', 'lamp'), (0.0625, 0.0625, 0.4375, 0.4375))
    """
    scenes: list[Scene] = []
    for index, layout in enumerate(_LAYOUT):
        pixels = tuple((noun, _QUADRANTS[slot]) for noun, slot in layout)
        boxes = tuple(
            (x1 / SIZE, y1 / SIZE, x2 / SIZE, y2 / SIZE) for _, (x1, y1, x2, y2) in pixels
        )
        scenes.append(Scene(f"scene{index}", render_scene(pixels), tuple(noun for noun, _ in layout), boxes))
    return scenes


def scene_records(sentences: int = 0, client: GenerationClient | None = None) -> list[CaptionRecord]:
    """Caption records for :func:`desk_scenes`.

    Every object is captioned with its noun; with ``sentences > 0`` the
    ``client`` adds that many generated sentences per object.
    """
    records: list[CaptionRecord] = []
    for scene in desk_scenes():
        objects = []
        for noun, box in zip(scene.nouns, scene.boxes, strict=True):
            extra = client.noun_to_sentences(noun, sentences) if client is not None and sentences > 0 else []
            objects.append(ObjectRecord(noun=noun, box=box, captions=(noun, *extra)))
        records.append(
            CaptionRecord(image_id=scene.image_id, width=SIZE, height=SIZE, pose=PoseRecord(), objects=tuple(objects))
        )
    return records


__all__ = ["BACKGROUND", "NOUN_COLORS", "SIZE", "Scene", "desk_scenes", "render_scene", "scene_records"]
