"""Bundled desk fixtures.

* ``desk_scenes`` - eight 16x16 synthetic scenes, two or three coloured
  objects each, every noun combination unique.
* ``orthonormal_retrieval`` - one-hot image and text embeddings with a
  one-to-one ground truth (self-retrieval).
* ``world15`` - a 15x15 two-room world with an image-pose memory, four
  navigation queries and a lookup query encoder.
"""

from __future__ import annotations

from .retrieval import OrthonormalFixture, orthonormal_retrieval
from .scenes import NOUN_COLORS, Scene, desk_scenes, render_scene, scene_records
from .world import WORLD15, data_path, load_world15, world15_encoder, world15_memory, world15_queries

__all__ = [
    "NOUN_COLORS",
    "WORLD15",
    "OrthonormalFixture",
    "Scene",
    "data_path",
    "desk_scenes",
    "load_world15",
    "orthonormal_retrieval",
    "render_scene",
    "scene_records",
    "world15_encoder",
    "world15_memory",
    "world15_queries",
]
