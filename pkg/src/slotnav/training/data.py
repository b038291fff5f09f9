"""Training examples and per-step batches.

An example pairs an image with its :class:`CaptionRecord`. Each step draws
its images from a seeded per-epoch shuffle, picks one caption per object and
renders it with the configured prompt template: a generated sentence becomes
``noun. sentence``; the bare noun caption stays the noun.
"""

from __future__ import annotations

from collections.abc import Mapping, Sequence
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from ..autodiff import Array
from ..domain.enums import PromptStyle
from ..domain.errors import ContractError, DataFormatError
from ..fixtures import desk_scenes, scene_records
from ..model import read_ppm
from ..objectives import AnnotationSet, LossBatch, caption_seed, prepare_batch
from ..promptgen import CaptionRecord, GenerationClient, read_caption_records, render_prompt
from .config import TrainConfig


@dataclass(frozen=True, slots=True, eq=False)
class Example:
    image: Array = field(repr=False)
    record: CaptionRecord

    @property
    def image_id(self) -> str:
        return self.record.image_id


def annotation_set(record: CaptionRecord, rng: np.random.Generator, style: PromptStyle) -> AnnotationSet:
    """One rendered caption per object, chosen uniformly with ``rng``.

    Example:
        >>> from slotnav.fixtures import scene_records
        >>> annotation_set(scene_records()[0], np.random.default_rng(0), PromptStyle.NOUN_SENTENCE).captions
        ('sofa', 'lamp')
    """
    captions: list[str] = []
    for obj in record.objects:
        choice = obj.captions[int(rng.integers(len(obj.captions)))]
        sentence = None if choice.strip() == obj.noun else choice
        captions.append(render_prompt(obj.noun, sentence, style))
    return AnnotationSet(tuple(captions), np.array([obj.box for obj in record.objects], dtype=np.float64))


def batch_indices(count: int, step: int, batch_size: int, seed: int) -> list[int]:
    """Example indices for ``step``: consecutive slices of a per-epoch seeded shuffle.

    Example:
        >>> sorted(batch_indices(8, 0, 4, 0) + batch_indices(8, 1, 4, 0))
        [0, 1, 2, 3, 4, 5, 6, 7]
    """
    if count < 1:
        raise ContractError("cannot draw batches from an empty dataset")
    size = min(batch_size, count)
    per_epoch = count // size
    epoch, slot = divmod(step, per_epoch)
    order = np.random.default_rng([seed, epoch]).permutation(count)
    return [int(index) for index in order[slot * size : (slot + 1) * size]]


def make_batch(
    examples: Sequence[Example],
    step: int,
    config: TrainConfig,
    text_parameters: Mapping[str, Array],
    *,
    indices: Sequence[int] | None = None,
) -> LossBatch:
    """Batch for ``step`` with captions drawn and concatenated from the global seed."""
    if indices is None:
        indices = batch_indices(len(examples), step, config.batch_size, config.seed)
    rng = np.random.default_rng([config.seed, step])
    picked = [examples[index] for index in indices]
    annotations = [annotation_set(example.record, rng, config.prompt_style) for example in picked]
    images = np.stack([example.image for example in picked])
    return prepare_batch(images, annotations, text_parameters, config.encoder, seed=caption_seed(config.seed, step))


def load_examples(records_path: str | Path, images_dir: str | Path) -> list[Example]:
    """Pair every record of ``records_path`` with ``images_dir/<image_id>.ppm``.

    Raises:
        DataFormatError: malformed record or a missing image.
    """
    directory = Path(images_dir)
    examples: list[Example] = []
    for record in read_caption_records(records_path):
        image_path = directory / f"{record.image_id}.ppm"
        if not image_path.is_file():
            raise DataFormatError(f"image for {record.image_id!r} not found", path=image_path)
        examples.append(Example(read_ppm(image_path), record))
    return examples


def desk_examples(sentences: int = 0, client: GenerationClient | None = None) -> list[Example]:
    """The eight bundled desk scenes as training examples."""
    records = scene_records(sentences, client)
    return [Example(scene.image, record) for scene, record in zip(desk_scenes(), records, strict=True)]


__all__ = ["Example", "annotation_set", "batch_indices", "desk_examples", "load_examples", "make_batch"]
