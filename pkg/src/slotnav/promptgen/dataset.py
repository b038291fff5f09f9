"""Line-delimited image records and detection-to-caption conversion.

One JSON object per line::

    {"image_id": "...", "width": 16, "height": 16, "pose": {"x": 0.0, "y": 0.0, "theta": 0.0},
     "objects": [{"noun": "sofa", "box": [x1, y1, x2, y2], "captions": ["sofa", "..."]}]}

Boxes are normalised corners. Detection input uses the same layout; its
``captions`` are ignored and rebuilt by :func:`convert_detection_dataset`.
"""

from __future__ import annotations

import logging
from collections.abc import Iterable, Sequence
from dataclasses import dataclass, field
from pathlib import Path
from typing import TypeVar

import orjson
from pydantic import BaseModel, ConfigDict, Field, ValidationError, field_validator

from ..domain.errors import ContractError, DataFormatError, GenerationError
from ..objectives.boxes import validate_boxes
from .client import GenerationClient

logger = logging.getLogger(__name__)


class PoseRecord(BaseModel):
    model_config = ConfigDict(frozen=True, extra="forbid")

    x: float = 0.0
    y: float = 0.0
    theta: float = 0.0


class ObjectRecord(BaseModel):
    """One annotated object: its noun, normalised box and captions."""

    model_config = ConfigDict(frozen=True, extra="forbid")

    noun: str = Field(min_length=1)
    box: tuple[float, float, float, float]
    captions: tuple[str, ...] = ()

    @field_validator("noun")
    @classmethod
    def _strip_noun(cls, value: str) -> str:
        if not value.strip():
            raise ValueError("noun must not be blank")
        return value.strip()

    @field_validator("box")
    @classmethod
    def _check_box(cls, value: tuple[float, float, float, float]) -> tuple[float, float, float, float]:
        try:
            validate_boxes(value, unit=True)
        except ContractError as exc:
            raise ValueError(str(exc)) from exc
        return value


class DetectionRecord(BaseModel):
    """An image with detection labels (captions optional)."""

    model_config = ConfigDict(frozen=True, extra="forbid")

    image_id: str = Field(min_length=1)
    width: int = Field(gt=0)
    height: int = Field(gt=0)
    pose: PoseRecord = PoseRecord()
    objects: tuple[ObjectRecord, ...] = Field(min_length=1)


class CaptionRecord(DetectionRecord):
    """An image with multi-label captions; every object has at least one caption.

    Example:
        >>> line = '{"image_id": "i0", "width": 16, "height": 16, "objects": '
        >>> line += '[{"noun": "sofa", "box": [0, 0, 0.5, 0.5], "captions": ["sofa"]}]}'
        >>> CaptionRecord.model_validate_json(line).objects[0].captions
        ('sofa',)
    """

    @field_validator("objects")
    @classmethod
    def _captions_present(cls, value: tuple[ObjectRecord, ...]) -> tuple[ObjectRecord, ...]:
        for obj in value:
            if not obj.captions or any(not caption.strip() for caption in obj.captions):
                raise ValueError(f"object {obj.noun!r} needs at least one non-empty caption")
        return value

    @property
    def nouns(self) -> list[str]:
        return [obj.noun for obj in self.objects]


RecordT = TypeVar("RecordT", bound=DetectionRecord)


@dataclass(frozen=True, slots=True)
class LineError:
    """A record that could not be used."""

    line: int
    reason: str
    source: str = "<input>"

    def __str__(self) -> str:
        return f"{self.source}:{self.line}: {self.reason}"


def _describe(exc: ValidationError | orjson.JSONDecodeError) -> str:
    if isinstance(exc, ValidationError):
        first = exc.errors()[0]
        where = ".".join(str(part) for part in first["loc"])
        return f"{where}: {first['msg']}" if where else str(first["msg"])
    return f"invalid JSON: {exc}"


def _parse_line(raw: str, model: type[RecordT]) -> RecordT:
    return model.model_validate(orjson.loads(raw))


def iter_records(
    lines: Iterable[str], model: type[RecordT], *, source: str = "<input>"
) -> Iterable[tuple[int, RecordT | LineError]]:
    """Yield ``(line number, record or error)`` for every non-blank line."""
    for number, raw in enumerate(lines, start=1):
        if not raw.strip():
            continue
        try:
            yield number, _parse_line(raw, model)
        except (orjson.JSONDecodeError, ValidationError) as exc:
            yield number, LineError(number, _describe(exc), source)


def read_records(path: str | Path, model: type[RecordT] = CaptionRecord) -> list[RecordT]:
    """Read every record of ``path``; the first malformed line raises.

    Raises:
        DataFormatError: carrying path and line of the malformed record.
    """
    source = Path(path)
    records: list[RecordT] = []
    with source.open(encoding="utf-8") as handle:
        for number, item in iter_records(handle, model, source=str(source)):
            if isinstance(item, LineError):
                raise DataFormatError(item.reason, path=source, line=number)
            records.append(item)
    return records


def read_caption_records(path: str | Path) -> list[CaptionRecord]:
    return read_records(path, CaptionRecord)


def dump_record(record: BaseModel) -> bytes:
    return orjson.dumps(record.model_dump(mode="json"))


def write_records(path: str | Path, records: Iterable[BaseModel]) -> Path:
    target = Path(path)
    with target.open("wb") as handle:
        for record in records:
            handle.write(dump_record(record) + b"\n")
    return target


@dataclass(frozen=True, slots=True)
class ConversionResult:
    """Converted records plus the lines that were skipped."""

    records: list[CaptionRecord] = field(default_factory=lambda: [])
    errors: list[LineError] = field(default_factory=lambda: [])

    @property
    def generated_captions(self) -> int:
        """Captions added beyond the retained nouns."""
        return sum(len(obj.captions) - 1 for record in self.records for obj in record.objects)


def convert_record(record: DetectionRecord, count: int, client: GenerationClient) -> CaptionRecord:
    """Caption every object: its noun first, then ``count`` generated sentences."""
    objects = tuple(
        obj.model_copy(update={"captions": (obj.noun, *client.noun_to_sentences(obj.noun, count))})
        for obj in record.objects
    )
    return CaptionRecord.model_validate({**record.model_dump(), "objects": [o.model_dump() for o in objects]})


def convert_detection_dataset(
    lines: Iterable[str], count: int, client: GenerationClient, *, source: str = "<input>"
) -> ConversionResult:
    """Turn detection records into multi-label caption records.

    Malformed lines and records whose generation failed are skipped, reported
    in :attr:`ConversionResult.errors` and logged as warnings. A record is all
    or nothing: sentences generated before a failure (``GenerationError.partial``)
    are dropped with it, so no object is written with fewer captions than asked.

    Raises:
        ContractError: ``count < 1``.
    """
    if count < 1:
        raise ContractError(f"caption count must be >= 1, got {count}")
    result = ConversionResult()
    for number, item in iter_records(lines, DetectionRecord, source=source):
        if isinstance(item, LineError):
            logger.warning("skipping malformed detection record", extra={"source": source, "line": number})
            result.errors.append(item)
            continue
        try:
            result.records.append(convert_record(item, count, client))
        except GenerationError as exc:
            logger.warning(
                "skipping record after generation failure",
                extra={"line": number, "error": str(exc), "dropped_sentences": len(exc.partial)},
            )
            result.errors.append(LineError(number, str(exc), source))
    return result


def convert_detection_file(path: str | Path, count: int, client: GenerationClient) -> ConversionResult:
    source = Path(path)
    with source.open(encoding="utf-8") as handle:
        return convert_detection_dataset(handle, count, client, source=str(source))


def caption_pairs(records: Sequence[CaptionRecord]) -> list[tuple[str, str]]:
    """``(image_id, caption)`` for every caption of every object."""
    return [(record.image_id, caption) for record in records for obj in record.objects for caption in obj.captions]


__all__ = [
    "CaptionRecord",
    "ConversionResult",
    "DetectionRecord",
    "LineError",
    "ObjectRecord",
    "PoseRecord",
    "caption_pairs",
    "convert_detection_dataset",
    "convert_detection_file",
    "convert_record",
    "dump_record",
    "iter_records",
    "read_caption_records",
    "read_records",
    "write_records",
]
