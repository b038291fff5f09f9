"""Prompt templates and caption augmentation through a text-generation client."""

from __future__ import annotations

from .client import (
    MAX_NOUN_WORDS,
    ChatBackend,
    GenerationBackend,
    GenerationClient,
    GenerationRequest,
    StubBackend,
    Task,
    last_noun,
    noun_to_sentences,
    sentence_to_noun,
)
from .dataset import (
    CaptionRecord,
    ConversionResult,
    DetectionRecord,
    LineError,
    ObjectRecord,
    PoseRecord,
    caption_pairs,
    convert_detection_dataset,
    convert_detection_file,
    dump_record,
    read_caption_records,
    read_records,
    write_records,
)
from .report import TemplateReport, noun_gallery, noun_ground_truth, prompt_template_report, template_queries
from .templates import SEPARATOR, PromptTemplate, build_prompt, parse_prompt, render_prompt

__all__ = [
    "MAX_NOUN_WORDS",
    "SEPARATOR",
    "CaptionRecord",
    "ChatBackend",
    "ConversionResult",
    "DetectionRecord",
    "GenerationBackend",
    "GenerationClient",
    "GenerationRequest",
    "LineError",
    "ObjectRecord",
    "PoseRecord",
    "PromptTemplate",
    "StubBackend",
    "Task",
    "TemplateReport",
    "build_prompt",
    "caption_pairs",
    "convert_detection_dataset",
    "convert_detection_file",
    "dump_record",
    "last_noun",
    "noun_gallery",
    "noun_ground_truth",
    "noun_to_sentences",
    "parse_prompt",
    "prompt_template_report",
    "read_caption_records",
    "read_records",
    "render_prompt",
    "sentence_to_noun",
    "template_queries",
    "write_records",
]
