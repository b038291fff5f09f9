"""Type-safe domain enums shared by the core packages and the CLI."""

from __future__ import annotations

from enum import Enum


class OutputFormat(str, Enum):
    """Output format options for configuration display.

    Inherits from str to allow direct string comparison and Click integration.

    Example:
        >>> OutputFormat.HUMAN.value
        'human'
        >>> OutputFormat.JSON == "json"
        True
    """

    HUMAN = "human"
    JSON = "json"


class MatchCost(str, Enum):
    """Cost used to match predicted boxes to annotations.

    Attributes:
        ONE_MINUS_GIOU: ``l1 + (1 - giou)``, minimised by good boxes.
        LITERAL: ``l1 + giou``, the form printed next to the matching problem.

    Example:
        >>> MatchCost("literal") is MatchCost.LITERAL
        True
    """

    ONE_MINUS_GIOU = "one_minus_giou"
    LITERAL = "literal"


class PromptStyle(str, Enum):
    """Prompt template used to turn a (noun, sentence) pair into encoder text.

    Attributes:
        NOUN: the object noun alone.
        SENTENCE: the query sentence alone.
        NOUN_SENTENCE: the object noun followed by the query sentence.

    Example:
        >>> PromptStyle("on+qs") is PromptStyle.NOUN_SENTENCE
        True
    """

    NOUN = "on"
    SENTENCE = "qs"
    NOUN_SENTENCE = "on+qs"


__all__ = [
    "MatchCost",
    "OutputFormat",
    "PromptStyle",
]
