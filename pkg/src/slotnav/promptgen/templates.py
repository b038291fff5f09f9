"""Query prompt templates: object noun first, then the query sentence."""

from __future__ import annotations

from dataclasses import dataclass

from ..domain.enums import PromptStyle
from ..domain.errors import ContractError

#: Text between the noun and the sentence.
SEPARATOR = ". "


@dataclass(frozen=True, slots=True)
class PromptTemplate:
    """How a (noun, sentence) pair becomes one query string.

    Attributes:
        style: which parts appear; :attr:`PromptStyle.NOUN_SENTENCE` puts the
            noun before the sentence.
        separator: text between noun and sentence.
    """

    style: PromptStyle = PromptStyle.NOUN_SENTENCE
    separator: str = SEPARATOR

    def render(self, noun: str, sentence: str | None = None) -> str:
        """Render ``noun`` and ``sentence`` according to :attr:`style`.

        Example:
            >>> PromptTemplate(PromptStyle.SENTENCE).render("sofa", "Where can I sit down?")
            'Where can I sit down?'
            >>> PromptTemplate(PromptStyle.SENTENCE).render("lamp")
            'lamp'
        """
        noun = noun.strip()
        if not noun:
            raise ContractError("prompt noun must be non-empty")
        text = (sentence or "").strip()
        if self.style is PromptStyle.NOUN or not text:
            return noun
        if self.style is PromptStyle.SENTENCE:
            return text
        return f"{noun}{self.separator}{text}"

    def parse(self, prompt: str) -> tuple[str, str | None]:
        """Split an object-noun-first prompt at the first separator.

        Example:
            >>> PromptTemplate().parse("sofa. Where can I sit down?")
            ('sofa', 'Where can I sit down?')
        """
        noun, found, sentence = prompt.partition(self.separator)
        if not noun.strip():
            raise ContractError(f"prompt {prompt!r} has no noun")
        return noun.strip(), sentence.strip() if found and sentence.strip() else None


DEFAULT_TEMPLATE = PromptTemplate()


def build_prompt(noun: str, sentence: str | None = None) -> str:
    """``noun + ". " + sentence``, or the noun alone.

    Raises:
        ContractError: empty noun.

    Example:
        >>> build_prompt("sofa", "Where can I sit down?")
        'sofa. Where can I sit down?'
        >>> build_prompt("lamp")
        'lamp'
    """
    return DEFAULT_TEMPLATE.render(noun, sentence)


def parse_prompt(prompt: str) -> tuple[str, str | None]:
    """Inverse of :func:`build_prompt` for nouns without the separator."""
    return DEFAULT_TEMPLATE.parse(prompt)


def render_prompt(noun: str, sentence: str | None, style: PromptStyle | str = PromptStyle.NOUN_SENTENCE) -> str:
    """Render with an explicit :class:`PromptStyle` (``on``, ``qs`` or ``on+qs``)."""
    return PromptTemplate(PromptStyle(style)).render(noun, sentence)


__all__ = ["DEFAULT_TEMPLATE", "SEPARATOR", "PromptTemplate", "build_prompt", "parse_prompt", "render_prompt"]
