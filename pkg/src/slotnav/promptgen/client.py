"""Text generation for caption augmentation.

A :class:`GenerationClient` keeps one history per noun and asks a backend
for sentences that differ from every earlier generation for that noun. The
:class:`StubBackend` answers offline from a fixed template bank; the
:class:`ChatBackend` talks to a chat-completion HTTP endpoint.
"""

from __future__ import annotations

import http.client
import itertools
import logging
import re
import time
import urllib.error
import urllib.request
from collections.abc import Callable
from dataclasses import dataclass, field
from enum import Enum
from typing import Any, Protocol

import numpy as np
import orjson

from ..domain.errors import ContractError, GenerationError

logger = logging.getLogger(__name__)

#: Longest noun phrase returned by :meth:`GenerationClient.sentence_to_noun`.
MAX_NOUN_WORDS = 4

SENTENCE_SYSTEM = (
    "You write short requests a person might give a home robot to reach an object. "
    "Answer with one sentence or question and nothing else."
)
NOUN_SYSTEM = "Answer with the short noun naming the object the request is about, nothing else."

SENTENCE_BANK = (
    "Where is the {noun}?",
    "I am looking for {a} {noun}.",
    "Take me to the {noun}.",
    "Can you find the {noun} for me?",
    "I need to get to the {noun}.",
    "Show me where the {noun} is.",
    "Is there {a} {noun} nearby?",
    "Help me locate the {noun}.",
    "Go to the {noun}, please.",
    "Which way is the {noun}?",
)
QUALIFIED_BANK = (
    "Where is the {adj} {noun}?",
    "Take me to the {adj} {noun}.",
    "Can you find the {adj} {noun}?",
    "Bring me over to the {adj} {noun}.",
)
QUALIFIERS = ("nearest", "big", "small", "other", "old", "new", "left", "right", "second", "closest", "far", "usual")

_WORD = re.compile(r"[A-Za-z][A-Za-z'-]*")
_STOPWORDS = frozenset(
    """a an the this that these those my your our their his her its i me we you he she it they
    where what which who how is are was be can could would will should do does did to of on in at for
    with by from near into onto over under please nearby some any there here find go take show help
    get need want looking look sit down up lie put open turn and or me locate bring way""".split()
)


class Task(str, Enum):
    SENTENCE = "sentence"
    NOUN = "noun"


@dataclass(frozen=True, slots=True)
class GenerationRequest:
    """One generation call.

    Attributes:
        task: sentence from a noun, or noun from a sentence.
        subject: the noun or sentence the request is about.
        history: earlier generations for the same noun, oldest first.
    """

    task: Task
    subject: str
    history: tuple[str, ...] = ()

    @property
    def system(self) -> str:
        return SENTENCE_SYSTEM if self.task is Task.SENTENCE else NOUN_SYSTEM

    @property
    def user(self) -> str:
        if self.task is Task.NOUN:
            return self.subject
        lines = [f"Object: {self.subject}"]
        if self.history:
            lines.append("Do not repeat any of these earlier requests:")
            lines.extend(f"- {item}" for item in self.history)
        return "\n".join(lines)


class GenerationBackend(Protocol):
    """Answer one :class:`GenerationRequest` with text; raise ``GenerationError`` on failure."""

    def __call__(self, request: GenerationRequest) -> str: ...


def _article(noun: str) -> str:
    return "an" if noun[:1].lower() in "aeiou" else "a"


@dataclass(slots=True)
class StubBackend:
    """Offline, deterministic backend.

    Sentences come from :data:`SENTENCE_BANK` in order, then from
    :data:`QUALIFIED_BANK` combinations in a seeded order. The first candidate
    not already in the history is returned.

    Example:
        >>> stub = StubBackend()
        >>> stub(GenerationRequest(Task.SENTENCE, "sofa", ("Where is the sofa?",)))
        'I am looking for a sofa.'
        >>> stub(GenerationRequest(Task.NOUN, "Where can I sit down on the sofa?"))
        'sofa'
    """

    seed: int = 0

    def __call__(self, request: GenerationRequest) -> str:
        if request.task is Task.NOUN:
            return last_noun(request.subject)
        seen = set(request.history)
        for candidate in self.candidates(request.subject):
            if candidate not in seen:
                return candidate
        # bank exhausted: the client drops the repeat
        return SENTENCE_BANK[0].format(noun=request.subject, a=_article(request.subject))

    def candidates(self, noun: str) -> list[str]:
        fixed = [template.format(noun=noun, a=_article(noun)) for template in SENTENCE_BANK]
        combos = list(itertools.product(QUALIFIED_BANK, QUALIFIERS))
        order = np.random.default_rng(self.seed).permutation(len(combos))
        qualified = [combos[int(index)][0].format(adj=combos[int(index)][1], noun=noun) for index in order]
        return fixed + qualified


def last_noun(sentence: str) -> str:
    """Last word of ``sentence`` that is not a function word, lower-cased.

    Example:
        >>> last_noun("Where can I sit down on the sofa?")
        'sofa'
    """
    words = [word.lower() for word in _WORD.findall(sentence)]
    content = [word for word in words if word not in _STOPWORDS]
    if content:
        return content[-1]
    return words[-1] if words else sentence.strip()


#: ``opener(request, timeout) -> response body``
Opener = Callable[[urllib.request.Request, float], bytes]


def _urlopen(request: urllib.request.Request, timeout: float) -> bytes:
    with urllib.request.urlopen(request, timeout=timeout) as response:  # noqa: S310 - endpoint comes from config
        return bytes(response.read())


@dataclass(slots=True)
class ChatBackend:
    """Chat-completion endpoint: one system and one user message, text back.

    Timeouts and transport failures, including dropped connections and
    truncated responses, are retried ``retries`` times with a short linear
    back-off before :class:`GenerationError` is raised.
    """

    endpoint: str
    model: str
    api_key: str | None = field(default=None, repr=False)
    timeout: float = 30.0
    retries: int = 2
    temperature: float = 0.7
    backoff: float = 0.5
    opener: Opener = field(default=_urlopen, repr=False)

    def __post_init__(self) -> None:
        if not self.endpoint.startswith(("http://", "https://")):
            raise ContractError(f"generation endpoint must be an http(s) URL, got {self.endpoint!r}")
        if self.timeout <= 0 or self.retries < 0:
            raise ContractError("timeout must be positive and retries non-negative")

    def payload(self, request: GenerationRequest) -> dict[str, Any]:
        return {
            "model": self.model,
            "temperature": self.temperature,
            "messages": [
                {"role": "system", "content": request.system},
                {"role": "user", "content": request.user},
            ],
        }

    def __call__(self, request: GenerationRequest) -> str:
        headers = {"Content-Type": "application/json"}
        if self.api_key:
            headers["Authorization"] = f"Bearer {self.api_key}"
        body = orjson.dumps(self.payload(request))
        errors: list[str] = []
        for attempt in range(self.retries + 1):
            http_request = urllib.request.Request(  # noqa: S310 - scheme checked in __post_init__
                self.endpoint, data=body, headers=headers, method="POST"
            )
            try:
                return _content(self.opener(http_request, self.timeout))
            except (urllib.error.URLError, OSError, http.client.HTTPException) as exc:
                errors.append(str(exc))
                logger.warning(
                    "generation request failed",
                    extra={"attempt": attempt + 1, "endpoint": self.endpoint, "error": str(exc)},
                )
            if attempt < self.retries:
                time.sleep(self.backoff * (attempt + 1))
        raise GenerationError(
            f"endpoint failed after {self.retries + 1} attempts: {errors[-1]}", subject=request.subject
        )


def _content(raw: bytes) -> str:
    try:
        data = orjson.loads(raw)
        text = data["choices"][0]["message"]["content"]
    except (orjson.JSONDecodeError, KeyError, IndexError, TypeError) as exc:
        raise GenerationError(f"unexpected response: {exc}", subject="<response>") from exc
    if not isinstance(text, str) or not text.strip():
        raise GenerationError("empty completion", subject="<response>")
    return text.strip()


@dataclass(slots=True)
class GenerationClient:
    """Single-owner generation session with per-noun history.

    Attributes:
        backend: where requests go.
        retries: extra attempts when the backend repeats an earlier generation.
    """

    backend: GenerationBackend
    retries: int = 2
    _history: dict[str, list[str]] = field(default_factory=lambda: {}, repr=False)

    def history(self, noun: str) -> tuple[str, ...]:
        return tuple(self._history.get(noun, ()))

    def noun_to_sentences(self, noun: str, count: int) -> list[str]:
        """``count`` new sentences about ``noun``, none repeating the noun's history.

        A repeated answer is retried ``retries`` times and then dropped with a
        warning, so fewer than ``count`` sentences can come back.

        Raises:
            ContractError: ``count < 1`` or an empty noun.
            GenerationError: the backend failed; ``partial`` holds what was collected.
        """
        if count < 1:
            raise ContractError(f"count must be >= 1, got {count}")
        if not noun.strip():
            raise ContractError("noun must be non-empty")
        history = self._history.setdefault(noun, [])
        produced: list[str] = []
        for _ in range(count):
            text = ""
            for _attempt in range(self.retries + 1):
                try:
                    text = self.backend(GenerationRequest(Task.SENTENCE, noun, tuple(history))).strip()
                except GenerationError as exc:
                    raise GenerationError(str(exc), subject=noun, partial=produced) from exc
                if text and text not in history:
                    history.append(text)
                    produced.append(text)
                    break
            else:
                logger.warning("dropping repeated generation", extra={"noun": noun, "sentence": text})
        return produced

    def sentence_to_noun(self, sentence: str) -> str:
        """Short noun phrase (at most :data:`MAX_NOUN_WORDS` words) for ``sentence``.

        Raises:
            ContractError: empty sentence.
            GenerationError: the backend failed; ``subject`` is the sentence.
        """
        if not sentence.strip():
            raise ContractError("sentence must be non-empty")
        try:
            answer = self.backend(GenerationRequest(Task.NOUN, sentence.strip()))
        except GenerationError as exc:
            raise GenerationError(str(exc), subject=sentence) from exc
        words = answer.strip().strip(".!?\"'").split()
        if not words:
            raise GenerationError("empty noun answer", subject=sentence)
        return " ".join(words[:MAX_NOUN_WORDS])


def noun_to_sentences(noun: str, count: int, client: GenerationClient) -> list[str]:
    return client.noun_to_sentences(noun, count)


def sentence_to_noun(sentence: str, client: GenerationClient) -> str:
    return client.sentence_to_noun(sentence)


__all__ = [
    "MAX_NOUN_WORDS",
    "QUALIFIED_BANK",
    "SENTENCE_BANK",
    "ChatBackend",
    "GenerationBackend",
    "GenerationClient",
    "GenerationRequest",
    "StubBackend",
    "Task",
    "last_noun",
    "noun_to_sentences",
    "sentence_to_noun",
]
