"""Prompt templates, the generation client and detection-to-caption conversion."""

from __future__ import annotations

import http.client
import urllib.error
import urllib.request
from collections.abc import Sequence
from pathlib import Path

import numpy as np
import orjson
import pytest

from slotnav.domain.enums import PromptStyle
from slotnav.domain.errors import ContractError, DataFormatError, GenerationError
from slotnav.fixtures import scene_records
from slotnav.promptgen import (
    MAX_NOUN_WORDS,
    CaptionRecord,
    ChatBackend,
    GenerationClient,
    GenerationRequest,
    PromptTemplate,
    StubBackend,
    Task,
    build_prompt,
    caption_pairs,
    convert_detection_dataset,
    convert_detection_file,
    last_noun,
    parse_prompt,
    prompt_template_report,
    read_caption_records,
    render_prompt,
    write_records,
)

DETECTION = (
    '{"image_id": "kitchen", "width": 640, "height": 480, '
    '"objects": [{"noun": "kettle", "box": [0.1, 0.2, 0.3, 0.5]}, {"noun": "oven", "box": [0.5, 0.1, 0.9, 0.9]}]}'
)


class RepeatingBackend:
    """Answers every sentence request with the same text."""

    def __call__(self, request: GenerationRequest) -> str:
        return f"Where is the {request.subject}?"


class FailingBackend:
    def __init__(self, after: int) -> None:
        self.calls = 0
        self.after = after

    def __call__(self, request: GenerationRequest) -> str:
        self.calls += 1
        if self.calls > self.after:
            raise GenerationError("endpoint down", subject=request.subject)
        return f"Sentence {self.calls} about the {request.subject}."


def _chat_response(text: str) -> bytes:
    return orjson.dumps({"choices": [{"message": {"role": "assistant", "content": text}}]})


# --- templates ---------------------------------------------------------------------


@pytest.mark.os_agnostic
def test_noun_comes_before_the_sentence() -> None:
    assert build_prompt("sofa", "Where can I sit down?") == "sofa. Where can I sit down?"


@pytest.mark.os_agnostic
def test_missing_sentence_renders_the_noun_alone() -> None:
    assert build_prompt("lamp") == "lamp"
    assert build_prompt("lamp", "   ") == "lamp"


@pytest.mark.os_agnostic
def test_prompt_parses_back_into_noun_and_sentence() -> None:
    assert parse_prompt(build_prompt("bed", "Where can I lie down?")) == ("bed", "Where can I lie down?")
    assert parse_prompt("bed") == ("bed", None)


@pytest.mark.os_agnostic
@pytest.mark.parametrize(
    ("style", "expected"),
    [
        ("on", "sofa"),
        ("qs", "Where can I sit down?"),
        ("on+qs", "sofa. Where can I sit down?"),
    ],
)
def test_each_style_renders_its_parts(style: str, expected: str) -> None:
    assert render_prompt("sofa", "Where can I sit down?", style) == expected


@pytest.mark.os_agnostic
def test_empty_noun_is_rejected() -> None:
    with pytest.raises(ContractError, match="non-empty"):
        PromptTemplate().render("  ", "Where is it?")


@pytest.mark.os_agnostic
def test_unknown_style_is_rejected() -> None:
    with pytest.raises(ValueError, match="'noun'"):
        render_prompt("sofa", None, "noun")


# --- generation client ----------------------------------------------------------------


@pytest.mark.os_agnostic
def test_stub_sentences_never_repeat_for_a_noun() -> None:
    client = GenerationClient(StubBackend())

    first = client.noun_to_sentences("sofa", 5)
    second = client.noun_to_sentences("sofa", 20)

    assert len(first) == 5
    assert len(second) == 20
    assert len(set(first + second)) == 25
    assert client.history("sofa") == tuple(first + second)


@pytest.mark.os_agnostic
def test_histories_are_kept_per_noun() -> None:
    client = GenerationClient(StubBackend())

    client.noun_to_sentences("sofa", 3)

    assert client.noun_to_sentences("lamp", 1) == ["Where is the lamp?"]


@pytest.mark.os_agnostic
def test_stub_uses_the_right_article() -> None:
    client = GenerationClient(StubBackend())

    assert client.noun_to_sentences("oven", 2)[1] == "I am looking for an oven."


@pytest.mark.os_agnostic
def test_repeated_generations_are_dropped() -> None:
    client = GenerationClient(RepeatingBackend(), retries=1)

    assert client.noun_to_sentences("chair", 3) == ["Where is the chair?"]


@pytest.mark.os_agnostic
def test_backend_failure_carries_the_partial_result() -> None:
    client = GenerationClient(FailingBackend(after=2))

    with pytest.raises(GenerationError) as caught:
        client.noun_to_sentences("table", 4)

    assert caught.value.subject == "table"
    assert list(caught.value.partial) == ["Sentence 1 about the table.", "Sentence 2 about the table."]


@pytest.mark.os_agnostic
def test_count_must_be_positive() -> None:
    with pytest.raises(ContractError, match=">= 1"):
        GenerationClient(StubBackend()).noun_to_sentences("sofa", 0)


@pytest.mark.os_agnostic
@pytest.mark.parametrize(
    ("sentence", "noun"),
    [
        ("Where can I sit down on the sofa?", "sofa"),
        ("I am looking for a lamp.", "lamp"),
        ("Take me to the bed, please.", "bed"),
    ],
)
def test_sentence_to_noun_finds_the_object(sentence: str, noun: str) -> None:
    assert GenerationClient(StubBackend()).sentence_to_noun(sentence) == noun
    assert last_noun(sentence) == noun


@pytest.mark.os_agnostic
def test_long_noun_answers_are_cut() -> None:
    client = GenerationClient(lambda request: "the big red comfy leather sofa.")

    assert len(client.sentence_to_noun("Where should I sit?").split()) == MAX_NOUN_WORDS


@pytest.mark.os_agnostic
def test_chat_backend_sends_system_and_user_messages() -> None:
    sent: list[urllib.request.Request] = []

    def opener(request: urllib.request.Request, timeout: float) -> bytes:
        sent.append(request)
        return _chat_response(" Where is the sofa? ")

    backend = ChatBackend("http://localhost:9/v1/chat", "local-model", api_key="secret", opener=opener)
    answer = backend(GenerationRequest(Task.SENTENCE, "sofa", ("Take me to the sofa.",)))

    assert answer == "Where is the sofa?"
    payload = orjson.loads(sent[0].data)  # type: ignore[arg-type]
    assert [message["role"] for message in payload["messages"]] == ["system", "user"]
    assert "Take me to the sofa." in payload["messages"][1]["content"]
    assert sent[0].get_header("Authorization") == "Bearer secret"


@pytest.mark.os_agnostic
def test_chat_backend_retries_transport_errors() -> None:
    attempts: list[int] = []

    def opener(request: urllib.request.Request, timeout: float) -> bytes:
        attempts.append(1)
        if len(attempts) < 3:
            raise urllib.error.URLError("connection refused")
        return _chat_response("Where is the lamp?")

    backend = ChatBackend("http://localhost:9/v1/chat", "m", retries=2, backoff=0.0, opener=opener)

    assert backend(GenerationRequest(Task.SENTENCE, "lamp")) == "Where is the lamp?"
    assert len(attempts) == 3


@pytest.mark.os_agnostic
@pytest.mark.parametrize(
    "failure",
    [
        ConnectionResetError(104, "Connection reset by peer"),
        http.client.RemoteDisconnected("Remote end closed connection without response"),
        http.client.IncompleteRead(b"{\"choi"),
    ],
    ids=["reset", "disconnected", "incomplete-read"],
)
def test_chat_backend_retries_dropped_connections(failure: Exception) -> None:
    attempts: list[int] = []

    def opener(request: urllib.request.Request, timeout: float) -> bytes:
        attempts.append(1)
        if len(attempts) < 3:
            raise failure
        return _chat_response("Where is the lamp?")

    backend = ChatBackend("http://localhost:9/v1/chat", "m", retries=2, backoff=0.0, opener=opener)

    assert backend(GenerationRequest(Task.SENTENCE, "lamp")) == "Where is the lamp?"
    assert len(attempts) == 3


@pytest.mark.os_agnostic
def test_connection_resets_become_generation_errors() -> None:
    def opener(request: urllib.request.Request, timeout: float) -> bytes:
        raise ConnectionResetError(104, "Connection reset by peer")

    backend = ChatBackend("http://localhost:9/v1/chat", "m", retries=1, backoff=0.0, opener=opener)

    with pytest.raises(GenerationError, match="after 2 attempts"):
        backend(GenerationRequest(Task.SENTENCE, "lamp"))


@pytest.mark.os_agnostic
def test_chat_backend_gives_up_after_its_retries() -> None:
    def opener(request: urllib.request.Request, timeout: float) -> bytes:
        raise TimeoutError("timed out")

    backend = ChatBackend("http://localhost:9/v1/chat", "m", retries=1, backoff=0.0, opener=opener)

    with pytest.raises(GenerationError, match="after 2 attempts"):
        backend(GenerationRequest(Task.SENTENCE, "lamp"))


@pytest.mark.os_agnostic
def test_chat_backend_rejects_malformed_responses() -> None:
    backend = ChatBackend("http://localhost:9/v1/chat", "m", opener=lambda request, timeout: b'{"choices": []}')

    with pytest.raises(GenerationError, match="unexpected response"):
        backend(GenerationRequest(Task.NOUN, "Where is the lamp?"))


@pytest.mark.os_agnostic
def test_chat_backend_needs_an_http_endpoint() -> None:
    with pytest.raises(ContractError, match="http"):
        ChatBackend("file:///etc/passwd", "m")


# --- records and conversion ----------------------------------------------------------------


@pytest.mark.os_agnostic
def test_detection_records_gain_the_noun_and_generated_sentences() -> None:
    result = convert_detection_dataset([DETECTION], 3, GenerationClient(StubBackend()))

    assert not result.errors
    (record,) = result.records
    assert [obj.captions[0] for obj in record.objects] == ["kettle", "oven"]
    assert all(len(obj.captions) == 4 for obj in record.objects)
    assert result.generated_captions == 6


@pytest.mark.os_agnostic
def test_malformed_lines_are_reported_and_skipped() -> None:
    lines = [DETECTION, "{not json", "", '{"image_id": "x", "width": 4, "height": 4, "objects": []}']

    result = convert_detection_dataset(lines, 1, GenerationClient(StubBackend()), source="dets.jsonl")

    assert len(result.records) == 1
    assert [error.line for error in result.errors] == [2, 4]
    assert str(result.errors[0]).startswith("dets.jsonl:2: invalid JSON")
    assert "objects" in result.errors[1].reason


@pytest.mark.os_agnostic
def test_boxes_outside_the_unit_square_are_rejected() -> None:
    line = '{"image_id": "x", "width": 4, "height": 4, "objects": [{"noun": "cup", "box": [0, 0, 2, 1]}]}'

    result = convert_detection_dataset([line], 1, GenerationClient(StubBackend()))

    assert result.errors
    assert "[0, 1]" in result.errors[0].reason


@pytest.mark.os_agnostic
def test_generation_failure_skips_only_that_record() -> None:
    client = GenerationClient(FailingBackend(after=2))

    result = convert_detection_dataset([DETECTION, DETECTION.replace("kitchen", "hall")], 1, client)

    assert [record.image_id for record in result.records] == ["kitchen"]
    assert result.errors[0].line == 2
    assert "endpoint down" in result.errors[0].reason


@pytest.mark.os_agnostic
def test_a_reset_endpoint_skips_only_the_affected_record() -> None:
    replies = iter(range(1000))

    def opener(request: urllib.request.Request, timeout: float) -> bytes:
        if request.data is not None and b"lamp" in request.data:
            raise ConnectionResetError(104, "Connection reset by peer")
        return _chat_response(f"Where is item {next(replies)}?")

    backend = ChatBackend("http://localhost:9/v1/chat", "m", retries=1, backoff=0.0, opener=opener)
    hall = '{"image_id": "hall", "width": 8, "height": 8, "objects": [{"noun": "lamp", "box": [0, 0, 1, 1]}]}'

    result = convert_detection_dataset([DETECTION, hall], 1, GenerationClient(backend))

    assert [record.image_id for record in result.records] == ["kitchen"]
    assert [error.line for error in result.errors] == [2]
    assert "Connection reset" in result.errors[0].reason


@pytest.mark.os_agnostic
def test_converted_file_can_be_read_back(tmp_path: Path) -> None:
    source = tmp_path / "dets.jsonl"
    source.write_text(DETECTION + "\n", encoding="utf-8")

    result = convert_detection_file(source, 2, GenerationClient(StubBackend()))
    restored = read_caption_records(write_records(tmp_path / "caps.jsonl", result.records))

    assert restored == result.records
    assert ("kitchen", "kettle") in caption_pairs(restored)


@pytest.mark.os_agnostic
def test_caption_records_need_captions(tmp_path: Path) -> None:
    path = tmp_path / "caps.jsonl"
    path.write_text(DETECTION + "\n", encoding="utf-8")

    with pytest.raises(DataFormatError, match=r"caps\.jsonl:1"):
        read_caption_records(path)


@pytest.mark.os_agnostic
def test_conversion_count_must_be_positive() -> None:
    with pytest.raises(ContractError, match=">= 1"):
        convert_detection_dataset([DETECTION], 0, GenerationClient(StubBackend()))


# --- template comparison ----------------------------------------------------------------


def _bag_of_words(texts: Sequence[str]) -> np.ndarray:
    vocabulary = ["sofa", "lamp", "bed", "plant", "chair", "table"]
    rows = []
    for text in texts:
        lowered = text.lower()
        counts = [float(lowered.count(word)) for word in vocabulary]
        rows.append([*counts, 0.01])
    return np.array(rows)


@pytest.mark.os_agnostic
def test_noun_first_prompts_retrieve_at_least_as_well_as_sentences_alone() -> None:
    records: list[CaptionRecord] = scene_records(2, GenerationClient(StubBackend()))

    report = prompt_template_report(records, _bag_of_words, k=1)

    assert report.queries == sum(3 * len(record.objects) for record in records)
    assert report.recall[PromptStyle.NOUN_SENTENCE] >= report.recall[PromptStyle.SENTENCE]
    assert set(report.as_record()) == {"k", "queries", "on", "qs", "on+qs"}
