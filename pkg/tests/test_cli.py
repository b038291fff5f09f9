"""CLI tests: help, version, module entry and every model/evaluation command."""

from __future__ import annotations

import re
import runpy
import subprocess
import sys
from collections.abc import Callable
from pathlib import Path
from typing import TYPE_CHECKING, Any

import orjson
import pytest

from slotnav import __init__conf__
from slotnav.adapters.cli import cli, main
from slotnav.adapters.cli.exit_codes import ExitCode
from slotnav.composition import build_production
from slotnav.fixtures import desk_scenes
from slotnav.model import write_ppm
from slotnav.retrieval import GroundTruth, build_index, write_embeddings, write_ground_truth

if TYPE_CHECKING:
    from click.testing import CliRunner

_SRC_DIR = str(Path(__file__).resolve().parents[1] / "src")

Factory = Callable[[], object]

DETECTIONS = (
    '{"image_id": "hall", "width": 320, "height": 240, "objects": [{"noun": "lamp", "box": [0.1, 0.1, 0.3, 0.6]}]}\n'
    "{broken\n"
    '{"image_id": "den", "width": 320, "height": 240, "objects": [{"noun": "sofa", "box": [0.2, 0.5, 0.9, 0.9]}]}\n'
)


def _subprocess_env() -> dict[str, str]:
    import os

    existing = os.environ.get("PYTHONPATH", "")
    pythonpath = f"{_SRC_DIR}{os.pathsep}{existing}" if existing else _SRC_DIR
    return {**os.environ, "PYTHONPATH": pythonpath}


def _records(stdout: str) -> list[dict[str, Any]]:
    """The JSON lines a command printed before its summary table."""
    return [orjson.loads(line) for line in stdout.splitlines() if line.startswith("{")]


def _success_rates(stdout: str) -> dict[float, tuple[float, float]]:
    return {record["radius_m"]: (record["sr"], record["fov_rate"]) for record in _records(stdout) if "sr" in record}


@pytest.mark.os_agnostic
def test_help_is_shown_without_subcommand(cli_runner: CliRunner, production_factory: Factory) -> None:
    result = cli_runner.invoke(cli, [], obj=production_factory)
    assert result.exit_code == 0
    assert "Usage:" in result.output


@pytest.mark.os_agnostic
def test_version_outputs_version(cli_runner: CliRunner, production_factory: Factory) -> None:
    result = cli_runner.invoke(cli, ["--version"], obj=production_factory)
    assert result.exit_code == 0
    assert __init__conf__.version in result.output


@pytest.mark.os_agnostic
def test_info_displays_metadata(cli_runner: CliRunner, production_factory: Factory) -> None:
    result = cli_runner.invoke(cli, ["info"], obj=production_factory)
    assert result.exit_code == 0
    assert f"Info for {__init__conf__.name}:" in result.output
    assert __init__conf__.version in result.output


@pytest.mark.os_agnostic
def test_unknown_command_errors(cli_runner: CliRunner, production_factory: Factory) -> None:
    result = cli_runner.invoke(cli, ["does-not-exist"], obj=production_factory)
    assert result.exit_code != 0
    assert "No such command" in result.output


@pytest.mark.os_agnostic
def test_main_returns_zero_for_help() -> None:
    assert main(["--help"], services_factory=build_production) == 0


@pytest.mark.os_agnostic
def test_module_entry_subprocess_version() -> None:
    result = subprocess.run(
        [sys.executable, "-m", "slotnav", "--version"],
        capture_output=True,
        timeout=60,
        check=False,
        encoding="utf-8",
        errors="replace",
        env=_subprocess_env(),
    )
    assert result.returncode == 0
    assert __init__conf__.version in result.stdout


@pytest.mark.os_agnostic
def test_module_entry_runpy_help(monkeypatch: pytest.MonkeyPatch, capsys: pytest.CaptureFixture[str]) -> None:
    monkeypatch.setattr(sys, "argv", ["slotnav"], raising=False)
    with pytest.raises(SystemExit) as exc:
        runpy.run_module("slotnav.__main__", run_name="__main__")
    captured = capsys.readouterr()
    assert exc.value.code == 0
    assert "Usage:" in captured.out


# --- global options ----------------------------------------------------------


@pytest.mark.os_agnostic
def test_seed_flag_reaches_every_seeded_section(
    cli_runner: CliRunner, production_factory: Factory, strip_ansi: Callable[[str], str]
) -> None:
    result = cli_runner.invoke(
        cli, ["--seed", "7", "config", "--format", "json", "--section", "generation"], obj=production_factory
    )
    assert result.exit_code == 0, result.output
    assert re.search(r'"seed":\s*7', strip_ansi(result.output))


@pytest.mark.os_agnostic
def test_config_file_is_applied_after_set(
    cli_runner: CliRunner, production_factory: Factory, strip_ansi: Callable[[str], str], tmp_path: Path
) -> None:
    config_file = tmp_path / "desk.conf"
    config_file.write_text("# desk run\ntrain.total_steps = 40\n", encoding="utf-8")

    result = cli_runner.invoke(
        cli,
        [
            "--set",
            "train.total_steps=10",
            "--config",
            str(config_file),
            "config",
            "--format",
            "json",
            "--section",
            "train",
        ],
        obj=production_factory,
    )

    assert result.exit_code == 0, result.output
    assert re.search(r'"total_steps":\s*40', strip_ansi(result.output))


@pytest.mark.os_agnostic
def test_malformed_config_file_is_a_usage_error(
    cli_runner: CliRunner, production_factory: Factory, tmp_path: Path
) -> None:
    config_file = tmp_path / "bad.conf"
    config_file.write_text("train.seed = 1\nno equals sign here\n", encoding="utf-8")

    result = cli_runner.invoke(cli, ["--config", str(config_file), "info"], obj=production_factory)

    assert result.exit_code == 2
    assert "bad.conf:2" in result.output


@pytest.mark.os_agnostic
def test_invalid_setting_exits_with_the_config_code(cli_runner: CliRunner, production_factory: Factory) -> None:
    result = cli_runner.invoke(cli, ["--set", "navigation.k=0", "nav-eval"], obj=production_factory)

    assert result.exit_code == ExitCode.CONFIG_ERROR
    assert "error: config: invalid [navigation] configuration" in result.stderr


# --- retrieval ---------------------------------------------------------------


@pytest.mark.os_agnostic
def test_eval_retrieval_without_inputs_scores_the_orthonormal_fixture(
    cli_runner: CliRunner, production_factory: Factory
) -> None:
    result = cli_runner.invoke(cli, ["eval-retrieval"], obj=production_factory)

    assert result.exit_code == 0, result.output
    (record,) = _records(result.stdout)
    assert record == {"t2i_AR@1": 1.0, "t2i_AR@5": 1.0, "i2t_AR@1": 1.0, "i2t_AR@5": 1.0}
    assert "average recall" in result.stdout


@pytest.mark.os_agnostic
def test_eval_retrieval_prints_the_same_bytes_on_every_run(cli_runner: CliRunner, production_factory: Factory) -> None:
    first = cli_runner.invoke(cli, ["eval-retrieval", "--k", "1", "--k", "2"], obj=production_factory)
    second = cli_runner.invoke(cli, ["eval-retrieval", "--k", "1", "--k", "2"], obj=production_factory)

    assert first.exit_code == second.exit_code == 0, first.output
    assert first.stdout_bytes == second.stdout_bytes


@pytest.mark.os_agnostic
def test_eval_retrieval_reads_embedding_files(
    cli_runner: CliRunner, production_factory: Factory, tmp_path: Path
) -> None:
    texts = write_embeddings(tmp_path / "texts.lze", build_index([[1.0, 0.1], [0.0, 1.0]], ["q0", "q1"]))
    images = write_embeddings(tmp_path / "images.lze", build_index([[1.0, 0.0], [0.0, 1.0]], ["a", "b"]))
    truth = write_ground_truth(tmp_path / "truth.tsv", GroundTruth.from_pairs([("q0", "b"), ("q1", "b")]))

    result = cli_runner.invoke(
        cli,
        ["eval-retrieval", "--texts", str(texts), "--images", str(images), "--ground-truth", str(truth), "--k", "1"],
        obj=production_factory,
    )

    assert result.exit_code == 0, result.output
    assert _records(result.stdout) == [{"t2i_AR@1": 0.5, "i2t_AR@1": 0.5}]


@pytest.mark.os_agnostic
def test_eval_retrieval_inputs_come_together(
    cli_runner: CliRunner, production_factory: Factory, tmp_path: Path
) -> None:
    texts = write_embeddings(tmp_path / "texts.lze", build_index([[1.0]], ["q0"]))

    result = cli_runner.invoke(cli, ["eval-retrieval", "--texts", str(texts)], obj=production_factory)

    assert result.exit_code == 2
    assert "must be given together" in result.output


@pytest.mark.os_agnostic
def test_unknown_ground_truth_ids_are_invalid_arguments(
    cli_runner: CliRunner, production_factory: Factory, tmp_path: Path
) -> None:
    index = build_index([[1.0, 0.0], [0.0, 1.0]], ["a", "b"])
    texts = write_embeddings(tmp_path / "texts.lze", index)
    images = write_embeddings(tmp_path / "images.lze", index)
    truth = write_ground_truth(tmp_path / "truth.tsv", GroundTruth.from_pairs([("a", "zz")]))

    result = cli_runner.invoke(
        cli,
        ["eval-retrieval", "--texts", str(texts), "--images", str(images), "--ground-truth", str(truth), "--k", "1"],
        obj=production_factory,
    )

    assert result.exit_code == ExitCode.INVALID_ARGUMENT
    assert "error: contract: ground truth references unknown ids: zz" in result.stderr.splitlines()


@pytest.mark.os_agnostic
def test_corrupt_embedding_file_is_a_data_error(
    cli_runner: CliRunner, production_factory: Factory, tmp_path: Path
) -> None:
    broken = tmp_path / "broken.lze"
    broken.write_bytes(b"NOPE" + bytes(8))

    result = cli_runner.invoke(
        cli, ["eval-retrieval", "--texts", str(broken), "--images", str(broken), "--ground-truth", str(broken)],
        obj=production_factory,
    )

    assert result.exit_code == ExitCode.GENERAL_ERROR
    assert "bad magic" in result.stderr
    assert any(line.startswith("error: data: ") for line in result.stderr.splitlines())


@pytest.mark.os_agnostic
def test_index_then_retrieve_ranks_the_desk_scenes(
    cli_runner: CliRunner, testing_factory: Factory, tmp_path: Path
) -> None:
    index_path = tmp_path / "desk.lze"

    indexed = cli_runner.invoke(cli, ["index", "--out", str(index_path)], obj=testing_factory)
    retrieved = cli_runner.invoke(
        cli, ["retrieve", "--index", str(index_path), "--query", "sofa", "--query", "lamp", "--k", "3"],
        obj=testing_factory,
    )

    assert indexed.exit_code == 0, indexed.output
    assert _records(indexed.stdout) == [{"path": str(index_path), "items": 8, "dim": 32}]
    assert retrieved.exit_code == 0, retrieved.output
    records = _records(retrieved.stdout)
    assert [record["query"] for record in records] == ["sofa", "lamp"]
    assert all(len(record["results"]) == 3 for record in records)
    scores = [result["score"] for result in records[0]["results"]]
    assert scores == sorted(scores, reverse=True)


@pytest.mark.os_agnostic
def test_index_reads_an_image_folder(cli_runner: CliRunner, testing_factory: Factory, tmp_path: Path) -> None:
    for scene in desk_scenes()[:3]:
        write_ppm(tmp_path / f"{scene.image_id}.ppm", scene.image)

    result = cli_runner.invoke(
        cli, ["index", "--images", str(tmp_path), "--out", str(tmp_path / "three.lze")], obj=testing_factory
    )

    assert result.exit_code == 0, result.output
    assert _records(result.stdout)[0]["items"] == 3


@pytest.mark.os_agnostic
def test_retrieve_needs_a_query(cli_runner: CliRunner, testing_factory: Factory, tmp_path: Path) -> None:
    index_path = write_embeddings(tmp_path / "one.lze", build_index([[1.0]], ["a"]))

    result = cli_runner.invoke(cli, ["retrieve", "--index", str(index_path)], obj=testing_factory)

    assert result.exit_code == 2
    assert "at least one --query" in result.output


# --- navigation ----------------------------------------------------------------


@pytest.mark.os_agnostic
def test_nav_eval_on_the_bundled_world(cli_runner: CliRunner, production_factory: Factory, tmp_path: Path) -> None:
    log_path = tmp_path / "episodes.jsonl"

    result = cli_runner.invoke(cli, ["nav-eval", "--log", str(log_path)], obj=production_factory)

    assert result.exit_code == 0, result.output
    records = _records(result.stdout)
    assert _success_rates(result.stdout) == {1.0: (0.5, 0.75), 2.0: (0.75, 0.75)}
    episodes = [record for record in records if "query" in record]
    assert len(episodes) == 4
    assert len(log_path.read_text(encoding="utf-8").splitlines()) == 4


@pytest.mark.os_agnostic
def test_nav_eval_repeats_its_output_and_episode_log_exactly(
    cli_runner: CliRunner, production_factory: Factory, tmp_path: Path
) -> None:
    logs = [tmp_path / "first.jsonl", tmp_path / "second.jsonl"]

    runs = [cli_runner.invoke(cli, ["nav-eval", "--log", str(log)], obj=production_factory) for log in logs]

    assert [run.exit_code for run in runs] == [0, 0], runs[0].output
    assert runs[0].stdout_bytes == runs[1].stdout_bytes
    assert logs[0].read_bytes() == logs[1].read_bytes()


@pytest.mark.os_agnostic
def test_nav_eval_without_occlusion_sees_through_walls(cli_runner: CliRunner, production_factory: Factory) -> None:
    result = cli_runner.invoke(cli, ["nav-eval", "--no-occlusion"], obj=production_factory)

    assert result.exit_code == 0, result.output
    reports = _success_rates(result.stdout)
    assert reports == {1.0: (0.5, 1.0), 2.0: (1.0, 1.0)}


@pytest.mark.os_agnostic
def test_nav_eval_with_a_single_candidate(cli_runner: CliRunner, production_factory: Factory) -> None:
    result = cli_runner.invoke(cli, ["nav-eval", "--k", "1"], obj=production_factory)

    reports = _success_rates(result.stdout)
    assert reports == {1.0: (0.25, 0.5), 2.0: (0.5, 0.5)}


@pytest.mark.os_agnostic
def test_nav_eval_inputs_come_together(cli_runner: CliRunner, production_factory: Factory, tmp_path: Path) -> None:
    world = tmp_path / "world.txt"
    world.write_text("###\n#.#\n###\n", encoding="utf-8")

    result = cli_runner.invoke(cli, ["nav-eval", "--world", str(world)], obj=production_factory)

    assert result.exit_code == 2
    assert "must be given together" in result.output


# --- training --------------------------------------------------------------------


@pytest.mark.os_agnostic
def test_gradcheck_passes_on_a_desk_batch(cli_runner: CliRunner, production_factory: Factory) -> None:
    result = cli_runner.invoke(cli, ["gradcheck", "--coordinates", "3"], obj=production_factory)

    assert result.exit_code == 0, result.output
    summary = _records(result.stdout)[-1]
    assert summary["passed"] is True


@pytest.mark.os_agnostic
def test_train_writes_the_run_artifacts(cli_runner: CliRunner, testing_factory: Factory, tmp_path: Path) -> None:
    out_dir = tmp_path / "run"

    result = cli_runner.invoke(cli, ["train", "--steps", "2", "--out", str(out_dir)], obj=testing_factory)

    assert result.exit_code == 0, result.output
    assert [record["step"] for record in _records(result.stdout)] == [0, 1]
    assert {path.name for path in out_dir.iterdir()} == {"checkpoint.lzp", "metrics.jsonl", "manifest.json"}


@pytest.mark.os_agnostic
def test_trained_checkpoint_feeds_the_index(cli_runner: CliRunner, testing_factory: Factory, tmp_path: Path) -> None:
    cli_runner.invoke(cli, ["train", "--steps", "1", "--out", str(tmp_path)], obj=testing_factory)

    result = cli_runner.invoke(
        cli,
        ["index", "--checkpoint", str(tmp_path / "checkpoint.lzp"), "--out", str(tmp_path / "desk.lze")],
        obj=testing_factory,
    )

    assert result.exit_code == 0, result.output


@pytest.mark.os_agnostic
def test_overfit_that_runs_out_of_steps_exits_one(
    cli_runner: CliRunner, testing_factory: Factory, tmp_path: Path
) -> None:
    result = cli_runner.invoke(
        cli,
        ["--set", "train.learning_rate=0", "train", "--overfit", "--steps", "2", "--out", str(tmp_path)],
        obj=testing_factory,
    )

    assert result.exit_code == ExitCode.GENERAL_ERROR
    summary = _records(result.stdout)[-1]
    assert summary["converged"] is False
    assert (tmp_path / "checkpoint.lzp").is_file()


@pytest.mark.os_agnostic
def test_train_records_and_images_come_together(
    cli_runner: CliRunner, testing_factory: Factory, tmp_path: Path
) -> None:
    records = tmp_path / "records.jsonl"
    records.write_text("", encoding="utf-8")

    result = cli_runner.invoke(cli, ["train", "--records", str(records)], obj=testing_factory)

    assert result.exit_code == 2


# --- caption augmentation ----------------------------------------------------------


@pytest.mark.os_agnostic
def test_augment_writes_good_records_and_reports_bad_lines(
    cli_runner: CliRunner, production_factory: Factory, tmp_path: Path
) -> None:
    source = tmp_path / "dets.jsonl"
    source.write_text(DETECTIONS, encoding="utf-8")
    out = tmp_path / "caps.jsonl"

    result = cli_runner.invoke(
        cli, ["--offline", "augment", "--input", str(source), "--out", str(out), "--count", "2"], obj=production_factory
    )

    assert result.exit_code == ExitCode.GENERAL_ERROR
    assert _records(result.stdout)[0] == {"records": 2, "generated_captions": 4, "errors": 1, "out": str(out)}
    assert any(line.startswith(f"error: data: {source}:2: invalid JSON") for line in result.stderr.splitlines())
    assert len(out.read_text(encoding="utf-8").splitlines()) == 2


@pytest.mark.os_agnostic
def test_augment_count_must_be_positive(cli_runner: CliRunner, production_factory: Factory, tmp_path: Path) -> None:
    source = tmp_path / "dets.jsonl"
    source.write_text(DETECTIONS, encoding="utf-8")

    result = cli_runner.invoke(
        cli, ["augment", "--input", str(source), "--out", str(tmp_path / "o.jsonl"), "--count", "0"],
        obj=production_factory,
    )

    assert result.exit_code == 2
