"""Grid worlds, planning, field of view and retrieval-driven episodes."""

from __future__ import annotations

import math
from pathlib import Path

import numpy as np
import orjson
import pytest
from scipy.sparse import lil_matrix
from scipy.sparse.csgraph import shortest_path

from slotnav.domain.errors import ContractError, DataFormatError
from slotnav.fixtures import load_world15, world15_encoder, world15_memory, world15_queries
from slotnav.model import EncoderConfig, init_parameters
from slotnav.navsim import (
    EpisodeResult,
    GridWorld,
    LookupEncoder,
    MemoryEntry,
    NavigationSettings,
    NavQuery,
    Pose,
    TextModelEncoder,
    evaluate_navigation,
    execute_episode,
    in_fov,
    line_of_sight,
    normalize_angle,
    parse_world,
    plan_path,
    ray_cells,
    read_memory,
    read_nav_queries,
    render_world,
    success_rate,
    write_episode_log,
    write_memory,
)

CORRIDOR = """\
#######
#.....#
#######

o1 cup 5 1
"""


def _bfs_oracle(world: GridWorld, start: tuple[int, int], goal: tuple[int, int]) -> float:
    free = [(x, y) for y in range(world.height) for x in range(world.width) if world.is_free((x, y))]
    number = {cell: index for index, cell in enumerate(free)}
    graph = lil_matrix((len(free), len(free)))
    for cell in free:
        for nxt in world.neighbours(cell):
            graph[number[cell], number[nxt]] = 1.0
    distances = shortest_path(graph.tocsr(), unweighted=True, indices=number[start])
    return float(distances[number[goal]])


# --- geometry and worlds ------------------------------------------------------------


@pytest.mark.os_agnostic
@pytest.mark.parametrize(
    ("angle", "expected"),
    [(0.0, 0.0), (math.pi, math.pi), (-math.pi, math.pi), (3 * math.pi / 2, -math.pi / 2), (5 * math.pi, math.pi)],
)
def test_angles_wrap_into_the_half_open_interval(angle: float, expected: float) -> None:
    assert normalize_angle(angle) == pytest.approx(expected)


@pytest.mark.os_agnostic
def test_world_file_parses_grid_start_and_objects() -> None:
    world = load_world15()

    assert (world.width, world.height) == (15, 15)
    assert world.is_free((7, 7))
    assert not world.is_free((6, 7))
    assert world.position("o1") == (0.625, 0.625)
    start = world.start_pose()
    assert world.cell_of(start.position) == (7, 6)
    assert start.theta == pytest.approx(math.pi / 2)


@pytest.mark.os_agnostic
def test_world_renders_back_to_the_same_world() -> None:
    world = parse_world(CORRIDOR)

    again = parse_world(render_world(world))

    assert np.array_equal(again.occupied, world.occupied)
    assert again.objects == world.objects


@pytest.mark.os_agnostic
def test_start_defaults_to_the_first_free_cell_facing_plus_x() -> None:
    assert parse_world(CORRIDOR).start_pose() == Pose(0.375, 0.375, 0.0)


@pytest.mark.os_agnostic
@pytest.mark.parametrize(
    ("text", "message"),
    [
        ("###\n#x#\n###\n", "only contain"),
        ("###\n##\n###\n", "expected 3"),
        ("###\n#.#\n###\n\no1 cup 1\n", "id noun cell_x cell_y"),
        ("###\n#.#\n###\n\no1 cup 9 9\n", "outside the grid"),
        ("###\n#.#\n###\n\no1 cup 1 1\no1 mug 1 1\n", "duplicate object id"),
        ("###\n#.#\n###\n\nstart a b\n", "start cell"),
    ],
)
def test_malformed_worlds_are_data_errors(text: str, message: str) -> None:
    with pytest.raises(DataFormatError, match=message):
        parse_world(text, source="bad.txt")


@pytest.mark.os_agnostic
def test_objects_inside_walls_must_touch_free_space() -> None:
    world = parse_world("#####\n#...#\n#####\n\no1 painting 2 0\n")

    assert world.position("o1") == (0.625, 0.125)
    with pytest.raises(DataFormatError, match="not reachable"):
        parse_world("#####\n#####\n#####\n#...#\n#####\n\no1 safe 2 0\n")


# --- planning ----------------------------------------------------------------------


@pytest.mark.os_agnostic
def test_path_through_the_door_is_shortest() -> None:
    world = load_world15()

    path = plan_path(world, (7, 6), (12, 12))

    assert path[0] == (7, 6)
    assert path[-1] == (12, 12)
    assert (7, 7) in path
    assert len(path) - 1 == 5 + 6


@pytest.mark.os_agnostic
def test_unreachable_goal_gives_an_empty_path() -> None:
    world = parse_world("#####\n#.#.#\n#####\n")

    assert plan_path(world, (1, 1), (3, 1)) == []


@pytest.mark.os_agnostic
def test_occupied_start_is_rejected() -> None:
    with pytest.raises(ContractError, match="start cell"):
        plan_path(load_world15(), (0, 0), (1, 1))


@pytest.mark.os_agnostic
def test_planner_agrees_with_graph_shortest_paths_on_random_worlds(rng: np.random.Generator) -> None:
    for _ in range(200):
        height, width = (int(v) for v in rng.integers(3, 10, size=2))
        world = GridWorld(rng.random((height, width)) < 0.3)
        free = [(x, y) for y in range(height) for x in range(width) if world.is_free((x, y))]
        if len(free) < 2:
            continue
        start, goal = (free[int(i)] for i in rng.choice(len(free), size=2, replace=False))

        path = plan_path(world, start, goal)
        expected = _bfs_oracle(world, start, goal)

        if math.isinf(expected):
            assert path == []
            continue
        assert len(path) - 1 == int(expected)
        assert all(world.is_free(cell) for cell in path)
        assert all(abs(a[0] - b[0]) + abs(a[1] - b[1]) == 1 for a, b in zip(path, path[1:], strict=False))


# --- field of view -----------------------------------------------------------------------


@pytest.mark.os_agnostic
def test_target_at_exactly_the_range_and_half_angle_is_in_view() -> None:
    pose = Pose(0.0, 0.0, 0.0)

    assert in_fov(pose, (3.0, 0.0), math.radians(45), 3.0)
    assert in_fov(pose, (1.0, 1.0), math.radians(45) + 1e-12, 3.0)
    assert not in_fov(pose, (3.0 + 1e-9, 0.0), math.radians(45), 3.0)
    assert not in_fov(pose, (0.0, 1.0), math.radians(45), 3.0)


@pytest.mark.os_agnostic
def test_target_at_the_camera_position_is_in_view() -> None:
    assert in_fov(Pose(1.0, 1.0, 2.0), (1.0, 1.0), math.radians(10), 0.5)


@pytest.mark.os_agnostic
def test_camera_model_is_validated() -> None:
    with pytest.raises(ContractError, match="half_angle"):
        in_fov(Pose(0.0, 0.0), (1.0, 0.0), math.pi, 3.0)
    with pytest.raises(ContractError, match="max_range"):
        in_fov(Pose(0.0, 0.0), (1.0, 0.0), 0.5, 0.0)


@pytest.mark.os_agnostic
def test_walls_block_the_view_only_with_occlusion() -> None:
    world = load_world15()
    pose = Pose(3.125, 1.125, math.pi / 2)
    plant = world.position("o4")

    assert not line_of_sight(world, pose.position, plant)
    assert not in_fov(pose, plant, world=world, occlusion=True)
    assert in_fov(pose, plant, world=world, occlusion=False)


@pytest.mark.os_agnostic
def test_ray_cells_are_4_connected_and_include_both_ends() -> None:
    world = load_world15()

    cells = ray_cells(world, (0.375, 0.375), (2.875, 1.625))

    assert cells[0] == (1, 1)
    assert cells[-1] == (11, 6)
    assert all(abs(a[0] - b[0]) + abs(a[1] - b[1]) == 1 for a, b in zip(cells, cells[1:], strict=False))


# --- episodes ------------------------------------------------------------------------------


World15 = tuple[GridWorld, list[MemoryEntry], list[NavQuery], LookupEncoder]


@pytest.fixture(scope="module")
def world15_setup() -> World15:
    return load_world15(), world15_memory(), world15_queries(), world15_encoder()


def _rates(world15_setup: World15, **overrides: object) -> dict[float, tuple[float, float]]:
    world, memory, queries, encoder = world15_setup
    settings = NavigationSettings().model_copy(update=overrides)
    evaluation = evaluate_navigation(queries, memory, world, encoder, settings)
    return {report.radius: (report.success_rate, report.fov_rate) for report in evaluation.reports}


@pytest.mark.os_agnostic
@pytest.mark.parametrize("k", [2, 3])
def test_world15_success_rates_with_occlusion(world15_setup: World15, k: int) -> None:
    assert _rates(world15_setup, k=k) == {1.0: (0.5, 0.75), 2.0: (0.75, 0.75)}


@pytest.mark.os_agnostic
def test_world15_success_rates_without_occlusion(world15_setup: World15) -> None:
    assert _rates(world15_setup, occlusion=False) == {1.0: (0.5, 1.0), 2.0: (1.0, 1.0)}


@pytest.mark.os_agnostic
def test_world15_with_only_the_best_candidate(world15_setup: World15) -> None:
    assert _rates(world15_setup, k=1) == {1.0: (0.25, 0.5), 2.0: (0.5, 0.5)}


@pytest.mark.os_agnostic
def test_lamp_episode_moves_on_to_the_second_candidate(world15_setup: World15) -> None:
    world, memory, _, encoder = world15_setup

    result = execute_episode(NavQuery("lamp", "o2"), memory, world, 3, encoder)

    assert result.candidates == ("m2", "m3", "m1")
    assert len(result.visited) == 2
    assert result.in_view
    assert result.distance == pytest.approx(0.75)
    assert result.as_record()["stop"] == {"x": 2.375, "y": 0.625, "theta": 0.0}


@pytest.mark.os_agnostic
def test_plant_episode_is_blocked_by_the_wall(world15_setup: World15) -> None:
    world, memory, _, encoder = world15_setup

    result = execute_episode(NavQuery("plant", "o4"), memory, world, 3, encoder)

    assert result.candidates == ("m5", "m6", "m2")
    assert not result.in_view
    assert result.stop == memory[1].pose


@pytest.mark.os_agnostic
def test_success_rate_grows_with_the_radius(world15_setup: World15) -> None:
    world, memory, queries, encoder = world15_setup
    evaluation = evaluate_navigation(queries, memory, world, encoder, NavigationSettings(radii=(0.5, 1.0, 2.0, 4.0)))

    rates = [report.success_rate for report in evaluation.reports]

    assert rates == sorted(rates)
    assert all(report.success_rate <= report.fov_rate for report in evaluation.reports)


@pytest.mark.os_agnostic
def test_unreachable_candidates_are_skipped() -> None:
    world = parse_world("#######\n#..#..#\n#######\n\nstart 1 1 0\no1 cup 5 1\n")
    memory = [
        MemoryEntry.normalized("far", Pose(1.125, 0.375, 0.0), [1.0, 0.0]),
        MemoryEntry.normalized("near", Pose(0.375, 0.375, 0.0), [0.8, 0.6]),
    ]

    result = execute_episode(NavQuery("cup", "o1"), memory, world, 2, LookupEncoder({"cup": [1.0, 0.0]}))

    assert result.skipped == ("far",)
    assert result.visited == (memory[1].pose,)
    assert not result.in_view


@pytest.mark.os_agnostic
def test_nothing_reachable_leaves_the_robot_at_the_start() -> None:
    world = parse_world("#######\n#..#..#\n#######\n\nstart 1 1 0\no1 cup 5 1\n")
    memory = [MemoryEntry.normalized("far", Pose(1.125, 0.375, math.pi), [1.0, 0.0])]

    result = execute_episode(NavQuery("cup", "o1"), memory, world, 3, LookupEncoder({"cup": [1.0, 0.0]}))

    assert not result.reached_any
    assert result.stop == world.start_pose()
    assert result.path_cells == 0


@pytest.mark.os_agnostic
def test_episode_needs_a_known_target_and_positive_k(world15_setup: World15) -> None:
    world, memory, _, encoder = world15_setup

    with pytest.raises(ContractError, match="unknown object"):
        execute_episode(NavQuery("sofa", "o9"), memory, world, 3, encoder)
    with pytest.raises(ContractError, match="k must be"):
        execute_episode(NavQuery("sofa", "o1"), memory, world, 0, encoder)


@pytest.mark.os_agnostic
def test_success_rate_needs_episodes_and_a_positive_radius() -> None:
    stop = Pose(0.0, 0.0)
    runs = [EpisodeResult("q", "o", (), (stop,), stop, 0.5, True, 0)]

    assert success_rate(runs, 1.0).successes == 1
    with pytest.raises(ContractError, match="radius"):
        success_rate(runs, 0.0)
    with pytest.raises(ContractError, match="at least one"):
        success_rate([], 1.0)


@pytest.mark.os_agnostic
def test_text_model_encoder_renders_the_configured_template() -> None:
    config = EncoderConfig()
    encoder = TextModelEncoder(init_parameters(config), config)

    vector = encoder("sofa. Where can I sit down?")

    assert vector.shape == (config.dim,)
    assert np.linalg.norm(vector) == pytest.approx(1.0)


# --- files -----------------------------------------------------------------------------------


@pytest.mark.os_agnostic
def test_memory_file_normalises_embeddings(tmp_path: Path) -> None:
    path = tmp_path / "memory.jsonl"
    path.write_text('{"image_id": "a", "pose": {"x": 1, "y": 2}, "embedding": [3, 4]}\n', encoding="utf-8")

    (entry,) = read_memory(path)

    assert entry.embedding.tolist() == [0.6, 0.8]
    assert entry.pose == Pose(1.0, 2.0, 0.0)
    np.testing.assert_allclose(read_memory(write_memory(tmp_path / "copy.jsonl", [entry]))[0].embedding, [0.6, 0.8])


@pytest.mark.os_agnostic
@pytest.mark.parametrize(
    ("content", "message"),
    [
        ('{"image_id": "a", "pose": {"x": 1, "y": 2}, "embedding": [0, 0]}\n', "zero embedding"),
        ('{"image_id": "a", "pose": {"x": 1}, "embedding": [1]}\n', "pose.y"),
        ("not json\n", "invalid JSON"),
        (
            '{"image_id": "a", "pose": {"x": 1, "y": 2}, "embedding": [1, 0]}\n'
            '{"image_id": "b", "pose": {"x": 1, "y": 2}, "embedding": [1, 0, 0]}\n',
            "dimension differs",
        ),
    ],
)
def test_malformed_memory_files_name_the_line(tmp_path: Path, content: str, message: str) -> None:
    path = tmp_path / "memory.jsonl"
    path.write_text(content, encoding="utf-8")

    with pytest.raises(DataFormatError, match=message) as caught:
        read_memory(path)

    assert caught.value.line is not None


@pytest.mark.os_agnostic
def test_query_file_needs_a_target(tmp_path: Path) -> None:
    path = tmp_path / "queries.jsonl"
    path.write_text('{"query": "sofa", "target": "o1"}\n{"query": "lamp"}\n', encoding="utf-8")

    with pytest.raises(DataFormatError, match=r"queries\.jsonl:2: target"):
        read_nav_queries(path)


@pytest.mark.os_agnostic
def test_episode_log_has_one_record_per_episode(tmp_path: Path, world15_setup: World15) -> None:
    world, memory, queries, encoder = world15_setup
    evaluation = evaluate_navigation(queries, memory, world, encoder)

    lines = write_episode_log(tmp_path / "episodes.jsonl", evaluation.episodes).read_bytes().splitlines()

    records = [orjson.loads(line) for line in lines]
    assert [record["query"] for record in records] == ["sofa", "lamp", "bed", "plant"]
    assert set(records[0]) == {
        "query",
        "target",
        "candidates",
        "stop",
        "distance",
        "in_fov",
        "visited",
        "path_cells",
        "skipped",
    }
