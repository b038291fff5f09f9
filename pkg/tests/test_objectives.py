"""Box geometry, matching and the training objective."""

from __future__ import annotations

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from slotnav.autodiff import Tensor, finite_difference_check
from slotnav.domain.enums import MatchCost
from slotnav.domain.errors import ContractError
from slotnav.model import constants, init_parameters, split_trainable
from slotnav.objectives import (
    AnnotationSet,
    Assignment,
    LossBatch,
    LossWeights,
    brute_force_assignment,
    concat_captions,
    contrastive_loss,
    giou,
    giou_tensor,
    hungarian,
    iou,
    l1_box,
    loss_graph,
    multilabel_contrastive_loss,
    pairwise_cost,
    total_loss,
)
from slotnav.training import TrainConfig, desk_examples, make_batch

DeskSetup = tuple[TrainConfig, dict[str, np.ndarray], LossBatch]


def _box() -> st.SearchStrategy[tuple[float, float, float, float]]:
    coordinate = st.floats(min_value=0.0, max_value=1.0, allow_nan=False)
    return st.tuples(coordinate, coordinate, coordinate, coordinate).map(
        lambda c: (min(c[0], c[2]), min(c[1], c[3]), max(c[0], c[2]), max(c[1], c[3]))
    )


def _area(box: tuple[float, ...]) -> float:
    return (box[2] - box[0]) * (box[3] - box[1])


# --- box geometry -----------------------------------------------------------------


@pytest.mark.os_agnostic
def test_overlapping_squares_have_known_iou_and_giou() -> None:
    assert iou((0, 0, 2, 2), (1, 1, 3, 3)) == pytest.approx(1 / 7)
    assert giou((0, 0, 2, 2), (1, 1, 3, 3)) == pytest.approx(1 / 7 - 2 / 9)


@pytest.mark.os_agnostic
def test_disjoint_squares_have_negative_giou() -> None:
    assert iou((0, 0, 1, 1), (2, 2, 3, 3)) == 0.0
    assert giou((0, 0, 1, 1), (2, 2, 3, 3)) == pytest.approx(-7 / 9)


@pytest.mark.os_agnostic
def test_identical_boxes_score_one_even_when_degenerate() -> None:
    assert giou((0.2, 0.2, 0.6, 0.7), (0.2, 0.2, 0.6, 0.7)) == 1.0
    assert giou((0.3, 0.3, 0.3, 0.3), (0.3, 0.3, 0.3, 0.3)) == 1.0


@pytest.mark.os_agnostic
def test_l1_sums_absolute_corner_differences() -> None:
    assert l1_box((0, 0, 2, 2), (1, 1, 3, 3)) == 4.0


@pytest.mark.os_agnostic
@given(_box(), _box())
@settings(max_examples=300, deadline=None)
def test_giou_is_bounded_by_iou_and_symmetric(a: tuple[float, ...], b: tuple[float, ...]) -> None:
    value = giou(a, b)

    assert -1.0 - 1e-12 <= value <= 1.0 + 1e-12
    assert value <= iou(a, b) + 1e-12
    assert value == pytest.approx(giou(b, a), abs=1e-12)


@pytest.mark.os_agnostic
def test_giou_stays_inside_the_open_range_on_ten_thousand_random_pairs(rng: np.random.Generator) -> None:
    corners = np.sort(rng.uniform(0.0, 1.0, size=(10_000, 2, 2, 2)), axis=-1)

    for pair in corners:
        a = (pair[0, 0, 0], pair[0, 1, 0], pair[0, 0, 1], pair[0, 1, 1])
        b = (pair[1, 0, 0], pair[1, 1, 0], pair[1, 0, 1], pair[1, 1, 1])
        value = giou(a, b)

        assert -1.0 < value <= iou(a, b) + 1e-12 <= 1.0 + 1e-12
        assert value == pytest.approx(giou(b, a), abs=1e-12)


@pytest.mark.os_agnostic
def test_distinct_degenerate_boxes_sit_on_the_lower_limit() -> None:
    assert giou((0.1, 0.1, 0.1, 0.1), (0.5, 0.5, 0.5, 0.5)) == -1.0


@pytest.mark.os_agnostic
@given(st.lists(st.tuples(_box(), _box()), min_size=1, max_size=5))
@settings(max_examples=100, deadline=None)
def test_differentiable_giou_matches_the_float_form_on_proper_boxes(
    pairs: list[tuple[tuple[float, ...], tuple[float, ...]]],
) -> None:
    proper = [(a, b) for a, b in pairs if _area(a) > 1e-6 and _area(b) > 1e-6]
    if not proper:
        return
    pred = Tensor(np.array([a for a, _ in proper]))
    target = Tensor(np.array([b for _, b in proper]))

    values = giou_tensor(pred, target).data[:, 0]

    np.testing.assert_allclose(values, [giou(a, b) for a, b in proper], atol=1e-9)


@pytest.mark.os_agnostic
def test_pairwise_cost_modes() -> None:
    assert pairwise_cost([[0, 0, 2, 2]], [[1, 1, 3, 3]])[0, 0] == pytest.approx(4 + 1 - (1 / 7 - 2 / 9))
    literal = pairwise_cost([[0, 0, 2, 2]], [[1, 1, 3, 3]], MatchCost.LITERAL)
    assert literal[0, 0] == pytest.approx(4 + (1 / 7 - 2 / 9))


@pytest.mark.os_agnostic
def test_pairwise_cost_rejects_inverted_boxes() -> None:
    with pytest.raises(ContractError, match="x1 > x2"):
        pairwise_cost([[0.5, 0.1, 0.2, 0.4]], [[0.0, 0.0, 1.0, 1.0]])


# --- matching -------------------------------------------------------------------------


@pytest.mark.os_agnostic
def test_more_slots_than_annotations_leaves_slots_unmatched() -> None:
    result = hungarian([[5, 1], [2, 4], [3, 3]])

    assert result == Assignment(pairs=((0, 1), (1, 0)), unmatched=(2,), cost=3.0)


@pytest.mark.os_agnostic
def test_ties_resolve_to_the_lexicographically_smallest_assignment() -> None:
    assert hungarian(np.zeros((3, 3))).pairs == ((0, 0), (1, 1), (2, 2))
    assert hungarian(np.ones((3, 2))).pairs == ((0, 0), (1, 1))


@pytest.mark.os_agnostic
def test_fewer_slots_than_annotations_matches_every_slot() -> None:
    result = hungarian([[3, 1, 2]])

    assert result.pairs == ((0, 1),)
    assert result.unmatched == ()


@pytest.mark.os_agnostic
def test_non_finite_costs_are_rejected() -> None:
    with pytest.raises(ContractError, match="finite"):
        hungarian([[0.0, np.inf]])


@pytest.mark.os_agnostic
def test_hungarian_agrees_with_exhaustive_search_on_random_matrices(rng: np.random.Generator) -> None:
    for _ in range(500):
        rows, cols = (int(v) for v in rng.integers(1, 5, size=2))
        if rng.random() < 0.3:
            cost = rng.integers(0, 3, size=(rows, cols)).astype(np.float64)
        else:
            cost = rng.uniform(0.0, 4.0, size=(rows, cols))

        fast = hungarian(cost)
        slow = brute_force_assignment(cost)

        assert fast.pairs == slow.pairs
        assert fast.cost == pytest.approx(slow.cost, abs=1e-12)
        assert len(fast.pairs) == min(rows, cols)


# --- contrastive terms ------------------------------------------------------------------


@pytest.mark.os_agnostic
def test_aligned_pairs_have_the_known_contrastive_loss() -> None:
    assert contrastive_loss(Tensor(np.eye(2)), np.eye(2), 1.0).item() == pytest.approx(np.log(1 + np.exp(-1)))


@pytest.mark.os_agnostic
def test_lower_temperature_sharpens_aligned_pairs() -> None:
    aligned = np.eye(3)

    sharp = contrastive_loss(Tensor(aligned), aligned, 0.07).item()

    assert sharp < contrastive_loss(Tensor(aligned), aligned, 1.0).item()


@pytest.mark.os_agnostic
def test_contrastive_loss_rejects_mismatched_batches() -> None:
    with pytest.raises(ContractError, match="equal"):
        contrastive_loss(Tensor(np.eye(2)), np.eye(3), 1.0)


@pytest.mark.os_agnostic
def test_multilabel_loss_without_matches_is_zero_and_flagged() -> None:
    config = TrainConfig().encoder
    params = constants(init_parameters(config))
    slots = Tensor(np.zeros((1, config.num_slots, config.slot_dim)))
    empty = Assignment(pairs=(), unmatched=tuple(range(config.num_slots)), cost=0.0)

    result = multilabel_contrastive_loss(slots, [np.eye(1, config.dim)], [empty], params, 0.07)

    assert result.empty
    assert result.matched == 0
    assert result.loss.item() == 0.0


@pytest.mark.os_agnostic
def test_a_caption_shared_across_images_is_one_column(rng: np.random.Generator) -> None:
    config = TrainConfig().encoder
    params = constants(init_parameters(config))
    slots = Tensor(rng.normal(size=(2, config.num_slots, config.slot_dim)))
    mug = rng.normal(size=(1, config.dim))
    first_slot = Assignment(pairs=((0, 0),), unmatched=tuple(range(1, config.num_slots)), cost=0.0)

    merged = multilabel_contrastive_loss(slots, [mug, mug], [first_slot] * 2, params, 0.07, texts=[["mug"], ["mug"]])
    separate = multilabel_contrastive_loss(slots, [mug, mug], [first_slot] * 2, params, 0.07)

    assert merged.matched == separate.matched == 2
    assert merged.loss.item() == pytest.approx(0.0, abs=1e-12)
    assert separate.loss.item() == pytest.approx(np.log(2.0))


@pytest.mark.os_agnostic
def test_caption_concatenation_is_seeded() -> None:
    captions = ["sofa", "lamp", "bed", "plant"]

    first = concat_captions(captions, 5)

    assert first == concat_captions(captions, 5)
    assert sorted(first.split(". ")) == sorted(captions)


@pytest.mark.os_agnostic
def test_annotation_sets_need_one_caption_per_box() -> None:
    with pytest.raises(ContractError, match="captions for"):
        AnnotationSet(("sofa", "lamp"), np.array([[0.1, 0.1, 0.4, 0.4]]))


# --- total loss ----------------------------------------------------------------------------


@pytest.fixture(scope="module")
def desk_batch_setup() -> DeskSetup:
    config = TrainConfig()
    trainable, text_parameters = split_trainable(init_parameters(config.encoder))
    batch = make_batch(desk_examples(), 0, config, text_parameters, indices=[0, 1])
    return config, trainable, batch


@pytest.mark.os_agnostic
def test_total_loss_is_the_weighted_sum_of_its_components(
    desk_batch_setup: DeskSetup,
) -> None:
    config, trainable, batch = desk_batch_setup
    weights = LossWeights(alpha=1.0, beta=2.0, gamma=0.5, delta=3.0)

    report = total_loss(batch, trainable, config.encoder, weights)

    expected = report.l_c + 2.0 * report.l_l1 + 0.5 * report.l_giou + 3.0 * report.l_mc
    assert report.total == pytest.approx(expected, rel=1e-12)
    assert report.matched == 4
    assert set(report.as_record(7)) == {"step", "L_C", "L_L1", "L_GIoU", "L_MC", "total"}


@pytest.mark.os_agnostic
def test_loss_gradients_match_finite_differences_on_a_two_image_batch(
    desk_batch_setup: DeskSetup,
) -> None:
    config, trainable, batch = desk_batch_setup
    weights = LossWeights(temperature=1.0)
    graph = loss_graph(batch, trainable, config.encoder, weights, slot_seed=0)

    report = finite_difference_check(graph, "total", step=1e-5, tolerance=1e-4, coordinates_per_parameter=4, seed=0)

    assert report.passed, report.failures()
    assert report.max_error < 1e-4
