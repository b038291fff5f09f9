"""Reverse-mode engine: forward values, gradients, the finite-difference verifier and LZP1 checkpoints."""

from __future__ import annotations

import struct
from collections.abc import Callable
from pathlib import Path

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from slotnav.autodiff import (
    Graph,
    Tensor,
    dump_checkpoint,
    evaluate,
    finite_difference_check,
    gradient,
    load_checkpoint,
    ops,
    parse_checkpoint,
    save_checkpoint,
    scope,
    topological_order,
)
from slotnav.domain.errors import ContractError, DataFormatError, NonFiniteError, ShapeError

def _scalar_graph(fn: Callable[[Tensor], Tensor], x: np.ndarray) -> Graph:
    return Graph(lambda p, _: {"f": fn(p["x"])}, {"x": x})


# --- forward ------------------------------------------------------------------


@pytest.mark.os_agnostic
def test_square_of_three_is_nine() -> None:
    graph = Graph(lambda p, _: {"y": p["x"] * p["x"]}, {"x": np.array([3.0])})
    assert evaluate(graph)["y"].data.tolist() == [9.0]


@pytest.mark.os_agnostic
def test_softmax_of_uniform_logits_is_uniform() -> None:
    out = ops.softmax(Tensor([0.0, 0.0, 0.0]))
    np.testing.assert_allclose(out.data, [1 / 3, 1 / 3, 1 / 3], atol=1e-15)


@pytest.mark.os_agnostic
def test_matmul_shape_contract() -> None:
    assert (Tensor(np.ones((2, 3))) @ Tensor(np.ones((3, 4)))).shape == (2, 4)


@pytest.mark.os_agnostic
def test_matmul_inner_mismatch_names_the_node() -> None:
    with scope("encoder"), pytest.raises(ShapeError, match="encoder/matmul"):
        _ = Tensor(np.ones((2, 3))) @ Tensor(np.ones((2, 3)))


@pytest.mark.os_agnostic
def test_broadcast_beyond_leading_batch_is_rejected() -> None:
    with pytest.raises(ShapeError, match="add"):
        _ = Tensor(np.ones((2, 3))) + Tensor(np.ones((2, 1)))


@pytest.mark.os_agnostic
def test_bias_broadcasts_across_leading_batch() -> None:
    out = Tensor(np.zeros((2, 3))) + Tensor([1.0, 2.0, 3.0])
    assert out.data.tolist() == [[1.0, 2.0, 3.0], [1.0, 2.0, 3.0]]


@pytest.mark.os_agnostic
def test_overflow_raises_naming_the_node() -> None:
    with scope("l1"), pytest.raises(NonFiniteError) as info:
        ops.exp(Tensor([1000.0]))
    assert info.value.node == "l1/exp"


@pytest.mark.os_agnostic
def test_non_finite_leaf_is_rejected() -> None:
    with pytest.raises(NonFiniteError):
        Tensor([np.nan])


@pytest.mark.os_agnostic
def test_evaluate_is_bit_identical_across_runs(rng: np.random.Generator) -> None:
    params = {"w": rng.normal(size=(3, 4)), "x": rng.normal(size=(2, 3))}
    graph = Graph(lambda p, _: {"y": ops.softmax(ops.tanh(p["x"] @ p["w"]))}, params)
    first = evaluate(graph)["y"].data
    second = evaluate(graph)["y"].data
    assert first.tobytes() == second.tobytes()


@pytest.mark.os_agnostic
def test_unbound_input_is_a_contract_error() -> None:
    graph = Graph(lambda p, i: {"y": p["x"] * i["scale"]}, {"x": np.ones(2)}, inputs=("scale",))
    with pytest.raises(ContractError, match="scale"):
        evaluate(graph)
    assert evaluate(graph, {"scale": 2.0})["y"].data.tolist() == [2.0, 2.0]


@pytest.mark.os_agnostic
def test_topological_order_visits_inputs_first() -> None:
    x = Tensor([1.0, 2.0], requires_grad=True, name="x")
    y = ops.tanh(x)
    z = (y * x).sum()
    order = topological_order(z)
    position = {id(node): index for index, node in enumerate(order)}
    for node in order:
        for parent in node.parents:
            assert position[id(parent)] < position[id(node)]


@pytest.mark.os_agnostic
def test_softmax_rows_sum_to_one() -> None:
    rows = ops.softmax(Tensor(np.random.default_rng(3).normal(size=(5, 7)) * 10.0), axis=-1)
    np.testing.assert_allclose(rows.data.sum(axis=-1), 1.0, atol=1e-9)


@pytest.mark.os_agnostic
def test_layer_norm_standardises_rows() -> None:
    out = ops.layer_norm(Tensor(np.random.default_rng(4).normal(3.0, 5.0, size=(6, 16)))).data
    assert np.abs(out.mean(axis=-1)).max() < 1e-7
    assert np.abs(out.var(axis=-1) - 1.0).max() < 1e-6


# --- gradients ----------------------------------------------------------------


@pytest.mark.os_agnostic
def test_derivative_of_square_at_three_is_six() -> None:
    report = gradient(Graph(lambda p, _: {"y": (p["x"] * p["x"]).sum()}, {"x": np.array([3.0])}), "y")
    assert report.gradients["x"].tolist() == [6.0]
    assert report.loss == 9.0


@pytest.mark.os_agnostic
def test_l1_gradient_is_sign_away_from_the_kink() -> None:
    x = np.array([2.0, -1.0, 0.5])
    c = np.array([1.0, 1.0, 1.0])
    report = gradient(Graph(lambda p, _: {"y": (p["x"] - c).abs().sum()}, {"x": x}), "y")
    assert report.gradients["x"].tolist() == [1.0, -1.0, -1.0]


@pytest.mark.os_agnostic
def test_cross_entropy_gradient_at_uniform_logits() -> None:
    graph = Graph(lambda p, _: {"ce": ops.cross_entropy(p["z"], [0])}, {"z": np.zeros((1, 3))})
    grads = gradient(graph, "ce").gradients["z"][0]
    np.testing.assert_allclose(grads, [-2 / 3, 1 / 3, 1 / 3], atol=1e-12)
    assert finite_difference_check(graph, "ce").max_error < 1e-6


@pytest.mark.os_agnostic
def test_gradient_shapes_match_parameters() -> None:
    params = {"w": np.ones((3, 2)), "b": np.zeros(2), "unused": np.ones((4, 4))}
    graph = Graph(lambda p, _: {"y": ((Tensor(np.ones((5, 3))) @ p["w"]) + p["b"]).sum()}, params)
    report = gradient(graph, "y")
    assert {name: grad.shape for name, grad in report.gradients.items()} == {
        "w": (3, 2),
        "b": (2,),
        "unused": (4, 4),
    }
    assert not report.gradients["unused"].any()


@pytest.mark.os_agnostic
def test_non_scalar_output_is_a_contract_error() -> None:
    with pytest.raises(ContractError, match="scalar"):
        gradient(Graph(lambda p, _: {"y": p["x"] * 2.0}, {"x": np.ones(3)}), "y")


@pytest.mark.os_agnostic
def test_unknown_output_is_a_contract_error() -> None:
    with pytest.raises(ContractError, match="no output"):
        gradient(Graph(lambda p, _: {"y": p["x"].sum()}, {"x": np.ones(3)}), "z")


@pytest.mark.os_agnostic
def test_gradients_accumulate_over_repeated_take() -> None:
    graph = Graph(lambda p, _: {"y": ops.take(p["x"], [0, 0, 2]).sum()}, {"x": np.ones(3)})
    assert gradient(graph, "y").gradients["x"].tolist() == [2.0, 0.0, 1.0]


# --- finite differences -------------------------------------------------------


@pytest.mark.os_agnostic
def test_quadratic_passes_with_rounding_error_only() -> None:
    x = np.random.default_rng(11).normal(size=(4, 3))
    report = finite_difference_check(_scalar_graph(lambda t: (t * t).sum(), x), "f")
    assert report.max_error < 1e-6
    assert report.passed


@pytest.mark.os_agnostic
def test_coordinate_on_a_kink_is_excluded() -> None:
    graph = _scalar_graph(lambda t: ops.maximum(t, 0.0).sum(), np.array([0.0, 1.5]))
    check = finite_difference_check(graph, "f").parameters["x"]
    assert check.excluded == 1
    assert check.checked == 1
    assert check.max_error < 1e-8


@pytest.mark.os_agnostic
def test_coordinate_sampling_bounds_the_work() -> None:
    graph = _scalar_graph(lambda t: (t * t).sum(), np.ones((10, 10)))
    check = finite_difference_check(graph, "f", coordinates_per_parameter=5).parameters["x"]
    assert check.checked + check.excluded == 5


@pytest.mark.os_agnostic
def test_non_positive_step_is_a_contract_error() -> None:
    with pytest.raises(ContractError):
        finite_difference_check(_scalar_graph(lambda t: t.sum(), np.ones(2)), "f", step=0.0)


def _unary_cases() -> dict[str, Callable[[Tensor], Tensor]]:
    return {
        "tanh": lambda t: ops.tanh(t).sum(),
        "sigmoid": lambda t: ops.sigmoid(t).sum(),
        "gelu": lambda t: ops.gelu(t).sum(),
        "exp": lambda t: (ops.exp(t) * 0.1).sum(),
        "log": lambda t: ops.log(t * t + 1.0).sum(),
        "sqrt": lambda t: ops.sqrt(t * t + 1.0).sum(),
        "softmax": lambda t: (ops.softmax(t, axis=-1) * Tensor(np.arange(12.0).reshape(3, 4))).sum(),
        "log_softmax": lambda t: (ops.log_softmax(t, axis=0) * Tensor(np.linspace(-1.0, 1.0, 12).reshape(3, 4))).sum(),
        "layer_norm": lambda t: (ops.layer_norm(t) * Tensor(np.linspace(0.5, 2.0, 12).reshape(3, 4))).sum(),
        "l2_normalize": lambda t: (ops.l2_normalize(t) * Tensor(np.linspace(-2.0, 1.0, 12).reshape(3, 4))).sum(),
        "normalize_sum": lambda t: (
            ops.normalize_sum(ops.exp(t), axis=0) * Tensor(np.arange(12.0).reshape(3, 4))
        ).sum(),
        "matmul": lambda t: (t @ Tensor(np.linspace(-1.0, 1.0, 8).reshape(4, 2))).sum(),
        "transpose": lambda t: (t.transpose(1, 0) @ t).sum() * 0.1,
        "reshape": lambda t: (t.reshape(2, 6) * t.reshape(2, 6)).mean(),
        "concat": lambda t: (ops.concat([t, t * 2.0], axis=1) * ops.concat([t, t], axis=1)).sum(),
        "stack": lambda t: (ops.stack([t, ops.tanh(t)], axis=1) * 0.5).sum(),
        "take": lambda t: (ops.take(t, [2, 0, 2], axis=0) * 3.0).sum(),
        "pick": lambda t: ops.pick(t, [3, 0, 1]).sum(),
        "cross_entropy": lambda t: ops.cross_entropy(t, [1, 3, 0]),
        "divide": lambda t: (t / (t * t + 2.0)).sum(),
        "mean": lambda t: (t.mean(axis=0) * t.mean(axis=0)).sum(),
    }


@pytest.mark.os_agnostic
@pytest.mark.parametrize("name", sorted(_unary_cases()))
@settings(max_examples=100, deadline=None)
@given(seed=st.integers(min_value=0, max_value=2**32 - 1))
def test_every_operation_matches_central_differences(name: str, seed: int) -> None:
    x = np.random.default_rng(seed).normal(size=(3, 4))
    report = finite_difference_check(_scalar_graph(_unary_cases()[name], x), "f", step=1e-5)
    assert report.max_error < 1e-4, (name, report.failures())


@pytest.mark.os_agnostic
@settings(max_examples=100, deadline=None)
@given(seed=st.integers(min_value=0, max_value=2**32 - 1))
def test_piecewise_operations_match_away_from_kinks(seed: int) -> None:
    rng = np.random.default_rng(seed)
    x = rng.normal(size=(3, 4))
    other = Tensor(rng.normal(size=(3, 4)))

    def build(t: Tensor) -> Tensor:
        return (ops.minimum(t, other) + ops.maximum(t, other) * 2.0 + ops.clip(t, -0.5, 0.5) + t.abs()).sum()

    report = finite_difference_check(_scalar_graph(build, x), "f", step=1e-5)
    assert report.max_error < 1e-4


# --- checkpoints --------------------------------------------------------------


@pytest.mark.os_agnostic
def test_checkpoint_file_layout(tmp_path: Path) -> None:
    params = {"w": np.arange(6.0).reshape(2, 3), "b": np.array([0.5])}
    path = save_checkpoint(tmp_path / "model.lzp", params)
    blob = path.read_bytes()
    assert blob[:4] == b"LZP1"
    assert int.from_bytes(blob[4:8], "little") == 2
    loaded = load_checkpoint(path)
    assert list(loaded) == ["w", "b"]
    np.testing.assert_array_equal(loaded["w"], params["w"])


@pytest.mark.os_agnostic
def test_checkpoint_with_bad_magic_is_rejected() -> None:
    with pytest.raises(DataFormatError, match="magic"):
        parse_checkpoint(b"NOPE" + bytes(4))


@pytest.mark.os_agnostic
def test_truncated_checkpoint_is_rejected() -> None:
    blob = dump_checkpoint({"w": np.ones((4, 4))})
    with pytest.raises(DataFormatError, match="truncated"):
        parse_checkpoint(blob[:-3])


@pytest.mark.os_agnostic
def test_a_name_that_is_not_utf8_is_a_data_error() -> None:
    blob = b"LZP1" + struct.pack("<II", 1, 2) + b"\xff\xfe" + struct.pack("<I", 0) + bytes(8)

    with pytest.raises(DataFormatError, match="not UTF-8"):
        parse_checkpoint(blob, source="weights.lzp")


@pytest.mark.os_agnostic
def test_a_name_running_past_the_end_is_truncated() -> None:
    blob = b"LZP1" + struct.pack("<II", 1, 4096) + b"w"

    with pytest.raises(DataFormatError, match="truncated parameter name"):
        parse_checkpoint(blob)


@pytest.mark.os_agnostic
def test_trailing_bytes_are_rejected() -> None:
    with pytest.raises(DataFormatError, match="trailing"):
        parse_checkpoint(dump_checkpoint({"w": np.ones(2)}) + b"\x00")
