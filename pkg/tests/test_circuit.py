"""Tests for the elementary two-qubit classifier."""

import math

import numpy as np
import pytest

from src.backend.circuit import (
    CircuitSpec,
    DataPoint,
    ParamConfig,
    StateVec4,
    circuit_unitary,
    class_probability,
    classify,
    objective,
    point_amplitude,
    run_elementary,
)
from src.utils.errors import ContractViolation
from tests.helpers import make_inert_spec, make_instance, make_single_layer_spec, reference_unitary

SQRT_HALF = 1 / math.sqrt(2)


def test_identity_circuit_keeps_ground_state():
    state = run_elementary(make_inert_spec(), ParamConfig((0,)), (0.37,))
    np.testing.assert_array_equal(state.amplitudes, [1.0, 0.0, 0.0, 0.0])


def test_half_turn_without_entangler():
    state = run_elementary(make_single_layer_spec(), ParamConfig((1,)), (0.8,))
    np.testing.assert_allclose(state.amplitudes, [SQRT_HALF, 0.0, SQRT_HALF, 0.0], atol=1e-15)


def test_half_turn_with_entangler_moves_10_to_11():
    state = run_elementary(make_single_layer_spec(entangler=True), ParamConfig((1,)), (0.8,))
    np.testing.assert_allclose(state.amplitudes, [SQRT_HALF, 0.0, 0.0, SQRT_HALF], atol=1e-15)


def test_point_amplitude_on_identity_circuit():
    spec = make_inert_spec()
    assert point_amplitude(spec, ParamConfig((0,)), DataPoint((0.1,), 0)) == 1.0
    assert point_amplitude(spec, ParamConfig((0,)), DataPoint((0.1,), 1)) == 0.0


def test_point_amplitude_class_one_after_half_turn():
    value = point_amplitude(make_single_layer_spec(), ParamConfig((1,)), DataPoint((0.0,), 1))
    assert value == pytest.approx(SQRT_HALF, abs=1e-15)


def test_objective_of_empty_dataset_is_one():
    result = objective(CircuitSpec(n_params=3, data_dim=1), ParamConfig((0, 1, 0)), [])
    assert result.value == 1.0
    assert result.log_value == 0.0


def test_objective_single_point_is_squared_amplitude():
    spec = CircuitSpec(n_params=3, data_dim=1)
    params = ParamConfig((1, 0, 1))
    point = DataPoint((0.42,), 1)
    assert objective(spec, params, [point]).value == pytest.approx(point_amplitude(spec, params, point) ** 2, rel=1e-15)


def test_objective_matches_independent_matrix_products(rng):
    spec, data = make_instance(rng, n_params=4, k=3)
    params = ParamConfig.from_index(11, 4)
    expected = 1.0
    for point in data:
        column = reference_unitary(spec, params.bits, point.features)[:, 0]
        expected *= column[2 * point.label] ** 2
    result = objective(spec, params, data)
    assert result.value == pytest.approx(expected, abs=1e-12)
    assert math.exp(result.log_value) == pytest.approx(result.value, rel=1e-9)


def test_objective_is_permutation_invariant(rng):
    spec, data = make_instance(rng, n_params=5, k=4, data_dim=2)
    params = ParamConfig.from_index(19, 5)
    assert objective(spec, params, data) == objective(spec, params, list(reversed(data)))


def test_objective_zero_factor_gives_minus_infinity_log():
    result = objective(make_inert_spec(), ParamConfig((0,)), [DataPoint((0.0,), 1)])
    assert result.value == 0.0
    assert result.log_value == -math.inf


def test_classify_identity_circuit_is_class_zero():
    assert classify(make_inert_spec(), ParamConfig((1,)), (0.9,), 0.5) == 0


def test_classify_full_turn_is_class_one():
    spec = make_single_layer_spec(angle_one=math.pi)
    assert class_probability(spec, ParamConfig((1,)), (0.0,)) == pytest.approx(1.0)
    assert classify(spec, ParamConfig((1,)), (0.0,), 0.5) == 1


def test_classify_tie_goes_to_class_zero():
    spec = make_single_layer_spec()
    p = class_probability(spec, ParamConfig((1,)), (0.0,))
    assert p == pytest.approx(0.5)
    assert classify(spec, ParamConfig((1,)), (0.0,), p) == 0


@pytest.mark.parametrize("threshold", [-0.1, 1.5])
def test_classify_rejects_threshold_outside_unit_interval(threshold):
    with pytest.raises(ContractViolation):
        classify(make_inert_spec(), ParamConfig((0,)), (0.0,), threshold)


def test_states_are_real_and_normalized(rng):
    for _ in range(1000):
        n = int(rng.integers(1, 9))
        d = int(rng.integers(1, 4))
        spec = CircuitSpec(
            n_params=n,
            data_dim=d,
            encoding_scale=float(rng.uniform(0, 2 * math.pi)),
            angle_zero=float(rng.uniform(-math.pi, 0)),
            angle_one=float(rng.uniform(0.01, math.pi)),
            entangler=bool(rng.integers(0, 2)),
        )
        params = ParamConfig.from_index(int(rng.integers(0, 2**n)), n)
        state = run_elementary(spec, params, tuple(rng.uniform(-1, 1, size=d)))
        assert state.amplitudes.dtype == np.float64
        assert abs(float(np.sum(state.amplitudes**2)) - 1.0) <= 1e-12


def test_circuit_unitary_is_orthogonal_and_matches_reference(rng):
    spec, data = make_instance(rng, n_params=7, k=1, data_dim=3)
    params = ParamConfig.from_index(77, 7)
    unitary = circuit_unitary(spec, params, data[0].features)
    np.testing.assert_allclose(unitary.T @ unitary, np.eye(4), atol=1e-12)
    np.testing.assert_allclose(unitary, reference_unitary(spec, params.bits, data[0].features), atol=1e-12)
    np.testing.assert_allclose(unitary[:, 0], run_elementary(spec, params, data[0].features).amplitudes, atol=1e-12)


def test_run_elementary_is_deterministic(rng):
    spec, data = make_instance(rng, n_params=6, k=1)
    params = ParamConfig.from_index(42, 6)
    first = run_elementary(spec, params, data[0].features).amplitudes
    second = run_elementary(spec, params, data[0].features).amplitudes
    assert first.tobytes() == second.tobytes()


def test_dimension_mismatch_is_rejected():
    spec = CircuitSpec(n_params=2, data_dim=2)
    with pytest.raises(ContractViolation):
        run_elementary(spec, ParamConfig((0, 1)), (0.1,))
    with pytest.raises(ContractViolation):
        run_elementary(spec, ParamConfig((0, 1, 1)), (0.1, 0.2))


@pytest.mark.parametrize(
    "kwargs",
    [
        {"n_params": 0, "data_dim": 1},
        {"n_params": 2, "data_dim": 0},
        {"n_params": 2, "data_dim": 1, "angle_zero": 0.3, "angle_one": 0.3},
    ],
)
def test_invalid_circuit_spec(kwargs):
    with pytest.raises(ContractViolation):
        CircuitSpec(**kwargs)


def test_param_config_index_round_trip():
    for index in range(2**5):
        params = ParamConfig.from_index(index, 5)
        assert params.index == index
        assert ParamConfig.from_bitstring(params.to_bitstring()) == params
    # character j is bit j, the coefficient of 2**j
    assert ParamConfig.from_bitstring("1000").index == 1
    assert ParamConfig.from_bitstring("0001").index == 8


@pytest.mark.parametrize("text", ["", "012", "1a"])
def test_param_config_rejects_bad_bitstrings(text):
    with pytest.raises(ContractViolation):
        ParamConfig.from_bitstring(text)


def test_state_vector_validation():
    with pytest.raises(ContractViolation):
        StateVec4(np.array([1.0, 1.0, 0.0, 0.0]))
    with pytest.raises(ContractViolation):
        StateVec4(np.array([1.0, 0.0]))
    state = StateVec4(np.array([0.0, 0.6, 0.8, 0.0]))
    assert state.probability(1, 0) == pytest.approx(0.64)
    assert state.amplitude(0, 1) == 0.6


def test_state_vector_rejects_non_finite_amplitudes():
    with pytest.raises(ContractViolation):
        StateVec4(np.array([math.nan, 0.0, 0.0, 0.0]))
    with pytest.raises(ContractViolation):
        run_elementary(CircuitSpec(n_params=2, data_dim=1), ParamConfig((0, 1)), (math.nan,))


def test_data_point_label_must_be_binary():
    with pytest.raises(ContractViolation):
        DataPoint((0.0,), 2)
