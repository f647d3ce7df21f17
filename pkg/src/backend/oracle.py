"""
Oracle simulation: amplitudes of the training register for a fixed program

Two paths compute the same numbers. The factorized path multiplies per-point
amplitudes for every configuration at once (O(2^n * n * k), used by the
optimizers). The joint path runs the full program + training register
statevector with the trainable rotations controlled by training qubits; it is
exponential in 2k + n and exists to certify the factorized path.

Joint register layout: point i owns two program qubits (class q0, ancilla q1)
and training qubit j holds bit j of the configuration. Flat amplitude index:

    index = program_index * 2**n + config_index
    program_index = sum_i (2 * q0_i + q1_i) * 4**i
"""

import logging
import math
from dataclasses import dataclass
from typing import Optional, Sequence, Tuple

import numpy as np

from src.backend.circuit import CLASS_INDEX, CNOT, CircuitSpec, DataPoint, ParamConfig, point_amplitude, ry
from src.utils.config import SIMULATION_CONFIG
from src.utils.errors import ContractViolation, ResourceLimitError

logger = logging.getLogger(__name__)

_HADAMARD = np.array([[1.0, 1.0], [1.0, -1.0]]) / math.sqrt(2)


@dataclass(frozen=True)
class AmplitudeVector:
    """Signed amplitudes over all 2^n configurations for one program"""

    program: Tuple[int, ...]
    amps: np.ndarray
    normalized: bool

    def __post_init__(self):
        amps = np.asarray(self.amps, dtype=np.float64)
        if amps.ndim != 1 or amps.size == 0 or amps.size & (amps.size - 1):
            raise ContractViolation(f"amplitude vector length must be a power of two, got {amps.size}")
        amps.setflags(write=False)
        object.__setattr__(self, "amps", amps)
        object.__setattr__(self, "program", tuple(self.program))

    @property
    def n_params(self) -> int:
        return self.amps.size.bit_length() - 1

    @property
    def probabilities(self) -> np.ndarray:
        return self.amps**2

    def __len__(self) -> int:
        return self.amps.size


@dataclass(frozen=True)
class JointState:
    """Full program + training register statevector (layout in module docstring)"""

    amps: np.ndarray
    n_params: int
    n_points: int

    @property
    def n_qubits(self) -> int:
        return 2 * self.n_points + self.n_params

    def amplitude(self, program_bits: Sequence[Tuple[int, int]], config_index: int) -> float:
        """Amplitude at per-point (q0, q1) pairs and a training configuration"""
        return float(self.amps[program_index(program_bits) * 2**self.n_params + config_index])


def program_index(program_bits: Sequence[Tuple[int, int]]) -> int:
    return sum((2 * q0 + q1) * 4**i for i, (q0, q1) in enumerate(program_bits))


def _check_data(spec: CircuitSpec, data: Sequence[DataPoint]):
    for i, point in enumerate(data):
        if len(point.features) != spec.data_dim:
            raise ContractViolation(f"point {i} has {len(point.features)} features, expected {spec.data_dim}")


def _check_amplitude_budget(spec: CircuitSpec, max_amplitudes: Optional[int]):
    limit = SIMULATION_CONFIG["max_amplitudes"] if max_amplitudes is None else max_amplitudes
    requested = 2**spec.n_params
    if requested > limit:
        raise ResourceLimitError(f"2^{spec.n_params} = {requested} amplitudes exceeds the budget of {limit}", requested, limit)


def config_bits(n_params: int) -> np.ndarray:
    """(2^n, n) matrix whose row j holds the bits of configuration j"""
    indices = np.arange(2**n_params)
    return (indices[:, None] >> np.arange(n_params)[None, :]) & 1


def point_amplitudes_all(spec: CircuitSpec, point: DataPoint, label: int, bits: np.ndarray) -> np.ndarray:
    """<label 0|U(phi, x)|00> for every configuration phi at once"""
    n_configs = bits.shape[0]
    states = np.zeros((n_configs, 4))
    states[:, 0] = 1.0
    trainable = {b: np.kron(ry(spec.angle_map(b)), np.eye(2)) for b in (0, 1)}
    for layer in range(1, spec.n_params + 1):
        data_rotation = np.kron(ry(spec.encoding_scale * point.features[spec.feature_index(layer)]), np.eye(2))
        states = states @ data_rotation.T
        selected = bits[:, layer - 1].astype(bool)[:, None]
        states = np.where(selected, states @ trainable[1].T, states @ trainable[0].T)
        if spec.entangler:
            states = states @ CNOT.T
    return states[:, CLASS_INDEX[label]]


def amplitude_vector(
    spec: CircuitSpec,
    data: Sequence[DataPoint],
    include_norm_factor: bool = False,
    program: Optional[Sequence[int]] = None,
    max_amplitudes: Optional[int] = None,
) -> AmplitudeVector:
    """
    Signed product amplitudes A^y(phi) for every configuration

    Args:
        spec: Circuit architecture
        data: Training points (their labels form the default program)
        include_norm_factor: Multiply by 2^(-n/2), the uniform training-register factor
        program: Explicit label string to read instead of the data labels
        max_amplitudes: Override for the 2^n budget

    Returns:
        AmplitudeVector: amps[j] = prod_i <y_i 0|U(config j, x_i)|00>
    """
    _check_data(spec, data)
    _check_amplitude_budget(spec, max_amplitudes)
    labels = tuple(p.label for p in data) if program is None else tuple(program)
    if len(labels) != len(data):
        raise ContractViolation(f"program has {len(labels)} labels for {len(data)} points")
    if any(y not in (0, 1) for y in labels):
        raise ContractViolation(f"program labels must be 0 or 1, got {labels}")

    bits = config_bits(spec.n_params)
    amps = np.ones(bits.shape[0])
    for point, label in zip(data, labels):
        amps = amps * point_amplitudes_all(spec, point, label, bits)
    if include_norm_factor:
        amps = amps * 2.0 ** (-spec.n_params / 2)
    logger.debug("Amplitude vector: n=%d, k=%d, normalized=%s", spec.n_params, len(data), include_norm_factor)
    return AmplitudeVector(program=labels, amps=amps, normalized=include_norm_factor)


def config_amplitude(spec: CircuitSpec, params: ParamConfig, data: Sequence[DataPoint]) -> float:
    """Classical O(nk) amplitude of one configuration for the data labels"""
    amplitude = 1.0
    for point in data:
        amplitude *= point_amplitude(spec, params, point)
    return amplitude


def _apply_1q(state: np.ndarray, gate: np.ndarray, axis: int) -> np.ndarray:
    return np.moveaxis(np.tensordot(gate, state, axes=([1], [axis])), 0, axis)


def _branch(axis: int, value: int, ndim: int) -> tuple:
    index = [slice(None)] * ndim
    index[axis] = value
    return tuple(index)


def _apply_controlled_1q(state: np.ndarray, gates: Tuple[np.ndarray, np.ndarray], control: int, target: int) -> np.ndarray:
    """Apply gates[v] to the target wherever the control qubit reads v"""
    out = np.empty_like(state)
    sub_target = target - 1 if target > control else target
    for value in (0, 1):
        branch = _branch(control, value, state.ndim)
        out[branch] = _apply_1q(state[branch], gates[value], sub_target)
    return out


def _apply_cnot(state: np.ndarray, control: int, target: int) -> np.ndarray:
    out = state.copy()
    branch = _branch(control, 1, state.ndim)
    sub_target = target - 1 if target > control else target
    out[branch] = np.flip(state[branch], axis=sub_target)
    return out


def joint_state(spec: CircuitSpec, data: Sequence[DataPoint], max_qubits: Optional[int] = None) -> JointState:
    """
    Statevector of the full parallel circuit

    The training register is prepared uniform; for every point and layer the
    data rotation acts on the point's class qubit, the trainable rotation is a
    two-branch operation controlled by the layer's training qubit, and the
    CNOT entangles the point's two program qubits.

    Args:
        spec: Circuit architecture
        data: Training points, one program-register pair each
        max_qubits: Override for the 2k + n cap

    Returns:
        JointState: amplitudes in the documented flat layout
    """
    _check_data(spec, data)
    n, k = spec.n_params, len(data)
    limit = SIMULATION_CONFIG["max_joint_qubits"] if max_qubits is None else max_qubits
    if 2 * k + n > limit:
        raise ResourceLimitError(f"joint register needs {2 * k + n} qubits, cap is {limit}", 2 * k + n, limit)

    n_qubits = 2 * k + n
    state = np.zeros((2,) * n_qubits)
    state[(0,) * n_qubits] = 1.0

    def class_axis(i: int) -> int:
        return 2 * (k - 1 - i)

    def training_axis(j: int) -> int:
        return 2 * k + (n - 1 - j)

    for j in range(n):
        state = _apply_1q(state, _HADAMARD, training_axis(j))

    trainable = (ry(spec.angle_map(0)), ry(spec.angle_map(1)))
    for i, point in enumerate(data):
        q0 = class_axis(i)
        for layer in range(1, n + 1):
            state = _apply_1q(state, ry(spec.encoding_scale * point.features[spec.feature_index(layer)]), q0)
            state = _apply_controlled_1q(state, trainable, training_axis(layer - 1), q0)
            if spec.entangler:
                state = _apply_cnot(state, q0, q0 + 1)

    logger.debug("Joint state: %d qubits (k=%d, n=%d)", n_qubits, k, n)
    return JointState(amps=state.reshape(-1), n_params=n, n_points=k)


def slice_program(js: JointState, program: Sequence[int]) -> AmplitudeVector:
    """Training-register amplitudes at program bits (y_i, 0), normalization factor included"""
    labels = tuple(program)
    if len(labels) != js.n_points:
        raise ContractViolation(f"program has {len(labels)} labels, register holds {js.n_points} points")
    size = 2**js.n_params
    start = program_index([(y, 0) for y in labels]) * size
    return AmplitudeVector(program=labels, amps=js.amps[start : start + size].copy(), normalized=True)


def program_weights(js: JointState) -> np.ndarray:
    """Squared norm of each program-register branch, indexed by program_index"""
    return np.sum(js.amps.reshape(4**js.n_points, 2**js.n_params) ** 2, axis=1)
