"""
Elementary two-qubit data re-uploading classifier

Real orthogonal gate algebra (Y rotations and CNOT only), so every state the
classifier produces is exactly real. Basis order is (q0 q1) with q0 the class
qubit: index = 2 * q0 + q1, i.e. |00>, |01>, |10>, |11>.

Parameter bit ordering: bits[j] drives layer j + 1 and is the coefficient of
2**j in the integer index of a configuration.
"""

import math
from dataclasses import dataclass, field
from typing import Sequence, Tuple

import numpy as np
from typing_extensions import Self

from src.utils.config import CIRCUIT_CONFIG
from src.utils.errors import ContractViolation

# Basis index of |y 0> for class y
CLASS_INDEX = {0: 0, 1: 2}

_IDENTITY2 = np.eye(2)

# Control q0, target q1: swaps |10> and |11>
CNOT = np.array(
    [
        [1.0, 0.0, 0.0, 0.0],
        [0.0, 1.0, 0.0, 0.0],
        [0.0, 0.0, 0.0, 1.0],
        [0.0, 0.0, 1.0, 0.0],
    ]
)


def ry(angle: float) -> np.ndarray:
    """Single-qubit rotation about Y"""
    c, s = math.cos(angle / 2), math.sin(angle / 2)
    return np.array([[c, -s], [s, c]])


def ry_class_qubit(angle: float) -> np.ndarray:
    """Y rotation on q0, identity on q1, as a 4x4 matrix"""
    return np.kron(ry(angle), _IDENTITY2)


@dataclass(frozen=True)
class CircuitSpec:
    """Architecture of the elementary classifier"""

    n_params: int
    data_dim: int
    encoding_scale: float = CIRCUIT_CONFIG["encoding_scale"]
    angle_zero: float = CIRCUIT_CONFIG["angle_zero"]
    angle_one: float = CIRCUIT_CONFIG["angle_one"]
    entangler: bool = CIRCUIT_CONFIG["entangler"]
    # Degenerate specs with equal angles are only useful as test fixtures
    allow_inert: bool = field(default=False, compare=False)

    def __post_init__(self):
        if self.n_params < 1:
            raise ContractViolation(f"n_params must be >= 1, got {self.n_params}")
        if self.data_dim < 1:
            raise ContractViolation(f"data_dim must be >= 1, got {self.data_dim}")
        if self.angle_zero == self.angle_one and not self.allow_inert:
            raise ContractViolation("angle map sends both bit values to the same angle; parameters would be inert")

    def angle_map(self, bit: int) -> float:
        """Trainable rotation angle for a bit value"""
        return self.angle_one if bit else self.angle_zero

    def feature_index(self, layer: int) -> int:
        """Feature uploaded by a 1-indexed layer"""
        return (layer - 1) % self.data_dim


@dataclass(frozen=True)
class ParamConfig:
    """Binary trainable parameters, bits[j] is the coefficient of 2**j"""

    bits: Tuple[int, ...]

    def __post_init__(self):
        if any(b not in (0, 1) for b in self.bits):
            raise ContractViolation(f"parameter bits must be 0 or 1, got {self.bits}")

    @classmethod
    def from_index(cls, index: int, n_params: int) -> Self:
        if not 0 <= index < 2**n_params:
            raise ContractViolation(f"index {index} outside [0, 2^{n_params})")
        return cls(tuple((index >> j) & 1 for j in range(n_params)))

    @classmethod
    def from_bitstring(cls, text: str) -> Self:
        """Parse "0110" where character j is bit j"""
        if not text or any(ch not in "01" for ch in text):
            raise ContractViolation(f"not a bit string: {text!r}")
        return cls(tuple(int(ch) for ch in text))

    @property
    def index(self) -> int:
        return sum(b << j for j, b in enumerate(self.bits))

    def to_bitstring(self) -> str:
        return "".join(str(b) for b in self.bits)

    def __len__(self) -> int:
        return len(self.bits)


@dataclass(frozen=True)
class DataPoint:
    """Feature vector with its class label"""

    features: Tuple[float, ...]
    label: int

    def __post_init__(self):
        if self.label not in (0, 1):
            raise ContractViolation(f"label must be 0 or 1, got {self.label}")


@dataclass(frozen=True)
class StateVec4:
    """Real two-qubit state over |00>, |01>, |10>, |11>"""

    amplitudes: np.ndarray

    def __post_init__(self):
        amps = np.asarray(self.amplitudes, dtype=np.float64)
        if amps.shape != (4,):
            raise ContractViolation(f"two-qubit state needs 4 amplitudes, got shape {amps.shape}")
        norm = float(np.dot(amps, amps))
        if not abs(norm - 1.0) <= CIRCUIT_CONFIG["norm_tolerance"]:
            raise ContractViolation(f"state is not normalized (squared norm {norm!r})")
        amps.setflags(write=False)
        object.__setattr__(self, "amplitudes", amps)

    def amplitude(self, q0: int, q1: int) -> float:
        return float(self.amplitudes[2 * q0 + q1])

    def probability(self, q0: int, q1: int) -> float:
        return self.amplitude(q0, q1) ** 2


@dataclass(frozen=True)
class ObjectiveValue:
    """Product of correct-class probabilities and its logarithm"""

    value: float
    log_value: float


def _check_inputs(spec: CircuitSpec, params: ParamConfig, features: Sequence[float]):
    if len(params) != spec.n_params:
        raise ContractViolation(f"expected {spec.n_params} parameter bits, got {len(params)}")
    if len(features) != spec.data_dim:
        raise ContractViolation(f"expected {spec.data_dim} features, got {len(features)}")


def layer_matrix(spec: CircuitSpec, bit: int, feature: float) -> np.ndarray:
    """One layer: data rotation, trainable rotation, optional CNOT"""
    rotation = ry_class_qubit(spec.angle_map(bit)) @ ry_class_qubit(spec.encoding_scale * feature)
    return CNOT @ rotation if spec.entangler else rotation


def circuit_unitary(spec: CircuitSpec, params: ParamConfig, features: Sequence[float]) -> np.ndarray:
    """
    Compose the full circuit into a single 4x4 orthogonal matrix

    Args:
        spec: Circuit architecture
        params: Binary trainable parameters
        features: One data point's feature vector

    Returns:
        np.ndarray: U with the first layer applied first (U = L_n ... L_1)
    """
    _check_inputs(spec, params, features)
    unitary = np.eye(4)
    for layer, bit in enumerate(params.bits, start=1):
        unitary = layer_matrix(spec, bit, features[spec.feature_index(layer)]) @ unitary
    return unitary


def run_elementary(spec: CircuitSpec, params: ParamConfig, features: Sequence[float]) -> StateVec4:
    """Final state of the elementary circuit started from |00>"""
    _check_inputs(spec, params, features)
    state = np.array([1.0, 0.0, 0.0, 0.0])
    for layer, bit in enumerate(params.bits, start=1):
        state = layer_matrix(spec, bit, features[spec.feature_index(layer)]) @ state
    return StateVec4(state)


def point_amplitude(spec: CircuitSpec, params: ParamConfig, point: DataPoint) -> float:
    """<y 0| U(params, x) |00> for the point's label y"""
    state = run_elementary(spec, params, point.features)
    return float(state.amplitudes[CLASS_INDEX[point.label]])


def objective(spec: CircuitSpec, params: ParamConfig, data: Sequence[DataPoint]) -> ObjectiveValue:
    """
    Product over the data of the probability to measure the correct class

    Args:
        spec: Circuit architecture
        params: Binary trainable parameters
        data: Training points (empty list gives 1)

    Returns:
        ObjectiveValue: value and summed log-probabilities (-inf when any factor is 0)
    """
    # sorted so the floating-point product does not depend on data order
    probabilities = sorted(point_amplitude(spec, params, point) ** 2 for point in data)
    value = math.prod(probabilities)
    if any(p == 0.0 for p in probabilities):
        return ObjectiveValue(value=0.0, log_value=-math.inf)
    return ObjectiveValue(value=value, log_value=math.fsum(math.log(p) for p in probabilities))


def class_probability(spec: CircuitSpec, params: ParamConfig, features: Sequence[float]) -> float:
    """Probability of |10>, the class-1 readout"""
    return run_elementary(spec, params, features).probability(1, 0)


def classify(spec: CircuitSpec, params: ParamConfig, features: Sequence[float], threshold: float) -> int:
    """Class 1 iff p(|10>) is strictly above the threshold"""
    if not 0.0 <= threshold <= 1.0:
        raise ContractViolation(f"threshold must lie in [0, 1], got {threshold}")
    return 1 if class_probability(spec, params, features) > threshold else 0
