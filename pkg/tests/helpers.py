"""
Instance builders shared by the test suites
"""

import math

import numpy as np

from src.backend.circuit import CircuitSpec, DataPoint
from src.backend.optimizer import QuantumConfig


def make_inert_spec(n_params: int = 1, data_dim: int = 1) -> CircuitSpec:
    """Every gate is the identity"""
    return CircuitSpec(
        n_params=n_params,
        data_dim=data_dim,
        encoding_scale=0.0,
        angle_zero=0.0,
        angle_one=0.0,
        entangler=False,
        allow_inert=True,
    )


def make_single_layer_spec(angle_zero: float = 0.0, angle_one: float = math.pi / 2, entangler: bool = False) -> CircuitSpec:
    """One layer without data dependence"""
    return CircuitSpec(
        n_params=1, data_dim=1, encoding_scale=0.0, angle_zero=angle_zero, angle_one=angle_one, entangler=entangler
    )


def make_instance(rng: np.random.Generator, n_params: int, k: int, data_dim: int = 1):
    """Default-architecture circuit with k random labelled points"""
    spec = CircuitSpec(n_params=n_params, data_dim=data_dim)
    features = rng.uniform(-1.0, 1.0, size=(k, data_dim))
    labels = rng.integers(0, 2, size=k)
    data = [DataPoint(tuple(float(v) for v in row), int(y)) for row, y in zip(features, labels)]
    return spec, data


def reference_ry(angle: float) -> np.ndarray:
    return np.array([[math.cos(angle / 2), -math.sin(angle / 2)], [math.sin(angle / 2), math.cos(angle / 2)]])


def reference_unitary(spec: CircuitSpec, bits, features) -> np.ndarray:
    """Layer-by-layer 4x4 product built without the library's gate helpers"""
    cnot = np.eye(4)[[0, 1, 3, 2]]
    unitary = np.eye(4)
    for layer, bit in enumerate(bits):
        x = features[layer % spec.data_dim]
        step = np.kron(reference_ry(spec.angle_one if bit else spec.angle_zero) @ reference_ry(spec.encoding_scale * x), np.eye(2))
        if spec.entangler:
            step = cnot @ step
        unitary = step @ unitary
    return unitary


# Narrow ramp and high degree: resolves close amplitude gaps at the top of the landscape.
# The leakage floor is off: near-ties inside the ramp would end an exact-match run one step short.
SHARP_CONFIG = QuantumConfig(degree=240, softness=0.006, budget_factor=3.0, max_residual=0.25, convergence_fraction=0.0)
