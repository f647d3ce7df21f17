"""
Thresholded classification: threshold selection, accuracy, decision grids
"""

import itertools
from dataclasses import asdict, dataclass
from typing import Any, Dict, List, Sequence

import numpy as np

from src.backend.circuit import CircuitSpec, ParamConfig, class_probability
from src.backend.datasets import Dataset
from src.utils.errors import ContractViolation, UnsupportedDimensionError


@dataclass(frozen=True)
class EvaluationRecord:
    """Accuracy of a trained classifier on one dataset"""

    threshold: float
    accuracy: float
    true_positive: int
    true_negative: int
    false_positive: int
    false_negative: int
    probabilities: List[float]
    predictions: List[int]
    labels: List[int]

    def to_dict(self) -> Dict[str, Any]:
        return asdict(self)


def class_probabilities(spec: CircuitSpec, params: ParamConfig, dataset: Dataset) -> List[float]:
    if len(params) != spec.n_params:
        raise ContractViolation(f"expected {spec.n_params} parameter bits, got {len(params)}")
    return [class_probability(spec, params, p.features) for p in dataset.points]


def _accuracy(probabilities: Sequence[float], labels: Sequence[int], threshold: float) -> float:
    if not labels:
        return 0.0
    return sum(int(p > threshold) == y for p, y in zip(probabilities, labels)) / len(labels)


def select_threshold(probabilities: Sequence[float], labels: Sequence[int]) -> float:
    """
    Threshold with the best training accuracy

    Candidates are 0, 1 and the midpoints between consecutive distinct
    probabilities; the lowest candidate wins ties.
    """
    distinct = sorted(set(probabilities))
    candidates = [0.0] + [(a + b) / 2 for a, b in zip(distinct, distinct[1:])] + [1.0]
    return max(sorted(candidates), key=lambda t: _accuracy(probabilities, labels, t))


def evaluate(spec: CircuitSpec, params: ParamConfig, dataset: Dataset, threshold: float) -> EvaluationRecord:
    """Classify every point and count the outcomes"""
    if not 0.0 <= threshold <= 1.0:
        raise ContractViolation(f"threshold must lie in [0, 1], got {threshold}")
    probabilities = class_probabilities(spec, params, dataset)
    predictions = [int(p > threshold) for p in probabilities]
    labels = dataset.labels
    pairs = list(zip(predictions, labels))
    return EvaluationRecord(
        threshold=threshold,
        accuracy=_accuracy(probabilities, labels, threshold),
        true_positive=pairs.count((1, 1)),
        true_negative=pairs.count((0, 0)),
        false_positive=pairs.count((1, 0)),
        false_negative=pairs.count((0, 1)),
        probabilities=probabilities,
        predictions=predictions,
        labels=labels,
    )


def decision_grid(spec: CircuitSpec, params: ParamConfig, grid_res: int, threshold: float) -> List[List[float]]:
    """Rows of (features..., p(|10>), class) over [-1, 1]^D, D in {1, 2}"""
    if spec.data_dim > 2:
        raise UnsupportedDimensionError(f"decision grids need D <= 2, circuit has D={spec.data_dim}")
    if grid_res < 1:
        raise ContractViolation(f"grid_res must be >= 1, got {grid_res}")
    axis = np.linspace(-1.0, 1.0, grid_res) if grid_res > 1 else np.zeros(1)
    rows = []
    for point in itertools.product(axis.tolist(), repeat=spec.data_dim):
        p = class_probability(spec, params, point)
        rows.append([*point, p, int(p > threshold)])
    return rows
