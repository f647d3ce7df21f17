"""
Synthetic datasets and CSV ingestion

CSV format: comma-separated, optional single header line, columns
f_1..f_D,label, one point per line. Floats are written with 17 significant
digits so save/load reproduces every value exactly.
"""

import csv
import io
import logging
import math
from dataclasses import dataclass
from pathlib import Path
from typing import List, Sequence, Tuple, Union

import numpy as np

from src.backend.circuit import DataPoint
from src.utils.config import DATASET_CONFIG
from src.utils.errors import ContractViolation, DatasetParseError, DatasetSchemaError, EmptyDatasetError

logger = logging.getLogger(__name__)

PathLike = Union[str, Path]


@dataclass(frozen=True)
class Dataset:
    """Labelled points sharing one feature dimension"""

    points: Tuple[DataPoint, ...]
    dim: int
    name: str = "dataset"

    def __post_init__(self):
        object.__setattr__(self, "points", tuple(self.points))
        for i, point in enumerate(self.points):
            if len(point.features) != self.dim:
                raise ContractViolation(f"point {i} has {len(point.features)} features, dataset dimension is {self.dim}")

    def __len__(self) -> int:
        return len(self.points)

    def __iter__(self):
        return iter(self.points)

    @property
    def labels(self) -> List[int]:
        return [p.label for p in self.points]

    @property
    def features(self) -> np.ndarray:
        return np.array([p.features for p in self.points], dtype=np.float64).reshape(len(self.points), self.dim)

    def take(self, k: int) -> "Dataset":
        return Dataset(self.points[:k], self.dim, self.name)


def _points(features: np.ndarray, labels: Sequence[int]) -> Tuple[DataPoint, ...]:
    return tuple(DataPoint(tuple(float(v) for v in row), int(y)) for row, y in zip(features, labels))


def gen_threshold_1d(k: int, cutoff: float, seed: int) -> Dataset:
    """k uniform points on [-1, 1], label 1 iff the feature exceeds the cutoff"""
    if k < 1:
        raise ContractViolation(f"k must be >= 1, got {k}")
    if not -1.0 < cutoff < 1.0:
        raise ContractViolation(f"cutoff must lie in (-1, 1), got {cutoff}")
    rng = np.random.default_rng(seed)
    features = rng.uniform(-1.0, 1.0, size=(k, 1))
    labels = (features[:, 0] > cutoff).astype(int)
    return Dataset(_points(features, labels), 1, f"threshold_1d(cutoff={cutoff})")


def gen_circle_2d(k: int, radius: float, seed: int) -> Dataset:
    """k uniform points on [-1, 1]^2, label 1 iff inside the origin-centred circle"""
    if k < 1:
        raise ContractViolation(f"k must be >= 1, got {k}")
    if not 0.0 < radius < math.sqrt(2):
        raise ContractViolation(f"radius must lie in (0, sqrt(2)), got {radius}")
    rng = np.random.default_rng(seed)
    features = rng.uniform(-1.0, 1.0, size=(k, 2))
    labels = (np.sum(features**2, axis=1) < radius**2).astype(int)
    return Dataset(_points(features, labels), 2, f"circle_2d(radius={radius})")


def _parse_row(row: List[str], line: int) -> Tuple[List[float], int]:
    if len(row) < 2:
        raise DatasetParseError(f"expected at least one feature and a label, got {len(row)} fields", line)
    try:
        features = [float(v) for v in row[:-1]]
    except ValueError as e:
        raise DatasetParseError(f"feature is not a number ({e})", line) from e
    if not all(math.isfinite(v) for v in features):
        raise DatasetSchemaError(f"features must be finite, got {row[:-1]}", line)
    try:
        label = int(row[-1])
    except ValueError as e:
        raise DatasetParseError(f"label is not an integer ({row[-1]!r})", line) from e
    return features, label


def load_csv(path: PathLike, has_header: bool = False, rescale: bool = False) -> Dataset:
    """
    Read a dataset, inferring the dimension from the first row

    Args:
        path: CSV file
        has_header: Skip the first line
        rescale: Divide all features by their largest magnitude when it exceeds 1

    Returns:
        Dataset: points in file order
    """
    path = Path(path)
    rows: List[Tuple[List[float], int]] = []
    raw = path.read_bytes()
    try:
        text = raw.decode("utf-8")
    except UnicodeDecodeError as e:
        raise DatasetParseError(f"not valid UTF-8 ({e.reason})", raw.count(b"\n", 0, e.start) + 1) from e
    for line, row in enumerate(csv.reader(io.StringIO(text, newline="")), start=1):
        if has_header and line == 1:
            continue
        if not row or all(not cell.strip() for cell in row):
            continue
        features, label = _parse_row(row, line)
        if rows and len(features) != len(rows[0][0]):
            raise DatasetSchemaError(f"expected {len(rows[0][0])} features, got {len(features)}", line)
        if label not in (0, 1):
            raise DatasetSchemaError(f"label must be 0 or 1, got {label}", line)
        rows.append((features, label))

    if not rows:
        raise EmptyDatasetError(f"no data rows in {path}")

    features = np.array([r[0] for r in rows], dtype=np.float64)
    largest = float(np.max(np.abs(features)))
    if largest > 1.0:
        if not rescale:
            raise DatasetSchemaError(f"features must lie in [-1, 1], largest magnitude is {largest}")
        logger.info("Rescaling features of %s by 1/%g", path.name, largest)
        features = features / largest

    logger.info("Loaded %d points (D=%d) from %s", len(rows), features.shape[1], path)
    return Dataset(_points(features, [r[1] for r in rows]), features.shape[1], path.stem)


def save_csv(dataset: Dataset, path: PathLike, header: bool = False):
    """Write a dataset in the format load_csv reads"""
    digits = DATASET_CONFIG["float_digits"]
    with open(path, "w", encoding="utf-8", newline="") as f:
        writer = csv.writer(f, lineterminator="\n")
        if header:
            writer.writerow([f"f_{i + 1}" for i in range(dataset.dim)] + ["label"])
        for point in dataset.points:
            writer.writerow([format(v, f".{digits}g") for v in point.features] + [point.label])
