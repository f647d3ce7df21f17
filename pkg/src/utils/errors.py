"""
Exception hierarchy for the classifier trainer
"""

from typing import List, Optional


class ClassifierError(Exception):
    """Base class for every error raised by this package"""


class ContractViolation(ClassifierError, ValueError):
    """Inputs break an operation's preconditions (dimensions, labels, ranges)"""


class ResourceLimitError(ClassifierError):
    """Requested simulation exceeds the configured memory budget"""

    def __init__(self, message: str, requested: int, limit: int):
        super().__init__(message)
        self.requested = requested
        self.limit = limit


class ApproximationError(ClassifierError):
    """Suppression polynomial fit is too far from its target"""

    def __init__(self, message: str, residual: float):
        super().__init__(message)
        self.residual = residual


class Converged(ClassifierError):
    """No amplitude survives suppression: the current reference is maximal"""

    def __init__(self, success_weight: float, floor: float):
        super().__init__(f"success weight {success_weight:.3e} below floor {floor:.3e}")
        self.success_weight = success_weight
        self.floor = floor


class DomainError(ClassifierError, ValueError):
    """Argument outside the domain of a cost formula"""


class DatasetError(ClassifierError):
    """Base class for dataset ingestion failures"""


class DatasetParseError(DatasetError):
    """A CSV row could not be parsed"""

    def __init__(self, message: str, line: int):
        super().__init__(f"line {line}: {message}")
        self.line = line


class DatasetSchemaError(DatasetError):
    """Rows parse but do not form a valid dataset"""

    def __init__(self, message: str, line: Optional[int] = None):
        super().__init__(f"line {line}: {message}" if line is not None else message)
        self.line = line


class EmptyDatasetError(DatasetError):
    """File holds no data rows"""


class UnsupportedDimensionError(ClassifierError):
    """Operation only defined for low-dimensional feature spaces"""


class ConfigError(ClassifierError):
    """Run configuration failed validation"""

    def __init__(self, problems: List[str]):
        super().__init__("invalid configuration:\n  " + "\n  ".join(problems))
        self.problems = problems
