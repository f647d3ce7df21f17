"""
Backend logic for training runs
Separates dataset wiring, engine selection, reports and run history from the CLI
"""

import json
import logging
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass, field
from typing import Any, Dict, List, Optional, Sequence, Tuple

from src.backend.circuit import ParamConfig
from src.backend.datasets import Dataset, gen_circle_2d, gen_threshold_1d, load_csv
from src.backend.evaluation import EvaluationRecord, class_probabilities, evaluate, select_threshold
from src.backend.optimizer import TrainResult, brute_force, speedup_report, train_quantum
from src.utils.config import HISTORY_CONFIG
from src.utils.errors import ClassifierError, ConfigError
from src.utils.run_config import RunConfig, build_run_config

logger = logging.getLogger(__name__)

ENGINES = ("quantum", "brute")

# best objectives of the two engines must agree this closely
OBJECTIVE_MATCH_TOLERANCE = 1e-10


def _generate(config: RunConfig, k: int, seed: int) -> Dataset:
    section = config.dataset
    if section.source == "threshold_1d":
        return gen_threshold_1d(k, section.cutoff, seed)
    return gen_circle_2d(k, section.radius, seed)


def _load(config: RunConfig, path: str) -> Dataset:
    dataset = load_csv(path, has_header=config.dataset.has_header, rescale=config.dataset.rescale)
    if dataset.dim != config.circuit.data_dim:
        raise ConfigError([f"circuit.data_dim: {path} has D={dataset.dim}, config has {config.circuit.data_dim}"])
    return dataset


def build_datasets(config: RunConfig) -> Tuple[Dataset, Optional[Dataset]]:
    """
    Training set and optional test set described by the dataset section

    Generators draw k training points from data_seed and test_k test points
    from data_seed + 1. A file source uses every row of the file.
    """
    section = config.dataset
    if section.source == "file":
        train = _load(config, section.path)
    else:
        train = _generate(config, section.k, section.data_seed)

    test = None
    if section.test_path:
        test = _load(config, section.test_path)
    elif section.test_k > 0 and section.source != "file":
        test = _generate(config, section.test_k, section.data_seed + 1)
    return train, test


def _polynomial_summary(result: TrainResult, fit_degree: int) -> Tuple[int, float]:
    """Degree and gamma of the last suppressor a run used"""
    if not result.trace:
        return fit_degree, 0.0
    return result.trace[-1].degree, result.trace[-1].gamma


@dataclass
class RunReport:
    """Self-contained outcome of one training run"""

    config: Dict[str, Any]
    engine: str
    n_params: int
    n_points: int
    best_params: str
    best_objective: float
    best_log_objective: float
    threshold: float
    train_accuracy: float
    test_accuracy: Optional[float]
    converged: bool
    degenerate: bool
    ledger: Dict[str, Any]
    speedup: Dict[str, Any]
    trace: List[Dict[str, Any]] = field(default_factory=list)

    def to_dict(self) -> Dict[str, Any]:
        return asdict(self)


@dataclass(frozen=True)
class CompareRow:
    """One (n, k) cell of the engine comparison table"""

    n: int
    k: int
    modeled_quantum_cost: Optional[float] = None
    closed_form_cost: Optional[float] = None
    classical_cost: Optional[float] = None
    ratio: Optional[float] = None
    speedup: Optional[bool] = None
    objective_match: Optional[bool] = None
    error: str = ""

    def to_dict(self) -> Dict[str, Any]:
        return asdict(self)


class TrainingManager:
    """Manages engine choice, training runs and run history"""

    def __init__(self, engine: str = "quantum"):
        self.run_history: List[Dict] = []
        self.current_engine = "quantum"
        self.switch_engine(engine)

    def switch_engine(self, engine: str):
        """Switch between the quantum and brute-force engines"""
        if engine not in ENGINES:
            raise ConfigError([f"optimizer.engine: unknown engine {engine!r}, expected one of {', '.join(ENGINES)}"])
        self.current_engine = engine

    def train(self, config: RunConfig, dataset: Dataset, engine: Optional[str] = None) -> TrainResult:
        """Run one engine on a training set"""
        engine = engine or self.current_engine
        spec = config.circuit.to_spec()
        points = list(dataset.points)
        max_amplitudes = config.optimizer.max_amplitudes
        if engine == "brute":
            return brute_force(spec, points, max_amplitudes=max_amplitudes)
        return train_quantum(spec, points, config.optimizer.to_quantum_config(), max_amplitudes=max_amplitudes)

    def resolve_threshold(self, config: RunConfig, params: ParamConfig, dataset: Dataset) -> float:
        """Fixed threshold, or the one maximizing accuracy on the given (training) set"""
        if config.evaluation.threshold_mode == "fixed":
            return config.evaluation.threshold
        spec = config.circuit.to_spec()
        return select_threshold(class_probabilities(spec, params, dataset), dataset.labels)

    def evaluate(self, config: RunConfig, params: ParamConfig, dataset: Dataset, threshold: float) -> EvaluationRecord:
        if dataset.dim != config.circuit.data_dim:
            raise ConfigError([f"circuit.data_dim: dataset has D={dataset.dim}, config has {config.circuit.data_dim}"])
        return evaluate(config.circuit.to_spec(), params, dataset, threshold)

    def run(self, config: RunConfig) -> RunReport:
        """
        Train with the configured engine and assemble the report

        Args:
            config: Validated run configuration

        Returns:
            RunReport: embeds the flat config so the run can be repeated
        """
        self.switch_engine(config.optimizer.engine)
        train_set, test_set = build_datasets(config)
        logger.info("Training %s engine on %s (k=%d, n=%d)", self.current_engine, train_set.name, len(train_set),
                    config.circuit.n_params)
        result = self.train(config, train_set)

        threshold = self.resolve_threshold(config, result.best_params, train_set)
        train_record = self.evaluate(config, result.best_params, train_set, threshold)
        test_accuracy = None
        if test_set is not None:
            test_accuracy = self.evaluate(config, result.best_params, test_set, threshold).accuracy

        degree, gamma = _polynomial_summary(result, config.optimizer.degree)
        speedup = speedup_report(config.circuit.n_params, len(train_set), degree, gamma, [result.ledger])
        report = RunReport(
            config=config.to_flat(),
            engine=result.engine,
            n_params=config.circuit.n_params,
            n_points=len(train_set),
            best_params=result.best_params.to_bitstring(),
            best_objective=result.best_objective.value,
            best_log_objective=result.best_objective.log_value,
            threshold=threshold,
            train_accuracy=train_record.accuracy,
            test_accuracy=test_accuracy,
            converged=result.converged,
            degenerate=result.degenerate,
            ledger=result.ledger.to_dict(),
            speedup=speedup.to_dict(),
            trace=[asdict(record) for record in result.trace],
        )
        self.add_to_history(
            {
                "engine": report.engine,
                "n_params": report.n_params,
                "n_points": report.n_points,
                "best_params": report.best_params,
                "best_objective": report.best_objective,
                "train_accuracy": report.train_accuracy,
            }
        )
        return report

    def _compare_cell(self, config: RunConfig, n: int, k: int) -> CompareRow:
        try:
            cell = build_run_config({**config.to_flat(), "n_params": n, "k": k})
            train_set, _ = build_datasets(cell)
            quantum = self.train(cell, train_set, engine="quantum")
            brute = self.train(cell, train_set, engine="brute")
        except ClassifierError as e:
            logger.warning("Compare cell (n=%d, k=%d) failed: %s", n, k, e)
            return CompareRow(n=n, k=k, error=f"{type(e).__name__}: {e}")
        except Exception as e:
            logger.exception("Compare cell (n=%d, k=%d) crashed", n, k)
            return CompareRow(n=n, k=k, error=f"{type(e).__name__}: {e}")

        degree, gamma = _polynomial_summary(quantum, cell.optimizer.degree)
        report = speedup_report(n, k, degree, gamma, [quantum.ledger])
        match = math.isclose(quantum.best_objective.value, brute.best_objective.value, rel_tol=0.0,
                             abs_tol=OBJECTIVE_MATCH_TOLERANCE)
        return CompareRow(
            n=n,
            k=k,
            modeled_quantum_cost=report.modeled_quantum_cost,
            closed_form_cost=report.closed_form_cost,
            classical_cost=report.classical_cost,
            ratio=report.ratio,
            speedup=report.speedup,
            objective_match=match,
        )

    def compare(self, config: RunConfig, cells: Sequence[Tuple[int, int]], max_workers: Optional[int] = None) -> List[CompareRow]:
        """
        Run both engines on every (n, k) cell

        Cells run concurrently; a failing cell is reported in its row and does
        not stop the others. Rows come back in input order.
        """
        if not cells:
            return []
        with ThreadPoolExecutor(max_workers=max_workers) as pool:
            futures = [pool.submit(self._compare_cell, config, n, k) for n, k in cells]
            return [future.result() for future in futures]

    def add_to_history(self, entry: Dict):
        """Add entry to history"""
        self.run_history.append(entry)
        if len(self.run_history) > HISTORY_CONFIG["max_history"]:
            self.run_history.pop(0)

    def get_history(self) -> List[Dict]:
        return self.run_history

    def save_history(self, file_path: str) -> bool:
        """Save history to file"""
        try:
            with open(file_path, "w", encoding="utf-8") as f:
                json.dump(self.run_history, f, indent=2, ensure_ascii=False)
            return True
        except (OSError, TypeError, ValueError) as e:
            logger.error("Could not save history to %s: %s", file_path, e)
            return False

    def load_history(self, file_path: str) -> bool:
        """Load history from file"""
        try:
            with open(file_path, "r", encoding="utf-8") as f:
                history = json.load(f)
        except (OSError, UnicodeDecodeError, json.JSONDecodeError) as e:
            logger.error("Could not load history from %s: %s", file_path, e)
            return False
        if not isinstance(history, list):
            logger.error("History file %s does not hold a list of runs", file_path)
            return False
        self.run_history = history[-HISTORY_CONFIG["max_history"]:]
        return True

    def get_engine_info(self) -> Dict:
        return {"engine": self.current_engine, "history_size": len(self.run_history)}

