"""
Command-line entry point

Subcommands: train, evaluate, boundary, compare, gen-data. Every run
configuration key is a flag of the same name (--n_params 8 --engine brute);
flags override the --config file, which overrides the built-in defaults.
"""

import argparse
import csv
import json
import logging
import sys
from pathlib import Path
from typing import Any, Dict, List, Optional, Sequence, Tuple

from src.backend.circuit import ParamConfig
from src.backend.datasets import Dataset, load_csv, save_csv
from src.backend.evaluation import decision_grid
from src.backend.optimizer import TraceRecord
from src.backend.training_backend import CompareRow, RunReport, TrainingManager, build_datasets
from src.utils.config import CLI_EXIT_CODES, DATASET_CONFIG, LOG_FORMAT
from src.utils.errors import ClassifierError, ConfigError, ResourceLimitError
from src.utils.run_config import FIELD_SECTIONS, RunConfig, load_run_config

logger = logging.getLogger(__name__)

COMPARE_COLUMNS = [
    "n",
    "k",
    "modeled_quantum_cost",
    "closed_form_cost",
    "classical_cost",
    "ratio",
    "speedup",
    "objective_match",
    "error",
]


def _cell(value: Any) -> Any:
    """CSV cell in the dataset float convention"""
    if value is None:
        return ""
    if isinstance(value, float):
        return format(value, f".{DATASET_CONFIG['float_digits']}g")
    return value


def _write_rows(path: Path, header: Sequence[str], rows: Sequence[Sequence[Any]]):
    with open(path, "w", encoding="utf-8", newline="") as f:
        writer = csv.writer(f, lineterminator="\n")
        writer.writerow(header)
        for row in rows:
            writer.writerow([_cell(v) for v in row])


def _write_json(path: Path, payload: Dict[str, Any]):
    with open(path, "w", encoding="utf-8") as f:
        json.dump(payload, f, indent=2)
        f.write("\n")


def trace_path(report_path: Path) -> Path:
    return report_path.with_name(report_path.stem + ".trace.csv")


def parse_cells(text: str) -> List[Tuple[int, int]]:
    """'12x2,4x4' -> [(12, 2), (4, 4)]; an empty string is an empty matrix"""
    cells = []
    for item in filter(None, (part.strip() for part in text.split(","))):
        try:
            n, k = item.lower().split("x")
            cells.append((int(n), int(k)))
        except ValueError as e:
            raise ConfigError([f"cells: cannot parse {item!r}, expected NxK"]) from e
    return cells


def cmd_train(config: RunConfig, out: Path, history: Optional[Path] = None) -> RunReport:
    """Train, then write the JSON report and its trace CSV side file; append the run to a history file if given"""
    manager = TrainingManager(config.optimizer.engine)
    if history is not None and history.exists() and not manager.load_history(str(history)):
        raise OSError(f"cannot read history {history}")
    report = manager.run(config)
    _write_json(out, report.to_dict())
    columns = list(TraceRecord.__dataclass_fields__)
    _write_rows(trace_path(out), columns, [[record[c] for c in columns] for record in report.trace])
    logger.info(
        "best=%s P=%.6g train_accuracy=%.3f threshold=%.6g -> %s", report.best_params, report.best_objective,
        report.train_accuracy, report.threshold, out,
    )
    if history is not None:
        if not manager.save_history(str(history)):
            raise OSError(f"cannot write history {history}")
        logger.info("%d runs in %s", manager.get_engine_info()["history_size"], history)
    return report


def _dataset_for(config: RunConfig, data_path: Optional[str]) -> Tuple[Dataset, Dataset]:
    """(dataset to score, training set for the threshold scan)"""
    train_set, _ = build_datasets(config)
    if data_path:
        return load_csv(data_path, has_header=config.dataset.has_header, rescale=config.dataset.rescale), train_set
    return train_set, train_set


def cmd_evaluate(config: RunConfig, params: ParamConfig, out: Path, data_path: Optional[str] = None) -> Dict[str, Any]:
    """Score a parameter configuration; the optimized threshold is chosen on the training set"""
    manager = TrainingManager(config.optimizer.engine)
    dataset, train_set = _dataset_for(config, data_path)
    threshold = manager.resolve_threshold(config, params, train_set)
    record = manager.evaluate(config, params, dataset, threshold).to_dict()
    record["params"] = params.to_bitstring()
    record["config"] = config.to_flat()
    _write_json(out, record)
    logger.info("accuracy=%.3f on %d points (threshold %.6g) -> %s", record["accuracy"], len(dataset), threshold, out)
    return record


def cmd_boundary(config: RunConfig, params: ParamConfig, out: Path) -> List[List[float]]:
    """Write p(|10>) and the predicted class over a [-1, 1]^D grid"""
    manager = TrainingManager(config.optimizer.engine)
    spec = config.circuit.to_spec()
    threshold = config.evaluation.threshold
    if config.evaluation.threshold_mode == "optimized":
        train_set, _ = build_datasets(config)
        threshold = manager.resolve_threshold(config, params, train_set)
    rows = decision_grid(spec, params, config.evaluation.grid_res, threshold)
    header = [f"f_{i + 1}" for i in range(spec.data_dim)] + ["p_10", "class"]
    _write_rows(out, header, rows)
    logger.info("%d grid points -> %s", len(rows), out)
    return rows


def cmd_compare(config: RunConfig, cells: Sequence[Tuple[int, int]], out: Path, workers: Optional[int] = None) -> List[CompareRow]:
    """Run both engines on every (n, k) cell and tabulate the costs"""
    rows = TrainingManager(config.optimizer.engine).compare(config, cells, max_workers=workers)
    _write_rows(out, COMPARE_COLUMNS, [[getattr(row, c) for c in COMPARE_COLUMNS] for row in rows])
    failed = sum(1 for row in rows if row.error)
    logger.info("%d compare cells (%d failed) -> %s", len(rows), failed, out)
    return rows


def cmd_gen_data(config: RunConfig, out: Path, header: bool = False) -> Dataset:
    """Write the configured training set (and test set, if any) as CSV"""
    if config.dataset.source == "file":
        raise ConfigError(["dataset.source: gen-data needs a generator source"])
    train_set, test_set = build_datasets(config)
    save_csv(train_set, out, header=header)
    if test_set is not None:
        save_csv(test_set, out.with_name(out.stem + ".test.csv"), header=header)
    logger.info("%d points -> %s", len(train_set), out)
    return train_set


def _common_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="flat JSON file of run configuration keys")
    common.add_argument("--out", required=True, type=Path, help="output file")
    common.add_argument("-v", "--verbose", action="store_true", help="debug logging")
    keys = common.add_argument_group("run configuration (override --config)")
    for key, section in FIELD_SECTIONS.items():
        help_text = f"{section}.{key}"
        if key == "seed":
            help_text += " (seed of the quantum engine's sampler)"
        keys.add_argument(f"--{key}", dest=key, default=None, metavar="VALUE", help=help_text)
    return common


def build_parser() -> argparse.ArgumentParser:
    common = _common_parser()
    parser = argparse.ArgumentParser(prog="reupload-search", description="Binary re-uploading classifier trainer")
    sub = parser.add_subparsers(dest="command", required=True)

    train = sub.add_parser("train", parents=[common], help="train and write a JSON report plus a trace CSV")
    train.add_argument("--history", type=Path, help="JSON run history to extend with this run")

    evaluate = sub.add_parser("evaluate", parents=[common], help="score a parameter bit string")
    evaluate.add_argument("--params", required=True, help="parameter bit string, character j is bit j")
    evaluate.add_argument("--data", help="CSV to score instead of the configured training set")

    boundary = sub.add_parser("boundary", parents=[common], help="export a decision grid for D <= 2")
    boundary.add_argument("--params", required=True, help="parameter bit string, character j is bit j")

    compare = sub.add_parser("compare", parents=[common], help="both engines over a matrix of (n, k) cells")
    compare.add_argument("--cells", default="", help="comma-separated NxK cells, e.g. 12x2,4x4")
    compare.add_argument("--workers", type=int, default=None, help="thread pool size")

    gen_data = sub.add_parser("gen-data", parents=[common], help="write a generated dataset as CSV")
    gen_data.add_argument("--header", action="store_true", help="write a header line")
    return parser


def _params(text: str, config: RunConfig) -> ParamConfig:
    try:
        params = ParamConfig.from_bitstring(text)
    except ValueError as e:
        raise ConfigError([f"params: {e}"]) from e
    if len(params) != config.circuit.n_params:
        raise ConfigError([f"params: {len(params)} bits given, circuit.n_params is {config.circuit.n_params}"])
    return params


def run(args: argparse.Namespace) -> int:
    overrides = {key: getattr(args, key) for key in FIELD_SECTIONS}
    config = load_run_config(args.config, overrides)

    if args.command == "train":
        cmd_train(config, args.out, args.history)
    elif args.command == "evaluate":
        cmd_evaluate(config, _params(args.params, config), args.out, args.data)
    elif args.command == "boundary":
        cmd_boundary(config, _params(args.params, config), args.out)
    elif args.command == "compare":
        cmd_compare(config, parse_cells(args.cells), args.out, args.workers)
    elif args.command == "gen-data":
        cmd_gen_data(config, args.out, args.header)
    return CLI_EXIT_CODES["ok"]


def main(argv: Optional[Sequence[str]] = None) -> int:
    """Parse arguments, run one subcommand and map failures to exit codes"""
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.INFO, format=LOG_FORMAT)
    try:
        return run(args)
    except ConfigError as e:
        logger.error("%s", e)
        return CLI_EXIT_CODES["config"]
    except ResourceLimitError as e:
        logger.error("resource limit: %s (requested %d, limit %d)", e, e.requested, e.limit)
        return CLI_EXIT_CODES["resource"]
    except (ClassifierError, OSError) as e:
        logger.error("%s: %s", type(e).__name__, e)
        return CLI_EXIT_CODES["runtime"]


if __name__ == "__main__":
    sys.exit(main())
