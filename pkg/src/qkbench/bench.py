"""Benchmark harness: one run per (dataset, method, parameterization), suites, tables."""
from __future__ import annotations

import csv
import io
import json
import logging
import os
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, fields
from pathlib import Path

from . import featuremaps as fm
from .classifiers import evaluate, fit_logistic, solve_svm_dual, svm_predict
from .data import DATASETS, FEATURE_DIMS, load_dataset
from .errors import ConfigurationError
from .kernels import (LINEAR, POLYNOMIAL, RBF, ClassicalKernelParams, classical_gram, degree_rule,
                      gamma_scale, quantum_gram)
from .reference import REFERENCE, ROW_KEYS, TITLES
from .training import SpsaConfig, train_quantum_kernel

log = logging.getLogger(__name__)

SCHEMA = 1
QUANTUM_METHODS = ("zz", "covariant")
CLASSICAL_METHODS = ("logistic", "svm-linear", "svm-poly", "svm-rbf")
METHODS = QUANTUM_METHODS + CLASSICAL_METHODS
PARAMETERIZATIONS = (fm.SHARED, fm.DEDICATED)
_SVM_KERNELS = {"svm-linear": LINEAR, "svm-poly": POLYNOMIAL, "svm-rbf": RBF}


@dataclass(frozen=True)
class RunConfig:
    dataset: str
    method: str
    param: str | None = None  # quantum only; defaults to shared
    qkt: bool = False
    max_iterations: int = 400
    C: float = 1.0
    seed: int = 0
    budget_seconds: float | None = None

    def __post_init__(self):
        if self.dataset not in DATASETS:
            raise ConfigurationError(f"unknown dataset {self.dataset!r}; choose from {', '.join(DATASETS)}")
        if self.method not in METHODS:
            raise ConfigurationError(f"unknown method {self.method!r}; choose from {', '.join(METHODS)}")
        if self.quantum:
            if self.param is None:
                object.__setattr__(self, "param", fm.SHARED)
            if self.param not in PARAMETERIZATIONS:
                raise ConfigurationError(f"param must be one of {PARAMETERIZATIONS}, got {self.param!r}")
        elif self.param is not None or self.qkt:
            raise ConfigurationError(f"--param/--qkt only apply to quantum methods, not {self.method}")
        if not self.C > 0:
            raise ConfigurationError(f"C must be positive, got {self.C}")
        if self.max_iterations < 0:
            raise ConfigurationError("max_iterations must be >= 0")

    @property
    def quantum(self) -> bool:
        return self.method in QUANTUM_METHODS

    @property
    def key(self) -> tuple:
        return (self.method, self.param)

    def to_dict(self) -> dict:
        return asdict(self)

    @classmethod
    def from_dict(cls, data: dict) -> "RunConfig":
        known = {f.name for f in fields(cls)}
        unknown = set(data) - known
        if unknown:
            raise ConfigurationError(f"unknown run fields: {sorted(unknown)}")
        return cls(**data)


@dataclass(frozen=True)
class Scores:
    loss: float | None
    acc_train: float
    acc_test: float


@dataclass
class BenchRecord:
    config: dict
    before: Scores | None = None
    after: Scores | None = None
    n_params: int | None = None
    poly_degree: int | None = None
    theta: list[float] | None = None
    qkt: dict | None = None  # serialized QktReport
    wall_time: float = 0.0
    error: str | None = None
    schema: int = SCHEMA

    @property
    def run_config(self) -> RunConfig:
        return RunConfig.from_dict(self.config)

    def to_dict(self) -> dict:
        return asdict(self)

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True)

    @classmethod
    def from_dict(cls, data: dict) -> "BenchRecord":
        data = dict(data)
        if data.get("schema") != SCHEMA:
            raise ConfigurationError(f"unsupported record schema {data.get('schema')!r}")
        for name in ("before", "after"):
            if data.get(name) is not None:
                data[name] = Scores(**data[name])
        return cls(**data)


def _svm_scores(gram_train, gram_cross, split, C) -> Scores:
    model = solve_svm_dual(gram_train, split.y_train, C)
    return Scores(
        model.objective,
        evaluate(svm_predict(model, gram_train), split.y_train).accuracy,
        evaluate(svm_predict(model, gram_cross), split.y_test).accuracy,
    )


def _quantum_scores(spec: fm.EmbeddingSpec, split, C) -> Scores:
    gram = quantum_gram(spec, split.X_train)
    cross = quantum_gram(spec, split.X_train, split.X_test)
    return _svm_scores(gram, cross, split, C)


def run_benchmark(config: RunConfig) -> BenchRecord:
    """Load and scale the data, fit the configured model and score it on both partitions.

    Quantum runs always score the untrained kernel (``theta = 0``) as ``before``;
    with ``qkt`` they also train the fiducial layer and score the best ``theta`` as
    ``after``. The untrained loss must coincide exactly with iteration 0 of the
    training trace.
    """
    start = time.perf_counter()
    split = load_dataset(config.dataset, seed=config.seed)
    record = BenchRecord(config.to_dict())
    if config.quantum:
        spec = fm.EmbeddingSpec.for_features(config.method, split.feature_dim, config.param)
        record.n_params = spec.n_params
        record.before = _quantum_scores(spec, split, config.C)
        record.theta = [float(t) for t in spec.theta]
        if config.qkt:
            spsa = SpsaConfig(max_iterations=config.max_iterations, seed=config.seed,
                              budget_seconds=config.budget_seconds)
            report = train_quantum_kernel(spec, split.X_train, split.y_train, config.C, spsa)
            if report.loss_trace[0] != record.before.loss:
                raise AssertionError(
                    f"untrained loss {record.before.loss!r} differs from QKT iteration 0 "
                    f"{report.loss_trace[0]!r} for {config}"
                )
            trained = spec.with_theta(report.best_theta)
            record.after = _quantum_scores(trained, split, config.C)
            record.theta = list(report.best_theta)
            record.qkt = report.to_dict()
    elif config.method == "logistic":
        model = fit_logistic(split.X_train, split.y_train)
        record.before = Scores(
            None,
            evaluate(model.predict(split.X_train), split.y_train).accuracy,
            evaluate(model.predict(split.X_test), split.y_test).accuracy,
        )
    else:
        kind = _SVM_KERNELS[config.method]
        params = ClassicalKernelParams()
        if kind in (POLYNOMIAL, RBF):
            degree = degree_rule(split.feature_dim) if kind == POLYNOMIAL else 3
            params = ClassicalKernelParams(degree=degree, gamma=gamma_scale(split.X_train))
            if kind == POLYNOMIAL:
                record.poly_degree = degree
        gram = classical_gram(kind, params, split.X_train)
        cross = classical_gram(kind, params, split.X_train, split.X_test)
        scores = _svm_scores(gram, cross, split, config.C)
        record.before = Scores(None, scores.acc_train, scores.acc_test)
    record.wall_time = time.perf_counter() - start
    return record


# --------------------------------------------------------------------------- persistence


def write_records(records, path) -> None:
    """Write JSON lines atomically: a failed run never leaves a half-written file behind."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    tmp = path.with_suffix(path.suffix + ".tmp")
    with tmp.open("w") as fh:
        for record in records:
            fh.write(record.to_json() + "\n")
    os.replace(tmp, path)


def read_records(path) -> list[BenchRecord]:
    records = []
    with Path(path).open() as fh:
        for lineno, line in enumerate(fh, start=1):
            if line.strip():
                try:
                    records.append(BenchRecord.from_dict(json.loads(line)))
                except (json.JSONDecodeError, TypeError, ConfigurationError) as exc:
                    raise ConfigurationError(f"{path}:{lineno}: bad record: {exc}") from None
    return records


def report_filename(config: RunConfig) -> str:
    parts = [config.dataset, config.method] + ([config.param] if config.param else [])
    return "_".join(parts) + ".json"


# --------------------------------------------------------------------------- tables

_MAP_LABELS = {"zz": "ZZFeatureMap", "covariant": "CovariantMap"}
_CLASSICAL_LABELS = {"logistic": "Logistic regression", "svm-linear": "SVM linear",
                     "svm-poly": "SVM poly", "svm-rbf": "SVM rbf"}
HEADER = ("Mapping", "Parameterization (#)", "no-QKT", "After QKT")
MISSING = "n/a"


def format_cell(scores: Scores | None, quantum: bool) -> str:
    if scores is None:
        return MISSING
    loss = f"{scores.loss:.2f}" if quantum and scores.loss is not None else "---"
    return f"{loss} / {scores.acc_train:.2f} - {scores.acc_test:.2f}"


def _reference_cell(cell, quantum: bool) -> str:
    if cell is None:
        return "---"
    loss, tr, ts = cell
    return format_cell(Scores(loss, tr, ts), quantum)


def table_rows(records, dataset: str, reference: bool = False) -> list[list[str]]:
    """Row cells for the dataset's table; an empty record list gives no rows."""
    by_key = {}
    for record in records:
        config = record.run_config
        if config.dataset == dataset and record.error is None:
            by_key[config.key] = record
    if not by_key:
        return []
    feature_dim = FEATURE_DIMS[dataset]
    rows = []
    previous_map = None
    for method, param in ROW_KEYS:
        record = by_key.get((method, param))
        quantum = method in QUANTUM_METHODS
        if quantum:
            n = fm.n_parameters(param, fm.n_qubits_for(method, feature_dim))
            label = _MAP_LABELS[method] if method != previous_map else ""
            previous_map = method
            row = [label, f"{param.capitalize()} ({n})"]
            after = MISSING if record is None else (
                format_cell(record.after, True) if record.after is not None else MISSING)
            row += [format_cell(record.before if record else None, True), after]
        else:
            name = _CLASSICAL_LABELS[method]
            if method == "svm-poly":
                name += f" (d={degree_rule(feature_dim)})"
            row = [name, "", format_cell(record.before if record else None, False), "---"]
        if reference:
            before_ref, after_ref = REFERENCE[dataset][(method, param)]
            row += [_reference_cell(before_ref, quantum), _reference_cell(after_ref, quantum)]
        rows.append(row)
    return rows


def emit_table(records, dataset: str, fmt: str = "text", reference: bool = False) -> str:
    """Render the result table for ``dataset`` as aligned text or CSV.

    Rows follow the fixed layout (two maps x two parameterizations, then four
    classical baselines). Missing runs show ``n/a``; classical rows carry ``---``
    in place of a loss and in the After QKT column.
    """
    if dataset not in DATASETS:
        raise ConfigurationError(f"unknown dataset {dataset!r}")
    header = list(HEADER) + (["Reference no-QKT", "Reference After QKT"] if reference else [])
    rows = table_rows(records, dataset, reference)
    if fmt == "csv":
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(header)
        writer.writerows(rows)
        return buf.getvalue()
    if fmt != "text":
        raise ConfigurationError(f"unknown table format {fmt!r}")
    widths = [max(len(r[i]) for r in [header] + rows) for i in range(len(header))]
    line = lambda cells: "  ".join(c.ljust(w) for c, w in zip(cells, widths)).rstrip()  # noqa: E731
    rule = "-" * len(line(header))
    title = f"Results for the {TITLES[dataset]} dataset (svc_loss / ACC_TR - ACC_TS)"
    out = [title, rule, line(header), rule]
    for i, row in enumerate(rows):
        if i == 4:
            out.append(rule)
        out.append(line(row))
    out.append(rule)
    return "\n".join(out) + "\n"


# --------------------------------------------------------------------------- suites


def load_manifest(path) -> list[RunConfig]:
    """Parse a suite manifest: ``{"defaults": {...}, "runs": [{...}, ...]}``.

    Raises :class:`ConfigurationError` on any malformed or unknown entry, before
    anything is run.
    """
    try:
        data = json.loads(Path(path).read_text())
    except (OSError, json.JSONDecodeError) as exc:
        raise ConfigurationError(f"cannot read manifest {path}: {exc}") from None
    if not isinstance(data, dict) or not isinstance(data.get("runs"), list):
        raise ConfigurationError(f"manifest {path} needs a 'runs' list")
    defaults = data.get("defaults", {})
    configs = []
    for i, entry in enumerate(data["runs"]):
        if not isinstance(entry, dict):
            raise ConfigurationError(f"manifest run #{i} is not an object")
        try:
            configs.append(RunConfig.from_dict({**defaults, **entry}))
        except (ConfigurationError, TypeError) as exc:
            raise ConfigurationError(f"manifest run #{i}: {exc}") from None
    return configs


def _run_safely(config: RunConfig) -> BenchRecord:
    try:
        return run_benchmark(config)
    except Exception as exc:  # noqa: BLE001 - recorded and reflected in the exit status
        log.exception("run %s failed", config)
        return BenchRecord(config.to_dict(), error=f"{type(exc).__name__}: {exc}")


def run_suite(manifest_path, out_dir, jobs: int = 1, progress=None) -> int:
    """Run every manifest entry and persist records, reports and tables under ``out_dir``.

    Returns 0 when all runs succeed, 1 if any run errored and 2 if the manifest
    is invalid (in which case nothing is written).
    """
    try:
        configs = load_manifest(manifest_path)
    except ConfigurationError as exc:
        log.error("%s", exc)
        return 2
    out_dir = Path(out_dir)
    if jobs > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            records = list(pool.map(_run_safely, configs))
    else:
        records = []
        for config in configs:
            records.append(_run_safely(config))
            if progress is not None:
                progress(records[-1])
    if progress is not None and jobs > 1:
        for record in records:
            progress(record)
    write_records(records, out_dir / "records.jsonl")
    reports = out_dir / "reports"
    for record in records:
        if record.qkt is not None:
            reports.mkdir(parents=True, exist_ok=True)
            (reports / report_filename(record.run_config)).write_text(json.dumps(record.qkt))
    datasets = [d for d in DATASETS if any(r.config["dataset"] == d for r in records)]
    text = "\n".join(emit_table(records, d, reference=True) for d in datasets)
    (out_dir / "tables.txt").write_text(text)
    for d in datasets:
        (out_dir / f"table_{d}.csv").write_text(emit_table(records, d, fmt="csv", reference=True))
    return 1 if any(r.error for r in records) else 0


def full_manifest(max_iterations: int = 400, seed: int = 0) -> dict:
    """The 48-run grid: six datasets x (four quantum rows with QKT + four baselines)."""
    runs = []
    for dataset in DATASETS:
        for method, param in ROW_KEYS:
            entry = {"dataset": dataset, "method": method}
            if param is not None:
                entry.update(param=param, qkt=True)
            runs.append(entry)
    return {"defaults": {"max_iterations": max_iterations, "seed": seed, "C": 1.0}, "runs": runs}


def summarize(record: BenchRecord) -> str:
    config = record.run_config
    name = f"{config.dataset:<15} {config.method:<11} {config.param or '':<10}"
    if record.error:
        return f"{name} ERROR {record.error}"
    parts = [format_cell(record.before, config.quantum)]
    if record.after is not None:
        parts.append(format_cell(record.after, True))
    return f"{name} {'  ->  '.join(parts)}  ({record.wall_time:.1f}s)"


def loss_reduction(record: BenchRecord) -> float:
    """Relative drop from the untrained loss to the best QKT loss."""
    if record.qkt is None:
        return 0.0
    initial = record.qkt["loss_trace"][0]
    return float((initial - record.qkt["best_loss"]) / abs(initial)) if initial else 0.0

