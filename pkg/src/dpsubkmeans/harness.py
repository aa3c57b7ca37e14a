"""Epsilon / internalK sweeps with repeats, and their CSV outputs."""

import csv
import logging
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field, fields, replace
from pathlib import Path
from typing import Optional

from .core import lloyd_from
from .datasets import NAMED_SPECS, load_named, make_blobs
from .dp_kmeans import BASELINE, DEFAULT_ITERATIONS, SUBCLUSTER, Strategy, audit_invariant, run_dp_kmeans
from .mechanisms import DEFAULT_RHO, split_total
from .metrics import CostGapRecord, GapSummary, aggregate, cost_gap, improvement_ratio

log = logging.getLogger(__name__)

DEFAULT_EPS_GRID = (0.1, 0.2, 0.4, 0.6, 0.8, 1.0, 1.5, 2.0)
# ratios reported for comparison; digits was described only as "almost the same"
REFERENCE_RATIOS = {"wine": 4.13, "breast_cancer": 2.83, "iris": 1.1, "digits": 1.0}

RAW_COLUMNS = ["dataset", "algorithm", "internalK", "epsilon", "repeat", "seed",
               "cost_dp", "cost_lloyd", "cost_gap", "invariant_violations"]
AGG_COLUMNS = ["dataset", "algorithm", "internalK", "epsilon", "n", "mean_gap", "std_gap"]
PLOT_COLUMNS = ["epsilon", "series", "mean_gap", "std_gap"]

# mixed-radix bounds for cell seeds; configs beyond them are rejected
_N_ALG, _N_EPS, _N_IK, _N_REP = 2, 1000, 100, 100_000
SYNTHETIC_CENTERS = ((0.0, 0.0), (10.0, 0.0), (0.0, 10.0))


class ConfigError(ValueError):
    pass


@dataclass
class SweepConfig:
    dataset: str = "synthetic"
    name: Optional[str] = None
    label_column: Optional[str] = None
    k: Optional[int] = None
    algorithms: tuple = (BASELINE, SUBCLUSTER)
    eps_grid: tuple = DEFAULT_EPS_GRID
    internal_k: tuple = ()
    repeats: Optional[int] = None
    iters: int = DEFAULT_ITERATIONS
    rho: float = DEFAULT_RHO
    seed: int = 0
    out: str = "results"
    workers: int = 1
    synthetic_n: int = 50
    synthetic_spread: float = 1.0

    def __post_init__(self):
        self.algorithms = tuple(self.algorithms)
        self.eps_grid = tuple(float(e) for e in self.eps_grid)
        self.internal_k = tuple(int(i) for i in self.internal_k)

    @property
    def dataset_name(self):
        if self.name:
            return self.name
        if self.dataset == "synthetic":
            return "synthetic"
        return Path(self.dataset).stem

    def resolved(self):
        """Fill dataset-dependent defaults (k, internalK, repeats) and validate."""
        spec = NAMED_SPECS.get(self.dataset_name)
        cfg = replace(
            self,
            k=self.k if self.k is not None else (spec.k if spec else 3),
            internal_k=self.internal_k or ((spec.internal_k,) if spec else (4,)),
            repeats=self.repeats if self.repeats is not None else (spec.repeats if spec else 30),
        )
        cfg.validate()
        return cfg

    def validate(self):
        bad = [a for a in self.algorithms if a not in (BASELINE, SUBCLUSTER)]
        if bad or not self.algorithms:
            raise ConfigError(f"algorithms must be a non-empty subset of baseline/subcluster, got {self.algorithms}")
        if not self.eps_grid or any(not e > 0 for e in self.eps_grid):
            raise ConfigError(f"epsilon grid must be non-empty and positive, got {self.eps_grid}")
        if len(set(self.eps_grid)) != len(self.eps_grid):
            raise ConfigError("epsilon grid has duplicates")
        if not self.internal_k or any(i < 2 for i in self.internal_k):
            raise ConfigError(f"internalK values must be >= 2, got {self.internal_k}")
        if self.repeats is None or self.repeats < 1:
            raise ConfigError(f"repeats must be >= 1, got {self.repeats}")
        if self.k is None or self.k < 1:
            raise ConfigError(f"k must be >= 1, got {self.k}")
        if self.iters < 1:
            raise ConfigError(f"iters must be >= 1, got {self.iters}")
        if not 0 < self.rho < 1:
            raise ConfigError(f"rho must lie in (0, 1), got {self.rho}")
        if self.workers < 1:
            raise ConfigError(f"workers must be >= 1, got {self.workers}")
        if self.seed < 0:
            raise ConfigError("seed must be non-negative")
        if len(self.eps_grid) > _N_EPS or len(self.internal_k) > _N_IK or self.repeats > _N_REP:
            raise ConfigError("grid or repeat count too large for cell-seed derivation")

    @classmethod
    def from_mapping(cls, mapping):
        known = {f.name for f in fields(cls)}
        unknown = set(mapping) - known
        if unknown:
            raise ConfigError(f"unknown config keys: {sorted(unknown)}")
        return cls(**mapping)


def cell_seed(base_seed, alg_index, eps_index, ik_index, repeat):
    """Injective mixed-radix encoding of a sweep cell into an integer seed."""
    s = base_seed
    for value, radix in ((alg_index, _N_ALG), (eps_index, _N_EPS), (ik_index, _N_IK), (repeat, _N_REP)):
        if not 0 <= value < radix:
            raise ValueError(f"cell index {value} outside [0, {radix})")
        s = s * radix + value
    return s


@dataclass(frozen=True)
class Cell:
    algorithm: str
    epsilon: float
    internal_k: Optional[int]
    repeat: int
    seed: int


@dataclass(frozen=True)
class FailedCell:
    cell: Cell
    error: str


@dataclass
class SweepOutcome:
    records: list
    failures: list = field(default_factory=list)


def load_dataset(cfg):
    if cfg.dataset == "synthetic":
        return make_blobs(cfg.synthetic_n, SYNTHETIC_CENTERS, cfg.synthetic_spread, cfg.seed)
    return load_named(cfg.dataset, cfg.dataset_name, label_column=cfg.label_column)


def sweep_cells(cfg):
    cells = []
    for a, alg in enumerate((BASELINE, SUBCLUSTER)):
        if alg not in cfg.algorithms:
            continue
        iks = list(enumerate(cfg.internal_k)) if alg == SUBCLUSTER else [(0, None)]
        for e, eps in enumerate(cfg.eps_grid):
            for j, ik in iks:
                for r in range(cfg.repeats):
                    cells.append(Cell(alg, eps, ik, r, cell_seed(cfg.seed, a, e, j, r)))
    return cells


def run_cell(data, cfg, cell):
    budget = split_total(cell.epsilon, cfg.iters, cfg.rho)
    strategy = Strategy(cell.algorithm, cell.internal_k) if cell.internal_k else Strategy(cell.algorithm)
    res = run_dp_kmeans(data, cfg.k, budget, strategy, cell.seed)
    ref = lloyd_from(data, res.initial_centroids)
    _, violations = audit_invariant(res.trace)
    return CostGapRecord(
        algorithm=cell.algorithm, dataset=data.name, epsilon_total=cell.epsilon,
        internal_k=cell.internal_k, repeat_index=cell.repeat, cost_dp=res.cost_dp,
        cost_lloyd=ref.cost, cost_gap=cost_gap(res.cost_dp, ref.cost), seed=cell.seed,
        invariant_violations=len(violations),
    )


def _safe_cell(args):
    data, cfg, cell = args
    try:
        return run_cell(data, cfg, cell)
    except Exception as exc:  # one bad cell must not abort the sweep
        return FailedCell(cell, f"{type(exc).__name__}: {exc}")


def run_sweep(cfg, data=None):
    """Run every (algorithm, epsilon, internalK, repeat) cell of ``cfg``."""
    cfg = cfg.resolved()
    if data is None:
        data = load_dataset(cfg)
    if data.name != cfg.dataset_name:
        data = replace(data, name=cfg.dataset_name)
    cells = sweep_cells(cfg)
    jobs = [(data, cfg, c) for c in cells]
    if cfg.workers > 1:
        with ProcessPoolExecutor(max_workers=cfg.workers) as pool:
            results = list(pool.map(_safe_cell, jobs, chunksize=8))
    else:
        results = [_safe_cell(j) for j in jobs]
    records = sorted((r for r in results if isinstance(r, CostGapRecord)), key=CostGapRecord.sort_key)
    failures = [r for r in results if isinstance(r, FailedCell)]
    for f in failures:
        log.warning("cell %s failed: %s", f.cell, f.error)
    return SweepOutcome(records, failures)


# --------------------------------------------------------------------------
# persistence

def _ik(value):
    return "" if value is None else str(value)


def write_raw(records, path):
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(RAW_COLUMNS)
        for r in sorted(records, key=CostGapRecord.sort_key):
            w.writerow([r.dataset, r.algorithm, _ik(r.internal_k), repr(r.epsilon_total), r.repeat_index,
                        r.seed, repr(r.cost_dp), repr(r.cost_lloyd), repr(r.cost_gap), r.invariant_violations])


def read_raw(path):
    out = []
    with open(path, newline="") as fh:
        for row in csv.DictReader(fh):
            out.append(CostGapRecord(
                algorithm=row["algorithm"], dataset=row["dataset"], epsilon_total=float(row["epsilon"]),
                internal_k=int(row["internalK"]) if row["internalK"] else None,
                repeat_index=int(row["repeat"]), cost_dp=float(row["cost_dp"]),
                cost_lloyd=float(row["cost_lloyd"]), cost_gap=float(row["cost_gap"]),
                seed=int(row["seed"]), invariant_violations=int(row["invariant_violations"]),
            ))
    return out


def write_agg(summaries, path):
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(AGG_COLUMNS)
        for s in summaries:
            w.writerow([s.dataset, s.algorithm, _ik(s.internal_k), repr(s.epsilon), s.n,
                        repr(s.mean_gap), repr(s.std_gap)])


def read_agg(path):
    out = []
    with open(path, newline="") as fh:
        for row in csv.DictReader(fh):
            out.append(GapSummary(row["dataset"], row["algorithm"],
                                  int(row["internalK"]) if row["internalK"] else None,
                                  float(row["epsilon"]), int(row["n"]),
                                  float(row["mean_gap"]), float(row["std_gap"])))
    return out


def write_plot_tables(summaries, out_dir):
    by_ds = {}
    for s in summaries:
        by_ds.setdefault(s.dataset, []).append(s)
    paths = []
    for ds, rows in sorted(by_ds.items()):
        path = Path(out_dir) / f"plot_{ds}.csv"
        with open(path, "w", newline="") as fh:
            w = csv.writer(fh, lineterminator="\n")
            w.writerow(PLOT_COLUMNS)
            for s in sorted(rows, key=lambda s: (s.epsilon, s.series)):
                w.writerow([repr(s.epsilon), s.series, repr(s.mean_gap), repr(s.std_gap)])
        paths.append(path)
    return paths


def write_failures(failures, path):
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["algorithm", "internalK", "epsilon", "repeat", "seed", "error"])
        for f in failures:
            c = f.cell
            w.writerow([c.algorithm, _ik(c.internal_k), repr(c.epsilon), c.repeat, c.seed, f.error])


def emit_results(records, output_dir, failures=()):
    """Write ``raw.csv``, ``agg.csv`` and one ``plot_<dataset>.csv`` per dataset."""
    records = list(records)
    if not records:
        raise ValueError("no records to write")
    out = Path(output_dir)
    out.mkdir(parents=True, exist_ok=True)
    write_raw(records, out / "raw.csv")
    summaries = aggregate(records)
    write_agg(summaries, out / "agg.csv")
    paths = {"raw": out / "raw.csv", "agg": out / "agg.csv", "plots": write_plot_tables(summaries, out)}
    if failures:
        write_failures(failures, out / "failures.csv")
        paths["failures"] = out / "failures.csv"
    return paths


# --------------------------------------------------------------------------
# ratio report

def report_ratios(summaries):
    """Improvement ratio per dataset and subcluster series (baseline mean gap / subcluster mean gap).

    Returns ``{dataset: {series: ratio}}``; datasets missing an algorithm are
    skipped with a warning.
    """
    per = {}
    for s in summaries:
        per.setdefault(s.dataset, {}).setdefault(s.series, {})[s.epsilon] = s.mean_gap
    out = {}
    for ds, series in sorted(per.items()):
        base = series.get(BASELINE)
        subs = {name: v for name, v in series.items() if name != BASELINE}
        if base is None or not subs:
            log.warning("%s: need both baseline and subcluster results for a ratio", ds)
            continue
        out[ds] = {}
        for name, means in sorted(subs.items()):
            try:
                out[ds][name] = improvement_ratio(base, means)
            except ValueError as exc:
                log.warning("%s/%s: %s", ds, name, exc)
    return out


def format_ratios(ratios):
    lines = []
    for ds, by_series in ratios.items():
        ref = REFERENCE_RATIOS.get(ds)
        ref_txt = f"  (reference {ref:g})" if ref is not None else ""
        for name, ratio in by_series.items():
            lines.append(f"{ds:<14} {name:<16} ratio {ratio:8.3f}{ref_txt}")
    return "\n".join(lines)
