"""Config ingestion, replicate sweeps and output persistence.

Config files are flat YAML mappings (JSON parses as YAML, so either works).
Keys are :class:`~fdrbench.simcore.SimulationConfig` field names plus the
run options ``out``, ``replicates``, ``alpha``, ``emit``, ``storey_lambda``,
``pi0_method``, ``pseudo_count`` and ``cpm``. Unknown keys are rejected.

Replicate ``r`` (1-based) is simulated from seed ``seed + r``.
"""

from __future__ import annotations

import csv
import dataclasses
import io
import json
import logging
import math
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np
import yaml

from . import __version__
from .detest import TestResult, log2_transform, run_de_tests
from .evalmetrics import ConfusionSummary, confusion, pr_curve, roc_curve
from .multtest import METHODS, AdjustedResults, adjust_all
from .projview import distribution_summary, ma_values, pca_projection
from .randgen import ParameterError, RngState
from .simcore import CountMatrix, GroundTruth, SimulationConfig, simulate_dataset

log = logging.getLogger(__name__)

EMIT_CHOICES = ("volcano", "ma", "roc", "pr", "pca", "dist", "matrix", "truth")
DEFAULT_EMIT = frozenset({"volcano", "ma", "roc", "pr", "pca", "dist"})
METRICS_HEADER = ["method", "replicate", "seed", "tp", "fp", "tn", "fn", "type1", "fdr", "power"]
RATE_FIELDS = ("type1", "fdr", "power")
COUNT_FIELDS = ("tp", "fp", "tn", "fn")


class ConfigError(ValueError):
    """Base class for everything wrong with a config file."""

    def __init__(self, message: str, field: str | None = None):
        super().__init__(message)
        self.field = field


class ConfigNotFoundError(ConfigError):
    pass


class ConfigSyntaxError(ConfigError):
    pass


class ConfigValueError(ConfigError):
    pass


@dataclass
class RunOptions:
    out: str | None = None
    replicates: int = 1
    alpha: float = 0.05
    emit: frozenset = DEFAULT_EMIT
    storey_lambda: float = 0.5
    pi0_method: str = "fixed"
    pseudo_count: float = 1.0
    cpm: bool = False
    config_path: str | None = None

    def validate(self) -> None:
        if not isinstance(self.replicates, int) or isinstance(self.replicates, bool) or self.replicates < 1:
            raise ConfigValueError("replicates must be a positive integer", "replicates")
        if not 0 < self.alpha < 1:
            raise ConfigValueError(f"alpha must lie in (0, 1), got {self.alpha}", "alpha")
        if not 0 < self.storey_lambda < 1:
            raise ConfigValueError("storey_lambda must lie in (0, 1)", "storey_lambda")
        if self.pi0_method not in ("fixed", "grid"):
            raise ConfigValueError("pi0_method must be 'fixed' or 'grid'", "pi0_method")
        if not self.pseudo_count > 0:
            raise ConfigValueError("pseudo_count must be > 0", "pseudo_count")
        unknown = set(self.emit) - set(EMIT_CHOICES)
        if unknown:
            raise ConfigValueError(f"unknown emit flags: {sorted(unknown)}", "emit")


# ---------------------------------------------------------------------------
# config parsing


_SIM_FIELDS = {f.name: f for f in dataclasses.fields(SimulationConfig)}
_OPT_FIELDS = {f.name: f for f in dataclasses.fields(RunOptions) if f.name != "config_path"}
_INT_KEYS = {"n_genes", "n_per_group", "seed", "replicates"}
_STR_KEYS = {"fc_scheme", "pi0_method", "out"}
_BOOL_KEYS = {"cpm"}


def parse_emit(value) -> frozenset:
    if isinstance(value, str):
        items = [v.strip() for v in value.split(",") if v.strip()]
    elif isinstance(value, (list, tuple, set, frozenset)):
        items = [str(v).strip() for v in value]
    else:
        raise ConfigValueError("emit must be a list or comma-separated string", "emit")
    bad = sorted(set(items) - set(EMIT_CHOICES))
    if bad:
        raise ConfigValueError(f"unknown emit flags {bad}; choose from {list(EMIT_CHOICES)}", "emit")
    return frozenset(items)


def _coerce(key: str, value):
    if key == "emit":
        return parse_emit(value)
    if key in _BOOL_KEYS:
        if not isinstance(value, bool):
            raise ConfigValueError(f"{key} must be true or false", key)
        return value
    if key in _STR_KEYS:
        if not isinstance(value, str):
            raise ConfigValueError(f"{key} must be a string", key)
        return value
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise ConfigValueError(f"{key} must be a number, got {value!r}", key)
    if key in _INT_KEYS:
        if isinstance(value, float) and not value.is_integer():
            raise ConfigValueError(f"{key} must be an integer, got {value!r}", key)
        return int(value)
    if not math.isfinite(value):
        raise ConfigValueError(f"{key} must be finite", key)
    return float(value)


def config_from_mapping(data: dict | None) -> tuple[SimulationConfig, RunOptions]:
    data = data or {}
    if not isinstance(data, dict):
        raise ConfigSyntaxError("config must be a key-value mapping")
    sim_kwargs, opt_kwargs = {}, {}
    for key, value in data.items():
        if key in _SIM_FIELDS:
            sim_kwargs[key] = _coerce(key, value)
        elif key in _OPT_FIELDS:
            opt_kwargs[key] = _coerce(key, value)
        else:
            raise ConfigValueError(f"unknown config key {key!r}", str(key))
    try:
        cfg = SimulationConfig(**sim_kwargs)
    except ParameterError as exc:
        raise ConfigValueError(str(exc), exc.field) from exc
    opts = RunOptions(**opt_kwargs)
    opts.validate()
    return cfg, opts


def parse_config(path) -> tuple[SimulationConfig, RunOptions]:
    path = Path(path)
    try:
        text = path.read_text()
    except FileNotFoundError as exc:
        raise ConfigNotFoundError(f"config file not found: {path}") from exc
    try:
        data = yaml.safe_load(text)
    except yaml.YAMLError as exc:
        raise ConfigSyntaxError(f"cannot parse {path}: {exc}") from exc
    cfg, opts = config_from_mapping(data)
    opts.config_path = str(path)
    return cfg, opts


def config_to_mapping(cfg: SimulationConfig, opts: RunOptions | None = None) -> dict:
    data = cfg.to_dict()
    if opts is not None:
        for name in _OPT_FIELDS:
            value = getattr(opts, name)
            if name == "emit":
                value = sorted(value)
            if value is not None:
                data[name] = value
    return data


def dump_config(cfg: SimulationConfig, opts: RunOptions | None, path) -> None:
    Path(path).write_text(yaml.safe_dump(config_to_mapping(cfg, opts), sort_keys=False))


# ---------------------------------------------------------------------------
# running


@dataclass
class ReplicateResult:
    replicate: int
    seed: int
    confusion: dict[str, ConfusionSummary]
    pi0_hat: float
    nested: bool
    raw_rejection_fraction: float
    roc_auc: float
    # populated for the replicate whose plot data gets written
    counts: CountMatrix | None = None
    truth: GroundTruth | None = None
    tests: TestResult | None = None
    adjusted: dict[str, AdjustedResults] | None = None


@dataclass
class ExperimentSummary:
    methods: dict[str, dict[str, dict[str, float]]]
    seeds: list[int]
    config: dict
    options: dict
    replicates: list[ReplicateResult] = field(repr=False, default_factory=list)

    def to_dict(self) -> dict:
        rows = []
        for rep in self.replicates:
            for m in METHODS:
                cm = rep.confusion[m]
                rows.append({
                    "method": m, "replicate": rep.replicate, "seed": rep.seed,
                    **dataclasses.asdict(cm),
                    "type1": cm.type1, "fdr": cm.fdr, "power": cm.power,
                })
        return {
            "version": __version__,
            "methods": self.methods,
            "seeds": self.seeds,
            "config": self.config,
            "options": self.options,
            "per_replicate": rows,
            "pi0_hat": [rep.pi0_hat for rep in self.replicates],
            "nested_every_replicate": all(rep.nested for rep in self.replicates),
        }


def is_nested(adjusted: dict[str, AdjustedResults]) -> bool:
    """BY calls are a subset of BH calls, which are a subset of StoreyQ calls."""
    by, bh, sq = (adjusted[m].significant for m in ("BY", "BH", "StoreyQ"))
    return bool(np.all(bh[by]) and np.all(sq[bh]))


def run_replicate(cfg: SimulationConfig, opts: RunOptions, replicate: int, keep: bool = False) -> ReplicateResult:
    seed = cfg.seed + replicate
    counts, truth = simulate_dataset(cfg, RngState(seed))
    tests = run_de_tests(counts, pseudo_count=opts.pseudo_count, cpm=opts.cpm)
    adjusted = adjust_all(tests.p_value, opts.alpha, opts.storey_lambda, grid=opts.pi0_method == "grid")
    cms = {m: confusion(adjusted[m].significant, truth.is_de) for m in METHODS}
    null = ~truth.is_de
    raw_frac = float(np.mean(tests.p_value[null] < opts.alpha)) if null.any() else 0.0
    auc = roc_curve(tests.p_value, truth.is_de).auc if 0 < truth.is_de.sum() < truth.is_de.size else math.nan
    rep = ReplicateResult(
        replicate=replicate,
        seed=seed,
        confusion=cms,
        pi0_hat=adjusted["StoreyQ"].pi0_hat,
        nested=is_nested(adjusted),
        raw_rejection_fraction=raw_frac,
        roc_auc=auc,
    )
    if keep:
        rep.counts, rep.truth, rep.tests, rep.adjusted = counts, truth, tests, adjusted
    return rep


def _mean_sd(values) -> dict[str, float]:
    arr = np.asarray(values, dtype=float)
    sd = float(arr.std(ddof=1)) if arr.size > 1 else 0.0
    return {"mean": float(arr.mean()), "sd": sd}


def summarize(cfg: SimulationConfig, opts: RunOptions, reps: list[ReplicateResult]) -> ExperimentSummary:
    methods = {}
    for m in METHODS:
        stats = {}
        for name in COUNT_FIELDS + RATE_FIELDS:
            stats[name] = _mean_sd([getattr(r.confusion[m], name) for r in reps])
        methods[m] = stats
    options = config_to_mapping(cfg, opts)
    # the output location is left out so identical runs agree byte for byte wherever they land
    options = {k: v for k, v in options.items() if k in _OPT_FIELDS and k != "out"}
    return ExperimentSummary(
        methods=methods,
        seeds=[r.seed for r in reps],
        config=cfg.to_dict(),
        options=options,
        replicates=reps,
    )


def run_experiment(cfg: SimulationConfig, opts: RunOptions) -> ExperimentSummary:
    """Simulate, test, correct and score ``opts.replicates`` datasets; write outputs if ``opts.out`` is set."""
    cfg.validate()
    opts.validate()
    reps = []
    for r in range(1, opts.replicates + 1):
        try:
            reps.append(run_replicate(cfg, opts, r, keep=(r == 1 and opts.out is not None)))
        except (ParameterError, FloatingPointError) as exc:
            raise RuntimeError(f"replicate {r} (seed {cfg.seed + r}) failed: {exc}") from exc
        log.info("replicate %d/%d done (seed %d)", r, opts.replicates, cfg.seed + r)
    summary = summarize(cfg, opts, reps)
    if opts.out is not None:
        write_outputs(summary, opts)
    return summary


# ---------------------------------------------------------------------------
# output files


def fmt(x) -> str:
    """Fixed 6-significant-digit rendering, independent of locale."""
    if isinstance(x, (bool, np.bool_)):
        return "1" if x else "0"
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    return format(float(x), ".6g")


def _csv_text(header, rows) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(header)
    for row in rows:
        writer.writerow([v if isinstance(v, str) else fmt(v) for v in row])
    return buf.getvalue()


def _write(path: Path, text: str) -> None:
    try:
        path.write_text(text, encoding="utf-8")
    except OSError as exc:
        raise OSError(f"cannot write {path}: {exc.strerror or exc}") from exc


def metrics_rows(summary: ExperimentSummary):
    for rep in summary.replicates:
        for m in METHODS:
            cm = rep.confusion[m]
            yield [m, rep.replicate, rep.seed, cm.tp, cm.fp, cm.tn, cm.fn, cm.type1, cm.fdr, cm.power]


def plot_tables(rep: ReplicateResult, emit) -> dict[str, str]:
    """CSV text for every requested plot-data file of one retained replicate."""
    counts, truth, tests = rep.counts, rep.truth, rep.tests
    is_de = truth.is_de
    genes = range(counts.n_genes)
    files = {}
    if "volcano" in emit:
        y = -np.log10(tests.p_value)
        files["volcano.csv"] = _csv_text(
            ["gene", "log2fc", "neglog10p", "is_de"], zip(genes, tests.est_log2_fc, y, is_de)
        )
    if "ma" in emit:
        a, m = ma_values(counts)
        files["ma.csv"] = _csv_text(["gene", "a", "m", "is_de"], zip(genes, a, m, is_de))
    if "roc" in emit:
        roc = roc_curve(tests.p_value, is_de)
        files["roc.csv"] = _csv_text(["fpr", "tpr"], zip(roc.x, roc.y))
    if "pr" in emit:
        pr = pr_curve(tests.p_value, is_de)
        files["pr.csv"] = _csv_text(["recall", "precision"], zip(pr.x, pr.y))
    logc = None
    if "pca" in emit or "dist" in emit:
        logc = log2_transform(counts.counts)
    if "pca" in emit:
        proj = pca_projection(logc, counts.group_labels)
        files["pca.csv"] = _csv_text(
            ["sample", "group", "pc1", "pc2"],
            zip(counts.sample_names, counts.group_labels.tolist(), proj.pc1, proj.pc2),
        )
    if "dist" in emit:
        dist = distribution_summary(logc, counts.group_labels)
        files["dist.csv"] = _csv_text(
            ["sample", "group", "q0", "q25", "q50", "q75", "q100"],
            ([s, g, *q] for s, g, q in zip(counts.sample_names, counts.group_labels.tolist(), dist.quantiles)),
        )
        edges = dist.bin_edges
        files["dist_hist.csv"] = _csv_text(
            ["sample", "group", "bin_left", "bin_right", "count"],
            (
                [s, g, edges[b], edges[b + 1], int(h[b])]
                for s, g, h in zip(counts.sample_names, counts.group_labels.tolist(), dist.hist_counts)
                for b in range(len(h))
            ),
        )
    if "matrix" in emit:
        files["counts.csv"] = _csv_text(
            ["gene", *counts.sample_names], ([i, *row] for i, row in enumerate(counts.counts.tolist()))
        )
    if "truth" in emit:
        files["truth.csv"] = _csv_text(
            ["gene", "is_de", "true_log2_fc", "baseline_mean"],
            zip(genes, is_de, truth.true_log2_fc, truth.baseline_mean),
        )
    return files


def write_outputs(summary: ExperimentSummary, opts: RunOptions) -> list[Path]:
    out = Path(opts.out)
    try:
        out.mkdir(parents=True, exist_ok=True)
    except OSError as exc:
        raise OSError(f"cannot create output directory {out}: {exc.strerror or exc}") from exc
    files = {
        "summary.json": json.dumps(summary.to_dict(), indent=2, sort_keys=True) + "\n",
        "metrics.csv": _csv_text(METRICS_HEADER, metrics_rows(summary)),
    }
    kept = [r for r in summary.replicates if r.counts is not None]
    if kept:
        files.update(plot_tables(kept[0], opts.emit))
    written = []
    for name, text in files.items():
        path = out / name
        _write(path, text)
        written.append(path)
    return written


def format_report(summary: ExperimentSummary) -> str:
    """Plain-text method comparison table, one row per correction method."""
    head = f"{'Method':<8} {'TypeI':>8} {'FDR':>8} {'Power':>8} {'TP':>9} {'FP':>9} {'TN':>9} {'FN':>9}"
    lines = [head]
    for m in METHODS:
        s = summary.methods[m]
        lines.append(
            f"{m:<8} {s['type1']['mean']:8.4f} {s['fdr']['mean']:8.4f} {s['power']['mean']:8.4f} "
            + " ".join(f"{s[c]['mean']:9.1f}" for c in COUNT_FIELDS)
        )
    lines.append(f"replicates: {len(summary.seeds)}  seeds: {summary.seeds[0]}..{summary.seeds[-1]}")
    return "\n".join(lines)
