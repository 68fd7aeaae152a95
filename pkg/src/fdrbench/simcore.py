"""Two-group negative binomial count simulation with known DE ground truth.

Generation order for one dataset (all from a single stream):

1. baseline means ``M_i ~ Gamma(shape, scale) * multiplier``
2. DE flags: a uniform subset of ``round(prop_de * G)`` genes
3. fold changes (``FC_i = 1`` for null genes)
4. library sizes ``L_j ~ Poisson(library_mean)``
5. mean matrix ``mu_ij = M_i * FC_i[j in B] * L_j / mean(L)``
6. counts ``NB(mu_ij, dispersion)`` in gene-major order
"""

from __future__ import annotations

import dataclasses
from dataclasses import dataclass, field

import numpy as np

from .randgen import (
    ParameterError,
    RngState,
    next_uniform,
    sample_gamma,
    sample_nb,
    sample_normal,
    sample_poisson,
)

FC_SCHEMES = ("signed", "normal")
GROUP_A = "A"
GROUP_B = "B"


@dataclass
class SimulationConfig:
    n_genes: int = 10_000
    n_per_group: int = 10
    prop_de: float = 0.3
    dispersion: float = 0.05
    baseline_shape: float = 2.0
    baseline_scale: float = 0.5
    baseline_multiplier: float = 100.0
    library_mean: float = 80_000.0
    fc_scheme: str = "signed"
    fc_log2_mean: float = 1.2
    fc_log2_sd: float = 0.5
    fc_min_abs_log2: float = 0.5
    seed: int = 42

    def __post_init__(self):
        self.validate()

    def validate(self) -> None:
        """Raise :class:`ParameterError` naming the first offending field."""
        if not _is_int(self.n_genes) or self.n_genes < 1:
            raise ParameterError("n_genes must be a positive integer", "n_genes")
        if not _is_int(self.n_per_group) or self.n_per_group < 1:
            raise ParameterError("n_per_group must be a positive integer", "n_per_group")
        if not 0.0 <= self.prop_de <= 1.0:
            raise ParameterError(f"prop_de must lie in [0, 1], got {self.prop_de}", "prop_de")
        if self.dispersion < 0:
            raise ParameterError("dispersion must be >= 0", "dispersion")
        for name in ("baseline_shape", "baseline_scale", "baseline_multiplier", "library_mean"):
            if not getattr(self, name) > 0:
                raise ParameterError(f"{name} must be > 0", name)
        if self.fc_scheme not in FC_SCHEMES:
            raise ParameterError(f"fc_scheme must be one of {FC_SCHEMES}", "fc_scheme")
        if self.fc_log2_sd < 0:
            raise ParameterError("fc_log2_sd must be >= 0", "fc_log2_sd")
        if self.fc_min_abs_log2 < 0:
            raise ParameterError("fc_min_abs_log2 must be >= 0", "fc_min_abs_log2")
        if not _is_int(self.seed) or not 0 <= self.seed < 2**64:
            raise ParameterError("seed must be an unsigned 64-bit integer", "seed")

    @property
    def n_samples(self) -> int:
        return 2 * self.n_per_group

    @property
    def n_de(self) -> int:
        # Python's round is half-to-even
        return int(round(self.prop_de * self.n_genes))

    def replace(self, **changes) -> "SimulationConfig":
        return dataclasses.replace(self, **changes)

    def to_dict(self) -> dict:
        return dataclasses.asdict(self)


def _is_int(x) -> bool:
    return isinstance(x, (int, np.integer)) and not isinstance(x, bool)


@dataclass
class GroundTruth:
    is_de: np.ndarray
    true_log2_fc: np.ndarray
    baseline_mean: np.ndarray

    @property
    def fold_change(self) -> np.ndarray:
        return np.exp2(self.true_log2_fc)


@dataclass
class CountMatrix:
    counts: np.ndarray  # genes x samples, int64
    group_labels: np.ndarray  # "A" / "B" per sample
    library_sizes: np.ndarray
    sample_names: list[str] = field(default_factory=list)

    def __post_init__(self):
        if not self.sample_names:
            self.sample_names = _sample_names(self.group_labels)

    @property
    def n_genes(self) -> int:
        return self.counts.shape[0]

    @property
    def mask_a(self) -> np.ndarray:
        return self.group_labels == GROUP_A

    @property
    def mask_b(self) -> np.ndarray:
        return self.group_labels == GROUP_B


def _sample_names(labels) -> list[str]:
    seen = {GROUP_A: 0, GROUP_B: 0}
    names = []
    for g in labels:
        seen[g] += 1
        names.append(f"{g}{seen[g]}")
    return names


def group_labels(n_per_group: int) -> np.ndarray:
    return np.array([GROUP_A] * n_per_group + [GROUP_B] * n_per_group)


def draw_baseline_means(cfg: SimulationConfig, rng: RngState) -> np.ndarray:
    m = sample_gamma(rng, cfg.baseline_shape, cfg.baseline_scale, size=cfg.n_genes)
    return m * cfg.baseline_multiplier


def assign_de_genes(cfg: SimulationConfig, rng: RngState) -> np.ndarray:
    """Flag exactly ``cfg.n_de`` genes, chosen by a partial Fisher-Yates shuffle."""
    G, k = cfg.n_genes, cfg.n_de
    idx = np.arange(G)
    u = next_uniform(rng, size=k)
    for i in range(k):
        j = i + min(int(u[i] * (G - i)), G - i - 1)
        idx[i], idx[j] = idx[j], idx[i]
    flags = np.zeros(G, dtype=bool)
    flags[idx[:k]] = True
    return flags


def draw_fold_changes(cfg: SimulationConfig, rng: RngState, flags: np.ndarray) -> np.ndarray:
    """Fold changes (linear scale); exactly 1 for genes not flagged DE.

    ``signed``: magnitude ~ N(mean, sd) clamped below at ``fc_min_abs_log2``,
    with an equiprobable sign. ``normal``: log2 FC ~ N(mean, sd), with values
    closer to zero than ``fc_min_abs_log2`` pushed out to that distance.
    """
    flags = np.asarray(flags, dtype=bool)
    log2fc = np.zeros(flags.shape[0])
    k = int(flags.sum())
    if k:
        draws = sample_normal(rng, cfg.fc_log2_mean, cfg.fc_log2_sd, size=k)
        if cfg.fc_scheme == "signed":
            sign = np.where(next_uniform(rng, size=k) < 0.5, 1.0, -1.0)
            values = sign * np.maximum(draws, cfg.fc_min_abs_log2)
        else:
            sign = np.where(draws < 0, -1.0, 1.0)
            values = sign * np.maximum(np.abs(draws), cfg.fc_min_abs_log2)
        log2fc[flags] = values
    return np.exp2(log2fc)


def draw_library_sizes(cfg: SimulationConfig, rng: RngState) -> np.ndarray:
    sizes = np.asarray(sample_poisson(rng, cfg.library_mean, size=cfg.n_samples), dtype=np.int64)
    if np.any(sizes <= 0):
        raise ParameterError("drawn a zero library size; increase library_mean", "library_mean")
    return sizes


def compute_mean_matrix(baselines, fc, flags, library_sizes, labels) -> np.ndarray:
    baselines = np.asarray(baselines, dtype=float)
    fc = np.where(np.asarray(flags, dtype=bool), np.asarray(fc, dtype=float), 1.0)
    lib = np.asarray(library_sizes, dtype=float)
    labels = np.asarray(labels)
    if lib.shape[0] != labels.shape[0]:
        raise ParameterError("library_sizes and group_labels differ in length")
    if baselines.shape != fc.shape:
        raise ParameterError("baselines and fold changes differ in length")
    if np.any(lib <= 0):
        raise ParameterError("library sizes must be positive", "library_sizes")
    scale = lib / lib.mean()
    gene_group = np.where(labels[None, :] == GROUP_B, fc[:, None], 1.0)
    return baselines[:, None] * gene_group * scale[None, :]


def simulate_counts(mean_matrix, dispersion: float, rng: RngState) -> np.ndarray:
    mu = np.ascontiguousarray(mean_matrix, dtype=float)
    return np.asarray(sample_nb(rng, mu, dispersion), dtype=np.int64).reshape(mu.shape)


def simulate_dataset(cfg: SimulationConfig, rng: RngState | None = None) -> tuple[CountMatrix, GroundTruth]:
    cfg.validate()
    rng = rng if rng is not None else RngState(cfg.seed)
    baselines = draw_baseline_means(cfg, rng)
    flags = assign_de_genes(cfg, rng)
    fc = draw_fold_changes(cfg, rng, flags)
    lib = draw_library_sizes(cfg, rng)
    labels = group_labels(cfg.n_per_group)
    mu = compute_mean_matrix(baselines, fc, flags, lib, labels)
    counts = simulate_counts(mu, cfg.dispersion, rng)
    truth = GroundTruth(is_de=flags, true_log2_fc=np.log2(fc), baseline_mean=baselines)
    return CountMatrix(counts=counts, group_labels=labels, library_sizes=lib), truth
