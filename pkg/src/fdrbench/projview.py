"""Plot-ready tables: volcano, MA, PCA sample projection, per-sample distributions."""

from __future__ import annotations

from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from .detest import TestResult
from .randgen import ParameterError
from .simcore import GROUP_A, GROUP_B, CountMatrix, GroundTruth

N_HIST_BINS = 30
QUANTILES = (0.0, 0.25, 0.5, 0.75, 1.0)


class PlotRow(NamedTuple):
    gene: int
    x: float
    y: float
    is_de: bool


@dataclass
class ProjectionResult:
    coords: np.ndarray  # samples x 2 (PC1, PC2)
    variance_explained: np.ndarray
    group_labels: np.ndarray
    loadings: np.ndarray  # genes x 2

    @property
    def pc1(self) -> np.ndarray:
        return self.coords[:, 0]

    @property
    def pc2(self) -> np.ndarray:
        return self.coords[:, 1]


@dataclass
class SampleDistribution:
    quantiles: np.ndarray  # samples x 5
    hist_counts: np.ndarray  # samples x N_HIST_BINS
    bin_edges: np.ndarray
    group_labels: np.ndarray


def _truth_flags(truth: GroundTruth | None, n: int) -> np.ndarray:
    if truth is None:
        return np.zeros(n, dtype=bool)
    flags = np.asarray(truth.is_de, dtype=bool)
    if flags.shape[0] != n:
        raise ParameterError("truth and results are not aligned")
    return flags


def volcano_data(tr: TestResult, truth: GroundTruth | None = None) -> list[PlotRow]:
    """x = estimated log2 FC, y = -log10(p)."""
    flags = _truth_flags(truth, len(tr))
    y = -np.log10(tr.p_value)
    return [
        PlotRow(i, float(x), float(v), bool(f))
        for i, (x, v, f) in enumerate(zip(tr.est_log2_fc, y, flags))
    ]


def ma_values(counts: CountMatrix) -> tuple[np.ndarray, np.ndarray]:
    """Per-gene (A, M) from arithmetic group mean counts with a pseudo-count of 1."""
    raw = np.asarray(counts.counts, dtype=float)
    la = np.log2(raw[:, counts.mask_a].mean(axis=1) + 1.0)
    lb = np.log2(raw[:, counts.mask_b].mean(axis=1) + 1.0)
    return 0.5 * (lb + la), lb - la


def ma_data(counts: CountMatrix, truth: GroundTruth | None = None) -> list[PlotRow]:
    """Rows carry x = A (mean log abundance) and y = M (log ratio B over A)."""
    a, m = ma_values(counts)
    flags = _truth_flags(truth, a.shape[0])
    return [PlotRow(i, float(x), float(y), bool(f)) for i, (x, y, f) in enumerate(zip(a, m, flags))]


def pca_projection(log_counts, group_labels=None) -> ProjectionResult:
    """Project samples (columns) onto the top two principal axes of gene-centred data.

    Each axis is oriented so its largest-magnitude gene loading is positive.
    With zero total variance the explained fractions are split evenly.
    """
    x = np.asarray(log_counts, dtype=float)
    if x.ndim != 2 or x.shape[1] < 2:
        raise ParameterError("PCA needs at least two samples")
    centred = x - x.mean(axis=1, keepdims=True)
    u, s, vt = np.linalg.svd(centred, full_matrices=False)

    lead = np.argmax(np.abs(u), axis=0)
    signs = np.sign(u[lead, np.arange(u.shape[1])])
    signs[signs == 0] = 1.0
    u = u * signs
    vt = vt * signs[:, None]

    power = s**2
    total = power.sum()
    if total > 0:
        explained = power / total
    else:
        explained = np.full(power.shape, 1.0 / power.size)

    k = min(2, s.size)
    coords = np.zeros((x.shape[1], 2))
    coords[:, :k] = (vt[:k].T * s[:k])
    loadings = np.zeros((x.shape[0], 2))
    loadings[:, :k] = u[:, :k]
    labels = np.asarray(group_labels) if group_labels is not None else np.array([""] * x.shape[1])
    return ProjectionResult(coords, explained, labels, loadings)


def pc1_separation(proj: ProjectionResult) -> tuple[float, float]:
    """(|centroid_B - centroid_A| on PC1, largest distance of a sample from its own group centroid)."""
    pc1 = proj.pc1
    labels = proj.group_labels
    ca = pc1[labels == GROUP_A].mean()
    cb = pc1[labels == GROUP_B].mean()
    spread = max(
        np.abs(pc1[labels == GROUP_A] - ca).max(),
        np.abs(pc1[labels == GROUP_B] - cb).max(),
    )
    return float(abs(cb - ca)), float(spread)


def distribution_summary(log_counts, group_labels=None, bins: int = N_HIST_BINS) -> SampleDistribution:
    """Five-number summary and a shared-range histogram for every sample."""
    x = np.asarray(log_counts, dtype=float)
    edges = np.histogram_bin_edges(x, bins=bins)
    quant = np.quantile(x, QUANTILES, axis=0).T
    hist = np.stack([np.histogram(x[:, j], bins=edges)[0] for j in range(x.shape[1])])
    labels = np.asarray(group_labels) if group_labels is not None else np.array([""] * x.shape[1])
    return SampleDistribution(quant, hist, edges, labels)
