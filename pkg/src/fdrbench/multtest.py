"""False discovery rate corrections: Benjamini-Hochberg, Benjamini-Yekutieli, Storey q-values."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .randgen import ParameterError

METHODS = ("BH", "BY", "StoreyQ")
PI0_LAMBDA_GRID = np.round(np.arange(0.05, 0.951, 0.05), 2)


@dataclass
class AdjustedResults:
    method: str
    adjusted: np.ndarray
    significant: np.ndarray
    alpha: float
    pi0_hat: float = 1.0

    @property
    def n_significant(self) -> int:
        return int(self.significant.sum())


def _check_pvals(pvals) -> np.ndarray:
    p = np.asarray(pvals, dtype=float).ravel()
    if p.size == 0:
        raise ParameterError("need at least one p-value")
    if np.any(np.isnan(p)) or np.any(p < 0) or np.any(p > 1):
        raise ParameterError("p-values must lie in [0, 1]")
    return p


def _check_alpha(alpha: float) -> float:
    if not 0 < alpha < 1:
        raise ParameterError(f"alpha must lie in (0, 1), got {alpha}", "alpha")
    return float(alpha)


def _step_up(p: np.ndarray, factor: float) -> np.ndarray:
    """``min_{j >= k} factor * p_(j) / j`` mapped back to input order, capped at 1."""
    order = np.argsort(p, kind="stable")
    ranks = np.arange(1, p.size + 1, dtype=float)
    # factor / rank >= 1 survives rounding, so adjusted >= raw p holds exactly
    scaled = p[order] * (factor / ranks)
    running = np.minimum.accumulate(scaled[::-1])[::-1]
    out = np.empty_like(running)
    out[order] = np.minimum(running, 1.0)
    return out


def harmonic_number(g: int) -> float:
    return float(np.sum(1.0 / np.arange(1, g + 1, dtype=float)))


def adjust_bh(pvals, alpha: float = 0.05) -> AdjustedResults:
    p = _check_pvals(pvals)
    alpha = _check_alpha(alpha)
    adj = _step_up(p, float(p.size))
    return AdjustedResults("BH", adj, adj <= alpha, alpha)


def adjust_by(pvals, alpha: float = 0.05) -> AdjustedResults:
    p = _check_pvals(pvals)
    alpha = _check_alpha(alpha)
    bh = _step_up(p, float(p.size))
    adj = np.minimum(1.0, harmonic_number(p.size) * bh)
    return AdjustedResults("BY", adj, adj <= alpha, alpha)


def estimate_pi0(pvals, lam: float = 0.5) -> float:
    """Fraction of p-values above ``lam``, rescaled by ``1 - lam`` and clamped to ``[1/G, 1]``."""
    p = _check_pvals(pvals)
    if not 0 < lam < 1:
        raise ParameterError(f"lambda must lie in (0, 1), got {lam}", "storey_lambda")
    g = p.size
    raw = np.count_nonzero(p > lam) / (g * (1.0 - lam))
    return float(min(1.0, max(1.0 / g, raw)))


def estimate_pi0_grid(pvals, lambdas=PI0_LAMBDA_GRID) -> float:
    """Experimental grid policy: the single-lambda estimate taken at the grid's largest lambda."""
    return estimate_pi0(pvals, float(np.max(lambdas)))


def qvalues(pvals, pi0: float, alpha: float = 0.05) -> AdjustedResults:
    p = _check_pvals(pvals)
    alpha = _check_alpha(alpha)
    if not 0 < pi0 <= 1:
        raise ParameterError(f"pi0 must lie in (0, 1], got {pi0}", "pi0")
    q = _step_up(p, pi0 * p.size)
    return AdjustedResults("StoreyQ", q, q <= alpha, alpha, pi0_hat=float(pi0))


def adjust_storey(pvals, alpha: float = 0.05, lam: float = 0.5, grid: bool = False) -> AdjustedResults:
    pi0 = estimate_pi0_grid(pvals) if grid else estimate_pi0(pvals, lam)
    return qvalues(pvals, pi0, alpha)


def adjust(pvals, method: str, alpha: float = 0.05, lam: float = 0.5, grid: bool = False) -> AdjustedResults:
    key = method.lower()
    if key == "bh":
        return adjust_bh(pvals, alpha)
    if key == "by":
        return adjust_by(pvals, alpha)
    if key in ("storey", "storeyq"):
        return adjust_storey(pvals, alpha, lam, grid)
    raise ParameterError(f"unknown correction method {method!r}", "method")


def adjust_all(pvals, alpha: float = 0.05, lam: float = 0.5, grid: bool = False) -> dict[str, AdjustedResults]:
    return {
        "BH": adjust_bh(pvals, alpha),
        "BY": adjust_by(pvals, alpha),
        "StoreyQ": adjust_storey(pvals, alpha, lam, grid),
    }
