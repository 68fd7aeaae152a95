"""Acceptance suite: one test per criterion, each recording a PASS/FAIL line.

The lines are printed in the "acceptance criteria" section of the pytest
terminal summary. Tolerances are the criteria's own and are not loosened.
"""

import time

import numpy as np

from fdrbench.detest import log2_transform, wilcoxon_rank_sum
from fdrbench.evalmetrics import ConfusionSummary, error_rates, roc_curve
from fdrbench.experiment import RunOptions, run_experiment
from fdrbench.multtest import adjust_bh, adjust_by, qvalues
from fdrbench.projview import pc1_separation, pca_projection
from fdrbench.randgen import RngState, sample_nb
from fdrbench.simcore import SimulationConfig

from oracles import bh_calls_bruteforce, concordance_auc, exact_rank_sum_p


def _mean(summary, method, key):
    return summary.methods[method][key]["mean"]


def test_criterion_01_table_rates(acceptance_report):
    table = {
        "BH": ((2754, 94, 6906, 246), (0.0134, 0.0330, 0.9180)),
        "BY": ((2252, 3, 6997, 748), (0.0004, 0.0013, 0.7507)),
        "StoreyQ": ((2764, 106, 6894, 236), (0.0151, 0.0369, 0.9213)),
    }
    start = time.perf_counter()
    worst = 0.0
    for counts, expected in table.values():
        got = error_rates(ConfusionSummary(*counts))
        worst = max(worst, max(abs(g - e) for g, e in zip(got, expected)))
    elapsed = time.perf_counter() - start
    ok = worst <= 1e-4 and elapsed < 1.0
    acceptance_report(1, ok, f"max |rate - published| = {worst:.2e} (tol 1e-4), {elapsed * 1e3:.2f} ms")
    assert ok


def test_criterion_02_default_scenario(default_sweep, acceptance_report):
    s = default_sweep
    bh_p, by_p, sq_p = (_mean(s, m, "power") for m in ("BH", "BY", "StoreyQ"))
    bh_f, by_f = _mean(s, "BH", "fdr"), _mean(s, "BY", "fdr")
    checks = {
        "BH power in [0.85, 0.95]": 0.85 <= bh_p <= 0.95,
        "BH FDR <= 0.05": bh_f <= 0.05,
        "BY power <= BH power - 0.10": by_p <= bh_p - 0.10,
        "BY FDR <= 0.005": by_f <= 0.005,
        "StoreyQ power >= BH power": sq_p >= bh_p,
        "runtime < 300 s": s.elapsed_s < 300,
    }
    ok = all(checks.values())
    detail = (
        f"R={len(s.seeds)} power BH={bh_p:.4f} BY={by_p:.4f} StoreyQ={sq_p:.4f}; "
        f"FDR BH={bh_f:.4f} BY={by_f:.4f}; {s.elapsed_s:.1f} s"
    )
    failed = [k for k, v in checks.items() if not v]
    if failed:
        detail += f"; failed: {failed}"
    acceptance_report(2, ok, detail)
    assert ok


def test_criterion_03_global_null(null_sweep, acceptance_report):
    s = null_sweep
    raw = float(np.mean([r.raw_rejection_fraction for r in s.replicates]))
    fps = {m: _mean(s, m, "fp") for m in ("BH", "BY", "StoreyQ")}
    ok = abs(raw - 0.05) <= 0.015 and all(v <= 2 for v in fps.values())
    fp_text = " ".join(f"{m}={v:.2f}" for m, v in fps.items())
    acceptance_report(3, ok, f"raw rejection fraction {raw:.4f} (0.05 +/- 0.015); mean FP {fp_text} (<= 2)")
    assert ok


def test_criterion_04_correction_oracles(acceptance_report):
    rng = np.random.default_rng(2024)
    mismatches = 0
    for _ in range(1000):
        g = int(rng.integers(1, 13))
        p = rng.uniform(size=g) ** rng.uniform(0.5, 5)
        alpha = float(rng.choice([0.01, 0.05, 0.1, 0.2]))
        bh = adjust_bh(p, alpha)
        by = adjust_by(p, alpha)
        sq = qvalues(p, 1.0, alpha)
        mismatches += bh.significant.tolist() != bh_calls_bruteforce(p.tolist(), alpha)
        mismatches += by.significant.tolist() != bh_calls_bruteforce(p.tolist(), alpha, harmonic=True)
        mismatches += not (np.array_equal(sq.adjusted, bh.adjusted) and np.array_equal(sq.significant, bh.significant))
    ok = mismatches == 0
    acceptance_report(4, ok, f"{mismatches} mismatches over 1000 vectors (BH, BY vs brute force; StoreyQ pi0=1 vs BH)")
    assert ok


def test_criterion_05_rank_sum_oracle(acceptance_report):
    rng = np.random.default_rng(5)
    worst, worst_case, over = 0.0, None, 0
    for _ in range(500):
        na, nb = (int(v) for v in rng.integers(1, 6, size=2))
        x = rng.permutation(na + nb).astype(float) + rng.uniform(0, 0.5)
        xa, xb = x[:na], x[na:]
        diff = abs(wilcoxon_rank_sum(xa, xb)[1] - exact_rank_sum_p(xa, xb))
        over += diff > 0.03
        if diff > worst:
            worst, worst_case = diff, (na, nb)
    degenerate = wilcoxon_rank_sum([4.0] * 5, [4.0] * 5)[1]
    ok = worst <= 0.03 and degenerate == 1.0
    acceptance_report(
        5, ok,
        f"max |approx - exact| = {worst:.4f} at sizes {worst_case} (tol 0.03), "
        f"{over}/500 cases over tolerance; all-equal p = {degenerate}",
    )
    assert ok


def test_criterion_06_sampler_moments(acceptance_report):
    nb = sample_nb(RngState(606), 100.0, 0.05, size=100_000)
    po = sample_nb(RngState(607), 100.0, 0.0, size=100_000)
    nb_mean_err = abs(nb.mean() - 100) / 100
    nb_var_err = abs(nb.var() - 600) / 600
    po_mean_err = abs(po.mean() - 100) / 100
    po_var_err = abs(po.var() - 100) / 100
    ok = nb_mean_err <= 0.01 and nb_var_err <= 0.05 and po_mean_err <= 0.01 and po_var_err <= 0.05
    acceptance_report(
        6, ok,
        f"NB mean {nb.mean():.2f} var {nb.var():.1f} (600); "
        f"dispersion 0 mean {po.mean():.2f} var {po.var():.1f} (100)",
    )
    assert ok


def test_criterion_07_nesting(default_sweep, null_sweep, acceptance_report):
    reps = default_sweep.replicates + null_sweep.replicates
    broken = [r.seed for r in reps if not r.nested]
    ok = not broken
    acceptance_report(7, ok, f"BY <= BH <= StoreyQ held in {len(reps) - len(broken)}/{len(reps)} replicates")
    assert ok


def test_criterion_08_auc(default_sweep, acceptance_report):
    rng = np.random.default_rng(808)
    worst = 0.0
    for _ in range(1000):
        n = int(rng.integers(2, 60))
        labels = rng.random(n) < rng.uniform(0.1, 0.9)
        labels[:2] = [True, False]
        scores = np.round(rng.random(n), int(rng.integers(1, 4)))
        worst = max(worst, abs(roc_curve(scores, labels).auc - concordance_auc(scores, labels)))
    aucs = [r.roc_auc for r in default_sweep.replicates]
    ok = worst <= 1e-9 and min(aucs) > 0.95
    acceptance_report(
        8, ok, f"max |trapezoid - concordance| = {worst:.1e} over 1000 instances; default ROC AUC min {min(aucs):.4f}"
    )
    assert ok


def test_criterion_09_determinism(tmp_path, acceptance_report):
    emit = frozenset({"volcano", "ma", "roc", "pr", "pca", "dist", "matrix", "truth"})
    dirs = [tmp_path / "first", tmp_path / "second"]
    for d in dirs:
        run_experiment(SimulationConfig(), RunOptions(out=str(d), replicates=2, emit=emit))
    names = sorted(p.name for p in dirs[0].iterdir())
    differ = [n for n in names if (dirs[0] / n).read_bytes() != (dirs[1] / n).read_bytes()]
    ok = not differ and names == sorted(p.name for p in dirs[1].iterdir())
    acceptance_report(9, ok, f"{len(names) - len(differ)}/{len(names)} output files byte-identical")
    assert ok


def test_criterion_10_pca_separation(default_dataset, acceptance_report):
    cm, _ = default_dataset
    gap, spread = pc1_separation(pca_projection(log2_transform(cm.counts), cm.group_labels))
    ok = gap > spread
    acceptance_report(10, ok, f"PC1 centroid distance {gap:.2f} vs max within-group deviation {spread:.2f}")
    assert ok
