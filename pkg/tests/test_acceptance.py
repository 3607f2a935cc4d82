"""Acceptance suite: one PASS/FAIL line per criterion.

Run with ``pytest tests/test_acceptance.py -v`` or directly as a script.
Timing criteria marked soft are reported but never fail the run.
"""
import math
import os
import time
from fractions import Fraction

import numpy as np
import pytest

from dksaliency.cli import main as cli_main
from dksaliency.composer import region_dense_values, run_pipeline
from dksaliency.dks import DksResult, brute_force_dks, dense_k_subgraph, density
from dksaliency.evaluation import f_measure, mae, pr_point, score_map
from dksaliency.graphs import THRESHOLD_FRACTIONS, SparseGraph, entropy_threshold
from dksaliency.imaging import to_uint8
from dksaliency.markov import stationary, transition_matrix
from dksaliency.synthetic import make_scene, make_suite

REAL_DATA_ENV = "DKSALIENCY_REAL_DATA"   # optional dir with images/ and gt/


def report(number, ok, detail):
    line = f"{'PASS' if ok else 'FAIL'}  criterion {number}: {detail}"
    print(line, flush=True)
    return line


def _emit(capsys, number, ok, detail):
    with capsys.disabled():
        print()
        report(number, ok, detail)


# --- criterion 1 -------------------------------------------------------------

def check_stationary_oracle(n_graphs=200, tol=1e-8, budget=10.0):
    rng = np.random.default_rng(101)
    worst = 0.0
    t0 = time.perf_counter()
    for _ in range(n_graphs):
        n = int(rng.integers(5, 251))
        w = rng.random((n, n))
        w = np.triu(w, 1)
        w = w + w.T
        pi = stationary(transition_matrix(w))
        deg = w.sum(axis=1)
        worst = max(worst, float(np.abs(pi - deg / deg.sum()).max()))
    elapsed = time.perf_counter() - t0
    ok = worst <= tol and elapsed < budget
    return ok, f"stationary vs degree closed form, max L-inf {worst:.2e} (tol {tol:g}) " \
               f"over {n_graphs} graphs in {elapsed:.2f}s (budget {budget:g}s)"


# --- criterion 2 -------------------------------------------------------------

def check_dks_bound(n_graphs=500, budget=60.0):
    rng = np.random.default_rng(202)
    held, ratios = 0, []
    t0 = time.perf_counter()
    for i in range(n_graphs):
        n = int(rng.integers(4, 15))
        p = (0.2, 0.4, 0.6)[i % 3]
        upper = np.triu(rng.random((n, n)) < p, 1)
        g = SparseGraph(upper | upper.T)
        k = int(rng.integers(2, n + 1))
        got = dense_k_subgraph(g, k, rng_seed=i).density
        opt = density(g, brute_force_dks(g, k))
        held += got >= opt / (2.0 * n ** (1.0 / 3.0))
        ratios.append(1.0 if opt == 0 else got / opt)
    elapsed = time.perf_counter() - t0
    mean_ratio = float(np.mean(ratios))
    ok = held == n_graphs and elapsed < budget
    diag = "meets" if mean_ratio >= 0.8 else "below"
    return ok, f"bound held on {held}/{n_graphs} graphs in {elapsed:.1f}s (budget {budget:g}s); " \
               f"mean density ratio {mean_ratio:.3f} ({diag} 0.8 diagnostic)"


# --- criterion 3 -------------------------------------------------------------

def _naive_entropy_argmax(weights):
    wmax = max(weights)
    total = sum(weights)
    best_t, best_en, values = None, -1.0, []
    for frac in THRESHOLD_FRACTIONS:
        t = frac * wmax
        r = sum(w for w in weights if w <= t) / total
        en = 0.0
        if 0.0 < r < 1.0:
            en = -r * math.log(r) - (1.0 - r) * math.log(1.0 - r)
        values.append(en)
        if en > best_en:
            best_t, best_en = t, en
    return best_t, values


def check_entropy_threshold(n_sets=100):
    rng = np.random.default_rng(303)
    matched, in_range = 0, True
    for _ in range(n_sets):
        n = int(rng.integers(3, 40))
        w = rng.exponential(1.0, (n, n)) * (rng.random((n, n)) < 0.8)
        w = np.triu(w, 1)
        w = w + w.T
        if w.max() == 0:
            w[0, 1] = w[1, 0] = 1.0
        g = entropy_threshold(w)
        t_ref, en_ref = _naive_entropy_argmax(w[np.triu_indices(n, 1)].tolist())
        matched += g.threshold == t_ref and np.argmax(g.entropies) == int(np.argmax(en_ref))
        in_range &= bool((g.entropies >= 0).all() and (g.entropies <= math.log(2) + 1e-12).all())
    ok = matched == n_sets and in_range
    return ok, f"grid argmax matched the exhaustive evaluation on {matched}/{n_sets} multisets; " \
               f"entropies within [0, ln 2]: {in_range}"


# --- criterion 4 -------------------------------------------------------------

def _naive_enhancement(degrees, gamma):
    d_max = max(degrees)
    d_mean = sum(degrees) / len(degrees)
    out = []
    for d in degrees:
        if d_max == 0:
            out.append(0.0)
        elif d > d_mean:
            out.append((d / d_max) ** (1.0 / gamma))
        else:
            out.append((d / d_max) ** gamma)
    return out


def check_enhancement(n_tuples=1000):
    rng = np.random.default_rng(404)
    exact = monotone = bounded = 0
    for _ in range(n_tuples):
        n_regions = int(rng.integers(2, 60))
        k = int(rng.integers(1, n_regions + 1))
        members = np.sort(rng.choice(n_regions, size=k, replace=False))
        deg = rng.integers(0, k, size=k)
        gamma = float(rng.uniform(1.0, 6.0))
        result = DksResult(members, deg, float(deg.mean()), 2)
        v = region_dense_values(result, n_regions, gamma)
        ref = np.zeros(n_regions)
        ref[members] = _naive_enhancement(deg.tolist(), gamma)
        exact += bool((v == ref).all())
        order = np.argsort(deg, kind="stable")
        monotone += bool((np.diff(v[members][order]) >= 0).all())
        outside = np.setdiff1d(np.arange(n_regions), members)
        bounded += bool(v.min() >= 0 and v.max() <= 1 and (v[outside] == 0).all())
    ok = exact == monotone == bounded == n_tuples
    return ok, f"exact {exact}, monotone {monotone}, in [0,1] {bounded} of {n_tuples} tuples"


# --- criteria 5 and 6 ----------------------------------------------------------

def _region_share(labels, mask):
    n = labels.max() + 1
    return np.bincount(labels.ravel(), weights=mask.ravel(), minlength=n) / np.bincount(
        labels.ravel(), minlength=n)


def check_suite_behavior(suite):
    excluded_zero = ordered = 0
    two_total = two_both = 0
    for scene, r in suite:
        labels = r.analysis.labels
        share = _region_share(labels, scene.truth)
        background = np.flatnonzero(share < 0.5)
        excluded = np.setdiff1d(background, r.dks.vertices)
        excluded_zero += bool((r.dense[np.isin(labels, excluded)] == 0).all())
        ordered += bool(r.saliency[scene.truth].mean() > r.saliency[~scene.truth].mean())
        if scene.kind == "two":
            two_total += 1
            two_both += all(r.saliency[b].max() > 0 for b in scene.blobs)
    n = len(suite)
    coverage = two_both / two_total
    ok = n >= 20 and excluded_zero == n and ordered == n and coverage >= 0.9
    return ok, f"{n} scenes; excluded background exactly 0 in {excluded_zero}/{n}; " \
               f"blob mean > background mean in {ordered}/{n}; both blobs nonzero in " \
               f"{two_both}/{two_total} two-blob scenes ({coverage:.0%}, need 90%)"


def _f_and_mae(pairs):
    scores = [score_map(to_uint8(m), gt) for m, gt in pairs]
    return np.mean([s.adaptive_f for s in scores]), np.mean([s.mae for s in scores])


def _real_pairs():
    root = os.environ.get(REAL_DATA_ENV)
    if not root:
        return None
    from dksaliency.evaluation import load_truth, pair_directories
    from dksaliency.imaging import load_image
    pairs, _ = pair_directories(os.path.join(root, "images"), os.path.join(root, "gt"))
    out = []
    for _, ip, gp in pairs:
        r = run_pipeline(load_image(ip))
        out.append((r, load_truth(gp)))
    return out


def check_improvement(suite):
    f_final, mae_final = _f_and_mae([(r.saliency, s.truth) for s, r in suite])
    f_gbvs, mae_gbvs = _f_and_mae([(r.gbvs_map, s.truth) for s, r in suite])
    ok = f_final > f_gbvs and mae_final <= mae_gbvs
    detail = f"synthetic: F final {f_final:.4f} vs intermediate {f_gbvs:.4f}; " \
             f"MAE final {mae_final:.4f} vs intermediate {mae_gbvs:.4f}"
    real = _real_pairs()
    if real is not None:
        if len(real) < 20:
            ok = False
            detail += f"; real set has only {len(real)} pairs (need 20)"
        else:
            rf, rm = _f_and_mae([(r.saliency, gt) for r, gt in real])
            gf, gm = _f_and_mae([(r.gbvs_map, gt) for r, gt in real])
            ok = ok and rf > gf and rm <= gm
            detail += f"; real ({len(real)}): F {rf:.4f} vs {gf:.4f}, MAE {rm:.4f} vs {gm:.4f}"
    return ok, detail


# --- criterion 7 -------------------------------------------------------------

def _naive_pr(mask, gt):
    tp = n_mask = n_gt = 0
    for i in range(8):
        for j in range(8):
            tp += bool(mask[i, j] and gt[i, j])
            n_mask += bool(mask[i, j])
            n_gt += bool(gt[i, j])
    return (tp / n_mask if n_mask else 1.0), (tp / n_gt if n_gt else 1.0)


def _naive_f(p, r):
    return 0.0 if p + r == 0 else 2 * p * r / (p + r)


def _naive_mae(m, gt):
    total = Fraction(0)
    for i in range(8):
        for j in range(8):
            total += Fraction(abs(float(m[i, j]) - float(gt[i, j])))
    return float(total) / 64


def check_metric_oracles(n_pairs=500):
    rng = np.random.default_rng(707)
    agree = 0
    fixed_point = True
    for _ in range(n_pairs):
        gt = rng.random((8, 8)) < rng.uniform(0, 1)
        m = rng.random((8, 8)) * (rng.random() < 0.9)
        mask = m > rng.uniform(0, 1)
        p, r = pr_point(mask, gt)
        agree += bool((p, r) == _naive_pr(mask, gt) and f_measure(p, r) == _naive_f(p, r)
                      and mae(m, gt) == _naive_mae(m, gt))
        v = float(rng.random())
        fixed_point &= abs(f_measure(v, v) - v) <= 1e-12
    ok = agree == n_pairs and fixed_point
    return ok, f"pr_point, f_measure, mae exact on {agree}/{n_pairs} random 8x8 pairs; " \
               f"F(p,p)=p within 1e-12: {fixed_point}"


# --- criterion 8 -------------------------------------------------------------

def check_determinism(tmp_dir):
    from PIL import Image
    src = os.path.join(tmp_dir, "in.png")
    Image.fromarray(make_scene("distractor", 3).image).save(src)
    outputs = []
    for tag in ("a", "b"):
        d = os.path.join(tmp_dir, tag)
        os.makedirs(d, exist_ok=True)
        rc = cli_main(["run", "--in", src, "--out", os.path.join(d, "out.png"),
                       "--seed", "7", "--dump-intermediates"])
        if rc != 0:
            return False, f"run exited with {rc}"
        outputs.append({fn: open(os.path.join(d, fn), "rb").read() for fn in sorted(os.listdir(d))})
    same = outputs[0] == outputs[1]
    n_csv = sum(fn.endswith(".csv") for fn in outputs[0])
    n_png = sum(fn.endswith(".png") for fn in outputs[0])
    return same, f"two runs byte-identical across {n_png} PNG and {n_csv} CSV files: {same}"


# --- criterion 9 -------------------------------------------------------------

def check_throughput(tmp_dir, budget=10.0):
    from PIL import Image
    src = os.path.join(tmp_dir, "big.png")
    Image.fromarray(make_scene("two", 11, width=400, height=300).image).save(src)
    t0 = time.perf_counter()
    rc = cli_main(["run", "--in", src, "--out", os.path.join(tmp_dir, "big_out.png")])
    elapsed = time.perf_counter() - t0
    ok = rc == 0 and elapsed < budget
    return ok, f"400x300 run took {elapsed:.2f}s (soft target {budget:g}s)"


# --- pytest wiring -------------------------------------------------------------

@pytest.fixture(scope="module")
def suite():
    return [(s, run_pipeline(s.image)) for s in make_suite()]


def test_criterion_1_stationary_oracle(capsys):
    ok, detail = check_stationary_oracle()
    _emit(capsys, 1, ok, detail)
    assert ok, detail


def test_criterion_2_dks_bound(capsys):
    ok, detail = check_dks_bound()
    _emit(capsys, 2, ok, detail)
    assert ok, detail


def test_criterion_3_entropy_threshold(capsys):
    ok, detail = check_entropy_threshold()
    _emit(capsys, 3, ok, detail)
    assert ok, detail


def test_criterion_4_enhancement_mapping(capsys):
    ok, detail = check_enhancement()
    _emit(capsys, 4, ok, detail)
    assert ok, detail


def test_criterion_5_synthetic_behavior(suite, capsys):
    ok, detail = check_suite_behavior(suite)
    _emit(capsys, 5, ok, detail)
    assert ok, detail


def test_criterion_6_directional_improvement(suite, capsys):
    ok, detail = check_improvement(suite)
    _emit(capsys, 6, ok, detail)
    assert ok, detail


def test_criterion_7_metric_oracles(capsys):
    ok, detail = check_metric_oracles()
    _emit(capsys, 7, ok, detail)
    assert ok, detail


def test_criterion_8_determinism(tmp_path, capsys):
    ok, detail = check_determinism(str(tmp_path))
    _emit(capsys, 8, ok, detail)
    assert ok, detail


def test_criterion_9_throughput(tmp_path, capsys):
    ok, detail = check_throughput(str(tmp_path))
    _emit(capsys, 9, ok, detail)
    if not ok:
        pytest.skip(f"soft target missed: {detail}")


if __name__ == "__main__":
    import tempfile

    scenes = [(s, run_pipeline(s.image)) for s in make_suite()]
    with tempfile.TemporaryDirectory() as tmp:
        results = [
            (1, check_stationary_oracle()),
            (2, check_dks_bound()),
            (3, check_entropy_threshold()),
            (4, check_enhancement()),
            (5, check_suite_behavior(scenes)),
            (6, check_improvement(scenes)),
            (7, check_metric_oracles()),
            (8, check_determinism(tmp)),
            (9, check_throughput(tmp)),
        ]
    for number, (ok, detail) in results:
        report(number, ok, detail)
