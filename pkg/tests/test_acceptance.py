"""Acceptance suite: every criterion at its stated tolerance.

Each test exercises one criterion end to end and prints a PASS line with
the measured values (run with -s to see them on success).
"""

import json
import time

import numpy as np

from cliquexplain.cliques import enumerate_cliques
from cliquexplain.graph import RegionGraph
from cliquexplain.image_io import save_png
from cliquexplain.metrics import mae, r_squared
from cliquexplain.pipeline import RunConfig, explain, run_explanation
from cliquexplain.segmentation import SegmentationParams, segment_image
from cliquexplain.surrogate import PerturbedDataset, k_lasso

from conftest import synthetic_grid_image
from oracles import brute_force_cliques, weighted_least_squares


def random_connected_graph(rng) -> tuple[int, list[tuple[int, int]]]:
    n = int(rng.integers(2, 11))
    order = rng.permutation(n)
    edges = set()
    for i in range(1, n):  # random spanning tree keeps the graph connected
        j = int(rng.integers(0, i))
        u, v = int(order[i]), int(order[j])
        edges.add((min(u, v), max(u, v)))
    for u in range(n):
        for v in range(u + 1, n):
            if rng.random() < 0.3:
                edges.add((u, v))
    return n, sorted(edges)


def graph_of(n, edges) -> RegionGraph:
    neigh = [[] for _ in range(n)]
    for u, v in edges:
        neigh[u].append(v)
        neigh[v].append(u)
    return RegionGraph(num_vertices=n, edges=tuple(edges),
                       adjacency=tuple(tuple(sorted(a)) for a in neigh))


def test_clique_oracle_equivalence_and_count_identity():
    # criteria: oracle equivalence on 200 random connected graphs (< 10 s)
    # and the count identity |C| = d' + |E| + #triangles on every graph
    rng = np.random.default_rng(2024)
    start = time.perf_counter()
    for _ in range(200):
        n, edges = random_connected_graph(rng)
        got = [c.members for c in enumerate_cliques(graph_of(n, edges))]
        expected = brute_force_cliques(n, edges)
        assert got == expected
        triangles = sum(1 for m in expected if len(m) == 3)
        assert len(got) == n + len(edges) + triangles
    elapsed = time.perf_counter() - start
    assert elapsed < 10.0
    print(f"PASS clique oracle equivalence + count identity: "
          f"200 graphs in {elapsed:.2f}s")


def test_sample_economy():
    # 20 random 128x128 images at target_segments=50:
    # sample_count(mps) < 400 < sample_count(uniform at the 1000 default)
    worst = 0
    for seed in range(20):
        rng = np.random.default_rng(seed)
        img = rng.integers(0, 256, (128, 128, 3), dtype=np.uint8)
        cfg = RunConfig(image_path="mem", sampler="both", target_segments=50,
                        k=5, fill="constant_black", n_samples=1000, rng_seed=seed)
        report, _, _ = run_explanation(img, cfg)
        blocks = report.to_dict()["samplers"]
        mps_count = blocks["mps"]["sample_count"]
        uniform_count = blocks["uniform"]["sample_count"]
        assert mps_count < 400 < uniform_count
        assert uniform_count == 1001
        worst = max(worst, mps_count)
    print(f"PASS sample economy: max mps sample_count {worst} < 400 < 1001")


def test_k_lasso_recovery():
    # noiseless y = 2*z1 - 1*z3 + 0.5 over 64 random binary rows, k=2
    rng = np.random.default_rng(42)
    X = rng.integers(0, 2, (64, 6)).astype(np.uint8)
    y = 2.0 * X[:, 1] - 1.0 * X[:, 3] + 0.5
    ds = PerturbedDataset(masks=X, responses=y, weights=np.ones(64))
    start = time.perf_counter()
    model = k_lasso(ds, k=2)
    elapsed = time.perf_counter() - start
    assert elapsed < 1.0
    assert model.selected == (1, 3)
    assert abs(model.weights[1] - 2.0) < 1e-6
    assert abs(model.weights[3] + 1.0) < 1e-6
    assert abs(model.intercept - 0.5) < 1e-6
    print(f"PASS k-lasso recovery: selected {model.selected} in {elapsed * 1000:.1f}ms")


def test_ols_limit_equivalence():
    # with k = d', path + refit must match the normal equations on 50
    # random weighted datasets (d' <= 8) within 1e-6
    worst = 0.0
    for seed in range(50):
        rng = np.random.default_rng(seed)
        d = int(rng.integers(2, 9))
        X = rng.integers(0, 2, (30, d)).astype(np.uint8)
        y = rng.normal(size=30)
        w = rng.uniform(0.1, 1.0, size=30)
        ds = PerturbedDataset(masks=X, responses=y, weights=w)
        model = k_lasso(ds, k=d)
        intercept, coef = weighted_least_squares(X, y, w, range(d))
        err = max(abs(model.intercept - intercept),
                  float(np.max(np.abs(model.weights - coef))))
        assert err < 1e-6, f"seed {seed}: max coefficient error {err}"
        worst = max(worst, err)
    print(f"PASS OLS-limit equivalence: 50 datasets, worst error {worst:.2e}")


def acceptance_instance(tmp_path):
    """The frozen synthetic instance: red concentrated in 3 grid cells, all
    other cells near mid gray in the red channel."""
    img = synthetic_grid_image(red_cells=((0, 1), (2, 2), (3, 0)), delta=20, seed=5)
    img_path = tmp_path / "instance.png"
    save_png(img, img_path)
    spmap = segment_image(img, SegmentationParams(target_segments=16))
    red_ids = sorted(int(s) for s in range(spmap.num_segments)
                     if img[..., 0][spmap.labels == s].mean() > 200)
    assert len(red_ids) == 3
    return img, img_path, red_ids


def test_end_to_end_fidelity_on_analytic_classifier(tmp_path):
    # explaining the color scorer on the synthetic instance: the three red
    # segments land in the top-3 positive weights, R^2 >= 0.95, MAE <= 0.02
    img, img_path, red_ids = acceptance_instance(tmp_path)
    start = time.perf_counter()
    cfg = RunConfig(image_path=str(img_path), classifier="builtin:color_scorer",
                    sampler="mps", k=5, target_segments=16, fill="constant_gray",
                    report_path=str(tmp_path / "report.json"))
    report = explain(cfg)
    elapsed = time.perf_counter() - start
    assert elapsed < 30.0

    block = report.to_dict()["samplers"]["mps"]
    top3 = [t["segment"] for t in block["top_segments"][:3]]
    assert sorted(top3) == red_ids, f"top-3 {sorted(top3)} != red segments {red_ids}"
    r2 = block["fidelity"]["r_squared"]
    err = block["fidelity"]["mae"]
    assert r2 >= 0.95
    assert err <= 0.02
    print(f"PASS end-to-end fidelity: top3={sorted(top3)} R2={r2:.4f} "
          f"MAE={err:.5f} in {elapsed:.1f}s")


def test_directional_contrast_mps_vs_uniform_at_equal_budget(tmp_path):
    # seed sweep over 10 seeds at the same sample budget |C|:
    # mean R^2(mps) > mean R^2(uniform)
    img, img_path, _ = acceptance_instance(tmp_path)
    probe = RunConfig(image_path=str(img_path), sampler="mps", k=5,
                      target_segments=16, fill="constant_gray")
    probe_report, _, _ = run_explanation(img, probe)
    clique_count = probe_report.to_dict()["samplers"]["mps"]["sample_count"] - 1

    mps_r2, uniform_r2 = [], []
    for seed in range(10):
        cfg = RunConfig(image_path=str(img_path), sampler="both", k=5,
                        target_segments=16, fill="constant_gray",
                        n_samples=clique_count, rng_seed=seed,
                        report_path=str(tmp_path / f"contrast_{seed}.json"))
        report = explain(cfg)
        blocks = report.to_dict()["samplers"]
        mps_r2.append(blocks["mps"]["fidelity"]["r_squared"])
        uniform_r2.append(blocks["uniform"]["fidelity"]["r_squared"])
        assert (tmp_path / f"contrast_{seed}.json").exists()

    mean_mps, mean_uniform = float(np.mean(mps_r2)), float(np.mean(uniform_r2))
    assert mean_mps > mean_uniform, \
        f"mean R2 mps {mean_mps:.4f} <= uniform {mean_uniform:.4f}"
    print(f"PASS directional contrast at budget {clique_count}: "
          f"mean R2 mps {mean_mps:.4f} > uniform {mean_uniform:.4f}")


def test_metric_closed_forms_exact():
    assert mae([1.0, 2.0], [1.0, 2.0]) == 0.0
    assert abs(mae([1.0, 0.0], [0.5, 0.5]) - 0.5) < 1e-12
    y = np.array([0.25, 0.5, 1.0])
    assert abs(r_squared(y, y) - 1.0) < 1e-12
    assert abs(r_squared(y, np.full(3, y.mean())) - 0.0) < 1e-12
    assert abs(r_squared([0.0, 1.0], [1.0, 0.0]) + 3.0) < 1e-12
    print("PASS metric closed forms: mae/r_squared exact to 1e-12")


def test_deterministic_reports(tmp_path):
    # identical RunConfig + seed => byte-identical report modulo wall_time_ms
    img = synthetic_grid_image(seed=9)
    img_path = tmp_path / "img.png"
    save_png(img, img_path)
    texts = []
    for i in range(2):
        cfg = RunConfig(image_path=str(img_path), sampler="both", k=4,
                        target_segments=12, fill="constant_black",
                        n_samples=80, rng_seed=21,
                        report_path=str(tmp_path / f"det_{i}.json"))
        explain(cfg)
        texts.append((tmp_path / f"det_{i}.json").read_text())

    def canonical(text):
        d = json.loads(text)
        for block in d["samplers"].values():
            block.pop("wall_time_ms")
        return json.dumps(d, indent=2)

    assert texts[0] != "" and canonical(texts[0]) == canonical(texts[1])
    print("PASS determinism: reports byte-identical modulo wall_time_ms")
