"""End-to-end orchestration: segment, sample, query, fit, measure, render.

`explain` runs the full workflow for one image against a classifier for
one or both samplers and produces a machine-readable report whose JSON
form is byte-reproducible for seeded runs, apart from wall_time_ms.
"""

from __future__ import annotations

import hashlib
import json
import time
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .classifiers import (BUILTIN_COLOR_SCORER, BUILTIN_REGION_COUNTER, REMOTE,
                          ClassifierHandle, predict_batch, target_class)
from .cliques import DEACTIVATE, POLARITIES, clique_list_text, enumerate_cliques
from .errors import ParameterError, UndefinedRSquaredError
from .graph import RegionGraph, build_region_graph, edge_list_text
from .image_io import encode_png, load_image
from .metrics import FidelityReport, fidelity_report, mae
from .overlay import render_overlay
from .perturb import FILL_KINDS, SEGMENT_MEAN, KernelParams
from .segmentation import SegmentationParams, SuperpixelMap, label_map_png, segment_image
from .surrogate import (MPS, SAMPLER_KINDS, UNIFORM, build_dataset, k_lasso,
                        surrogate_predict, top_k_segments)

BOTH = "both"


def parse_classifier(spec: str) -> ClassifierHandle:
    """Parse a classifier spec: builtin:<name> or url:<endpoint>."""
    if spec == "builtin:color_scorer":
        return ClassifierHandle(kind=BUILTIN_COLOR_SCORER)
    if spec == "builtin:region_counter":
        return ClassifierHandle(kind=BUILTIN_REGION_COUNTER)
    if spec.startswith("url:"):
        endpoint = spec[len("url:"):]
        if not endpoint:
            raise ParameterError("url: classifier spec needs an endpoint")
        return ClassifierHandle(kind=REMOTE, endpoint=endpoint, num_classes=None)
    raise ParameterError(
        f"unknown classifier spec {spec!r}; expected builtin:color_scorer, "
        "builtin:region_counter or url:<endpoint>"
    )


@dataclass(frozen=True)
class RunConfig:
    """Everything one explanation run needs, including output destinations."""

    image_path: str
    classifier: str = "builtin:color_scorer"
    sampler: str = BOTH
    k: int = 5
    target_segments: int = 50
    sigma: float = 0.25
    fill: str = SEGMENT_MEAN
    n_samples: int = 1000
    rng_seed: int = 0
    polarity: str = DEACTIVATE
    oos_resample: bool = False  # also score on a fresh uniform sample
    report_path: str | None = None
    overlay_dir: str | None = None
    debug_dir: str | None = None

    def __post_init__(self) -> None:
        if self.sampler not in SAMPLER_KINDS + (BOTH,):
            raise ParameterError(f"sampler must be one of mps|uniform|both, "
                                 f"got {self.sampler!r}")
        if self.k < 1:
            raise ParameterError("k must be >= 1")
        if self.n_samples < self.k + 1:
            raise ParameterError("n_samples must be at least k + 1")
        if self.fill not in FILL_KINDS:
            raise ParameterError(f"unknown fill strategy {self.fill!r}")
        if self.polarity not in POLARITIES:
            raise ParameterError(f"unknown polarity {self.polarity!r}")
        parse_classifier(self.classifier)  # validate eagerly
        KernelParams(sigma=self.sigma)

    def requested_samplers(self) -> list[str]:
        return [MPS, UNIFORM] if self.sampler == BOTH else [self.sampler]


@dataclass(frozen=True)
class SamplerResult:
    sampler: str
    sample_count: int
    top_segments: list[tuple[int, float]]  # (segment id, weight), weight descending
    intercept: float
    fidelity: FidelityReport | None
    mae_only: float | None  # populated when R^2 is undefined
    r_squared_reason: str | None
    fidelity_oos: FidelityReport | None  # fresh uniform resample, when requested
    warnings: tuple[str, ...]
    wall_time_ms: float


@dataclass(frozen=True)
class ExplanationReport:
    image_path: str
    image_sha256: str
    width: int
    height: int
    classifier: str
    num_classes: int
    target_class: int
    true_prob: float
    config: RunConfig
    num_segments: int
    num_edges: int
    num_triangles: int
    samplers: dict[str, SamplerResult]

    def to_dict(self) -> dict:
        cfg = self.config
        blocks = {}
        for name in cfg.requested_samplers():
            r = self.samplers[name]
            if r.fidelity is not None:
                fid = {
                    "mae": r.fidelity.mae,
                    "r_squared": r.fidelity.r_squared,
                    "r_squared_reason": None,
                    "pred_prob_at_x": r.fidelity.pred_prob_at_x,
                    "true_prob_at_x": r.fidelity.true_prob_at_x,
                    "n_rows": r.fidelity.n_rows,
                }
            else:
                fid = {
                    "mae": r.mae_only,
                    "r_squared": None,
                    "r_squared_reason": r.r_squared_reason,
                    "pred_prob_at_x": None,
                    "true_prob_at_x": self.true_prob,
                    "n_rows": r.sample_count,
                }
            if r.fidelity_oos is not None:
                oos = {
                    "label": "out-of-sample",
                    "mae": r.fidelity_oos.mae,
                    "r_squared": r.fidelity_oos.r_squared,
                    "n_rows": r.fidelity_oos.n_rows,
                }
            else:
                oos = None
            blocks[name] = {
                "sample_count": r.sample_count,
                "top_segments": [{"segment": s, "weight": w} for s, w in r.top_segments],
                "intercept": r.intercept,
                "fidelity": fid,
                "fidelity_out_of_sample": oos,
                "warnings": list(r.warnings),
                "wall_time_ms": r.wall_time_ms,
            }
        return {
            "image": {
                "path": self.image_path,
                "sha256": self.image_sha256,
                "width": self.width,
                "height": self.height,
            },
            "classifier": {
                "spec": self.classifier,
                "num_classes": self.num_classes,
                "target_class": self.target_class,
                "true_prob": self.true_prob,
            },
            "config": {
                "sampler": cfg.sampler,
                "k": cfg.k,
                "target_segments": cfg.target_segments,
                "sigma": cfg.sigma,
                "fill": cfg.fill,
                "n_samples": cfg.n_samples,
                "rng_seed": cfg.rng_seed,
                "polarity": cfg.polarity,
                "oos_resample": cfg.oos_resample,
            },
            "segmentation": {
                "num_segments": self.num_segments,
                "num_edges": self.num_edges,
                "num_triangles": self.num_triangles,
            },
            "wall_time_scope": "dataset construction and surrogate fitting, per sampler",
            "samplers": blocks,
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2, ensure_ascii=False) + "\n"


def _run_sampler(name: str, image: np.ndarray, spmap: SuperpixelMap,
                 graph: RegionGraph, handle: ClassifierHandle, config: RunConfig,
                 f_at_x: float, transport) -> SamplerResult:
    kernel = KernelParams(sigma=config.sigma)
    start = time.perf_counter()
    dataset = build_dataset(image, spmap, graph, name, handle, kernel=kernel,
                            fill=config.fill, n_samples=config.n_samples,
                            rng_seed=config.rng_seed, polarity=config.polarity,
                            transport=transport)
    model = k_lasso(dataset, config.k)
    elapsed_ms = max((time.perf_counter() - start) * 1000.0, 1e-6)

    top = top_k_segments(model, config.k)
    top_pairs = [(s, float(model.weights[s])) for s in top]
    try:
        fid: FidelityReport | None = fidelity_report(model, dataset, f_at_x)
        mae_only = None
        reason = None
    except UndefinedRSquaredError as exc:
        fid = None
        y_pred = [surrogate_predict(model, m) for m in dataset.masks]
        mae_only = mae(dataset.responses, y_pred)
        reason = str(exc)

    fid_oos = None
    if config.oos_resample:
        oos_ds = build_dataset(image, spmap, graph, UNIFORM, handle, kernel=kernel,
                               fill=config.fill, n_samples=config.n_samples,
                               rng_seed=config.rng_seed + 1, polarity=config.polarity,
                               transport=transport)
        try:
            fid_oos = fidelity_report(model, oos_ds, f_at_x)
        except UndefinedRSquaredError:
            fid_oos = None
    return SamplerResult(sampler=name, sample_count=dataset.n_rows,
                         top_segments=top_pairs, intercept=model.intercept,
                         fidelity=fid, mae_only=mae_only, r_squared_reason=reason,
                         fidelity_oos=fid_oos, warnings=model.warnings,
                         wall_time_ms=elapsed_ms)


def run_explanation(image: np.ndarray, config: RunConfig, *, transport=None
                    ) -> tuple[ExplanationReport, dict[str, np.ndarray], dict[str, bytes]]:
    """Run the workflow on an in-memory image.

    Returns the report, per-sampler overlay images, and debug artifacts
    (label map PNG, edge list, clique list) without touching the filesystem.
    """
    spmap = segment_image(image, SegmentationParams(target_segments=config.target_segments))
    graph = build_region_graph(spmap)
    cliques = enumerate_cliques(graph)
    num_triangles = sum(1 for c in cliques if len(c) == 3)

    handle = parse_classifier(config.classifier)
    anchor_pred = predict_batch(handle, [image], transport=transport)
    target = target_class(anchor_pred[0])
    true_prob = float(anchor_pred[0][target])

    samplers = {}
    overlays = {}
    for name in config.requested_samplers():
        result = _run_sampler(name, image, spmap, graph, handle, config,
                              true_prob, transport)
        samplers[name] = result
        overlays[name] = render_overlay(image, spmap, [s for s, _ in result.top_segments])

    report = ExplanationReport(
        image_path=config.image_path,
        image_sha256=hashlib.sha256(image.tobytes()).hexdigest(),
        width=image.shape[1], height=image.shape[0],
        classifier=config.classifier,
        num_classes=len(anchor_pred[0]),
        target_class=target,
        true_prob=true_prob,
        config=config,
        num_segments=spmap.num_segments,
        num_edges=graph.num_edges,
        num_triangles=num_triangles,
        samplers=samplers,
    )
    debug = {
        "labels.png": encode_png(label_map_png(spmap)),
        "edges.txt": edge_list_text(graph).encode(),
        "cliques.txt": clique_list_text(cliques).encode(),
    }
    return report, overlays, debug


def write_artifacts(report: ExplanationReport, overlays: dict[str, np.ndarray],
                    debug: dict[str, bytes], config: RunConfig) -> None:
    """Write overlays/debug dumps, then the report; the report comes last so
    its presence on disk implies the whole run finished."""
    from .image_io import save_png

    if config.overlay_dir:
        odir = Path(config.overlay_dir)
        odir.mkdir(parents=True, exist_ok=True)
        for name, img in overlays.items():
            save_png(img, odir / f"overlay_{name}.png")
    if config.debug_dir:
        ddir = Path(config.debug_dir)
        ddir.mkdir(parents=True, exist_ok=True)
        for name, data in debug.items():
            (ddir / name).write_bytes(data)
    if config.report_path:
        path = Path(config.report_path)
        path.parent.mkdir(parents=True, exist_ok=True)
        path.write_text(report.to_json(), encoding="utf-8")


def explain(config: RunConfig, *, transport=None) -> ExplanationReport:
    """Load the configured image, run the workflow, write the artifacts."""
    image = load_image(config.image_path)
    report, overlays, debug = run_explanation(image, config, transport=transport)
    write_artifacts(report, overlays, debug, config)
    return report
