"""The weighted perturbation dataset and the K-sparse linear surrogate.

Fitting runs in two stages.  Stage one traverses a weighted LASSO
regularization path (coordinate descent, observations scaled by
sqrt(weight)) from lambda_max downward until at least `k` features are
active; if more than `k` activate at that grid point, the smallest
activations are dropped.  Stage two refits the chosen features by
weighted least squares with an unpenalized intercept.  Everything is
deterministic.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .classifiers import ClassifierHandle, predict_batch, target_class
from .cliques import DEACTIVATE, clique_to_mask, enumerate_cliques, uniform_sampler
from .errors import ParameterError
from .graph import RegionGraph
from .perturb import (SEGMENT_MEAN, KernelParams, kernel_weight, mask_distance,
                      recover_batch)
from .segmentation import SuperpixelMap, full_mask

MPS = "mps"
UNIFORM = "uniform"
SAMPLER_KINDS = (MPS, UNIFORM)

PATH_GRID_SIZE = 100
PATH_LAMBDA_FLOOR = 1e-4  # smallest lambda, as a fraction of lambda_max
CD_TOL = 1e-9  # stop a lambda's sweeps when max coefficient change is below this
CD_MAX_SWEEPS = 10_000


@dataclass(frozen=True)
class PerturbedDataset:
    """Row-aligned perturbation samples; row 0 is always the anchor
    (all-ones mask, black-box response at the instance, weight 1)."""

    masks: np.ndarray      # (n, d') uint8
    responses: np.ndarray  # (n,) float64, target-class probability per row
    weights: np.ndarray    # (n,) float64 in (0, 1]

    def __post_init__(self) -> None:
        if self.masks.ndim != 2:
            raise ParameterError("masks must be a 2-D array")
        n = self.masks.shape[0]
        if self.responses.shape != (n,) or self.weights.shape != (n,):
            raise ParameterError("responses and weights must align with masks rows")
        if np.any(self.weights <= 0) or np.any(self.weights > 1):
            raise ParameterError("weights must lie in (0, 1]")

    @property
    def n_rows(self) -> int:
        return self.masks.shape[0]

    @property
    def num_features(self) -> int:
        return self.masks.shape[1]

    def rows(self):
        return zip(self.masks, self.responses, self.weights)


@dataclass(frozen=True)
class SurrogateModel:
    """K-sparse local linear model: prediction = intercept + weights . mask."""

    weights: np.ndarray  # (d',) float64, at most k nonzeros
    intercept: float
    selected: tuple[int, ...]  # indices of the nonzero weights, ascending
    k: int
    warnings: tuple[str, ...] = field(default=())


def build_dataset(image: np.ndarray, spmap: SuperpixelMap, graph: RegionGraph,
                  sampler_kind: str, handle: ClassifierHandle, *,
                  kernel: KernelParams | None = None,
                  fill: str = SEGMENT_MEAN,
                  n_samples: int = 1000,
                  rng_seed: int = 0,
                  polarity: str = DEACTIVATE,
                  transport=None) -> PerturbedDataset:
    """Assemble (mask, response, weight) rows for one sampler.

    mps: one row per clique of the region graph; uniform: `n_samples`
    Bernoulli(0.5) rows.  The anchor row is prepended either way, and the
    response is the probability of the instance's own top class.
    """
    kernel = kernel or KernelParams()
    d = spmap.num_segments
    if sampler_kind == MPS:
        masks = [clique_to_mask(c, d, polarity) for c in enumerate_cliques(graph)]
    elif sampler_kind == UNIFORM:
        masks = uniform_sampler(d, n_samples, rng_seed)
    else:
        raise ParameterError(f"unknown sampler kind {sampler_kind!r}")
    masks = [full_mask(spmap)] + masks

    anchor_pred = predict_batch(handle, [image], transport=transport)[0]
    target = target_class(anchor_pred)

    responses = np.empty(len(masks), dtype=np.float64)
    responses[0] = anchor_pred[target]
    chunk = 32
    for start in range(1, len(masks), chunk):
        batch_masks = masks[start:start + chunk]
        batch_images = recover_batch(image, spmap, batch_masks, fill)
        preds = predict_batch(handle, batch_images, transport=transport)
        responses[start:start + len(preds)] = [p[target] for p in preds]

    weights = np.array([kernel_weight(mask_distance(m, kernel), kernel) for m in masks])
    return PerturbedDataset(masks=np.asarray(masks, dtype=np.uint8),
                            responses=responses, weights=weights)


def _weighted_center(X: np.ndarray, y: np.ndarray, w: np.ndarray):
    wsum = w.sum()
    mu_x = (w @ X) / wsum
    mu_y = float(w @ y) / wsum
    sw = np.sqrt(w)
    return (X - mu_x) * sw[:, None], (y - mu_y) * sw, mu_x, mu_y


def _coordinate_descent(Xc: np.ndarray, yc: np.ndarray, coef: np.ndarray,
                        lam: float, col_norm2: np.ndarray) -> np.ndarray:
    """Minimize (1/2n)||yc - Xc w||^2 + lam ||w||_1 in place, warm-started."""
    n = Xc.shape[0]
    resid = yc - Xc @ coef
    for _ in range(CD_MAX_SWEEPS):
        max_delta = 0.0
        for j in range(Xc.shape[1]):
            if col_norm2[j] == 0.0:
                continue
            old = coef[j]
            rho = (Xc[:, j] @ resid) / n + col_norm2[j] * old
            new = np.sign(rho) * max(abs(rho) - lam, 0.0) / col_norm2[j]
            if new != old:
                resid -= Xc[:, j] * (new - old)
                coef[j] = new
                max_delta = max(max_delta, abs(new - old))
        if max_delta < CD_TOL:
            break
    return coef


def lasso_lambda_max(dataset: PerturbedDataset) -> float:
    """Smallest penalty at which no feature is active: the largest absolute
    weighted correlation between a centered feature and the response."""
    X = dataset.masks.astype(np.float64)
    Xc, yc, _, _ = _weighted_center(X, dataset.responses, dataset.weights)
    return float(np.max(np.abs(Xc.T @ yc)) / X.shape[0])


def k_lasso(dataset: PerturbedDataset, k: int) -> SurrogateModel:
    """Select at most `k` features on the weighted LASSO path, then refit
    them by weighted least squares with an intercept."""
    if k < 1:
        raise ParameterError("k must be >= 1")
    if dataset.n_rows < k + 1:
        raise ParameterError(f"need at least {k + 1} rows to fit k={k}, "
                             f"got {dataset.n_rows}")

    X = dataset.masks.astype(np.float64)
    y = dataset.responses
    d = dataset.num_features
    Xc, yc, mu_x, mu_y = _weighted_center(X, y, dataset.weights)
    n = X.shape[0]
    col_norm2 = (Xc * Xc).sum(axis=0) / n
    warnings: list[str] = []

    lam_max = float(np.max(np.abs(Xc.T @ yc)) / n)
    if lam_max == 0.0 or np.ptp(y) == 0.0:
        # Constant response (or all-constant features): the zero model.
        warnings.append("no feature ever activates: response has no "
                        "correlation with any feature")
        return SurrogateModel(weights=np.zeros(d), intercept=mu_y,
                              selected=(), k=k, warnings=tuple(warnings))

    coef = np.zeros(d)
    active: np.ndarray = np.array([], dtype=np.intp)
    for lam in np.geomspace(lam_max, lam_max * PATH_LAMBDA_FLOOR, PATH_GRID_SIZE):
        coef = _coordinate_descent(Xc, yc, coef, lam, col_norm2)
        active = np.flatnonzero(coef)
        if len(active) >= k:
            break

    if len(active) > k:
        # keep the k largest magnitudes; ties keep the lower feature id
        order = np.lexsort((active, -np.abs(coef[active])))
        active = np.sort(active[order[:k]])
    elif len(active) < k:
        warnings.append(f"only {len(active)} of {k} requested features "
                        "activated on the regularization path")

    selected = np.sort(active)
    weights_full = np.zeros(d)
    intercept = mu_y
    if len(selected) > 0:
        A = Xc[:, selected]
        sol, _, rank, _ = np.linalg.lstsq(A, yc, rcond=None)
        if rank < len(selected):
            warnings.append("degenerate design: selected features are "
                            "constant or collinear; minimum-norm fit used")
        weights_full[selected] = sol
        intercept = mu_y - float(mu_x[selected] @ sol)
        selected = np.flatnonzero(weights_full)  # drop exact-zero refits

    return SurrogateModel(weights=weights_full, intercept=float(intercept),
                          selected=tuple(int(i) for i in selected), k=k,
                          warnings=tuple(warnings))


def surrogate_predict(model: SurrogateModel, mask: np.ndarray) -> float:
    """Evaluate the surrogate on one mask."""
    mask = np.asarray(mask, dtype=np.float64)
    if mask.shape != model.weights.shape:
        raise ParameterError(f"mask length {mask.shape} does not match model "
                             f"dimension {model.weights.shape}")
    return float(model.intercept + model.weights @ mask)


def top_k_segments(model: SurrogateModel, k: int) -> list[int]:
    """Segment ids with the largest positive weights, descending; ties go to
    the lower id.  Returns fewer than k if fewer positive weights exist."""
    if k < 1:
        raise ParameterError("k must be >= 1")
    positive = [(float(w), int(i)) for i, w in enumerate(model.weights) if w > 0]
    positive.sort(key=lambda t: (-t[0], t[1]))
    return [i for _, i in positive[:k]]
