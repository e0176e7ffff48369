"""Fidelity measurement between the surrogate and the black box."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import ShapeError, UndefinedRSquaredError
from .surrogate import PerturbedDataset, SurrogateModel, surrogate_predict


def mae(y_true, y_pred) -> float:
    """Mean absolute error."""
    yt = np.asarray(y_true, dtype=np.float64)
    yp = np.asarray(y_pred, dtype=np.float64)
    if yt.shape != yp.shape or yt.size == 0:
        raise ShapeError(f"mae needs two equal nonzero-length vectors, "
                         f"got {yt.shape} and {yp.shape}")
    return float(np.mean(np.abs(yt - yp)))


def r_squared(y_true, y_pred) -> float:
    """Coefficient of determination 1 - SSE/SST.

    Raises UndefinedRSquaredError when the true values are constant
    (SST = 0); callers report that case explicitly instead of a number.
    """
    yt = np.asarray(y_true, dtype=np.float64)
    yp = np.asarray(y_pred, dtype=np.float64)
    if yt.shape != yp.shape or yt.size < 2:
        raise ShapeError(f"r_squared needs two equal vectors of length >= 2, "
                         f"got {yt.shape} and {yp.shape}")
    if np.ptp(yt) == 0.0:
        raise UndefinedRSquaredError("R^2 undefined: true values are constant")
    sst = float(np.sum((yt - yt.mean()) ** 2))
    sse = float(np.sum((yt - yp) ** 2))
    return 1.0 - sse / sst


@dataclass(frozen=True)
class FidelityReport:
    mae: float
    r_squared: float
    pred_prob_at_x: float  # surrogate evaluated on the all-ones mask
    true_prob_at_x: float  # black-box probability at the instance
    n_rows: int


def fidelity_report(model: SurrogateModel, dataset: PerturbedDataset,
                    f_at_x: float) -> FidelityReport:
    """In-sample fidelity: surrogate vs black-box responses over the rows
    used for fitting, aggregated unweighted."""
    y_true = dataset.responses
    y_pred = np.array([surrogate_predict(model, m) for m in dataset.masks])
    ones = np.ones(dataset.num_features, dtype=np.uint8)
    return FidelityReport(
        mae=mae(y_true, y_pred),
        r_squared=r_squared(y_true, y_pred),
        pred_prob_at_x=surrogate_predict(model, ones),
        true_prob_at_x=float(f_at_x),
        n_rows=dataset.n_rows,
    )
