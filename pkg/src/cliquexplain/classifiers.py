"""Uniform black-box access to the classifier under explanation.

Two analytic builtins make end-to-end behavior exactly predictable in
tests; the remote kind speaks a small JSON-over-HTTP protocol so real
models can be served out of process (see the companion classifier server).
"""

from __future__ import annotations

import base64
from dataclasses import dataclass

import httpx
import numpy as np

from .errors import ParameterError, ProtocolError, ShapeError, TransportError
from .image_io import encode_png, validate_image

BUILTIN_COLOR_SCORER = "builtin_color_scorer"
BUILTIN_REGION_COUNTER = "builtin_region_counter"
REMOTE = "remote"
KINDS = (BUILTIN_COLOR_SCORER, BUILTIN_REGION_COUNTER, REMOTE)

REMOTE_BATCH_SIZE = 32  # images per HTTP request, bounds payload size
REMOTE_RETRIES = 2  # extra attempts after the first transport failure


@dataclass(frozen=True)
class ClassifierHandle:
    """Immutable description of a classifier.

    num_classes is fixed at 2 for the builtins and may be None for remote
    handles until the first response reveals it.
    """

    kind: str
    endpoint: str | None = None
    num_classes: int | None = 2

    def __post_init__(self) -> None:
        if self.kind not in KINDS:
            raise ParameterError(f"unknown classifier kind {self.kind!r}")
        if self.kind == REMOTE and not self.endpoint:
            raise ParameterError("remote classifier requires an endpoint URL")
        if self.kind != REMOTE and self.num_classes != 2:
            raise ParameterError("builtin classifiers are binary (num_classes=2)")
        if self.num_classes is not None and self.num_classes < 2:
            raise ParameterError("num_classes must be >= 2")


def target_class(prediction: np.ndarray) -> int:
    """Argmax class index; ties resolve to the lowest index."""
    return int(np.argmax(np.asarray(prediction)))


def _score_color(images: list[np.ndarray]) -> list[np.ndarray]:
    # class 0: mean normalized red-channel intensity
    out = []
    for img in images:
        p0 = float(img[..., 0].astype(np.float64).mean() / 255.0)
        out.append(np.array([p0, 1.0 - p0], dtype=np.float64))
    return out


def _score_region(images: list[np.ndarray]) -> list[np.ndarray]:
    # class 0: fraction of pixels brighter than 50% gray
    out = []
    for img in images:
        brightness = img.astype(np.float64).mean(axis=-1)
        p0 = float((brightness > 127.5).mean())
        out.append(np.array([p0, 1.0 - p0], dtype=np.float64))
    return out


def _post_with_retries(client: httpx.Client, url: str, payload: dict) -> httpx.Response:
    last: Exception | None = None
    for _ in range(REMOTE_RETRIES + 1):
        try:
            return client.post(url, json=payload)
        except httpx.TransportError as exc:
            last = exc
    raise TransportError(f"classifier at {url} unreachable after "
                         f"{REMOTE_RETRIES + 1} attempts: {last}")


def _parse_probabilities(body: object, expected_rows: int) -> list[np.ndarray]:
    if not isinstance(body, dict):
        raise ProtocolError("response body is not a JSON object")
    if "probabilities" not in body:
        raise ProtocolError("response is missing the 'probabilities' field")
    rows = body["probabilities"]
    if not isinstance(rows, list) or len(rows) != expected_rows:
        raise ProtocolError(
            f"'probabilities' must be a list of {expected_rows} rows, got "
            f"{type(rows).__name__} of length {len(rows) if isinstance(rows, list) else 'n/a'}"
        )
    parsed = []
    for i, row in enumerate(rows):
        if not isinstance(row, list) or len(row) < 2:
            raise ProtocolError(f"'probabilities[{i}]' must be a list of >= 2 numbers")
        vec = np.asarray(row, dtype=np.float64)
        if np.any(vec < 0.0) or np.any(vec > 1.0) or not np.all(np.isfinite(vec)):
            raise ProtocolError(f"'probabilities[{i}]' contains values outside [0, 1]")
        parsed.append(vec)
    return parsed


def _predict_remote(handle: ClassifierHandle, images: list[np.ndarray],
                    transport: httpx.BaseTransport | None,
                    timeout: float) -> list[np.ndarray]:
    url = handle.endpoint.rstrip("/") + "/predict"
    predictions: list[np.ndarray] = []
    with httpx.Client(transport=transport, timeout=timeout) as client:
        for start in range(0, len(images), REMOTE_BATCH_SIZE):
            chunk = images[start:start + REMOTE_BATCH_SIZE]
            payload = {"images": [base64.b64encode(encode_png(img)).decode("ascii")
                                  for img in chunk]}
            resp = _post_with_retries(client, url, payload)
            if resp.status_code != 200:
                raise ProtocolError(f"classifier answered HTTP {resp.status_code}")
            try:
                body = resp.json()
            except ValueError as exc:
                raise ProtocolError(f"response is not valid JSON: {exc}") from exc
            predictions.extend(_parse_probabilities(body, len(chunk)))
    widths = {len(p) for p in predictions}
    if len(widths) > 1:
        raise ProtocolError(f"'probabilities' rows have inconsistent widths {sorted(widths)}")
    if handle.num_classes is not None and widths and widths != {handle.num_classes}:
        raise ProtocolError(
            f"'probabilities' rows have width {widths.pop()}, expected {handle.num_classes}"
        )
    return predictions


def predict_batch(handle: ClassifierHandle, images: list[np.ndarray], *,
                  transport: httpx.BaseTransport | None = None,
                  timeout: float = 30.0) -> list[np.ndarray]:
    """Per-class probability vectors for a batch of equally sized images.

    Output order matches input order.  `transport` is an httpx transport
    override, used by tests to fake the remote side.
    """
    if not images:
        raise ParameterError("predict_batch requires a nonempty batch")
    images = [validate_image(img) for img in images]
    dims = {img.shape for img in images}
    if len(dims) > 1:
        raise ShapeError(f"batch images must share dimensions, got {sorted(dims)}")

    if handle.kind == BUILTIN_COLOR_SCORER:
        return _score_color(images)
    if handle.kind == BUILTIN_REGION_COUNTER:
        return _score_region(images)
    return _predict_remote(handle, images, transport, timeout)
