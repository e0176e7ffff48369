"""The prediction wire protocol over HTTP.

POST /predict accepts {"images": [<base64 PNG/JPEG>, ...]} and answers
{"probabilities": [[p0, p1, ...], ...]} with rows in request order.
GET /healthz answers 200 "ok".  Undecodable images give 400, batches over
the limit give 413; both with a JSON {"error": ...} body.
"""

from __future__ import annotations

import base64
import binascii
import io
from dataclasses import dataclass

from fastapi import FastAPI
from fastapi.responses import JSONResponse, PlainTextResponse
from PIL import Image
from pydantic import BaseModel

from .models import LoadedModel, load_model

MAX_BATCH = 64


@dataclass(frozen=True)
class ServerConfig:
    host: str = "127.0.0.1"
    port: int = 8500
    model: str = "tiny"
    top_class_only: bool = False

    def __post_init__(self) -> None:
        if not 1024 <= self.port <= 65535:
            raise ValueError(f"port must be in [1024, 65535], got {self.port}")


class PredictRequest(BaseModel):
    images: list[str]


class PredictResponse(BaseModel):
    probabilities: list[list[float]]


def _decode(b64: str, index: int) -> Image.Image:
    try:
        raw = base64.b64decode(b64, validate=True)
        img = Image.open(io.BytesIO(raw))
        img.load()
        return img
    except (binascii.Error, ValueError, OSError) as exc:
        raise ImageDecodeError(f"images[{index}] is not a decodable image: {exc}")


class ImageDecodeError(ValueError):
    pass


def create_app(config: ServerConfig | None = None,
               model: LoadedModel | None = None) -> FastAPI:
    config = config or ServerConfig()
    model = model or load_model(config.model)
    app = FastAPI(title="classifier-server",
                  description=f"serving {model.name} ({model.num_classes} classes)")

    @app.get("/healthz", response_class=PlainTextResponse)
    def healthz() -> str:
        return "ok"

    @app.post("/predict", response_model=PredictResponse)
    def predict(req: PredictRequest):
        if len(req.images) > MAX_BATCH:
            return JSONResponse(status_code=413, content={
                "error": f"batch of {len(req.images)} exceeds the limit of {MAX_BATCH}"})
        if not req.images:
            return PredictResponse(probabilities=[])
        try:
            images = [_decode(b64, i) for i, b64 in enumerate(req.images)]
        except ImageDecodeError as exc:
            return JSONResponse(status_code=400, content={"error": str(exc)})

        probs = model.predict(images)
        if config.top_class_only:
            rows = [[float(p.max()), float(1.0 - p.max())] for p in probs]
        else:
            rows = [[float(x) for x in p] for p in probs]
        return PredictResponse(probabilities=rows)

    return app
