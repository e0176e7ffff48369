"""HTTP facade over the explanation pipeline.

POST /explain takes a base64 image plus run settings and returns the
report with optional overlay/debug artifacts, all in one JSON body, so a
thin client can reproduce exactly what a local run would have written.
"""

from __future__ import annotations

import base64
import binascii

from fastapi import FastAPI, HTTPException
from fastapi.responses import PlainTextResponse
from pydantic import BaseModel, Field

from .errors import ExplainError, ProtocolError, TransportError
from .image_io import decode_image
from .pipeline import RunConfig, run_explanation


class ExplainRequest(BaseModel):
    image_b64: str = Field(description="base64-encoded PNG or JPEG bytes")
    image_path: str = Field(default="", description="echoed into the report")
    classifier: str = "builtin:color_scorer"
    sampler: str = "both"
    k: int = Field(default=5, ge=1)
    target_segments: int = Field(default=50, ge=2)
    sigma: float = Field(default=0.25, gt=0)
    fill: str = "segment_mean"
    n_samples: int = Field(default=1000, ge=2)
    rng_seed: int = 0
    polarity: str = "deactivate_clique"
    oos_resample: bool = False
    include_overlays: bool = True
    include_debug: bool = False


class ExplainResponse(BaseModel):
    report: dict
    overlays: dict[str, str]  # sampler name -> base64 PNG
    debug: dict[str, str]  # artifact filename -> base64 bytes


app = FastAPI(title="cliquexplain", description="local surrogate explanations "
              "for image classifiers over superpixel cliques")


@app.get("/healthz", response_class=PlainTextResponse)
def healthz() -> str:
    return "ok"


@app.post("/explain", response_model=ExplainResponse)
def explain_endpoint(req: ExplainRequest) -> ExplainResponse:
    try:
        raw = base64.b64decode(req.image_b64, validate=True)
    except (binascii.Error, ValueError) as exc:
        raise HTTPException(status_code=400, detail=f"image_b64 is not valid base64: {exc}")
    try:
        image = decode_image(raw)
    except Exception as exc:
        raise HTTPException(status_code=400, detail=f"image is not decodable: {exc}")

    try:
        config = RunConfig(
            image_path=req.image_path, classifier=req.classifier,
            sampler=req.sampler, k=req.k, target_segments=req.target_segments,
            sigma=req.sigma, fill=req.fill, n_samples=req.n_samples,
            rng_seed=req.rng_seed, polarity=req.polarity,
            oos_resample=req.oos_resample,
        )
        report, overlays, debug = run_explanation(image, config)
    except (TransportError, ProtocolError) as exc:
        raise HTTPException(status_code=502, detail=str(exc))
    except ExplainError as exc:
        raise HTTPException(status_code=400, detail=str(exc))

    from .image_io import encode_png

    overlay_b64 = {}
    if req.include_overlays:
        overlay_b64 = {name: base64.b64encode(encode_png(img)).decode("ascii")
                       for name, img in overlays.items()}
    debug_b64 = {}
    if req.include_debug:
        debug_b64 = {name: base64.b64encode(data).decode("ascii")
                     for name, data in debug.items()}
    return ExplainResponse(report=report.to_dict(), overlays=overlay_b64, debug=debug_b64)
