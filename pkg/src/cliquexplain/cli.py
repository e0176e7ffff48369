"""Command-line entry points.

`cliquexplain` explains one image, either in-process or against a running
explanation service (--server); `cliquexplain-serve` starts that service.
"""

from __future__ import annotations

import argparse
import base64
import json
import sys
from pathlib import Path

import httpx

from .pipeline import RunConfig, explain


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(
        prog="cliquexplain",
        description="Explain an image classifier's prediction with a sparse "
                    "local surrogate over superpixels.",
    )
    p.add_argument("--image", required=True, help="path to a PNG or JPEG image")
    p.add_argument("--classifier", default="builtin:color_scorer",
                   help="builtin:color_scorer | builtin:region_counter | url:<endpoint>")
    p.add_argument("--sampler", default="both", choices=["mps", "uniform", "both"],
                   help="mps = adjacent-superpixel cliques; uniform = Bernoulli(0.5) bits")
    p.add_argument("--k", type=int, default=5, help="explanation length (top segments)")
    p.add_argument("--segments", type=int, default=50, dest="segments",
                   help="requested superpixel count")
    p.add_argument("--sigma", type=float, default=0.25, help="locality kernel width")
    p.add_argument("--fill", default="segment_mean",
                   choices=["segment_mean", "constant_gray", "constant_black"],
                   help="how hidden superpixels are rendered")
    p.add_argument("--samples", type=int, default=1000,
                   help="perturbation count for the uniform sampler")
    p.add_argument("--seed", type=int, default=0, help="uniform sampler RNG seed")
    p.add_argument("--oos-resample", action="store_true",
                   help="also score the surrogate on a fresh uniform resample "
                        "(reported as out-of-sample fidelity)")
    p.add_argument("--report", default="report.json", help="output report JSON path")
    p.add_argument("--overlay-dir", default=None, help="directory for overlay PNGs")
    p.add_argument("--debug-dumps", default=None,
                   help="directory for label map / edge list / clique list dumps")
    p.add_argument("--server", default=None,
                   help="base URL of a running explanation service; when set the "
                        "CLI acts as a thin client")
    return p


def _config_from_args(args: argparse.Namespace) -> RunConfig:
    return RunConfig(
        image_path=args.image, classifier=args.classifier, sampler=args.sampler,
        k=args.k, target_segments=args.segments, sigma=args.sigma, fill=args.fill,
        n_samples=args.samples, rng_seed=args.seed, oos_resample=args.oos_resample,
        report_path=args.report, overlay_dir=args.overlay_dir,
        debug_dir=args.debug_dumps,
    )


def _run_via_server(server: str, config: RunConfig) -> None:
    payload = {
        "image_b64": base64.b64encode(Path(config.image_path).read_bytes()).decode("ascii"),
        "image_path": config.image_path,
        "classifier": config.classifier,
        "sampler": config.sampler,
        "k": config.k,
        "target_segments": config.target_segments,
        "sigma": config.sigma,
        "fill": config.fill,
        "n_samples": config.n_samples,
        "rng_seed": config.rng_seed,
        "polarity": config.polarity,
        "oos_resample": config.oos_resample,
        "include_overlays": bool(config.overlay_dir),
        "include_debug": bool(config.debug_dir),
    }
    resp = httpx.post(server.rstrip("/") + "/explain", json=payload, timeout=600.0)
    if resp.status_code != 200:
        raise RuntimeError(f"service answered HTTP {resp.status_code}: {resp.text}")
    body = resp.json()

    if config.overlay_dir:
        odir = Path(config.overlay_dir)
        odir.mkdir(parents=True, exist_ok=True)
        for name, b64 in body["overlays"].items():
            (odir / f"overlay_{name}.png").write_bytes(base64.b64decode(b64))
    if config.debug_dir:
        ddir = Path(config.debug_dir)
        ddir.mkdir(parents=True, exist_ok=True)
        for name, b64 in body["debug"].items():
            (ddir / name).write_bytes(base64.b64decode(b64))
    # the report lands last: its presence on disk implies a complete run
    report_path = Path(config.report_path)
    report_path.parent.mkdir(parents=True, exist_ok=True)
    report_path.write_text(json.dumps(body["report"], indent=2, ensure_ascii=False) + "\n",
                           encoding="utf-8")


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        config = _config_from_args(args)
        if args.server:
            _run_via_server(args.server, config)
        else:
            explain(config)
    except Exception as exc:
        print(json.dumps({"error": type(exc).__name__, "message": str(exc)}),
              file=sys.stderr)
        return 1
    return 0


def serve_main(argv: list[str] | None = None) -> int:
    p = argparse.ArgumentParser(prog="cliquexplain-serve",
                                description="Run the explanation HTTP service.")
    p.add_argument("--host", default="127.0.0.1")
    p.add_argument("--port", type=int, default=8008)
    args = p.parse_args(argv)

    import uvicorn

    from .service import app

    uvicorn.run(app, host=args.host, port=args.port)
    return 0


if __name__ == "__main__":
    sys.exit(main())
