"""Operator CLI: serve the adaptation service, run benchmarks, debug detect."""

from __future__ import annotations

import argparse
import os
import sys
from importlib import resources

from .adaptation import parse_catalog, parse_rules
from .cascade import DetectParams, detect_faces, load_cascade
from .emotion import (
    CarryForwardState,
    frame_emotion,
    load_model,
    seeded_model,
)
from .imaging import RgbFrame, to_grayscale
from .pipeline import CostModel, benchmark, report_csv


def _data_text(name: str) -> str:
    return resources.files("emoadapt.data").joinpath(name).read_text()


def _load_cascade(path: str | None):
    if path:
        with open(path) as fh:
            return load_cascade(fh.read())
    return load_cascade(_data_text("fixture_cascade.txt"))


def _load_model(path: str | None):
    if path:
        return load_model(path)
    bundled = resources.files("emoadapt.data").joinpath("default_model.f2fm")
    with resources.as_file(bundled) as p:
        return load_model(p)


def cmd_serve(args) -> int:
    import uvicorn

    from .service import EngineConfig, create_app

    store_dir = os.environ.get("F2F_STORE_DIR") or args.store_dir
    rules = parse_rules(open(args.rules).read()) if args.rules else None
    catalog = parse_catalog(open(args.catalog).read()) if args.catalog else None
    config = EngineConfig(
        cascade=_load_cascade(args.cascade),
        model=_load_model(args.model),
        rules=rules,
        catalog=catalog,
        store_dir=store_dir,
        workers=args.workers,
    )
    uvicorn.run(create_app(config), host=args.host, port=args.port)
    return 0


def cmd_bench(args) -> int:
    width = args.frame_width
    if args.pixels % width:
        print(f"error: --pixels must be divisible by frame width {width}", file=sys.stderr)
        return 2
    cm = CostModel(
        video_s=args.frames * 0.01,
        frames=args.frames,
        pixels=args.pixels,
        workers=args.workers,
        alpha=args.alpha,
    )
    rows = benchmark([cm], seeded_model(), frame_width=width)
    csv_text = report_csv(rows)
    if args.out:
        with open(args.out, "w") as fh:
            fh.write(csv_text)
    print(csv_text, end="")
    return 0


def cmd_detect(args) -> int:
    import numpy as np
    from PIL import Image

    img = Image.open(args.image).convert("RGB")
    frame = RgbFrame(img.width, img.height, np.asarray(img, dtype=np.uint8))
    gray = to_grayscale(frame)
    cascade = _load_cascade(args.cascade)
    model = _load_model(args.model)
    boxes = detect_faces(gray, cascade, DetectParams())
    for b in boxes:
        r = b.rect
        print(f"box x={r.x} y={r.y} w={r.w} h={r.h} score={b.score:.4f}")
    dist = frame_emotion(gray, boxes, model, CarryForwardState())
    from .emotion import EMOTIONS, argmax_emotion

    print("emotion:", argmax_emotion(dist))
    for label, p in zip(EMOTIONS, dist):
        print(f"  {label}: {p:.4f}")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="emoadapt")
    sub = parser.add_subparsers(dest="command", required=True)

    serve = sub.add_parser("serve", help="run the adaptation HTTP service")
    serve.add_argument("--host", default="127.0.0.1")
    serve.add_argument("--port", type=int, default=8765)
    serve.add_argument("--workers", type=int, default=1)
    serve.add_argument("--cascade", help="cascade file (default: bundled fixture)")
    serve.add_argument("--model", help="classifier model file (default: bundled)")
    serve.add_argument("--catalog", help="book catalog file (default: bundled)")
    serve.add_argument("--rules", help="rule table file (default: bundled)")
    serve.add_argument("--store-dir", default="./emoadapt-store")
    serve.set_defaults(func=cmd_serve)

    bench = sub.add_parser("bench", help="run the pipeline cost-model benchmark")
    bench.add_argument("--frames", type=int, required=True)
    bench.add_argument("--pixels", type=int, required=True)
    bench.add_argument("--alpha", type=float, default=1.0)
    bench.add_argument("--workers", type=int, default=1)
    bench.add_argument("--frame-width", type=int, default=40)
    bench.add_argument("--out", help="write the CSV report here as well")
    bench.set_defaults(func=cmd_bench)

    detect = sub.add_parser("detect", help="one-shot detection + emotion debug")
    detect.add_argument("--image", required=True)
    detect.add_argument("--cascade")
    detect.add_argument("--model")
    detect.set_defaults(func=cmd_detect)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
