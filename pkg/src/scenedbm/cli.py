"""Command-line interface: ``scenedbm <command> ...``."""

from __future__ import annotations

import argparse
import dataclasses
import logging
import sys

import numpy as np

from scenedbm import persistence
from scenedbm.config import PipelineConfig, load_config
from scenedbm.dbm import reconstruct
from scenedbm.netpbm import Image, read_netpbm, write_netpbm
from scenedbm.pipeline import evaluate, featurize, load_dataset, pretrain, run_training
from scenedbm.slic import SlicConfig, rgb_to_lab, run_slic_lab, superpixels_to_grid, write_label_map


def _grid(text: str) -> tuple[int, int]:
    try:
        w, h = (int(p) for p in text.lower().split("x"))
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected WxH, got {text!r}") from None
    if w < 1 or h < 1:
        raise argparse.ArgumentTypeError("grid dimensions must be positive")
    return w, h


def _with_seed(cfg: PipelineConfig, seed: int | None) -> PipelineConfig:
    if seed is None:
        return cfg
    return cfg.replace(
        seed=seed,
        slic_seed=seed,
        layer1=dataclasses.replace(cfg.layer1, seed=seed),
        layer2=dataclasses.replace(cfg.layer2, seed=seed + 1),
    )


def _dataset(path, cfg: PipelineConfig):
    return load_dataset(path, cfg.train_per_class, cfg.test_per_class, cfg.seed)


def cmd_train(args) -> int:
    cfg = _with_seed(load_config(args.config), args.seed)
    params, classifier, tlog = run_training(_dataset(args.data, cfg), cfg)
    persistence.save_model(args.out, params, classifier, cfg)
    print(f"train_accuracy={tlog.train_accuracy:.4f}")
    for stage, seconds in tlog.stage_seconds.items():
        print(f"{stage}_seconds={seconds:.3f}")
    return 0


def cmd_pretrain(args) -> int:
    cfg = _with_seed(load_config(args.config), args.seed)
    params, plog, _ = pretrain(_dataset(args.data, cfg), cfg)
    persistence.save_model(args.out, params, None, cfg)
    print(f"layer1_reconstruction_error={plog.layer1_errors[-1]:.6f}")
    print(f"layer2_reconstruction_error={plog.layer2_errors[-1]:.6f}")
    return 0


def cmd_eval(args) -> int:
    params, classifier, cfg = persistence.load_model(args.model)
    if classifier is None:
        print(f"{args.model}: model has no classifier (pretrain only)", file=sys.stderr)
        return 2
    report = evaluate(_dataset(args.data, cfg), (params, classifier), cfg)
    text = report.to_text()
    with open(args.report, "w") as f:
        f.write(text)
    sys.stdout.write(text)
    return 0


def cmd_superpixel(args) -> int:
    seed = args.sp_seed if args.sp_seed is not None else args.seed
    cfg = SlicConfig(k=args.k, compactness=args.compactness, max_iters=args.max_iters,
                     jitter=seed is not None, seed=seed or 0)
    lab = rgb_to_lab(read_netpbm(args.input))
    smap = run_slic_lab(lab, cfg)
    if args.out_labels:
        write_label_map(args.out_labels, smap)
    print(f"superpixels={smap.n_superpixels} iterations={smap.iterations_used} residual={smap.final_residual:.6g}")
    if args.out_grid:
        gw, gh = args.out_grid
        grid = superpixels_to_grid(smap, lab, gw, gh).reshape(gh, gw)
        for row in grid:
            print(" ".join(f"{v:.6f}" for v in row))
    return 0


def cmd_reconstruct(args) -> int:
    params, _, cfg = persistence.load_model(args.model)
    v = featurize(read_netpbm(args.input), cfg)
    out = reconstruct(v, params)
    gw, gh = cfg.grid
    pixels = np.rint(np.clip(out, 0, 1) * 255).reshape(gh, gw)
    write_netpbm(args.out, Image(pixels.astype(np.uint8)))
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="scenedbm", description=__doc__)
    parser.add_argument("--seed", dest="global_seed", type=int, default=None,
                        help="override every random seed (split, SLIC, CD layers)")
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("train", help="preprocess, pretrain the DBM and fit the classifier")
    p.add_argument("--data", required=True)
    p.add_argument("--config", required=True)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_train)

    p = sub.add_parser("pretrain", help="preprocess and pretrain the DBM only")
    p.add_argument("--data", required=True)
    p.add_argument("--config", required=True)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_pretrain)

    p = sub.add_parser("eval", help="evaluate a trained model on the test split")
    p.add_argument("--data", required=True)
    p.add_argument("--model", required=True)
    p.add_argument("--report", required=True)
    p.set_defaults(func=cmd_eval)

    p = sub.add_parser("superpixel", help="segment one image")
    p.add_argument("--input", required=True)
    p.add_argument("--k", type=int, required=True)
    p.add_argument("--compactness", type=float, default=10.0)
    p.add_argument("--max-iters", type=int, default=10)
    p.add_argument("--out-labels")
    p.add_argument("--out-grid", type=_grid, help="print the WxH luminance grid")
    p.add_argument("--seed", dest="sp_seed", type=int, default=None,
                   help="jitter the initial centers with this seed")
    p.set_defaults(func=cmd_superpixel)

    p = sub.add_parser("reconstruct", help="reconstruct an image's grid through the DBM")
    p.add_argument("--model", required=True)
    p.add_argument("--input", required=True)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_reconstruct)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    args.seed = args.global_seed
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        return args.func(args)
    except (ValueError, OSError, RuntimeError) as e:
        print(f"error: {e}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
