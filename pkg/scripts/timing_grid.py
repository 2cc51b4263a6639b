"""Per-stage wall time of training at several grid sizes on the same images."""

import argparse
import os
import tempfile

import numpy as np
from scipy.ndimage import gaussian_filter

from scenedbm.config import PipelineConfig
from scenedbm.netpbm import Image, write_netpbm
from scenedbm.pipeline import load_dataset, run_training
from scenedbm.rbm import CdConfig


def random_tree(root, n_classes, per_class, seed=0):
    rng = np.random.default_rng(seed)
    for k in range(n_classes):
        os.makedirs(os.path.join(root, f"c{k}"))
        for i in range(per_class):
            raw = gaussian_filter(rng.uniform(0, 255, (240, 240, 3)), (4, 4, 0))
            raw = (raw - raw.min()) / np.ptp(raw) * 255
            write_netpbm(os.path.join(root, f"c{k}", f"{i}.ppm"), Image(np.rint(raw).astype(np.uint8)))
    return root


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--data")
    ap.add_argument("--grids", default="30,40,50")
    ap.add_argument("--per-class", type=int, default=4)
    ap.add_argument("--epochs", type=int, default=5)
    ap.add_argument("--hidden", default="1000x500")
    args = ap.parse_args()

    root = args.data or random_tree(tempfile.mkdtemp(prefix="timing-"), 2, args.per_class)
    h1, h2 = (int(x) for x in args.hidden.split("x"))
    ds = load_dataset(root, args.per_class, 0)
    print(f"{'grid':>5}  {'preprocess':>10}  {'pretrain':>8}  {'extract':>7}  {'softmax':>7}  {'total':>7}")
    for g in (int(x) for x in args.grids.split(",")):
        cfg = PipelineConfig(grid=(g, g), hidden=(h1, h2), layer1=CdConfig(epochs=args.epochs),
                             layer2=CdConfig(epochs=args.epochs, seed=1), softmax_iters=50,
                             train_per_class=args.per_class, test_per_class=0)
        t = run_training(ds, cfg)[2].stage_seconds
        print(f"{g:>5}  {t['preprocess']:10.2f}  {t['pretrain']:8.2f}  {t['extract']:7.3f}  {t['softmax']:7.3f}  {sum(t.values()):7.2f}")


if __name__ == "__main__":
    main()
