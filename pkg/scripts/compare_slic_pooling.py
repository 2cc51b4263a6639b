"""Paired SLIC vs block-pooling recognition rates over several seeds.

Without --data a synthetic two-class set is generated in a temp directory
and the desk-scale configuration (8x8 grid, DBM 64-32-16) is used.
"""

import argparse
import dataclasses
import tempfile

import numpy as np

from scenedbm.config import PipelineConfig, load_config
from scenedbm.pipeline import compare_preprocessing, load_dataset
from scenedbm.rbm import CdConfig
from scenedbm.synthetic import write_dataset

DESK = PipelineConfig(
    working_size=32, grid=(8, 8), hidden=(32, 16),
    layer1=CdConfig(epochs=300, batch_size=5), layer2=CdConfig(epochs=300, batch_size=5, seed=1),
    softmax_iters=2000, train_per_class=20, test_per_class=10,
)


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--data")
    ap.add_argument("--config")
    ap.add_argument("--seeds", type=int, default=10)
    args = ap.parse_args()

    base = load_config(args.config) if args.config else DESK
    root = args.data or write_dataset(tempfile.mkdtemp(prefix="scenes-"), 30, size=32, seed=0)
    rows = []
    print(f"{'seed':>4}  {'slic':>6}  {'pool':>6}")
    for seed in range(args.seeds):
        cfg = base.replace(seed=seed, slic_seed=seed,
                           layer1=dataclasses.replace(base.layer1, seed=seed),
                           layer2=dataclasses.replace(base.layer2, seed=seed + 1))
        ds = load_dataset(root, cfg.train_per_class, cfg.test_per_class, seed)
        r = compare_preprocessing(ds, cfg)
        rows.append((r["slic"].recognition_rate, r["pool"].recognition_rate))
        print(f"{seed:>4}  {rows[-1][0]:6.3f}  {rows[-1][1]:6.3f}", flush=True)
    rows = np.array(rows)
    wins = int(np.sum(rows[:, 0] >= rows[:, 1]))
    print(f"mean  {rows[:, 0].mean():6.3f}  {rows[:, 1].mean():6.3f}   slic >= pool in {wins}/{len(rows)} seeds")


if __name__ == "__main__":
    main()
