"""Write the two-class synthetic scene set (left/right poles) as PPM files."""

import argparse

from scenedbm.synthetic import write_dataset


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("out")
    ap.add_argument("--per-class", type=int, default=30)
    ap.add_argument("--size", type=int, default=32)
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args()
    write_dataset(args.out, args.per_class, args.size, args.seed)
    print(f"wrote {2 * args.per_class} images under {args.out}")


if __name__ == "__main__":
    main()
