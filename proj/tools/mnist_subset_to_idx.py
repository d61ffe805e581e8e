#!/usr/bin/env python3
"""Write a small MNIST subset as IDX files.

Input is a CSV (optionally gzipped) with 784 pixel columns followed by the
label, one image per row, such as the 5000-image mnist_5k.csv.gz bundled in
the mlxtend wheel.  Output goes to <out>/{train,t10k}-{images-idx3,labels-idx1}-ubyte.

    pip download mlxtend --no-deps -d /tmp/mlx
    python3 -c "import zipfile,glob; zipfile.ZipFile(glob.glob('/tmp/mlx/*.whl')[0]).extractall('/tmp/mlx')"
    python3 tools/mnist_subset_to_idx.py /tmp/mlx/mlxtend/data/data/mnist_5k.csv.gz data/mnist
"""

import argparse
import gzip
import pathlib
import struct

import numpy as np


def write_images(path, images):
    with open(path, "wb") as f:
        f.write(struct.pack(">IIII", 0x803, len(images), 28, 28))
        f.write(images.astype(np.uint8).tobytes())


def write_labels(path, labels):
    with open(path, "wb") as f:
        f.write(struct.pack(">II", 0x801, len(labels)))
        f.write(labels.astype(np.uint8).tobytes())


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("csv")
    ap.add_argument("out")
    ap.add_argument("--train", type=int, default=2000)
    ap.add_argument("--test", type=int, default=1000)
    ap.add_argument("--seed", type=int, default=0, help="row shuffle; the mlxtend file is sorted by label")
    args = ap.parse_args()

    opener = gzip.open if args.csv.endswith(".gz") else open
    with opener(args.csv, "rt") as f:
        rows = np.loadtxt(f, delimiter=",", dtype=np.int64)
    if rows.shape[1] != 785:
        raise SystemExit(f"expected 785 columns, got {rows.shape[1]}")
    if args.train + args.test > len(rows):
        raise SystemExit(f"only {len(rows)} rows available")

    rows = rows[np.random.default_rng(args.seed).permutation(len(rows))]
    pixels, labels = rows[:, :784], rows[:, 784]
    out = pathlib.Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    tr = slice(0, args.train)
    te = slice(args.train, args.train + args.test)
    write_images(out / "train-images-idx3-ubyte", pixels[tr])
    write_labels(out / "train-labels-idx1-ubyte", labels[tr])
    write_images(out / "t10k-images-idx3-ubyte", pixels[te])
    write_labels(out / "t10k-labels-idx1-ubyte", labels[te])
    print(f"wrote {args.train} train / {args.test} test images to {out}")
    print("train label counts", np.bincount(labels[tr], minlength=10).tolist())


if __name__ == "__main__":
    main()
