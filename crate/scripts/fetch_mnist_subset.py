#!/usr/bin/env python3
"""Regenerate the bundled MNIST subset under data/mnist/.

The npm package `mnist` (cazala/mnist, MIT) ships 10,000 genuine MNIST
images as JSON, one file per digit class, pixels already scaled to [0,1].
This script converts them back to byte-valued IDX files with a stratified
9000/1000 train/test split so the result is self-contained and needs no
network at test time.

Usage:
    npm pack mnist --pack-destination /tmp/mnist-npm
    tar -xzf /tmp/mnist-npm/mnist-*.tgz -C /tmp/mnist-npm
    python3 scripts/fetch_mnist_subset.py /tmp/mnist-npm/package/src/digits data/mnist

The split seed is fixed; running the script twice produces identical files.
"""

import json
import os
import random
import struct
import sys

SPLIT_SEED = 20240601
TRAIN_FRACTION = 0.9


def write_idx_images(path, images):
    with open(path, "wb") as f:
        f.write(struct.pack(">IIII", 0x00000803, len(images), 28, 28))
        for img in images:
            f.write(bytes(img))


def write_idx_labels(path, labels):
    with open(path, "wb") as f:
        f.write(struct.pack(">II", 0x00000801, len(labels)))
        f.write(bytes(labels))


def main():
    if len(sys.argv) != 3:
        sys.exit(f"usage: {sys.argv[0]} <digits-json-dir> <out-dir>")
    src, out = sys.argv[1], sys.argv[2]
    os.makedirs(out, exist_ok=True)

    rng = random.Random(SPLIT_SEED)
    train, test = [], []
    for digit in range(10):
        with open(os.path.join(src, f"{digit}.json")) as f:
            flat = json.load(f)["data"]
        n = len(flat) // 784
        samples = []
        for i in range(n):
            px = flat[i * 784 : (i + 1) * 784]
            samples.append([min(255, max(0, round(v * 255.0))) for v in px])
        rng.shuffle(samples)
        cut = int(len(samples) * TRAIN_FRACTION + 0.5)
        train.extend((img, digit) for img in samples[:cut])
        test.extend((img, digit) for img in samples[cut:])

    rng.shuffle(train)
    rng.shuffle(test)

    write_idx_images(os.path.join(out, "train-images-idx3-ubyte"), [i for i, _ in train])
    write_idx_labels(os.path.join(out, "train-labels-idx1-ubyte"), [l for _, l in train])
    write_idx_images(os.path.join(out, "test-images-idx3-ubyte"), [i for i, _ in test])
    write_idx_labels(os.path.join(out, "test-labels-idx1-ubyte"), [l for _, l in test])
    print(f"wrote {len(train)} train / {len(test)} test samples to {out}")


if __name__ == "__main__":
    main()
