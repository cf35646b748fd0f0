#!/usr/bin/env python3
# Copyright 2026 The QPMeL Authors
#
# Licensed under the Apache License, Version 2.0 (the "License");
# you may not use this file except in compliance with the License.
# You may obtain a copy of the License at
#
#     http://www.apache.org/licenses/LICENSE-2.0
#
# Unless required by applicable law or agreed to in writing, software
# distributed under the License is distributed on an "AS IS" BASIS,
# WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
# See the License for the specific language governing permissions and
# limitations under the License.
"""Build data/mnist5k from the 5000-sample MNIST subset shipped in mlxtend.

The subset holds 500 images per digit (CSV, 784 pixel columns then the label).
For every digit the first 400 rows in file order become the training split and
the remaining 100 the test split. Output is standard IDX (big-endian header,
uint8 payload) so the C++ loader reads it like the official files.

Usage: make_mnist5k.py <mlxtend wheel> <output dir>
(obtain the wheel with `pip download --no-deps mlxtend==0.24.0`)
"""

import gzip
import hashlib
import struct
import sys
import zipfile
from pathlib import Path

WHEEL_SHA256 = "2cd15e94360f0c693c8c042a98698d18b03557ab47a7549524c2b354dd8e17d1"
MEMBER = "mlxtend/data/data/mnist_5k.csv.gz"
TRAIN_PER_CLASS = 400


def write_images(path, images):
    with open(path, "wb") as f:
        f.write(struct.pack(">IIII", 0x803, len(images), 28, 28))
        for img in images:
            f.write(bytes(img))


def write_labels(path, labels):
    with open(path, "wb") as f:
        f.write(struct.pack(">II", 0x801, len(labels)))
        f.write(bytes(labels))


def main():
    if len(sys.argv) != 3:
        print(__doc__, file=sys.stderr)
        return 2
    wheel, out = Path(sys.argv[1]), Path(sys.argv[2])
    digest = hashlib.sha256(wheel.read_bytes()).hexdigest()
    if digest != WHEEL_SHA256:
        print(f"error: wheel sha256 {digest} != {WHEEL_SHA256}", file=sys.stderr)
        return 1
    rows = gzip.decompress(zipfile.ZipFile(wheel).read(MEMBER)).decode().splitlines()

    seen = {}
    split = {"train": ([], []), "test": ([], [])}
    for row in rows:
        values = [int(float(v)) for v in row.split(",")]
        pixels, label = values[:784], values[784]
        assert all(0 <= p <= 255 for p in pixels)
        part = "train" if seen.get(label, 0) < TRAIN_PER_CLASS else "test"
        seen[label] = seen.get(label, 0) + 1
        split[part][0].append(pixels)
        split[part][1].append(label)

    out.mkdir(parents=True, exist_ok=True)
    for part, (images, labels) in split.items():
        write_images(out / f"{part}-images-idx3-ubyte", images)
        write_labels(out / f"{part}-labels-idx1-ubyte", labels)
        print(f"{part}: {len(labels)} samples")
    return 0


if __name__ == "__main__":
    sys.exit(main())
