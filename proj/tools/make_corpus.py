#!/usr/bin/env python3
"""Regenerate the pinned pristine corpus under data/corpus/ from scikit-image sample data.

Every tile is a 256x256 crop saved losslessly as PNG. The split column assigns
tiles to the three disjoint-content mini databases (v1, v2, test), to the
NIQE training pool (niqe) or to the NIQE held-out set (holdout).
"""
import os
import sys

import numpy as np
import skimage
from PIL import Image

SRC = os.path.join(os.path.dirname(skimage.__file__), "data")
OUT = os.path.join(os.path.dirname(os.path.abspath(__file__)), "..", "data", "corpus")

# (source file, tile name, x, y, split). Sources with a JPEG history (grass,
# rocket) are cropped off the 8x8 block grid.
TILES = [
    ("astronaut.png", "astronaut_a", 0, 0, "v1"),
    ("astronaut.png", "astronaut_b", 256, 0, "niqe"),
    ("astronaut.png", "astronaut_c", 0, 256, "niqe"),
    ("astronaut.png", "astronaut_d", 256, 256, "holdout"),
    ("camera.png", "camera_a", 0, 0, "v1"),
    ("camera.png", "camera_b", 256, 0, "niqe"),
    ("camera.png", "camera_c", 0, 256, "niqe"),
    ("camera.png", "camera_d", 256, 256, "holdout"),
    ("coffee.png", "coffee_a", 0, 0, "v1"),
    ("coffee.png", "coffee_b", 300, 144, "holdout"),
    ("gravel.png", "gravel_a", 0, 0, "v1"),
    ("gravel.png", "gravel_b", 256, 256, "niqe"),
    ("motorcycle_left.png", "motorcycle_a", 0, 0, "v2"),
    ("motorcycle_left.png", "motorcycle_b", 256, 0, "niqe"),
    ("motorcycle_left.png", "motorcycle_c", 485, 0, "niqe"),
    ("motorcycle_left.png", "motorcycle_d", 240, 244, "holdout"),
    ("chelsea.png", "chelsea_a", 97, 22, "v2"),
    ("brick.png", "brick_a", 0, 0, "v2"),
    ("brick.png", "brick_b", 256, 256, "niqe"),
    ("ihc.png", "ihc_a", 0, 0, "v2"),
    ("ihc.png", "ihc_b", 256, 256, "niqe"),
    ("rocket.jpg", "rocket_a", 3, 5, "test"),
    ("rocket.jpg", "rocket_b", 384, 171, "holdout"),
    ("coins.png", "coins_a", 64, 23, "test"),
    ("grass.png", "grass_a", 3, 5, "test"),
    ("grass.png", "grass_b", 253, 253, "niqe"),
    ("moon.png", "moon_a", 0, 0, "test"),
    ("moon.png", "moon_b", 256, 256, "niqe"),
]

SIZE = 256


def main() -> int:
    os.makedirs(OUT, exist_ok=True)
    rows = ["tile\tsource\tx\ty\tsplit"]
    for src, name, x, y, split in TILES:
        im = Image.open(os.path.join(SRC, src))
        im = im.convert("RGB") if im.mode not in ("L",) else im
        arr = np.asarray(im)
        crop = arr[y:y + SIZE, x:x + SIZE]
        if crop.shape[0] != SIZE or crop.shape[1] != SIZE:
            print(f"bad crop for {name}: {crop.shape}", file=sys.stderr)
            return 1
        Image.fromarray(crop).save(os.path.join(OUT, name + ".png"), optimize=False)
        rows.append(f"{name}\t{src}\t{x}\t{y}\t{split}")
    with open(os.path.join(OUT, "corpus.tsv"), "w") as f:
        f.write("\n".join(rows) + "\n")
    return 0


if __name__ == "__main__":
    sys.exit(main())
