#!/usr/bin/env python3
"""Regenerate the 512x512 grayscale PGM fixtures from scikit-image sample data.

camera.png is CC0 (Lav Varshney); astronaut.png is a public-domain NASA photo.
"""
import pathlib

import numpy as np
from skimage import color, data

HERE = pathlib.Path(__file__).resolve().parent


def write_pgm(path, img):
    img = np.ascontiguousarray(img, dtype=np.uint8)
    h, w = img.shape
    with open(path, "wb") as f:
        f.write(b"P5\n%d %d\n255\n" % (w, h))
        f.write(img.tobytes())


write_pgm(HERE / "camera.pgm", data.camera())
write_pgm(HERE / "astronaut.pgm", np.round(color.rgb2gray(data.astronaut()) * 255.0))
