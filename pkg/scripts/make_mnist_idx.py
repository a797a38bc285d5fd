"""Write the 5000-image MNIST subset shipped with mlxtend as gzipped IDX files.

The benchmark reads MNIST in its standard IDX layout. Without network access the
full archive is unavailable, so the vendored resource is this subset (500 images
per digit, drawn from the original MNIST). Usage::

    python scripts/make_mnist_idx.py path/to/mlxtend-*.whl src/qkbench/resources/mnist
"""
import argparse
import gzip
import io
import struct
import zipfile
from pathlib import Path

import numpy as np

MEMBER = "mlxtend/data/data/mnist_5k.csv.gz"


def write_idx(path: Path, array: np.ndarray) -> None:
    array = np.ascontiguousarray(array, dtype=np.uint8)
    header = struct.pack(">BBBB", 0, 0, 0x08, array.ndim) + struct.pack(f">{array.ndim}I", *array.shape)
    with gzip.GzipFile(path, "wb", mtime=0) as fh:
        fh.write(header + array.tobytes())


def main():
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("wheel", type=Path, help="mlxtend wheel (or the extracted mnist_5k.csv.gz)")
    parser.add_argument("out_dir", type=Path)
    args = parser.parse_args()
    if args.wheel.suffix == ".whl":
        raw = zipfile.ZipFile(args.wheel).read(MEMBER)
    else:
        raw = args.wheel.read_bytes()
    table = np.loadtxt(io.StringIO(gzip.decompress(raw).decode()), delimiter=",")
    images = table[:, :-1].reshape(-1, 28, 28)
    labels = table[:, -1]
    args.out_dir.mkdir(parents=True, exist_ok=True)
    write_idx(args.out_dir / "mnist-5k-images-idx3-ubyte.gz", images)
    write_idx(args.out_dir / "mnist-5k-labels-idx1-ubyte.gz", labels)
    print(f"wrote {len(labels)} images to {args.out_dir}")


if __name__ == "__main__":
    main()
