"""Benchmark datasets: generation, ingestion, PCA reduction and [0, 2pi] scaling."""
from __future__ import annotations

import csv
import gzip
import os
import struct
from dataclasses import dataclass, replace
from pathlib import Path

import numpy as np

from .errors import ConfigurationError, DataFormatError
from .featuremaps import zz_batch
from .simulator import run_batch

RESOURCES = Path(__file__).resolve().parent / "resources"

# (positive, negative) counts per partition
CLASS_COUNTS = {
    "adhoc-zz": ((100, 100), (100, 100)),
    "adhoc-cov": ((30, 30), (30, 30)),
    "iris-linear": ((35, 35), (15, 15)),
    "iris-nonlinear": ((35, 35), (15, 15)),
    "mnist-pca-4": ((124, 126), (128, 122)),
    "mnist-pca-8": ((102, 148), (129, 121)),
}
FEATURE_DIMS = {
    "adhoc-zz": 2,
    "adhoc-cov": 14,
    "iris-linear": 4,
    "iris-nonlinear": 4,
    "mnist-pca-4": 4,
    "mnist-pca-8": 8,
}
DATASETS = tuple(CLASS_COUNTS)


def data_dir() -> Path:
    """Dataset root: ``$QKBENCH_DATA_DIR`` if set, else the bundled resources."""
    return Path(os.environ.get("QKBENCH_DATA_DIR", RESOURCES))


@dataclass(frozen=True, eq=False)
class DatasetSplit:
    X_train: np.ndarray
    X_test: np.ndarray
    y_train: np.ndarray
    y_test: np.ndarray
    name: str = ""

    @property
    def feature_dim(self) -> int:
        return self.X_train.shape[1]

    def class_counts(self) -> tuple[tuple[int, int], tuple[int, int]]:
        """((pos, neg) train, (pos, neg) test)."""
        return tuple(
            (int(np.sum(y == 1)), int(np.sum(y == -1))) for y in (self.y_train, self.y_test)
        )

    def scaled(self) -> "DatasetSplit":
        params = fit_scaler(self.X_train)
        return replace(self, X_train=apply_scaler(params, self.X_train),
                       X_test=apply_scaler(params, self.X_test))


# --------------------------------------------------------------------------- scaling


@dataclass(frozen=True)
class ScalerParams:
    minimum: np.ndarray
    maximum: np.ndarray


def fit_scaler(X_train) -> ScalerParams:
    X = np.atleast_2d(np.asarray(X_train, dtype=float))
    return ScalerParams(X.min(axis=0), X.max(axis=0))


def apply_scaler(params: ScalerParams, X) -> np.ndarray:
    """Affine map of each feature onto [0, 2pi] using the training range.

    Values outside the training range are not clipped; a constant training
    column maps to pi.
    """
    X = np.atleast_2d(np.asarray(X, dtype=float))
    span = params.maximum - params.minimum
    flat = span <= 0
    safe = np.where(flat, 1.0, span)
    out = 2 * np.pi * (X - params.minimum) / safe
    out[:, flat] = np.pi
    return out


# --------------------------------------------------------------------------- ad hoc (ZZ)


def haar_unitary(dim: int, rng: np.random.Generator) -> np.ndarray:
    """Haar-random unitary: QR of a complex Ginibre matrix with phase-fixed R."""
    z = (rng.standard_normal((dim, dim)) + 1j * rng.standard_normal((dim, dim))) / np.sqrt(2)
    q, r = np.linalg.qr(z)
    d = np.diag(r)
    return q * (d / np.abs(d))


def adhoc_parity(X, unitary: np.ndarray) -> np.ndarray:
    """``<Phi(x)| V^dagger (Z x Z) V |Phi(x)>`` for each row, Phi the 2-qubit ZZ map state."""
    states = run_batch(zz_batch(X, 2)) @ unitary.T
    parity = np.array([1.0, -1.0, -1.0, 1.0])
    return np.real(np.einsum("ij,j,ij->i", states.conj(), parity, states))


def gen_adhoc_zz(n_per_class: int = 100, gap: float = 0.3, seed: int = 0,
                 max_draws: int = 10_000_000, chunk: int = 4096) -> DatasetSplit:
    """Ad hoc dataset separable by the 2-qubit ZZ map (raw features in [0, 2pi]).

    A seeded Haar unitary ``V`` fixes the labelling observable; uniformly drawn
    candidates are kept when ``|e(x)| >= gap`` and labelled ``sign(e(x))`` until
    each class has ``n_per_class`` points in both partitions.
    """
    if not 0 < gap < 1:
        raise ConfigurationError(f"gap must lie in (0, 1), got {gap}")
    rng = np.random.default_rng(seed)
    unitary = haar_unitary(4, rng)
    need = 2 * n_per_class
    pos, neg = [], []
    draws = 0
    while len(pos) < need or len(neg) < need:
        if draws >= max_draws:
            raise RuntimeError(
                f"ad hoc generator accepted too few points after {draws} draws (gap={gap})"
            )
        cand = rng.uniform(0, 2 * np.pi, size=(chunk, 2))
        draws += chunk
        e = adhoc_parity(cand, unitary)
        keep = np.abs(e) >= gap
        pos.extend(cand[keep & (e > 0)])
        neg.extend(cand[keep & (e < 0)])
        if draws >= 1000 * chunk and (len(pos) + len(neg)) < 1e-3 * draws:
            raise RuntimeError(f"ad hoc acceptance rate below 1e-3 (gap={gap})")
    pos, neg = np.array(pos[:need]), np.array(neg[:need])
    h = n_per_class
    X_train = np.vstack([pos[:h], neg[:h]])
    X_test = np.vstack([pos[h:], neg[h:]])
    y = np.r_[np.ones(h, int), -np.ones(h, int)]
    return DatasetSplit(X_train, X_test, y, y.copy(), "adhoc-zz")


def adhoc_acceptance_rate(gap: float, n_draws: int = 100_000, seed: int = 0) -> float:
    rng = np.random.default_rng(seed)
    unitary = haar_unitary(4, rng)
    cand = rng.uniform(0, 2 * np.pi, size=(n_draws, 2))
    return float(np.mean(np.abs(adhoc_parity(cand, unitary)) >= gap))


# --------------------------------------------------------------------------- CSV dump format


def write_split_csv(split: DatasetSplit, path) -> None:
    """Canonical dump: header ``f1..fd,label,split``, one row per point."""
    d = split.feature_dim
    with Path(path).open("w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow([f"f{i + 1}" for i in range(d)] + ["label", "split"])
        for tag, X, y in (("train", split.X_train, split.y_train), ("test", split.X_test, split.y_test)):
            for row, label in zip(X, y):
                writer.writerow([f"{v:.17g}" for v in row] + [int(label), tag])


def read_split_csv(path, name: str = "") -> DatasetSplit:
    path = Path(path)
    if not path.is_file():
        raise FileNotFoundError(f"dataset file not found: {path}")
    rows = {"train": ([], []), "test": ([], [])}
    with path.open(newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        if not header or header[-2:] != ["label", "split"]:
            raise DataFormatError(f"{path}:1: expected header f1..fd,label,split, got {header}")
        d = len(header) - 2
        for lineno, row in enumerate(reader, start=2):
            if not row:
                continue
            if len(row) != d + 2:
                raise DataFormatError(f"{path}:{lineno}: expected {d + 2} columns, got {len(row)}")
            try:
                feats = [float(v) for v in row[:d]]
                label = int(float(row[d]))
            except ValueError as exc:
                raise DataFormatError(f"{path}:{lineno}: {exc}") from None
            if label not in (-1, 1):
                raise DataFormatError(f"{path}:{lineno}: label must be -1 or 1, got {row[d]}")
            tag = row[d + 1].strip()
            if tag not in rows:
                raise DataFormatError(f"{path}:{lineno}: split must be train/test, got {tag!r}")
            rows[tag][0].append(feats)
            rows[tag][1].append(label)
    (Xtr, ytr), (Xts, yts) = rows["train"], rows["test"]
    return DatasetSplit(np.array(Xtr, dtype=float).reshape(-1, d), np.array(Xts, dtype=float).reshape(-1, d),
                        np.array(ytr, dtype=int), np.array(yts, dtype=int), name)


def _check_counts(split: DatasetSplit, expected) -> None:
    got = split.class_counts()
    if got != tuple(tuple(c) for c in expected):
        raise DataFormatError(f"{split.name}: class counts {got} differ from expected {expected}")


# --------------------------------------------------------------------------- LCE / ad hoc (covariant)


def load_lce(path=None, scale: bool = True) -> DatasetSplit:
    """14-feature labelling-cosets-with-error data, 30/30 train and 30/30 test."""
    path = Path(path) if path is not None else data_dir() / "lce_graph7.csv"
    split = read_split_csv(path, "adhoc-cov")
    if split.feature_dim != 14:
        raise DataFormatError(f"{path}: expected 14 features, got {split.feature_dim}")
    _check_counts(split, CLASS_COUNTS["adhoc-cov"])
    return split.scaled() if scale else split


# --------------------------------------------------------------------------- IRIS

IRIS_VARIANTS = {
    "linear": ("setosa", "versicolor"),
    "nonlinear": ("versicolor", "virginica"),
}


def load_iris(variant: str = "linear", seed: int = 0, scale: bool = True, path=None) -> DatasetSplit:
    """Two-class IRIS task with a stratified 70/30 split (35/15 per class)."""
    if variant not in IRIS_VARIANTS:
        raise ConfigurationError(f"unknown IRIS variant {variant!r}")
    path = Path(path) if path is not None else data_dir() / "iris.csv"
    if not path.is_file():
        raise FileNotFoundError(f"IRIS table not found: {path}")
    with path.open(newline="") as fh:
        rows = list(csv.DictReader(fh))
    neg_name, pos_name = IRIS_VARIANTS[variant]
    cols = ["sepal_length", "sepal_width", "petal_length", "petal_width"]
    rng = np.random.default_rng(seed)
    parts = {"train": ([], []), "test": ([], [])}
    for label, species in ((1, pos_name), (-1, neg_name)):
        X = np.array([[float(r[c]) for c in cols] for r in rows if r["species"] == species])
        order = rng.permutation(len(X))
        n_train = int(round(0.7 * len(X)))
        for tag, idx in (("train", order[:n_train]), ("test", order[n_train:])):
            parts[tag][0].append(X[idx])
            parts[tag][1].append(np.full(len(idx), label))
    split = DatasetSplit(
        np.vstack(parts["train"][0]), np.vstack(parts["test"][0]),
        np.concatenate(parts["train"][1]), np.concatenate(parts["test"][1]),
        f"iris-{variant}",
    )
    return split.scaled() if scale else split


# --------------------------------------------------------------------------- MNIST + PCA

_IDX_DTYPES = {0x08: np.uint8, 0x09: np.int8, 0x0B: ">i2", 0x0C: ">i4", 0x0D: ">f4", 0x0E: ">f8"}


def read_idx(path) -> np.ndarray:
    """Read an IDX file (optionally gzipped) as used by the MNIST distribution."""
    path = Path(path)
    if not path.is_file():
        raise FileNotFoundError(f"IDX file not found: {path}")
    raw = path.read_bytes()
    if raw[:2] == b"\x1f\x8b":
        raw = gzip.decompress(raw)
    if len(raw) < 4 or raw[:2] != b"\x00\x00" or raw[2] not in _IDX_DTYPES:
        raise DataFormatError(f"{path}: not an IDX file")
    ndim = raw[3]
    shape = struct.unpack(f">{ndim}I", raw[4: 4 + 4 * ndim])
    dtype = np.dtype(_IDX_DTYPES[raw[2]])
    body = raw[4 + 4 * ndim:]
    if len(body) != dtype.itemsize * int(np.prod(shape)):
        raise DataFormatError(f"{path}: payload size does not match shape {shape}")
    return np.frombuffer(body, dtype=dtype).reshape(shape)


@dataclass(frozen=True, eq=False)
class PCA:
    mean: np.ndarray
    components: np.ndarray  # (n_features, k), orthonormal columns

    def transform(self, X) -> np.ndarray:
        return (np.asarray(X, dtype=float) - self.mean) @ self.components

    def inverse_transform(self, Z) -> np.ndarray:
        return np.asarray(Z, dtype=float) @ self.components.T + self.mean


def fit_pca(X, n_components: int) -> PCA:
    """Top eigenvectors of the covariance; each flipped so its largest-|.| entry is positive."""
    X = np.asarray(X, dtype=float)
    mean = X.mean(axis=0)
    cov = np.cov(X - mean, rowvar=False)
    w, v = np.linalg.eigh(cov)
    comps = v[:, np.argsort(w)[::-1][:n_components]]
    pivot = comps[np.argmax(np.abs(comps), axis=0), np.arange(n_components)]
    comps = comps * np.sign(pivot)
    return PCA(mean, comps)


MNIST_IMAGES = "mnist/mnist-5k-images-idx3-ubyte.gz"
MNIST_LABELS = "mnist/mnist-5k-labels-idx1-ubyte.gz"


PCA_POOLS = ("all", "filtered")


def build_mnist_pca(images_path=None, labels_path=None, n_components: int = 4, seed: int = 0,
                    counts=None, scale: bool = True, pca_pool: str = "all") -> DatasetSplit:
    """3-vs-5 MNIST reduced by PCA and subsampled to 250 train / 250 test points.

    Digit 5 is the positive class. ``pca_pool="all"`` fits the components on
    every image in the file (all ten digits); ``"filtered"`` fits them on the
    3/5 images only. Train and test subsamples are disjoint and drawn with
    exactly the per-class ``counts`` (defaults to the benchmark table for
    this width).
    """
    if pca_pool not in PCA_POOLS:
        raise ConfigurationError(f"pca_pool must be one of {PCA_POOLS}, got {pca_pool!r}")
    if n_components not in (4, 8):
        raise ConfigurationError(f"n_components must be 4 or 8, got {n_components}")
    images_path = Path(images_path) if images_path is not None else data_dir() / MNIST_IMAGES
    labels_path = Path(labels_path) if labels_path is not None else data_dir() / MNIST_LABELS
    images = read_idx(images_path)
    labels = read_idx(labels_path)
    if images.ndim != 3 or labels.ndim != 1 or len(images) != len(labels):
        raise DataFormatError(f"inconsistent MNIST files: images {images.shape}, labels {labels.shape}")
    name = f"mnist-pca-{n_components}"
    counts = CLASS_COUNTS[name] if counts is None else counts
    pixels = images.reshape(len(images), -1).astype(float) / 255.0
    keep = np.isin(labels, (3, 5))
    X = pixels[keep]
    y = np.where(labels[keep] == 5, 1, -1)
    Z = fit_pca(pixels if pca_pool == "all" else X, n_components).transform(X)

    rng = np.random.default_rng(seed)
    (tr_pos, tr_neg), (ts_pos, ts_neg) = counts
    idx = {"train": [], "test": []}
    for label, n_tr, n_ts in ((1, tr_pos, ts_pos), (-1, tr_neg, ts_neg)):
        pool = rng.permutation(np.flatnonzero(y == label))
        if len(pool) < n_tr + n_ts:
            raise DataFormatError(f"only {len(pool)} images of class {label}, need {n_tr + n_ts}")
        idx["train"].append(pool[:n_tr])
        idx["test"].append(pool[n_tr:n_tr + n_ts])
    tr, ts = np.concatenate(idx["train"]), np.concatenate(idx["test"])
    split = DatasetSplit(Z[tr], Z[ts], y[tr], y[ts], name)
    return split.scaled() if scale else split


# --------------------------------------------------------------------------- registry


def load_dataset(name: str, seed: int = 0) -> DatasetSplit:
    """Scaled benchmark dataset by id."""
    if name == "adhoc-zz":
        split = gen_adhoc_zz(seed=seed).scaled()
    elif name == "adhoc-cov":
        split = load_lce()
    elif name in ("iris-linear", "iris-nonlinear"):
        split = load_iris(name.split("-")[1], seed=seed)
    elif name in ("mnist-pca-4", "mnist-pca-8"):
        split = build_mnist_pca(n_components=int(name[-1]), seed=seed)
    else:
        raise ConfigurationError(f"unknown dataset {name!r}; choose from {', '.join(DATASETS)}")
    _check_counts(split, CLASS_COUNTS[name])
    return split
