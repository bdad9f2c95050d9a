"""MNIST IDX ingestion, splits and sample streaming."""
import gzip
import os
import struct
from dataclasses import dataclass
from pathlib import Path

import numpy as np

# IDX type code -> numpy big-endian dtype
IDX_TYPES = {
    0x08: np.dtype(">u1"),
    0x09: np.dtype(">i1"),
    0x0B: np.dtype(">i2"),
    0x0C: np.dtype(">i4"),
    0x0D: np.dtype(">f4"),
    0x0E: np.dtype(">f8"),
}
IDX_CODES = {v.str.lstrip("<>|="): k for k, v in IDX_TYPES.items()}

TRAIN_IMAGES = "train-images-idx3-ubyte"
TRAIN_LABELS = "train-labels-idx1-ubyte"
TEST_IMAGES = "t10k-images-idx3-ubyte"
TEST_LABELS = "t10k-labels-idx1-ubyte"
N_CLASSES = 10


class IDXError(ValueError):
    pass


class BadMagic(IDXError):
    pass


class Truncated(IDXError):
    pass


class TypeCodeMismatch(IDXError):
    pass


def parse_idx(data, expected_type=None):
    """Decode an IDX byte string into a numpy array.

    ``expected_type`` is an optional IDX type code (0x08 for ubyte); a file
    carrying a different code raises :class:`TypeCodeMismatch`.
    """
    data = bytes(data)
    if len(data) < 4:
        raise Truncated("header shorter than 4 bytes")
    if data[0] != 0 or data[1] != 0:
        raise BadMagic(f"magic must start with two zero bytes, got {data[:2]!r}")
    code, ndim = data[2], data[3]
    if code not in IDX_TYPES:
        raise BadMagic(f"unknown IDX type code 0x{code:02x}")
    if expected_type is not None and code != expected_type:
        raise TypeCodeMismatch(f"expected type 0x{expected_type:02x}, got 0x{code:02x}")
    header_end = 4 + 4 * ndim
    if len(data) < header_end:
        raise Truncated("dimension header cut short")
    dims = struct.unpack(f">{ndim}I", data[4:header_end])
    dtype = IDX_TYPES[code]
    count = int(np.prod(dims, dtype=np.int64))
    need = count * dtype.itemsize
    payload = data[header_end:]
    if len(payload) < need:
        raise Truncated(f"payload has {len(payload)} bytes, dims {dims} need {need}")
    if len(payload) > need:
        raise IDXError(f"{len(payload) - need} trailing bytes after payload")
    arr = np.frombuffer(payload, dtype=dtype, count=count).reshape(dims)
    return arr.astype(dtype.newbyteorder("="))


def serialize_idx(arr):
    arr = np.asarray(arr)
    key = arr.dtype.newbyteorder(">").str.lstrip("<>|=")
    if key not in IDX_CODES:
        raise IDXError(f"dtype {arr.dtype} has no IDX type code")
    code = IDX_CODES[key]
    header = bytes([0, 0, code, arr.ndim]) + struct.pack(f">{arr.ndim}I", *arr.shape)
    return header + arr.astype(IDX_TYPES[code]).tobytes()


def read_idx(path, expected_type=None):
    path = Path(path)
    if not path.exists() and Path(str(path) + ".gz").exists():
        path = Path(str(path) + ".gz")
    raw = path.read_bytes()
    if raw[:2] == b"\x1f\x8b":
        raw = gzip.decompress(raw)
    return parse_idx(raw, expected_type)


def write_idx(path, arr):
    data = serialize_idx(arr)
    if str(path).endswith(".gz"):
        # mtime=0 keeps the bytes reproducible
        data = gzip.compress(data, mtime=0)
    Path(path).write_bytes(data)


@dataclass(frozen=True)
class Dataset:
    images: np.ndarray  # (N, 784) float64 in [0, 1]
    labels: np.ndarray  # (N,) int64
    split: str = "train"

    def __post_init__(self):
        if self.images.ndim != 2 or self.images.shape[0] != self.labels.shape[0]:
            raise ValueError("images must be (N, D) with one label per row")
        if self.images.size and (self.images.min() < 0.0 or self.images.max() > 1.0):
            raise ValueError("pixel intensities must lie in [0, 1]")
        if self.labels.size and (self.labels.min() < 0 or self.labels.max() >= N_CLASSES):
            raise ValueError("labels must lie in [0, 10)")

    def __len__(self):
        return self.labels.shape[0]

    def subset(self, n):
        n = min(int(n), len(self))
        return Dataset(self.images[:n], self.labels[:n], self.split)

    @classmethod
    def from_raw(cls, images_u8, labels_u8, split="train"):
        images = np.asarray(images_u8).reshape(len(images_u8), -1).astype(np.float64) / 255.0
        return cls(images, np.asarray(labels_u8).astype(np.int64), split)


@dataclass(frozen=True)
class MNIST:
    train: Dataset
    valid: Dataset
    test: Dataset


def data_dir(path=None):
    if path is not None:
        return Path(path)
    env = os.environ.get("ERBP_DATA_DIR")
    if env:
        return Path(env)
    return Path.home() / ".cache" / "erbp" / "mnist"


def load_mnist(path=None, n_valid=None):
    """Load the four standard MNIST files and split train into train/valid.

    The validation split is the tail of the training file: 10000 samples for
    the full 60000-sample file, otherwise one sixth of it.
    """
    root = data_dir(path)
    tr_x = read_idx(root / TRAIN_IMAGES, 0x08)
    tr_y = read_idx(root / TRAIN_LABELS, 0x08)
    te_x = read_idx(root / TEST_IMAGES, 0x08)
    te_y = read_idx(root / TEST_LABELS, 0x08)
    n = len(tr_y)
    if n_valid is None:
        n_valid = 10000 if n >= 60000 else n // 6
    cut = n - n_valid
    return MNIST(
        train=Dataset.from_raw(tr_x[:cut], tr_y[:cut], "train"),
        valid=Dataset.from_raw(tr_x[cut:], tr_y[cut:], "valid"),
        test=Dataset.from_raw(te_x, te_y, "test"),
    )


def mnist_available(path=None):
    root = data_dir(path)
    return all(
        (root / f).exists() or (root / (f + ".gz")).exists()
        for f in (TRAIN_IMAGES, TRAIN_LABELS, TEST_IMAGES, TEST_LABELS)
    )


def stream(dataset, order="sequential", seed=0):
    """Yield ``(image, label)`` pairs in a deterministic order."""
    n = len(dataset)
    if order == "sequential":
        idx = np.arange(n)
    elif order == "shuffled":
        idx = np.random.default_rng(seed).permutation(n)
    else:
        raise ValueError(f"unknown order {order!r}")
    for i in idx:
        yield dataset.images[i], int(dataset.labels[i])
