"""Labeled datasets and their CSV form (feature columns, then an integer label; header required)."""

from __future__ import annotations

import csv
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .errors import InvalidArgumentError, ShapeError


@dataclass
class LabeledDataset:
    features: np.ndarray  # (s, d)
    labels: np.ndarray  # (s,) ints
    num_classes: int

    def __post_init__(self):
        self.features = np.atleast_2d(np.asarray(self.features, dtype=float))
        self.labels = np.asarray(self.labels, dtype=int).ravel()
        if self.features.shape[0] != self.labels.shape[0]:
            raise ShapeError(f"{self.features.shape[0]} samples but {self.labels.shape[0]} labels")
        if self.labels.size and (self.labels.min() < 0 or self.labels.max() >= self.num_classes):
            raise InvalidArgumentError(f"labels must lie in [0, {self.num_classes})")

    def __len__(self):
        return len(self.labels)

    @property
    def dimension(self) -> int:
        return self.features.shape[1]

    def one_hot(self, n: int) -> np.ndarray:
        """Labels as one-hot vectors over ``n`` qubits: class c lights qubit c."""
        if self.num_classes > n:
            raise InvalidArgumentError(f"{self.num_classes} classes need at least that many qubits, got {n}")
        out = np.zeros((len(self), n))
        out[np.arange(len(self)), self.labels] = 1.0
        return out


def read_csv(path, num_classes: int | None = None) -> LabeledDataset:
    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        if header is None or len(header) < 2:
            raise ShapeError(f"{path}: expected a header with feature columns and a label column")
        rows = [row for row in reader if row]
    if not rows:
        return LabeledDataset(np.empty((0, len(header) - 1)), np.empty(0, dtype=int), num_classes or 1)
    features = np.array([[float(v) for v in row[:-1]] for row in rows])
    labels = np.array([int(row[-1]) for row in rows])
    if num_classes is None:
        num_classes = int(labels.max()) + 1
    return LabeledDataset(features, labels, num_classes)


def write_csv(dataset: LabeledDataset, path) -> None:
    path = Path(path)
    with path.open("w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow([f"x{j}" for j in range(dataset.dimension)] + ["label"])
        for x, y in zip(dataset.features, dataset.labels):
            writer.writerow([repr(float(v)) for v in x] + [int(y)])


def make_blobs(
    samples_per_class: int = 20,
    centers=((2.0, 0.4), (0.4, 2.0)),
    spread: float = 0.25,
    seed=None,
) -> LabeledDataset:
    """Gaussian blobs around ``centers``, one class per center."""
    rng = np.random.default_rng(seed)
    centers = np.asarray(centers, dtype=float)
    xs, ys = [], []
    for label, center in enumerate(centers):
        xs.append(center + spread * rng.standard_normal((samples_per_class, centers.shape[1])))
        ys.append(np.full(samples_per_class, label))
    return LabeledDataset(np.vstack(xs), np.concatenate(ys), len(centers))
