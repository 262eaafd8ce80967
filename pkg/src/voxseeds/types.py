"""Core value types: volumes, label fields, histograms, ground truth, parameters.

Axis convention used across the package: axis 0 = sagittal, axis 1 = coronal,
axis 2 = axial. Arrays are indexed ``arr[s, c, a]``.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import InputDomainError

Triple = tuple[int, int, int]


def assign_bin(intensity: float, num_bins: int) -> int:
    """Map a unit-interval intensity to a histogram bin in ``[0, num_bins)``.

    Uniform binning: ``floor(intensity * num_bins)`` with the top edge clamped
    so 1.0 lands in the last bin.
    """
    if num_bins < 1:
        raise InputDomainError(f"num_bins must be >= 1, got {num_bins}")
    if not 0.0 <= intensity <= 1.0:
        raise InputDomainError(f"intensity {intensity!r} outside [0, 1]")
    return min(int(intensity * num_bins), num_bins - 1)


def bin_volume(data: np.ndarray, num_bins: int) -> np.ndarray:
    """Vectorized :func:`assign_bin` over an intensity array (int32 output)."""
    if num_bins < 1:
        raise InputDomainError(f"num_bins must be >= 1, got {num_bins}")
    lo = float(np.min(data)) if data.size else 0.0
    hi = float(np.max(data)) if data.size else 0.0
    if lo < 0.0 or hi > 1.0:
        raise InputDomainError(f"intensities outside [0, 1]: min={lo}, max={hi}")
    idx = (data * num_bins).astype(np.int32)
    np.minimum(idx, num_bins - 1, out=idx)
    return idx


@dataclass
class Histogram:
    """Fixed-bin intensity count vector for a voxel set.

    ``total`` always equals the number of voxels summarized, i.e. the sum of
    ``bins``. Counts are plain integers; nothing here is normalized.
    """

    bins: np.ndarray
    total: int

    def __post_init__(self) -> None:
        self.bins = np.asarray(self.bins, dtype=np.int64)
        if self.bins.ndim != 1:
            raise InputDomainError("histogram bins must be a 1-D count vector")
        if np.any(self.bins < 0):
            raise InputDomainError("histogram counts must be non-negative")
        if int(self.bins.sum()) != self.total:
            raise InputDomainError(
                f"histogram total {self.total} != sum of counts {int(self.bins.sum())}"
            )

    @property
    def num_bins(self) -> int:
        return int(self.bins.shape[0])

    @classmethod
    def from_counts(cls, bins: np.ndarray) -> "Histogram":
        bins = np.asarray(bins, dtype=np.int64)
        return cls(bins=bins, total=int(bins.sum()))


def histogram_of(voxel_values, num_bins: int) -> Histogram:
    """Histogram of a collection of unit-interval intensities.

    ``bins[j]`` counts the values that :func:`assign_bin` maps to ``j``.
    """
    values = np.asarray(list(voxel_values) if not isinstance(voxel_values, np.ndarray) else voxel_values,
                        dtype=np.float64)
    if values.size == 0:
        return Histogram(bins=np.zeros(max(num_bins, 1), dtype=np.int64), total=0)
    idx = bin_volume(values, num_bins)
    counts = np.bincount(idx.ravel(), minlength=num_bins).astype(np.int64)
    return Histogram(bins=counts, total=int(values.size))


@dataclass
class Volume:
    """Dense 3-D scalar field of normalized intensities.

    A segmentation-ready volume: every value must already lie in [0, 1]
    (see :mod:`voxseeds.preprocess` for getting raw scans into this form).
    ``spacing`` is the optional physical voxel size in mm per axis.
    """

    data: np.ndarray
    spacing: tuple[float, float, float] | None = None

    def __post_init__(self) -> None:
        self.data = np.asarray(self.data, dtype=np.float64)
        if self.data.ndim != 3:
            raise InputDomainError(f"volume data must be 3-D, got shape {self.data.shape}")
        if self.data.size == 0:
            raise InputDomainError("volume must contain at least one voxel")
        lo = float(self.data.min())
        hi = float(self.data.max())
        if lo < 0.0 or hi > 1.0 or not np.isfinite([lo, hi]).all():
            raise InputDomainError(
                f"volume intensities must lie in [0, 1], found range [{lo}, {hi}]"
            )

    @property
    def dims(self) -> Triple:
        return tuple(int(d) for d in self.data.shape)  # type: ignore[return-value]

    @property
    def size(self) -> int:
        return int(self.data.size)


@dataclass
class LabelField:
    """Per-voxel supervoxel label map: a partition of the volume into K regions."""

    labels: np.ndarray
    num_labels: int

    def __post_init__(self) -> None:
        self.labels = np.asarray(self.labels, dtype=np.int32)
        if self.labels.ndim != 3:
            raise InputDomainError(f"label field must be 3-D, got shape {self.labels.shape}")
        if self.num_labels < 1:
            raise InputDomainError("num_labels must be >= 1")

    @property
    def dims(self) -> Triple:
        return tuple(int(d) for d in self.labels.shape)  # type: ignore[return-value]

    def label_counts(self) -> np.ndarray:
        """Voxel count per label, length ``num_labels``."""
        return np.bincount(self.labels.ravel(), minlength=self.num_labels).astype(np.int64)

    def validate_partition(self) -> None:
        """Raise unless every voxel carries a label in range and every label is used."""
        if self.labels.min() < 0 or self.labels.max() >= self.num_labels:
            raise InputDomainError("labels outside [0, num_labels)")
        counts = self.label_counts()
        missing = np.flatnonzero(counts == 0)
        if missing.size:
            raise InputDomainError(f"labels never used: {missing[:8].tolist()} ...")


@dataclass
class GroundTruth:
    """Per-voxel class identifiers; class 0 is background."""

    labels: np.ndarray
    num_classes: int = 0

    def __post_init__(self) -> None:
        self.labels = np.asarray(self.labels)
        if not np.issubdtype(self.labels.dtype, np.integer):
            raise InputDomainError("ground-truth labels must be integers")
        if self.labels.ndim != 3:
            raise InputDomainError(f"ground truth must be 3-D, got shape {self.labels.shape}")
        if self.labels.min() < 0:
            raise InputDomainError("ground-truth classes must be >= 0")
        top = int(self.labels.max()) + 1
        if self.num_classes == 0:
            self.num_classes = top
        elif self.num_classes < top:
            raise InputDomainError(
                f"num_classes {self.num_classes} < largest class {top - 1} + 1"
            )

    @property
    def dims(self) -> Triple:
        return tuple(int(d) for d in self.labels.shape)  # type: ignore[return-value]


@dataclass
class SeedsParams:
    """Segmentation parameters. The defaults are the recommended configuration:

    15 intensity bins, boundary prior weight 2, 2 block-level update passes and
    4 pixel-level update passes.
    """

    num_supervoxels_target: int
    num_bins: int = 15
    prior_weight: int = 2
    block_iterations: int = 2
    pixel_iterations: int = 4
    mode: str = "3d"

    def validate(self) -> None:
        if self.num_supervoxels_target < 1:
            raise InputDomainError("num_supervoxels_target must be >= 1")
        if self.num_bins < 1:
            raise InputDomainError("num_bins must be >= 1")
        if self.prior_weight < 0:
            raise InputDomainError("prior_weight must be >= 0")
        if self.block_iterations < 0 or self.pixel_iterations < 0:
            raise InputDomainError("iteration counts must be >= 0")
        if self.mode not in ("2d", "3d"):
            raise InputDomainError(f"mode must be '2d' or '3d', got {self.mode!r}")
