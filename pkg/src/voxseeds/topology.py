"""Split guards: may a boundary element leave its supervoxel without cutting it in two?

The guard decides from the local occupancy window alone (3x3 in 2-D, 3x3x3 in
3-D, centered on the candidate). It permits a transfer exactly when the
window cells still belonging to the supervoxel, minus the candidate itself,
are non-empty and form a single face-connected component inside the window.

That rule is deliberately conservative: if the in-window remainder is
connected, every global path through the candidate reroutes locally, so the
supervoxel stays connected as a whole; some globally safe moves whose reroute
runs outside the window are rejected. It also never lets a supervoxel shrink
to nothing, because an isolated candidate has an empty remainder.

The decision depends only on the occupancy pattern, so it is invariant under
rotations of the (mask, direction) pair by construction. ``direction`` is
accepted for interface symmetry with the proposal loop.
"""

from __future__ import annotations

from collections import deque

import numpy as np

from . import _kernels
from .errors import InputDomainError

Direction = tuple[int, int]

_TABLE_2D: np.ndarray | None = None


def _as_mask(mask: np.ndarray, ndim: int) -> np.ndarray:
    arr = np.asarray(mask, dtype=bool)
    want = (3,) * ndim
    if arr.shape != want:
        raise InputDomainError(f"mask must have shape {want}, got {arr.shape}")
    center = (1,) * ndim
    if not arr[center]:
        raise InputDomainError("mask center must be occupied (the candidate belongs to its supervoxel)")
    return arr


def mask_bits_2d(mask: np.ndarray) -> int:
    bits = 0
    for di in range(3):
        for dj in range(3):
            if mask[di, dj]:
                bits |= 1 << (di * 3 + dj)
    return bits


def mask_bits_3d(mask: np.ndarray) -> int:
    bits = 0
    idx = 0
    for ds in range(3):
        for dc in range(3):
            for da in range(3):
                if mask[ds, dc, da]:
                    bits |= 1 << idx
                idx += 1
    return bits


def mask_from_labels(labels: np.ndarray, voxel, owner: int) -> np.ndarray:
    """Occupancy window of ``labels == owner`` centered on ``voxel``.

    Works for 2-D and 3-D label arrays; cells outside the volume read False.
    """
    labels = np.asarray(labels)
    nd = labels.ndim
    if nd not in (2, 3):
        raise InputDomainError("labels must be 2-D or 3-D")
    out = np.zeros((3,) * nd, dtype=bool)
    for offset in np.ndindex(*(3,) * nd):
        pos = tuple(int(v) + o - 1 for v, o in zip(voxel, offset))
        if all(0 <= p < s for p, s in zip(pos, labels.shape)):
            out[offset] = labels[pos] == owner
    return out


def check_split_2d(mask: np.ndarray, direction: Direction | None = None) -> bool:
    """True when removing the center keeps the in-window remainder 4-connected."""
    arr = _as_mask(mask, 2)
    global _TABLE_2D
    if _TABLE_2D is None:
        table = np.zeros(512, dtype=bool)
        for bits in range(512):
            if bits & (1 << _kernels.CENTER_2D):
                table[bits] = bool(
                    _kernels.remainder_connected(
                        np.int64(bits), _kernels.ADJ_2D, _kernels.CENTER_2D, 9
                    )
                )
        _TABLE_2D = table
    return bool(_TABLE_2D[mask_bits_2d(arr)])


def check_split_3d(mask: np.ndarray, direction: Direction | None = None) -> bool:
    """True when removing the center keeps the in-window remainder 6-connected."""
    arr = _as_mask(mask, 3)
    return bool(
        _kernels.remainder_connected(
            np.int64(mask_bits_3d(arr)), _kernels.ADJ_3D, _kernels.CENTER_3D, 27
        )
    )


def check_split_bits_many(bits: np.ndarray) -> np.ndarray:
    """Vectorized :func:`check_split_3d` over pre-encoded 27-bit masks."""
    bits = np.ascontiguousarray(bits, dtype=np.int64)
    return _kernels.remainder_connected_many(
        bits, _kernels.ADJ_3D, _kernels.CENTER_3D, 27
    ).astype(bool)


def local_connectivity_oracle(mask: np.ndarray) -> bool:
    """Reference answer for the guard contract, by direct flood fill.

    True iff the occupied window cells minus the center are non-empty and
    face-connected within the window. Accepts 2-D and 3-D masks. This walks
    the boolean array with an explicit queue and shares no code with the
    bitmask implementation backing ``check_split_*``.
    """
    arr = np.asarray(mask, dtype=bool)
    if arr.ndim not in (2, 3) or arr.shape != (3,) * arr.ndim:
        raise InputDomainError("mask must be 3x3 or 3x3x3")
    center = (1,) * arr.ndim
    if not arr[center]:
        raise InputDomainError("mask center must be occupied")
    remainder = arr.copy()
    remainder[center] = False
    cells = list(zip(*np.nonzero(remainder)))
    if not cells:
        return False
    seen = {cells[0]}
    queue = deque([cells[0]])
    while queue:
        cur = queue.popleft()
        for axis in range(arr.ndim):
            for step in (-1, 1):
                nxt = list(cur)
                nxt[axis] += step
                nxt = tuple(nxt)
                if all(0 <= v < 3 for v in nxt) and remainder[nxt] and nxt not in seen:
                    seen.add(nxt)
                    queue.append(nxt)
    return len(seen) == len(cells)
