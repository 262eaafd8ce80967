"""Compiled inner loops for the segmentation engine and the split guards.

Private module. Everything here operates on raw arrays:

- ``labels``: int32 (S, C, A) supervoxel id per voxel
- ``bins``: int32 (S, C, A) intensity bin per voxel
- ``sv_hist``: int64 (K, B) per-supervoxel bin counts, delta-updated on moves
- ``sv_count``: int64 (K,) per-supervoxel voxel counts

Local windows are encoded as bitmasks: cell (ds, dc, da), each offset in
{-1, 0, 1}, maps to bit ``(ds+1)*9 + (dc+1)*3 + (da+1)``; the center is bit 13.
The 2-D variant uses bits ``(di+1)*3 + (dj+1)`` with center bit 4.

Scan order everywhere is axial-major lexicographic (axis 2 outermost, axis 0
innermost) and the six face directions are proposed in the fixed order
-sag, +sag, -cor, +cor, -ax, +ax. Accepted moves apply immediately.
"""

from __future__ import annotations

import numpy as np
from numba import njit

CENTER_3D = 13
CENTER_2D = 4


def _build_adjacency_3d() -> np.ndarray:
    adj = np.zeros(27, dtype=np.int64)
    for i in range(27):
        ds, rest = divmod(i, 9)
        dc, da = divmod(rest, 3)
        ds -= 1
        dc -= 1
        da -= 1
        for es, ec, ea in ((1, 0, 0), (-1, 0, 0), (0, 1, 0),
                           (0, -1, 0), (0, 0, 1), (0, 0, -1)):
            ns, nc, na = ds + es, dc + ec, da + ea
            if -1 <= ns <= 1 and -1 <= nc <= 1 and -1 <= na <= 1:
                adj[i] |= np.int64(1) << ((ns + 1) * 9 + (nc + 1) * 3 + (na + 1))
    return adj


def _build_adjacency_2d() -> np.ndarray:
    adj = np.zeros(9, dtype=np.int64)
    for i in range(9):
        di, dj = divmod(i, 3)
        di -= 1
        dj -= 1
        for ei, ej in ((1, 0), (-1, 0), (0, 1), (0, -1)):
            ni, nj = di + ei, dj + ej
            if -1 <= ni <= 1 and -1 <= nj <= 1:
                adj[i] |= np.int64(1) << ((ni + 1) * 3 + (nj + 1))
    return adj


ADJ_3D = _build_adjacency_3d()
ADJ_2D = _build_adjacency_2d()


@njit(cache=True)
def remainder_connected(bits, adj, center, ncells):
    """True iff the masked cells minus the center are non-empty and form one
    face-connected component inside the window."""
    rem = bits & ~(np.int64(1) << center)
    if rem == 0:
        return False
    reached = rem & (-rem)
    while True:
        frontier = np.int64(0)
        for i in range(ncells):
            if reached & (np.int64(1) << i):
                frontier |= adj[i]
        grown = reached | (frontier & rem)
        if grown == reached:
            return grown == rem
        reached = grown


@njit(cache=True)
def remainder_connected_many(bits_array, adj, center, ncells):
    out = np.empty(bits_array.shape[0], dtype=np.uint8)
    for i in range(bits_array.shape[0]):
        out[i] = 1 if remainder_connected(bits_array[i], adj, center, ncells) else 0
    return out


@njit(cache=True)
def window_bits(field, s, c, a, value):
    """27-bit occupancy of ``field == value`` in the 3x3x3 window at (s, c, a);
    out-of-bounds cells stay 0."""
    S, C, A = field.shape
    bits = np.int64(0)
    idx = 0
    for ds in range(-1, 2):
        for dc in range(-1, 2):
            for da in range(-1, 2):
                ss = s + ds
                cc = c + dc
                aa = a + da
                if 0 <= ss < S and 0 <= cc < C and 0 <= aa < A:
                    if field[ss, cc, aa] == value:
                        bits |= np.int64(1) << idx
                idx += 1
    return bits


@njit(cache=True)
def boundary_count(labels, s, c, a, axis, step, owner):
    """Count voxels labeled ``owner`` in the 3x3x4 box around (s, c, a).

    The box spans offsets -1..2 along ``axis`` in the orientation of ``step``
    and -1..1 across the two other axes; the center voxel itself never counts
    and out-of-bounds cells contribute 0.
    """
    S, C, A = labels.shape
    n = 0
    for t in range(-1, 3):
        for u in range(-1, 2):
            for v in range(-1, 2):
                if t == 0 and u == 0 and v == 0:
                    continue
                if axis == 0:
                    ss = s + step * t
                    cc = c + u
                    aa = a + v
                elif axis == 1:
                    ss = s + u
                    cc = c + step * t
                    aa = a + v
                else:
                    ss = s + u
                    cc = c + v
                    aa = a + step * t
                if 0 <= ss < S and 0 <= cc < C and 0 <= aa < A:
                    if labels[ss, cc, aa] == owner:
                        n += 1
    return n


@njit(cache=True)
def _component_intact(labels, sv_count, k):
    """0 if the voxels labeled k form one non-empty 6-connected component."""
    S, C, A = labels.shape
    total = sv_count[k]
    if total <= 0:
        return 1
    seed_s = -1
    seed_c = -1
    seed_a = -1
    for aa in range(A):
        if seed_s >= 0:
            break
        for cc in range(C):
            if seed_s >= 0:
                break
            for ss in range(S):
                if labels[ss, cc, aa] == k:
                    seed_s = ss
                    seed_c = cc
                    seed_a = aa
                    break
    if seed_s < 0:
        return 1
    visited = np.zeros((S, C, A), dtype=np.uint8)
    stack = np.empty((total, 3), dtype=np.int64)
    stack[0, 0] = seed_s
    stack[0, 1] = seed_c
    stack[0, 2] = seed_a
    visited[seed_s, seed_c, seed_a] = 1
    top = 1
    reached = 0
    while top > 0:
        top -= 1
        ss = stack[top, 0]
        cc = stack[top, 1]
        aa = stack[top, 2]
        reached += 1
        for d in range(6):
            axis = d >> 1
            step = 1 if (d & 1) == 1 else -1
            ns = ss
            nc = cc
            na = aa
            if axis == 0:
                ns += step
            elif axis == 1:
                nc += step
            else:
                na += step
            if 0 <= ns < S and 0 <= nc < C and 0 <= na < A:
                if visited[ns, nc, na] == 0 and labels[ns, nc, na] == k:
                    visited[ns, nc, na] = 1
                    stack[top, 0] = ns
                    stack[top, 1] = nc
                    stack[top, 2] = na
                    top += 1
    return 0 if reached == total else 1


@njit(cache=True)
def _audit_pixel_decision(labels, bins, sv_hist, sv_count, s, c, a, axis, step, k, n, lam):
    """Recompute histograms and the acceptance inequality from scratch on the
    pre-move state; returns the number of disagreements with the delta state."""
    S, C, A = labels.shape
    B = sv_hist.shape[1]
    hist_k = np.zeros(B, dtype=np.int64)
    hist_n = np.zeros(B, dtype=np.int64)
    count_k = 0
    count_n = 0
    for aa in range(A):
        for cc in range(C):
            for ss in range(S):
                lab = labels[ss, cc, aa]
                if lab == k:
                    hist_k[bins[ss, cc, aa]] += 1
                    count_k += 1
                elif lab == n:
                    hist_n[bins[ss, cc, aa]] += 1
                    count_n += 1
    bad = 0
    if count_k != sv_count[k] or count_n != sv_count[n]:
        bad += 1
    for j in range(B):
        if hist_k[j] != sv_hist[k, j] or hist_n[j] != sv_hist[n, j]:
            bad += 1
    b = bins[s, c, a]
    h_d = 1 if hist_k[b] - 1 >= 1 else 0
    h_r = 1 if hist_n[b] >= 1 else 0
    g_d = boundary_count(labels, s, c, a, axis, -step, k) * hist_k[b]
    g_r = boundary_count(labels, s, c, a, axis, step, n) * hist_n[b]
    left = np.int64(h_d)
    right = np.int64(h_r)
    for _ in range(lam):
        left *= g_d
        right *= g_r
    if not left < right:
        bad += 1
    return bad


@njit(cache=True)
def pixel_pass(labels, bins, sv_hist, sv_count, lam, adj, audit):
    """One pixel-level update sweep. Mutates labels/sv_hist/sv_count in place.

    Returns (proposed, accepted, audit_violations).
    """
    S, C, A = labels.shape
    proposed = 0
    accepted = 0
    violations = 0
    for a in range(A):
        for c in range(C):
            for s in range(S):
                k = labels[s, c, a]
                for d in range(6):
                    axis = d >> 1
                    step = 1 if (d & 1) == 1 else -1
                    ss = s
                    cc = c
                    aa = a
                    if axis == 0:
                        ss += step
                    elif axis == 1:
                        cc += step
                    else:
                        aa += step
                    if ss < 0 or ss >= S or cc < 0 or cc >= C or aa < 0 or aa >= A:
                        continue
                    n = labels[ss, cc, aa]
                    if n == k:
                        continue
                    proposed += 1
                    b = bins[s, c, a]
                    hk = sv_hist[k, b]
                    hn = sv_hist[n, b]
                    # Color term per side is min(count, 1); the recipient side
                    # at 0 kills the transfer energy, a donor side at 0 (the
                    # candidate is its supervoxel's only voxel in this bin)
                    # kills the retention energy.
                    if hn == 0:
                        continue
                    if hk <= 1:
                        accept = True
                    elif lam == 0:
                        accept = False  # both color terms 1: tie, rejected
                    else:
                        # Boundary support: donor counted in the window mirrored
                        # against the transfer direction, recipient in the
                        # window along it. Exponentiation by lam preserves the
                        # order of the bases, so compare them directly.
                        nd = boundary_count(labels, s, c, a, axis, -step, k)
                        nr = boundary_count(labels, s, c, a, axis, step, n)
                        accept = nd * hk < nr * hn
                    if not accept:
                        continue
                    bits = window_bits(labels, s, c, a, k)
                    if not remainder_connected(bits, adj, CENTER_3D, 27):
                        continue
                    if audit:
                        violations += _audit_pixel_decision(
                            labels, bins, sv_hist, sv_count, s, c, a, axis, step, k, n, lam
                        )
                    labels[s, c, a] = n
                    sv_hist[k, b] -= 1
                    sv_hist[n, b] += 1
                    sv_count[k] -= 1
                    sv_count[n] += 1
                    accepted += 1
                    if audit:
                        violations += _component_intact(labels, sv_count, k)
                        violations += _component_intact(labels, sv_count, n)
                    break
    return proposed, accepted, violations


@njit(cache=True)
def _audit_block_decision(labels, bins, sv_hist, sv_count, c0, c1, c2,
                          b0, b1, b2, k, n, hd, hr):
    """Scratch recheck of a block move decision on the pre-move state."""
    S, C, A = labels.shape
    B = sv_hist.shape[1]
    hist_k = np.zeros(B, dtype=np.int64)
    hist_n = np.zeros(B, dtype=np.int64)
    count_k = 0
    count_n = 0
    for aa in range(A):
        for cc in range(C):
            for ss in range(S):
                lab = labels[ss, cc, aa]
                if lab == k:
                    hist_k[bins[ss, cc, aa]] += 1
                    count_k += 1
                elif lab == n:
                    hist_n[bins[ss, cc, aa]] += 1
                    count_n += 1
    bad = 0
    if count_k != sv_count[k] or count_n != sv_count[n]:
        bad += 1
    for j in range(B):
        if hist_k[j] != sv_hist[k, j] or hist_n[j] != sv_hist[n, j]:
            bad += 1
    part = np.zeros(B, dtype=np.int64)
    for ss in range(c0[b0], c0[b0 + 1]):
        for cc in range(c1[b1], c1[b1 + 1]):
            for aa in range(c2[b2], c2[b2 + 1]):
                part[bins[ss, cc, aa]] += 1
    hd2 = np.int64(0)
    hr2 = np.int64(0)
    for j in range(B):
        p = part[j]
        if p == 0:
            continue
        dm = hist_k[j] - p
        hd2 += dm if dm < p else p
        hr2 += hist_n[j] if hist_n[j] < p else p
    if hd2 != hd or hr2 != hr or not hd2 < hr2:
        bad += 1
    return bad


@njit(cache=True)
def block_pass(labels, bins, owner, block_hist, block_count, c0, c1, c2,
               sv_hist, sv_count, adj, audit):
    """One block-level update sweep at a fixed hierarchy level.

    ``owner`` holds the supervoxel id of every block (uniform over the block
    by construction); ``c0/c1/c2`` are the per-axis voxel boundaries of the
    block grid. Mutates labels, owner, sv_hist, sv_count.
    """
    n0, n1, n2 = owner.shape
    B = sv_hist.shape[1]
    proposed = 0
    accepted = 0
    violations = 0
    for b2 in range(n2):
        for b1 in range(n1):
            for b0 in range(n0):
                k = owner[b0, b1, b2]
                for d in range(6):
                    axis = d >> 1
                    step = 1 if (d & 1) == 1 else -1
                    m0 = b0
                    m1 = b1
                    m2 = b2
                    if axis == 0:
                        m0 += step
                    elif axis == 1:
                        m1 += step
                    else:
                        m2 += step
                    if m0 < 0 or m0 >= n0 or m1 < 0 or m1 >= n1 or m2 < 0 or m2 >= n2:
                        continue
                    n = owner[m0, m1, m2]
                    if n == k:
                        continue
                    proposed += 1
                    # Block moves weigh only the color term: donor with the
                    # block removed versus the recipient as-is.
                    hd = np.int64(0)
                    hr = np.int64(0)
                    for j in range(B):
                        p = block_hist[b0, b1, b2, j]
                        if p == 0:
                            continue
                        dm = sv_hist[k, j] - p
                        hd += dm if dm < p else p
                        hr += sv_hist[n, j] if sv_hist[n, j] < p else p
                    if not hd < hr:
                        continue
                    bits = window_bits(owner, b0, b1, b2, k)
                    if not remainder_connected(bits, adj, CENTER_3D, 27):
                        continue
                    if audit:
                        violations += _audit_block_decision(
                            labels, bins, sv_hist, sv_count, c0, c1, c2,
                            b0, b1, b2, k, n, hd, hr
                        )
                    for ss in range(c0[b0], c0[b0 + 1]):
                        for cc in range(c1[b1], c1[b1 + 1]):
                            for aa in range(c2[b2], c2[b2 + 1]):
                                labels[ss, cc, aa] = n
                    owner[b0, b1, b2] = n
                    cnt = block_count[b0, b1, b2]
                    for j in range(B):
                        p = block_hist[b0, b1, b2, j]
                        sv_hist[k, j] -= p
                        sv_hist[n, j] += p
                    sv_count[k] -= cnt
                    sv_count[n] += cnt
                    accepted += 1
                    if audit:
                        violations += _component_intact(labels, sv_count, k)
                        violations += _component_intact(labels, sv_count, n)
                    break
    return proposed, accepted, violations
