"""Flat array core of the graph simulator, compiled with numba.

State lives in plain numpy arrays so the per-step loop can run in
machine code; the Python wrapper in sim.py owns allocation, growth and
random-number refills.  Random numbers are consumed from pre-filled
buffers in a fixed order (selection, branch, litter, per-vertex type,
endpoint side), so a run is a deterministic function of its seed no
matter how the work is chunked.  Clock draws come from a separate
buffer, which keeps the jump chain of a continuous run identical to the
discrete run with the same seed.
"""

from __future__ import annotations

import math

import numpy as np
from numba import njit

# integer counter slots
IC_N = 0
IC_E = 1
IC_V = 2
IC_O = 3
IC_B = 4
IC_T = 5
IC_D = 6
IC_FREE = 7
IC_NEXT = 8
IC_JN = 9
IC_SUMK = 10
IC_REBUILD = 11
IC_RETAIN = 12
IC_CLAMPS = 13
IC_NTRACK = 14
IC_STATUS = 15
IC_LEN = 16

# float accumulator slots
FC_T = 0
FC_JT = 1
FC_DEADLIFE = 2
FC_LEN = 3

# chunk return codes
ST_N_HORIZON = 0
ST_EXTINCT = 1
ST_NEED_TOPO = 2
ST_NEED_CLOCK = 3
ST_NEED_SLOTS = 4
ST_NEED_VERTICES = 5
ST_NEED_ROWS = 6
ST_T_HORIZON = 7
ST_ERROR = 8

REBUILD_EVERY = 1 << 16

# attachment kinds for trackers
KIND_ANY = 0
KIND_SEMI = 1
KIND_CHERRY = 2


@njit(cache=True, nogil=True, inline="always")
def _tree_set(tree, cap, slot, w):
    i = cap + slot
    d = w - tree[i]
    tree[i] = w
    i >>= 1
    while i >= 1:
        tree[i] += d
        i >>= 1


@njit(cache=True, nogil=True)
def _tree_rebuild(tree, cap):
    for i in range(cap - 1, 0, -1):
        tree[i] = tree[2 * i] + tree[2 * i + 1]


@njit(cache=True, nogil=True, inline="always")
def _tree_find(tree, cap, target):
    i = 1
    while i < cap:
        left = i << 1
        if target < tree[left]:
            i = left
        else:
            target -= tree[left]
            i = left + 1
    return i - cap


@njit(cache=True, nogil=True)
def _find_many(tree, cap, targets, out):
    for k in range(targets.shape[0]):
        out[k] = _tree_find(tree, cap, targets[k])


@njit(cache=True, nogil=True, inline="always")
def _draw_kappa(kind, a, cdf, vals, topo, topo_pos, kappa_safe):
    if kind == 0:
        return np.int64(a)
    if kind == 1:
        # 1 + Poisson, Knuth product method; a = exp(-rate)
        count = 0
        prod = topo[topo_pos[0]]
        topo_pos[0] += 1
        while prod > a and count < kappa_safe:
            count += 1
            prod *= topo[topo_pos[0]]
            topo_pos[0] += 1
        return np.int64(1 + count)
    if kind == 2:
        # geometric number of trials; a = log(1 - q)
        u = topo[topo_pos[0]]
        topo_pos[0] += 1
        if u <= 0.0:
            u = 5e-324
        return np.int64(1 + int(math.log(u) / a))
    # explicit cdf lookup
    u = topo[topo_pos[0]]
    topo_pos[0] += 1
    i = 0
    while i < cdf.shape[0] - 1 and u > cdf[i]:
        i += 1
    return vals[i]


@njit(cache=True, nogil=True)
def run_chunk(
    topo,
    topo_pos,
    clk,
    clk_pos,
    tree,
    ep0,
    ep1,
    xi,
    litters,
    eid,
    birth_step,
    birth_time,
    death_step,
    death_time,
    freelist,
    deg,
    trk_kind,
    trk_vid,
    trk_bind_step,
    trk_iso_step,
    trk_iso_time,
    IC,
    FC,
    kdist_kind,
    kdist_a,
    kdist_cdf,
    kdist_vals,
    kappa_safe,
    b,
    c,
    p,
    n_max,
    t_max,
    use_clock,
    stride,
    rows,
    row_pos,
    evt,
):
    cap = tree.shape[0] >> 1
    vcap = deg.shape[0]
    margin = 4 * kappa_safe + 16
    retain = IC[IC_RETAIN] != 0
    ntrack = IC[IC_NTRACK]
    while True:
        n = IC[IC_N]
        if n >= n_max:
            IC[IC_STATUS] = ST_N_HORIZON
            return ST_N_HORIZON
        if IC[IC_E] == 0:
            IC[IC_STATUS] = ST_EXTINCT
            return ST_EXTINCT
        if topo.shape[0] - topo_pos[0] < margin:
            return ST_NEED_TOPO
        if use_clock and clk.shape[0] - clk_pos[0] < 2:
            return ST_NEED_CLOCK
        free_now = cap - IC[IC_NEXT]
        if not retain:
            free_now += IC[IC_FREE]
        if free_now < 2 * kappa_safe + 4:
            return ST_NEED_SLOTS
        if vcap - IC[IC_V] < kappa_safe + 4:
            return ST_NEED_VERTICES
        if stride > 0 and row_pos[0] + 2 > rows.shape[0]:
            return ST_NEED_ROWS

        if use_clock:
            elapsed = clk[clk_pos[0]] / tree[1]
            clk_pos[0] += 1
            if t_max >= 0.0 and FC[FC_T] + elapsed > t_max:
                FC[FC_JT] += IC[IC_E] * (t_max - FC[FC_T])
                FC[FC_T] = t_max
                IC[IC_STATUS] = ST_T_HORIZON
                return ST_T_HORIZON
            FC[FC_JT] += IC[IC_E] * elapsed
            FC[FC_T] += elapsed

        u = topo[topo_pos[0]]
        topo_pos[0] += 1
        target = u * tree[1]
        slot = _tree_find(tree, cap, target)
        w = tree[cap + slot]
        if w <= 0.0:
            # float drift landed on an empty leaf; unbiased linear rescan
            cum = 0.0
            slot = -1
            for s2 in range(IC[IC_NEXT]):
                wv = tree[cap + s2]
                if wv > 0.0:
                    slot = s2
                    cum += wv
                    if cum > target:
                        break
            if slot < 0:
                IC[IC_STATUS] = ST_ERROR
                return ST_ERROR
            w = tree[cap + slot]

        u2 = topo[topo_pos[0]]
        topo_pos[0] += 1
        n += 1
        IC[IC_N] = n
        va = ep0[slot]
        vb = ep1[slot]
        if u2 * w < w - 1.0:
            # deletion: probability 1 - 1/w
            _tree_set(tree, cap, slot, 0.0)
            IC[IC_E] -= 1
            IC[IC_D] += 1
            if litters[slot] == 0:
                IC[IC_O] -= 1
            deg[va] -= 1
            deg[vb] -= 1
            FC[FC_DEADLIFE] += FC[FC_T] - birth_time[slot]
            for ti in range(ntrack):
                tv = trk_vid[ti]
                if tv >= 0 and trk_iso_step[ti] < 0 and (va == tv or vb == tv) and deg[tv] == 0:
                    trk_iso_step[ti] = n
                    trk_iso_time[ti] = FC[FC_T]
            if retain:
                death_step[slot] = n
                death_time[slot] = FC[FC_T]
            else:
                freelist[IC[IC_FREE]] = slot
                IC[IC_FREE] += 1
            evt[0] = 0
            evt[1] = eid[slot]
            evt[2] = 0
            evt[3] = 0
        else:
            # reproduction
            kappa = _draw_kappa(kdist_kind, kdist_a, kdist_cdf, kdist_vals, topo, topo_pos, kappa_safe)
            if kappa > kappa_safe:
                kappa = kappa_safe
                IC[IC_CLAMPS] += 1
            cherries = 0
            for _i in range(kappa):
                vid = IC[IC_V]
                IC[IC_V] += 1
                u3 = topo[topo_pos[0]]
                topo_pos[0] += 1
                if u3 < p:
                    cherries += 1
                    born_kind = KIND_CHERRY
                    deg[vid] = 2
                    deg[va] += 1
                    deg[vb] += 1
                    for other in range(2):
                        end = va if other == 0 else vb
                        if not retain and IC[IC_FREE] > 0:
                            IC[IC_FREE] -= 1
                            s = freelist[IC[IC_FREE]]
                        else:
                            s = IC[IC_NEXT]
                            IC[IC_NEXT] += 1
                        ep0[s] = vid
                        ep1[s] = end
                        xi[s] = 0
                        litters[s] = 0
                        eid[s] = IC[IC_T]
                        IC[IC_T] += 1
                        birth_step[s] = n
                        birth_time[s] = FC[FC_T]
                        death_step[s] = -1
                        death_time[s] = -1.0
                        _tree_set(tree, cap, s, 1.0 + b)
                else:
                    born_kind = KIND_SEMI
                    u4 = topo[topo_pos[0]]
                    topo_pos[0] += 1
                    end = va if u4 < 0.5 else vb
                    deg[vid] = 1
                    deg[end] += 1
                    if not retain and IC[IC_FREE] > 0:
                        IC[IC_FREE] -= 1
                        s = freelist[IC[IC_FREE]]
                    else:
                        s = IC[IC_NEXT]
                        IC[IC_NEXT] += 1
                    ep0[s] = vid
                    ep1[s] = end
                    xi[s] = 0
                    litters[s] = 0
                    eid[s] = IC[IC_T]
                    IC[IC_T] += 1
                    birth_step[s] = n
                    birth_time[s] = FC[FC_T]
                    death_step[s] = -1
                    death_time[s] = -1.0
                    _tree_set(tree, cap, s, 1.0 + b)
                for ti in range(ntrack):
                    if trk_vid[ti] < 0 and (trk_kind[ti] == KIND_ANY or trk_kind[ti] == born_kind):
                        trk_vid[ti] = vid
                        trk_bind_step[ti] = n
            eps = kappa + cherries
            IC[IC_SUMK] += kappa
            if litters[slot] == 0:
                IC[IC_O] -= 1
            IC[IC_O] += eps
            IC[IC_E] += eps
            IC[IC_B] += 1
            litters[slot] += 1
            xi[slot] += eps
            _tree_set(tree, cap, slot, w + c * eps)
            evt[0] = 1
            evt[1] = eid[slot]
            evt[2] = kappa
            evt[3] = cherries
        IC[IC_JN] += IC[IC_E]
        IC[IC_REBUILD] += 1
        if IC[IC_REBUILD] >= REBUILD_EVERY:
            _tree_rebuild(tree, cap)
            IC[IC_REBUILD] = 0
        if stride > 0 and (n % stride == 0 or IC[IC_E] == 0 or n >= n_max):
            r = row_pos[0]
            rows[r, 0] = n
            rows[r, 1] = FC[FC_T]
            rows[r, 2] = IC[IC_E]
            rows[r, 3] = IC[IC_V]
            rows[r, 4] = IC[IC_O]
            rows[r, 5] = IC[IC_B]
            rows[r, 6] = IC[IC_T]
            rows[r, 7] = IC[IC_D]
            rows[r, 8] = IC[IC_JN]
            rows[r, 9] = FC[FC_JT]
            if ntrack > 0 and trk_vid[0] >= 0:
                rows[r, 10] = deg[trk_vid[0]]
            else:
                rows[r, 10] = np.nan
            row_pos[0] = r + 1
