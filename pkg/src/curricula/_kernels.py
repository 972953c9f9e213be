"""Compiled inner loops: NAND evaluation, loss numerators and the LAHC step.

Gate values live in a ``(l + n_g, W)`` uint64 buffer: rows ``0..l-1`` are the
input columns packed across examples, row ``l + g`` is gate ``g``.

All costs are integer numerators over a per-loss fixed denominator (see
:func:`loss_denominator`), which keeps the acceptance comparisons exact.
"""

import numpy as np
from numba import njit

L1, LW, LLH, LGH = 0, 1, 2, 3
LOSS_CODES = {"l1": L1, "lw": LW, "llh": LLH, "lgh": LGH}

_M1 = np.uint64(0x5555555555555555)
_M2 = np.uint64(0x3333333333333333)
_M4 = np.uint64(0x0F0F0F0F0F0F0F0F)
_H01 = np.uint64(0x0101010101010101)
_ONE = np.uint64(1)
_TWO = np.uint64(2)
_FOUR = np.uint64(4)
_S56 = np.uint64(56)


@njit(cache=True, inline="always")
def popcount64(x):
    x = x - ((x >> _ONE) & _M1)
    x = (x & _M2) + ((x >> _TWO) & _M2)
    x = (x + (x >> _FOUR)) & _M4
    return np.int64((x * _H01) >> _S56)


@njit(cache=True)
def eval_from(sources, vals, n_inputs, start):
    """Recompute gates ``start..n_g-1`` in place."""
    ng = sources.shape[0]
    nw = vals.shape[1]
    for g in range(start, ng):
        a = sources[g, 0]
        b = sources[g, 1]
        row = n_inputs + g
        for w in range(nw):
            vals[row, w] = ~(vals[a, w] & vals[b, w])


def loss_denominator(kind, n, m):
    if kind == LW:
        return n * m * (m + 1) // 2
    return n * m


@njit(cache=True)
def cost_numerator(vals, targets, order, out_base, lastmask, n, kind):
    """Loss numerator for network outputs ``vals[out_base + j]`` against ``targets[j]``.

    ``order[k]`` is the target placed at curriculum position ``k``.
    """
    m = targets.shape[0]
    nw = targets.shape[1]
    total = np.int64(0)
    if kind == LLH:
        # running OR of error rows realises the per-example hierarchy
        acc = np.zeros(nw, dtype=np.uint64)
        for k in range(m):
            j = order[k]
            row = out_base + j
            cnt = np.int64(0)
            for w in range(nw):
                e = vals[row, w] ^ targets[j, w]
                if w == nw - 1:
                    e &= lastmask
                acc[w] |= e
                cnt += popcount64(acc[w])
            total += cnt
        return total
    broken = False
    for k in range(m):
        j = order[k]
        row = out_base + j
        if kind == LGH and broken:
            total += n
            continue
        cnt = np.int64(0)
        for w in range(nw):
            e = vals[row, w] ^ targets[j, w]
            if w == nw - 1:
                e &= lastmask
            cnt += popcount64(e)
        if kind == LW:
            total += (m - k) * cnt
        else:
            total += cnt
            if cnt > 0:
                broken = True
    return total


@njit(cache=True, inline="always")
def move_from_uniforms(sources, n_inputs, u_gate, u_slot, u_src):
    """Map three uniforms in [0, 1) to a (gate, slot, new_source) move.

    Gates with a single legal source (only gate 0 when there is one input)
    are never picked.
    """
    ng = sources.shape[0]
    first = 1 if n_inputs == 1 else 0
    g = first + int(u_gate * (ng - first))
    if g >= ng:
        g = ng - 1
    slot = 0 if u_slot < 0.5 else 1
    choices = n_inputs + g - 1
    r = int(u_src * choices)
    if r >= choices:
        r = choices - 1
    if r >= sources[g, slot]:
        r += 1
    return g, slot, r


@njit(cache=True)
def lahc_steps(sources, vals, n_inputs, targets, order, lastmask, n, kind,
               history, state, uniforms, limit):
    """Run LAHC iterations until the uniforms run out or the restart finishes.

    ``state`` holds ``[current_cost, iteration, done]`` and is updated in
    place. The stopping test runs after each move, so a restart always makes
    at least one move.

    A move only re-evaluates gates downstream of a value that actually
    changed, and the loss is only recomputed when an output changed.
    """
    ng = sources.shape[0]
    m = targets.shape[0]
    nw = vals.shape[1]
    out_base = n_inputs + ng - m
    hlen = history.shape[0]
    cost = state[0]
    i = state[1]
    done = state[2]
    changed = np.zeros(n_inputs + ng, dtype=np.bool_)
    touched = np.empty(ng, dtype=np.int64)
    saved = np.empty((ng, nw), dtype=np.uint64)
    fresh = np.empty(nw, dtype=np.uint64)
    for t in range(uniforms.shape[0]):
        if done:
            break
        g, slot, new = move_from_uniforms(sources, n_inputs, uniforms[t, 0], uniforms[t, 1], uniforms[t, 2])
        old = sources[g, slot]
        sources[g, slot] = new
        count = 0
        output_changed = False
        for h in range(g, ng):
            a = sources[h, 0]
            b = sources[h, 1]
            if h != g and not changed[a] and not changed[b]:
                continue
            row = n_inputs + h
            differs = False
            for w in range(nw):
                fresh[w] = ~(vals[a, w] & vals[b, w])
                if fresh[w] != vals[row, w]:
                    differs = True
            if differs:
                touched[count] = h
                for w in range(nw):
                    saved[count, w] = vals[row, w]
                    vals[row, w] = fresh[w]
                count += 1
                changed[row] = True
                if row >= out_base:
                    output_changed = True
        if output_changed:
            cand = cost_numerator(vals, targets, order, out_base, lastmask, n, kind)
        else:
            cand = cost
        v = i % hlen
        if cand < history[v] or cand <= cost:
            cost = cand
        else:
            sources[g, slot] = old
            for k in range(count):
                row = n_inputs + touched[k]
                for w in range(nw):
                    vals[row, w] = saved[k, w]
        for k in range(count):
            changed[n_inputs + touched[k]] = False
        history[v] = cost
        i += 1
        if i >= limit or cost == 0:
            done = 1
    state[0] = cost
    state[1] = i
    state[2] = done
