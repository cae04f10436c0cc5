"""Fused elementwise loops for the batched kicked-rotor step."""

import numba as nb
import numpy as np


@nb.njit(cache=True)
def coin_free_into(amps, coins, free, buf):
    """buf[r, c, :W] = free[r] * (coin[r] @ amps[r])[c]; buf[..., W:] is left untouched."""
    rows, _, width = amps.shape
    shared_coin = coins.shape[0] == 1
    shared_free = free.shape[0] == 1
    for r in range(rows):
        cr = 0 if shared_coin else r
        fr = 0 if shared_free else r
        m00 = coins[cr, 0, 0]
        m01 = coins[cr, 0, 1]
        m10 = coins[cr, 1, 0]
        m11 = coins[cr, 1, 1]
        for n in range(width):
            a0 = amps[r, 0, n]
            a1 = amps[r, 1, n]
            f = free[fr, n]
            buf[r, 0, n] = (m00 * a0 + m01 * a1) * f
            buf[r, 1, n] = (m10 * a0 + m11 * a1) * f


@nb.njit(cache=True)
def extract_and_measure(src, light, use_light, out, winning, edge, edge_width):
    """Copy src[..., :W] into out (optionally applying light-shift phases).

    Also fills winning[r] = P_R - P_L and edge[r] = probability on the
    outermost ``edge_width`` sites at each end.
    """
    rows, _, width = out.shape
    half = (width - 1) // 2
    for r in range(rows):
        right = 0.0
        left = 0.0
        rim = 0.0
        for n in range(width):
            a0 = src[r, 0, n]
            a1 = src[r, 1, n]
            if use_light:
                a0 = a0 * light[0]
                a1 = a1 * light[1]
            out[r, 0, n] = a0
            out[r, 1, n] = a1
            p = a0.real * a0.real + a0.imag * a0.imag + a1.real * a1.real + a1.imag * a1.imag
            if n > half:
                right += p
            elif n < half:
                left += p
            if n < edge_width or n >= width - edge_width:
                rim += p
        winning[r] = right - left
        edge[r] = rim
