"""Compiled inner loops of the power-series integrator."""

import numpy as np
from numba import njit


@njit(cache=True)
def series_recursion(a, b, q, lap_re, lap_im, weights, inv_dx2, disp, nonlin, pot, use_pot, h):
    """Fill interior Taylor coefficients of orders 1..s in place.

    a, b    : (K, s+1, n) real and imaginary parts; order 0 and the edge
              entries must be set by the caller
    q       : (K, s, n) work array for the |psi_k|^2 series
    lap_re, lap_im : (n,) work arrays
    weights : (h,) normalised stencil weights
    disp    : (K,) dispersion coefficients
    nonlin  : (K, K) cross-phase matrix
    pot     : (n,) potential, read only when use_pot

    Inner loops run over contiguous slices so they vectorise.
    """
    K, s1, n = a.shape
    s = s1 - 1
    m_in = n - 2 * h
    lr = lap_re[h : n - h]
    li = lap_im[h : n - h]
    pin = pot[h : n - h]
    for l in range(s):
        for k in range(K):
            ql = q[k, l]
            for i in range(n):
                ql[i] = 0.0
            for m in range(l + 1):
                a1 = a[k, m]
                a2 = a[k, l - m]
                b1 = b[k, m]
                b2 = b[k, l - m]
                for i in range(n):
                    ql[i] += a1[i] * a2[i] + b1[i] * b2[i]
        denom = float(l + 1)
        for k in range(K):
            al = a[k, l]
            bl = b[k, l]
            ac = al[h : n - h]
            bc = bl[h : n - h]
            for i in range(m_in):
                lr[i] = 0.0
                li[i] = 0.0
            for j in range(1, h + 1):
                w = weights[j - 1]
                ap = al[h + j : n - h + j]
                am = al[h - j : n - h - j]
                bp = bl[h + j : n - h + j]
                bm = bl[h - j : n - h - j]
                for i in range(m_in):
                    lr[i] += w * (ap[i] + am[i] - 2.0 * ac[i])
                    li[i] += w * (bp[i] + bm[i] - 2.0 * bc[i])
            d = disp[k]
            for i in range(m_in):
                lr[i] = d * (lr[i] * inv_dx2)
                li[i] = d * (li[i] * inv_dx2)
            for jj in range(l + 1):
                ar = a[k, l - jj][h : n - h]
                br = b[k, l - jj][h : n - h]
                for r in range(K):
                    c = nonlin[k, r]
                    qr = q[r, jj][h : n - h]
                    for i in range(m_in):
                        g = c * qr[i]
                        lr[i] += g * ar[i]
                        li[i] += g * br[i]
            if use_pot:
                for i in range(m_in):
                    lr[i] -= pin[i] * ac[i]
                    li[i] -= pin[i] * bc[i]
            an = a[k, l + 1][h : n - h]
            bn = b[k, l + 1][h : n - h]
            # c_{l+1} = i rhs / (l + 1)
            for i in range(m_in):
                an[i] = -li[i] / denom
                bn[i] = lr[i] / denom


@njit(cache=True)
def horner_sum(a, b, dt, u, v):
    """``u + i v = sum_l (a_l + i b_l) dt**l``; returns False on a non-finite value."""
    K, s1, n = a.shape
    ok = True
    for k in range(K):
        uk = u[k]
        vk = v[k]
        top_a = a[k, s1 - 1]
        top_b = b[k, s1 - 1]
        for i in range(n):
            uk[i] = top_a[i]
            vk[i] = top_b[i]
        for l in range(s1 - 2, -1, -1):
            al = a[k, l]
            bl = b[k, l]
            for i in range(n):
                uk[i] = uk[i] * dt + al[i]
                vk[i] = vk[i] * dt + bl[i]
        for i in range(n):
            if not (np.isfinite(uk[i]) and np.isfinite(vk[i])):
                ok = False
    return ok
