"""Pure-numpy implementations of the per-mode kernels.

Every function here has a compiled twin in ``_ckernels.pyx`` with the same
signature. Results agree to rounding; reductions use numpy's pairwise
summation, the compiled versions sum row by row in index order.
"""
import numpy as np


def apply_propagator(w, h, e11, re12, e21, e22):
    """Multiply each mode of ``(w, h)`` by the real 2x2 matrix [[e11, re12], [e21, e22]]."""
    return e11 * w + re12 * h, e21 * w + e22 * h


def transport(u1, u2, wx, wy, hx, hy):
    """Return ``(-(u.grad w), -(u.grad h))`` on physical samples."""
    return -(u1 * wx + u2 * wy), -(u1 * hx + u2 * hy)


def quadratic_moments(w, h, ksq, inv_ksq, weight):
    """Weighted spectral moments of the pair ``(w, h)``.

    Returns the 9 sums ``sum weight * k^(2p) * q`` for p = -1, 0, 1 and
    q in (|w|^2, |h|^2, Re(w conj(h))), ordered p-major.
    """
    ww = weight * (w.real * w.real + w.imag * w.imag)
    hh = weight * (h.real * h.real + h.imag * h.imag)
    wh = weight * (w.real * h.real + w.imag * h.imag)
    out = np.empty(9)
    for p, mult in enumerate((inv_ksq, None, ksq)):
        if mult is None:
            out[3 * p: 3 * p + 3] = ww.sum(), hh.sum(), wh.sum()
        else:
            out[3 * p: 3 * p + 3] = (ww * mult).sum(), (hh * mult).sum(), (wh * mult).sum()
    return out


def masked_sum(a, ksq, mult, weight, radius_sq):
    """``sum weight * mult * |a|^2`` over modes with ``k^2 <= radius_sq``."""
    sel = ksq <= radius_sq
    vals = weight * mult * (a.real * a.real + a.imag * a.imag)
    return float(vals[sel].sum())
