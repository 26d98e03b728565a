"""Step function, its truncated-sine relaxation, and surrogate gradients.

All functions broadcast over numpy arrays; ``z`` is a score minus its
threshold and ``w`` the half-width of the window where the relaxation is
not flat.
"""

from __future__ import annotations

import numpy as np
from scipy.special import expit

from .errors import WidthOutOfRange

HALF_PI = np.pi / 2.0


def _check_width(w):
    w = np.asarray(w, dtype=np.float64)
    if not np.all((w > 0.0) & (w < 1.0)):
        raise WidthOutOfRange(f"width must lie in (0, 1), got {w}")
    return w


def _out(a):
    return a.item() if np.ndim(a) == 0 else a


def hsf(z):
    """1 where z > 0, else 0 (a tie with the threshold is negative)."""
    return _out((np.asarray(z) > 0).astype(np.int8))


def smoothed_hsf(z, w):
    w = _check_width(w)
    z = np.asarray(z, dtype=np.float64)
    inner = 0.5 * np.sin(HALF_PI * z / w) + 0.5
    return _out(np.where(z < -w, 0.0, np.where(z > w, 1.0, inner)))


def surrogate_grads(z, w):
    """``(d/dz, d/dw)`` of :func:`smoothed_hsf`, zero for ``|z| >= w``."""
    w = _check_width(w)
    z = np.asarray(z, dtype=np.float64)
    return tuple(_out(g) for g in _surrogate_grads(z, w))


def _surrogate_grads(z, w):
    inside = np.abs(z) < w
    phase = HALF_PI * z / w
    c = np.where(inside, np.cos(phase), 0.0)
    grad_z = (np.pi / 4.0) * c / w
    grad_w = -(np.pi / 4.0) * z * c / (w * w)
    return grad_z, grad_w


def logistic(x):
    return _out(expit(np.asarray(x, dtype=np.float64)))


def logistic_grad(x):
    s = expit(np.asarray(x, dtype=np.float64))
    return _out(s * (1.0 - s))


def sgl_surrogate(z, sigma):
    """Sigmoid surrogate derivative in z: ``sigma * s(sigma z) * (1 - s(sigma z))``."""
    s = expit(np.asarray(sigma) * np.asarray(z, dtype=np.float64))
    return _out(np.asarray(sigma) * s * (1.0 - s))


def sgl_sigma_partial(z, sigma):
    """Derivative of ``s(sigma z)`` in sigma: ``z * s(sigma z) * s(-sigma z)``."""
    z = np.asarray(z, dtype=np.float64)
    u = np.asarray(sigma) * z
    return _out(z * expit(u) * expit(-u))
