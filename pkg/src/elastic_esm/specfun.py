"""Integer-order Bessel and Hankel functions of real argument.

Thin, order-checked wrappers around ``scipy.special``. Everything else in the
package goes through these so that the truncation bound on the order is
enforced in one place.
"""

from __future__ import annotations

import numpy as np
from scipy import special

N_MAX = 120


class BesselOrderError(ValueError):
    """Requested order exceeds the configured truncation bound."""


class BesselDomainError(ValueError):
    """Argument outside the domain of the requested function."""


def _check_order(n, n_max: int) -> np.ndarray:
    n = np.asarray(n)
    if not np.issubdtype(n.dtype, np.integer):
        if not np.all(n == np.round(n)):
            raise BesselOrderError("order must be an integer")
        n = n.astype(int)
    if np.any(np.abs(n) > n_max):
        raise BesselOrderError(f"|order| {int(np.max(np.abs(n)))} exceeds N_max={n_max}")
    return n


def _check_positive(x) -> np.ndarray:
    x = np.asarray(x, dtype=float)
    if np.any(x <= 0):
        raise BesselDomainError("argument must be strictly positive")
    return x


def _reflect(fn, n, x):
    # evaluate at |n| and apply (-1)^n so the negative-order symmetry is exact
    m = np.abs(n)
    sign = np.where((n < 0) & (m % 2 == 1), -1.0, 1.0)
    out = np.asarray(fn(m, x))
    if np.iscomplexobj(out):
        # componentwise, so a -inf imaginary part never meets a 0 * inf
        out = out.copy()
        out.real *= sign
        out.imag *= sign
    else:
        out = sign * out
    return out[()] if isinstance(out, np.ndarray) else out


def bessel_j(n, x, n_max: int = N_MAX):
    """J_n(x) for integer n and real x >= 0 (x = 0 allowed)."""
    n = _check_order(n, n_max)
    x = np.asarray(x, dtype=float)
    if np.any(x < 0):
        raise BesselDomainError("bessel_j is only defined here for x >= 0")
    return _reflect(special.jv, n, x)


def bessel_y(n, x, n_max: int = N_MAX):
    """Y_n(x) for integer n and x > 0."""
    n = _check_order(n, n_max)
    x = _check_positive(x)
    return _reflect(special.yv, n, x)


def _h1(n, x):
    # assemble from J and Y: keeps J accurate when |Y| is huge and gives
    # -inf (not nan) in the imaginary part once Y overflows
    j, y = np.broadcast_arrays(special.jv(n, x), special.yv(n, x))
    out = np.empty(j.shape, dtype=complex)
    out.real, out.imag = j, y
    return out


def hankel1(n, x, n_max: int = N_MAX):
    """H_n^(1)(x) = J_n(x) + i Y_n(x)."""
    n = _check_order(n, n_max)
    x = _check_positive(x)
    return _reflect(_h1, n, x)


def hankel1_deriv(n, x, n_max: int = N_MAX):
    """d/dx H_n^(1)(x) via H'_n = H_{n-1} - (n/x) H_n."""
    n = _check_order(n, n_max)
    x = _check_positive(x)
    # n - 1 may step one past the bound at |n| = n_max; that is fine
    h_prev = _reflect(_h1, n - 1, x)
    h_n = _reflect(_h1, n, x)
    out = h_prev - (n / x) * h_n
    return out[()] if isinstance(out, np.ndarray) else out
