"""Closed-form far fields of the probe disks and their translations.

Two probes are supported: the sound-soft acoustic disk (kernel for the
single-component problem) and the rigid elastic disk (kernel for the
full far-field problem). Both are computed for a disk centred at the origin
and moved to a sampling point by unimodular phase factors.
"""

from __future__ import annotations

from dataclasses import dataclass, replace

import numpy as np

from .elastic_core import (
    Material,
    PlaneWave,
    direction,
    direction_perp,
    plane_wave_displacement,
    wavenumbers,
)
from .specfun import N_MAX, bessel_j, hankel1, hankel1_deriv

SERIES_TOL = 1e-14
RESONANCE_TOL = 1e-13
N_QUAD = 256


class TruncationError(RuntimeError):
    """Series did not converge before the order cap."""


class ResonanceError(RuntimeError):
    """Disk radius sits (numerically) on an interior eigenvalue."""

    def __init__(self, order: int, value: float):
        super().__init__(f"|C_n| = {value:.3e} below {RESONANCE_TOL:g} at order n={order}")
        self.order = order


@dataclass(frozen=True)
class DiskSpec:
    center: tuple = (0.0, 0.0)
    radius: float = 1.0

    def __post_init__(self):
        if self.radius <= 0:
            raise ValueError("disk radius must be positive")

    def contains(self, z) -> bool:
        return bool(np.hypot(z[0] - self.center[0], z[1] - self.center[1]) <= self.radius)


def _cutoff(mags: np.ndarray, start: int, tol: float = SERIES_TOL) -> int:
    """First N >= start+2 such that mags[N-2..N] are all below tol * max."""
    scale = mags.max()
    small = mags < tol * scale
    for n in range(max(start, 0) + 2, mags.size):
        if small[n - 2] and small[n - 1] and small[n]:
            return n
    raise TruncationError(f"series not converged below N_max={mags.size - 1}")


def soft_disk_coeffs(k: float, R: float, n_max: int = N_MAX) -> np.ndarray:
    """c_n = J_n(kR) / H_n(kR) for n = 0..N (adaptive N); c_{-n} = c_n."""
    n = np.arange(n_max + 1)
    with np.errstate(all="ignore"):
        c = bessel_j(n, k * R, n_max) / hankel1(n, k * R, n_max)
    # orders where H_n overflows contribute nothing representable
    c[~np.isfinite(c)] = 0.0
    cut = _cutoff(np.abs(c), int(np.ceil(k * R)))
    return c[: cut + 1]


def soft_disk_farfield(k: float, R: float, theta_obs, theta_inc, n_max: int = N_MAX):
    """Far field of the origin-centred sound-soft disk for incidence theta_inc."""
    c = soft_disk_coeffs(k, R, n_max)
    delta = np.asarray(theta_obs, dtype=float) - np.asarray(theta_inc, dtype=float)
    n = np.arange(1, c.size)
    series = c[0] + 2 * np.sum(c[1:] * np.cos(np.multiply.outer(delta, n)), axis=-1)
    return -np.exp(-1j * np.pi / 4) * np.sqrt(2 / (np.pi * k)) * series


def translate_acoustic(value, k: float, z, theta_obs, theta_inc):
    """Move an origin-disk far field to a disk centred at z."""
    z = np.asarray(z, dtype=float)
    phase = (direction(theta_inc) - direction(theta_obs)) @ z
    return np.asarray(value) * np.exp(1j * k * phase)


@dataclass(frozen=True)
class RigidDiskCoeffs:
    """Coefficients of phi = sum a_n H_|n|(kp r) e^{in theta}, psi likewise with b_n."""

    n: np.ndarray
    a: np.ndarray
    b: np.ndarray

    @property
    def N(self) -> int:
        return int(self.n.max())


def trace_fourier_coeffs(material: Material, R: float, pw: PlaneWave, n_max: int = N_MAX):
    """Fourier coefficients (1/2pi) int f(theta) e^{-in theta} of nu.u^inc and tau.u^inc on r = R.

    Returned arrays are indexed by n = -n_max..n_max.
    """
    theta = 2 * np.pi * np.arange(N_QUAD) / N_QUAD
    nu, tau = direction(theta), direction_perp(theta)
    u = plane_wave_displacement(pw, material, R * nu)
    f_nu = np.fft.fft(np.sum(nu * u, axis=-1)) / N_QUAD
    f_tau = np.fft.fft(np.sum(tau * u, axis=-1)) / N_QUAD
    n = np.arange(-n_max, n_max + 1)
    return n, f_nu[n % N_QUAD], f_tau[n % N_QUAD]


def rigid_disk_coeffs(material: Material, R: float, pw: PlaneWave, n_max: int = N_MAX) -> RigidDiskCoeffs:
    """Solve the per-mode 2x2 boundary system of the rigid disk.

    With u = grad phi + grad_perp psi, the Dirichlet condition u = -u^inc
    on r = R gives, mode by mode,

        kp H'(kp R) a_n - (i n / R) H(ks R) b_n = -F_nu,n
        (i n / R) H(kp R) a_n + ks H'(ks R) b_n = -F_tau,n

    where tau = (-sin, cos) is the anticlockwise tangent.
    """
    # linear in the amplitudes; normalise so tiny or huge ones keep the relative cutoff meaningful
    scale = max(abs(pw.ap), abs(pw.as_))
    if scale != 1.0:
        c = rigid_disk_coeffs(material, R, replace(pw, ap=pw.ap / scale, as_=pw.as_ / scale), n_max)
        return RigidDiskCoeffs(n=c.n, a=c.a * scale, b=c.b * scale)
    k = wavenumbers(material)
    n, f_nu, f_tau = trace_fourier_coeffs(material, R, pw, n_max)
    m = np.abs(n)
    with np.errstate(all="ignore"):
        hp, hs = hankel1(m, k.kp * R, n_max), hankel1(m, k.ks * R, n_max)
        dhp, dhs = hankel1_deriv(m, k.kp * R, n_max), hankel1_deriv(m, k.ks * R, n_max)
        a11, a12 = k.kp * dhp, -1j * n / R * hs
        a21, a22 = 1j * n / R * hp, k.ks * dhs
        det = a11 * a22 - a12 * a21
        a = (-f_nu * a22 + a12 * f_tau) / det
        b = (-a11 * f_tau + a21 * f_nu) / det
    # high orders overflow H_n; their coefficients are far below double precision
    live = np.isfinite(det) & (np.abs(hs) < 1e150)
    bad = live & (np.abs(det) < RESONANCE_TOL)
    if np.any(bad):
        i = int(np.argmax(bad))
        raise ResonanceError(int(n[i]), float(np.abs(det[i])))
    a = np.where(live, a, 0.0)
    b = np.where(live, b, 0.0)

    # fold +-n together for the cutoff test
    mags = np.zeros(n_max + 1)
    np.maximum.at(mags, m, np.maximum(np.abs(a), np.abs(b)))
    cut = _cutoff(mags, int(np.ceil(k.ks * R)))
    keep = m <= cut
    return RigidDiskCoeffs(n=n[keep], a=a[keep], b=b[keep])


def _farfield_from_coeffs(coeffs: RigidDiskCoeffs, material: Material, theta_obs):
    k = wavenumbers(material)
    theta = np.asarray(theta_obs, dtype=float)
    basis = np.exp(1j * np.multiply.outer(theta, coeffs.n)) * (1j ** (-np.abs(coeffs.n)))
    pref = np.exp(-1j * np.pi / 4) * np.sqrt(2 / np.pi)
    up = 1j * k.kp * pref / np.sqrt(k.kp) * (basis @ coeffs.a)
    us = 1j * k.ks * pref / np.sqrt(k.ks) * (basis @ coeffs.b)
    return up, us


def rigid_disk_farfield(material: Material, R: float, pw: PlaneWave, theta_obs, n_max: int = N_MAX):
    """(u_p^inf, u_s^inf) of the origin-centred rigid disk at the given observation angles."""
    return _farfield_from_coeffs(rigid_disk_coeffs(material, R, pw, n_max), material, theta_obs)


def translate_elastic(ff, material: Material, z, theta_obs, theta_inc, mode: str):
    """Shift a rigid-disk far field (up, us) from the origin to centre z.

    ``mode`` is "p" for unit compressional incidence (ap=1, as=0) and "s"
    for unit shear incidence (ap=0, as=1).
    """
    k = wavenumbers(material)
    z = np.asarray(z, dtype=float)
    dz = direction(theta_inc) @ z
    xz = direction(theta_obs) @ z
    if mode == "p":
        kin = k.kp
    elif mode == "s":
        kin = k.ks
    else:
        raise ValueError(f"mode must be 'p' or 's', got {mode!r}")
    up, us = ff
    return (np.asarray(up) * np.exp(1j * (kin * dz - k.kp * xz)),
            np.asarray(us) * np.exp(1j * (kin * dz - k.ks * xz)))


def rigid_disk_kernel_blocks(material: Material, R: float, m: int, n_max: int = N_MAX):
    """Origin-disk far fields for all (observation l, incidence j) pairs on an m-point grid.

    Returns four m x m arrays (pp, ps, sp, ss): the first letter is the far
    field component, the second the incident wave type. Entry [l, j] only
    depends on theta_l - theta_j.
    """
    theta = 2 * np.pi * np.arange(m) / m
    up_p, us_p = rigid_disk_farfield(material, R, PlaneWave(0.0, 1.0, 0.0), theta, n_max)
    up_s, us_s = rigid_disk_farfield(material, R, PlaneWave(0.0, 0.0, 1.0), theta, n_max)
    idx = (np.arange(m)[:, None] - np.arange(m)[None, :]) % m
    return up_p[idx], up_s[idx], us_p[idx], us_s[idx]


def rigid_disk_farfield_at(material: Material, disk: DiskSpec, pw: PlaneWave, theta_obs,
                           n_max: int = N_MAX):
    """(u_p^inf, u_s^inf) of a rigid disk centred anywhere, for a mixed plane wave.

    The compressional and shear parts of the incident wave pick up different
    translation phases, so they are solved at the origin separately and
    shifted with ``translate_elastic`` before being added.
    """
    up = np.zeros(np.shape(theta_obs), dtype=complex)
    us = np.zeros(np.shape(theta_obs), dtype=complex)
    for mode, amp in (("p", pw.ap), ("s", pw.as_)):
        if amp == 0:
            continue
        unit = PlaneWave(pw.theta, 1.0, 0.0) if mode == "p" else PlaneWave(pw.theta, 0.0, 1.0)
        ff = rigid_disk_farfield(material, disk.radius, unit, theta_obs, n_max)
        tp, ts = translate_elastic(ff, material, disk.center, theta_obs, pw.theta, mode)
        up += amp * tp
        us += amp * ts
    return up, us
