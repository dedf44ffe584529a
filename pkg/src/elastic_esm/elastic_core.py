"""Material model, plane waves and far-field containers for 2-D elasticity."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np


class ConfigurationError(ValueError):
    """Invalid physical or numerical configuration."""


@dataclass(frozen=True)
class Material:
    """Isotropic homogeneous medium with unit density."""

    lam: float = 2.0
    mu: float = 1.0
    omega: float = np.pi
    rho: float = 1.0

    def __post_init__(self):
        if self.mu <= 0:
            raise ConfigurationError("shear modulus mu must be positive")
        if 2 * self.mu + self.lam <= 0:
            raise ConfigurationError("need 2*mu + lambda > 0")
        if self.omega <= 0:
            raise ConfigurationError("omega must be positive")
        if self.rho != 1.0:
            raise ConfigurationError("only rho = 1 is supported")

    @property
    def kp(self) -> float:
        return wavenumbers(self).kp

    @property
    def ks(self) -> float:
        return wavenumbers(self).ks


@dataclass(frozen=True)
class Wavenumbers:
    kp: float
    ks: float


def wavenumbers(material: Material) -> Wavenumbers:
    """Compressional and shear wavenumbers omega/sqrt(2mu+lambda), omega/sqrt(mu)."""
    m = material
    return Wavenumbers(
        kp=m.omega / np.sqrt(2 * m.mu + m.lam),
        ks=m.omega / np.sqrt(m.mu),
    )


def direction(theta) -> np.ndarray:
    """Unit vector(s) (cos theta, sin theta), shape (..., 2)."""
    theta = np.asarray(theta, dtype=float)
    return np.stack([np.cos(theta), np.sin(theta)], axis=-1)


def direction_perp(theta) -> np.ndarray:
    """Unit vector(s) rotated pi/2 anticlockwise: (-sin theta, cos theta)."""
    theta = np.asarray(theta, dtype=float)
    return np.stack([-np.sin(theta), np.cos(theta)], axis=-1)


def uniform_angles(m: int) -> np.ndarray:
    """theta_j = 2 pi j / m, j = 0..m-1."""
    return 2 * np.pi * np.arange(m) / m


@dataclass(frozen=True)
class PlaneWave:
    """u^inc(x) = ap d e^{i kp x.d} + as_ d_perp e^{i ks x.d}."""

    theta: float = np.pi / 3
    ap: complex = 1.0
    as_: complex = 1.0

    def __post_init__(self):
        if self.ap == 0 and self.as_ == 0:
            raise ConfigurationError("plane wave needs a nonzero amplitude")

    @property
    def d(self) -> np.ndarray:
        return direction(self.theta)

    @property
    def d_perp(self) -> np.ndarray:
        return direction_perp(self.theta)


def plane_wave_displacement(pw: PlaneWave, material: Material, x) -> np.ndarray:
    """Incident displacement at point(s) x of shape (..., 2)."""
    x = np.asarray(x, dtype=float)
    k = wavenumbers(material)
    xd = x @ pw.d
    ep = np.exp(1j * k.kp * xd)[..., None]
    es = np.exp(1j * k.ks * xd)[..., None]
    return pw.ap * ep * pw.d + pw.as_ * es * pw.d_perp


def plane_wave_gradient(pw: PlaneWave, material: Material, x) -> np.ndarray:
    """Displacement gradient G[..., i, k] = d u_i / d x_k of the plane wave."""
    x = np.asarray(x, dtype=float)
    k = wavenumbers(material)
    d, dp = pw.d, pw.d_perp
    xd = x @ d
    ep = np.exp(1j * k.kp * xd)[..., None, None]
    es = np.exp(1j * k.ks * xd)[..., None, None]
    return (pw.ap * 1j * k.kp * ep * np.outer(d, d)
            + pw.as_ * 1j * k.ks * es * np.outer(dp, d))


def traction_from_gradient(grad: np.ndarray, normal: np.ndarray, material: Material) -> np.ndarray:
    """T_nu u = 2 mu du/dnu + lambda nu div u - mu nu_perp div_perp u."""
    lam, mu = material.lam, material.mu
    normal = np.asarray(normal, dtype=float)
    dudn = np.einsum("...ik,...k->...i", grad, normal)
    div = grad[..., 0, 0] + grad[..., 1, 1]
    curl = grad[..., 1, 0] - grad[..., 0, 1]
    nperp = np.stack([-normal[..., 1], normal[..., 0]], axis=-1)
    return 2 * mu * dudn + lam * normal * div[..., None] - mu * nperp * curl[..., None]


def ipp_rhs_scale(values, kt: float) -> np.ndarray:
    """Far field of the Helmholtz potential from the elastic component: v / (i kt)."""
    if kt <= 0:
        raise ConfigurationError("wavenumber must be positive")
    return np.asarray(values, dtype=complex) / (1j * kt)


@dataclass
class ElasticFarField:
    """Sampled (u_p^inf, u_s^inf) on the uniform grid theta_j = 2 pi j / M."""

    up: np.ndarray
    us: np.ndarray
    meta: dict = field(default_factory=dict)

    def __post_init__(self):
        self.up = np.asarray(self.up, dtype=complex)
        self.us = np.asarray(self.us, dtype=complex)
        if self.up.shape != self.us.shape or self.up.ndim != 1:
            raise ValueError("up and us must be 1-D arrays of equal length")

    @property
    def m(self) -> int:
        return self.up.size

    @property
    def directions(self) -> np.ndarray:
        return uniform_angles(self.m)

    def stacked(self) -> np.ndarray:
        return np.concatenate([self.up, self.us])


@dataclass
class AcousticFarField:
    values: np.ndarray
    k: float

    def __post_init__(self):
        self.values = np.asarray(self.values, dtype=complex)

    @property
    def directions(self) -> np.ndarray:
        return uniform_angles(self.values.size)


def weighted_inner_product(g, h, material: Material) -> complex:
    """<g, h> = (omega/kp) int g_p conj(h_p) + (omega/ks) int g_s conj(h_s).

    ``g`` and ``h`` are (g_p, g_s) pairs sampled on the same uniform grid;
    the integrals use the trapezoid weight 2 pi / M.
    """
    gp, gs = (np.asarray(a, dtype=complex) for a in g)
    hp, hs = (np.asarray(a, dtype=complex) for a in h)
    if not (gp.shape == gs.shape == hp.shape == hs.shape):
        raise ValueError("densities must share one direction grid")
    k = wavenumbers(material)
    w = 2 * np.pi / gp.size
    om = material.omega
    return complex(om / k.kp * w * np.vdot(hp, gp) + om / k.ks * w * np.vdot(hs, gs))


def herglotz_eval(g, material: Material, x) -> np.ndarray:
    """Elastic Herglotz wave function with density (g_p, g_s) at point(s) x."""
    gp, gs = (np.asarray(a, dtype=complex) for a in g)
    x = np.asarray(x, dtype=float)
    k = wavenumbers(material)
    theta = uniform_angles(gp.size)
    d, dp = direction(theta), direction_perp(theta)
    w = 2 * np.pi / gp.size
    xd = x @ d.T  # (..., M)
    cp = np.sqrt(k.kp / material.omega) * np.exp(1j * k.kp * xd) * gp
    cs = np.sqrt(k.ks / material.omega) * np.exp(1j * k.ks * xd) * gs
    return w * (cp @ d + cs @ dp)
