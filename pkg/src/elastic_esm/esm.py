"""Extended sampling method: per-point Tikhonov solves and the indicator field.

For a probe disk centred at z the kernel matrix factorises as

    K_z = Dx(z) K_0 Dd(z),

with Dx, Dd diagonal and unimodular. One SVD of the (inner-product weighted)
origin kernel therefore serves every sampling point, and the regularised
solution norm at z costs one matrix-vector product.
"""

from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from .disk_kernels import DiskSpec, rigid_disk_kernel_blocks, soft_disk_farfield
from .elastic_core import ElasticFarField, Material, direction, ipp_rhs_scale, uniform_angles, wavenumbers

MODES = ("ipp_p", "ipp_s", "ipf")


@dataclass(frozen=True)
class SamplingGrid:
    """Rectangular grid; points are row-major with x varying fastest."""

    x_min: float = -5.0
    x_max: float = 5.0
    y_min: float = -5.0
    y_max: float = 5.0
    step: float = 0.1

    @property
    def xs(self) -> np.ndarray:
        n = int(round((self.x_max - self.x_min) / self.step)) + 1
        return self.x_min + self.step * np.arange(n)

    @property
    def ys(self) -> np.ndarray:
        n = int(round((self.y_max - self.y_min) / self.step)) + 1
        return self.y_min + self.step * np.arange(n)

    @property
    def shape(self) -> tuple:
        return (self.ys.size, self.xs.size)

    @property
    def points(self) -> np.ndarray:
        X, Y = np.meshgrid(self.xs, self.ys)
        return np.column_stack([X.ravel(), Y.ravel()])


@dataclass(frozen=True)
class ESMParams:
    alpha: float = 1e-5
    probe_radius: float = 0.6
    mode: str = "ipf"
    m_directions: int = 52
    # fold the trapezoid weight 2 pi / M into the kernel matrix
    quadrature_weight: bool = False

    def __post_init__(self):
        if self.alpha <= 0:
            raise ValueError("alpha must be positive")
        if self.probe_radius <= 0:
            raise ValueError("probe radius must be positive")
        if self.mode not in MODES:
            raise ValueError(f"mode must be one of {MODES}, got {self.mode!r}")


@dataclass
class ProbeOperator:
    """Origin-disk kernel K_0 together with the SVD of W K_0 W^{-1}.

    ``weights`` holds the diagonal of W = D_ps^{1/2} (all ones for the
    single-component problem); ``k_obs``/``k_inc`` are the wavenumbers that
    enter the translation phases of each row and column.
    """

    kernel: np.ndarray
    weights: np.ndarray
    k_obs: np.ndarray
    k_inc: np.ndarray
    theta: np.ndarray
    radius: float
    material: Material
    mode: str
    u: np.ndarray = field(init=False, repr=False)
    s: np.ndarray = field(init=False, repr=False)
    vh: np.ndarray = field(init=False, repr=False)

    def __post_init__(self):
        wk = self.weights[:, None] * self.kernel / self.weights[None, :]
        self.u, self.s, self.vh = np.linalg.svd(wk)

    @property
    def size(self) -> int:
        return self.kernel.shape[0]

    @property
    def obs_dirs(self) -> np.ndarray:
        return np.tile(direction(self.theta), (self.size // self.theta.size, 1))

    def row_phase(self, z) -> np.ndarray:
        """Diagonal of Dx(z), shape (..., size)."""
        return np.exp(-1j * self.k_obs * (np.asarray(z) @ self.obs_dirs.T))

    def col_phase(self, z) -> np.ndarray:
        """Diagonal of Dd(z)."""
        return np.exp(1j * self.k_inc * (np.asarray(z) @ self.obs_dirs.T))

    def matrix_at(self, z) -> np.ndarray:
        """K_z assembled from the factorisation."""
        return self.row_phase(z)[:, None] * self.kernel * self.col_phase(z)[None, :]

    def adjoint(self, mat: np.ndarray) -> np.ndarray:
        """Adjoint under the weighted inner product: D^{-1} conj(K)^T D."""
        d = self.weights**2
        return mat.conj().T * d[None, :] / d[:, None]


def assemble_base_ipp(material: Material, R: float, kt: str = "p", m: int = 52,
                      quadrature_weight: bool = False) -> ProbeOperator:
    """Sound-soft disk kernel A^0[l, j] = u_inf(x_l, d_j) at wavenumber k_p or k_s."""
    k = wavenumbers(material)
    kval = {"p": k.kp, "s": k.ks}[kt]
    theta = uniform_angles(m)
    col = soft_disk_farfield(kval, R, theta, 0.0)
    idx = (np.arange(m)[:, None] - np.arange(m)[None, :]) % m
    kernel = col[idx]
    if quadrature_weight:
        kernel = kernel * (2 * np.pi / m)
    ones = np.ones(m)
    return ProbeOperator(kernel, ones, kval * ones, kval * ones, theta, R, material, f"ipp_{kt}")


def ps_weights(material: Material, m: int) -> np.ndarray:
    """Diagonal of D_ps^{1/2}: sqrt(ks/kp) on the compressional block, 1 on the shear block."""
    k = wavenumbers(material)
    return np.concatenate([np.full(m, np.sqrt(k.ks / k.kp)), np.ones(m)])


def assemble_base_ipf(material: Material, R: float, m: int = 52,
                      quadrature_weight: bool = False) -> ProbeOperator:
    """Rigid disk block kernel with columns scaled by sqrt(kp/omega), sqrt(ks/omega)."""
    k = wavenumbers(material)
    pp, ps, sp, ss = rigid_disk_kernel_blocks(material, R, m)
    cp = np.sqrt(k.kp / material.omega)
    cs = np.sqrt(k.ks / material.omega)
    kernel = np.block([[cp * pp, cs * ps], [cp * sp, cs * ss]])
    if quadrature_weight:
        kernel = kernel * (2 * np.pi / m)
    ones = np.ones(m)
    k_obs = np.concatenate([k.kp * ones, k.ks * ones])
    k_inc = np.concatenate([k.kp * ones, k.ks * ones])
    return ProbeOperator(kernel, ps_weights(material, m), k_obs, k_inc, uniform_angles(m), R, material, "ipf")


def build_operator(params: ESMParams, material: Material) -> ProbeOperator:
    if params.mode == "ipf":
        return assemble_base_ipf(material, params.probe_radius, params.m_directions, params.quadrature_weight)
    return assemble_base_ipp(material, params.probe_radius, params.mode[-1], params.m_directions,
                             params.quadrature_weight)


def rhs_from_data(data: ElasticFarField, mode: str, material: Material) -> np.ndarray:
    """Right-hand side for a mode: scaled single component for IP-P, stacked pair for IP-F."""
    k = wavenumbers(material)
    if mode == "ipp_p":
        return ipp_rhs_scale(data.up, k.kp)
    if mode == "ipp_s":
        return ipp_rhs_scale(data.us, k.ks)
    if mode == "ipf":
        return data.stacked()
    raise ValueError(f"unknown mode {mode!r}")


def _filter(op: ProbeOperator, alpha: float) -> np.ndarray:
    return op.s / (op.s**2 + alpha)


def solve_at_point(op: ProbeOperator, z, rhs, alpha: float):
    """Tikhonov solution g_z of (K_z^* K_z + alpha I) g = K_z^* f and its weighted norm."""
    rhs = np.asarray(rhs, dtype=complex)
    if rhs.shape != (op.size,):
        raise ValueError(f"rhs must have length {op.size}, got {rhs.shape}")
    w = op.weights
    coef = _filter(op, alpha) * (op.u.conj().T @ (np.conj(op.row_phase(z)) * w * rhs))
    h = np.conj(op.col_phase(z)) * (op.vh.conj().T @ coef)
    return h / w, float(np.linalg.norm(coef))


def solve_direct(op: ProbeOperator, z, rhs, alpha: float):
    """Dense reference solve with the kernel assembled at z; no SVD reuse.

    Minimises ||W (K_z g - f)||^2 + alpha ||W g||^2 as a stacked least-squares
    problem, which avoids squaring the condition number.
    """
    w = op.weights
    K = w[:, None] * op.matrix_at(z) / w[None, :]
    n = op.size
    lhs = np.vstack([K, np.sqrt(alpha) * np.eye(n)])
    rhs_w = np.concatenate([w * np.asarray(rhs, dtype=complex), np.zeros(n)])
    h = np.linalg.lstsq(lhs, rhs_w, rcond=None)[0]
    return h / w, float(np.linalg.norm(h))


def norms_at_points(op: ProbeOperator, points, rhs, alpha: float, workers: int = 1,
                    chunk: int = 2048) -> np.ndarray:
    """Weighted solution norms for many sampling points, in input order."""
    points = np.atleast_2d(np.asarray(points, dtype=float))
    rhs = np.asarray(rhs, dtype=complex)
    wf = op.weights * rhs
    proj = op.u.conj()  # coef = U^H (conj(phase) * wf)  ->  (phase* wf) @ conj(U)
    filt = _filter(op, alpha)

    def work(block):
        lhs = np.conj(op.row_phase(block)) * wf[None, :]
        return np.linalg.norm((lhs @ proj) * filt[None, :], axis=1)

    blocks = [points[i:i + chunk] for i in range(0, len(points), chunk)]
    if workers > 1 and len(blocks) > 1:
        with ThreadPoolExecutor(workers) as pool:
            parts = list(pool.map(work, blocks))
    else:
        parts = [work(b) for b in blocks]
    return np.concatenate(parts)


@dataclass
class IndicatorField:
    grid: SamplingGrid
    values: np.ndarray
    raw_norms: np.ndarray
    argmin: int

    @property
    def z_star(self) -> np.ndarray:
        return self.grid.points[self.argmin]

    def as_image(self) -> np.ndarray:
        return self.values.reshape(self.grid.shape)


def indicator_field(op: ProbeOperator, grid: SamplingGrid, rhs, alpha: float, workers: int = 1) -> IndicatorField:
    """I_z = ||g_z|| / max ||g_z|| over the grid; ties at the minimum go to the lowest index."""
    norms = norms_at_points(op, grid.points, rhs, alpha, workers)
    return IndicatorField(grid, norms / norms.max(), norms, int(np.argmin(norms)))


def esm_reconstruct(params: ESMParams, data: ElasticFarField, grid: SamplingGrid = SamplingGrid(),
                    material: Material = Material(), workers: int = 1):
    """Single-level ESM: returns (z*, reconstruction disk, indicator field)."""
    if data.m != params.m_directions:
        raise ValueError(f"data has {data.m} directions, params expect {params.m_directions}")
    op = build_operator(params, material)
    field_ = indicator_field(op, grid, rhs_from_data(data, params.mode, material), params.alpha, workers)
    z = field_.z_star
    return z, DiskSpec((float(z[0]), float(z[1])), params.probe_radius), field_


@dataclass
class MultilevelResult:
    z_final: np.ndarray
    R_final: float
    trace: list  # (z_j, R_j) per level
    stopped_by: str


def multilevel(params: ESMParams, data: ElasticFarField, grid: SamplingGrid = SamplingGrid(),
               material: Material = Material(), r0: float = 2.4, r_floor: float = 0.15,
               workers: int = 1) -> MultilevelResult:
    """Halve the probe radius until the minimiser leaves the previous reconstruction disk."""
    from dataclasses import replace

    radius = r0
    z, disk, _ = esm_reconstruct(replace(params, probe_radius=radius), data, grid, material, workers)
    trace = [(z, radius)]
    while radius / 2 >= r_floor * (1 - 1e-12):
        radius = radius / 2
        z_new, disk_new, _ = esm_reconstruct(replace(params, probe_radius=radius), data, grid, material, workers)
        trace.append((z_new, radius))
        if not disk.contains(z_new):
            return MultilevelResult(np.asarray(disk.center), disk.radius, trace, "exit")
        disk = disk_new
    return MultilevelResult(np.asarray(disk.center), disk.radius, trace, "floor")
