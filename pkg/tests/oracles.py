"""Reference computations shared by the test modules.

Kernels here are assembled entry by entry from the closed-form disk far
fields and their translation relations, so they never touch the SVD fast
path or the Dx K0 Dd factorisation used by the inversion code.
"""

from functools import lru_cache

import numpy as np

from elastic_esm.disk_kernels import rigid_disk_farfield, soft_disk_farfield, translate_acoustic, translate_elastic
from elastic_esm.elastic_core import PlaneWave, uniform_angles, wavenumbers


@lru_cache(maxsize=None)
def _origin_columns(material, mode, R, m):
    """Origin-disk far fields per incidence direction (z-independent)."""
    k = wavenumbers(material)
    th = uniform_angles(m)
    if mode in ("ipp_p", "ipp_s"):
        kt = k.kp if mode == "ipp_p" else k.ks
        return [soft_disk_farfield(kt, R, th, tj) for tj in th]
    return [[rigid_disk_farfield(material, R, pw, th) for pw in (PlaneWave(tj, 1, 0), PlaneWave(tj, 0, 1))]
            for tj in th]


def entrywise_kernel(material, mode, R, z, m=52):
    """K_z assembled column by column from translated disk far fields (no factorisation)."""
    k = wavenumbers(material)
    th = uniform_angles(m)
    cols = _origin_columns(material, mode, R, m)
    if mode in ("ipp_p", "ipp_s"):
        kt = k.kp if mode == "ipp_p" else k.ks
        return np.stack([translate_acoustic(cols[j], kt, z, th, tj) for j, tj in enumerate(th)], axis=1)
    cp, cs = np.sqrt(k.kp / material.omega), np.sqrt(k.ks / material.omega)
    K = np.empty((2 * m, 2 * m), complex)
    for j, tj in enumerate(th):
        for col, (tag, c) in enumerate((("p", cp), ("s", cs))):
            up, us = translate_elastic(cols[j][col], material, z, th, tj, tag)
            K[:m, col * m + j] = c * up
            K[m:, col * m + j] = c * us
    return K


def dense_tikhonov(K, f, alpha, d):
    """argmin ||W(Kg - f)||^2 + alpha ||W g||^2 with W = diag(sqrt(d)), via a stacked lstsq."""
    w = np.sqrt(d)
    A = np.vstack([w[:, None] * K / w[None, :], np.sqrt(alpha) * np.eye(K.shape[1])])
    b = np.concatenate([w * f, np.zeros(K.shape[1])])
    h = np.linalg.lstsq(A, b, rcond=None)[0]
    return h / w
