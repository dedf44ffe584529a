"""Extended sampling method for inverse elastic obstacle scattering in 2-D."""

from .elastic_core import ElasticFarField, Material, PlaneWave, wavenumbers
from .esm import ESMParams, SamplingGrid, esm_reconstruct, multilevel
from .forward_mfs import BoundaryCondition, MFSConfig, ShapeSpec, generate_farfield

__all__ = [
    "BoundaryCondition",
    "ESMParams",
    "ElasticFarField",
    "MFSConfig",
    "Material",
    "PlaneWave",
    "SamplingGrid",
    "ShapeSpec",
    "esm_reconstruct",
    "generate_farfield",
    "multilevel",
    "wavenumbers",
]
