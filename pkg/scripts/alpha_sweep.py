"""Sensitivity of the multilevel radii to the Tikhonov parameter.

Rescaling the probe kernel by a constant c is equivalent to replacing alpha
by alpha / c^2, so this sweep also shows what any kernel normalisation
convention would do to the radii.
"""

from __future__ import annotations

from elastic_esm.elastic_core import Material
from elastic_esm.esm import ESMParams, SamplingGrid, multilevel
from elastic_esm.forward_mfs import DEFAULT_BC, ShapeSpec, generate_farfield

from reproduce_multilevel import REFERENCE

ALPHAS = (1e-3, 1e-4, 1e-5, 1e-6, 1e-7, 1e-8, 1e-9, 1e-10)


def main():
    material = Material()
    data = {s: generate_farfield(ShapeSpec(s), DEFAULT_BC[s], material=material)
            for s in ("pear", "peanut", "kite")}
    keys = [(s, m) for s in data for m in ("ipf", "ipp_p", "ipp_s")]
    print("alpha   " + " ".join(f"{s[:4]}/{m[-1]}" for s, m in keys))
    for alpha in ALPHAS:
        cells = []
        for s, m in keys:
            r = multilevel(ESMParams(alpha=alpha, mode=m), data[s], SamplingGrid(), material).R_final
            cells.append(f"{r:5.2f}{'*' if abs(r - REFERENCE[(s, m)]) > 1e-9 else ' '}")
        print(f"{alpha:.0e}  " + " ".join(cells), flush=True)
    print("* = differs from the reported radius")


if __name__ == "__main__":
    main()
