"""Command-line front end and file formats.

Verbs: ``forward`` (make a far-field dataset), ``invert`` (one indicator
field), ``multilevel`` (radius halving search) and ``selftest``.

Exit codes: 0 ok, 1 selftest failure, 2 forward residual too large,
3 unparsable input, 4 configuration mismatch.
"""

from __future__ import annotations

import argparse
import json
import sys
import time
from dataclasses import dataclass, field, replace
from pathlib import Path

import numpy as np

from .disk_kernels import DiskSpec, rigid_disk_farfield_at, trace_fourier_coeffs
from .elastic_core import ConfigurationError, ElasticFarField, Material, PlaneWave, uniform_angles
from .esm import (
    ESMParams,
    SamplingGrid,
    build_operator,
    esm_reconstruct,
    multilevel,
    solve_at_point,
    solve_direct,
)
from .forward_mfs import (
    DEFAULT_BC,
    BoundaryCondition,
    MFSConfig,
    MFSError,
    ShapeSpec,
    add_noise,
    mfs_farfield,
    mfs_solve,
)

EXIT_OK, EXIT_SELFTEST, EXIT_RESIDUAL, EXIT_PARSE, EXIT_MISMATCH = 0, 1, 2, 3, 4
DEFAULT_SEED = 20240917
FARFIELD_COLUMNS = ("j", "theta", "re_up", "im_up", "re_us", "im_us")


class ParseError(ValueError):
    def __init__(self, row: int, message: str):
        super().__init__(f"row {row}: {message}")
        self.row = row


class MismatchError(ValueError):
    """Inputs are individually valid but do not fit together."""


def _fmt(x: float) -> str:
    return f"{x:.17g}"


# ---------------------------------------------------------------- far-field files

def write_farfield(path, ff: ElasticFarField, meta: dict | None = None) -> None:
    meta = {**ff.meta, **(meta or {})}
    lines = [f"# M: {ff.m}"]
    for key in sorted(meta):
        lines.append(f"# {key}: {json.dumps(meta[key])}")
    lines.append("# " + ",".join(FARFIELD_COLUMNS))
    for j, (t, p, s) in enumerate(zip(ff.directions, ff.up, ff.us), start=1):
        lines.append(",".join([str(j), _fmt(t), _fmt(p.real), _fmt(p.imag), _fmt(s.real), _fmt(s.imag)]))
    Path(path).write_text("\n".join(lines) + "\n")


def read_farfield(path) -> ElasticFarField:
    """Parse a far-field CSV; errors name the 1-based line number."""
    meta, rows, declared_m = {}, [], None
    for lineno, raw in enumerate(Path(path).read_text().splitlines(), start=1):
        line = raw.strip()
        if not line:
            continue
        if line.startswith("#"):
            body = line[1:].strip()
            key, sep, val = body.partition(":")
            if not sep:
                continue
            key, val = key.strip(), val.strip()
            if key == "M":
                try:
                    declared_m = int(val)
                except ValueError:
                    raise ParseError(lineno, f"bad M value {val!r}") from None
            else:
                try:
                    meta[key] = json.loads(val)
                except json.JSONDecodeError:
                    meta[key] = val
            continue
        parts = line.split(",")
        if len(parts) != len(FARFIELD_COLUMNS):
            raise ParseError(lineno, f"expected {len(FARFIELD_COLUMNS)} fields, got {len(parts)}")
        try:
            j = int(parts[0])
            vals = [float(p) for p in parts[1:]]
        except ValueError as exc:
            raise ParseError(lineno, str(exc)) from None
        if j != len(rows) + 1:
            raise ParseError(lineno, f"index {j} out of sequence (expected {len(rows) + 1})")
        if not np.all(np.isfinite(vals)):
            raise ParseError(lineno, "non-finite value")
        rows.append(vals)
    if not rows:
        raise ParseError(0, "no data rows")
    arr = np.array(rows)
    m = arr.shape[0]
    if declared_m is not None and declared_m != m:
        raise ParseError(0, f"header declares M={declared_m} but file has {m} rows")
    if np.max(np.abs(arr[:, 0] - uniform_angles(m))) > 1e-12:
        raise ParseError(int(np.argmax(np.abs(arr[:, 0] - uniform_angles(m)))) + 1,
                         "angles are not the uniform grid 2 pi (j-1) / M")
    return ElasticFarField(arr[:, 1] + 1j * arr[:, 2], arr[:, 3] + 1j * arr[:, 4], meta=meta)


# ---------------------------------------------------------------- indicator files

def write_indicator(csv_path, json_path, field_, params: ESMParams) -> dict:
    img = field_.as_image()
    Path(csv_path).write_text("\n".join(",".join(_fmt(v) for v in row) for row in img) + "\n")
    record = {
        "z_star": [float(v) for v in field_.z_star],
        "radius": params.probe_radius,
        "min_raw_norm": float(field_.raw_norms[field_.argmin]),
        "mode": params.mode,
        "alpha": params.alpha,
    }
    if json_path is not None:
        Path(json_path).write_text(json.dumps(record, indent=2) + "\n")
    return record


def read_indicator(csv_path) -> np.ndarray:
    rows = []
    for lineno, line in enumerate(Path(csv_path).read_text().splitlines(), start=1):
        if line.strip():
            try:
                rows.append([float(v) for v in line.split(",")])
            except ValueError as exc:
                raise ParseError(lineno, str(exc)) from None
    return np.array(rows)


def write_pgm(path, image: np.ndarray) -> None:
    """8-bit P5 heatmap; [min, 1] maps linearly onto [0, 255], top row = largest y."""
    lo = float(image.min())
    span = 1.0 - lo
    scaled = (image - lo) / span if span > 0 else np.zeros_like(image)
    pix = np.clip(np.rint(255 * scaled), 0, 255).astype(np.uint8)[::-1]
    h, w = pix.shape
    Path(path).write_bytes(f"P5\n{w} {h}\n255\n".encode() + pix.tobytes())


def read_pgm(path) -> np.ndarray:
    data = Path(path).read_bytes()
    fields, pos = [], 0
    while len(fields) < 4:
        while data[pos:pos + 1].isspace():
            pos += 1
        start = pos
        while not data[pos:pos + 1].isspace():
            pos += 1
        fields.append(data[start:pos])
    if fields[0] != b"P5":
        raise ParseError(1, "not a binary PGM")
    w, h = int(fields[1]), int(fields[2])
    return np.frombuffer(data[pos + 1:pos + 1 + w * h], dtype=np.uint8).reshape(h, w)


# ---------------------------------------------------------------- configuration

@dataclass
class RunConfig:
    lam: float = 2.0
    mu: float = 1.0
    omega: float = float(np.pi)
    theta: float = float(np.pi / 3)
    ap: float = 1.0
    as_: float = 1.0
    m: int = 52
    mode: str = "ipf"
    alpha: float = 1e-5
    radius: float = 0.6
    r0: float = 2.4
    r_floor: float = 0.15
    grid: SamplingGrid = field(default_factory=SamplingGrid)
    seed: int = DEFAULT_SEED
    workers: int = 1

    @property
    def material(self) -> Material:
        return Material(self.lam, self.mu, self.omega)

    @property
    def plane_wave(self) -> PlaneWave:
        return PlaneWave(self.theta, self.ap, self.as_)

    def esm_params(self, radius=None) -> ESMParams:
        return ESMParams(alpha=self.alpha, probe_radius=self.radius if radius is None else radius,
                         mode=self.mode, m_directions=self.m)


def config_from_args(args) -> RunConfig:
    """Collect whichever RunConfig fields the parsed command defines."""
    known = {k: v for k, v in vars(args).items() if k in RunConfig.__dataclass_fields__}
    return RunConfig(**known)


def _pair(text: str):
    try:
        x, y = (float(v) for v in text.split(","))
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected 'x,y', got {text!r}") from None
    return (x, y)


def _grid(text: str) -> SamplingGrid:
    try:
        x0, x1, y0, y1, h = (float(v) for v in text.split(","))
    except ValueError:
        raise argparse.ArgumentTypeError("grid is 'xmin,xmax,ymin,ymax,step'") from None
    return SamplingGrid(x0, x1, y0, y1, h)


def _mode(text: str) -> str:
    norm = text.replace("-", "_").lower()
    if norm not in ("ipp_p", "ipp_s", "ipf"):
        raise argparse.ArgumentTypeError("mode must be ipp-p, ipp-s or ipf")
    return norm


class _Parser(argparse.ArgumentParser):
    """Bad flags are a configuration problem (exit 4), not a residual failure."""

    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_MISMATCH, f"{self.prog}: error: {message}\n")


def _common(p: argparse.ArgumentParser) -> None:
    p.add_argument("--lam", type=float, default=2.0)
    p.add_argument("--mu", type=float, default=1.0)
    p.add_argument("--omega", type=float, default=float(np.pi))
    p.add_argument("--directions", type=int, default=52, dest="m")


def _inverse_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("data", help="far-field CSV written by 'forward'")
    p.add_argument("--mode", type=_mode, default="ipf")
    p.add_argument("--alpha", type=float, default=1e-5)
    p.add_argument("--grid", type=_grid, default=SamplingGrid())
    p.add_argument("--workers", type=int, default=1)


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="elastic-esm", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    f = sub.add_parser("forward", help="generate a far-field dataset")
    _common(f)
    f.add_argument("--shape", choices=("pear", "peanut", "kite", "disk"), default="pear")
    f.add_argument("--radius", type=float, default=1.0, help="disk radius")
    f.add_argument("--center", type=_pair, default=(-2.0, 3.0))
    f.add_argument("--bc", choices=("dirichlet", "neumann", "impedance"), default=None,
                   help="default: the condition the shape carries in the reference experiments")
    f.add_argument("--sigma", type=float, default=None)
    f.add_argument("--theta", type=float, default=float(np.pi / 3), help="incidence angle")
    f.add_argument("--ap", type=float, default=1.0)
    f.add_argument("--as", type=float, default=1.0, dest="as_")
    f.add_argument("--method", choices=("mfs", "series"), default="mfs",
                   help="'series' is the analytic rigid-disk solution (disk + dirichlet only)")
    f.add_argument("--noise", type=float, default=0.0)
    f.add_argument("--seed", type=int, default=DEFAULT_SEED)
    f.add_argument("--max-residual", type=float, default=1e-6)
    f.add_argument("--out", required=True)

    i = sub.add_parser("invert", help="single-level indicator field")
    _common(i)
    _inverse_flags(i)
    i.add_argument("--radius", type=float, default=0.6, help="probe disk radius")
    i.add_argument("--out", required=True, help="indicator CSV")
    i.add_argument("--json", dest="json_out", default=None)
    i.add_argument("--pgm", default=None)

    ml = sub.add_parser("multilevel", help="radius-halving search")
    _common(ml)
    _inverse_flags(ml)
    ml.add_argument("--r0", type=float, default=2.4)
    ml.add_argument("--r-floor", type=float, default=0.15)
    ml.add_argument("--out", required=True, help="JSON trace")

    st = sub.add_parser("selftest", help="built-in consistency checks")
    st.add_argument("--corrupt-dps", action="store_true", help=argparse.SUPPRESS)
    return parser


# ---------------------------------------------------------------- commands

def cmd_forward(args) -> int:
    cfg = config_from_args(args)
    material, pw = cfg.material, cfg.plane_wave
    shape = ShapeSpec(args.shape, args.radius, tuple(args.center))
    bc = DEFAULT_BC[args.shape] if args.bc is None else BoundaryCondition(args.bc)
    if args.sigma is not None:
        if bc.kind != "impedance":
            raise MismatchError("--sigma only applies to the impedance condition")
        bc = BoundaryCondition("impedance", args.sigma)
    meta = {"shape": shape.kind, "bc": bc.kind, "sigma": bc.sigma, "lam": args.lam, "mu": args.mu,
            "omega": args.omega, "theta_inc": args.theta, "ap": args.ap, "as": args.as_,
            "center": list(shape.offset), "method": args.method}
    if shape.kind == "disk":
        meta["radius"] = shape.radius

    if args.method == "series":
        if shape.kind != "disk" or bc.kind != "dirichlet":
            raise MismatchError("the series method covers only the rigid (dirichlet) disk")
        up, us = rigid_disk_farfield_at(material, DiskSpec(shape.offset, shape.radius), pw,
                                        uniform_angles(args.m))
        ff = ElasticFarField(up, us)
    else:
        sol = mfs_solve(shape, bc, pw, material, MFSConfig.for_shape(shape.kind))
        meta["residual"] = sol.residual
        if sol.residual > args.max_residual:
            print(f"forward: MFS residual {sol.residual:.3e} exceeds {args.max_residual:g} "
                  f"(condition estimate {sol.meta['cond']:.2e})", file=sys.stderr)
            return EXIT_RESIDUAL
        ff = mfs_farfield(sol, material, args.m)
    if args.noise > 0:
        ff = add_noise(ff, args.noise, args.seed)
        meta.update(noise=args.noise, seed=args.seed)
    write_farfield(args.out, ElasticFarField(ff.up, ff.us), meta)
    return EXIT_OK


def _load_for_inversion(args) -> tuple:
    cfg = config_from_args(args)
    data = read_farfield(args.data)
    if data.m != cfg.m:
        raise MismatchError(f"data has M={data.m} directions but --directions is {cfg.m}")
    needed = {"ipp_p": [data.up], "ipp_s": [data.us], "ipf": [data.up, data.us]}[cfg.mode]
    if any(not np.any(v) for v in needed):
        raise MismatchError(f"mode {cfg.mode} needs a far-field part that is identically zero in the data")
    return data, cfg


def cmd_invert(args) -> int:
    data, cfg = _load_for_inversion(args)
    params = cfg.esm_params()
    _, _, field_ = esm_reconstruct(params, data, cfg.grid, cfg.material, cfg.workers)
    record = write_indicator(args.out, args.json_out, field_, params)
    if args.pgm:
        write_pgm(args.pgm, field_.as_image())
    print(json.dumps(record))
    return EXIT_OK


def cmd_multilevel(args) -> int:
    data, cfg = _load_for_inversion(args)
    res = multilevel(cfg.esm_params(cfg.r0), data, cfg.grid, cfg.material, cfg.r0, cfg.r_floor, cfg.workers)
    out = {
        "trace": [{"level": j, "R": r, "z": [float(v) for v in z]} for j, (z, r) in enumerate(res.trace)],
        "z_final": [float(v) for v in res.z_final],
        "R_final": res.R_final,
        "stopped_by": res.stopped_by,
        "mode": cfg.mode,
        "alpha": cfg.alpha,
    }
    Path(args.out).write_text(json.dumps(out, indent=2) + "\n")
    print(json.dumps({k: out[k] for k in ("z_final", "R_final", "stopped_by")}))
    return EXIT_OK


# ---------------------------------------------------------------- selftest

def _check_wronskian():
    from .specfun import bessel_j, bessel_y

    worst = 0.0
    n = np.arange(61)
    for x in (0.25, 1.0, np.pi / 2 * 2.4, np.pi * 2.4, 50.0):
        j, y = bessel_j(n, x), bessel_y(n, x)
        dj = bessel_j(n - 1, x) - n / x * j
        dy = bessel_y(n - 1, x) - n / x * y
        w = j * dy - dj * y
        worst = max(worst, float(np.max(np.abs(w / (2 / (np.pi * x)) - 1))))
    return worst, 1e-10


def _check_jacobi_anger():
    from scipy.special import jv

    material = Material()
    R, theta_d = 1.3, 0.7
    n, f_nu, f_tau = trace_fourier_coeffs(material, R, PlaneWave(theta_d, 1.0, 0.0), 40)
    z = material.kp * R
    c = 0.5 * (1j ** (n - 1) * jv(n - 1, z) + 1j ** (n + 1) * jv(n + 1, z))
    s = (1j ** (n - 1) * jv(n - 1, z) - 1j ** (n + 1) * jv(n + 1, z)) / 2j
    rot = np.exp(-1j * n * theta_d)
    return float(max(np.max(np.abs(f_nu - c * rot)), np.max(np.abs(f_tau + s * rot)))), 1e-12


def _check_disk_oracle():
    material, pw = Material(), PlaneWave()
    shape = ShapeSpec("disk", 1.0)
    sol = mfs_solve(shape, BoundaryCondition("dirichlet"), pw, material)
    ff = mfs_farfield(sol, material, 52)
    up, us = rigid_disk_farfield_at(material, DiskSpec(shape.offset, 1.0), pw, uniform_angles(52))
    return float(max(np.max(np.abs(ff.up - up)), np.max(np.abs(ff.us - us)))), 1e-6


def _check_adjoint(corrupt: bool):
    from .elastic_core import weighted_inner_product

    material = Material()
    op = build_operator(ESMParams(mode="ipf", probe_radius=0.6), material)
    if corrupt:
        op = replace(op, weights=np.ones_like(op.weights))
    rng = np.random.default_rng(DEFAULT_SEED)
    m = op.size // 2
    worst = 0.0
    for _ in range(5):
        g = rng.standard_normal(op.size) + 1j * rng.standard_normal(op.size)
        h = rng.standard_normal(op.size) + 1j * rng.standard_normal(op.size)
        K = op.matrix_at(rng.uniform(-3, 3, 2))
        Kg, Ksh = K @ g, op.adjoint(K) @ h
        lhs = weighted_inner_product((Kg[:m], Kg[m:]), (h[:m], h[m:]), material)
        rhs = weighted_inner_product((g[:m], g[m:]), (Ksh[:m], Ksh[m:]), material)
        worst = max(worst, abs(lhs - rhs) / abs(lhs))
    return float(worst), 1e-12


def _check_fast_path():
    material = Material()
    rng = np.random.default_rng(DEFAULT_SEED + 1)
    worst = 0.0
    for mode in ("ipp_p", "ipf"):
        op = build_operator(ESMParams(mode=mode, probe_radius=0.6), material)
        for _ in range(10):
            z = rng.uniform(-5, 5, 2)
            f = rng.standard_normal(op.size) + 1j * rng.standard_normal(op.size)
            g1, _ = solve_at_point(op, z, f, 1e-5)
            g2, _ = solve_direct(op, z, f, 1e-5)
            worst = max(worst, float(np.linalg.norm(g1 - g2) / np.linalg.norm(g2)))
    return worst, 1e-10


def _check_disk_end_to_end():
    material, pw = Material(), PlaneWave()
    up, us = rigid_disk_farfield_at(material, DiskSpec((-2.0, 3.0), 1.0), pw, uniform_angles(52))
    z, _, _ = esm_reconstruct(ESMParams(mode="ipf", probe_radius=1.2), ElasticFarField(up, us))
    return float(np.hypot(z[0] + 2, z[1] - 3)), 0.15


def run_selftest(corrupt_dps: bool = False, stream=sys.stdout) -> bool:
    checks = [
        ("bessel wronskian (rel)", _check_wronskian),
        ("jacobi-anger trace coefficients", _check_jacobi_anger),
        ("mfs vs series, rigid disk", _check_disk_oracle),
        ("weighted adjoint identity (rel)", lambda: _check_adjoint(corrupt_dps)),
        ("fast path vs dense solve (rel)", _check_fast_path),
        ("disk end-to-end |z* - c|", _check_disk_end_to_end),
    ]
    ok_all = True
    t_start = time.perf_counter()
    for name, fn in checks:
        t0 = time.perf_counter()
        try:
            value, tol = fn()
            ok = bool(value <= tol)
            detail = f"{value:.3e} <= {tol:g}"
        except Exception as exc:  # a crashing check is a failing check
            ok, detail = False, f"{type(exc).__name__}: {exc}"
        ok_all &= ok
        print(f"{'PASS' if ok else 'FAIL'}  {name:34s} {detail}  ({time.perf_counter() - t0:.1f}s)", file=stream)
    print(f"{'ALL PASS' if ok_all else 'FAILURES'}  total {time.perf_counter() - t_start:.1f}s", file=stream)
    return ok_all


def cmd_selftest(args) -> int:
    return EXIT_OK if run_selftest(args.corrupt_dps) else EXIT_SELFTEST


COMMANDS = {"forward": cmd_forward, "invert": cmd_invert, "multilevel": cmd_multilevel,
            "selftest": cmd_selftest}


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return COMMANDS[args.command](args)
    except ParseError as exc:
        print(f"parse error: {exc}", file=sys.stderr)
        return EXIT_PARSE
    except (MismatchError, ConfigurationError, ValueError) as exc:
        print(f"configuration mismatch: {exc}", file=sys.stderr)
        return EXIT_MISMATCH
    except MFSError as exc:
        print(f"forward solver failure: {exc}", file=sys.stderr)
        return EXIT_RESIDUAL


if __name__ == "__main__":
    sys.exit(main())
