"""Command-line front end.

Every command takes the torus parameters ``--n`` and ``--N`` and writes its
results into ``--output`` (default: current directory) together with a
``manifest.json`` echoing the configuration and the library version.
Exit codes: 0 success, 2 usage or parse errors, 3 numerical failure.
"""

from __future__ import annotations

import argparse
import json
import re
import sys
from dataclasses import asdict, dataclass
from dataclasses import field as dc_field
from pathlib import Path

import numpy as np

from . import __version__
from .chains import Cochain
from .complex import dump_complex, validate_complex
from .errors import DECError, ParseError, RankDecisionError, SolverError
from .hodge import decompose, harmonic_basis_1forms, harmonic_spectrum
from .operators import (apply_d, apply_delta, hodge_star, laplacian, write_operator)
from .torus import (TorusMesh, build_torus, curl, delta_cell_to_face, delta_face_to_edge,
                    div1, div2, divergence_theorem_check, grad, read_cell_list, read_field,
                    stokes_check, write_field)

COMMANDS = ("build", "validate", "apply", "decompose", "check-stokes", "check-divergence",
            "harmonic", "export-operators")
OPS = ("d", "delta", "star", "laplacian", "grad", "curl", "div2", "div1",
       "delta-cell-to-face", "delta-face-to-edge")
_GENERATOR = re.compile(r"^(random|randint)(\d)form$")
DEFAULT_TOL = 1e-10


@dataclass
class RunConfig:
    command: str
    n: int
    N: int
    op: str | None = None
    field: str | None = None
    faces: str | None = None
    cells: str | None = None
    k: int | None = None
    mode: str = "float"
    seed: int = 0
    tol: float = DEFAULT_TOL
    output: str = "."
    outputs: list = dc_field(default_factory=list)


class UsageError(DECError):
    pass


def generate_field(mesh: TorusMesh, name: str, seed: int) -> Cochain:
    """Named seeded generators: ``random<k>form`` draws standard normals,
    ``randint<k>form`` integers in [-10, 10], both from numpy's PCG64."""
    m = _GENERATOR.match(name)
    k = int(m.group(2))
    if k > mesh.n:
        raise UsageError(f"no {k}-forms on a {mesh.n}-torus")
    rng = np.random.default_rng(seed)
    size = mesh.count(k)
    if m.group(1) == "random":
        return Cochain(k, rng.standard_normal(size))
    return Cochain(k, rng.integers(-10, 11, size, dtype=np.int64))


def _load_field(cfg: RunConfig, mesh: TorusMesh) -> Cochain:
    if cfg.field is None:
        raise UsageError("--field is required")
    if _GENERATOR.match(cfg.field):
        omega = generate_field(mesh, cfg.field, cfg.seed)
    else:
        path = Path(cfg.field)
        omega = read_field(mesh, path.read_text(), str(path))
    if cfg.k is not None and omega.dim != cfg.k:
        raise UsageError(f"--k {cfg.k} given but the field is a {omega.dim}-form")
    if cfg.mode == "exact" and not np.issubdtype(omega.values.dtype, np.integer):
        raise UsageError("exact mode needs an integer field")
    return omega


class _Writer:
    def __init__(self, cfg: RunConfig):
        self.cfg = cfg
        self.root = Path(cfg.output)
        self.root.mkdir(parents=True, exist_ok=True)

    def text(self, name: str, content: str):
        (self.root / name).write_text(content)
        self.cfg.outputs.append(name)

    def json(self, name: str, obj):
        self.text(name, json.dumps(obj, indent=2, sort_keys=True) + "\n")

    def manifest(self):
        cfg = asdict(self.cfg)
        outputs = cfg.pop("outputs")
        cfg.pop("output")
        body = {"tool": "cubedec", "version": __version__, "config": cfg, "outputs": outputs}
        (self.root / "manifest.json").write_text(json.dumps(body, indent=2, sort_keys=True) + "\n")


def _cmd_build(cfg, mesh, out):
    out.text("complex.txt", dump_complex(mesh.complex))
    summary = {"counts": [mesh.count(k) for k in range(mesh.n + 1)],
               "euler_characteristic": mesh.complex.euler_characteristic()}
    out.json("summary.json", summary)
    return summary


def _cmd_validate(cfg, mesh, out):
    report = validate_complex(mesh.complex).as_dict()
    out.json("validation.json", report)
    return report


def _apply(op: str, omega: Cochain, mesh: TorusMesh, bundle):
    if op == "d":
        return apply_d(omega, bundle)
    if op == "delta":
        return apply_delta(omega, bundle)
    if op == "star":
        return hodge_star(omega, bundle)
    if op == "laplacian":
        L = laplacian(bundle, omega.dim)
        return Cochain(omega.dim, L @ omega.values)
    stencils = {"grad": grad, "curl": curl, "div2": div2, "div1": div1,
                "delta-cell-to-face": delta_cell_to_face, "delta-face-to-edge": delta_face_to_edge}
    return stencils[op](mesh, omega)


def _cmd_apply(cfg, mesh, out):
    if cfg.op is None:
        raise UsageError("--op is required")
    omega = _load_field(cfg, mesh)
    bundle = mesh.operators(cfg.mode)
    if cfg.mode == "float":
        omega = Cochain(omega.dim, omega.values.astype(np.float64), omega.primal)
    result = _apply(cfg.op, omega, mesh, bundle)
    out.text("result.txt", write_field(mesh, result))
    return {"op": cfg.op, "input_degree": omega.dim, "output_degree": result.dim,
            "output_primal": result.primal}


def _cmd_decompose(cfg, mesh, out):
    omega = _load_field(cfg, mesh)
    split = decompose(omega, mesh.operators("float"))
    norm2 = omega.norm() ** 2
    ortho = split.orthogonality()
    recon = (split.reconstruction() - Cochain(omega.dim, omega.values.astype(float))).norm()
    tol = min(cfg.tol, DEFAULT_TOL)
    report = {
        "degree": omega.dim,
        "norm": omega.norm(),
        "reconstruction_error": recon,
        "orthogonality": ortho,
        "tolerance": tol,
        "orthogonal": all(abs(v) <= tol * max(norm2, 1e-300) for v in ortho.values()),
        "reconstructs": recon <= tol * max(omega.norm(), 1e-300),
        "solver_residual": split.residual_norm,
        "solver_iterations": split.solver_iterations,
    }
    out.text("exact.txt", write_field(mesh, split.exact))
    out.text("coexact.txt", write_field(mesh, split.coexact))
    out.text("harmonic.txt", write_field(mesh, split.harmonic))
    out.json("report.json", report)
    return report


def _check_report(check):
    return {"lhs": check.lhs, "rhs": check.rhs, "equal": check.equal,
            "same_sign": check.same_sign, "boundary_cells": len(check.boundary)}


def _cmd_stokes(cfg, mesh, out):
    if cfg.faces is None:
        raise UsageError("--faces is required")
    j = _load_field(cfg, mesh)
    path = Path(cfg.faces)
    faces = read_cell_list(mesh, path.read_text(), "faces", str(path))
    report = _check_report(stokes_check(mesh, j, faces))
    out.json("stokes.json", report)
    return report


def _cmd_divergence(cfg, mesh, out):
    if cfg.cells is None:
        raise UsageError("--cells is required")
    psi = _load_field(cfg, mesh)
    path = Path(cfg.cells)
    cells = read_cell_list(mesh, path.read_text(), "cells", str(path))
    report = _check_report(divergence_theorem_check(mesh, psi, cells))
    out.json("divergence.json", report)
    return report


def _cmd_harmonic(cfg, mesh, out):
    k = 1 if cfg.k is None else cfg.k
    decision = harmonic_spectrum(mesh.operators("float"), k)
    report = {"degree": k, "dimension": decision.dimension, "threshold": decision.threshold,
              "largest_zero": decision.largest_zero, "smallest_nonzero": decision.smallest_nonzero}
    if k == 1:
        for i, field in enumerate(harmonic_basis_1forms(mesh), start=1):
            out.text(f"harmonic_{i}.txt", write_field(mesh, field))
    out.json("harmonic.json", report)
    return report


def _cmd_export(cfg, mesh, out):
    bundle = mesh.operators(cfg.mode)
    C, n = mesh.complex, mesh.n
    for k in range(1, n + 1):
        out.text(f"boundary_{k}.txt", write_operator(bundle.boundary[k], "boundary", k, C, k - 1, k))
    for k in range(n):
        out.text(f"d_{k}.txt", write_operator(bundle.d[k], "d", k, C, k + 1, k))
    for k in range(1, n + 1):
        out.text(f"delta_{k}.txt", write_operator(bundle.delta[k], "delta", k, C, k - 1, k))
    for k in range(n + 1):
        out.text(f"star_{k}.txt", write_operator(bundle.star[k], "star", k, C, -1, k))
    return {"files": len(cfg.outputs)}


HANDLERS = {"build": _cmd_build, "validate": _cmd_validate, "apply": _cmd_apply,
            "decompose": _cmd_decompose, "check-stokes": _cmd_stokes,
            "check-divergence": _cmd_divergence, "harmonic": _cmd_harmonic,
            "export-operators": _cmd_export}


def run(cfg: RunConfig, stdout=None) -> int:
    """Execute one command; returns the process exit status."""
    stdout = stdout or sys.stdout
    try:
        mesh = build_torus(cfg.n, cfg.N)
        out = _Writer(cfg)
        result = HANDLERS[cfg.command](cfg, mesh, out)
        out.manifest()
    except (ParseError, UsageError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except (SolverError, RankDecisionError) as exc:
        detail = getattr(exc, "residual", None)
        if detail is None:
            detail = getattr(exc, "gap", None)
        print(f"numerical failure: {exc} (detail: {detail})", file=sys.stderr)
        return 3
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except DECError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    print(json.dumps(result, sort_keys=True), file=stdout)
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="cubedec", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=f"cubedec {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)
    for name in COMMANDS:
        p = sub.add_parser(name)
        p.add_argument("--n", type=int, required=True, help="torus dimension (1-3)")
        p.add_argument("--N", type=int, required=True, help="torus side length (>= 3)")
        p.add_argument("--output", default=".", help="directory for result files")
        p.add_argument("--mode", choices=("exact", "float"), default="float")
        p.add_argument("--seed", type=int, default=0)
        if name in ("apply", "decompose", "check-stokes", "check-divergence"):
            p.add_argument("--field", help="field table, or randomKform / randintKform")
            p.add_argument("--k", type=int)
        if name == "harmonic":
            p.add_argument("--k", type=int)
        if name == "apply":
            p.add_argument("--op", choices=OPS)
        if name == "decompose":
            p.add_argument("--tol", type=float, default=DEFAULT_TOL,
                           help="report tolerance; values above the default are ignored")
        if name == "check-stokes":
            p.add_argument("--faces", help="rows 'x_1 .. x_n type sign'")
        if name == "check-divergence":
            p.add_argument("--cells", help="rows 'x_1 .. x_n sign'")
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    cfg = RunConfig(**{k: v for k, v in vars(args).items() if k in RunConfig.__dataclass_fields__})
    return run(cfg)


if __name__ == "__main__":
    sys.exit(main())
