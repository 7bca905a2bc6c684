"""Command line interface.

Subcommands: certify (exact element certificates over a range), element
(one element's functional layout and certificate), mesh (write a domain
triangulation), space (global space statistics over a mesh file), and
solve (convergence study with CSV and markdown output).

Exit codes: 0 on success, 2 when certification fails, 3 when a solver run
fails.  Solve options may come from a flat key=value config file, with
command line flags taking precedence.
"""

from __future__ import annotations

import argparse
import json
import sys

from .element import UnisolvenceError, build_element, element_certificate
from .exact import rational_str
from .mesh import (InvalidDivisionsError, l_shape_mesh, read_mesh,
                   unit_square_mesh, write_mesh)
from .assembly import NotPositiveDefiniteError
from .problems import BoundaryEvaluationError
from .reports import (ExperimentConfig, report_markdown, run_certify,
                      run_convergence)
from .space import build_space


def _parse_config_file(path) -> dict:
    out = {}
    with open(path) as fh:
        for line in fh:
            line = line.split("#", 1)[0].strip()
            if not line:
                continue
            if "=" not in line:
                raise ValueError(f"bad config line: {line!r}")
            key, value = (s.strip() for s in line.split("=", 1))
            out[key] = value
    return out


def _cmd_certify(args) -> int:
    ok = run_certify(args.m_max, args.n_max)
    return 0 if ok else 2


def _cmd_element(args) -> int:
    try:
        cert = element_certificate(args.m, args.n)
    except UnisolvenceError as err:
        print(f"FAIL {err}", file=sys.stderr)
        return 2
    element = build_element(args.m, args.n)
    if args.emit == "json":
        payload = {
            "m": args.m,
            "n": args.n,
            "dofs": [{
                "layer": d.layer,
                "k": d.face.codim,
                "vertices": list(d.face.vertices),
                "alpha": list(d.alpha),
            } for d in element.dofs],
            "bubbles": [[rational_str(c) for c in b.coeffs]
                        for b in element.bubbles],
            "det": rational_str(cert.det),
        }
        print(json.dumps(payload, indent=2))
        return 0
    print(f"element m={args.m} n={args.n}")
    print(f"  functionals: {cert.num_dofs}")
    print(f"  shape space dimension: {cert.space_dim}")
    print(f"  certificate determinant: {rational_str(cert.det)}")
    for i, b in enumerate(element.bubbles, start=1):
        coeffs = ", ".join(rational_str(c) for c in b.coeffs)
        print(f"  bubble layer {i}: [{coeffs}]")
    for d in element.dofs:
        print(f"  layer {d.layer} codim {d.face.codim} "
              f"face {d.face.vertices} alpha {d.alpha}")
    return 0


def _cmd_mesh(args) -> int:
    try:
        if args.domain == "square":
            mesh = unit_square_mesh(args.divisions)
        else:
            mesh = l_shape_mesh(args.divisions)
    except InvalidDivisionsError as err:
        print(f"error: {err}", file=sys.stderr)
        return 1
    write_mesh(mesh, args.out)
    print(f"{args.domain} divisions={args.divisions}: "
          f"{mesh.num_vertices} vertices, {mesh.num_cells} cells -> {args.out}")
    return 0


def _cmd_space(args) -> int:
    mesh = read_mesh(args.mesh)
    element = build_element(args.m, args.n)
    space = build_space(element, mesh)
    nb = int(space.boundary_dofs.sum())
    print(f"space m={args.m} n={args.n} over {args.mesh}")
    print(f"  cells: {mesh.num_cells}, vertices: {mesh.num_vertices}")
    print(f"  global functionals: {space.ndofs} ({nb} on the boundary)")
    print(f"  congruence classes: {len(space.classes)}")
    return 0


def _cmd_solve(args) -> int:
    cfg = {}
    if args.config:
        cfg = _parse_config_file(args.config)

    def pick(name, cast, default):
        flag = getattr(args, name)
        if flag is not None:
            return flag
        if name in cfg:
            return cast(cfg[name])
        return default

    example = pick("example", int, 1)
    m = pick("m", int, 1)
    levels = pick("levels", int, 4)
    base = pick("mesh_divisions", int, 4)
    csv_path = pick("csv", str, None)
    quad_degree = pick("quad_degree", int, None)
    scalar_path = pick("scalar_path", str, "exact")
    try:
        config = ExperimentConfig(
            example=example, m=m,
            levels=[base << i for i in range(levels)],
            csv_path=csv_path, quad_degree=quad_degree,
            scalar_path=scalar_path)
        report = run_convergence(config)
    except (NotPositiveDefiniteError, BoundaryEvaluationError,
            UnisolvenceError) as err:
        print(f"solver failure: {err}", file=sys.stderr)
        return 3
    except ValueError as err:
        print(f"error: {err}", file=sys.stderr)
        return 1
    sys.stdout.write(report_markdown(report))
    if csv_path:
        print(f"csv written to {csv_path}")
    return 0


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(
        prog="hmfem",
        description="arbitrary-order nonconforming simplicial elements")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("certify", help="exact unisolvence certificates")
    p.add_argument("--m-max", type=int, required=True)
    p.add_argument("--n-max", type=int, required=True)
    p.set_defaults(fn=_cmd_certify)

    p = sub.add_parser("element", help="inspect one element")
    p.add_argument("--m", type=int, required=True)
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--emit", choices=("text", "json"), default="text")
    p.set_defaults(fn=_cmd_element)

    p = sub.add_parser("mesh", help="write a domain triangulation")
    p.add_argument("--domain", choices=("square", "lshape"), required=True)
    p.add_argument("--divisions", type=int, required=True)
    p.add_argument("--out", required=True)
    p.set_defaults(fn=_cmd_mesh)

    p = sub.add_parser("space", help="global space statistics")
    p.add_argument("--m", type=int, required=True)
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--mesh", required=True)
    p.set_defaults(fn=_cmd_space)

    p = sub.add_parser("solve", help="run a convergence study")
    p.add_argument("--example", type=int, choices=(1, 2))
    p.add_argument("--m", type=int)
    p.add_argument("--levels", type=int, help="number of refinement levels")
    p.add_argument("--mesh-divisions", type=int, dest="mesh_divisions",
                   help="divisions of the coarsest mesh (default 4)")
    p.add_argument("--csv", help="write the error table as CSV")
    p.add_argument("--config", help="key=value config file")
    p.add_argument("--quad-degree", type=int, dest="quad_degree")
    p.add_argument("--scalar-path", choices=("exact", "double"),
                   dest="scalar_path")
    p.set_defaults(fn=_cmd_solve)

    args = parser.parse_args(argv)
    return args.fn(args)


def entry():
    raise SystemExit(main())


if __name__ == "__main__":
    entry()
