"""Experiment orchestration: certification sweeps and convergence tables.

run_certify prints one row of exact evidence per element; run_convergence
drives mesh sequences through assembly, solve, and error measurement and
renders the result as CSV and markdown.  All output is a pure function of
the configuration, so reruns are byte identical.
"""

from __future__ import annotations

import math
import sys
from dataclasses import dataclass

from .assembly import (ErrorReport, apply_dirichlet, assemble_load,
                       assemble_stiffness, error_norms, solve)
from .element import UnisolvenceError, build_element, element_certificate
from .exact import rational_str
from .mesh import l_shape_mesh, unit_square_mesh
from .problems import CornerSingularSolution, example1_load, example1_solution
from .space import build_space


@dataclass
class ExperimentConfig:
    """One convergence study: an example problem and a mesh sequence."""

    example: int
    m: int
    levels: list[int]
    n: int = 2
    csv_path: str | None = None
    quad_degree: int | None = None
    scalar_path: str = "exact"

    def __post_init__(self):
        if self.example not in (1, 2):
            raise ValueError("example must be 1 or 2")
        if self.n != 2:
            raise ValueError("convergence studies are planar")
        if self.m < 1:
            raise ValueError("m must be positive")
        if self.scalar_path not in ("exact", "double"):
            raise ValueError("scalar_path must be 'exact' or 'double'")
        levels = [int(x) for x in self.levels]
        if not levels or levels[0] < 1:
            raise ValueError("need at least one positive level")
        if any(b != levels[0] << i for i, b in enumerate(levels)):
            raise ValueError("levels must double from the first entry")
        if self.example == 2 and any(x % 2 for x in levels):
            raise ValueError("the corner domain needs even divisions")
        self.levels = levels


def run_convergence(config: ExperimentConfig, log=None) -> ErrorReport:
    """Run one study and return its error report (CSV written if asked)."""
    element = build_element(config.m, config.n)
    if config.example == 1:
        exact = example1_solution(config.m)
        load = example1_load(config.m)
        boundary = None
        mesher = unit_square_mesh
    else:
        exact = CornerSingularSolution(config.m)
        load = None
        boundary = exact
        mesher = l_shape_mesh
    method = "exact" if config.scalar_path == "exact" else "quadrature"
    report = ErrorReport(config.m)
    for inv_h in config.levels:
        mesh = mesher(inv_h)
        space = build_space(element, mesh)
        system = assemble_stiffness(space, method=method)
        if load is not None:
            system.rhs = assemble_load(space, load,
                                       quad_degree=config.quad_degree)
        reduced = apply_dirichlet(system, space, boundary)
        solve(reduced)
        errs = error_norms(space, reduced.solution, exact,
                           quad_degree=config.quad_degree)
        report.rows.append({"inv_h": inv_h, "errors": errs,
                            "ndofs": space.ndofs,
                            "residual": reduced.residual})
        if log:
            log(f"1/h={inv_h}: {space.ndofs} dofs, "
                f"residual {reduced.residual:.2e}")
    if config.csv_path:
        with open(config.csv_path, "w") as fh:
            fh.write(report_csv(report))
    return report


def _norm_name(k: int) -> str:
    return "L2" if k == 0 else f"H{k}"


def report_csv(report: ErrorReport) -> str:
    """Error and order columns, 5 significant digits, orders to 2 places."""
    ks = sorted(report.rows[0]["errors"])
    header = (["inv_h"] + [f"{_norm_name(k)}_err" for k in ks]
              + [f"{_norm_name(k)}_order" for k in ks])
    lines = [",".join(header)]
    orders = report.orders()
    for row, orow in zip(report.rows, orders):
        cells = [str(row["inv_h"])]
        cells += [f"{row['errors'][k]:.4e}" for k in ks]
        cells += [f"{orow[k]:.2f}" if k in orow else "" for k in ks]
        lines.append(",".join(cells))
    return "\n".join(lines) + "\n"


def report_markdown(report: ErrorReport) -> str:
    """Markdown table with an error and order column pair per norm."""
    ks = sorted(report.rows[0]["errors"])
    header = ["1/h"]
    for k in ks:
        header += [f"{_norm_name(k)} error", "order"]
    lines = ["| " + " | ".join(header) + " |",
             "|" + "---|" * len(header)]
    orders = report.orders()
    for row, orow in zip(report.rows, orders):
        cells = [str(row["inv_h"])]
        for k in ks:
            cells.append(f"{row['errors'][k]:.4e}")
            cells.append(f"{orow[k]:.2f}" if k in orow else "--")
        lines.append("| " + " | ".join(cells) + " |")
    return "\n".join(lines) + "\n"


def run_certify(m_max: int, n_max: int, out=None) -> bool:
    """Certify every element with m <= m_max, n <= n_max; True if all hold.

    Each row reports the counts, the exact determinant of the functional
    matrix, and the exact bubble integrals; any failure is printed and
    turns the result False.
    """
    write = (out or sys.stdout).write
    ok = True
    for n in range(1, n_max + 1):
        for m in range(1, m_max + 1):
            try:
                cert = element_certificate(m, n)
            except UnisolvenceError as err:
                ok = False
                write(f"m={m} n={n} FAIL {err}\n")
                continue
            det = rational_str(cert.det)
            if len(det) > 40:
                det = det[:37] + "..."
            bubbles = " ".join(rational_str(v) for v in cert.bubble_integrals)
            write(f"m={m} n={n} dofs={cert.num_dofs} dim={cert.space_dim} "
                  f"det={det} bubbles=[{bubbles}] OK\n")
    return ok
