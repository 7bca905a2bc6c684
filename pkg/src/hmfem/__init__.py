"""Arbitrary-order nonconforming finite elements on simplicial meshes.

For every polynomial order m and dimension n the package builds a canonical
minimal element whose degrees of freedom are face means of mixed normal
derivatives, certifies its unisolvence with exact rational arithmetic,
glues the elements into global spaces, and solves 2m-th order elliptic
model problems with the broken energy form.
"""

from .assembly import (ErrorReport, NotPositiveDefiniteError, SparseSystem,
                       apply_dirichlet, assemble_load, assemble_stiffness,
                       error_norms, solve)
from .element import (DegenerateSimplexError, DofDescriptor, ElementCertificate,
                      ElementDefinition, SimplexGeometry, SubSimplexRef,
                      UnisolvenceError, apply_dof, build_element,
                      check_bubble_property, compute_bubble, count_dofs,
                      dim_poly_space, element_certificate, enumerate_dofs,
                      layer_count, normal_frame, shape_basis)
from .mesh import (InvalidDivisionsError, MeshConformityError, MeshFormatError,
                   SimplicialMesh, UnsupportedDimensionError, l_shape_mesh,
                   read_mesh, uniform_refine, unit_cube_mesh,
                   unit_interval_mesh, unit_square_mesh, write_mesh)
from .poly import (MultiIndex, Poly, SingularSystemError, UniPoly,
                   antiderivative, bary_monomial_integral, differentiate,
                   solve_univariate_interpolation)
from .problems import (BoundaryEvaluationError, CornerSingularSolution,
                       PolySolution, example1_load, example1_solution)
from .quadrature import QuadratureRule, UnsupportedDegreeError, simplex_quadrature
from .reports import (ExperimentConfig, report_csv, report_markdown,
                      run_certify, run_convergence)
from .space import (FrameMismatchError, GlobalSpace, build_space,
                    derivative_change_matrix, interpolate)

__all__ = [name for name in dir() if not name.startswith("_")]
