"""Shape-complexity scoring for point-cloud clusters.

The pipeline triangulates a 2D point cloud, splits it into clusters using
Delaunay edge-length statistics, extracts and orients each cluster's boundary,
fits closed cubic B-splines to the boundary loops and integrates squared
curvature along them.
"""

from .errors import (
    DegenerateGeometryError,
    InputError,
    NumericalError,
    ShapeScoreError,
)
from .geometry import Point, PointCloud, in_circumcircle, orient2d
from .triangulate import Triangulation, edges_of, triangulate
from .cluster import (
    BoundaryLoop,
    ClusterPartition,
    EdgeClass,
    EdgeStats,
    TetraComplex,
    classify_edges,
    edge_stats,
    extract_boundary_edges,
    extract_boundary_faces_3d,
    form_clusters,
    orient_cycles,
)
from .spline import (
    KnotVector,
    SplineCurve,
    SplineSurface,
    basis,
    basis_derivative,
    basis_second_derivative,
    eval_curve,
    eval_curve_derivatives,
    eval_surface,
    surface_partials,
)
from .fit import FitConfig, FitResult, chord_parametrize, fit_closed_curve, normalize_unit_volume
from .curvature import (
    CurvatureSample,
    FundamentalForms,
    ShapeScore,
    fundamental_forms,
    gaussian_mean,
    plane_curvature,
    principal_curvatures,
    shape_score_curve,
    shape_score_surface,
)
from .pipeline import PipelineConfig, run_pipeline

__version__ = "0.1.0"
