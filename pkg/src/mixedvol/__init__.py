"""mixedvol: mixed volumes of 3D convex polytopes, their spectral metric
graphs, and executable equality/stability/rigidity checks for the Minkowski
quadratic inequality, including the lower-dimensional (hyperplane) pipeline.
"""

from .bodies import (Ball, Body, Edge, Facet, Polytope, SupportEvaluator,
                     TrivialityReport, affine_dim, approximate_ball,
                     as_unit_vector, classify_trivial, cube, enclosing_radii,
                     hull, minkowski_sum, random_hull, segment, shear,
                     simplex, support_data, truncate_vertex, unit, unit_ball)
from .errors import (BadMesh, BadParam, BadSpec, DegenerateInput,
                     DimensionError, InsufficientSpectrum, MixedVolError,
                     NegativeMass, NumericalFailure, QuadratureFailure,
                     SingularGM, ZeroDenominator)
from .extremal import (EqualityCertificate, RigidityReport, StabilityReport,
                       StabilityWitness, certify_equality_fulldim,
                       rigidity_check, stability_witness,
                       weak_stability_check)
from .graph import (DiscretizedForm, GraphEdge, KernelReport, MetricGraph,
                    MuMeasure, PoincareReport, SpectrumResult,
                    StructuralReport, assemble, build_graph,
                    edge_poincare_check, form_value, integrate_on_arcs,
                    kernel_analysis, sbm_and_mu, spectrum, structural_checks)
from .lowerdim import (ClusterReport, CylinderLimitReport, LowerDimProblem,
                       LowerEqualityCertificate, LowerSpectrumReport,
                       assemble_lowerdim, certify_equality_lowerdim,
                       cylinder_limit_check, explicit_spectrum,
                       lowerdim_setup, sbm_lowerdim, verify_spectrum)
from .measures import (DeficitReport, GeodesicArc, SphericalMeasure,
                       area_measure, classical_functionals,
                       integrate_against_measure, merge_atoms,
                       mixed_area_measure, mixed_volume,
                       mixed_volume_via_measure, mv3, quadratic_deficit,
                       vbbm_conewise, volume)
from .quadrature import (ArcFrame, adaptive_gauss, arc_between,
                         arc_sample_nodes, integrate_evaluator,
                         integrate_pair, integrate_with_breakpoints,
                         product_integral)

__version__ = "0.1.0"
