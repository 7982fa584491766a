"""Numerical laboratory for jet hierarchies of torus Kahler geodesics."""

__version__ = "0.1.0"

from .errors import ConsistencyError, GeodesicDomainError, NumericError
from .timegrid import CoefficientSeries, TimeGrid, make_grid
from .second_jet import (
    CausalClass,
    SecondJetBoundary,
    SecondJetPath,
    classify,
    connectable,
    distance,
    epsilon_from_boundary,
    solve_bvp,
)
from .jet_propagation import (
    JetHierarchy,
    ModeProblem,
    ModeSolution,
    ObstructionReport,
    compatibility_check,
    propagate,
    solve_mode,
    source_K1,
)
from .counterexample import (
    TorusPotential,
    build_h,
    build_h_tilde,
    cb_norm_report,
    jets_at_origin,
    obstruction_demo,
)
from .pde_crosscheck import (
    CrosscheckReport,
    GridSolution,
    crosscheck_report,
    extract_second_jets,
    solve_geodesic,
)

__all__ = [
    "__version__",
    "ConsistencyError",
    "GeodesicDomainError",
    "NumericError",
    "CoefficientSeries",
    "TimeGrid",
    "make_grid",
    "CausalClass",
    "SecondJetBoundary",
    "SecondJetPath",
    "classify",
    "connectable",
    "distance",
    "epsilon_from_boundary",
    "solve_bvp",
    "JetHierarchy",
    "ModeProblem",
    "ModeSolution",
    "ObstructionReport",
    "compatibility_check",
    "propagate",
    "solve_mode",
    "source_K1",
    "TorusPotential",
    "build_h",
    "build_h_tilde",
    "cb_norm_report",
    "jets_at_origin",
    "obstruction_demo",
    "CrosscheckReport",
    "GridSolution",
    "crosscheck_report",
    "extract_second_jets",
    "solve_geodesic",
]
