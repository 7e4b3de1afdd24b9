"""Renormalized area of minimal surfaces in static asymptotically hyperbolic 3-manifolds."""

from .models import BoundaryData, HorowitzMyers, Hyperbolic3, PrescribedFG, WarpedTorus, from_config
from .surfaces import BoundaryCurve, GraphSurface, solve_minimal_graph
from .renarea import RenAFit, renarea_closed_form, renormalized_area
from .flow import FlowFamily, VariationReport, flow_integrate
from .rigidity import ProfileReport, profile_scan

__all__ = [
    "BoundaryCurve",
    "BoundaryData",
    "FlowFamily",
    "GraphSurface",
    "HorowitzMyers",
    "Hyperbolic3",
    "PrescribedFG",
    "ProfileReport",
    "RenAFit",
    "VariationReport",
    "WarpedTorus",
    "flow_integrate",
    "from_config",
    "profile_scan",
    "renarea_closed_form",
    "renormalized_area",
    "solve_minimal_graph",
]
