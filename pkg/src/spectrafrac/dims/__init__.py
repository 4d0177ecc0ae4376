"""
Measures, tent kernels and fractal dimensions for spectrafrac
"""

from .measures import DiscreteMeasure, RestrictionSet, ball_mass, levy_distance, restrict
from .kernels import ScalingProfile, scaling_profile, v_t
from .local_dims import (
    ClassificationReport,
    DecompositionReport,
    LocalDimEstimate,
    MeasureDimReport,
    classify_mass,
    decompose,
    local_dim_bounds,
    measure_dims,
)
from .set_dims import SetRep, box_dimension, cantor_set, hausdorff_value, packing_value

__all__ = [
    "DiscreteMeasure", "RestrictionSet", "ball_mass", "levy_distance", "restrict",
    "ScalingProfile", "scaling_profile", "v_t",
    "LocalDimEstimate", "MeasureDimReport", "ClassificationReport", "DecompositionReport",
    "local_dim_bounds", "measure_dims", "classify_mass", "decompose",
    "SetRep", "cantor_set", "hausdorff_value", "packing_value", "box_dimension",
]
