"""Definable sets, breadth, shatter functions and the explicit VC witnesses."""
from .region import (CellSet, Region, UnsupportedRegionError, anchored_arc, arc,
                     coset, coset_key, empty, format_region, full, intersect_all,
                     points, region_complement, region_difference, region_equal,
                     region_intersect, region_is_empty, region_subset, region_union)
from .breadth import (FAMILIES, BreadthReport, SetFamily, breadth_check,
                      check_regions, minimal_cover, omega_formula)
from .shatter import (SIGMA_TEXT, ShatterError, ShatterReport, ShatterRow,
                      binomial_lower, loglog_slope, random_basis, sampled_traces,
                      shatter_exact_unary, shatter_report, sigma_formula, trace)
from .constructions import (ALPHA0, ICT_MAX_N, RATIO, IctPattern, SharpnessReport,
                            build_ict_pattern, build_sharpness_instance, ict_sequence,
                            ict_table, sharpness_basis)

__all__ = [name for name in dir() if not name.startswith("_")]
