"""Shared numeric tolerances and default horizons.

All tolerances are far below the box widths used anywhere downstream, so
geometric comparisons are never decided by float dust.
"""

# Gap tolerance for interval-union canonicalization and set comparisons.
EPS_GEOM = 1e-12

# Accuracy contract for branch inverses.
TOL_INV = 1e-12

# Default horizon for the orbit supremum.
DEFAULT_SUP_HORIZON = 200

# Default truncation of the discounted series; tail bound is e**(-N).
DEFAULT_SERIES_HORIZON = 40

# Default bound on return times searched during renormalization detection.
DEFAULT_MAX_RETURN = 64

# Default working resolution (must be a power of two).
DEFAULT_N_BOXES = 256

# Default cap on decomposition depth; deeper chains are reported truncated.
DEFAULT_MAX_DEPTH = 8
