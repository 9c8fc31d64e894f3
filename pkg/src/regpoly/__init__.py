"""Find every regular polygon whose vertices lie in a planar point set."""

__version__ = "0.1.0"

from .errors import (  # noqa: E402
    BadK,
    BadSkip,
    Collinear,
    DuplicatePoints,
    InfeasibleSpec,
    NoIsosceles,
    ParseError,
)
from .geometry import (  # noqa: E402
    Point,
    PointIndex,
    RegularPolygon,
    Tolerances,
    apex_angle,
    build_point_index,
    circumcenter,
    interior_angle,
    polygon_vertex,
    query_point,
)
from .large import DetectorParams, detect, detect_all, detect_large_gons, num_samples  # noqa: E402
from .oracle import enumerate_all_gons, enumerate_isosceles, isosceles_in_gon_count  # noqa: E402
from .sweep import detect_small_gons  # noqa: E402
