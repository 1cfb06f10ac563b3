"""khx: exact Khovanov and Lee homology for links given as planar diagrams."""

from .diagram import (
    Crossing,
    InvalidDiagramError,
    OrientationData,
    PlanarDiagram,
    mirror,
    orient_and_count,
    parse_diagram,
    parse_pd,
    pretzel,
    unlink,
)

__all__ = [
    "Crossing",
    "InvalidDiagramError",
    "OrientationData",
    "PlanarDiagram",
    "mirror",
    "orient_and_count",
    "parse_diagram",
    "parse_pd",
    "pretzel",
    "unlink",
]

__version__ = "0.1.0"
