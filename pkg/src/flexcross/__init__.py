"""Flexible cross-polytopes of the simplest type in E^n, S^n and H^n.

The package builds the one-parameter families generated by data
``(G, lambda, s, s')``, measures their dihedral angles, volumes and
self-intersections, and analyses the two flat positions u = 0 and u = inf.

Typical use::

    import numpy as np
    from flexcross import Space, SimplestTypeData, build, configuration

    data = SimplestTypeData(Space("spherical", 3), np.eye(3), [1, 2, 4],
                            [-1, -1, -1], [1, 1, 1])
    family = build(data)
    octahedron = configuration(family, 0.5)
"""

__version__ = "0.1.0"

from .angles import measured_dihedral, predicted_dihedral
from .combinatorics import FaceId, complex_kn, faces
from .errors import FlexcrossError
from .flexion import (
    INF,
    Configuration,
    FlexFamily,
    SimplestTypeData,
    build,
    build_dual,
    configuration,
    validate_data,
)
from .measure import (
    GeneralizedVolume,
    closed_form_volume,
    generalized_volume,
    schlafli_volume,
    sphere_volume,
)
from .spaces import EUCLIDEAN, HYPERBOLIC, SPHERICAL, Space

__all__ = [
    "EUCLIDEAN",
    "HYPERBOLIC",
    "INF",
    "SPHERICAL",
    "Configuration",
    "FaceId",
    "FlexFamily",
    "FlexcrossError",
    "GeneralizedVolume",
    "SimplestTypeData",
    "Space",
    "build",
    "build_dual",
    "closed_form_volume",
    "complex_kn",
    "configuration",
    "faces",
    "generalized_volume",
    "measured_dihedral",
    "predicted_dihedral",
    "schlafli_volume",
    "sphere_volume",
    "validate_data",
]
