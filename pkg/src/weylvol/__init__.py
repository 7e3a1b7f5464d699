"""Harish-Chandra flag-manifold volumes from Weyl's law, checked numerically."""

from .rootsys import (
    RootSystem,
    RootSystemError,
    RootSystemSpec,
    Weight,
    build_root_system,
    casimir,
    dominant_weights_within,
    inner,
    pairing_with_root,
    parse_group,
    weyl_dim,
    weyl_group_order,
)

__version__ = "0.1.0"
