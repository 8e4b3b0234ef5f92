"""Strings, bands and convolution algebras for the affine C-type gentle
algebra with nilpotent loops at both endpoints of the diagram."""

from .cartan import (
    CartanData,
    CartanError,
    Root,
    all_orientations,
    build_cartan,
    coxeter_apply,
    coxeter_matrix,
    defect,
    enumerate_positive_roots,
    euler_form,
    is_positive_root,
    orientation_str,
    parse_orientation,
)

__all__ = [
    "CartanData",
    "CartanError",
    "Root",
    "all_orientations",
    "build_cartan",
    "coxeter_apply",
    "coxeter_matrix",
    "defect",
    "enumerate_positive_roots",
    "euler_form",
    "is_positive_root",
    "orientation_str",
    "parse_orientation",
]
