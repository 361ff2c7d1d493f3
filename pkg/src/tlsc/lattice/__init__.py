from .basis import (LatticeBasis, d4_basis, e8_basis, leech_basis, load_basis, named_basis,
                    parse_matrix, zn_basis)
from .cvp import DimensionCapError, babai, closest_vector, enumerate_ball, nearest_point
from .quotient import (BoxFit, BoxTooSmallError, GroupStructure, minimality_certificate,
                       orthogonal_fit, orthogonal_step, quotient_structure, structure_from_Q)
from .snf import SingularMatrixError, invariant_factors, smith_normal_form

__all__ = [
    "LatticeBasis", "d4_basis", "e8_basis", "leech_basis", "load_basis", "named_basis",
    "parse_matrix", "zn_basis", "DimensionCapError", "babai", "closest_vector",
    "enumerate_ball", "nearest_point", "BoxFit", "BoxTooSmallError", "GroupStructure",
    "minimality_certificate", "orthogonal_fit", "orthogonal_step", "quotient_structure",
    "structure_from_Q", "SingularMatrixError", "invariant_factors", "smith_normal_form",
]
