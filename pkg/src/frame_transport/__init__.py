"""Quantum parallel transport of unitary frames and the induced classical
transport of adjoint frame vectors in su(n)."""

from .lie_algebra import (
    AlgebraElement,
    CartanPair,
    GeneratorBasis,
    StructureConstants,
    build_basis,
    cartan_pairs,
    commutator,
    expand,
    is_diagonal,
    non_cartan_pairs,
    structure_constants,
)
from .transport import (
    GeneratorPath,
    IntegratorConfig,
    NonUnitaryError,
    TransportError,
    TransportState,
    evolve,
    horizontal_project,
    step,
)
from .frame import (
    DefectSeries,
    FrameVector,
    NotHorizontalError,
    adjoint_frame,
    adjoint_matrix,
    defect_commutator,
    defect_series,
    defect_table,
    matrix_element_invariance,
)
from .scenarios import (
    HolonomyResult,
    Scenario,
    holonomy,
    nonlinearity_defect,
    random_horizontal,
    su2_cone,
)

__version__ = "0.1.0"
