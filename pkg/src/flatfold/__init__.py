"""Exactly solvable statistical mechanics of flat-foldable origami tessellations.

Crease configurations of quadrilateral tilings are staggered odd 8-vertex
models.  The package evaluates them three ways: brute-force enumeration on
small tori (:mod:`flatfold.enumeration`), Pfaffians of the dimer problem
(:mod:`flatfold.dimer`) and closed-form free energies
(:mod:`flatfold.integrands`).  On top of these sit the phase-transition
conditions, the lattice-gas equations of state, the three-colouring of faces
and the symmetric sixteen-vertex model.

Hot loops are compiled with numba when it is importable; setting
``FLATFOLD_DISABLE_NUMBA=1`` selects the pure-numpy paths.
"""

from ._accel import numba_enabled
from .dimer import finite_Z, momentum_determinant, thermo_free_energy, vertex_to_bond
from .enumeration import LatticeShape, count_flat_foldable, enumerate_density, enumerate_Z
from .integrands import (
    barreto_free_energy,
    evaluate_free_energy,
    kite_spectrum,
    kite_Z,
    miura_integrand,
    square_integrands,
    trapezoid_integrand,
)
from .latticegas import coloring_density, coloring_pressure, density_barreto, density_miura_trapezoid, equation_of_state
from .model import (
    CpKind,
    CreaseAssignmentWeights,
    CreaseState,
    DefectFugacity,
    EvenVertexWeights,
    OddVertexWeights,
    StaggeredModel,
    Staggering,
    VertexNeighborhood,
    apply_crease_weights,
    classify_vertex,
    free_fermion_residual,
    maekawa_ok,
    symmetric_defect_weights,
)
from .transitions import locate_critical, transition_residuals
from .coloring import count_colorings, creases_to_coloring, coloring_to_creases
from .sixteen import SixteenVertexWeights, even_ff_free_energy, weak_graph_transform

__version__ = "0.1.0"
