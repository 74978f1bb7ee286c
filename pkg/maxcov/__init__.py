"""
maxcov - exterior calculus on Minkowski spacetime and covariantization of
Maxwell's constraint equations over a family of boosted inertial frames.
"""

from .errors import DomainError, MaxcovError, ReconstructionError, ScenarioError
from .forms_core import (
    AffineMap,
    DifferentialForm,
    Point,
    VectorField,
    basis_form,
    constant_vector,
    coordinate_vector,
    evaluate,
    exact_equal,
    exterior_derivative,
    form_equal_sampled,
    hodge_sign_table,
    hodge_star,
    inner_product,
    interior_product,
    lie_derivative,
    one_form,
    pullback_affine,
    scalar_form,
    volume_form,
    wedge,
    zero_form,
)
from .frames import (
    FrameFamily,
    ReferenceFrame,
    boost_map,
    d_perp,
    decompose,
    leaf_pullback,
    make_boost_frame,
    make_fiducial_frame,
    make_frame_family,
)
from .maxwell import (
    EMFieldState,
    FrameFields,
    LeafBox,
    LeafRectangle,
    ampere_delta,
    circulation,
    closed_flux,
    constitutive_vacuum,
    constraint_residuals,
    convection_state,
    coordinate_maxwell_residuals,
    covariantize,
    faraday_components,
    faraday_delta,
    faraday_from_potential,
    flux_integral,
    frame_fields,
    gauss_delta,
    invariant_checks,
    invariants,
    maxwell_split,
    split_ampere,
    split_current,
    split_faraday,
    state_residual_evaluator,
    static_charge_state,
    stokes_delta,
    volume_integral,
)
from .reconstruction import (
    Reconstructed2Form,
    Reconstructed3Form,
    TransversalSample2,
    TransversalSample3,
    assemble_3form,
    direct_components,
    reconstruct_2form,
    reconstruct_3form_printed,
    reconstruct_3form_solve,
    reconstruct_field,
    transversal_values,
    transversal_values_2form,
)
from .sampling import RationalSampler
from .scalars import JetField, PolynomialField, ScalarField, constant

__version__ = "0.1.0"
