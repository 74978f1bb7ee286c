"""
Electromagnetic layer built on the frame splitting.

Conventions (signature +---, orientation dt^dx^dy^dz):

    E = i_Gamma F = -E_i dx^i
    B = F_perp   = B_3 dx^dy - B_2 dx^dz + B_1 dy^dz
    D = G_perp,  H = i_Gamma G
    rho = J_perp, j = -i_Gamma J   so that J = rho - theta ^ j

Each frame only sees the constraint equations d_perp B = 0 and
d_perp D = rho on its simultaneity leaves. ``covariantize`` feeds those
frame-wise residuals through the 3-form reconstruction and recovers the
full covariant residuals dF and dG - J.

The integral laws are checked on boxes in a leaf: the closed flux of B
vanishes, the closed flux of D equals the enclosed charge, and on each
face d/dt int B = oint E and d/dt int D + int j = oint H.
"""

import logging
from dataclasses import dataclass
from typing import Callable, Dict, List, NamedTuple, Optional, Sequence, Tuple

import numpy as np
from scipy.special import roots_legendre

from .config import QuadratureControls
from .errors import DomainError
from .forms_core import (
    AffineMap,
    DifferentialForm,
    Point,
    basis_form,
    evaluate,
    exterior_derivative,
    hodge_star,
    interior_product,
    lie_derivative,
    pullback_affine,
    wedge,
)
from .frames import (
    FrameFamily,
    ReferenceFrame,
    boost_map,
    d_perp,
    leaf_pullback,
    transversal,
)
from .reconstruction import (
    Reconstructed3Form,
    TransversalSample3,
    direct_components,
    reconstruct_3form_solve,
)
from .scalars import COORDINATES, Number, ScalarField, as_scalar

logger = logging.getLogger(__name__)

VOLUME_KEY = (0, 1, 2, 3)


@dataclass(frozen=True)
class EMFieldState:
    """Faraday form F, Ampere form G and four-current J (plus the potential when known)"""

    F: DifferentialForm
    G: DifferentialForm
    J: DifferentialForm
    potential: Optional[DifferentialForm] = None

    def __post_init__(self):
        for name, form, grade in (("F", self.F, 2), ("G", self.G, 2), ("J", self.J, 3)):
            if form.grade != grade:
                raise DomainError(f"{name} must have grade {grade}, got {form.grade}")
        if self.potential is not None and self.potential.grade != 1:
            raise DomainError(f"potential must have grade 1, got {self.potential.grade}")

    @property
    def backend(self) -> str:
        backends = {self.F.backend, self.G.backend, self.J.backend}
        return backends.pop() if len(backends) == 1 else "jet"

    def pullback(self, phi: AffineMap) -> "EMFieldState":
        return EMFieldState(
            F=pullback_affine(phi, self.F),
            G=pullback_affine(phi, self.G),
            J=pullback_affine(phi, self.J),
            potential=None if self.potential is None else pullback_affine(phi, self.potential),
        )


@dataclass(frozen=True)
class FrameFields:
    """Fields one frame sees on its leaf at time ``t``"""

    t: Number
    E: DifferentialForm
    B: DifferentialForm
    D: DifferentialForm
    H: DifferentialForm
    rho: DifferentialForm
    j: DifferentialForm
    # leaf pullbacks of L_Gamma B and L_Gamma D, the time derivatives of B and D
    B_rate: DifferentialForm
    D_rate: DifferentialForm


class ConstraintResiduals(NamedTuple):
    magnetic: DifferentialForm
    gauss: DifferentialForm


# --------------------------------------------------------------------------
# Building and splitting fields
# --------------------------------------------------------------------------

def faraday_from_potential(A: DifferentialForm) -> DifferentialForm:
    """F = dA"""
    if A.grade != 1:
        raise DomainError(f"potential must be a 1-form, got grade {A.grade}")
    return exterior_derivative(A)


def constitutive_vacuum(F: DifferentialForm) -> DifferentialForm:
    """G = *F"""
    if F.grade != 2:
        raise DomainError(f"F must be a 2-form, got grade {F.grade}")
    return hodge_star(F)


def split_faraday(frame: ReferenceFrame, F: DifferentialForm) -> Tuple[DifferentialForm, DifferentialForm]:
    """(E, B) = (i_Gamma F, F_perp)"""
    return interior_product(frame.gamma_field, F), transversal(frame, F)


def split_ampere(frame: ReferenceFrame, G: DifferentialForm) -> Tuple[DifferentialForm, DifferentialForm]:
    """(H, D) = (i_Gamma G, G_perp)"""
    return interior_product(frame.gamma_field, G), transversal(frame, G)


def split_current(frame: ReferenceFrame, J: DifferentialForm) -> Tuple[DifferentialForm, DifferentialForm]:
    """(rho, j) = (J_perp, -i_Gamma J)"""
    return transversal(frame, J), -interior_product(frame.gamma_field, J)


def frame_fields(frame: ReferenceFrame, state: EMFieldState, t) -> FrameFields:
    """Pull every split field back to the leaf {theta = t}, plus the time derivatives of B and D"""
    E, B = split_faraday(frame, state.F)
    H, D = split_ampere(frame, state.G)
    rho, j = split_current(frame, state.J)
    pull = lambda form: leaf_pullback(frame, t, form)
    rate = lambda form: pull(lie_derivative(frame.gamma_field, form))
    return FrameFields(
        t=t, E=pull(E), B=pull(B), D=pull(D), H=pull(H), rho=pull(rho), j=pull(j),
        B_rate=rate(B), D_rate=rate(D),
    )


def constraint_residuals(frame: ReferenceFrame, state: EMFieldState) -> ConstraintResiduals:
    """Magnetic d_perp(F_perp) and Gauss d_perp(G_perp) - J_perp, both transversal"""
    F_perp = transversal(frame, state.F)
    G_perp = transversal(frame, state.G)
    J_perp = transversal(frame, state.J)
    return ConstraintResiduals(
        magnetic=d_perp(frame, F_perp),
        gauss=d_perp(frame, G_perp) - J_perp,
    )


def maxwell_split(frame: ReferenceFrame, F: DifferentialForm) -> Tuple[DifferentialForm, DifferentialForm]:
    """(d_perp B, L_Gamma B - d_perp E) for a 2-form split as (E, B).

    dF = theta ^ (L_Gamma B - d_perp E) + d_perp B when d(theta) = 0. For G
    the same pair reads (d_perp D, L_Gamma D - d_perp H).
    """
    E, B = split_faraday(frame, F)
    return d_perp(frame, B), lie_derivative(frame.gamma_field, B) - d_perp(frame, E)


# --------------------------------------------------------------------------
# Coordinate picture
# --------------------------------------------------------------------------

def faraday_components(F: DifferentialForm) -> Dict[str, ScalarField]:
    """E_1..E_3, B_1..B_3 read off the fiducial coordinates"""
    return {
        "E1": -F[(0, 1)],
        "E2": -F[(0, 2)],
        "E3": -F[(0, 3)],
        "B1": F[(2, 3)],
        "B2": -F[(1, 3)],
        "B3": F[(1, 2)],
    }


def coordinate_maxwell_residuals(F: DifferentialForm) -> Dict[str, ScalarField]:
    """div B and the Faraday-Lenz combinations on dy^dz, dx^dz and dx^dy"""
    c = faraday_components(F)
    d = lambda name, i: c[name].partial(i)
    return {
        "div_B": d("B1", 1) + d("B2", 2) + d("B3", 3),
        "faraday_23": d("E3", 2) - d("E2", 3) + d("B1", 0),
        "faraday_13": d("E3", 1) - d("E1", 3) - d("B2", 0),
        "faraday_12": d("E2", 1) - d("E1", 2) + d("B3", 0),
    }


# --------------------------------------------------------------------------
# Covariantization
# --------------------------------------------------------------------------

ResidualEvaluator = Callable[[ReferenceFrame, Sequence], Tuple[Number, Number]]


def state_residual_evaluator(state: EMFieldState) -> ResidualEvaluator:
    """Evaluator returning (magnetic, gauss) on a frame's spatial basis at a point.

    Residual forms are built once per frame label.
    """
    cache: Dict[int, ConstraintResiduals] = {}

    def evaluator(frame: ReferenceFrame, p: Sequence) -> Tuple[Number, Number]:
        if frame.label not in cache:
            cache[frame.label] = constraint_residuals(frame, state)
        residuals = cache[frame.label]
        basis = list(frame.spatial_basis)
        return evaluate(residuals.magnetic, basis, p), evaluate(residuals.gauss, basis, p)

    return evaluator


@dataclass(frozen=True)
class CovariantResidual:
    """Covariant residuals dF and dG - J at one point, in the fiducial basis"""

    point: Point
    dF: Reconstructed3Form
    dG_minus_J: Reconstructed3Form


def covariantize(family: FrameFamily, evaluator: ResidualEvaluator, points: Sequence[Sequence]) -> List[CovariantResidual]:
    """Assemble dF and dG - J from the four frames' constraint residuals"""
    results = []
    for p in points:
        magnetic, gauss = [], []
        for frame in family:
            m, g = evaluator(frame, p)
            magnetic.append(TransversalSample3(frame.label, m))
            gauss.append(TransversalSample3(frame.label, g))
        results.append(
            CovariantResidual(
                point=Point(*p),
                dF=reconstruct_3form_solve(magnetic, family),
                dG_minus_J=reconstruct_3form_solve(gauss, family),
            )
        )
    logger.debug(f"Covariantized residuals at {len(results)} points")
    return results


def direct_residuals(state: EMFieldState, frame: ReferenceFrame, points: Sequence[Sequence]) -> List[CovariantResidual]:
    """dF and dG - J evaluated straight from the covariant forms"""
    dF = exterior_derivative(state.F)
    dG_minus_J = exterior_derivative(state.G) - state.J
    return [
        CovariantResidual(Point(*p), direct_components(dF, frame, p), direct_components(dG_minus_J, frame, p))
        for p in points
    ]


# --------------------------------------------------------------------------
# Invariants and scenarios
# --------------------------------------------------------------------------

INVARIANT_NAMES = ("F^F", "F^*F", "F^G", "G^G", "G^*G")


def invariants(state: EMFieldState) -> Dict[str, DifferentialForm]:
    F, G = state.F, state.G
    return {
        "F^F": wedge(F, F),
        "F^*F": wedge(F, hodge_star(F)),
        "F^G": wedge(F, G),
        "G^G": wedge(G, G),
        "G^*G": wedge(G, hodge_star(G)),
    }


@dataclass(frozen=True)
class InvariantCheck:
    point: Point
    values: Dict[str, Number]
    tol: float = 0.0

    @property
    def g_wedge_g_vanishes(self) -> bool:
        return abs(self.values["G^G"]) <= self.tol

    @property
    def g_wedge_star_g_nonnegative(self) -> bool:
        return self.values["G^*G"] >= -self.tol

    @property
    def passed(self) -> bool:
        return self.g_wedge_g_vanishes and self.g_wedge_star_g_nonnegative


def invariant_checks(state: EMFieldState, points: Sequence[Sequence], tol: float = 0.0) -> List[InvariantCheck]:
    """Volume coefficients of the five invariants at each point"""
    forms = invariants(state)
    checks = []
    for p in points:
        values = {name: forms[name][VOLUME_KEY].evaluate(p) for name in INVARIANT_NAMES}
        checks.append(InvariantCheck(Point(*p), values, tol))
    return checks


def static_charge_state(phi) -> EMFieldState:
    """Charge at rest with D = -grad(phi): G spatial, F = -*G, J = dG.

    The potential is A = -phi dt, so F = dA exactly when phi is static.
    """
    phi = as_scalar(phi)
    D1, D2, D3 = (-g for g in phi.gradient()[1:])
    G = basis_form(2, 3, coefficient=D1) + basis_form(1, 3, coefficient=-D2) + basis_form(1, 2, coefficient=D3)
    F = -hodge_star(G)
    static = COORDINATES[0] not in phi.as_expr().free_symbols
    A = basis_form(0, coefficient=-phi) if static else None
    return EMFieldState(F=F, G=G, J=exterior_derivative(G), potential=A)


def convection_state(phi, axis: int, beta) -> EMFieldState:
    """The static charge seen from a frame boosted along ``axis``"""
    return static_charge_state(phi).pullback(boost_map(axis, beta))


# --------------------------------------------------------------------------
# Flux quadrature on leaves
# --------------------------------------------------------------------------

@dataclass(frozen=True)
class LeafRectangle:
    """Axis-aligned rectangle in a leaf, spanned by spatial axes a < b.

    ``position`` fixes the remaining spatial coordinate; ``orientation`` is
    +1 when du_a ^ du_b is positive on the surface.
    """

    axes: Tuple[int, int]
    lower: Tuple[float, float]
    upper: Tuple[float, float]
    position: float = 0.0
    orientation: int = 1

    def __post_init__(self):
        a, b = self.axes
        if not (1 <= a < b <= 3):
            raise DomainError(f"rectangle axes must be increasing spatial indices, got {self.axes}")
        if any(float(hi) <= float(lo) for lo, hi in zip(self.lower, self.upper)):
            raise DomainError(f"degenerate rectangle {self.lower} -> {self.upper}")

    @property
    def normal_axis(self) -> int:
        return ({1, 2, 3} - set(self.axes)).pop()


@dataclass(frozen=True)
class LeafBox:
    """Closed axis-aligned box [lower, upper] in leaf coordinates (u_1, u_2, u_3)"""

    lower: Tuple[float, float, float] = (0.0, 0.0, 0.0)
    upper: Tuple[float, float, float] = (1.0, 1.0, 1.0)

    def __post_init__(self):
        if any(float(hi) <= float(lo) for lo, hi in zip(self.lower, self.upper)):
            raise DomainError(f"degenerate box {self.lower} -> {self.upper}")

    def named_faces(self) -> List[Tuple[str, LeafRectangle]]:
        """Six faces oriented by the outward normal, named "X1+" ... "X3-" after it"""
        faces = []
        for k in (1, 2, 3):
            a, b = sorted({1, 2, 3} - {k})
            lower = (self.lower[a - 1], self.lower[b - 1])
            upper = (self.upper[a - 1], self.upper[b - 1])
            sign = (-1) ** (k - 1)
            faces.append((f"X{k}+", LeafRectangle((a, b), lower, upper, position=self.upper[k - 1], orientation=sign)))
            faces.append((f"X{k}-", LeafRectangle((a, b), lower, upper, position=self.lower[k - 1], orientation=-sign)))
        return faces

    def faces(self) -> List[LeafRectangle]:
        return [face for _, face in self.named_faces()]


def _check_leaf_form(omega: DifferentialForm, grade: int) -> None:
    if omega.grade != grade:
        raise DomainError(f"expected a leaf {grade}-form, got grade {omega.grade}")
    for key, coeff in omega.items():
        if 0 in key or COORDINATES[0] in coeff.as_expr().free_symbols:
            raise DomainError("non-leaf form: flux integrals need forms pulled back to a leaf")


def _gauss_nodes(lo, hi, n: int) -> Tuple[np.ndarray, np.ndarray]:
    nodes, weights = roots_legendre(n)
    lo, hi = float(lo), float(hi)
    half = 0.5 * (hi - lo)
    return half * nodes + 0.5 * (hi + lo), half * weights


def _check_order(n: Optional[int]) -> int:
    n = QuadratureControls.DEFAULT_ORDER if n is None else int(n)
    if n < QuadratureControls.MIN_ORDER:
        raise DomainError(f"quadrature order must be >= {QuadratureControls.MIN_ORDER}, got {n}")
    return n


def flux_integral(omega: DifferentialForm, surface: LeafRectangle, n: Optional[int] = None) -> float:
    """Tensor-product Gauss-Legendre integral of a leaf 2-form over a rectangle"""
    n = _check_order(n)
    _check_leaf_form(omega, 2)
    coeff = omega[surface.axes]
    if coeff.is_zero:
        return 0.0
    a, b = surface.axes
    ua, wa = _gauss_nodes(surface.lower[0], surface.upper[0], n)
    ub, wb = _gauss_nodes(surface.lower[1], surface.upper[1], n)
    grid_a, grid_b = np.meshgrid(ua, ub, indexing="ij")
    coords = [np.zeros_like(grid_a) for _ in range(4)]
    coords[a], coords[b] = grid_a, grid_b
    coords[surface.normal_axis] = np.full_like(grid_a, float(surface.position))
    values = coeff.to_numpy()(*coords)
    return float(surface.orientation * np.einsum("i,j,ij->", wa, wb, values))


def volume_integral(omega: DifferentialForm, box: LeafBox, n: Optional[int] = None) -> float:
    """Integral of a leaf 3-form over ``box`` with orientation du_1 ^ du_2 ^ du_3"""
    n = _check_order(n)
    _check_leaf_form(omega, 3)
    coeff = omega[(1, 2, 3)]
    if coeff.is_zero:
        return 0.0
    axes = [_gauss_nodes(box.lower[k], box.upper[k], n) for k in range(3)]
    grids = np.meshgrid(*(nodes for nodes, _ in axes), indexing="ij")
    values = coeff.to_numpy()(np.zeros_like(grids[0]), *grids)
    return float(np.einsum("i,j,k,ijk->", axes[0][1], axes[1][1], axes[2][1], values))


def closed_flux(omega: DifferentialForm, box: LeafBox, n: Optional[int] = None) -> float:
    return sum(flux_integral(omega, face, n) for face in box.faces())


def stokes_delta(omega: DifferentialForm, box: LeafBox, n: Optional[int] = None) -> float:
    """Closed-surface flux of omega minus the volume integral of d(omega)"""
    return closed_flux(omega, box, n) - volume_integral(exterior_derivative(omega), box, n)


def gauss_delta(D: DifferentialForm, rho: DifferentialForm, box: LeafBox, n: Optional[int] = None) -> float:
    """Integral Gauss law: flux of D through the box minus the enclosed charge"""
    return closed_flux(D, box, n) - volume_integral(rho, box, n)


def _edge_integral(coeff: ScalarField, surface: LeafRectangle, along: int, across: int, fixed, lo, hi, n: int) -> float:
    if coeff.is_zero:
        return 0.0
    nodes, weights = _gauss_nodes(lo, hi, n)
    coords = [np.zeros_like(nodes) for _ in range(4)]
    coords[along] = nodes
    coords[across] = np.full_like(nodes, float(fixed))
    coords[surface.normal_axis] = np.full_like(nodes, float(surface.position))
    return float(np.einsum("i,i->", weights, coeff.to_numpy()(*coords)))


def circulation(omega: DifferentialForm, surface: LeafRectangle, n: Optional[int] = None) -> float:
    """Line integral of a leaf 1-form around the boundary of ``surface``.

    The boundary is traversed so that Stokes' theorem holds for the
    surface's orientation.
    """
    n = _check_order(n)
    _check_leaf_form(omega, 1)
    a, b = surface.axes
    (a0, b0), (a1, b1) = surface.lower, surface.upper
    total = (
        _edge_integral(omega[(a,)], surface, a, b, b0, a0, a1, n)
        + _edge_integral(omega[(b,)], surface, b, a, a1, b0, b1, n)
        - _edge_integral(omega[(a,)], surface, a, b, b1, a0, a1, n)
        - _edge_integral(omega[(b,)], surface, b, a, a0, b0, b1, n)
    )
    return surface.orientation * total


def faraday_delta(B_rate: DifferentialForm, E: DifferentialForm, surface: LeafRectangle, n: Optional[int] = None) -> float:
    """Faraday law: d/dt of the flux of B through ``surface`` minus the circulation of E.

    With E = i_Gamma F the law reads d/dt int_S B = oint E.
    """
    return flux_integral(B_rate, surface, n) - circulation(E, surface, n)


def ampere_delta(
    D_rate: DifferentialForm,
    H: DifferentialForm,
    j: DifferentialForm,
    surface: LeafRectangle,
    n: Optional[int] = None,
) -> float:
    """Ampere-Maxwell law: d/dt int_S D + int_S j - oint H, zero when dG = J"""
    return flux_integral(D_rate, surface, n) + flux_integral(j, surface, n) - circulation(H, surface, n)
