"""
Inertial reference frames R = Gamma (x) theta on Minkowski spacetime.

A frame carries its clock field Gamma, the covector theta with
theta(Gamma) = 1, and a basis X_1, X_2, X_3 of ker(theta). All frame data
here is constant, so d(theta) = 0 and every leaf {theta = t} is an affine
3-plane. Forms split into a transversal part i_Gamma(theta ^ a) and a
temporal part theta ^ i_Gamma a.
"""

import logging
from dataclasses import dataclass
from typing import Iterable, List, Optional, Sequence, Tuple

import sympy as sp

from .config import FrameControlVariables, ToleranceControls
from .errors import DomainError
from .forms_core import (
    DIMENSION,
    AffineMap,
    DifferentialForm,
    Point,
    VectorField,
    coordinate_vector,
    evaluate,
    exterior_derivative,
    interior_product,
    one_form,
    pullback_affine,
    wedge,
    zero_form,
)
from .scalars import is_exact, to_rational

logger = logging.getLogger(__name__)

HIGH_PRECISION_DIGITS = 50


def parse_beta(beta) -> sp.Expr:
    """Accept ``"3/5"``, Fractions, ints or floats and check 0 < beta < 1"""
    if isinstance(beta, float):
        value = sp.Float(beta, HIGH_PRECISION_DIGITS)
    else:
        value = to_rational(beta)
    if value == 0:
        raise DomainError("non-timelike boost: beta = 0 is a degenerate boost")
    if not 0 < value < 1:
        raise DomainError("non-timelike boost")
    return value


def lorentz_gamma(beta) -> sp.Expr:
    """1/sqrt(1 - beta^2): exact for Pythagorean beta, else a 50-digit float"""
    gamma = 1 / sp.sqrt(1 - beta ** 2)
    if isinstance(gamma, sp.Rational):
        return gamma
    return sp.Float(sp.N(gamma, HIGH_PRECISION_DIGITS), HIGH_PRECISION_DIGITS)


@dataclass(frozen=True)
class ReferenceFrame:
    """Constant frame data (Gamma, theta, X_1, X_2, X_3) plus its label"""

    gamma_field: VectorField
    theta: DifferentialForm
    spatial_basis: Tuple[VectorField, VectorField, VectorField]
    label: int = 0

    @property
    def basis(self) -> Tuple[VectorField, VectorField, VectorField, VectorField]:
        return (self.gamma_field,) + tuple(self.spatial_basis)

    def basis_matrix(self) -> sp.Matrix:
        """Columns are the coordinate components of Gamma, X_1, X_2, X_3"""
        columns = [v.constant_components() for v in self.basis]
        return sp.Matrix(DIMENSION, DIMENSION, lambda i, j: columns[j][i])

    def coframe(self) -> Tuple[DifferentialForm, DifferentialForm, DifferentialForm, DifferentialForm]:
        """Dual basis (theta, alpha^1, alpha^2, alpha^3) of (Gamma, X_1, X_2, X_3)"""
        inverse = self.basis_matrix().inv()
        return tuple(one_form(list(inverse.row(i))) for i in range(DIMENSION))

    def expand(self, vector: VectorField) -> Tuple:
        """Components of a constant vector in the basis (Gamma, X_1, X_2, X_3)"""
        solution = self.basis_matrix().LUsolve(sp.Matrix(vector.constant_components()))
        return tuple(sp.nsimplify(c) if is_exact(c) else c for c in solution)

    def adapted_coordinates(self, point: Sequence) -> Tuple:
        """(leaf time, u_1, u_2, u_3) with point = t Gamma + sum_j u_j X_j"""
        return tuple(self.basis_matrix().LUsolve(sp.Matrix(list(point))))

    def leaf_immersion(self, t) -> AffineMap:
        """u -> t Gamma + u_1 X_1 + u_2 X_2 + u_3 X_3 (the time slot of u is ignored)"""
        columns = [(0,) * DIMENSION] + [x.constant_components() for x in self.spatial_basis]
        matrix = tuple(tuple(columns[j][i] for j in range(DIMENSION)) for i in range(DIMENSION))
        gamma = self.gamma_field.constant_components()
        offset = tuple(t * g for g in gamma)
        return AffineMap(matrix, offset)

    def validate(self, points: Optional[Iterable[Sequence]] = None) -> None:
        """Check theta(Gamma) = 1, theta(X_j) = 0, d(theta) = 0 and independence"""
        if self.basis_matrix().det() == 0:
            raise DomainError(f"frame {self.label}: Gamma, X_1, X_2, X_3 are linearly dependent")
        if not exterior_derivative(self.theta).is_zero:
            raise DomainError(f"frame {self.label}: d(theta) != 0")
        for point in points or [Point(0, 0, 0, 0)]:
            if not _vanishes(evaluate(self.theta, [self.gamma_field], point) - 1):
                raise DomainError(f"frame {self.label}: theta(Gamma) != 1 at {point}")
            for j, x in enumerate(self.spatial_basis, start=1):
                if not _vanishes(evaluate(self.theta, [x], point)):
                    raise DomainError(f"frame {self.label}: theta(X_{j}) != 0 at {point}")


def _vanishes(value) -> bool:
    if is_exact(value):
        return value == 0
    return abs(float(value)) < ToleranceControls.JET


def _dual_theta(gamma_field: VectorField, spatial_basis: Sequence[VectorField]) -> DifferentialForm:
    columns = [v.constant_components() for v in (gamma_field,) + tuple(spatial_basis)]
    matrix = sp.Matrix(DIMENSION, DIMENSION, lambda i, j: columns[j][i])
    if matrix.det() == 0:
        raise DomainError("frame basis is singular")
    return one_form(list(matrix.inv().row(0)))


def make_fiducial_frame() -> ReferenceFrame:
    """R_0 = d/dt (x) dt with spatial basis (d/dx, d/dy, d/dz)"""
    return ReferenceFrame(
        gamma_field=coordinate_vector(0),
        theta=one_form([1, 0, 0, 0]),
        spatial_basis=(coordinate_vector(1), coordinate_vector(2), coordinate_vector(3)),
        label=0,
    )


def make_boost_frame(base: ReferenceFrame, axis: int, beta, label: Optional[int] = None) -> ReferenceFrame:
    """Boost ``base`` along its spatial direction ``axis`` in {1, 2, 3}.

    Gamma' = g Gamma + b g X_j, X_j' = b g Gamma + g X_j, X_k' = X_k, and
    theta' is solved from the dual-basis system.
    """
    if axis not in (1, 2, 3):
        raise DomainError(f"boost axis must be 1, 2 or 3, got {axis}")
    beta = parse_beta(beta)
    gamma = lorentz_gamma(beta)
    x_j = base.spatial_basis[axis - 1]
    gamma_field = base.gamma_field * gamma + x_j * (beta * gamma)
    boosted_axis = base.gamma_field * (beta * gamma) + x_j * gamma
    spatial = tuple(boosted_axis if k == axis else base.spatial_basis[k - 1] for k in (1, 2, 3))
    theta = _dual_theta(gamma_field, spatial)
    frame = ReferenceFrame(gamma_field, theta, spatial, label=axis if label is None else label)
    logger.debug(f"Built boost frame axis={axis} beta={beta} gamma={gamma}: theta={theta}")
    return frame


def boost_map(axis: int, beta) -> AffineMap:
    """Coordinates of the unboosted frame in terms of the boosted one.

    t0 = g t + b g x_j, x0_j = b g t + g x_j, other coordinates unchanged.
    """
    if axis not in (1, 2, 3):
        raise DomainError(f"boost axis must be 1, 2 or 3, got {axis}")
    beta = parse_beta(beta)
    gamma = lorentz_gamma(beta)
    rows = [[1 if i == j else 0 for j in range(DIMENSION)] for i in range(DIMENSION)]
    rows[0][0] = gamma
    rows[0][axis] = beta * gamma
    rows[axis][0] = beta * gamma
    rows[axis][axis] = gamma
    return AffineMap(tuple(tuple(r) for r in rows))


@dataclass(frozen=True)
class FrameFamily:
    """Fiducial frame plus its boosts along x, y and z with a common beta"""

    beta: sp.Expr
    gamma: sp.Expr
    frames: Tuple[ReferenceFrame, ReferenceFrame, ReferenceFrame, ReferenceFrame]

    def __getitem__(self, label: int) -> ReferenceFrame:
        return self.frames[label]

    def __iter__(self):
        return iter(self.frames)

    def __len__(self):
        return len(self.frames)

    @property
    def fiducial(self) -> ReferenceFrame:
        return self.frames[0]

    @property
    def is_exact(self) -> bool:
        return is_exact(self.beta) and is_exact(self.gamma)

    def mutual_existence_matrix(self) -> List[List]:
        """theta_a(Gamma_b) for every ordered pair of frames"""
        origin = Point(0, 0, 0, 0)
        return [[evaluate(a.theta, [b.gamma_field], origin) for b in self.frames] for a in self.frames]

    def check_mutual_existence(self) -> bool:
        return all(value != 0 for row in self.mutual_existence_matrix() for value in row)


def make_frame_family(beta=None) -> FrameFamily:
    """The four-frame family used for covariantization (beta defaults to 3/5)"""
    if beta is None:
        beta = FrameControlVariables.DEFAULT_BETA
    beta = parse_beta(beta)
    fiducial = make_fiducial_frame()
    frames = (fiducial,) + tuple(make_boost_frame(fiducial, axis, beta) for axis in (1, 2, 3))
    family = FrameFamily(beta=beta, gamma=lorentz_gamma(beta), frames=frames)
    logger.debug(f"Frame family ready: beta={family.beta}, gamma={family.gamma}")
    return family


# --------------------------------------------------------------------------
# Splitting
# --------------------------------------------------------------------------

def decompose(frame: ReferenceFrame, a: DifferentialForm) -> Tuple[DifferentialForm, DifferentialForm]:
    """(a_perp, a_par) with a_perp = i_Gamma(theta ^ a), a_par = theta ^ i_Gamma a"""
    if a.grade == 0:
        return a, zero_form(0)
    parallel = wedge(frame.theta, interior_product(frame.gamma_field, a))
    if a.grade == DIMENSION:
        return zero_form(DIMENSION), parallel
    perpendicular = interior_product(frame.gamma_field, wedge(frame.theta, a))
    return perpendicular, parallel


def transversal(frame: ReferenceFrame, a: DifferentialForm) -> DifferentialForm:
    return decompose(frame, a)[0]


def temporal(frame: ReferenceFrame, a: DifferentialForm) -> DifferentialForm:
    return decompose(frame, a)[1]


def d_perp(frame: ReferenceFrame, a: DifferentialForm) -> DifferentialForm:
    """Transversal differential i_Gamma(theta ^ da)"""
    if a.grade >= DIMENSION - 1:
        return zero_form(min(a.grade + 1, DIMENSION))
    return interior_product(frame.gamma_field, wedge(frame.theta, exterior_derivative(a)))


def leaf_pullback(frame: ReferenceFrame, t, a: DifferentialForm) -> DifferentialForm:
    """Pull ``a`` back to the leaf {theta = t}; the result uses indices {1, 2, 3} only"""
    return pullback_affine(frame.leaf_immersion(t), a)
