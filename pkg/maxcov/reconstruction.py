"""
Pointwise reconstruction of spacetime forms from frame-wise transversal data.

A 3-form J at a point has four independent components in the fiducial
frame: J(X1, X2, X3) and the three values of i_Gamma J on the spatial pairs.
Each boosted frame only sees J on its own spatial basis, but the four
frames of a family together determine all four components. Two paths are
provided: the closed-form expressions for a boost family, and an exact
linear solve built from the frame bases. A 2-form is recovered in the same
way from frames 0, 1 and 2.
"""

import logging
from dataclasses import dataclass
from typing import List, Sequence, Tuple

import sympy as sp

from .errors import DomainError, ReconstructionError
from .forms_core import DifferentialForm, evaluate, wedge, zero_form
from .frames import FrameFamily, ReferenceFrame
from .scalars import Number, is_exact, to_rational

logger = logging.getLogger(__name__)

# Spatial pairs in the order (X2, X3), (X1, X3), (X1, X2)
PAR_PAIRS = ((2, 3), (1, 3), (1, 2))

# Spatial pairs of a 2-form in the order (X1, X2), (X1, X3), (X2, X3)
SPATIAL_PAIRS = ((1, 2), (1, 3), (2, 3))

# Unknown 3-form slots in the fiducial basis, 0 standing for Gamma
_THREE_FORM_SLOTS = ((1, 2, 3), (0, 2, 3), (0, 1, 3), (0, 1, 2))

# Unknown 2-form slots: three spatial pairs then (Gamma, X_j)
_TWO_FORM_SLOTS = SPATIAL_PAIRS + ((0, 1), (0, 2), (0, 3))


def _clean(value) -> Number:
    """Keep exact rationals, turn every other numeric value into a float"""
    if is_exact(value):
        return to_rational(value)
    return float(value)


@dataclass(frozen=True)
class TransversalSample3:
    """J evaluated on the spatial basis of one frame at one point"""

    frame_label: int
    value: Number


@dataclass(frozen=True)
class Reconstructed3Form:
    """Fiducial components of a 3-form at a point.

    ``perp_value`` is J(X1, X2, X3); ``par_values`` holds i_Gamma J on the
    pairs (X2, X3), (X1, X3), (X1, X2) in that order.
    """

    perp_value: Number
    par_values: Tuple[Number, Number, Number]

    def as_tuple(self) -> Tuple[Number, Number, Number, Number]:
        return (self.perp_value,) + tuple(self.par_values)

    def component(self, name: str) -> Number:
        return dict(zip(COMPONENT_NAMES_3, self.as_tuple()))[name]

    def is_zero(self, tol: float = 0.0) -> bool:
        return all(abs(v) <= tol for v in self.as_tuple())


COMPONENT_NAMES_3 = ("X1X2X3", "GX2X3", "GX1X3", "GX1X2")


def transversal_values(J: DifferentialForm, family: FrameFamily, p: Sequence) -> List[TransversalSample3]:
    """J(X1, X2, X3) in each frame of the family at ``p``"""
    if J.grade != 3:
        raise DomainError(f"transversal_values needs a 3-form, got grade {J.grade}")
    return [
        TransversalSample3(frame.label, _clean(evaluate(J, list(frame.spatial_basis), p)))
        for frame in family
    ]


def _ordered(samples: Sequence[TransversalSample3]) -> List[Number]:
    by_label = {s.frame_label: s.value for s in samples}
    missing = [label for label in range(4) if label not in by_label]
    if missing:
        raise DomainError(f"missing transversal samples for frames {missing}")
    return [by_label[label] for label in range(4)]


def reconstruct_3form_printed(samples: Sequence[TransversalSample3], beta, gamma) -> Reconstructed3Form:
    """Closed-form reconstruction for a boost family with parameters (beta, gamma)"""
    if beta == 0:
        raise DomainError("degenerate boost")
    s0, s1, s2, s3 = _ordered(samples)
    inv_beta = 1 / sp.sympify(beta)
    inv_gamma = 1 / sp.sympify(gamma)
    par_23 = inv_beta * (inv_gamma * s1 - s0)
    par_13 = inv_beta * (-inv_gamma * s2 + s0)
    par_12 = inv_beta * (inv_gamma * s3 - s0)
    return Reconstructed3Form(_clean(s0), (_clean(par_23), _clean(par_13), _clean(par_12)))


def _basis_expansion(family: FrameFamily, frame: ReferenceFrame) -> List[Tuple]:
    """Each spatial vector of ``frame`` written in the fiducial (Gamma, X1, X2, X3) basis"""
    return [family.fiducial.expand(x) for x in frame.spatial_basis]


def _minor(expansion: Sequence[Sequence], slots: Sequence[int]) -> sp.Expr:
    return sp.Matrix(len(slots), len(slots), lambda i, k: expansion[k][slots[i]]).det()


def three_form_system(family: FrameFamily) -> sp.Matrix:
    """4x4 matrix mapping the fiducial unknowns to the four frames' samples"""
    rows = []
    for frame in family:
        expansion = _basis_expansion(family, frame)
        rows.append([_minor(expansion, slots) for slots in _THREE_FORM_SLOTS])
    return sp.Matrix(rows)


def reconstruct_3form_solve(samples: Sequence[TransversalSample3], family: FrameFamily) -> Reconstructed3Form:
    """Solve the multilinear expansion of the four frames' samples exactly"""
    system = three_form_system(family)
    if system.det() == 0:
        raise ReconstructionError(f"reconstruction system is singular for beta={family.beta}")
    rhs = sp.Matrix([sp.sympify(v) for v in _ordered(samples)])
    solution = system.LUsolve(rhs)
    logger.debug(f"3-form system {system.tolist()} solved to {list(solution)}")
    return Reconstructed3Form(_clean(solution[0]), tuple(_clean(v) for v in solution[1:]))


def direct_components(J: DifferentialForm, frame: ReferenceFrame, p: Sequence) -> Reconstructed3Form:
    """Evaluate J directly on the basis of ``frame``, the reconstruction oracle"""
    if J.grade != 3:
        raise DomainError(f"direct_components needs a 3-form, got grade {J.grade}")
    basis = frame.basis
    values = [_clean(evaluate(J, [basis[i] for i in slots], p)) for slots in _THREE_FORM_SLOTS]
    return Reconstructed3Form(values[0], tuple(values[1:]))


def assemble_3form(rec: Reconstructed3Form, frame: ReferenceFrame) -> DifferentialForm:
    """Constant 3-form theta ^ J_par + J_perp carrying the reconstructed values"""
    theta, *alphas = frame.coframe()
    result = zero_form(3)
    result = result + wedge(wedge(alphas[0], alphas[1]), alphas[2]) * rec.perp_value
    for (i, j), value in zip(PAR_PAIRS, rec.par_values):
        result = result + wedge(theta, wedge(alphas[i - 1], alphas[j - 1])) * value
    return result


def reconstruct_field(
    J: DifferentialForm,
    family: FrameFamily,
    points: Sequence[Sequence],
    method: str = "solve",
) -> List[Reconstructed3Form]:
    """Pointwise reconstruction of J over ``points`` from its frame samples"""
    results = []
    for p in points:
        samples = transversal_values(J, family, p)
        if method == "printed":
            results.append(reconstruct_3form_printed(samples, family.beta, family.gamma))
        elif method == "solve":
            results.append(reconstruct_3form_solve(samples, family))
        else:
            raise ValueError(f"Unknown reconstruction method {method!r}")
    return results


# --------------------------------------------------------------------------
# 2-forms from three frames
# --------------------------------------------------------------------------

@dataclass(frozen=True)
class TransversalSample2:
    """F on the spatial pairs (X1, X2), (X1, X3), (X2, X3) of one frame"""

    frame_label: int
    values: Tuple[Number, Number, Number]


@dataclass(frozen=True)
class Reconstructed2Form:
    """Fiducial components of a 2-form: spatial F(X_i, X_j) and temporal i_Gamma F(X_j)"""

    spatial_values: Tuple[Number, Number, Number]
    temporal_values: Tuple[Number, Number, Number]


def transversal_values_2form(
    F: DifferentialForm,
    family: FrameFamily,
    p: Sequence,
    frames: Sequence[int] = (0, 1, 2),
) -> List[TransversalSample2]:
    if F.grade != 2:
        raise DomainError(f"transversal_values_2form needs a 2-form, got grade {F.grade}")
    samples = []
    for label in frames:
        basis = family[label].spatial_basis
        values = tuple(_clean(evaluate(F, [basis[i - 1], basis[j - 1]], p)) for i, j in SPATIAL_PAIRS)
        samples.append(TransversalSample2(label, values))
    return samples


def reconstruct_2form(samples: Sequence[TransversalSample2], family: FrameFamily) -> Reconstructed2Form:
    """Recover all six fiducial components of a 2-form from three frames.

    Nine equations in six unknowns; the system is consistent with full
    column rank, so the normal equations give the unique solution.
    """
    if family.beta == 0:
        raise DomainError("degenerate boost")
    rows, rhs = [], []
    for sample in samples:
        expansion = _basis_expansion(family, family[sample.frame_label])
        for (i, j), value in zip(SPATIAL_PAIRS, sample.values):
            pair = (expansion[i - 1], expansion[j - 1])
            rows.append([_minor(pair, slots) for slots in _TWO_FORM_SLOTS])
            rhs.append(sp.sympify(value))
    system = sp.Matrix(rows)
    normal = system.T * system
    if normal.det() == 0:
        raise ReconstructionError(
            f"2-form system has rank {system.rank()} < 6 for frames {[s.frame_label for s in samples]}"
        )
    solution = normal.LUsolve(system.T * sp.Matrix(rhs))
    values = [_clean(v) for v in solution]
    return Reconstructed2Form(tuple(values[:3]), tuple(values[3:]))


def direct_components_2form(F: DifferentialForm, frame: ReferenceFrame, p: Sequence) -> Reconstructed2Form:
    basis = frame.basis
    values = [_clean(evaluate(F, [basis[i], basis[j]], p)) for i, j in _TWO_FORM_SLOTS]
    return Reconstructed2Form(tuple(values[:3]), tuple(values[3:]))
