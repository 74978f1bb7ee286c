"""
Graded exterior algebra of differential forms on R^4.

Coordinates are ordered (t, x, y, z) with index 0 the time coordinate.
A form stores only its non-zero coefficients, keyed by strictly increasing
multi-indices. The Minkowski metric has signature (+, -, -, -) and the
orientation is dt^dx^dy^dz; Hodge-star signs are solved from the defining
relation a ^ *b = <a, b> vol rather than tabulated by hand.
"""

import itertools
import logging
from dataclasses import dataclass
from functools import lru_cache
from typing import Dict, Iterable, Iterator, List, Mapping, NamedTuple, Optional, Sequence, Tuple, Union

import numpy as np
import sympy as sp
from sympy.combinatorics import Permutation

from .errors import DomainError
from .scalars import (
    JET,
    POLYNOMIAL,
    Number,
    PolynomialField,
    ScalarField,
    as_scalar,
    is_exact,
    to_rational,
)

logger = logging.getLogger(__name__)

DIMENSION = 4
SIGNATURE = (1, -1, -1, -1)
COORDINATE_NAMES = ("t", "x", "y", "z")

MultiIndex = Tuple[int, ...]


class Point(NamedTuple):
    """A spacetime point (t, x, y, z); exact rationals or floats"""

    t: Number
    x: Number
    y: Number
    z: Number

    @property
    def is_exact(self) -> bool:
        return all(is_exact(c) for c in self)


def permutation_sign(sequence: Sequence[int]) -> int:
    """Sign of the permutation sorting ``sequence``; 0 when an entry repeats"""
    if len(set(sequence)) != len(sequence):
        return 0
    if len(sequence) < 2:
        return 1
    ranks = sorted(range(len(sequence)), key=lambda i: sequence[i])
    return Permutation(ranks).signature()


def sort_indices(indices: Sequence[int]) -> Tuple[int, MultiIndex]:
    """Return (sign, increasing multi-index) for a wedge of coordinate covectors"""
    return permutation_sign(indices), tuple(sorted(indices))


def _check_key(key: Sequence[int], grade: int) -> MultiIndex:
    key = tuple(int(i) for i in key)
    if len(key) != grade:
        raise DomainError(f"Multi-index {key} does not match grade {grade}")
    if any(i < 0 or i >= DIMENSION for i in key):
        raise DomainError(f"Multi-index {key} leaves {{0, 1, 2, 3}}")
    if any(a >= b for a, b in zip(key, key[1:])):
        raise DomainError(f"Multi-index {key} is not strictly increasing")
    return key


class DifferentialForm:
    """A grade-k form: sparse map from increasing multi-indices to ScalarFields.

    Instances are immutable. Absent keys mean a zero coefficient and zero
    coefficients are never stored.
    """

    __slots__ = ("_grade", "_coeffs")

    def __init__(self, grade: int, coeffs: Optional[Mapping[Sequence[int], object]] = None):
        if not 0 <= grade <= DIMENSION:
            raise DomainError(f"grade {grade} outside [0, {DIMENSION}]")
        cleaned: Dict[MultiIndex, ScalarField] = {}
        for key, value in (coeffs or {}).items():
            key = _check_key(key, grade)
            value = as_scalar(value)
            if key in cleaned:
                value = cleaned[key] + value
            cleaned[key] = value
        self._grade = grade
        self._coeffs = {k: v for k, v in sorted(cleaned.items()) if not v.is_zero}

    @property
    def grade(self) -> int:
        return self._grade

    @property
    def coeffs(self) -> Dict[MultiIndex, ScalarField]:
        return dict(self._coeffs)

    def items(self) -> Iterator[Tuple[MultiIndex, ScalarField]]:
        return iter(self._coeffs.items())

    def keys(self) -> List[MultiIndex]:
        return list(self._coeffs)

    def __getitem__(self, key: Sequence[int]) -> ScalarField:
        return self._coeffs.get(tuple(key), PolynomialField.zero())

    def __len__(self) -> int:
        return len(self._coeffs)

    @property
    def is_zero(self) -> bool:
        return not self._coeffs

    @property
    def backend(self) -> str:
        if all(isinstance(v, PolynomialField) for v in self._coeffs.values()):
            return POLYNOMIAL
        return JET

    @property
    def support(self) -> Tuple[int, ...]:
        """Coordinate indices that appear in some non-zero key"""
        return tuple(sorted({i for key in self._coeffs for i in key}))

    def map_coefficients(self, fn) -> "DifferentialForm":
        return DifferentialForm(self._grade, {k: fn(v) for k, v in self._coeffs.items()})

    def evaluate_coefficients(self, point: Sequence) -> Dict[MultiIndex, Number]:
        return {k: v.evaluate(point) for k, v in self._coeffs.items()}

    def _same_grade(self, other: "DifferentialForm", op: str) -> None:
        if self._grade != other.grade:
            raise DomainError(f"Cannot {op} forms of grade {self._grade} and {other.grade}")

    def __add__(self, other):
        if not isinstance(other, DifferentialForm):
            return NotImplemented
        self._same_grade(other, "add")
        merged = dict(self._coeffs)
        for key, value in other.items():
            merged[key] = merged[key] + value if key in merged else value
        return DifferentialForm(self._grade, merged)

    def __neg__(self):
        return self.map_coefficients(lambda v: -v)

    def __sub__(self, other):
        if not isinstance(other, DifferentialForm):
            return NotImplemented
        return self + (-other)

    def __mul__(self, scalar):
        if isinstance(scalar, DifferentialForm):
            return NotImplemented
        scalar = as_scalar(scalar)
        return self.map_coefficients(lambda v: v * scalar)

    __rmul__ = __mul__

    def __xor__(self, other):
        if not isinstance(other, DifferentialForm):
            return NotImplemented
        return wedge(self, other)

    def __eq__(self, other):
        if not isinstance(other, DifferentialForm):
            return NotImplemented
        return exact_equal(self, other)

    __hash__ = None

    def __repr__(self):
        return f"DifferentialForm({self._grade}, {{{', '.join(f'{k}: {v.as_expr()}' for k, v in self._coeffs.items())}}})"

    def __str__(self):
        if not self._coeffs:
            return "0"
        parts = []
        for key, value in self._coeffs.items():
            basis = "^".join(f"d{COORDINATE_NAMES[i]}" for i in key) or "1"
            parts.append(f"({value.as_expr()})*{basis}")
        return " + ".join(parts)


def zero_form(grade: int) -> DifferentialForm:
    return DifferentialForm(grade)


def basis_form(*indices: int, coefficient=1) -> DifferentialForm:
    """``coefficient * dx^{i1} ^ ... ^ dx^{ik}`` for any order of indices"""
    sign, key = sort_indices(indices)
    if sign == 0:
        return zero_form(len(indices))
    return DifferentialForm(len(key), {key: as_scalar(coefficient) * sign})


def scalar_form(value) -> DifferentialForm:
    return DifferentialForm(0, {(): as_scalar(value)})


def one_form(components: Sequence) -> DifferentialForm:
    """sum_i c_i dx^i"""
    return DifferentialForm(1, {(i,): c for i, c in enumerate(components)})


def volume_form() -> DifferentialForm:
    return basis_form(0, 1, 2, 3)


@dataclass(frozen=True)
class VectorField:
    """Contravariant field sum_i v^i d/dx^i with ScalarField components"""

    components: Tuple[ScalarField, ScalarField, ScalarField, ScalarField]

    def __post_init__(self):
        if len(self.components) != DIMENSION:
            raise DomainError(f"A vector field needs {DIMENSION} components")
        object.__setattr__(self, "components", tuple(as_scalar(c) for c in self.components))

    def __getitem__(self, index: int) -> ScalarField:
        return self.components[index]

    @property
    def is_constant(self) -> bool:
        return all(getattr(c, "is_constant", False) for c in self.components)

    def constant_components(self) -> Tuple:
        if not self.is_constant:
            raise DomainError("vector field is not constant")
        return tuple(c.constant_value() for c in self.components)

    def evaluate(self, point: Sequence) -> Tuple[Number, ...]:
        return tuple(c.evaluate(point) for c in self.components)

    def __add__(self, other: "VectorField") -> "VectorField":
        return VectorField(tuple(a + b for a, b in zip(self.components, other.components)))

    def __sub__(self, other: "VectorField") -> "VectorField":
        return VectorField(tuple(a - b for a, b in zip(self.components, other.components)))

    def __mul__(self, scalar) -> "VectorField":
        scalar = as_scalar(scalar)
        return VectorField(tuple(c * scalar for c in self.components))

    __rmul__ = __mul__

    def __eq__(self, other):
        if not isinstance(other, VectorField):
            return NotImplemented
        return all(a == b for a, b in zip(self.components, other.components))

    __hash__ = None


def constant_vector(components: Sequence) -> VectorField:
    return VectorField(tuple(as_scalar(c) for c in components))


def coordinate_vector(index: int) -> VectorField:
    """The coordinate basis vector d/dx^index"""
    return constant_vector([1 if i == index else 0 for i in range(DIMENSION)])


@dataclass(frozen=True)
class AffineMap:
    """x -> matrix @ x + offset on R^4 (need not be invertible)"""

    matrix: Tuple[Tuple, ...]
    offset: Tuple = (0, 0, 0, 0)

    def __post_init__(self):
        matrix = tuple(tuple(row) for row in self.matrix)
        if len(matrix) != DIMENSION or any(len(row) != DIMENSION for row in matrix):
            raise DomainError("An affine map needs a 4x4 matrix")
        if len(self.offset) != DIMENSION:
            raise DomainError("An affine map needs a 4-component offset")
        object.__setattr__(self, "matrix", tuple(tuple(_exact_or_float(v) for v in row) for row in matrix))
        object.__setattr__(self, "offset", tuple(_exact_or_float(v) for v in self.offset))

    @classmethod
    def identity(cls) -> "AffineMap":
        return cls(tuple(tuple(1 if i == j else 0 for j in range(DIMENSION)) for i in range(DIMENSION)))

    @classmethod
    def translation(cls, offset: Sequence) -> "AffineMap":
        return cls(cls.identity().matrix, tuple(offset))

    def apply(self, point: Sequence) -> Point:
        return Point(*(sum((self.matrix[i][j] * point[j] for j in range(DIMENSION)), self.offset[i]) for i in range(DIMENSION)))

    def compose(self, inner: "AffineMap") -> "AffineMap":
        """self after inner: x -> self(inner(x))"""
        m = sp.Matrix(self.matrix) * sp.Matrix(inner.matrix)
        b = sp.Matrix(self.matrix) * sp.Matrix(inner.offset) + sp.Matrix(self.offset)
        return AffineMap(tuple(tuple(m.row(i)) for i in range(DIMENSION)), tuple(b))

    @property
    def determinant(self):
        return sp.Matrix(self.matrix).det()


def _exact_or_float(value):
    if isinstance(value, float):
        return value
    if isinstance(value, sp.Basic) and not value.is_Rational:
        return value
    return to_rational(value)


# --------------------------------------------------------------------------
# Cartan operations
# --------------------------------------------------------------------------

def wedge(a: DifferentialForm, b: DifferentialForm) -> DifferentialForm:
    """a ^ b with index-sorting parity"""
    grade = a.grade + b.grade
    if grade > DIMENSION:
        raise DomainError("grade exceeds dimension")
    result: Dict[MultiIndex, ScalarField] = {}
    for key_a, coeff_a in a.items():
        for key_b, coeff_b in b.items():
            sign, key = sort_indices(key_a + key_b)
            if sign == 0:
                continue
            term = coeff_a * coeff_b * sign
            result[key] = result[key] + term if key in result else term
    return DifferentialForm(grade, result)


def exterior_derivative(a: DifferentialForm) -> DifferentialForm:
    """d a; the derivative of a 4-form is returned as the zero 4-form"""
    if a.grade == DIMENSION:
        return zero_form(DIMENSION)
    result: Dict[MultiIndex, ScalarField] = {}
    for key, coeff in a.items():
        for i in range(DIMENSION):
            if i in key:
                continue
            derivative = coeff.partial(i)
            if derivative.is_zero:
                continue
            sign, new_key = sort_indices((i,) + key)
            term = derivative * sign
            result[new_key] = result[new_key] + term if new_key in result else term
    return DifferentialForm(a.grade + 1, result)


def interior_product(v: VectorField, a: DifferentialForm) -> DifferentialForm:
    """i_v a, an antiderivation of degree -1"""
    if a.grade == 0:
        raise DomainError("cannot contract scalar")
    result: Dict[MultiIndex, ScalarField] = {}
    for key, coeff in a.items():
        for position, index in enumerate(key):
            component = v[index]
            if component.is_zero:
                continue
            rest = key[:position] + key[position + 1:]
            term = coeff * component * (-1) ** position
            result[rest] = result[rest] + term if rest in result else term
    return DifferentialForm(a.grade - 1, result)


def lie_derivative(v: VectorField, a: DifferentialForm) -> DifferentialForm:
    """Cartan's formula L_v = i_v d + d i_v"""
    if a.grade == 0:
        return interior_product(v, exterior_derivative(a))
    contracted = exterior_derivative(interior_product(v, a))
    if a.grade == DIMENSION:
        return contracted
    return interior_product(v, exterior_derivative(a)) + contracted


def pullback_affine(phi: AffineMap, a: DifferentialForm) -> DifferentialForm:
    """phi^* a for an affine map phi(x) = M x + b.

    dx^i pulls back to sum_j M[i][j] dx^j and coefficients are composed
    with phi; singular M (leaf immersions) is allowed.
    """
    differentials = [one_form(phi.matrix[i]) for i in range(DIMENSION)]
    result = zero_form(a.grade)
    for key, coeff in a.items():
        term = scalar_form(coeff.compose_affine(phi.matrix, phi.offset))
        for index in key:
            term = wedge(term, differentials[index])
        result = result + term
    return result


# --------------------------------------------------------------------------
# Metric structure
# --------------------------------------------------------------------------

def _metric_factor(key: MultiIndex) -> int:
    factor = 1
    for i in key:
        factor *= SIGNATURE[i]
    return factor


def _complement(key: MultiIndex) -> MultiIndex:
    return tuple(i for i in range(DIMENSION) if i not in key)


@lru_cache(maxsize=None)
def _hodge_coefficients() -> Dict[MultiIndex, int]:
    """Solve e^I ^ (c e^{I^c}) = <e^I, e^I> vol for c on every basis monomial.

    For a fixed I the only basis monomial J of complementary grade with
    e^I ^ e^J != 0 is J = I^c, so the relation pins down a single scalar.
    """
    vol = volume_form()
    coefficients = {}
    for grade in range(DIMENSION + 1):
        for key in itertools.combinations(range(DIMENSION), grade):
            complement = _complement(key)
            product = wedge(basis_form(*key), basis_form(*complement))
            pairing = _metric_factor(key)
            orientation = product[vol.keys()[0]].constant_value()
            coefficients[key] = int(sp.Rational(pairing) / orientation)
    logger.debug(f"Hodge coefficients solved: {coefficients}")
    return coefficients


def inner_product(a: DifferentialForm, b: DifferentialForm) -> ScalarField:
    """Pointwise pairing <a, b> induced by the Minkowski metric"""
    if a.grade != b.grade:
        raise DomainError(f"Cannot pair forms of grade {a.grade} and {b.grade}")
    total = PolynomialField.zero()
    for key, coeff in a.items():
        other = b[key]
        if not other.is_zero:
            total = total + coeff * other * _metric_factor(key)
    return total


def hodge_star(a: DifferentialForm) -> DifferentialForm:
    """Minkowski Hodge star, grade k -> 4 - k"""
    coefficients = _hodge_coefficients()
    return DifferentialForm(
        DIMENSION - a.grade,
        {_complement(key): coeff * coefficients[key] for key, coeff in a.items()},
    )


def hodge_sign_table() -> Tuple[int, ...]:
    """Per-grade s_k with **a = s_k a, computed from the solved star"""
    signs = []
    for grade in range(DIMENSION + 1):
        seen = set()
        for key in itertools.combinations(range(DIMENSION), grade):
            twice = hodge_star(hodge_star(basis_form(*key)))
            seen.add(twice[key].constant_value())
        if len(seen) != 1:
            raise DomainError(f"Hodge star is not an involution up to sign on grade {grade}")
        signs.append(int(seen.pop()))
    return tuple(signs)


# --------------------------------------------------------------------------
# Evaluation and comparison
# --------------------------------------------------------------------------

def _minor_det(minor: List[List[Number]]) -> Number:
    if all(is_exact(v) for row in minor for v in row):
        return sp.Matrix(minor).det()
    return float(np.linalg.det(np.array(minor, dtype=float)))


def evaluate(a: DifferentialForm, vectors: Sequence[VectorField], point: Sequence) -> Number:
    """a(v_1, ..., v_k) at ``point``, fully antisymmetric and multilinear.

    Each coefficient is weighted by the determinant of the matching minor of
    the vectors' components: exact through sympy, float through numpy.
    """
    if len(vectors) != a.grade:
        raise DomainError(f"A grade-{a.grade} form needs {a.grade} vectors, got {len(vectors)}")
    values = [v.evaluate(point) for v in vectors]
    total = 0
    for key, coeff in a.items():
        det = _minor_det([[values[slot][index] for slot in range(a.grade)] for index in key]) if a.grade else 1
        if det != 0:
            total = total + coeff.evaluate(point) * det
    return total


def exact_equal(a: DifferentialForm, b: DifferentialForm) -> bool:
    """Coefficient-level equality (exact for polynomial forms)"""
    if a.grade != b.grade:
        return False
    if a.backend == POLYNOMIAL and b.backend == POLYNOMIAL and set(a.keys()) != set(b.keys()):
        return False
    return all(a[key] == b[key] for key in set(a.keys()) | set(b.keys()))


def form_equal_sampled(
    a: DifferentialForm,
    b: DifferentialForm,
    points: Iterable[Sequence],
    tol: float = 0.0,
) -> bool:
    """True iff every coefficient of a and b agrees at every point within ``tol``.

    Polynomial forms at rational points are always compared exactly and
    ``tol`` is ignored for them. A jet form whose coefficients all cancel
    (d(d(a)) for instance) is empty and so counts as polynomial.
    """
    if a.grade != b.grade:
        raise DomainError(f"Cannot compare forms of grade {a.grade} and {b.grade}")
    exact = a.backend == POLYNOMIAL and b.backend == POLYNOMIAL
    keys = set(a.keys()) | set(b.keys())
    for point in points:
        left, right = a.evaluate_coefficients(point), b.evaluate_coefficients(point)
        for key in keys:
            diff = left.get(key, 0) - right.get(key, 0)
            if exact and Point(*point).is_exact:
                if diff != 0:
                    return False
            elif abs(float(diff)) > tol:
                return False
    return True
