"""
Scalar fields on R^4, the coefficient ring of every differential form.

Two backends share one interface:

* ``PolynomialField`` - exact rational polynomials in (t, x, y, z) backed by
  ``sympy.Poly`` over QQ. Derivatives, composition and evaluation at
  rational points are exact.
* ``JetField`` - arbitrary smooth expressions. Values and first partials are
  evaluated numerically through lambdified closures; ``partial`` stays
  symbolic so higher derivatives remain available.

Mixing the two promotes to ``JetField``.
"""

import abc
import logging
from fractions import Fraction
from functools import cached_property
from typing import Callable, List, Sequence, Tuple, Union

import numpy as np
import sympy as sp
from sympy.polys.polyerrors import CoercionFailed, GeneratorsNeeded, PolynomialError

logger = logging.getLogger(__name__)

T, X, Y, Z = COORDINATES = sp.symbols("t x y z", real=True)

Number = Union[int, sp.Rational, float]

POLYNOMIAL = "polynomial"
JET = "jet"


def to_rational(value) -> sp.Rational:
    """Convert ints, Fractions, ``"p/q"`` strings and sympy rationals to ``sympy.Rational``"""
    if isinstance(value, sp.Rational):
        return value
    if isinstance(value, Fraction):
        return sp.Rational(value.numerator, value.denominator)
    if isinstance(value, (int, np.integer)):
        return sp.Integer(int(value))
    if isinstance(value, str):
        return sp.Rational(value.strip())
    raise TypeError(f"Cannot convert {value!r} to an exact rational")


def is_exact(value) -> bool:
    return isinstance(value, (int, np.integer, Fraction, sp.Rational))


def _is_exact_point(point: Sequence) -> bool:
    return all(is_exact(c) for c in point)


class ScalarField(abc.ABC):
    """A smooth function on R^4 queryable for its value and first partials"""

    backend: str = ""

    @abc.abstractmethod
    def as_expr(self) -> sp.Expr:
        """Symbolic expression in ``COORDINATES``"""

    @abc.abstractmethod
    def evaluate(self, point: Sequence) -> Number:
        """Value at ``point`` (exact for polynomials at rational points)"""

    @abc.abstractmethod
    def partial(self, index: int) -> "ScalarField":
        """Partial derivative along coordinate ``index`` (0 is time)"""

    @abc.abstractmethod
    def compose_affine(self, matrix: Sequence[Sequence], offset: Sequence) -> "ScalarField":
        """Return f(M x + b)"""

    @property
    @abc.abstractmethod
    def is_zero(self) -> bool:
        """True when the field is identically zero"""

    def jet(self, point: Sequence) -> Tuple[Number, Tuple[Number, Number, Number, Number]]:
        """Value and the four first partials at ``point``"""
        grad = tuple(self.partial(i).evaluate(point) for i in range(4))
        return self.evaluate(point), grad

    def gradient(self) -> Tuple["ScalarField", ...]:
        return tuple(self.partial(i) for i in range(4))

    @cached_property
    def _numpy_function(self) -> Callable:
        return sp.lambdify(COORDINATES, self.as_expr(), modules="numpy")

    def to_numpy(self) -> Callable[..., np.ndarray]:
        """Vectorised float evaluator ``f(t, x, y, z)`` that broadcasts its arguments"""
        fn = self._numpy_function

        def evaluate(t, x, y, z):
            t, x, y, z = np.broadcast_arrays(*(np.asarray(v, dtype=float) for v in (t, x, y, z)))
            out = fn(t, x, y, z)
            return np.broadcast_to(np.asarray(out, dtype=float), t.shape).copy()

        return evaluate

    def __add__(self, other):
        other = as_scalar(other)
        if isinstance(self, PolynomialField) and isinstance(other, PolynomialField):
            return PolynomialField(self.poly + other.poly)
        return JetField(self.as_expr() + other.as_expr())

    __radd__ = __add__

    def __neg__(self):
        return self * -1

    def __sub__(self, other):
        return self + (-as_scalar(other))

    def __rsub__(self, other):
        return as_scalar(other) + (-self)

    def __mul__(self, other):
        other = as_scalar(other)
        if isinstance(self, PolynomialField) and isinstance(other, PolynomialField):
            return PolynomialField(self.poly * other.poly)
        return JetField(self.as_expr() * other.as_expr())

    __rmul__ = __mul__

    def __eq__(self, other):
        try:
            other = as_scalar(other)
        except TypeError:
            return NotImplemented
        if isinstance(self, PolynomialField) and isinstance(other, PolynomialField):
            return self.poly == other.poly
        return (self - other).is_zero

    __hash__ = None

    def __repr__(self):
        return f"{type(self).__name__}({self.as_expr()})"


class PolynomialField(ScalarField):
    """Exact polynomial with rational coefficients.

    Zero coefficients are never stored and exponent tuples are unique; both
    are guaranteed by ``sympy.Poly``.
    """

    backend = POLYNOMIAL

    def __init__(self, poly: sp.Poly):
        if poly.gens != COORDINATES:
            poly = sp.Poly(poly.as_expr(), *COORDINATES, domain=sp.QQ)
        elif poly.domain != sp.QQ:
            poly = poly.set_domain(sp.QQ)
        self.poly = poly

    @classmethod
    def from_terms(cls, terms: Sequence[Tuple[object, Sequence[int]]]) -> "PolynomialField":
        """Build from ``(coefficient, (a, b, c, d))`` pairs; repeated exponents are summed"""
        data = {}
        for coeff, exponents in terms:
            exponents = tuple(int(e) for e in exponents)
            if len(exponents) != 4 or any(e < 0 for e in exponents):
                raise ValueError(f"Exponents must be four non-negative integers, got {exponents}")
            data[exponents] = data.get(exponents, sp.Integer(0)) + to_rational(coeff)
        data = {k: v for k, v in data.items() if v != 0}
        if not data:
            return cls.zero()
        return cls(sp.Poly.from_dict(data, *COORDINATES, domain=sp.QQ))

    @classmethod
    def from_expr(cls, expr) -> "PolynomialField":
        return cls(sp.Poly(sp.sympify(expr), *COORDINATES, domain=sp.QQ))

    @classmethod
    def zero(cls) -> "PolynomialField":
        return cls(sp.Poly(0, *COORDINATES, domain=sp.QQ))

    @classmethod
    def constant(cls, value) -> "PolynomialField":
        return cls(sp.Poly(to_rational(value), *COORDINATES, domain=sp.QQ))

    @classmethod
    def coordinate(cls, index: int) -> "PolynomialField":
        return cls(sp.Poly(COORDINATES[index], *COORDINATES, domain=sp.QQ))

    def terms(self) -> List[Tuple[sp.Rational, Tuple[int, int, int, int]]]:
        """Non-zero terms as ``(coefficient, exponents)``, in sympy's lex order"""
        if self.poly.is_zero:
            return []
        return [(sp.Rational(c), tuple(e)) for e, c in self.poly.terms()]

    def as_expr(self) -> sp.Expr:
        return self.poly.as_expr()

    @property
    def is_zero(self) -> bool:
        return self.poly.is_zero

    @property
    def is_constant(self) -> bool:
        return self.poly.is_ground

    def constant_value(self) -> sp.Rational:
        if not self.is_constant:
            raise ValueError(f"{self!r} is not constant")
        return sp.Rational(self.poly.LC()) if not self.poly.is_zero else sp.Integer(0)

    def evaluate(self, point: Sequence) -> Number:
        if self.poly.is_ground:
            value = self.constant_value()
            return value if _is_exact_point(point) else float(value)
        if _is_exact_point(point):
            return sp.Rational(self.poly.eval(dict(zip(COORDINATES, (to_rational(c) for c in point)))))
        return float(self._numpy_function(*(float(c) for c in point)))

    def partial(self, index: int) -> "PolynomialField":
        return PolynomialField(self.poly.diff(COORDINATES[index]))

    def compose_affine(self, matrix, offset) -> ScalarField:
        if self.poly.is_ground:
            return self
        substitution = {
            COORDINATES[i]: sum((sp.sympify(matrix[i][j]) * COORDINATES[j] for j in range(4)), sp.sympify(offset[i]))
            for i in range(4)
        }
        expr = sp.expand(self.as_expr().xreplace(substitution))
        if all(is_exact(matrix[i][j]) for i in range(4) for j in range(4)) and all(is_exact(b) for b in offset):
            return PolynomialField.from_expr(expr)
        return JetField(expr)


class JetField(ScalarField):
    """Numerically evaluated smooth field.

    Values and gradients come from ``sympy.lambdify`` closures; the symbolic
    expression is kept so derivatives of any order stay available.
    """

    backend = JET

    def __init__(self, expr):
        self.expr = sp.sympify(expr)

    @classmethod
    def from_string(cls, text: str) -> "JetField":
        names = {str(s): s for s in COORDINATES}
        return cls(sp.sympify(text, locals=names))

    def as_expr(self) -> sp.Expr:
        return self.expr

    @cached_property
    def _value_fn(self) -> Callable:
        return sp.lambdify(COORDINATES, self.expr, modules="numpy")

    @cached_property
    def _gradient_fn(self) -> Callable:
        return sp.lambdify(COORDINATES, [sp.diff(self.expr, c) for c in COORDINATES], modules="numpy")

    @cached_property
    def is_zero(self) -> bool:
        return sp.expand(self.expr) == 0

    @property
    def is_constant(self) -> bool:
        return not (self.expr.free_symbols & set(COORDINATES))

    def constant_value(self):
        if not self.is_constant:
            raise ValueError(f"{self!r} is not constant")
        return self.expr

    def evaluate(self, point: Sequence) -> float:
        return float(self._value_fn(*(float(c) for c in point)))

    def jet(self, point: Sequence):
        coords = [float(c) for c in point]
        grad = self._gradient_fn(*coords)
        return float(self._value_fn(*coords)), tuple(float(g) for g in grad)

    def partial(self, index: int) -> "JetField":
        return JetField(sp.diff(self.expr, COORDINATES[index]))

    def compose_affine(self, matrix, offset) -> "JetField":
        substitution = {
            COORDINATES[i]: sum((sp.sympify(matrix[i][j]) * COORDINATES[j] for j in range(4)), sp.sympify(offset[i]))
            for i in range(4)
        }
        return JetField(self.expr.xreplace(substitution))


def as_scalar(value) -> ScalarField:
    """Coerce numbers and sympy expressions into a ScalarField"""
    if isinstance(value, ScalarField):
        return value
    if is_exact(value):
        return PolynomialField.constant(value)
    if isinstance(value, str):
        try:
            return PolynomialField.constant(to_rational(value))
        except (TypeError, ValueError, sp.SympifyError) as exc:
            raise TypeError(f"Cannot use {value!r} as a scalar field") from exc
    if isinstance(value, (float, np.floating)):
        return JetField(sp.Float(float(value), 30))
    if isinstance(value, sp.Basic):
        if value.is_Rational:
            return PolynomialField.constant(value)
        if value.atoms(sp.Float) or (value.is_number and not value.is_Rational):
            return JetField(value)
        try:
            return PolynomialField.from_expr(value)
        except (PolynomialError, CoercionFailed, GeneratorsNeeded):
            return JetField(value)
    raise TypeError(f"Cannot use {value!r} as a scalar field")


def constant(value) -> ScalarField:
    """Constant field: exact when ``value`` is rational, high-precision float otherwise"""
    return as_scalar(value)
