"""
Seeded generators for rational points, polynomials and forms.

Every draw consumes raw 64-bit words from numpy's PCG64 bit generator
(PCG-XSL-RR 128/64), seeded through ``numpy.random.SeedSequence`` from a
single integer seed. Two consecutive words w1, w2 become the rational p/q with

    p = (w1 mod 21) - 10 (so |p| <= 10)
    q = (w2 mod 10) + 1  (so 1 <= q <= 10)

and small integers are taken as ``w mod (k + 1)``. Nothing else touches the
stream, so point sets are bit-exact reproducible from the seed alone.
"""

import itertools
import logging
from typing import List, Optional

import numpy as np
import sympy as sp

from .config import ReproducibilityController
from .forms_core import DIMENSION, AffineMap, DifferentialForm, Point, VectorField, constant_vector
from .scalars import PolynomialField

logger = logging.getLogger(__name__)


class RationalSampler:
    """Deterministic stream of small rationals and objects built from them"""

    def __init__(self, seed: Optional[int] = None, bound: Optional[int] = None):
        self.seed = ReproducibilityController.resolve_seed(seed)
        self.bound = bound or ReproducibilityController.RATIONAL_BOUND
        self._bits = np.random.PCG64(self.seed)
        logger.debug(f"RationalSampler seeded with {self.seed}")

    def _word(self) -> int:
        return int(self._bits.random_raw())

    def integer(self, upper: int) -> int:
        """Uniform-ish integer in [0, upper]"""
        return self._word() % (upper + 1)

    def rational(self) -> sp.Rational:
        numerator = self._word() % (2 * self.bound + 1) - self.bound
        denominator = self._word() % self.bound + 1
        return sp.Rational(numerator, denominator)

    def nonzero_rational(self) -> sp.Rational:
        while True:
            value = self.rational()
            if value != 0:
                return value

    def random_point(self) -> Point:
        return Point(*(self.rational() for _ in range(DIMENSION)))

    def random_points(self, n: int) -> List[Point]:
        return [self.random_point() for _ in range(n)]

    def random_polynomial(self, max_degree: int = 2, max_terms: int = 3) -> PolynomialField:
        """Sum of at most ``max_terms`` monomials of total degree <= ``max_degree``"""
        terms = []
        for _ in range(1 + self.integer(max_terms - 1)):
            remaining = max_degree
            exponents = []
            for _ in range(DIMENSION):
                e = self.integer(remaining)
                exponents.append(e)
                remaining -= e
            terms.append((self.rational(), exponents))
        return PolynomialField.from_terms(terms)

    def random_form(self, grade: int, max_degree: int = 2, max_terms: int = 3) -> DifferentialForm:
        """Every basis key is kept with probability about 3/4"""
        coeffs = {}
        for key in itertools.combinations(range(DIMENSION), grade):
            if self.integer(3) == 0:
                continue
            coeffs[key] = self.random_polynomial(max_degree, max_terms)
        return DifferentialForm(grade, coeffs)

    def random_constant_vector(self) -> VectorField:
        return constant_vector([self.rational() for _ in range(DIMENSION)])

    def random_affine_map(self, invertible: bool = True) -> AffineMap:
        while True:
            matrix = tuple(tuple(self.rational() for _ in range(DIMENSION)) for _ in range(DIMENSION))
            offset = tuple(self.rational() for _ in range(DIMENSION))
            candidate = AffineMap(matrix, offset)
            if not invertible or candidate.determinant != 0:
                return candidate
