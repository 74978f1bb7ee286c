"""
Scenario documents: JSON files describing the fields to check.

Example::

    {
      "beta": "3/5",
      "backend": "polynomial",
      "source_mode": "potential",
      "fields": {
        "A": {"grade": 1, "coefficients": {"2": [{"coeff": "1", "exponents": [1, 0, 0, 0]}]}}
      },
      "sample_points": {"count": 20, "seed": 42},
      "quadrature_order": 8
    }

Rationals are strings ("p/q") so nothing passes through floats. Multi-index
keys are strictly increasing digit strings over "0123" ("01" is dt^dx, ""
is the scalar slot). With ``"backend": "jet"`` a coefficient may instead
be ``{"expr": "sin(t - x)"}``.
"""

import json
import logging
from pathlib import Path
from typing import Dict, List, Literal, Optional, Union

import sympy as sp
from pydantic import BaseModel, Field, ValidationError, field_validator, model_validator

from .config import FrameControlVariables, QuadratureControls, ReproducibilityController
from .errors import DomainError, ScenarioError
from .forms_core import DifferentialForm, exterior_derivative, hodge_star
from .frames import parse_beta
from .maxwell import EMFieldState, convection_state, faraday_from_potential
from .scalars import JetField, PolynomialField, ScalarField, to_rational

logger = logging.getLogger(__name__)

FIELD_GRADES = {"A": 1, "F": 2, "G": 2, "J": 3}


def _rational_string(value) -> str:
    if isinstance(value, bool) or isinstance(value, float):
        raise ValueError(f"rationals must be given as strings like '3/5', got {value!r}")
    try:
        return str(to_rational(value))
    except (TypeError, ValueError, sp.SympifyError) as exc:
        raise ValueError(f"{value!r} is not a rational") from exc


class TermModel(BaseModel):
    """One monomial coeff * t^a x^b y^c z^d"""

    coeff: str
    exponents: List[int]

    @field_validator("coeff", mode="before")
    @classmethod
    def check_coeff(cls, value):
        return _rational_string(value)

    @field_validator("exponents")
    @classmethod
    def check_exponents(cls, value):
        if len(value) != 4 or any(e < 0 for e in value):
            raise ValueError(f"exponents must be four non-negative integers, got {value}")
        return value


class ExpressionModel(BaseModel):
    """Jet-backend coefficient given as a sympy expression in t, x, y, z"""

    expr: str

    @field_validator("expr")
    @classmethod
    def check_expr(cls, value):
        try:
            JetField.from_string(value)
        except (sp.SympifyError, SyntaxError, TypeError) as exc:
            raise ValueError(f"cannot parse expression {value!r}") from exc
        return value


CoefficientModel = Union[List[TermModel], ExpressionModel]


def _coefficient_field(entry: CoefficientModel) -> ScalarField:
    if isinstance(entry, ExpressionModel):
        return JetField.from_string(entry.expr)
    return PolynomialField.from_terms([(t.coeff, t.exponents) for t in entry])


class FormModel(BaseModel):
    grade: int = Field(ge=0, le=4)
    coefficients: Dict[str, CoefficientModel] = Field(default_factory=dict)

    @model_validator(mode="after")
    def check_keys(self):
        for key in self.coefficients:
            if any(ch not in "0123" for ch in key):
                raise ValueError(f"multi-index key '{key}' uses digits outside 0123")
            if any(a >= b for a, b in zip(key, key[1:])):
                raise ValueError(f"multi-index key '{key}' is not strictly increasing")
            if len(key) != self.grade:
                raise ValueError(f"multi-index key '{key}' does not match grade {self.grade}")
        return self

    def to_form(self) -> DifferentialForm:
        coeffs: Dict[tuple, ScalarField] = {
            tuple(int(ch) for ch in key): _coefficient_field(entry) for key, entry in self.coefficients.items()
        }
        return DifferentialForm(self.grade, coeffs)

    @classmethod
    def from_form(cls, form: DifferentialForm) -> "FormModel":
        coefficients = {}
        for key, coeff in form.items():
            name = "".join(str(i) for i in key)
            if isinstance(coeff, PolynomialField):
                coefficients[name] = [TermModel(coeff=str(c), exponents=list(e)) for c, e in coeff.terms()]
            else:
                coefficients[name] = ExpressionModel(expr=sp.sstr(coeff.as_expr()))
        return cls(grade=form.grade, coefficients=coefficients)


def _check_beta(value) -> str:
    value = _rational_string(value)
    try:
        parse_beta(value)
    except DomainError as exc:
        raise ValueError(str(exc)) from exc
    return value


class ChargeModel(BaseModel):
    """Static charge potential phi carried along ``axis`` at speed ``beta`` (the scenario beta when omitted)"""

    phi: CoefficientModel
    axis: int = Field(ge=1, le=3)
    beta: Optional[str] = None

    @field_validator("beta", mode="before")
    @classmethod
    def check_beta(cls, value):
        return None if value is None else _check_beta(value)

    def to_scalar(self) -> ScalarField:
        return _coefficient_field(self.phi)


class SamplingModel(BaseModel):
    count: int = Field(default_factory=lambda: ReproducibilityController.SAMPLE_POINTS, ge=1)
    seed: int = Field(default_factory=lambda: ReproducibilityController.RANDOM_SEED)


class FluxBoxModel(BaseModel):
    """Leaf box used for the flux checks of ``report``"""

    lower: List[str] = Field(default_factory=lambda: ["0", "0", "0"])
    upper: List[str] = Field(default_factory=lambda: ["1", "1", "1"])
    leaf_time: str = "0"

    @field_validator("lower", "upper", mode="before")
    @classmethod
    def check_corner(cls, value):
        if not isinstance(value, list) or len(value) != 3:
            raise ValueError(f"box corners need three coordinates, got {value!r}")
        return [_rational_string(v) for v in value]

    @field_validator("leaf_time", mode="before")
    @classmethod
    def check_time(cls, value):
        return _rational_string(value)

    @model_validator(mode="after")
    def check_extent(self):
        if any(sp.Rational(hi) <= sp.Rational(lo) for lo, hi in zip(self.lower, self.upper)):
            raise ValueError(f"degenerate box {self.lower} -> {self.upper}")
        return self


class ScenarioConfig(BaseModel):
    """A complete scenario: frame family, fields, sampling and quadrature settings"""

    name: Optional[str] = None
    signature: Literal["+---"] = "+---"
    beta: str = Field(default_factory=lambda: FrameControlVariables.DEFAULT_BETA)
    backend: Literal["polynomial", "jet"] = "polynomial"
    source_mode: Literal["potential", "ampere_derived", "explicit", "convection"] = "potential"
    fields: Dict[str, FormModel] = Field(default_factory=dict)
    charge: Optional[ChargeModel] = None
    sample_points: SamplingModel = Field(default_factory=SamplingModel)
    quadrature_order: int = Field(default_factory=lambda: QuadratureControls.DEFAULT_ORDER)
    convection: bool = False
    flux_box: FluxBoxModel = Field(default_factory=FluxBoxModel)

    @field_validator("beta", mode="before")
    @classmethod
    def check_beta(cls, value):
        return _check_beta(value)

    @field_validator("quadrature_order")
    @classmethod
    def check_order(cls, value):
        if value < QuadratureControls.MIN_ORDER:
            raise ValueError(f"quadrature_order must be >= {QuadratureControls.MIN_ORDER}")
        return value

    @model_validator(mode="after")
    def check_fields(self):
        for name, form in self.fields.items():
            if name not in FIELD_GRADES:
                raise ValueError(f"unknown field '{name}', expected one of {sorted(FIELD_GRADES)}")
            if form.grade != FIELD_GRADES[name]:
                raise ValueError(f"field '{name}' must have grade {FIELD_GRADES[name]}, got {form.grade}")
            if self.backend == "polynomial" and any(
                isinstance(entry, ExpressionModel) for entry in form.coefficients.values()
            ):
                raise ValueError(f"field '{name}' uses an expression coefficient; set backend to 'jet'")
        required = {
            "potential": [("A",)],
            "ampere_derived": [("F", "A"), ("G",)],
            "explicit": [("F",), ("G",), ("J",)],
            "convection": [],
        }[self.source_mode]
        for options in required:
            if not any(option in self.fields for option in options):
                raise ValueError(f"source_mode '{self.source_mode}' needs field {' or '.join(options)}")
        if self.source_mode == "convection":
            if self.charge is None:
                raise ValueError("source_mode 'convection' needs a charge block")
            if self.backend == "polynomial" and isinstance(self.charge.phi, ExpressionModel):
                raise ValueError("charge.phi uses an expression; set backend to 'jet'")
        return self

    @property
    def checks_convection(self) -> bool:
        """Whether the invariant sign checks count toward the exit code"""
        return self.convection or self.source_mode == "convection"


def _location(error: dict) -> str:
    return ".".join(str(part) for part in error.get("loc", ())) or "<root>"


def parse_scenario(text: str) -> ScenarioConfig:
    """Parse and validate a scenario document, raising ScenarioError on any problem"""
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ScenarioError(f"invalid JSON: {exc.msg}", location=f"line {exc.lineno}, column {exc.colno}") from exc
    try:
        config = ScenarioConfig.model_validate(data)
    except ValidationError as exc:
        errors = exc.errors()
        details = "; ".join(f"{_location(e)}: {e['msg']}" for e in errors)
        raise ScenarioError(details, location=_location(errors[0])) from exc
    logger.debug(f"Parsed scenario {config.name or '<unnamed>'} with fields {sorted(config.fields)}")
    return config


def load_scenario(path) -> ScenarioConfig:
    path = Path(path)
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as exc:
        raise ScenarioError(f"cannot read scenario: {exc.strerror}", location=str(path)) from exc
    return parse_scenario(text)


def dump_scenario(config: ScenarioConfig) -> str:
    return json.dumps(config.model_dump(mode="json", exclude_none=True), indent=2, sort_keys=True)


def config_from_forms(forms: Dict[str, DifferentialForm], **settings) -> ScenarioConfig:
    """Build a ScenarioConfig around in-memory forms (backend inferred when not given)"""
    if "backend" not in settings:
        backends = {form.backend for form in forms.values()}
        settings["backend"] = "jet" if "jet" in backends else "polynomial"
    fields = {name: FormModel.from_form(form) for name, form in forms.items()}
    return ScenarioConfig(fields=fields, **settings)


def scenario_forms(config: ScenarioConfig) -> Dict[str, DifferentialForm]:
    return {name: model.to_form() for name, model in config.fields.items()}


def build_state(config: ScenarioConfig) -> EMFieldState:
    """Assemble (F, G, J) according to the scenario's source mode.

    potential:       F = dA, G = *F unless given, J = dG
    ampere_derived:  F given (or dA), G given, J = dG
    explicit:        F, G and J taken as given
    convection:      the static charge of ``charge.phi`` boosted along ``charge.axis``
    """
    forms = scenario_forms(config)
    A = forms.get("A")
    try:
        if config.source_mode == "convection":
            charge = config.charge
            return convection_state(charge.to_scalar(), charge.axis, charge.beta or config.beta)
        if config.source_mode == "explicit":
            return EMFieldState(F=forms["F"], G=forms["G"], J=forms["J"], potential=A)
        if config.source_mode == "potential":
            F = faraday_from_potential(A)
            G = forms["G"] if "G" in forms else hodge_star(F)
        else:
            F = forms["F"] if "F" in forms else faraday_from_potential(A)
            G = forms["G"]
        return EMFieldState(F=F, G=G, J=exterior_derivative(G), potential=A)
    except DomainError as exc:
        raise ScenarioError(str(exc), location="fields") from exc
