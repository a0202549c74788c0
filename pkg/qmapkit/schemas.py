"""JSON documents read and written by the command line: target files, quasimap files and emitted reports."""
from typing import Dict, List, Literal, Optional, Type, Union

from pydantic import BaseModel, Field, ValidationError

from qmapkit import utils
from qmapkit.binary_forms import BinaryForm
from qmapkit.errors import MalformedDatum
from qmapkit.exact_arith import to_rat
from qmapkit.git_model import EffectivityMode, Target, make_preset
from qmapkit.quasimap_check import GRASSMANNIAN, PROJECTIVE, PolyQuasimap


Number = Union[int, str]


class ProjectiveParams(BaseModel):
    n: int = Field(..., description="Dimension of the projective space")


class GrassmannianParams(BaseModel):
    k: int = Field(..., description="Dimension of the subspaces")
    n: int = Field(..., description="Dimension of the ambient space")


class ToricParams(BaseModel):
    weight_matrix: List[List[int]] = Field(..., description="r x n matrix whose columns are the weights")
    theta: List[int] = Field(..., description="Stability character on the torus")


class CustomParams(BaseModel):
    r: int = Field(..., description="Rank of the maximal torus")
    weights: List[List[int]] = Field(..., description="Weights of V as integer r-vectors")
    theta: List[int] = Field(..., description="Stability character restricted to the torus")
    roots: List[List[int]] = Field([], description="All roots, closed under negation")
    weyl_gens: List[List[List[int]]] = Field([], description="Generators of the Weyl group as r x r matrices")
    tau: List[List[int]] = Field([], description="m x r degree map, identity when omitted")
    effectivity_mode: EffectivityMode = Field(EffectivityMode.CUSTOM_BOUNDED, description="Effectivity rule")
    chern_names: List[str] = Field([], description="Names of the Chern roots")
    certified_free: Optional[bool] = Field(None, description="Whether G acts freely on the stable locus")
    bound: Optional[int] = Field(None, description="Box bound for enumerating lifted degrees")


PRESET_PARAMS: Dict[str, Type[BaseModel]] = {
    "projective": ProjectiveParams,
    "grassmannian": GrassmannianParams,
    "toric": ToricParams,
    "custom": CustomParams,
}


class TargetFile(BaseModel):
    name: Optional[str] = Field(None, description="Display name of the target")
    preset: Literal["projective", "grassmannian", "toric", "custom"] = Field(..., description="Kind of target")
    parameters: Dict = Field(..., description="Preset parameters")


class QuasimapFile(BaseModel):
    kind: Literal["projective", "grassmannian"] = Field(..., description="P^n or Gr(k, n)")
    n: int = Field(..., description="n of P^n or of Gr(k, n)")
    row_degrees: List[int] = Field(..., description="Degree of each row, a single entry for P^n")
    entries: List[List[Union[str, List[Number]]]] = Field(
        ..., description="Binary forms as strings like '3x^2y' or as coefficient lists for x^d .. y^d"
    )
    marks: List[Union[str, List[Number]]] = Field([], description="Points [a, b] or irreducible binary forms")


def _diagnostic(path: str, text: str, error: ValidationError, prefix=()) -> MalformedDatum:
    first = error.errors()[0]
    loc = tuple(prefix) + tuple(first["loc"])
    line = utils.locate_key(text, loc) or utils.locate_key(text, prefix) or 1
    where = ".".join(str(p) for p in loc)
    return MalformedDatum(f"{path}:{line}: {where}: {first['msg']}")


def target_from_document(document, text: str = "", path: str = "<target>") -> Target:
    try:
        header = TargetFile.model_validate(document)
    except ValidationError as e:
        raise _diagnostic(path, text, e) from e
    try:
        params = PRESET_PARAMS[header.preset].model_validate(header.parameters)
    except ValidationError as e:
        raise _diagnostic(path, text, e, prefix=("parameters",)) from e
    try:
        return make_preset(header.preset, name=header.name, **params.model_dump())
    except MalformedDatum as e:
        line = utils.locate_key(text, ("parameters",)) or 1
        raise MalformedDatum(f"{path}:{line}: {e}") from e


def load_target(path: str) -> Target:
    text, document = utils.load_json_document(path)
    return target_from_document(document, text, path)


def _binary_form(value: Union[str, List[Number]], degree: Optional[int]) -> BinaryForm:
    if isinstance(value, str):
        return BinaryForm.parse(value, degree)
    coeffs = tuple(to_rat(v) for v in value)
    return BinaryForm(len(coeffs) - 1 if degree is None else degree, coeffs)


def _mark(value: Union[str, List[Number]]):
    if isinstance(value, str):
        return BinaryForm.parse(value)
    if len(value) != 2:
        raise MalformedDatum(f"A point of P^1 has two coordinates, got {value}")
    return (to_rat(value[0]), to_rat(value[1]))


def quasimap_from_document(document, text: str = "", path: str = "<quasimap>") -> PolyQuasimap:
    try:
        doc = QuasimapFile.model_validate(document)
    except ValidationError as e:
        raise _diagnostic(path, text, e) from e
    try:
        if len(doc.entries) != len(doc.row_degrees):
            raise MalformedDatum(f"{len(doc.entries)} rows of entries for {len(doc.row_degrees)} row degrees")
        entries = [tuple(_binary_form(v, d) for v in row) for row, d in zip(doc.entries, doc.row_degrees)]
        kind = PROJECTIVE if doc.kind == "projective" else GRASSMANNIAN
        return PolyQuasimap(kind, doc.n, tuple(doc.row_degrees), tuple(entries), tuple(_mark(m) for m in doc.marks))
    except (MalformedDatum, ValueError, TypeError, ZeroDivisionError) as e:
        line = utils.locate_key(text, ("entries",)) or 1
        raise MalformedDatum(f"{path}:{line}: {e}") from e


def load_quasimap(path: str) -> PolyQuasimap:
    text, document = utils.load_json_document(path)
    return quasimap_from_document(document, text, path)


class FactorJSON(BaseModel):
    form: List[int] = Field(..., description="Primitive coefficients of y_1 .. y_r, z")
    exponent: int = Field(..., description="Nonzero exponent")


class FactoredJSON(BaseModel):
    scalar: str = Field(..., description="Rational scalar as 'p/q'")
    factors: List[FactorJSON] = Field([], description="Linear factors in canonical order")


class TermJSON(BaseModel):
    monomial: List[int] = Field(..., description="Exponents of y_1 .. y_r, z")
    coefficient: str = Field(..., description="Rational coefficient as 'p/q'")


class RatExprJSON(BaseModel):
    nvars: int = Field(..., description="Number of variables, Chern roots plus z")
    numerator: List[TermJSON] = Field(..., description="Numerator terms from the largest monomial down")
    denominator: List[FactorJSON] = Field([], description="Denominator factors with positive exponents")


class LiftJSON(BaseModel):
    beta_t: List[int] = Field(..., description="Lifted degree")
    term: FactoredJSON = Field(..., description="Twisted abelian term of the lift")


class CoefficientJSON(BaseModel):
    beta: List[int] = Field(..., description="Degree")
    terms: List[LiftJSON] = Field(..., description="Per-lift terms before summation")
    reduced: RatExprJSON = Field(..., description="Reduced sum")
    text: str = Field(..., description="Canonical text of the reduced sum")
    checks: Optional[Dict[str, bool]] = Field(None, description="Results of --check")


class SeriesJSON(BaseModel):
    target: str = Field(..., description="Target name")
    variables: List[str] = Field(..., description="Chern root names followed by z")
    degree_bound: int = Field(..., description="Largest total degree")
    conventions: Dict[str, str] = Field(..., description="Conventions the coefficients depend on")
    coefficients: List[CoefficientJSON] = Field(..., description="Coefficients in degree order")
    reduced_in_cohomology: Optional[Dict[str, str]] = Field(None, description="Expansions with H^(n+1) = 0")


class StabilityJSON(BaseModel):
    target: str = Field(..., description="Target name")
    maximal_unstable_supports: Optional[List[List[int]]] = Field(None, description="1-based weight indices")
    ss_equals_s: Optional[bool] = Field(None, description="Every semistable support is stable")
    semistable_nonempty: Optional[bool] = Field(None, description="The full support is semistable")
    action_free_on_stable: Optional[bool] = Field(None, description="Stable weight sets span the lattice")
    nonabelian_free_certified: Optional[bool] = Field(None, description="Freeness certified by the preset")
    witnesses: List[List[int]] = Field([], description="Offending supports, 1-based")


class QuasimapJSON(BaseModel):
    degree: int = Field(..., description="Quasimap degree")
    basepoints: List[Dict[str, Union[str, int]]] = Field(..., description="Irreducible forms with lengths")
    constant: bool = Field(..., description="Whether the induced map is constant")
    epsilon_interval: str = Field(..., description="Range of epsilon for which the quasimap is stable")


class FixedLocusRowJSON(BaseModel):
    beta_t: List[int] = Field(..., description="Effective lifted degree")
    dim_V: int = Field(..., description="Dimension of the fixed linear subspace")
    dim_P: int = Field(..., description="Dimension of the parabolic subgroup")
    dim_F: int = Field(..., description="Dimension of the fixed component")
    orbit: List[int] = Field(..., description="Representative of the Weyl orbit")
    orbit_size: int = Field(..., description="Size of the Weyl orbit")
    stabilizer: int = Field(..., description="Order of the stabilizer")


class FixedLociJSON(BaseModel):
    target: str = Field(..., description="Target name")
    beta: List[int] = Field(..., description="Degree")
    rows: List[FixedLocusRowJSON] = Field(..., description="One row per effective lift")
