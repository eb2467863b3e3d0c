"""Pydantic request/response models for the service and CLI wire format.

Responses carry a top-level schema tag ("singfib/1") so stored outputs
stay identifiable across versions.
"""

from __future__ import annotations

from typing import Optional

from pydantic import BaseModel, Field

from . import SCHEMA_VERSION

Triple = tuple[int, int, int]


class VersionedResponse(BaseModel):
    schema_version: str = Field(default=SCHEMA_VERSION, alias="schema")
    model_config = {"populate_by_name": True}


class ErrorDetail(BaseModel):
    code: str  # "input" | "budget" | "missing-invariant"
    message: str


# --- manifolds / index -------------------------------------------------------


class ManifoldSpec(BaseModel):
    """A manifold given either by builtin tag or by explicit data."""

    builtin: Optional[str] = None
    form: Optional[list[list[int]]] = None
    b1: int = 0
    b2: Optional[int] = None
    e: Optional[int] = None
    sigma: Optional[int] = None


class ManifoldOut(BaseModel):
    name: str
    b1: int
    b2: int
    e: int
    sigma: int


class IndexRequest(BaseModel):
    manifold: ManifoldSpec
    window: int = 100
    box: int = 8


class OmegaOut(BaseModel):
    values: list[int]
    window: int
    box: int
    complete: bool
    signature: int


class IndexPairOut(BaseModel):
    lam: int = Field(alias="lambda")
    rho: int
    mu: int
    feasible_as_milnor_total: bool
    plane_field_index: tuple[int, int]
    chern_squares: tuple[int, int]
    model_config = {"populate_by_name": True}


class IndexReport(VersionedResponse):
    manifold: ManifoldOut
    omega: OmegaOut
    pairs: list[IndexPairOut]


class ObstructRequest(BaseModel):
    manifold: ManifoldSpec
    base: Optional[str] = None   # "s2", "t2", "genus:<g>", or a chi value
    fiber: Optional[str] = None


class VerdictOut(BaseModel):
    code: str
    detail: str
    witness: dict


class ObstructReport(VersionedResponse):
    manifold: ManifoldOut
    verdicts: list[VerdictOut]


# --- fp groups ---------------------------------------------------------------


class MonodromyIn(BaseModel):
    free_rank: int
    phi_images: list[list[int]]
    boundary_words: list[list[int]]
    spherical_exponents: list[int] = []
    annular_exponents: list[int] = []


class GphiRequest(BaseModel):
    k: Optional[Triple] = None
    monodromy: Optional[MonodromyIn] = None
    max_cosets: int = 100_000


class PresentationOut(BaseModel):
    generators: list[str]
    relators: list[list[int]]
    text: str


class AbelianGroupOut(BaseModel):
    free_rank: int
    torsion: list[int]
    description: str


class GphiReport(VersionedResponse):
    presentation: PresentationOut
    abelianization: AbelianGroupOut
    verdict: str  # trivial | nontrivial | inconclusive
    reason: str
    coset_count: Optional[int] = None
    criterion_value: Optional[int] = None
    torus_expandable: Optional[bool] = None
    annotation: Optional[str] = None


class EnumerateRequest(BaseModel):
    bound: int
    torus_expandable_only: bool = False


class EnumerateReport(VersionedResponse):
    bound: int
    families: dict[str, list[Triple]]
    nontrivial_exceptions: list[Triple]
    anomalies: list[Triple]


# --- unfolding ---------------------------------------------------------------


class LinkEntry(BaseModel):
    """One collection entry: a builtin tag or an explicit (mu, lambda)."""

    tag: Optional[str] = None
    name: Optional[str] = None
    mu: Optional[int] = None
    lam: Optional[int] = Field(default=None, alias="lambda")
    multiplicity: int = 1
    model_config = {"populate_by_name": True}


class CollectionIn(BaseModel):
    links: list[LinkEntry]


class TotalsRequest(BaseModel):
    collection: CollectionIn


class TotalsReport(VersionedResponse):
    mu_total: int
    lambda_total: int


class EquivRequest(BaseModel):
    a: CollectionIn
    b: CollectionIn


class EquivReport(VersionedResponse):
    equivalent: bool
    totals_a: tuple[int, int]
    totals_b: tuple[int, int]


class HopfRequest(BaseModel):
    collection: CollectionIn


class HopfReport(VersionedResponse):
    unfoldable: bool
    positives: Optional[int] = None
    negatives: Optional[int] = None
    violated: Optional[str] = None


# --- torus mapping classes ---------------------------------------------------


class TwistLetterIn(BaseModel):
    curve: tuple[int, int]
    exponent: int


class WordRequest(BaseModel):
    letters: list[TwistLetterIn]


class MatrixOut(BaseModel):
    matrix: tuple[int, int, int, int]  # row-major


class WordReport(VersionedResponse, MatrixOut):
    order: Optional[int]
    abelian_image_mod_12: int


class MatrixRequest(BaseModel):
    matrix: tuple[int, int, int, int]  # row-major


class OrderReport(VersionedResponse):
    order: Optional[int]  # None = infinite
    trace: int


class ConjugacyReport(VersionedResponse):
    kind: str
    description: str
    order: Optional[int] = None
    form: Optional[tuple[int, int, int]] = None
    eps: Optional[int] = None
    n: Optional[int] = None
    word: Optional[str] = None


class IshidaRequest(BaseModel):
    c1: tuple[int, int]
    c2: tuple[int, int]


class IshidaReport(VersionedResponse):
    subgroup: str
    intersection_number: int


class TwoTwistRequest(BaseModel):
    c1: tuple[int, int]
    k1: int
    c2: tuple[int, int]
    k2: int


class TwoTwistReport(VersionedResponse, MatrixOut):
    trivial: bool
    certificate: str


class AbelianImageReport(VersionedResponse):
    image_mod_12: int
    commutator_obstruction_vanishes: bool


# --- shells ------------------------------------------------------------------


class AmbientIn(BaseModel):
    free: int = 0
    torsion: list[int] = []


class DbetaRequest(BaseModel):
    ambient: Optional[AmbientIn] = None
    coords: Optional[list[int]] = None
    fiber_genus: Optional[int] = None


class DbetaReport(VersionedResponse):
    d: int
    note: str


class ShellRequest(BaseModel):
    lam: int = Field(alias="lambda")
    rho: int
    d1: Optional[int] = None
    d2: Optional[int] = None
    fiber_genus: Optional[int] = None
    model_config = {"populate_by_name": True}


class ShellReport(VersionedResponse):
    moduli: tuple[int, int]
    invariant: tuple[int, int]
    stored_pair: tuple[int, int]         # (lambda, rho)
    plane_field_index: tuple[int, int]   # (-lambda, rho)


# --- catalog / selfcheck -----------------------------------------------------


class CatalogEntryOut(BaseModel):
    name: str
    invariants: ManifoldOut
    monodromy_exponents: Optional[Triple] = None
    links: Optional[list[dict]] = None
    provenance: str


class CatalogReport(VersionedResponse):
    entries: list[CatalogEntryOut]


class CheckOut(BaseModel):
    name: str
    passed: bool
    detail: str


class SelfcheckReport(VersionedResponse):
    passed: bool
    checks: list[CheckOut]
