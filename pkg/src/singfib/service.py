"""Service layer: every calculator operation behind a typed endpoint.

The handler functions are plain request-model -> response-model
functions; the FastAPI app and the CLI are both thin clients of them.
"""

from __future__ import annotations

from typing import Optional

from fastapi import FastAPI, HTTPException
from fastapi.exceptions import RequestValidationError
from fastapi.responses import JSONResponse

from . import catalog as catalog_mod
from . import fpgroups, hhindex, linkcalc, sl2
from .exactlin import AbelianGroup, BudgetExceededError, InputError
from .hhindex import IndexPair, IntersectionForm, ManifoldInvariants
from .linkcalc import (
    CohomologyClassIn3Manifold,
    FiberedLinkClass,
    LinkCollection,
    UnknownHopfInvariantError,
)
from .schemas import (
    AbelianGroupOut,
    AbelianImageReport,
    CatalogEntryOut,
    CatalogReport,
    CheckOut,
    CollectionIn,
    ConjugacyReport,
    DbetaRequest,
    DbetaReport,
    EnumerateReport,
    EnumerateRequest,
    EquivReport,
    EquivRequest,
    GphiReport,
    GphiRequest,
    HopfReport,
    HopfRequest,
    IndexPairOut,
    IndexReport,
    IndexRequest,
    IshidaReport,
    IshidaRequest,
    ManifoldOut,
    ManifoldSpec,
    MatrixRequest,
    ObstructReport,
    ObstructRequest,
    OmegaOut,
    OrderReport,
    PresentationOut,
    SelfcheckReport,
    ShellReport,
    ShellRequest,
    TotalsReport,
    TotalsRequest,
    TwoTwistReport,
    TwoTwistRequest,
    VerdictOut,
    WordReport,
    WordRequest,
)

ERROR_INPUT = "input"
ERROR_BUDGET = "budget"
ERROR_MISSING = "missing-invariant"

_HTTP_STATUS = {ERROR_INPUT: 400, ERROR_BUDGET: 409, ERROR_MISSING: 422}


class ServiceError(Exception):
    def __init__(self, code: str, message: str):
        super().__init__(message)
        self.code = code
        self.message = message

    @property
    def http_status(self) -> int:
        return _HTTP_STATUS.get(self.code, 400)


def _wrap(fn, *args):
    try:
        return fn(*args)
    except UnknownHopfInvariantError as exc:
        raise ServiceError(ERROR_MISSING, str(exc))
    except BudgetExceededError as exc:
        raise ServiceError(ERROR_BUDGET, str(exc))
    except InputError as exc:
        raise ServiceError(ERROR_INPUT, str(exc))


# --- converters --------------------------------------------------------------


def _resolve_manifold(spec: ManifoldSpec) -> ManifoldInvariants:
    if spec.builtin:
        return hhindex.builtin_manifold(spec.builtin)
    if spec.form is not None:
        return ManifoldInvariants.from_form(
            spec.b1, IntersectionForm.from_rows(spec.form), name="custom"
        )
    b2 = spec.b2 if spec.b2 is not None else 0
    if b2 != 0:
        raise InputError("b2 > 0 requires an explicit form or builtin tag")
    sigma = spec.sigma if spec.sigma is not None else 0
    e = spec.e if spec.e is not None else 2 - 2 * spec.b1 + b2
    return ManifoldInvariants(b1=spec.b1, b2=b2, e=e, sigma=sigma, name="custom")


def _manifold_out(inv: ManifoldInvariants) -> ManifoldOut:
    return ManifoldOut(name=inv.name or "custom", b1=inv.b1, b2=inv.b2, e=inv.e, sigma=inv.sigma)


def _surface_chi(spec: Optional[str]) -> Optional[int]:
    if spec is None:
        return None
    s = spec.strip().lower()
    named = {"s2": 2, "sphere": 2, "t2": 0, "torus": 0}
    if s in named:
        return named[s]
    if s.startswith("genus:"):
        try:
            g = int(s.split(":", 1)[1])
        except ValueError:
            raise InputError(f"malformed surface spec {spec!r}")
        if g < 0:
            raise InputError("genus must be nonnegative")
        return 2 - 2 * g
    try:
        return int(s)
    except ValueError:
        raise InputError(f"unknown surface spec {spec!r}")


def _abelian_out(g: AbelianGroup) -> AbelianGroupOut:
    return AbelianGroupOut(
        free_rank=g.free_rank, torsion=list(g.torsion), description=g.describe()
    )


def _collection(c: CollectionIn) -> LinkCollection:
    items = []
    for entry in c.links:
        if entry.tag:
            link = linkcalc.builtin_link(entry.tag)
            if entry.lam is not None:
                link = FiberedLinkClass(name=link.name, mu=link.mu, lam=entry.lam)
        else:
            if entry.mu is None:
                raise InputError("explicit link entries need a Milnor number mu")
            link = FiberedLinkClass(
                name=entry.name or f"link(mu={entry.mu})", mu=entry.mu, lam=entry.lam
            )
        items.append((link, entry.multiplicity))
    return LinkCollection.of(items)


def _curve(pq: tuple[int, int]) -> sl2.TorusCurve:
    return sl2.TorusCurve.of(*pq)


# --- handlers ----------------------------------------------------------------


def handle_index(req: IndexRequest) -> IndexReport:
    def run():
        inv = _resolve_manifold(req.manifold)
        result = hhindex.realizable_indices(inv, window=req.window, box=req.box)
        pairs = [
            IndexPairOut(
                lam=p.lam,
                rho=p.rho,
                mu=p.mu,
                feasible_as_milnor_total=p.feasible_as_milnor_total,
                plane_field_index=p.plane_field_index,
                chern_squares=hhindex.chern_squares(p, inv),
            )
            for p in result.pairs
        ]
        omega = result.omega
        return IndexReport(
            manifold=_manifold_out(inv),
            omega=OmegaOut(
                values=list(omega.values),
                window=omega.window,
                box=omega.box,
                complete=omega.complete,
                signature=omega.signature,
            ),
            pairs=pairs,
        )

    return _wrap(run)


def handle_obstruct(req: ObstructRequest) -> ObstructReport:
    def run():
        inv = _resolve_manifold(req.manifold)
        verdicts = hhindex.obstruct(
            inv, base_chi=_surface_chi(req.base), fiber_chi=_surface_chi(req.fiber)
        )
        return ObstructReport(
            manifold=_manifold_out(inv),
            verdicts=[VerdictOut(code=v.code, detail=v.detail, witness=v.witness) for v in verdicts],
        )

    return _wrap(run)


def _matsumoto_annotation(k: tuple[int, int, int]) -> Optional[str]:
    if not fpgroups.torus_expandable(*k):
        return None
    # pick the coordinate left over after removing one opposite pair
    ks = list(k)
    for i in range(3):
        for j in range(i + 1, 3):
            if ks[i] == -ks[j] and ks[i] != 0:
                n = ks[3 - i - j]
                break
        else:
            continue
        break
    else:
        n = 0  # triples like (1, -1, 0): the zero slot is the leftover
    note = f"fiber expands to a torus; the link is the pretzel link (2,-2,{2 * n})"
    if sorted(k) in ([-1, 1, 1], [-1, -1, 1]):
        note += " (Matsumoto's singular fibration of S^4, up to mirror)"
    return note


def handle_gphi(req: GphiRequest) -> GphiReport:
    def run():
        if (req.k is None) == (req.monodromy is None):
            raise InputError("provide exactly one of k or monodromy")
        if req.k is not None:
            data = fpgroups.MonodromyData.from_three_exponents(*req.k)
            criterion = req.k[0] * req.k[1] + req.k[1] * req.k[2] + req.k[2] * req.k[0]
            expandable = (
                fpgroups.torus_expandable(*req.k)
                if fpgroups.genus_zero_criterion(*req.k)
                else None
            )
            if fpgroups.is_exceptional_solution(*req.k):
                annotation = (
                    "determinant test passes but the group covers the "
                    f"nontrivial triangle group D{tuple(sorted(abs(x) for x in req.k))}"
                )
            elif fpgroups.genus_zero_criterion(*req.k):
                annotation = _matsumoto_annotation(req.k)
            else:
                annotation = None
        else:
            m = req.monodromy
            data = fpgroups.MonodromyData(
                free_rank=m.free_rank,
                phi_images=tuple(tuple(w) for w in m.phi_images),
                boundary_words=tuple(tuple(w) for w in m.boundary_words),
                spherical_exponents=tuple(m.spherical_exponents),
                annular_exponents=tuple(m.annular_exponents),
            )
            criterion = None
            expandable = None
            annotation = None
        pres = fpgroups.build_g_phi(data)
        verdict = fpgroups.triviality(pres, max_cosets=req.max_cosets)
        return GphiReport(
            presentation=PresentationOut(
                generators=list(pres.generators),
                relators=[list(r) for r in pres.relators],
                text=pres.display(),
            ),
            abelianization=_abelian_out(verdict.abelianization),
            verdict=verdict.status.value,
            reason=verdict.reason,
            coset_count=verdict.coset_count,
            criterion_value=criterion,
            torus_expandable=expandable,
            annotation=annotation,
        )

    return _wrap(run)


def handle_enumerate(req: EnumerateRequest) -> EnumerateReport:
    def run():
        table = fpgroups.enumerate_genus_zero(req.bound)
        families = {
            name: sorted(triples)
            for name, triples in table.families.items()
        }
        if req.torus_expandable_only:
            families = {
                name: [k for k in triples if fpgroups.torus_expandable(*k)]
                for name, triples in families.items()
            }
        return EnumerateReport(
            bound=table.bound,
            families=families,
            nontrivial_exceptions=sorted(table.nontrivial_exceptions),
            anomalies=sorted(table.anomalies),
        )

    return _wrap(run)


def handle_totals(req: TotalsRequest) -> TotalsReport:
    def run():
        mu, lam = linkcalc.totals(_collection(req.collection))
        return TotalsReport(mu_total=mu, lambda_total=lam)

    return _wrap(run)


def handle_equiv(req: EquivRequest) -> EquivReport:
    def run():
        ta = linkcalc.totals(_collection(req.a))
        tb = linkcalc.totals(_collection(req.b))
        return EquivReport(equivalent=ta == tb, totals_a=ta, totals_b=tb)

    return _wrap(run)


def handle_hopf(req: HopfRequest) -> HopfReport:
    def run():
        c = _collection(req.collection)
        mu, lam = linkcalc.totals(c)
        witness = linkcalc.hopf_unfoldable(c)
        if witness is None:
            violated = f"lambda = {lam} < 0" if lam < 0 else f"lambda = {lam} > mu = {mu}"
            return HopfReport(unfoldable=False, violated=violated)
        return HopfReport(unfoldable=True, positives=witness[0], negatives=witness[1])

    return _wrap(run)


def handle_mcg_word(req: WordRequest) -> WordReport:
    def run():
        word = sl2.TwistWord.of(
            [(_curve(l.curve), l.exponent) for l in req.letters]
        )
        g = sl2.evaluate_word(word)
        return WordReport(
            matrix=g.flat(),
            order=sl2.element_order(g),
            abelian_image_mod_12=sl2.abelianization_image(g),
        )

    return _wrap(run)


def handle_mcg_order(req: MatrixRequest) -> OrderReport:
    def run():
        g = sl2.Sl2Element.from_flat(req.matrix)
        return OrderReport(order=sl2.element_order(g), trace=g.trace)

    return _wrap(run)


def handle_mcg_conj(req: MatrixRequest) -> ConjugacyReport:
    def run():
        tag = sl2.conjugacy_class(sl2.Sl2Element.from_flat(req.matrix))
        return ConjugacyReport(
            kind=tag.kind,
            description=tag.describe(),
            order=tag.order,
            form=tag.form,
            eps=tag.eps,
            n=tag.n,
            word=tag.word,
        )

    return _wrap(run)


def handle_mcg_ishida(req: IshidaRequest) -> IshidaReport:
    def run():
        c1, c2 = _curve(req.c1), _curve(req.c2)
        return IshidaReport(
            subgroup=sl2.ishida_class(c1, c2),
            intersection_number=abs(c1.wedge(c2)),
        )

    return _wrap(run)


def handle_mcg_twotwist(req: TwoTwistRequest) -> TwoTwistReport:
    def run():
        verdict = sl2.two_twist_trivial(_curve(req.c1), req.k1, _curve(req.c2), req.k2)
        return TwoTwistReport(
            trivial=verdict.trivial,
            certificate=verdict.certificate,
            matrix=verdict.product.flat(),
        )

    return _wrap(run)


def handle_mcg_abelian(req: MatrixRequest) -> AbelianImageReport:
    def run():
        image = sl2.abelianization_image(sl2.Sl2Element.from_flat(req.matrix))
        return AbelianImageReport(
            image_mod_12=image, commutator_obstruction_vanishes=image == 0
        )

    return _wrap(run)


def handle_dbeta(req: DbetaRequest) -> DbetaReport:
    def run():
        if req.fiber_genus is not None:
            if req.ambient is not None or req.coords is not None:
                raise InputError("give either fiber_genus or an explicit class, not both")
            d = linkcalc.d_for_fiber_genus(req.fiber_genus)
            note = (
                "trivial-monodromy disk block with closed genus-"
                f"{req.fiber_genus} fiber: d = |chi(F)| = {d}"
            )
            if d == 0:
                note += "; shell invariants live in Z + Z"
            return DbetaReport(d=d, note=note)
        if req.ambient is None or req.coords is None:
            raise InputError("need ambient group and class coordinates (or fiber_genus)")
        ambient = AbelianGroup(
            free_rank=req.ambient.free, torsion=tuple(req.ambient.torsion)
        )
        beta = CohomologyClassIn3Manifold(ambient=ambient, coords=tuple(req.coords))
        d = linkcalc.d_beta(beta)
        note = "torsion class: d = 0" if d == 0 else f"twice the divisibility: d = {d}"
        return DbetaReport(d=d, note=note)

    return _wrap(run)


def handle_shell(req: ShellRequest) -> ShellReport:
    def run():
        if req.fiber_genus is not None:
            if req.d1 is not None or req.d2 is not None:
                raise InputError("give either fiber_genus or explicit moduli, not both")
            d1 = d2 = linkcalc.d_for_fiber_genus(req.fiber_genus)
        else:
            d1 = req.d1 if req.d1 is not None else 0
            d2 = req.d2 if req.d2 is not None else 0
        pair = IndexPair(lam=req.lam, rho=req.rho)
        invariant = linkcalc.shell_reduction(pair, d1, d2)
        return ShellReport(
            moduli=(d1, d2),
            invariant=invariant,
            stored_pair=(pair.lam, pair.rho),
            plane_field_index=pair.plane_field_index,
        )

    return _wrap(run)


def handle_catalog() -> CatalogReport:
    entries = []
    for entry in catalog_mod.catalog():
        links = None
        if entry.links is not None:
            links = [
                {"name": k.name, "mu": k.mu, "lambda": k.lam, "multiplicity": m}
                for k, m in entry.links.items
            ]
        entries.append(CatalogEntryOut(
            name=entry.name,
            invariants=_manifold_out(entry.invariants),
            monodromy_exponents=entry.monodromy_exponents,
            links=links,
            provenance=entry.provenance,
        ))
    return CatalogReport(entries=entries)


def handle_selfcheck() -> SelfcheckReport:
    checks = [
        CheckOut(name=c.name, passed=c.passed, detail=c.detail)
        for c in catalog_mod.selfcheck()
    ]
    return SelfcheckReport(passed=all(c.passed for c in checks), checks=checks)


# --- FastAPI app -------------------------------------------------------------


def create_app() -> FastAPI:
    app = FastAPI(
        title="singfib",
        description="Exact invariants and obstructions for singular fibrations "
        "of closed oriented 4-manifolds",
    )

    @app.exception_handler(ServiceError)
    async def service_error_handler(_, exc: ServiceError):
        return JSONResponse(
            status_code=exc.http_status,
            content={"detail": {"code": exc.code, "message": exc.message}},
        )

    @app.exception_handler(RequestValidationError)
    async def validation_handler(_, exc: RequestValidationError):
        return JSONResponse(
            status_code=400,
            content={"detail": {"code": ERROR_INPUT, "message": str(exc)}},
        )

    app.post("/index", response_model=IndexReport)(handle_index)
    app.post("/obstruct", response_model=ObstructReport)(handle_obstruct)
    app.post("/gphi", response_model=GphiReport)(handle_gphi)
    app.post("/enumerate", response_model=EnumerateReport)(handle_enumerate)
    app.post("/unfold/totals", response_model=TotalsReport)(handle_totals)
    app.post("/unfold/equiv", response_model=EquivReport)(handle_equiv)
    app.post("/unfold/hopf", response_model=HopfReport)(handle_hopf)
    app.post("/mcg/word", response_model=WordReport)(handle_mcg_word)
    app.post("/mcg/order", response_model=OrderReport)(handle_mcg_order)
    app.post("/mcg/conj", response_model=ConjugacyReport)(handle_mcg_conj)
    app.post("/mcg/ishida", response_model=IshidaReport)(handle_mcg_ishida)
    app.post("/mcg/twotwist", response_model=TwoTwistReport)(handle_mcg_twotwist)
    app.post("/mcg/abelian", response_model=AbelianImageReport)(handle_mcg_abelian)
    app.post("/dbeta", response_model=DbetaReport)(handle_dbeta)
    app.post("/shell", response_model=ShellReport)(handle_shell)
    app.get("/catalog", response_model=CatalogReport)(handle_catalog)
    app.get("/selfcheck", response_model=SelfcheckReport)(handle_selfcheck)
    return app


app = create_app()
