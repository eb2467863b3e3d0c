"""Built-in catalog of the named examples, plus the self-check battery."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Optional

from . import fpgroups, hhindex, linkcalc, sl2
from .exactlin import smith_normal_form
from .hhindex import ManifoldInvariants, builtin_manifold
from .linkcalc import LinkCollection, builtin_link


@dataclass(frozen=True)
class CatalogEntry:
    name: str
    invariants: ManifoldInvariants
    monodromy_exponents: Optional[tuple[int, int, int]] = None
    links: Optional[LinkCollection] = None
    provenance: str = ""


def catalog() -> list[CatalogEntry]:
    return [
        CatalogEntry(
            name="s4",
            invariants=builtin_manifold("s4"),
            monodromy_exponents=(1, -1, 1),
            links=LinkCollection.of([(builtin_link("pretzel(2,-2,2)"), 1)]),
            provenance=(
                "Matsumoto's singular torus fibration of the 4-sphere with one "
                "critical point; local link the pretzel link (2,-2,2)"
            ),
        ),
        CatalogEntry(
            name="cp2",
            invariants=builtin_manifold("cp2"),
            provenance="complex projective plane; positive definite odd form <1>",
        ),
        CatalogEntry(
            name="cp2bar",
            invariants=builtin_manifold("cp2bar"),
            provenance="reversed-orientation projective plane; form <-1>",
        ),
        CatalogEntry(
            name="s2xs2",
            invariants=builtin_manifold("s2xs2"),
            provenance="product of spheres; even hyperbolic form H",
        ),
        CatalogEntry(
            name="k3",
            invariants=builtin_manifold("k3"),
            provenance="K3 surface; even form -E8 + -E8 + 3H, signature -16",
        ),
        CatalogEntry(
            name="m_s1xs3:2",
            invariants=builtin_manifold("m_s1xs3:2"),
            provenance=(
                "connected sum of two copies of S^1 x S^3; b1 = 2, b2 = 0, "
                "admits no singular fibration (negative Milnor total)"
            ),
        ),
        CatalogEntry(
            name="s1xs3",
            invariants=builtin_manifold("m_s1xs3:1"),
            provenance="S^1 x S^3; torus bundle over the sphere, mu = 0",
        ),
    ]


@dataclass(frozen=True)
class CheckResult:
    name: str
    passed: bool
    detail: str


def _check(name: str, fn: Callable[[], object], expect: object) -> CheckResult:
    got = fn()
    return CheckResult(
        name=name,
        passed=got == expect,
        detail=f"expected {expect!r}, got {got!r}",
    )


def selfcheck() -> list[CheckResult]:
    """Fast end-to-end validation of the module invariants on the catalog."""
    results: list[CheckResult] = []
    for entry in catalog():
        # constructors validate; reaching here means the entry is consistent
        results.append(CheckResult(
            name=f"catalog:{entry.name}",
            passed=True,
            detail="invariants consistent",
        ))

    results.append(_check(
        "snf:2x2", lambda: smith_normal_form([[2, 4], [6, 8]]), ((2, 4), 0)
    ))
    kodaira = [
        sl2.Sl2Element.from_flat(f)
        for f in ((1, 1, -1, 0), (0, 1, -1, 0), (0, 1, -1, -1))
    ]
    results.append(_check(
        "sl2:kodaira-orders",
        lambda: tuple(sl2.element_order(g) for g in kodaira),
        (6, 4, 3),
    ))
    results.append(_check(
        "hhindex:s4-index",
        lambda: hhindex.realizable_indices(builtin_manifold("s4")).pairs,
        (hhindex.IndexPair(1, 1),),
    ))
    results.append(_check(
        "hhindex:cp2-omega",
        lambda: hhindex.omega_window(builtin_manifold("cp2").form, window=100).values,
        (1, 9, 25, 49, 81),
    ))
    results.append(_check(
        "fpgroups:matsumoto-trivial",
        lambda: fpgroups.triviality(
            fpgroups.build_g_phi(fpgroups.MonodromyData.from_three_exponents(1, -1, 1))
        ).status,
        fpgroups.Verdict.TRIVIAL,
    ))
    results.append(_check(
        "fpgroups:genus-zero-anomalies",
        lambda: len(fpgroups.enumerate_genus_zero(3).anomalies),
        0,
    ))
    results.append(_check(
        # permutations of +-(2,-3,-5): binary icosahedral, not trivial
        "fpgroups:poincare-exceptions",
        lambda: len(fpgroups.enumerate_genus_zero(5).nontrivial_exceptions),
        12,
    ))
    hopf_totals = LinkCollection.of(
        [(builtin_link("hopf+"), 3), (builtin_link("hopf-"), 2)]
    )
    results.append(_check(
        "linkcalc:hopf-totals", lambda: linkcalc.totals(hopf_totals), (5, 3)
    ))
    results.append(_check(
        "linkcalc:d-torus-fiber", lambda: linkcalc.d_for_fiber_genus(1), 0
    ))
    return results
