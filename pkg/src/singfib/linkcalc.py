"""Fibered-link invariant records and the unfolding calculus.

Each fibered link carries the triple (mu, lambda, rho) with mu = lambda +
rho. Two collections are stably unfolding equivalent exactly when their
total mu and total lambda agree, and a collection is equivalent to a
collection of Hopf links iff 0 <= lambda <= mu.

Hopf-invariant convention: lambda = 1 for the positive Hopf link and 0
for the negative one, hence lambda = mu for links of isolated holomorphic
singularities (which unfold into mu positive Hopf links). Flipping the
convention swaps lambda and rho everywhere.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from typing import Optional, Sequence

from .exactlin import AbelianGroup, InputError, divisibility
from .hhindex import IndexPair


class UnknownHopfInvariantError(ValueError):
    """A link in the collection has no recorded Hopf invariant."""


@dataclass(frozen=True)
class FiberedLinkClass:
    """Invariant triple of a fibered link; lam is None when unknown."""

    name: str
    mu: int
    lam: Optional[int]

    def __post_init__(self):
        if self.mu < 0:
            raise InputError("Milnor number must be nonnegative")

    @property
    def rho(self) -> Optional[int]:
        return None if self.lam is None else self.mu - self.lam

    def require_lam(self) -> int:
        if self.lam is None:
            raise UnknownHopfInvariantError(
                f"link {self.name!r} has no recorded Hopf invariant; supply lambda"
            )
        return self.lam


_PRETZEL_RE = re.compile(r"pretzel\(\s*2\s*,\s*-2\s*,\s*(-?\d+)\s*\)")
_ALGEBRAIC_RE = re.compile(r"algebraic\(\s*(\d+)\s*\)")


def builtin_link(tag: str) -> FiberedLinkClass:
    """Built-in links: hopf+ / hopf-, trefoil+ / trefoil-, figure8,
    algebraic(mu), pretzel(2,-2,2n).

    The pretzel links (2,-2,2n) have mu = 2 but no recorded Hopf
    invariant; their lambda stays unknown unless supplied explicitly.
    """
    tag = tag.strip().lower().replace(" ", "")
    fixed = {
        "hopf+": FiberedLinkClass("hopf+", mu=1, lam=1),
        "hopf-": FiberedLinkClass("hopf-", mu=1, lam=0),
        "trefoil+": FiberedLinkClass("trefoil+", mu=2, lam=2),
        "trefoil-": FiberedLinkClass("trefoil-", mu=2, lam=0),
        "figure8": FiberedLinkClass("figure8", mu=2, lam=1),
    }
    if tag in fixed:
        return fixed[tag]
    m = _ALGEBRAIC_RE.fullmatch(tag)
    if m:
        mu = int(m.group(1))
        return FiberedLinkClass(f"algebraic({mu})", mu=mu, lam=mu)
    m = _PRETZEL_RE.fullmatch(tag)
    if m:
        twist = int(m.group(1))
        if twist % 2:
            raise InputError("pretzel tag must be pretzel(2,-2,<even>)")
        return FiberedLinkClass(f"pretzel(2,-2,{twist})", mu=2, lam=None)
    raise InputError(f"unknown link tag {tag!r}")


def mirror(k: FiberedLinkClass) -> FiberedLinkClass:
    """Mirror image: swaps lambda and rho, keeps mu."""
    name = k.name[:-len("(mirror)")] if k.name.endswith("(mirror)") else k.name + "(mirror)"
    return FiberedLinkClass(name=name, mu=k.mu, lam=k.rho)


@dataclass(frozen=True)
class LinkCollection:
    """Multiset of fibered links with positive multiplicities."""

    items: tuple[tuple[FiberedLinkClass, int], ...]

    @classmethod
    def of(cls, items: Sequence[tuple[FiberedLinkClass, int]]) -> "LinkCollection":
        for _, mult in items:
            if mult < 1:
                raise InputError("multiplicities must be positive")
        return cls(items=tuple(items))

    def union(self, other: "LinkCollection") -> "LinkCollection":
        return LinkCollection(items=self.items + other.items)

    def mirrored(self) -> "LinkCollection":
        return LinkCollection(items=tuple((mirror(k), m) for k, m in self.items))


def totals(c: LinkCollection) -> tuple[int, int]:
    """Multiplicity-weighted (total mu, total lambda)."""
    mu = sum(k.mu * m for k, m in c.items)
    lam = sum(k.require_lam() * m for k, m in c.items)
    return (mu, lam)


def stably_equivalent(a: LinkCollection, b: LinkCollection) -> bool:
    """Grothendieck-group equality: total mu and total lambda agree."""
    return totals(a) == totals(b)


def hopf_unfoldable(c: LinkCollection) -> Optional[tuple[int, int]]:
    """Counts (positive, negative) of Hopf links stably equivalent to c,
    present exactly when 0 <= total lambda <= total mu."""
    mu, lam = totals(c)
    if 0 <= lam <= mu:
        return (lam, mu - lam)
    return None


@dataclass(frozen=True)
class CohomologyClassIn3Manifold:
    """A class in H^2 of a closed oriented 3-manifold, in coordinates
    adapted to the invariant-factor decomposition of the ambient group."""

    ambient: AbelianGroup
    coords: tuple[int, ...]

    def __post_init__(self):
        if len(self.coords) != self.ambient.num_generators:
            raise InputError(
                f"class has {len(self.coords)} coordinates, ambient group has "
                f"{self.ambient.num_generators} generators"
            )


def d_beta(beta: CohomologyClassIn3Manifold) -> int:
    """Twice the divisibility of beta modulo torsion; 0 for torsion classes.

    This is the modulus in which the shell invariants of a disk block
    bounded by the 3-manifold live.
    """
    return 2 * divisibility(beta.coords, beta.ambient)


def d_for_fiber_genus(genus: int) -> int:
    """d for a disk block with trivial boundary monodromy and closed
    genus-g fiber: the combing class is half the Euler class, so
    d = |chi(F)| = |2 - 2g|. The torus gives 0: invariants live in Z + Z."""
    if genus < 0:
        raise InputError("genus must be nonnegative")
    return abs(2 - 2 * genus)


def shell_reduction(pair: IndexPair, d1: int, d2: int) -> tuple[int, int]:
    """Shell invariant (-lambda mod d1, rho mod d2); d = 0 means no
    reduction and the full integer is returned."""
    if d1 < 0 or d2 < 0:
        raise InputError("moduli must be nonnegative")
    neg_lam, rho = pair.plane_field_index
    return (neg_lam % d1 if d1 else neg_lam, rho % d2 if d2 else rho)


# --- fiber Euler characteristic and relative minimality ---------------------

COMPONENT_TYPES = ("disk", "annulus", "generic")


def fiber_chi(genus: int, boundary: int) -> int:
    if genus < 0 or boundary < 0:
        raise InputError("genus and boundary count must be nonnegative")
    return 2 - 2 * genus - boundary


def relatively_minimal(fiber_genus: int, complement_components: Sequence[str]) -> bool:
    """Relative minimality of a local Milnor fiber inside a generic fiber
    of genus g, from the component types of the complement.

    Torus fibers forbid disk components; genus >= 2 fibers forbid disks
    and annuli (the injectivity rule). Genus 0 has trivial monodromy and
    is checked with the torus rule.
    """
    if fiber_genus < 0:
        raise InputError("genus must be nonnegative")
    for comp in complement_components:
        if comp not in COMPONENT_TYPES:
            raise InputError(f"unknown component type {comp!r}")
    if fiber_genus >= 2:
        return not any(c in ("disk", "annulus") for c in complement_components)
    return "disk" not in complement_components
