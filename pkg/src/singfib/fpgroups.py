"""Finitely presented groups arising from one-critical-point fibrations.

Builds the fibered-link group from monodromy data, decides triviality by
abelianization plus bounded Todd-Coxeter coset enumeration, and handles
the genus-zero three-exponent classification and abelianized surface
presentations.

Words are tuples of signed 1-based generator indices: 2 means the second
generator, -2 its inverse.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from enum import Enum
from typing import Iterable, Optional, Sequence

from .exactlin import AbelianGroup, IntegerMatrix, InputError, cokernel, determinant

Word = tuple[int, ...]

DEFAULT_MAX_COSETS = 10**5


def free_reduce(word: Iterable[int]) -> Word:
    out: list[int] = []
    for letter in word:
        letter = int(letter)
        if letter == 0:
            raise InputError("0 is not a valid word letter")
        if out and out[-1] == -letter:
            out.pop()
        else:
            out.append(letter)
    return tuple(out)


def invert_word(word: Word) -> Word:
    return tuple(-x for x in reversed(word))


def word_power(word: Word, k: int) -> Word:
    if k < 0:
        return invert_word(word) * (-k)
    return word * k


@dataclass(frozen=True)
class Presentation:
    generators: tuple[str, ...]
    relators: tuple[Word, ...]

    @classmethod
    def of(cls, generators: Sequence[str], relators: Sequence[Iterable[int]]) -> "Presentation":
        gens = tuple(generators)
        reduced = []
        for rel in relators:
            w = free_reduce(rel)
            if any(abs(x) > len(gens) for x in w):
                raise InputError(f"relator letter out of range for {len(gens)} generators")
            reduced.append(w)
        return cls(generators=gens, relators=tuple(reduced))

    def relation_matrix(self) -> IntegerMatrix:
        """Abelianized exponent-sum matrix, one row per relator."""
        rows = []
        for rel in self.relators:
            row = [0] * len(self.generators)
            for letter in rel:
                row[abs(letter) - 1] += 1 if letter > 0 else -1
            rows.append(row)
        return IntegerMatrix.from_rows(rows, cols=len(self.generators))

    def abelianization(self) -> AbelianGroup:
        return cokernel(self.relation_matrix())

    def display(self) -> str:
        def fmt(word: Word) -> str:
            if not word:
                return "1"
            parts = []
            for letter, grp in itertools.groupby(word):
                e = len(list(grp)) * (1 if letter > 0 else -1)
                name = self.generators[abs(letter) - 1]
                parts.append(name if e == 1 else f"{name}^{e}")
            return " ".join(parts)

        gens = ", ".join(self.generators)
        rels = ", ".join(fmt(r) for r in self.relators)
        return f"< {gens} | {rels} >"


@dataclass(frozen=True)
class MonodromyData:
    """Input data for the fibered-link group of a single critical point.

    free_rank: rank N of the free fundamental group of the local Milnor
    fiber; phi_images: images of the N generators under the monodromy;
    boundary_words: the r boundary words b_i; spherical_exponents has
    length n, annular_exponents length 2m with paired entries summing to
    zero; the remaining r - n - 2m boundary components are generic.
    """

    free_rank: int
    phi_images: tuple[Word, ...]
    boundary_words: tuple[Word, ...]
    spherical_exponents: tuple[int, ...] = ()
    annular_exponents: tuple[int, ...] = ()

    def __post_init__(self):
        n_annular = len(self.annular_exponents)
        if n_annular % 2:
            raise InputError("annular exponents come in pairs")
        m = n_annular // 2
        for j in range(m):
            if self.annular_exponents[j] + self.annular_exponents[j + m]:
                raise InputError(
                    f"annular pair ({j + 1}, {j + 1 + m}) must have opposite exponents"
                )
        if len(self.phi_images) != self.free_rank:
            raise InputError("need one monodromy image per free generator")
        if self.generic_count < 0:
            raise InputError("more twisted boundary components than boundary words")
        for w in self.phi_images + self.boundary_words:
            if any(x == 0 or abs(x) > self.free_rank for x in w):
                raise InputError("word letter out of range")
        # the monodromy must at least abelianize to a unit of GL(N, Z)
        mat = [[0] * self.free_rank for _ in range(self.free_rank)]
        for i, w in enumerate(self.phi_images):
            for letter in w:
                mat[abs(letter) - 1][i] += 1 if letter > 0 else -1
        if self.free_rank and abs(determinant(IntegerMatrix.from_rows(mat))) != 1:
            raise InputError("monodromy images are not an automorphism on homology")

    @property
    def n(self) -> int:
        return len(self.spherical_exponents)

    @property
    def m(self) -> int:
        return len(self.annular_exponents) // 2

    @property
    def r(self) -> int:
        return len(self.boundary_words)

    @property
    def generic_count(self) -> int:
        return self.r - self.n - 2 * self.m

    @classmethod
    def from_three_exponents(cls, k1: int, k2: int, k3: int) -> "MonodromyData":
        """Three-holed-sphere fiber with boundary-twist monodromy.

        Boundary twists are supported in a collar that no loop based in
        the interior meets, so the induced action on the free group is the
        identity; the third boundary word is (a1 a2)^-1.
        """
        return cls(
            free_rank=2,
            phi_images=((1,), (2,)),
            boundary_words=((1,), (2,), (-2, -1)),
            spherical_exponents=(int(k1), int(k2), int(k3)),
        )


def build_g_phi(data: MonodromyData) -> Presentation:
    """Presentation of the group of the capped-off mapping torus.

    Generators t, a_1 ... a_N; relators t a_i t^-1 phi(a_i)^-1, one
    relator t b_i^{k_i} per twisted boundary component, and the single
    relator t when some boundary component is generic.
    """
    N = data.free_rank
    generators = ("t",) + tuple(f"a{i + 1}" for i in range(N))

    def shift(word: Word) -> Word:
        return tuple(x + 1 if x > 0 else x - 1 for x in word)

    relators: list[Word] = []
    for i in range(N):
        a_i = i + 2  # generator index of a_{i+1} in the presentation
        relators.append(free_reduce((1, a_i, -1) + invert_word(shift(data.phi_images[i]))))
    exponents = data.spherical_exponents + data.annular_exponents
    for b_word, k in zip(data.boundary_words, exponents):
        relators.append(free_reduce((1,) + word_power(shift(b_word), k)))
    if data.generic_count > 0:
        relators.append((1,))
    return Presentation.of(generators, relators)


class Verdict(Enum):
    TRIVIAL = "trivial"
    NONTRIVIAL = "nontrivial"
    INCONCLUSIVE = "inconclusive"


@dataclass(frozen=True)
class TrivialityVerdict:
    status: Verdict
    abelianization: AbelianGroup
    coset_count: Optional[int] = None
    max_cosets: int = DEFAULT_MAX_COSETS
    reason: str = ""

    @property
    def is_trivial(self) -> bool:
        return self.status is Verdict.TRIVIAL


def todd_coxeter(p: Presentation, max_cosets: int = DEFAULT_MAX_COSETS) -> Optional[int]:
    """HLT coset enumeration of the trivial subgroup.

    Returns the group order when the table completes within the budget,
    None when the budget is exhausted. Deterministic: cosets are scanned
    in definition order and relators in presentation order.
    """
    if max_cosets < 1:
        raise InputError("coset budget must be positive")
    ngens = len(p.generators)
    ncols = 2 * ngens

    def col(letter: int) -> int:
        return 2 * (abs(letter) - 1) + (0 if letter > 0 else 1)

    table: list[list[Optional[int]]] = [[None] * ncols]
    rep: list[int] = [0]

    def find(x: int) -> int:
        while rep[x] != x:
            rep[x] = rep[rep[x]]
            x = rep[x]
        return x

    def coincidence(x: int, y: int):
        # merge the classes of x and y: fold each dead row's transitions
        # into the surviving representative, queueing any induced
        # coincidences instead of re-stabilizing the whole table
        stack = [(x, y)]
        while stack:
            a, b = stack.pop()
            a, b = find(a), find(b)
            if a == b:
                continue
            if b < a:
                a, b = b, a
            rep[b] = a
            for c in range(ncols):
                d = table[b][c]
                if d is None:
                    continue
                table[b][c] = None
                d = find(d)
                e = table[a][c]
                if e is None:
                    table[a][c] = d
                    back = table[d][c ^ 1]
                    if back is None:
                        table[d][c ^ 1] = a
                    else:
                        stack.append((back, a))
                else:
                    stack.append((e, d))

    rel_cols = [[col(letter) for letter in rel] for rel in p.relators]

    scan = 0
    while scan < len(table):
        if find(scan) != scan:
            scan += 1
            continue
        for rel in rel_cols:
            start = find(scan)
            if start != scan:
                break
            alpha = start
            for c in rel:
                alpha = find(alpha)
                nxt = table[alpha][c]
                if nxt is not None:
                    alpha = find(nxt)
                    continue
                if len(table) >= max_cosets:
                    return None
                table.append([None] * ncols)
                rep.append(len(table) - 1)
                new = len(table) - 1
                table[alpha][c] = new
                table[new][c ^ 1] = alpha
                alpha = new
            # the relator acts trivially: scanning must return to the start
            coincidence(alpha, start)
        # complete the row, so termination implies a total coset action
        for c in range(ncols):
            base = find(scan)
            if base != scan or table[base][c] is not None:
                continue
            if len(table) >= max_cosets:
                return None
            table.append([None] * ncols)
            rep.append(len(table) - 1)
            new = len(table) - 1
            table[base][c] = new
            table[new][c ^ 1] = base
        scan += 1
    return sum(1 for x in range(len(table)) if find(x) == x)


def triviality(p: Presentation, max_cosets: int = DEFAULT_MAX_COSETS) -> TrivialityVerdict:
    """Decide whether the presented group is trivial.

    The abelianization is a cheap sound nontriviality test; a completed
    coset table is a proof either way. A blown budget stays inconclusive.
    """
    ab = p.abelianization()
    if not ab.is_trivial:
        return TrivialityVerdict(
            status=Verdict.NONTRIVIAL,
            abelianization=ab,
            max_cosets=max_cosets,
            reason=f"abelianization is {ab.describe()}",
        )
    order = todd_coxeter(p, max_cosets=max_cosets)
    if order is None:
        return TrivialityVerdict(
            status=Verdict.INCONCLUSIVE,
            abelianization=ab,
            max_cosets=max_cosets,
            reason=f"coset enumeration exceeded {max_cosets} cosets",
        )
    if order == 1:
        return TrivialityVerdict(
            status=Verdict.TRIVIAL,
            abelianization=ab,
            coset_count=order,
            max_cosets=max_cosets,
            reason="coset enumeration completed with a single coset",
        )
    return TrivialityVerdict(
        status=Verdict.NONTRIVIAL,
        abelianization=ab,
        coset_count=order,
        max_cosets=max_cosets,
        reason=f"coset enumeration completed with {order} cosets",
    )


# --- genus-zero classification -------------------------------------------

FAMILY_UNIT_PAIR = "(+-1, +-1, 0)"
FAMILY_2_M1_3 = "(2, -1, 3)"
FAMILY_M2_1_M3 = "(-2, 1, -3)"
FAMILY_OPPOSITE_PAIR = "(1, -1, n)"


def genus_zero_criterion(k1: int, k2: int, k3: int) -> bool:
    """Determinant test for boundary-twist exponents on the 3-holed sphere.

    |k1 k2 + k2 k3 + k3 k1| = 1 says the abelianization of G(phi) is
    trivial. This is necessary but NOT sufficient for triviality of
    G(phi): the solutions outside the four families of
    classify_genus_zero are perfect but nontrivial (see
    is_exceptional_solution), the smallest being (2, -3, -5), whose
    group is the binary icosahedral group of order 120.
    """
    return abs(k1 * k2 + k2 * k3 + k3 * k1) == 1


def classify_genus_zero(k1: int, k2: int, k3: int) -> Optional[str]:
    """Family of a solution triple, up to permutation; None if unmatched.

    The four families are exactly the triples whose group G(phi) is
    trivial, i.e. whose open book lives in S^3. Every family member
    satisfies the determinant test, so non-solutions never classify:
    an opposite pair (m, -m, n) has determinant -m*m, forcing m = +-1.
    """
    if not genus_zero_criterion(k1, k2, k3):
        return None
    s = sorted((k1, k2, k3))
    if sorted(map(abs, s)) == [0, 1, 1]:
        return FAMILY_UNIT_PAIR
    if s == [-1, 2, 3]:
        return FAMILY_2_M1_3
    if s == [-3, -2, 1]:
        return FAMILY_M2_1_M3
    for a, b in itertools.combinations(range(3), 2):
        if s[a] == -s[b] and s[a] != 0:
            return FAMILY_OPPOSITE_PAIR
    return None


def torus_expandable(k1: int, k2: int, k3: int) -> bool:
    """Whether two boundary components carry opposite twists, so the fiber
    expands through an annulus to a torus; these are the (1, -1, n) types
    realized by the pretzel links (2, -2, 2n)."""
    if not genus_zero_criterion(k1, k2, k3):
        raise InputError("triple does not satisfy the genus-zero criterion")
    ks = (k1, k2, k3)
    return any(ks[i] == -ks[j] for i, j in itertools.combinations(range(3), 2))


def is_exceptional_solution(k1: int, k2: int, k3: int) -> bool:
    """A determinant solution outside every family, hence nontrivial.

    Any solution with some |k_i| <= 1 lands in a family, so an
    unclassified solution has all |k_i| >= 2. Killing t in G(phi) then
    leaves the full triangle group D(|k1|, |k2|, |k3|), which contains
    Z/|k1| != 1; a group with a nontrivial quotient is nontrivial. The
    smallest examples, the permutations of +-(2, -3, -5), are the
    binary icosahedral group; the rest are infinite.
    """
    if not genus_zero_criterion(k1, k2, k3):
        return False
    if classify_genus_zero(k1, k2, k3) is not None:
        return False
    assert all(abs(k) >= 2 for k in (k1, k2, k3))
    return True


@dataclass(frozen=True)
class GenusZeroTable:
    """Classification of twist exponents at a coordinate bound.

    families: triples with trivial G(phi), by family.
    nontrivial_exceptions: determinant solutions whose group is perfect
        but nontrivial (triangle-group covers); not genus-zero data in
        the 3-sphere.
    anomalies: solutions fitting neither description; always expected
        empty, kept as a consistency net.
    """

    bound: int
    families: dict[str, list[tuple[int, int, int]]] = field(default_factory=dict)
    nontrivial_exceptions: list[tuple[int, int, int]] = field(default_factory=list)
    anomalies: list[tuple[int, int, int]] = field(default_factory=list)


def enumerate_genus_zero(bound: int) -> GenusZeroTable:
    """All solution triples with |k_i| <= bound, partitioned by family."""
    if bound < 1:
        raise InputError("bound must be >= 1")
    table = GenusZeroTable(bound=bound, families={
        FAMILY_UNIT_PAIR: [],
        FAMILY_2_M1_3: [],
        FAMILY_M2_1_M3: [],
        FAMILY_OPPOSITE_PAIR: [],
    })
    rng = range(-bound, bound + 1)
    for k in itertools.product(rng, repeat=3):
        if not genus_zero_criterion(*k):
            continue
        family = classify_genus_zero(*k)
        if family is not None:
            table.families[family].append(k)
        elif is_exceptional_solution(*k):
            table.nontrivial_exceptions.append(k)
        else:  # pragma: no cover - unreachable by the triangle-group argument
            table.anomalies.append(k)
    return table


def surface_presentation_h1(genus: int, curve_classes: Sequence[Sequence[int]]) -> AbelianGroup:
    """H_1 of the closed genus-g surface with cones attached along the
    given homology classes: Z^{2g} modulo their span. An abelianized lower
    bound for the fundamental group of the coned polyhedron."""
    if genus < 0:
        raise InputError("genus must be nonnegative")
    rows = []
    for v in curve_classes:
        v = [int(x) for x in v]
        if len(v) != 2 * genus:
            raise InputError(f"curve class {v} does not have length {2 * genus}")
        rows.append(v)
    return cokernel(IntegerMatrix.from_rows(rows, cols=2 * genus))
