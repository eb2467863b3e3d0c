"""Index realizability for 2-plane fields and the non-fibering engine.

Characteristic vectors of unimodular intersection forms, the window of
their squares, realizable index pairs (lambda, rho) with mu = lambda +
rho, Chern squares, the Euler-characteristic relation, and the
obstruction verdicts for singular fibrations.

Index sign bookkeeping: the pair is stored as (lambda, rho); the
2-plane-field index in the literature's convention is (-lambda, rho).
Reports print both.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Optional, Sequence

from .exactlin import (
    BudgetExceededError,
    IntegerMatrix,
    InputError,
    check_enum_budget,
    determinant,
)

DEFAULT_WINDOW = 100
DEFAULT_BOX = 8


@dataclass(frozen=True)
class IntersectionForm:
    """Symmetric unimodular pairing on H^2 modulo torsion."""

    matrix: IntegerMatrix

    def __post_init__(self):
        m = self.matrix
        if m.rows != m.cols:
            raise InputError("intersection form must be square")
        e = m.entries
        for i in range(m.rows):
            for j in range(i):
                if e[i][j] != e[j][i]:
                    raise InputError("intersection form must be symmetric")
        if m.rows and abs(determinant(m)) != 1:
            raise InputError("intersection form must be unimodular (|det| = 1)")

    @classmethod
    def from_rows(cls, rows: Sequence[Sequence[int]]) -> "IntersectionForm":
        return cls(IntegerMatrix.from_rows(rows))

    @property
    def rank(self) -> int:
        return self.matrix.rows

    @property
    def signature(self) -> int:
        return _signature(self.matrix)

    @property
    def parity(self) -> str:
        even = all(self.matrix.entries[i][i] % 2 == 0 for i in range(self.rank))
        return "even" if even else "odd"

    @property
    def positive_definite(self) -> bool:
        return self.rank > 0 and self.signature == self.rank

    @property
    def negative_definite(self) -> bool:
        return self.rank > 0 and self.signature == -self.rank

    def evaluate(self, v: Sequence[int], w: Sequence[int]) -> int:
        e = self.matrix.entries
        return sum(e[i][j] * v[i] * w[j] for i in range(self.rank) for j in range(self.rank))


def _signature(m: IntegerMatrix) -> int:
    """Exact signature by congruence reduction over the rationals."""
    n = m.rows
    a = [[Fraction(x) for x in row] for row in m.entries]
    sig = 0
    idx = list(range(n))
    while idx:
        # prefer a nonzero diagonal pivot
        pivot = next((i for i in idx if a[i][i] != 0), None)
        if pivot is None:
            # find an off-diagonal nonzero entry: a hyperbolic pair
            off = next(
                ((i, j) for i, j in itertools.combinations(idx, 2) if a[i][j] != 0),
                None,
            )
            if off is None:
                break  # remaining block is zero (degenerate; not unimodular)
            i, j = off
            # replace row/col i by (e_i + e_j): makes the diagonal nonzero
            for k in range(n):
                a[i][k] = a[i][k] + a[j][k]
            for k in range(n):
                a[k][i] = a[k][i] + a[k][j]
            pivot = i
        p = a[pivot][pivot]
        sig += 1 if p > 0 else -1
        idx.remove(pivot)
        for i in idx:
            factor = a[i][pivot] / p
            if factor:
                for k in range(n):
                    a[i][k] -= factor * a[pivot][k]
                for k in range(n):
                    a[k][i] -= factor * a[k][pivot]
    return sig


@dataclass(frozen=True)
class ManifoldInvariants:
    """Homotopy invariants of a closed oriented 4-manifold."""

    b1: int
    b2: int
    e: int
    sigma: int
    form: Optional[IntersectionForm] = None
    name: str = ""

    def __post_init__(self):
        if self.b1 < 0 or self.b2 < 0:
            raise InputError("Betti numbers must be nonnegative")
        if self.e != 2 - 2 * self.b1 + self.b2:
            raise InputError(
                f"Euler characteristic {self.e} != 2 - 2*b1 + b2 = {2 - 2 * self.b1 + self.b2}"
            )
        if abs(self.sigma) > self.b2 or (self.b2 - self.sigma) % 2:
            raise InputError("signature must satisfy |sigma| <= b2 and sigma = b2 (mod 2)")
        if self.form is not None:
            if self.form.rank != self.b2:
                raise InputError("intersection form rank must equal b2")
            if self.form.signature != self.sigma:
                raise InputError("intersection form signature must equal sigma")

    @classmethod
    def from_form(cls, b1: int, form: IntersectionForm, name: str = "") -> "ManifoldInvariants":
        b2 = form.rank
        return cls(b1=b1, b2=b2, e=2 - 2 * b1 + b2, sigma=form.signature, form=form, name=name)


@dataclass(frozen=True, order=True)
class IndexPair:
    """Index invariants (lambda, rho) of a 2-plane field; mu = lambda + rho."""

    lam: int
    rho: int

    @property
    def mu(self) -> int:
        return self.lam + self.rho

    @property
    def feasible_as_milnor_total(self) -> bool:
        return self.mu >= 0

    @property
    def plane_field_index(self) -> tuple[int, int]:
        return (-self.lam, self.rho)


def characteristic_coset(form: IntersectionForm) -> tuple[int, ...]:
    """A characteristic vector w0: S(w0, x) = S(x, x) mod 2 for all x.

    Solved over GF(2); unimodularity makes the system solvable. The full
    characteristic set is w0 + 2H.
    """
    n = form.rank
    a = [[form.matrix.entries[i][j] & 1 for j in range(n)] for i in range(n)]
    rhs = [form.matrix.entries[i][i] & 1 for i in range(n)]
    # Gaussian elimination mod 2
    w = [0] * n
    pivots = []
    row = 0
    for colm in range(n):
        sel = next((r for r in range(row, n) if a[r][colm]), None)
        if sel is None:
            continue
        a[row], a[sel] = a[sel], a[row]
        rhs[row], rhs[sel] = rhs[sel], rhs[row]
        for r in range(n):
            if r != row and a[r][colm]:
                a[r] = [x ^ y for x, y in zip(a[r], a[row])]
                rhs[r] ^= rhs[row]
        pivots.append((row, colm))
        row += 1
    for r, c in pivots:
        w[c] = rhs[r]
    # unimodular mod 2 => full rank; any leftover inconsistent row is a bug
    for r in range(row, n):
        if rhs[r]:  # pragma: no cover
            raise RuntimeError("characteristic system inconsistent for unimodular form")
    return tuple(w)


@dataclass(frozen=True)
class OmegaWindow:
    """Squares of characteristic vectors within |S(w,w)| <= window.

    complete is True when the search box provably covers every square in
    the window (definite forms, or rank 0); for indefinite forms the box
    radius is reported and the window is a documented heuristic.
    """

    values: tuple[int, ...]
    window: int
    box: int
    complete: bool
    signature: int


def _definite_box(form: IntersectionForm, window: int) -> list[int]:
    """Per-coordinate bounds |w_i| <= sqrt(B * (S^-1)_ii) for definite S.

    For positive definite S and S(w,w) <= B one has w_i^2 <= B (S^-1)_ii
    (Cauchy-Schwarz in the S inner product applied to w and S^-1 e_i).
    """
    n = form.rank
    sign = 1 if form.signature > 0 else -1
    det = determinant(form.matrix) * (sign ** n)
    bounds = []
    for i in range(n):
        minor = [
            [form.matrix.entries[r][c] * sign for c in range(n) if c != i]
            for r in range(n) if r != i
        ]
        adj_ii = determinant(IntegerMatrix.from_rows(minor, cols=n - 1))
        inv_ii = Fraction(adj_ii, det)  # (S^-1)_ii > 0 for definite S
        bound_sq = Fraction(window) * inv_ii
        bounds.append(math.isqrt(bound_sq.numerator // bound_sq.denominator) + 1)
    return bounds


def omega_window(
    form: IntersectionForm,
    window: int = DEFAULT_WINDOW,
    box: int = DEFAULT_BOX,
) -> OmegaWindow:
    """Sorted squares of characteristic vectors w with |S(w,w)| <= window."""
    if window < 0:
        raise InputError("window must be nonnegative")
    n = form.rank
    sigma = form.signature
    if n == 0:
        return OmegaWindow(values=(0,), window=window, box=0, complete=True, signature=0)
    w0 = characteristic_coset(form)
    definite = form.positive_definite or form.negative_definite
    if definite:
        bounds = _definite_box(form, window)
        complete = True
    else:
        bounds = [box] * n
        complete = False
    count = 1
    for b in bounds:
        count *= 2 * b + 1
    check_enum_budget(count)
    values = set()
    for z in itertools.product(*(range(-b, b + 1) for b in bounds)):
        w = [w0[i] + 2 * z[i] for i in range(n)]
        square = form.evaluate(w, w)
        if abs(square) <= window:
            if (square - sigma) % 8:  # pragma: no cover
                raise RuntimeError("characteristic square not congruent to signature mod 8")
            values.add(square)
    return OmegaWindow(
        values=tuple(sorted(values)),
        window=window,
        box=0 if definite else box,
        complete=complete,
        signature=sigma,
    )


@dataclass(frozen=True)
class RealizableIndices:
    pairs: tuple[IndexPair, ...]
    omega: OmegaWindow

    @property
    def feasible(self) -> tuple[IndexPair, ...]:
        return tuple(p for p in self.pairs if p.feasible_as_milnor_total)


def realizable_indices(
    inv: ManifoldInvariants,
    window: int = DEFAULT_WINDOW,
    box: int = DEFAULT_BOX,
) -> RealizableIndices:
    """All index pairs (lambda, rho) realizable by a 2-plane field with
    isolated singularities: 4*lambda = 2e + 3*sigma - alpha and
    4*rho = 2e - 3*sigma + beta with alpha, beta in the omega window.

    Pairs with lambda + rho < 0 are returned flagged rather than dropped,
    so callers can cite them as non-fibering witnesses.
    """
    if inv.form is None:
        if inv.b2:
            raise InputError("b2 > 0 requires an intersection form")
        omega = OmegaWindow(values=(0,), window=window, box=0, complete=True, signature=0)
    else:
        omega = omega_window(inv.form, window=window, box=box)
    e, sigma = inv.e, inv.sigma
    pairs = set()
    for alpha in omega.values:
        num_l = 2 * e + 3 * sigma - alpha
        if num_l % 4:
            raise RuntimeError(
                f"index numerator {num_l} not divisible by 4; "
                "inconsistent invariants"
            )
        for beta in omega.values:
            num_r = 2 * e - 3 * sigma + beta
            if num_r % 4:
                raise RuntimeError(
                    f"index numerator {num_r} not divisible by 4; "
                    "inconsistent invariants"
                )
            pairs.add(IndexPair(lam=num_l // 4, rho=num_r // 4))
    return RealizableIndices(pairs=tuple(sorted(pairs)), omega=omega)


def chern_squares(pair: IndexPair, inv: ManifoldInvariants) -> tuple[int, int]:
    """Squares of the first Chern classes of the two almost complex
    structures off the singularities: (2e + 3s - 4lam, 4rho - 2e + 3s)."""
    e, s = inv.e, inv.sigma
    return (2 * e + 3 * s - 4 * pair.lam, 4 * pair.rho - 2 * e + 3 * s)


@dataclass(frozen=True)
class EulerRelation:
    mu: int
    feasible: bool
    note: str


def euler_relation(e_m: int, chi_n: int, chi_f: int) -> EulerRelation:
    """Total Milnor number from e(M) = e(N) e(F) + mu."""
    mu = e_m - chi_n * chi_f
    if mu < 0:
        return EulerRelation(mu=mu, feasible=False, note="negative total Milnor number")
    if mu == 0:
        return EulerRelation(
            mu=0,
            feasible=True,
            note="no topological critical points: all local links are unknots, "
            "the map is a topological fibration",
        )
    return EulerRelation(mu=mu, feasible=True, note="")


def spine_euler(chi_f: int, mu: int) -> int:
    """Euler characteristic of the singular-fiber spine: chi(F) + mu."""
    if mu < 0:
        raise InputError("total Milnor number must be nonnegative")
    return chi_f + mu


# --- obstruction engine ----------------------------------------------------

NO_SINGULAR_FIBRATION = "NoSingularFibration"
BASE_OR_FIBER_TORUS = "BaseOrFiberTorus"
TOPOLOGICAL_TORUS_BUNDLE = "TopologicalTorusBundle"
POSITIVE_DEFINITE_BOUNDS = "PositiveDefiniteBounds"
NO_OBSTRUCTION_FOUND = "NoObstructionFound"


@dataclass(frozen=True)
class Verdict:
    code: str
    detail: str
    witness: dict


def obstruct(
    inv: ManifoldInvariants,
    base_chi: Optional[int] = None,
    fiber_chi: Optional[int] = None,
) -> list[Verdict]:
    """Every obstruction verdict that applies to the given invariants."""
    verdicts: list[Verdict] = []
    if inv.b2 == 0 and inv.b1 >= 2:
        mu = 2 - 2 * inv.b1
        verdicts.append(Verdict(
            code=NO_SINGULAR_FIBRATION,
            detail=(
                f"b2 = 0 and b1 = {inv.b1} >= 2 force total Milnor number "
                f"mu = e = {mu} < 0; no singular fibration over any closed "
                "orientable surface exists"
            ),
            witness={"mu": mu},
        ))
    if inv.b2 == 0 and inv.b1 <= 1 and (base_chi is not None or fiber_chi is not None):
        verdicts.append(Verdict(
            code=BASE_OR_FIBER_TORUS,
            detail=(
                "b2 = 0 forces mu = e and the Euler relation e = e(N)e(F) + mu "
                "then gives e(N)e(F) = 0: the base or the generic fiber is a torus"
            ),
            witness={"constraint": "e(N)*e(F) = 0"},
        ))
    if inv.b1 == 1 and inv.b2 == 0 and base_chi in (None, 2):
        verdicts.append(Verdict(
            code=TOPOLOGICAL_TORUS_BUNDLE,
            detail=(
                "b1 = 1, b2 = 0 over the sphere: mu = e = 0, every local link "
                "is an unknot, so the map is a topological torus bundle"
            ),
            witness={"mu": 0},
        ))
    if inv.form is not None and inv.form.positive_definite:
        upper = 1 - inv.b1 + inv.b2
        lower = 1 - inv.b1
        verdicts.append(Verdict(
            code=POSITIVE_DEFINITE_BOUNDS,
            detail=(
                f"positive definite intersection form bounds the indices: "
                f"{upper} >= lambda and rho >= {lower}"
            ),
            witness={"lambda_max": upper, "rho_min": lower},
        ))
    if not verdicts:
        verdicts.append(Verdict(
            code=NO_OBSTRUCTION_FOUND,
            detail="no obstruction from these invariants",
            witness={},
        ))
    return verdicts


# --- built-in manifolds ----------------------------------------------------

_HYPERBOLIC = ((0, 1), (1, 0))

# even positive definite rank-8 form of determinant 1 (E8 Gram matrix)
_E8 = (
    (2, -1, 0, 0, 0, 0, 0, 0),
    (-1, 2, -1, 0, 0, 0, 0, 0),
    (0, -1, 2, -1, 0, 0, 0, 0),
    (0, 0, -1, 2, -1, 0, 0, 0),
    (0, 0, 0, -1, 2, -1, 0, -1),
    (0, 0, 0, 0, -1, 2, -1, 0),
    (0, 0, 0, 0, 0, -1, 2, 0),
    (0, 0, 0, 0, -1, 0, 0, 2),
)


def _direct_sum(*blocks):
    n = sum(len(b) for b in blocks)
    out = [[0] * n for _ in range(n)]
    offset = 0
    for b in blocks:
        for i, row in enumerate(b):
            for j, x in enumerate(row):
                out[offset + i][offset + j] = x
        offset += len(b)
    return out


def _neg(block):
    return tuple(tuple(-x for x in row) for row in block)


def builtin_manifold(tag: str) -> ManifoldInvariants:
    """Built-in closed 4-manifolds: s4, cp2, cp2bar, s2xs2, k3, m_s1xs3:<m>."""
    tag = tag.strip().lower()
    if tag == "s4":
        return ManifoldInvariants(b1=0, b2=0, e=2, sigma=0, name="S^4")
    if tag == "cp2":
        return ManifoldInvariants.from_form(0, IntersectionForm.from_rows([[1]]), name="CP^2")
    if tag == "cp2bar":
        return ManifoldInvariants.from_form(
            0, IntersectionForm.from_rows([[-1]]), name="CP^2-bar"
        )
    if tag == "s2xs2":
        return ManifoldInvariants.from_form(
            0, IntersectionForm.from_rows(_HYPERBOLIC), name="S^2 x S^2"
        )
    if tag == "k3":
        # -E8 + -E8 + 3H: even, rank 22, signature -16
        rows = _direct_sum(_neg(_E8), _neg(_E8), _HYPERBOLIC, _HYPERBOLIC, _HYPERBOLIC)
        return ManifoldInvariants.from_form(0, IntersectionForm.from_rows(rows), name="K3")
    if tag.startswith("m_s1xs3:"):
        try:
            m = int(tag.split(":", 1)[1])
        except ValueError:
            raise InputError(f"malformed builtin tag {tag!r}")
        if m < 0:
            raise InputError("connected-sum count must be nonnegative")
        return ManifoldInvariants(
            b1=m, b2=0, e=2 - 2 * m, sigma=0, name=f"#_{m}(S^1 x S^3)"
        )
    raise InputError(f"unknown builtin manifold {tag!r}")


BUILTIN_MANIFOLD_TAGS = ("s4", "cp2", "cp2bar", "s2xs2", "k3", "m_s1xs3:<m>")
