"""Torus mapping-class calculus in SL(2,Z).

Dehn twist words, orders, conjugacy canonical forms, the two-twist
triviality certificate, and the abelianization map SL(2,Z) -> Z/12.

Twist convention: T_c(x) = x + k (x ^ c) c with x ^ c = x1*c2 - x2*c1.
The opposite handedness is the inverse twist; every statement computed
here (triviality, orders, conjugacy) is convention-independent.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional, Sequence

from .exactlin import InputError

R_LETTER = "R"
L_LETTER = "L"


@dataclass(frozen=True)
class Sl2Element:
    a: int
    b: int
    c: int
    d: int

    def __post_init__(self):
        if self.a * self.d - self.b * self.c != 1:
            raise InputError(
                f"matrix [[{self.a},{self.b}],[{self.c},{self.d}]] has determinant != 1"
            )

    @classmethod
    def from_rows(cls, rows: Sequence[Sequence[int]]) -> "Sl2Element":
        (a, b), (c, d) = rows
        return cls(int(a), int(b), int(c), int(d))

    @classmethod
    def from_flat(cls, flat: Sequence[int]) -> "Sl2Element":
        a, b, c, d = (int(x) for x in flat)
        return cls(a, b, c, d)

    @classmethod
    def identity(cls) -> "Sl2Element":
        return cls(1, 0, 0, 1)

    def __mul__(self, other: "Sl2Element") -> "Sl2Element":
        return Sl2Element(
            self.a * other.a + self.b * other.c,
            self.a * other.b + self.b * other.d,
            self.c * other.a + self.d * other.c,
            self.c * other.b + self.d * other.d,
        )

    def inverse(self) -> "Sl2Element":
        return Sl2Element(self.d, -self.b, -self.c, self.a)

    def neg(self) -> "Sl2Element":
        return Sl2Element(-self.a, -self.b, -self.c, -self.d)

    @property
    def trace(self) -> int:
        return self.a + self.d

    @property
    def is_identity(self) -> bool:
        return (self.a, self.b, self.c, self.d) == (1, 0, 0, 1)

    def flat(self) -> tuple[int, int, int, int]:
        return (self.a, self.b, self.c, self.d)

    def apply(self, v: Sequence[int]) -> tuple[int, int]:
        x, y = v
        return (self.a * x + self.b * y, self.c * x + self.d * y)


R = Sl2Element(1, 1, 0, 1)
L = Sl2Element(1, 0, 1, 1)


@dataclass(frozen=True)
class TorusCurve:
    """Unoriented essential simple closed curve on the torus, as a
    primitive class (p, q) with (p, q) ~ (-p, -q)."""

    p: int
    q: int

    def __post_init__(self):
        if math.gcd(self.p, self.q) != 1:
            raise InputError(f"curve class ({self.p},{self.q}) is not primitive")

    @classmethod
    def of(cls, p: int, q: int) -> "TorusCurve":
        # normalize: first nonzero coordinate positive
        if p < 0 or (p == 0 and q < 0):
            p, q = -p, -q
        return cls(p, q)

    def wedge(self, other: "TorusCurve") -> int:
        return self.p * other.q - self.q * other.p

    def same_unoriented(self, other: "TorusCurve") -> bool:
        return (self.p, self.q) in {(other.p, other.q), (-other.p, -other.q)}


@dataclass(frozen=True)
class TwistWord:
    """Ordered Dehn-twist word; letters are (curve, nonzero exponent)."""

    letters: tuple[tuple[TorusCurve, int], ...]

    @classmethod
    def of(cls, letters: Sequence[tuple[TorusCurve, int]]) -> "TwistWord":
        merged: list[tuple[TorusCurve, int]] = []
        for curve, k in letters:
            k = int(k)
            if merged and merged[-1][0].same_unoriented(curve):
                curve0, k0 = merged.pop()
                k += k0
                curve = curve0
            if k:
                merged.append((curve, k))
        return cls(tuple(merged))


def twist_matrix(c: TorusCurve, k: int) -> Sl2Element:
    """Action of T_c^k on H_1(T^2): x -> x + k (x ^ c) c."""
    p, q = c.p, c.q
    return Sl2Element(1 + k * p * q, -k * p * p, k * q * q, 1 - k * p * q)


def evaluate_word(w: TwistWord) -> Sl2Element:
    out = Sl2Element.identity()
    for curve, k in w.letters:
        out = out * twist_matrix(curve, k)
    return out


def element_order(g: Sl2Element) -> Optional[int]:
    """Multiplicative order in SL(2,Z); None means infinite.

    Finite orders are 1, 2, 3, 4, 6 exactly, determined by the trace.
    """
    t = g.trace
    if t == 2:
        return 1 if g.is_identity else None
    if t == -2:
        return 2 if g.neg().is_identity else None
    return {0: 4, 1: 6, -1: 3}.get(t)


# --- conjugacy canonical forms ------------------------------------------


@dataclass(frozen=True)
class ConjugacyTag:
    """Complete conjugacy invariant: equal tags iff conjugate in SL(2,Z).

    kind 'elliptic': order plus the Gauss-reduced binary quadratic form of
    the matrix (with rotation sense); 'parabolic': sign eps and the n with
    g ~ eps*[[1,n],[0,1]]; 'hyperbolic': sign and the cyclic R/L word in
    lexicographically minimal rotation.
    """

    kind: str
    order: Optional[int] = None
    form: Optional[tuple[int, int, int]] = None
    eps: Optional[int] = None
    n: Optional[int] = None
    word: Optional[str] = None

    def describe(self) -> str:
        if self.kind == "elliptic":
            return f"elliptic of order {self.order}, reduced form {self.form}"
        if self.kind == "parabolic":
            return f"parabolic, eps={self.eps:+d}, n={self.n}"
        return f"hyperbolic, sign={self.eps:+d}, cyclic word {self.word}"


def _reduce_positive_form(A: int, B: int, C: int) -> tuple[int, int, int]:
    """Gauss reduction of a positive definite form Ax^2+Bxy+Cy^2.

    The reduced representative (-A < B <= A <= C, B >= 0 if A == C) is the
    unique one in its proper equivalence class.
    """
    while True:
        if C < A:
            A, B, C = C, -B, A
            continue
        if B > A or B <= -A:
            # translate: B -> B - 2kA with B + 2kA in (-A, A]
            k = (B + A - 1) // (2 * A) if A else 0
            B2 = B - 2 * k * A
            C = C - k * B + k * k * A
            B = B2
            continue
        if A == C and B < 0:
            B = -B
            continue
        return (A, B, C)


def _elliptic_tag(g: Sl2Element) -> ConjugacyTag:
    # g <-> definite form c x^2 + (d-a) xy - b y^2; conjugacy of matrices
    # is proper equivalence of forms, with the rotation sense in sign(c).
    A, B, C = g.c, g.d - g.a, -g.b
    sense = 1 if A > 0 else -1
    if sense < 0:
        A, B, C = -A, -B, -C
    return ConjugacyTag(
        kind="elliptic",
        order=element_order(g),
        eps=sense,
        form=_reduce_positive_form(A, B, C),
    )


def _parabolic_data(g: Sl2Element) -> tuple[int, int]:
    """Return (eps, n) with g conjugate to eps * [[1, n], [0, 1]]."""
    eps = 1 if g.trace == 2 else -1
    m = g if eps == 1 else g.neg()
    if m.is_identity:
        return eps, 0
    # m = twist_matrix(c, k) for the primitive fixed vector c of m
    # entries of m - I are k*(pq, -p^2, q^2, -pq)
    if m.c:
        # (a-1, c) = k*q*(p, q) for the primitive fixed vector (p, q)
        g0 = math.gcd(m.a - 1, m.c)
        q = m.c // g0
        k = m.c // (q * q)
    else:
        k = -m.b  # m = [[1, b], [0, 1]] is the twist along (1, 0) with k = -b
    # all primitive vectors are SL(2,Z)-equivalent, so m ~ T_{(1,0)}^k
    return eps, -k


class _Surd:
    """(p + q*sqrt(D)) / r with integer p, q, r and fixed nonsquare D > 0."""

    __slots__ = ("p", "q", "r", "D")

    def __init__(self, p: int, q: int, r: int, D: int):
        if r == 0:
            raise ZeroDivisionError
        g = math.gcd(math.gcd(p, q), r)
        if g:
            p, q, r = p // g, q // g, r // g
        if r < 0:
            p, q, r = -p, -q, -r
        self.p, self.q, self.r, self.D = p, q, r, D

    def key(self) -> tuple[int, int, int]:
        return (self.p, self.q, self.r)

    def floor(self) -> int:
        # floor((p + q*sqrt(D)) / r) with r > 0, exactly
        s = math.isqrt(self.q * self.q * self.D)
        qs = s if self.q >= 0 else -(s + 1)  # floor(q*sqrt(D)), D nonsquare
        num = self.p + qs
        return num // self.r

    def minus_int(self, n: int) -> "_Surd":
        return _Surd(self.p - n * self.r, self.q, self.r, self.D)

    def reciprocal(self) -> "_Surd":
        # r / (p + q*sqrt(D)) = r(p - q*sqrt(D)) / (p^2 - q^2 D)
        denom = self.p * self.p - self.q * self.q * self.D
        return _Surd(self.r * self.p, -self.r * self.q, denom, self.D)


def _continued_fraction_cycle(x: _Surd) -> tuple[list[int], int]:
    """Periodic digit cycle of x and the expansion index where it starts.

    Digit parity matters downstream: digits at even expansion index become
    R-runs, at odd index L-runs, so the caller needs the start offset.
    """
    seen: dict[tuple[int, int, int], int] = {}
    digits: list[int] = []
    while True:
        key = x.key()
        if key in seen:
            start = seen[key]
            return digits[start:], start
        seen[key] = len(digits)
        n = x.floor()
        digits.append(n)
        x = x.minus_int(n).reciprocal()


def _digit_matrix(d: int) -> tuple[tuple[int, int], tuple[int, int]]:
    return ((d, 1), (1, 0))


def _word_matrix(digits: Sequence[int]):
    m = ((1, 0), (0, 1))
    for d in digits:
        n = _digit_matrix(d)
        m = (
            (m[0][0] * n[0][0] + m[0][1] * n[1][0], m[0][0] * n[0][1] + m[0][1] * n[1][1]),
            (m[1][0] * n[0][0] + m[1][1] * n[1][0], m[1][0] * n[0][1] + m[1][1] * n[1][1]),
        )
    return m


def _min_rotation(s: str) -> str:
    # minimal rotation among those starting with R, so words read R-first
    rots = [s[i:] + s[:i] for i in range(len(s))]
    r_first = [w for w in rots if w.startswith(R_LETTER)]
    return min(r_first) if r_first else s


def _hyperbolic_word(g: Sl2Element) -> str:
    """Cyclic word in R, L of the conjugacy class of g, trace(g) > 2.

    The attracting fixed point of g is a quadratic irrational whose
    continued-fraction cycle [d1, ..., dk] gives the primitive stabilizer
    P = M(d1)...M(dk) (doubled when k is odd, to land in SL rather than GL);
    g = P^j with j fixed by the trace. The word R^{d1} L^{d2} ... repeated j
    times is returned in lexicographically minimal rotation.
    """
    t = g.trace
    D = t * t - 4
    # b, c != 0 for hyperbolic integer matrices (else trace would be +-2)
    x = _Surd(g.a - g.d, 1, 2 * g.c, D)
    cycle, start = _continued_fraction_cycle(x)
    if len(cycle) % 2:
        cycle = cycle + cycle
    p = _word_matrix(cycle)
    trace_p = p[0][0] + p[1][1]
    digits = list(cycle)
    while trace_p < t:
        # g is a proper power of the primitive stabilizer
        prev = trace_p
        digits += cycle
        m = _word_matrix(digits)
        trace_p = m[0][0] + m[1][1]
        if trace_p <= prev:  # pragma: no cover - safety against bad cycles
            raise RuntimeError("hyperbolic reduction failed to converge")
    if trace_p != t:  # pragma: no cover
        raise RuntimeError("hyperbolic trace mismatch")
    letters = []
    for i, d in enumerate(digits):
        even = (start + i) % 2 == 0
        letters.append((R_LETTER if even else L_LETTER) * d)
    return _min_rotation("".join(letters))


def conjugacy_class(g: Sl2Element) -> ConjugacyTag:
    """Canonical conjugacy-class tag; two elements are conjugate in
    SL(2,Z) exactly when their tags are equal."""
    t = g.trace
    if abs(t) < 2:
        return _elliptic_tag(g)
    if abs(t) == 2:
        eps, n = _parabolic_data(g)
        return ConjugacyTag(kind="parabolic", eps=eps, n=n)
    eps = 1 if t > 2 else -1
    m = g if eps == 1 else g.neg()
    return ConjugacyTag(kind="hyperbolic", eps=eps, word=_hyperbolic_word(m))


# --- Ishida's two-generator classification ------------------------------

ISHIDA_ISOTOPIC = "isotopic"
ISHIDA_ABELIAN_UNREACHABLE = "rank2_abelian_unreachable"
ISHIDA_FREE_RANK2 = "free_rank2"
ISHIDA_FULL_SL2 = "full_sl2"


def ishida_class(c1: TorusCurve, c2: TorusCurve) -> str:
    """Type of the subgroup generated by the two Dehn twists.

    Intersection number 0 means the curves are isotopic on the torus (the
    disjoint-nonisotopic case of the general classification cannot occur
    there), 1 gives all of SL(2,Z), and >= 2 a free group of rank two.
    """
    delta = abs(c1.wedge(c2))
    if delta == 0:
        return ISHIDA_ISOTOPIC
    if delta == 1:
        return ISHIDA_FULL_SL2
    return ISHIDA_FREE_RANK2


@dataclass(frozen=True)
class TwoTwistVerdict:
    trivial: bool
    certificate: str
    product: Sl2Element


def two_twist_trivial(c1: TorusCurve, k1: int, c2: TorusCurve, k2: int) -> TwoTwistVerdict:
    """Decide T_{c1}^{k1} T_{c2}^{k2} = 1, with a certificate.

    Triviality forces c1 = +-c2 and k1 + k2 = 0: twists along curves of
    intersection number 1 act as opposite parabolics whose nontrivial
    powers cannot cancel, and higher intersection number generates a free
    group.
    """
    word = TwistWord.of([(c1, k1), (c2, k2)])
    product = evaluate_word(word)
    if product.is_identity:
        if k1 == 0 and k2 == 0:
            certificate = "trivial: both exponents are zero"
        else:
            assert c1.same_unoriented(c2) and k1 + k2 == 0
            certificate = (
                f"trivial: curves agree up to sign and k1 + k2 = {k1}+{k2} = 0"
            )
        return TwoTwistVerdict(trivial=True, certificate=certificate, product=product)
    delta = abs(c1.wedge(c2))
    if delta == 1:
        reason = (
            "nontrivial: the twists act as opposite parabolics generating "
            "SL(2,Z); no nonzero powers cancel"
        )
    elif delta == 0:
        reason = "nontrivial: same twist curve but k1 + k2 != 0"
    else:
        reason = (
            f"nontrivial: intersection number {delta} >= 2, the twists "
            "generate a free group of rank 2"
        )
    return TwoTwistVerdict(trivial=False, certificate=reason, product=product)


def abelianization_image(g: Sl2Element) -> int:
    """Image of g in SL(2,Z)^ab = Z/12.

    Decomposes g into the standard generators S = [[0,-1],[1,0]] and
    T = [[1,1],[0,1]] by the Euclidean algorithm; T maps to 1 and S to 9
    (from the abelianized presentation <S, T | S^4, (ST)^3 S^-2>).
    Vanishing image is necessary for g to be a product of commutators.
    """
    total = 0
    while g.c != 0:
        q = g.a // g.c
        # g = T^q S g'  with  g' = S^-1 T^-q g
        total += q + 9
        g = Sl2Element(g.c, g.d, q * g.c - g.a, q * g.d - g.b)
    if g.a == -1:
        total += 6  # -I = S^2 maps to 18 = 6 (mod 12)
        g = g.neg()
    total += g.b
    return total % 12
