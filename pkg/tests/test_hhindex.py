"""Index pairs, the Omega window, and fibration obstructions."""

import itertools
import random

import pytest

from singfib import hhindex
from singfib.exactlin import InputError
from singfib.hhindex import (
    IndexPair,
    IntersectionForm,
    ManifoldInvariants,
    builtin_manifold,
    characteristic_coset,
    chern_squares,
    euler_relation,
    obstruct,
    omega_window,
    realizable_indices,
    spine_euler,
)


def random_unimodular_symmetric(rng, max_rank=4):
    """S = U diag(+-1) U^T for a random unimodular U: symmetric, det +-1."""
    n = rng.randint(1, max_rank)
    u = [[1 if i == j else 0 for j in range(n)] for i in range(n)]
    for _ in range(8):
        i, j = (rng.sample(range(n), 2) if n > 1 else (0, 0))
        if i == j:
            continue
        c = rng.randint(-2, 2)
        u[i] = [a + c * b for a, b in zip(u[i], u[j])]
    signs = [rng.choice([1, -1]) for _ in range(n)]
    rows = [
        [sum(u[i][k] * signs[k] * u[j][k] for k in range(n)) for j in range(n)]
        for i in range(n)
    ]
    return rows


def signature_oracle(rows):
    """Exact signature by symmetric congruence diagonalization over Q."""
    from fractions import Fraction

    a = [[Fraction(x) for x in r] for r in rows]
    n = len(a)
    sig = 0
    for k in range(n):
        # bring a nonzero diagonal entry to position k
        pivot = next((i for i in range(k, n) if a[i][i] != 0), None)
        if pivot is None:
            i, j = next(
                (i, j)
                for i in range(k, n)
                for j in range(k, n)
                if a[i][j] != 0
            )
            # a[i][i] = a[j][j] = 0, a[i][j] != 0: add row/col j to i
            for col in range(n):
                a[i][col] += a[j][col]
            for row in range(n):
                a[row][i] += a[row][j]
            pivot = i
        if pivot != k:
            a[k], a[pivot] = a[pivot], a[k]
            for row in a:
                row[k], row[pivot] = row[pivot], row[k]
        d = a[k][k]
        sig += 1 if d > 0 else -1
        for i in range(k + 1, n):
            f = a[i][k] / d
            if f:
                for col in range(n):
                    a[i][col] -= f * a[k][col]
                for row in range(n):
                    a[row][i] -= f * a[row][k]
    return sig


def brute_force_omega(rows, window, box):
    """Quadratic-form values on characteristic vectors inside the box."""
    form = IntersectionForm.from_rows(rows)
    n = form.rank
    w0 = characteristic_coset(form)
    values = set()
    for v in itertools.product(range(-box, box + 1), repeat=n):
        w = tuple(w0[i] + 2 * v[i] for i in range(n))
        val = form.evaluate(w, w)
        if abs(val) <= window:
            values.add(val)
    return values


class TestForm:
    def test_rejects_asymmetric(self):
        with pytest.raises(InputError):
            IntersectionForm.from_rows([[1, 2], [3, 1]])

    def test_rejects_non_unimodular(self):
        with pytest.raises(InputError):
            IntersectionForm.from_rows([[2]])

    def test_signature_and_parity(self):
        h = IntersectionForm.from_rows([[0, 1], [1, 0]])
        assert h.signature == 0 and h.parity == "even"
        p = IntersectionForm.from_rows([[1]])
        assert p.signature == 1 and p.parity == "odd"

    def test_k3_signature(self):
        k3 = builtin_manifold("k3")
        assert (k3.b2, k3.sigma, k3.e) == (22, -16, 24)
        assert k3.form.parity == "even"

    def test_signature_matches_diagonalization_oracle(self):
        rng = random.Random(2)
        for _ in range(60):
            rows = random_unimodular_symmetric(rng, max_rank=4)
            form = IntersectionForm.from_rows(rows)
            assert form.signature == signature_oracle(rows)
            assert abs(form.signature) <= form.rank
            assert (form.signature - form.rank) % 2 == 0


class TestManifoldInvariants:
    def test_euler_consistency_enforced(self):
        with pytest.raises(InputError):
            ManifoldInvariants(b1=0, b2=0, e=3, sigma=0)

    def test_signature_parity_enforced(self):
        with pytest.raises(InputError):
            ManifoldInvariants(b1=0, b2=2, e=4, sigma=1)

    def test_builtins_consistent(self):
        for tag in ("s4", "cp2", "cp2bar", "s2xs2", "k3", "m_s1xs3:3"):
            inv = builtin_manifold(tag)
            assert inv.e == 2 - 2 * inv.b1 + inv.b2

    def test_unknown_builtin(self):
        with pytest.raises(InputError):
            builtin_manifold("t4")


class TestOmegaWindow:
    def test_rank_zero(self):
        result = realizable_indices(builtin_manifold("s4"))
        assert result.omega.values == (0,)
        assert result.omega.complete

    def test_cp2(self):
        omega = omega_window(IntersectionForm.from_rows([[1]]), window=100)
        assert omega.values == (1, 9, 25, 49, 81)
        assert omega.complete

    def test_hyperbolic(self):
        h = IntersectionForm.from_rows([[0, 1], [1, 0]])
        omega = omega_window(h, window=16)
        assert omega.values == (-16, -8, 0, 8, 16)

    def test_matches_brute_force(self):
        rng = random.Random(9)
        for _ in range(25):
            rows = random_unimodular_symmetric(rng, max_rank=3)
            omega = omega_window(IntersectionForm.from_rows(rows), window=40, box=6)
            brute = brute_force_omega(rows, window=40, box=6)
            assert set(omega.values) <= brute or omega.complete
            sig = IntersectionForm.from_rows(rows).signature
            for val in omega.values:
                assert (val - sig) % 8 == 0


class TestRealizableIndices:
    def test_s4(self):
        result = realizable_indices(builtin_manifold("s4"))
        assert [(p.lam, p.rho) for p in result.pairs] == [(1, 1)]
        assert result.pairs[0].mu == 2

    def test_s1xs3_cross_m(self):
        result = realizable_indices(builtin_manifold("m_s1xs3:2"))
        assert [(p.lam, p.rho) for p in result.pairs] == [(-1, -1)]
        assert not result.pairs[0].feasible_as_milnor_total

    def test_cp2_lambda_list(self):
        result = realizable_indices(builtin_manifold("cp2"), window=100)
        assert sorted({p.lam for p in result.pairs}, reverse=True) == [2, 0, -4, -10, -18]

    def test_divisibility_always_holds(self):
        rng = random.Random(4)
        for _ in range(20):
            rows = random_unimodular_symmetric(rng, max_rank=3)
            inv = ManifoldInvariants.from_form(0, IntersectionForm.from_rows(rows))
            result = realizable_indices(inv, window=40, box=6)
            for p in result.pairs:
                c1, c2 = chern_squares(p, inv)
                assert c1 == 2 * inv.e + 3 * inv.sigma - 4 * p.lam
                assert c2 == 4 * p.rho - 2 * inv.e + 3 * inv.sigma
                assert (c1 - inv.sigma) % 8 == 0
                assert (c2 - inv.sigma) % 8 == 0


class TestEulerRelations:
    def test_matsumoto_torus_fibration(self):
        rel = euler_relation(2, 2, 0)
        assert rel.mu == 2 and rel.feasible
        assert spine_euler(0, 2) == 2

    def test_mu_zero_note(self):
        rel = euler_relation(0, 2, 0)
        assert rel.mu == 0
        assert "topological" in rel.note.lower() or "fibration" in rel.note.lower()


class TestObstruct:
    def test_no_singular_fibration(self):
        for m in range(2, 20):
            verdicts = obstruct(ManifoldInvariants(b1=m, b2=0, e=2 - 2 * m, sigma=0))
            codes = [v.code for v in verdicts]
            assert hhindex.NO_SINGULAR_FIBRATION in codes
            v = next(v for v in verdicts if v.code == hhindex.NO_SINGULAR_FIBRATION)
            assert v.witness["mu"] == 2 - 2 * m

    def test_torus_bundle(self):
        verdicts = obstruct(ManifoldInvariants(b1=1, b2=0, e=0, sigma=0))
        assert hhindex.TOPOLOGICAL_TORUS_BUNDLE in [v.code for v in verdicts]

    def test_positive_definite_bound(self):
        verdicts = obstruct(builtin_manifold("cp2"))
        assert hhindex.POSITIVE_DEFINITE_BOUNDS in [v.code for v in verdicts]

    def test_no_obstruction_on_s4(self):
        verdicts = obstruct(builtin_manifold("s4"))
        assert [v.code for v in verdicts] != []
