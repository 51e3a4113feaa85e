"""Polynomials, atoms, literals, clauses, and the interning store."""

import random

import pytest
from hypothesis import given
from hypothesis import strategies as st

from nials.terms import (Atom, Clause, Literal, Polynomial, Rel, Sort,
                         TermStore, lit_evaluate, normalize_poly)

P = Polynomial


def poly_strategy(n_vars=3, max_terms=4, max_deg=3, coeff=6):
    mono = st.lists(
        st.tuples(st.integers(0, n_vars - 1), st.integers(1, max_deg)),
        max_size=2).map(lambda ps: tuple(sorted(dict(ps).items())))
    return st.dictionaries(mono, st.integers(-coeff, coeff),
                           max_size=max_terms).map(Polynomial)


values = st.fixed_dictionaries({0: st.integers(-5, 5),
                                1: st.integers(-5, 5),
                                2: st.integers(-5, 5)})


class TestPolynomial:
    def test_constructors(self):
        assert P.zero().is_constant()
        assert P.zero().constant_value() == 0
        assert P.const(7).constant_value() == 7
        assert P.var(0).degree() == 1
        assert P.var(0).variables == frozenset({0})

    def test_zero_coefficients_dropped(self):
        p = P.var(0) - P.var(0)
        assert p == P.zero()
        assert not p.terms

    def test_arithmetic_example(self):
        x, y = P.var(0), P.var(1)
        p = (x + y) * (x - y)
        assert p == x * x - y * y
        assert p.degree() == 2

    @given(poly_strategy(), poly_strategy(), values)
    def test_add_matches_evaluation(self, p, q, vals):
        assert (p + q).evaluate(vals) == p.evaluate(vals) + q.evaluate(vals)

    @given(poly_strategy(), poly_strategy(), values)
    def test_mul_matches_evaluation(self, p, q, vals):
        assert (p * q).evaluate(vals) == p.evaluate(vals) * q.evaluate(vals)

    @given(poly_strategy(), values)
    def test_neg_matches_evaluation(self, p, vals):
        assert (-p).evaluate(vals) == -p.evaluate(vals)

    @given(poly_strategy(), poly_strategy())
    def test_hash_consistent_with_eq(self, p, q):
        if p == q:
            assert hash(p) == hash(q)

    @given(poly_strategy(), st.integers(-5, 5), values)
    def test_substitute_partial_evaluation(self, p, v0, vals):
        sub = p.substitute({0: v0})
        assert 0 not in sub.variables
        full = dict(vals)
        full[0] = v0
        assert sub.evaluate(full) == p.evaluate(full)

    def test_univariate_coeffs(self):
        x = P.var(0)
        p = x * x * x - x.scale(2) + P.const(5)
        assert p.univariate_coeffs(0) == [5, -2, 0, 1]
        with pytest.raises(ValueError):
            (x + P.var(1)).univariate_coeffs(0)

    def test_content_and_leading_coeff(self):
        p = P.var(0).scale(6) + P.const(9)
        assert p.content() == 3
        assert P.zero().content() == 0
        assert (P.const(2) - P.var(0)).leading_coeff() == -1


class TestRel:
    @pytest.mark.parametrize("rel,holds,fails", [
        (Rel.EQ, 0, 1),
        (Rel.NEQ, 1, 0),
        (Rel.LEQ, 0, 1),
        (Rel.LT, -1, 0),
    ])
    def test_holds(self, rel, holds, fails):
        assert rel.holds(holds)
        assert not rel.holds(fails)


class TestNormalization:
    def test_content_divides_out(self):
        p = P.var(0).scale(4) + P.const(8)
        q, rel = normalize_poly(p, Rel.EQ)
        assert q == P.var(0) + P.const(2)
        assert rel is Rel.EQ

    def test_inexact_division_kept_for_leq(self):
        # 2x + 3 <= 0 must not become x + 1.5 <= 0 (or a rounded variant).
        p = P.var(0).scale(2) + P.const(3)
        q, _ = normalize_poly(p, Rel.LEQ)
        assert q == p

    def test_eq_sign_canonical(self):
        x = P.var(0)
        a, _ = normalize_poly(x - P.const(3), Rel.EQ)
        b, _ = normalize_poly(P.const(3) - x, Rel.EQ)
        assert a == b

    def test_normalization_preserves_solutions(self):
        rng = random.Random(7)
        for _ in range(200):
            terms = {}
            for _ in range(rng.randint(1, 3)):
                m = tuple(sorted({0: rng.randint(1, 2)}.items())) \
                    if rng.random() < 0.7 else ()
                terms[m] = terms.get(m, 0) + rng.randint(-6, 6) * 2
            p = Polynomial(terms)
            for rel in (Rel.EQ, Rel.NEQ, Rel.LEQ, Rel.LT):
                q, qrel = normalize_poly(p, rel)
                for v in range(-10, 11):
                    assert rel.holds(p.evaluate({0: v})) == \
                        qrel.holds(q.evaluate({0: v}))


class TestLiteralsAndClauses:
    def setup_method(self):
        self.store = TermStore()
        self.x = self.store.new_var("x", Sort.INT)
        self.b = self.store.new_var("b", Sort.BOOL)

    def atom(self, poly, rel=Rel.EQ):
        return self.store.mk_atom(poly, rel, P.zero())

    def test_negate_roundtrip(self):
        lit = Literal(True, atom=self.atom(P.var(self.x.id)))
        assert lit.negate().negate() == lit
        assert lit.negate().key == lit.key
        assert lit.negate().skey != lit.skey

    def test_lit_evaluate(self):
        lit = Literal(True, atom=self.atom(P.var(self.x.id) - P.const(2)))
        assert lit_evaluate(lit, {self.x.id: 2}, {})
        assert not lit_evaluate(lit, {self.x.id: 3}, {})
        blit = Literal(False, bvar=self.b)
        assert lit_evaluate(blit, {}, {self.b.id: False})

    def test_clause_dedup(self):
        lit = Literal(True, bvar=self.b)
        c = Clause([lit, lit, lit.negate()])
        assert len(c) == 2
        assert c.is_tautology()

    def test_clause_variables(self):
        lit = Literal(True, atom=self.atom(P.var(self.x.id)))
        assert Clause([lit]).variables() == {self.x.id}


class TestTermStore:
    def test_atom_interning(self):
        store = TermStore()
        x = store.new_var("x", Sort.INT)
        a = store.mk_atom(P.var(x.id), Rel.EQ, P.const(1))
        b = store.mk_atom(P.var(x.id).scale(2), Rel.EQ, P.const(2))
        assert a is b

    def test_fresh_var_names_unique(self):
        store = TermStore()
        v1 = store.fresh_var("def", Sort.BOOL)
        v2 = store.fresh_var("def", Sort.BOOL)
        assert v1.name != v2.name
        assert v1.is_aux and v2.is_aux

    def test_duplicate_name_rejected(self):
        store = TermStore()
        store.new_var("x", Sort.INT)
        with pytest.raises(Exception):
            store.new_var("x", Sort.INT)
