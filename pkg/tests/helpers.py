"""Shared generators and brute-force oracles for the test suite."""

import itertools

from nials.terms import (Clause, Literal, Polynomial, Rel, Sort, TermStore,
                         lit_evaluate)

RELS = (Rel.EQ, Rel.NEQ, Rel.LEQ, Rel.LT)


def random_monomial(rng, vids, max_deg):
    deg = rng.randint(0, max_deg) if vids else 0
    mono = {}
    for _ in range(deg):
        v = rng.choice(vids)
        mono[v] = mono.get(v, 0) + 1
    return tuple(sorted(mono.items()))


def random_poly(rng, vids, max_terms=3, max_deg=3, coeff=5):
    terms = {}
    for _ in range(rng.randint(1, max_terms)):
        m = random_monomial(rng, vids, max_deg)
        c = rng.randint(-coeff, coeff)
        terms[m] = terms.get(m, 0) + c
    return Polynomial(terms)


def random_clauses(rng, store, int_vars, bool_vars, n_clauses, max_len=3,
                   **poly_kwargs):
    """Random clause list over the given variables."""
    vids = [v.id for v in int_vars]
    clauses = []
    for _ in range(n_clauses):
        lits = []
        for _ in range(rng.randint(1, max_len)):
            if bool_vars and rng.random() < 0.3:
                lits.append(Literal(rng.random() < 0.5,
                                    bvar=rng.choice(bool_vars)))
            else:
                p = random_poly(rng, vids, **poly_kwargs)
                atom = store.mk_atom(p, rng.choice(RELS), Polynomial.zero())
                lits.append(Literal(rng.random() < 0.5, atom=atom))
        clauses.append(Clause(lits))
    return clauses


def random_instance(rng, n_int=3, n_bool=2, n_clauses=4, **kwargs):
    store = TermStore()
    int_vars = [store.new_var(f"x{i}", Sort.INT) for i in range(n_int)]
    bool_vars = [store.new_var(f"b{i}", Sort.BOOL) for i in range(n_bool)]
    clauses = random_clauses(rng, store, int_vars, bool_vars, n_clauses,
                             **kwargs)
    return store, clauses, int_vars, bool_vars


def box_clauses(store, int_vars, lo, hi):
    """Unit clauses confining every integer variable to [lo, hi]."""
    out = []
    for v in int_vars:
        p = Polynomial.var(v.id)
        out.append(Clause([Literal(
            True, atom=store.mk_atom(Polynomial.const(lo), Rel.LEQ, p))]))
        out.append(Clause([Literal(
            True, atom=store.mk_atom(p, Rel.LEQ, Polynomial.const(hi)))]))
    return out


def assignments(int_vars, lo, hi, bool_vars):
    """Every complete assignment over the box [lo, hi] per integer variable."""
    for ivals in itertools.product(range(lo, hi + 1), repeat=len(int_vars)):
        iv = {v.id: a for v, a in zip(int_vars, ivals)}
        for bvals in itertools.product((False, True), repeat=len(bool_vars)):
            bv = {v.id: a for v, a in zip(bool_vars, bvals)}
            yield iv, bv


def clauses_sat(clauses, iv, bv):
    return all(any(lit_evaluate(lit, iv, bv) for lit in c) for c in clauses)


def brute_force(clauses, int_vars, lo, hi, bool_vars):
    """First satisfying assignment by enumeration, or None."""
    for iv, bv in assignments(int_vars, lo, hi, bool_vars):
        if clauses_sat(clauses, iv, bv):
            return iv, bv
    return None


def entailed(clauses, lemma, int_vars, lo, hi, bool_vars):
    """Whether the clause set entails the lemma over the box, by enumeration."""
    for iv, bv in assignments(int_vars, lo, hi, bool_vars):
        if clauses_sat(clauses, iv, bv) and not any(
                lit_evaluate(lit, iv, bv) for lit in lemma):
            return False
    return True
