"""Glue between the CDCL-style core and the local-search procedure.

Covers the conflict-count schedule that decides when to run local search,
construction of the search problem from the current solver state, and
feeding the result back (value cache and variable activities).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

from . import localsearch
from .costfn import compile_clauses
from .intervals import IntervalSet
from .terms import Literal, Sort, Variable


class LsSchedule:
    """Polynomially growing conflict thresholds for local-search calls.

    The first call fires at `base` conflicts; after the k-th call the
    threshold grows by floor(base * k * log10(k + 9)^3).
    """

    def __init__(self, base: int = 50):
        self.base = base
        self.ls_calls = 0
        self.next_threshold = base

    def due(self, conflicts: int) -> bool:
        return conflicts >= self.next_threshold

    def advance(self):
        self.ls_calls += 1
        k = self.ls_calls
        self.next_threshold += math.floor(
            self.base * k * math.log10(k + 9) ** 3)


def build_initial_assignment(variables, trail, cache, feas):
    """Starting point for local search from the current solver state.

    Trail-assigned variables are fixed; the rest start from their cached
    value if it is still feasible, else from the feasibility set's pick.
    """
    fixed = {}
    mu_int = {}
    mu_bool = {}
    free = []
    for x in variables:
        if x.sort is Sort.INT:
            v = trail.value_of_var(x)
            if v is not None:
                fixed[x.id] = v
                continue
            fs = feas.get(x)
            c = cache.get(x)
            if isinstance(c, int) and not isinstance(c, bool) and c in fs:
                mu_int[x.id] = c
            else:
                mu_int[x.id] = fs.pick_value()
            free.append(x)
        else:
            b = trail.bool_value_of(Literal(True, bvar=x))
            if b is not None:
                fixed[x.id] = b
                continue
            c = cache.get(x)
            mu_bool[x.id] = c if isinstance(c, bool) else True
            free.append(x)
    return free, fixed, mu_int, mu_bool


def build_ls_formula(clauses, trail):
    """Simplify the clause set under the trail for local search.

    Clauses with a trail-true literal are replaced by that literal as a
    unit; trail-false literals are dropped from their clause and their
    negations conjoined as units.  Returns a list of literal lists.
    """
    units = {}
    out = []
    for clause in clauses:
        kept = []
        true_lit = None
        for lit in clause:
            v = trail.value_of_lit(lit)
            if v is True:
                true_lit = lit
                break
            if v is False:
                neg = lit.negate()
                units[neg.skey] = neg
            else:
                kept.append(lit)
        if true_lit is not None:
            units[true_lit.skey] = true_lit
        else:
            out.append(kept)
    out.extend([u] for u in units.values())
    return out


def should_run_ls(schedule: LsSchedule, conflicts: int, enabled: bool) -> bool:
    return enabled and schedule.due(conflicts)


def apply_ls_result(result, free_vars, cache, bump_var, top_k: int = 10):
    """Write the final assignment into the value cache and bump activities.

    Only non-fixed variables are written.  The `top_k` variables with the
    largest cost decrease get a decision-activity bump via `bump_var`.
    """
    for x in free_vars:
        if x.sort is Sort.BOOL:
            cache.set(x, result.bool_values[x.id])
        else:
            cache.set(x, result.int_values[x.id])
    ranked = sorted(result.activity.items(), key=lambda kv: (-kv[1], kv[0]))
    for vid, score in ranked[:top_k]:
        if score > 0:
            bump_var(vid)


@dataclass
class LsController:
    """Runs scheduled local-search calls against a solver instance."""

    enabled: bool = True
    base: int = 50
    budget_per_var: int = 100
    acc: float = localsearch.DEFAULT_ACC
    top_k: int = 10
    schedule: LsSchedule = field(init=False)
    last_result: object = field(init=False, default=None)

    def __post_init__(self):
        self.schedule = LsSchedule(self.base)

    def should_run(self, conflicts: int) -> bool:
        return should_run_ls(self.schedule, conflicts, self.enabled)

    def run(self, solver) -> object:
        """One local-search call; returns the LsResult."""
        self.schedule.advance()
        solver.stats.ls_calls += 1
        free, fixed, mu_int, mu_bool = build_initial_assignment(
            solver.formula.variables, solver.trail, solver.cache, solver.feas)
        if not free:
            return None
        clauses = build_ls_formula(solver.formula.clauses, solver.trail)
        cost = compile_clauses(clauses, fixed=fixed)
        feasible = {
            x.id: solver.feas.get(x) for x in free if x.sort is Sort.INT
        }
        problem = localsearch.LsProblem(
            vars=free,
            fixed=fixed,
            feasible=feasible,
            mu0_int=mu_int,
            mu0_bool=mu_bool,
            cost=cost,
            budget=self.budget_per_var * len(free),
        )
        result = localsearch.run(problem, localsearch.MoveEngine(self.acc))
        solver.stats.ls_moves_accepted += result.moves_accepted
        apply_ls_result(result, free, solver.cache, solver.bump_var, self.top_k)
        self.last_result = result
        return result
