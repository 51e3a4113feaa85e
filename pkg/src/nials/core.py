"""The model-constructing search loop.

A single trail carries Boolean assignments and integer model assignments.
Propagation combines clause-level Boolean constraint propagation, semantic
evaluation of fully assigned atoms, and per-variable feasibility narrowing
from unit constraints.  Conflicts are explained with exclusion literals
(negated `x = value` atoms) and resolved to a single literal at the
conflict level before backjumping.
"""

from __future__ import annotations

import enum
import heapq
import time
from dataclasses import dataclass, field
from typing import Optional

from .bridge import LsController
from .feasibility import EmptyConflict, FeasibilityMap, Singleton
from .terms import (Clause, Formula, Literal, Polynomial, Rel, Sort,
                    TermStore, Variable)
from .trail import Kind, Reason, Trail, ValueCache


class Answer(enum.Enum):
    SAT = "sat"
    UNSAT = "unsat"
    UNKNOWN = "unknown"


@dataclass
class Stats:
    conflicts: int = 0
    decisions: int = 0
    propagations: int = 0
    theory_assignments: int = 0
    ls_calls: int = 0
    ls_moves_accepted: int = 0

    KEYS = ("conflicts", "decisions", "propagations", "theory_assignments",
            "ls_calls", "ls_moves_accepted")

    def as_dict(self) -> dict:
        return {k: getattr(self, k) for k in self.KEYS}


@dataclass
class SolverConfig:
    ls_enabled: bool = True
    ls_threshold_base: int = 50
    ls_budget_per_var: int = 100
    acc: float = 1.2
    seed: int = 0
    max_conflicts: Optional[int] = None
    timeout_ms: Optional[int] = None


_ACTIVITY_DECAY = 0.95
_ACTIVITY_RESCALE = 1e100


class Solver:
    """One-shot satisfiability check for a clause set over a term store."""

    def __init__(self, store: TermStore, formula: Formula,
                 config: Optional[SolverConfig] = None):
        self.store = store
        self.formula = formula
        self.config = config or SolverConfig()
        self.stats = Stats()
        self.trail = Trail()
        self.feas = FeasibilityMap()
        self.cache = ValueCache()
        self.clauses: list[Clause] = []
        self.active: list[Clause] = []
        self.occurs: dict[int, list] = {}
        self._registered: set[int] = set()
        self._settled: set[int] = set()
        self._pending_atoms: list = []
        self._root_unsat = False
        self.qhead = 0
        self.activity: dict[int, float] = {}
        self._var_inc = 1.0
        self._heap: list = []
        self._decidable = {x.id for x in formula.variables}
        for x in formula.variables:
            heapq.heappush(self._heap, (0.0, x.id))
        for clause in formula.clauses:
            self._attach_clause(clause)
        self.ls = LsController(
            enabled=self.config.ls_enabled,
            base=self.config.ls_threshold_base,
            budget_per_var=self.config.ls_budget_per_var,
            acc=self.config.acc,
        ) if self.config.ls_enabled else None
        self.answer: Optional[Answer] = None
        self.model_int: dict[int, int] = {}
        self.model_bool: dict[int, bool] = {}

    # -- clause and atom bookkeeping ----------------------------------------

    def _attach_clause(self, clause: Clause):
        if not clause.literals:
            self._root_unsat = True
        self.clauses.append(clause)
        self.active.append(clause)
        for lit in clause:
            if lit.atom is not None:
                self._register_atom(lit.atom)

    def _register_atom(self, atom):
        if atom.id in self._registered:
            return
        self._registered.add(atom.id)
        if atom.poly.is_constant():
            self._pending_atoms.append(atom)
            return
        for vid in atom.poly.variables:
            self.occurs.setdefault(vid, []).append(atom)

    def bump_var(self, vid: int):
        a = self.activity.get(vid, 0.0) + self._var_inc
        if a > _ACTIVITY_RESCALE:
            for k in self.activity:
                self.activity[k] *= 1.0 / _ACTIVITY_RESCALE
            self._var_inc *= 1.0 / _ACTIVITY_RESCALE
            a = self.activity.get(vid, 0.0) + self._var_inc
        self.activity[vid] = a
        if vid in self._decidable:
            heapq.heappush(self._heap, (-a, vid))

    def _decay_activity(self):
        self._var_inc /= _ACTIVITY_DECAY

    # -- exclusion literals -------------------------------------------------

    def _excl_neg(self, vid: int) -> Literal:
        """¬(x = α) for the variable's current trail value."""
        v = self.trail.var_value[vid]
        atom = self.store.mk_atom(Polynomial.var(vid), Rel.EQ,
                                  Polynomial.const(v))
        return Literal(False, atom=atom)

    def _excl_pattern(self, atom):
        """(vid, c) if the atom is literally ``x − c = 0``, else None."""
        if atom.rel is not Rel.EQ:
            return None
        p = atom.poly
        if len(p.variables) != 1 or p.degree() != 1:
            return None
        vid = next(iter(p.variables))
        if p.terms.get(((vid, 1),)) != 1:
            return None
        return vid, -p.terms.get((), 0)

    # -- propagation --------------------------------------------------------

    def propagate(self):
        """Run to fixpoint; returns conflict clause literals or None."""
        trail = self.trail
        while True:
            while self._pending_atoms:
                c = self._check_atom(self._pending_atoms.pop())
                if c is not None:
                    return c
            while self.qhead < len(trail.elements):
                elem = trail.elements[self.qhead]
                self.qhead += 1
                if elem.kind is Kind.MODEL_ASSIGNMENT:
                    c = self._on_assignment(elem)
                elif elem.lit.atom is not None:
                    c = self._check_atom(elem.lit.atom)
                else:
                    c = None
                if c is not None:
                    return c
            c = self._bcp_scan()
            if c is not None:
                return c
            if self.qhead >= len(trail.elements) and not self._pending_atoms:
                return None

    def _on_assignment(self, elem):
        occ = self.occurs.get(elem.var.id)
        if not occ:
            return None
        keep = []
        conflict = None
        for i, atom in enumerate(occ):
            if atom.id in self._settled:
                continue
            conflict = self._check_atom(atom)
            if atom.id not in self._settled:
                keep.append(atom)
            if conflict is not None:
                keep.extend(a for a in occ[i + 1:]
                            if a.id not in self._settled)
                break
        self.occurs[elem.var.id] = keep
        return conflict

    def _check_atom(self, atom):
        """React to an atom whose assignment state may have changed.

        Handles semantic evaluation, consistency of asserted vs evaluated
        truth, and unit feasibility narrowing.  Returns conflict clause
        literals or None.
        """
        trail = self.trail
        vals = trail.var_value
        unassigned = [v for v in atom.poly.variables if v not in vals]
        entry = trail.bool_assign.get(("a", atom.id))
        if entry is None:
            if not unassigned:
                t = atom.evaluate(vals)
                trail.push_propagation(Literal(t, atom=atom), Reason.SEMANTIC)
                self.stats.propagations += 1
                if trail.level == 0:
                    self._settled.add(atom.id)
            return None
        if not unassigned:
            t = atom.evaluate(vals)
            if trail.level == 0:
                self._settled.add(atom.id)
            if t != entry[0]:
                lits = [self._excl_neg(v) for v in atom.poly.variables]
                lits.append(Literal(t, atom=atom))
                return lits
            return None
        if len(unassigned) == 1:
            var = self.store.var_by_id(unassigned[0])
            held = Literal(entry[0], atom=atom)
            res = self.feas.assert_unit_constraint(var, held, trail)
            if trail.level == 0:
                self._settled.add(atom.id)
            if isinstance(res, EmptyConflict):
                return self._empty_conflict_lits(res)
            if isinstance(res, Singleton):
                contribs = self.feas.contributions(var.id)
                trail.push_model_assignment(
                    var, res.value, decision=False,
                    reason=(Reason.FEASIBILITY_SINGLETON, contribs))
                self.stats.theory_assignments += 1
                self.stats.propagations += 1
        return None

    def _empty_conflict_lits(self, res: EmptyConflict):
        lits = []
        for con in res.contributions:
            lits.append(con.lit.negate())
            for u in con.used_vars:
                lits.append(self._excl_neg(u))
        return lits

    def _bcp_scan(self):
        trail = self.trail
        keep = []
        conflict = None
        active = self.active
        for i, clause in enumerate(active):
            true_level = None
            unassigned_lit = None
            n_unassigned = 0
            for lit in clause:
                entry = trail.bool_assign.get(lit.key)
                if entry is None:
                    n_unassigned += 1
                    unassigned_lit = lit
                elif (entry[0] == lit.positive):
                    true_level = trail.elements[entry[1]].level
                    break
            if true_level is not None:
                if true_level > 0:
                    keep.append(clause)
                continue
            keep.append(clause)
            if n_unassigned == 0:
                conflict = list(clause.literals)
                keep.extend(active[i + 1:])
                break
            if n_unassigned == 1:
                trail.push_propagation(unassigned_lit, clause)
                self.stats.propagations += 1
        self.active = keep
        return conflict

    # -- conflict analysis --------------------------------------------------

    def _falsify_pos(self, lit: Literal) -> int:
        """Trail position at which the (false) literal became false."""
        trail = self.trail
        cand = []
        entry = trail.bool_assign.get(lit.key)
        if entry is not None:
            cand.append(entry[1])
        if lit.atom is not None:
            vals = trail.var_value
            if all(v in vals for v in lit.atom.poly.variables):
                cand.append(max(
                    (trail.var_elem[v].pos for v in lit.atom.poly.variables),
                    default=0))
        assert cand, f"literal {lit} is not false on the trail"
        return min(cand)

    def _resolve_lit(self, lit: Literal, pos: int):
        """Replacement literals, or None if the literal is irreducible."""
        trail = self.trail
        elem = trail.elements[pos]
        entry = trail.bool_assign.get(lit.key)
        if entry is not None and entry[1] == pos:
            if elem.kind is Kind.DECIDED_LITERAL:
                return None
            reason = elem.reason
            if reason is Reason.SEMANTIC:
                return [self._excl_neg(v) for v in lit.atom.poly.variables]
            asserted = elem.lit
            return [l for l in reason.literals if l.skey != asserted.skey]
        # Falsified by model assignments.
        if elem.kind is Kind.MODEL_ASSIGNMENT and lit.atom is not None:
            info = self._excl_pattern(lit.atom)
            if info is not None and info[0] == elem.var.id and not lit.positive:
                if elem.decision:
                    return None
                _, contribs = elem.reason
                out = []
                for con in contribs:
                    out.append(con.lit.negate())
                    for u in con.used_vars:
                        out.append(self._excl_neg(u))
                return out
        return [self._excl_neg(v) for v in lit.atom.poly.variables]

    def _analyze(self, conflict_lits):
        """Reduce to a single literal at the conflict level.

        Returns (learned literals, asserting literal, backjump level) or
        None when the conflict is at level 0 (unsatisfiable).
        """
        trail = self.trail
        cur: dict[tuple, tuple] = {}
        level_of = lambda pos: trail.elements[pos].level

        def add(lit):
            # Literals false at level 0 are implied false by the formula and
            # can be dropped from any learned clause.
            if lit.skey not in cur:
                pos = self._falsify_pos(lit)
                if level_of(pos) > 0:
                    cur[lit.skey] = (lit, pos)

        for lit in conflict_lits:
            add(lit)
        if not cur:
            return None
        conflict_level = max(level_of(p) for _, p in cur.values())
        while True:
            at_level = [(lit, pos) for lit, pos in cur.values()
                        if level_of(pos) == conflict_level]
            if len(at_level) <= 1:
                break
            # At most one literal per level is irreducible (the one falsified
            # by the level's decision element); resolve the latest reducible.
            at_level.sort(key=lambda t: -t[1])
            resolved = False
            for lit, pos in at_level:
                repl = self._resolve_lit(lit, pos)
                if repl is None:
                    continue
                del cur[lit.skey]
                for r in repl:
                    add(r)
                resolved = True
                break
            assert resolved, "multiple irreducible literals at conflict level"
        learned = [lit for lit, _ in cur.values()]
        uip = None
        backjump = 0
        for lit, pos in cur.values():
            lv = level_of(pos)
            if lv == conflict_level:
                uip = lit
            else:
                backjump = max(backjump, lv)
        assert uip is not None
        return learned, uip, backjump

    def _resolve_conflict(self, conflict_lits) -> bool:
        """Learn from a conflict; False means the formula is unsatisfiable."""
        self.stats.conflicts += 1
        res = self._analyze(conflict_lits)
        if res is None:
            return False
        learned, uip, backjump = res
        clause = Clause(learned, learned=True)
        self._attach_clause(clause)
        seen = set()
        for lit in learned:
            for vid in lit.variables():
                seen.add(vid)
            if lit.bvar is not None:
                seen.add(lit.bvar.id)
        for vid in sorted(seen):
            self.bump_var(vid)
        self._decay_activity()
        removed = self.trail.backtrack_to(backjump, self.cache)
        self.feas.backtrack_to(backjump)
        self.qhead = min(self.qhead, len(self.trail.elements))
        for elem in removed:
            vid = (elem.var.id if elem.kind is Kind.MODEL_ASSIGNMENT
                   else (elem.lit.bvar.id if elem.lit.bvar is not None else None))
            if vid is not None and vid in self._decidable:
                heapq.heappush(self._heap,
                               (-self.activity.get(vid, 0.0), vid))
        self.trail.push_propagation(uip, clause)
        self.stats.propagations += 1
        return True

    # -- decisions ----------------------------------------------------------

    def _pick_branch_var(self) -> Optional[Variable]:
        trail = self.trail
        while self._heap:
            negact, vid = heapq.heappop(self._heap)
            var = self.store.var_by_id(vid)
            if var.sort is Sort.INT:
                if vid in trail.var_value:
                    continue
            elif ("b", vid) in trail.bool_assign:
                continue
            cur = self.activity.get(vid, 0.0)
            if -negact < cur:
                heapq.heappush(self._heap, (-cur, vid))
                continue
            return var
        return None

    def decide(self) -> bool:
        var = self._pick_branch_var()
        if var is None:
            return False
        self.stats.decisions += 1
        if var.sort is Sort.BOOL:
            c = self.cache.get(var)
            phase = c if isinstance(c, bool) else True
            self.trail.push_decision(Literal(phase, bvar=var))
        else:
            fs = self.feas.get(var)
            hint = self.cache.get(var)
            if not isinstance(hint, int) or isinstance(hint, bool):
                hint = None
            self.trail.push_model_assignment(var, fs.pick_value(hint),
                                             decision=True)
            self.stats.theory_assignments += 1
        return True

    # -- top level ----------------------------------------------------------

    def check_sat(self) -> Answer:
        cfg = self.config
        deadline = None
        if cfg.timeout_ms is not None:
            deadline = time.monotonic() + cfg.timeout_ms / 1000.0
        if self._root_unsat:
            self.answer = Answer.UNSAT
            return self.answer
        while True:
            conflict = self.propagate()
            if conflict is not None:
                if not self._resolve_conflict(conflict):
                    self.answer = Answer.UNSAT
                    return self.answer
                if (cfg.max_conflicts is not None
                        and self.stats.conflicts >= cfg.max_conflicts):
                    self.answer = Answer.UNKNOWN
                    return self.answer
                if deadline is not None and time.monotonic() > deadline:
                    self.answer = Answer.UNKNOWN
                    return self.answer
                continue
            if deadline is not None and time.monotonic() > deadline:
                self.answer = Answer.UNKNOWN
                return self.answer
            if self.ls is not None and self.ls.should_run(self.stats.conflicts):
                self.ls.run(self)
            if not self.decide():
                self._extract_model()
                self.answer = Answer.SAT
                return self.answer

    def _extract_model(self):
        self.model_int = {}
        self.model_bool = {}
        for x in self.formula.variables:
            if x.sort is Sort.INT:
                v = self.trail.value_of_var(x)
                assert v is not None
                self.model_int[x.id] = v
            else:
                b = self.trail.bool_value_of(Literal(True, bvar=x))
                assert b is not None
                self.model_bool[x.id] = b
        for clause in self.formula.clauses:
            if clause.learned:
                continue
            assert any(self._model_lit(lit) for lit in clause), \
                f"model does not satisfy {clause}"

    def _model_lit(self, lit: Literal) -> bool:
        if lit.bvar is not None:
            v = self.model_bool[lit.bvar.id]
        else:
            v = lit.atom.evaluate(self.model_int)
        return v if lit.positive else not v
