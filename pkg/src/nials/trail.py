"""The solver trail: decided literals, propagated literals, model assignments.

The decision level increases on both decided literals and model-assignment
decisions (both are guesses).  The value cache persists across backtracking
and keeps the last value a variable had when its assignment was undone.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass
from typing import Optional, Union

from .errors import DuplicateAssignment
from .terms import Literal, Variable


class Kind(enum.Enum):
    DECIDED_LITERAL = "decided"
    PROPAGATED_LITERAL = "propagated"
    MODEL_ASSIGNMENT = "assignment"


class Reason(enum.Enum):
    SEMANTIC = "semantic"           # literal follows from model assignments
    FEASIBILITY_SINGLETON = "feasibility-singleton"


@dataclass
class TrailElement:
    kind: Kind
    level: int
    pos: int
    lit: Optional[Literal] = None          # for literal elements
    var: Optional[Variable] = None         # for model assignments
    value: Optional[int] = None
    decision: bool = False                 # model assignment decided vs propagated
    reason: object = None                  # Clause, Reason.*, or contributing tuple

    def __repr__(self):
        if self.kind is Kind.MODEL_ASSIGNMENT:
            tag = "d" if self.decision else "p"
            return f"{tag}:{self.var}->{self.value}@{self.level}"
        tag = "d" if self.kind is Kind.DECIDED_LITERAL else "p"
        return f"{tag}:{self.lit}@{self.level}"


class ValueCache:
    """Last undone value per variable (integer values and Boolean phases)."""

    def __init__(self):
        self._values: dict[int, object] = {}

    def get(self, var: Variable):
        return self._values.get(var.id)

    def set(self, var: Variable, value):
        self._values[var.id] = value

    def __repr__(self):
        return repr(self._values)


class Trail:
    """Ordered assignment trail with O(1) value lookup."""

    def __init__(self):
        self.elements: list[TrailElement] = []
        self.level = 0
        self._level_starts = [0]
        # key ('a', atom_id) / ('b', var_id) -> (value of positive form, pos)
        self.bool_assign: dict[tuple, tuple] = {}
        self.var_value: dict[int, int] = {}
        self.var_elem: dict[int, TrailElement] = {}

    def __len__(self):
        return len(self.elements)

    # -- queries ------------------------------------------------------------

    def value_of_var(self, x: Variable) -> Optional[int]:
        return self.var_value.get(x.id)

    def bool_value_of(self, lit: Literal) -> Optional[bool]:
        """Trail-assigned truth of a literal, ignoring semantic evaluation."""
        entry = self.bool_assign.get(lit.key)
        if entry is None:
            return None
        v = entry[0]
        return v if lit.positive else not v

    def value_of_lit(self, lit: Literal) -> Optional[bool]:
        """Boolean trail value if assigned, else exact atom evaluation."""
        v = self.bool_value_of(lit)
        if v is not None:
            return v
        if lit.atom is not None:
            vals = self.var_value
            if all(vid in vals for vid in lit.atom.poly.variables):
                t = lit.atom.evaluate(vals)
                return t if lit.positive else not t
        return None

    def is_assigned_key(self, key: tuple) -> bool:
        return key in self.bool_assign

    def assign_pos(self, lit: Literal) -> int:
        return self.bool_assign[lit.key][1]

    def var_pos(self, x: Variable) -> int:
        return self.var_elem[x.id].pos

    # -- stack operations ---------------------------------------------------

    def _push(self, elem: TrailElement):
        elem.pos = len(self.elements)
        self.elements.append(elem)

    def _begin_level(self):
        self.level += 1
        self._level_starts.append(len(self.elements))

    def _assign_lit(self, lit: Literal, pos: int):
        if lit.key in self.bool_assign:
            raise DuplicateAssignment(f"literal {lit} already assigned")
        self.bool_assign[lit.key] = (lit.positive, pos)

    def push_decision(self, lit: Literal) -> TrailElement:
        self._begin_level()
        elem = TrailElement(Kind.DECIDED_LITERAL, self.level, 0, lit=lit)
        self._push(elem)
        self._assign_lit(lit, elem.pos)
        return elem

    def push_propagation(self, lit: Literal, reason) -> TrailElement:
        elem = TrailElement(Kind.PROPAGATED_LITERAL, self.level, 0, lit=lit,
                            reason=reason)
        self._push(elem)
        self._assign_lit(lit, elem.pos)
        return elem

    def push_model_assignment(self, var: Variable, value: int, decision: bool,
                              reason=None) -> TrailElement:
        if var.id in self.var_value:
            raise DuplicateAssignment(f"variable {var} already assigned")
        if decision:
            self._begin_level()
        elem = TrailElement(Kind.MODEL_ASSIGNMENT, self.level, 0, var=var,
                            value=value, decision=decision, reason=reason)
        self._push(elem)
        self.var_value[var.id] = value
        self.var_elem[var.id] = elem
        return elem

    def backtrack_to(self, level: int, cache: Optional[ValueCache] = None) -> list:
        """Remove all elements above `level`; cache undone variable values.

        Returns the removed elements, most recent first.
        """
        assert level <= self.level
        if level == self.level:
            return []
        cut = self._level_starts[level + 1]
        removed = []
        while len(self.elements) > cut:
            elem = self.elements.pop()
            removed.append(elem)
            if elem.kind is Kind.MODEL_ASSIGNMENT:
                del self.var_value[elem.var.id]
                del self.var_elem[elem.var.id]
                if cache is not None:
                    cache.set(elem.var, elem.value)
            else:
                del self.bool_assign[elem.lit.key]
                if cache is not None and elem.lit.bvar is not None:
                    v = elem.lit.positive
                    cache.set(elem.lit.bvar, v)
        del self._level_starts[level + 1:]
        self.level = level
        return removed

    def __repr__(self):
        return "[" + ", ".join(map(repr, self.elements)) + "]"
