"""SMT-LIB v2 frontend for the QF_NIA subset the solver understands.

Scripts are kept as parsed s-expressions for faithful round-trip printing;
a compilation pass turns assertions into Boolean structures over the term
store.  Zero-arity define-fun symbols are inlined as macros, integer-valued
`ite` terms become fresh variables with defining constraints.
"""

from __future__ import annotations

from typing import Optional, Union

from . import formula_ast as fa
from .clausify import clausify
from .core import Answer, Solver, SolverConfig
from .errors import ParseError, SortError, UnsupportedError
from .terms import Polynomial, Rel, Sort, TermStore

Sexpr = Union[str, list]

_SYMBOL_EXTRA = "~!@$%^&*_-+=<>.?/"


def tokenize(text: str):
    """Yields (token, line, col) with 1-based positions."""
    line = 1
    col = 1
    i = 0
    n = len(text)
    while i < n:
        ch = text[i]
        if ch == "\n":
            line += 1
            col = 1
            i += 1
        elif ch in " \t\r":
            i += 1
            col += 1
        elif ch == ";":
            while i < n and text[i] != "\n":
                i += 1
        elif ch in "()":
            yield ch, line, col
            i += 1
            col += 1
        elif ch == "|":
            j = text.find("|", i + 1)
            if j < 0:
                raise ParseError("unterminated quoted symbol", line, col)
            tok = text[i:j + 1]
            yield tok, line, col
            col += j + 1 - i
            i = j + 1
        elif ch == '"':
            j = i + 1
            while j < n and text[j] != '"':
                j += 1
            if j >= n:
                raise ParseError("unterminated string literal", line, col)
            yield text[i:j + 1], line, col
            col += j + 1 - i
            i = j + 1
        elif ch.isalnum() or ch in _SYMBOL_EXTRA or ch == ":":
            j = i
            while j < n and (text[j].isalnum() or text[j] in _SYMBOL_EXTRA
                             or text[j] == ":"):
                j += 1
            yield text[i:j], line, col
            col += j - i
            i = j
        else:
            raise ParseError(f"unexpected character {ch!r}", line, col)


def parse_sexprs(text: str) -> list:
    """All top-level s-expressions as nested lists of token strings."""
    stack: list[list] = []
    top: list = []
    opens: list[tuple] = []
    for tok, line, col in tokenize(text):
        if tok == "(":
            stack.append([])
            opens.append((line, col))
        elif tok == ")":
            if not stack:
                raise ParseError("unbalanced ')'", line, col)
            done = stack.pop()
            opens.pop()
            (stack[-1] if stack else top).append(done)
        else:
            (stack[-1] if stack else top).append(tok)
    if stack:
        line, col = opens[-1]
        raise ParseError("unbalanced '('", line, col)
    return top


def print_sexpr(e: Sexpr) -> str:
    if isinstance(e, str):
        return e
    return "(" + " ".join(print_sexpr(x) for x in e) + ")"


class Script:
    """An ordered list of SMT-LIB commands."""

    def __init__(self, commands: list):
        self.commands = commands

    def print(self) -> str:
        return "\n".join(print_sexpr(c) for c in self.commands) + "\n"

    def __eq__(self, other):
        return isinstance(other, Script) and self.commands == other.commands

    def __repr__(self):
        return f"Script({len(self.commands)} commands)"


_SUPPORTED_LOGICS = {"QF_NIA", "QF_LIA", "QF_NIRA"}


class Compiler:
    """Turns a script's declarations and assertions into solver input."""

    def __init__(self):
        self.store = TermStore()
        self.macros: dict[str, tuple] = {}
        self.assertions: list[fa.BoolExpr] = []
        self.side: list[fa.BoolExpr] = []
        self.logic: Optional[str] = None

    # -- command level ------------------------------------------------------

    def command(self, cmd: Sexpr):
        if not isinstance(cmd, list) or not cmd or not isinstance(cmd[0], str):
            raise ParseError(f"malformed command {print_sexpr(cmd)}", 0, 0)
        head = cmd[0]
        if head == "set-logic":
            if len(cmd) != 2 or cmd[1] not in _SUPPORTED_LOGICS:
                raise UnsupportedError(f"unsupported logic in {print_sexpr(cmd)}")
            self.logic = cmd[1]
        elif head in ("set-info", "set-option"):
            pass
        elif head == "declare-fun":
            if len(cmd) != 4:
                raise ParseError(f"malformed declare-fun {print_sexpr(cmd)}", 0, 0)
            name, args, sort = cmd[1], cmd[2], cmd[3]
            if args != []:
                raise UnsupportedError(
                    f"declare-fun with arity > 0: {name}")
            self.store.new_var(name, self._sort(sort))
        elif head == "declare-const":
            if len(cmd) != 3:
                raise ParseError(f"malformed declare-const {print_sexpr(cmd)}", 0, 0)
            self.store.new_var(cmd[1], self._sort(cmd[2]))
        elif head == "define-fun":
            if len(cmd) != 5:
                raise ParseError(f"malformed define-fun {print_sexpr(cmd)}", 0, 0)
            name, args, sort, body = cmd[1], cmd[2], cmd[3], cmd[4]
            if args != []:
                raise UnsupportedError(f"define-fun with arity > 0: {name}")
            value = self.term(body, {})
            want = self._sort(sort)
            if (want is Sort.INT) != (value[0] == "int"):
                raise SortError(f"define-fun {name}: body sort mismatch")
            self.macros[name] = value
        elif head == "assert":
            if len(cmd) != 2:
                raise ParseError(f"malformed assert {print_sexpr(cmd)}", 0, 0)
            self.assertions.append(self.bool_term(cmd[1], {}))
        elif head in ("check-sat", "get-model", "exit"):
            pass
        else:
            raise UnsupportedError(f"unsupported command {head}")

    def _sort(self, s: Sexpr) -> Sort:
        if s == "Int":
            return Sort.INT
        if s == "Bool":
            return Sort.BOOL
        raise UnsupportedError(f"unsupported sort {print_sexpr(s)}")

    # -- term level ---------------------------------------------------------

    def bool_term(self, e: Sexpr, env: dict) -> fa.BoolExpr:
        kind, value = self.term(e, env)
        if kind != "bool":
            raise SortError(f"expected Bool term, got {print_sexpr(e)}")
        return value

    def int_term(self, e: Sexpr, env: dict) -> Polynomial:
        kind, value = self.term(e, env)
        if kind != "int":
            raise SortError(f"expected Int term, got {print_sexpr(e)}")
        return value

    def term(self, e: Sexpr, env: dict):
        """Returns ("int", Polynomial) or ("bool", BoolExpr)."""
        if isinstance(e, str):
            return self._atom_term(e, env)
        if not e or not isinstance(e[0], str):
            raise ParseError(f"malformed term {print_sexpr(e)}", 0, 0)
        head, args = e[0], e[1:]
        if head == "-" and len(args) == 1:
            return "int", -self.int_term(args[0], env)
        if head in ("+", "-", "*"):
            if not args:
                raise ParseError(f"operator {head} needs arguments", 0, 0)
            acc = self.int_term(args[0], env)
            for a in args[1:]:
                p = self.int_term(a, env)
                if head == "+":
                    acc = acc + p
                elif head == "-":
                    acc = acc - p
                else:
                    acc = acc * p
            return "int", acc
        if head in ("<", "<=", ">", ">="):
            return "bool", self._chain(head, args, env)
        if head == "=":
            return "bool", self._equality(args, env)
        if head == "distinct":
            return "bool", self._distinct(args, env)
        if head in ("and", "or"):
            parts = [self.bool_term(a, env) for a in args]
            return "bool", (fa.mk_and(parts) if head == "and" else fa.mk_or(parts))
        if head == "not":
            if len(args) != 1:
                raise ParseError("not takes one argument", 0, 0)
            return "bool", fa.mk_not(self.bool_term(args[0], env))
        if head == "=>":
            if len(args) < 2:
                raise ParseError("=> takes at least two arguments", 0, 0)
            parts = [self.bool_term(a, env) for a in args]
            acc = parts[-1]
            for p in reversed(parts[:-1]):
                acc = fa.mk_or([fa.mk_not(p), acc])
            return "bool", acc
        if head == "ite":
            return self._ite(args, env)
        if head == "let":
            return self._let(args, env)
        if head in ("div", "mod", "abs", "forall", "exists"):
            raise UnsupportedError(f"unsupported operator {head}")
        raise UnsupportedError(f"unsupported operator {head}")

    def _atom_term(self, name: str, env: dict):
        if name == "true":
            return "bool", fa.TRUE
        if name == "false":
            return "bool", fa.FALSE
        if name.isdigit():
            return "int", Polynomial.const(int(name))
        if name in env:
            return env[name]
        var = self.store.lookup_var(name)
        if var is not None:
            if var.sort is Sort.INT:
                return "int", Polynomial.var(var.id)
            return "bool", fa.BVar(var)
        if name in self.macros:
            return self.macros[name]
        raise ParseError(f"undeclared identifier {name}", 0, 0)

    def _rel_atom(self, op: str, lhs: Polynomial, rhs: Polynomial) -> fa.BoolExpr:
        if op == "<":
            atom = self.store.mk_atom(lhs, Rel.LT, rhs)
        elif op == "<=":
            atom = self.store.mk_atom(lhs, Rel.LEQ, rhs)
        elif op == ">":
            atom = self.store.mk_atom(rhs, Rel.LT, lhs)
        elif op == ">=":
            atom = self.store.mk_atom(rhs, Rel.LEQ, lhs)
        elif op == "=":
            atom = self.store.mk_atom(lhs, Rel.EQ, rhs)
        else:
            atom = self.store.mk_atom(lhs, Rel.NEQ, rhs)
        return fa.AtomRef(atom)

    def _chain(self, op: str, args: list, env: dict) -> fa.BoolExpr:
        if len(args) < 2:
            raise ParseError(f"operator {op} needs two arguments", 0, 0)
        polys = [self.int_term(a, env) for a in args]
        parts = [self._rel_atom(op, a, b) for a, b in zip(polys, polys[1:])]
        return fa.mk_and(parts)

    def _equality(self, args: list, env: dict) -> fa.BoolExpr:
        if len(args) < 2:
            raise ParseError("= needs two arguments", 0, 0)
        vals = [self.term(a, env) for a in args]
        kinds = {k for k, _ in vals}
        if len(kinds) != 1:
            raise SortError("= applied to mixed sorts")
        if kinds == {"int"}:
            return fa.mk_and([
                self._rel_atom("=", a[1], b[1])
                for a, b in zip(vals, vals[1:])])
        parts = []
        for (_, a), (_, b) in zip(vals, vals[1:]):
            parts.append(fa.mk_or([
                fa.mk_and([a, b]),
                fa.mk_and([fa.mk_not(a), fa.mk_not(b)])]))
        return fa.mk_and(parts)

    def _distinct(self, args: list, env: dict) -> fa.BoolExpr:
        if len(args) < 2:
            raise ParseError("distinct needs two arguments", 0, 0)
        vals = [self.term(a, env) for a in args]
        kinds = {k for k, _ in vals}
        if kinds == {"int"}:
            parts = []
            for i in range(len(vals)):
                for j in range(i + 1, len(vals)):
                    parts.append(self._rel_atom("!=", vals[i][1], vals[j][1]))
            return fa.mk_and(parts)
        if kinds == {"bool"} and len(vals) == 2:
            a, b = vals[0][1], vals[1][1]
            return fa.mk_or([fa.mk_and([a, fa.mk_not(b)]),
                             fa.mk_and([fa.mk_not(a), b])])
        raise UnsupportedError("distinct over these operands")

    def _ite(self, args: list, env: dict):
        if len(args) != 3:
            raise ParseError("ite takes three arguments", 0, 0)
        cond = self.bool_term(args[0], env)
        t_kind, t_val = self.term(args[1], env)
        e_kind, e_val = self.term(args[2], env)
        if t_kind != e_kind:
            raise SortError("ite branches have different sorts")
        if t_kind == "bool":
            return "bool", fa.Ite(cond, t_val, e_val)
        # Integer ite: fresh variable constrained to the chosen branch.
        v = self.store.fresh_var("ite", Sort.INT)
        vp = Polynomial.var(v.id)
        self.side.append(fa.mk_or([
            fa.mk_not(cond), self._rel_atom("=", vp, t_val)]))
        self.side.append(fa.mk_or([
            cond, self._rel_atom("=", vp, e_val)]))
        return "int", vp

    def _let(self, args: list, env: dict):
        if len(args) != 2 or not isinstance(args[0], list):
            raise ParseError("malformed let", 0, 0)
        new_env = dict(env)
        for binding in args[0]:
            if not (isinstance(binding, list) and len(binding) == 2
                    and isinstance(binding[0], str)):
                raise ParseError("malformed let binding", 0, 0)
            new_env[binding[0]] = self.term(binding[1], env)
        return self.term(args[1], new_env)


def parse(text: str) -> Script:
    """Parse and validate a script; raises Parse/Unsupported/Sort errors."""
    commands = parse_sexprs(text)
    script = Script(commands)
    compile_script(script)
    return script


def compile_script(script: Script) -> Compiler:
    comp = Compiler()
    for cmd in script.commands:
        comp.command(cmd)
    return comp


def _format_int(v: int) -> str:
    return str(v) if v >= 0 else f"(- {-v})"


def execute(script: Script, config: Optional[SolverConfig] = None):
    """Run the script's commands; returns (output lines, last Solver)."""
    comp = compile_script(script)
    out: list[str] = []
    solver = None
    model = None
    for cmd in script.commands:
        head = cmd[0] if isinstance(cmd, list) and cmd else None
        if head == "check-sat":
            ast = fa.mk_and(comp.assertions + comp.side)
            formula = clausify(comp.store, ast)
            solver = Solver(comp.store, formula, config)
            ans = solver.check_sat()
            out.append(ans.value)
            model = None
            if ans is Answer.SAT:
                model = _script_model(comp, solver)
        elif head == "get-model":
            if model is None:
                out.append("(error \"no model available\")")
            else:
                out.append("\n".join(format_model(model)))
        elif head == "exit":
            break
    return out, solver


def solve(script: Script, config: Optional[SolverConfig] = None):
    """One check-sat over the script's assertions.

    Returns (answer, model or None, solver); the model is a list of
    (name, sort, value) for the script's non-auxiliary variables.
    """
    comp = compile_script(script)
    ast = fa.mk_and(comp.assertions + comp.side)
    formula = clausify(comp.store, ast)
    solver = Solver(comp.store, formula, config)
    ans = solver.check_sat()
    model = _script_model(comp, solver) if ans is Answer.SAT else None
    return ans, model, solver


def format_model(model) -> list[str]:
    lines = ["("]
    for name, sort, value in model:
        if sort is Sort.INT:
            lines.append(f"  (define-fun {name} () Int {_format_int(value)})")
        else:
            lines.append(f"  (define-fun {name} () Bool "
                         f"{'true' if value else 'false'})")
    lines.append(")")
    return lines


def _script_model(comp: Compiler, solver: Solver):
    """Original-variable model, re-verified against every assertion."""
    int_values = {}
    bool_values = {}
    model = []
    for var in comp.store.variables:
        if var.sort is Sort.INT:
            v = solver.model_int.get(var.id, solver.cache.get(var))
            if not isinstance(v, int) or isinstance(v, bool):
                v = 0
            int_values[var.id] = v
            if not var.is_aux:
                model.append((var.name, Sort.INT, v))
        else:
            b = solver.model_bool.get(var.id)
            if b is None:
                b = True
            bool_values[var.id] = b
            if not var.is_aux:
                model.append((var.name, Sort.BOOL, b))
    for ast in comp.assertions + comp.side:
        assert fa.evaluate(ast, int_values, bool_values), \
            "model fails an assertion"
    return model
