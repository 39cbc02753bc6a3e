"""Text syntax for theories and interpretations.

::

    sort R;
    op add : R, R -> R;
    const c3 : R;
    pred P : R, R;
    axiom [x:R] |- add(x, c3) = add(c3, x);
    axiom [x:R, y:R] P(x, y), x = y |- or(P(y, x), exists z:R. P(z, x));
    schema distinct R { c0 c1 };
    schema cover R { c0 c1 };
    schema graph add { (c0, c0) -> c0; (c0, c1) -> c1; };

Declarations must precede their use. ``and(...)``/``or(...)`` are n-ary,
``true``/``false`` are the atomic truth values. Inside a formula, a name
bound in the context or by ``exists`` is a variable; any other bare name
is a constant.
"""
from __future__ import annotations

import re
from dataclasses import dataclass
from typing import Sequence

from .syntax import (SCHEMA_AXIOMS, And, App, Bottom, CoverByConstants,
                     DistinctConstants, Eq, Exists, Formula, OpGraph, OpSymbol,
                     Or, Pred, PredSymbol, Sequent, Signature, Term, Theory,
                     SortError, Top, Var, check_axiom)

KEYWORDS = {"sort", "op", "const", "pred", "axiom", "schema", "distinct", "cover",
            "graph", "true", "false", "and", "or", "exists", "interpretation"}


class ParseError(ValueError):
    def __init__(self, message: str, line: int, column: int):
        self.line = line
        self.column = column
        super().__init__(f"{line}:{column}: {message}")


@dataclass
class Token:
    kind: str  # "ident", "sym" or "eof"
    text: str
    line: int
    column: int


_TOKEN = re.compile(r"""
    (?P<ws>[ \t\r]+) |
    (?P<nl>\n) |
    (?P<comment>\#[^\n]*) |
    (?P<ident>[A-Za-z_][A-Za-z0-9_']*(?:\.[A-Za-z0-9_']+)*) |
    (?P<sym>\|-|->|[()\[\]{}:;,.=])
""", re.VERBOSE)


def tokenize(text: str) -> list[Token]:
    tokens = []
    pos, line, col_start = 0, 1, 0
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if m is None:
            raise ParseError(f"unexpected character {text[pos]!r}", line, pos - col_start + 1)
        kind = m.lastgroup
        if kind == "nl":
            line += 1
            col_start = m.end()
        elif kind in ("ident", "sym"):
            tokens.append(Token(kind, m.group(), line, pos - col_start + 1))
        pos = m.end()
    tokens.append(Token("eof", "", line, pos - col_start + 1))
    return tokens


class _Parser:
    def __init__(self, text: str):
        self.toks = tokenize(text)
        self.i = 0
        self.sorts: list[str] = []
        self.ops: list[OpSymbol] = []
        self.preds: list[PredSymbol] = []
        self.axioms: list = []
        self._pred_names: set[str] = set()
        self._op_names: set[str] = set()
        self._sort_names: set[str] = set()

    # -- token helpers --
    @property
    def tok(self) -> Token:
        return self.toks[self.i]

    def error(self, message: str, tok: Token | None = None):
        tok = tok or self.tok
        return ParseError(message, tok.line, tok.column)

    def at(self, text: str) -> bool:
        return self.tok.text == text and self.tok.kind != "eof"

    def expect(self, text: str) -> Token:
        if not self.at(text):
            found = self.tok.text or "end of input"
            raise self.error(f"expected {text!r}, found {found!r}")
        tok = self.tok
        self.i += 1
        return tok

    def accept(self, text: str) -> bool:
        if self.at(text):
            self.i += 1
            return True
        return False

    def ident(self, what: str = "name") -> str:
        tok = self.tok
        if tok.kind != "ident" or tok.text in KEYWORDS:
            raise self.error(f"expected {what}, found {tok.text or 'end of input'!r}")
        self.i += 1
        return tok.text

    # -- declarations --
    def sort_list(self, stop: str) -> list[str]:
        out = []
        if self.at(stop):
            return out
        out.append(self.ident("sort"))
        while self.accept(","):
            out.append(self.ident("sort"))
        return out

    def theory(self) -> Theory:
        starts = []
        while self.tok.kind != "eof":
            tok = self.tok
            before = len(self.axioms)
            self.declaration()
            if len(self.axioms) > before:
                starts.append(tok)
        sig = Signature(self.sorts, self.ops, self.preds)
        for tok, ax in zip(starts, self.axioms):
            try:
                check_axiom(sig, ax)
            except SortError as exc:
                raise ParseError(str(exc), tok.line, tok.column) from None
        return Theory(sig, self.axioms)

    def _declare(self, tok, kind: str, name: str, sorts):
        # kind is "op" or "pred"
        taken = self._op_names if kind == "op" else self._pred_names
        if name in taken:
            raise ParseError(f"duplicate {kind} {name!r}", tok.line, tok.column)
        for s in sorts:
            if s not in self._sort_names:
                raise ParseError(f"undeclared sort {s!r}", tok.line, tok.column)
        if kind == "op":
            self._op_names.add(name)
        elif kind == "pred":
            self._pred_names.add(name)

    def declaration(self):
        tok = self.tok
        if self.accept("sort"):
            name = self.ident("sort")
            if name in self._sort_names:
                raise ParseError(f"duplicate sort {name!r}", tok.line, tok.column)
            self._sort_names.add(name)
            self.sorts.append(name)
        elif self.accept("op"):
            name = self.ident("operation")
            self.expect(":")
            args = self.sort_list("->")
            self.expect("->")
            sym = OpSymbol(name, tuple(args), self.ident("sort"))
            self._declare(tok, "op", name, (*sym.args, sym.result))
            self.ops.append(sym)
        elif self.accept("const"):
            name = self.ident("constant")
            self.expect(":")
            sym = OpSymbol(name, (), self.ident("sort"))
            self._declare(tok, "op", name, (sym.result,))
            self.ops.append(sym)
        elif self.accept("pred"):
            name = self.ident("predicate")
            self.expect(":")
            sym = PredSymbol(name, tuple(self.sort_list(";")))
            self._declare(tok, "pred", name, sym.args)
            self.preds.append(sym)
        elif self.accept("axiom"):
            self.axioms.append(self.sequent())
        elif self.accept("schema"):
            self.axioms.append(self.schema_axiom())
        else:
            raise self.error(f"expected a declaration, found {tok.text or 'end of input'!r}")
        self.expect(";")

    def context(self) -> tuple[list[str], list[str]]:
        names, sorts = [], []
        self.expect("[")
        if not self.at("]"):
            while True:
                names.append(self.ident("variable"))
                self.expect(":")
                sorts.append(self.ident("sort"))
                if not self.accept(","):
                    break
        self.expect("]")
        return names, sorts

    def sequent(self) -> Sequent:
        names, sorts = self.context()
        lhs = [] if self.at("|-") else self.formulas(names)
        self.expect("|-")
        rhs = [] if self.at(";") else self.formulas(names)
        return Sequent(tuple(sorts), tuple(lhs), tuple(rhs))

    def schema_axiom(self):
        if self.accept("distinct"):
            sort = self.ident("sort")
            return DistinctConstants(sort, self.name_block())
        if self.accept("cover"):
            sort = self.ident("sort")
            return CoverByConstants(sort, self.name_block())
        if self.accept("graph"):
            op = self.ident("operation")
            self.expect("{")
            rows = []
            while not self.at("}"):
                self.expect("(")
                ins = []
                if not self.at(")"):
                    ins.append(self.ident("constant"))
                    while self.accept(","):
                        ins.append(self.ident("constant"))
                self.expect(")")
                self.expect("->")
                rows.append((tuple(ins), self.ident("constant")))
                self.expect(";")
            self.expect("}")
            return OpGraph(op, tuple(rows))
        raise self.error("expected 'distinct', 'cover' or 'graph'")

    def name_block(self) -> tuple[str, ...]:
        self.expect("{")
        names = []
        while not self.at("}"):
            names.append(self.ident("constant"))
        self.expect("}")
        return tuple(names)

    # -- formulas and terms --
    def formulas(self, env: list[str]) -> list[Formula]:
        out = [self.formula(env)]
        while self.accept(","):
            out.append(self.formula(env))
        return out

    def formula(self, env: list[str]) -> Formula:
        if self.accept("true"):
            return Top()
        if self.accept("false"):
            return Bottom()
        for word, cls in (("and", And), ("or", Or)):
            if self.accept(word):
                self.expect("(")
                parts = [] if self.at(")") else self.formulas(env)
                self.expect(")")
                return cls(tuple(parts))
        if self.accept("exists"):
            name = self.ident("variable")
            self.expect(":")
            sort = self.ident("sort")
            self.expect(".")
            return Exists(sort, self.formula([name, *env]))
        if self.accept("("):
            phi = self.formula(env)
            self.expect(")")
            return phi
        tok = self.tok
        if tok.kind == "ident" and tok.text in self._pred_names and tok.text not in env:
            start = self.i
            self.i += 1
            self.expect("(")
            args = [] if self.at(")") else self.terms(env)
            self.expect(")")
            if not self.at("="):
                return Pred(tok.text, tuple(args))
            # an operation sharing the predicate's name
            self.i = start
        left = self.term(env)
        self.expect("=")
        return Eq(left, self.term(env))

    def terms(self, env: list[str]) -> list[Term]:
        out = [self.term(env)]
        while self.accept(","):
            out.append(self.term(env))
        return out

    def term(self, env: list[str]) -> Term:
        name = self.ident("term")
        if self.accept("("):
            args = [] if self.at(")") else self.terms(env)
            self.expect(")")
            return App(name, tuple(args))
        if name in env:
            return Var(env.index(name))
        return App(name, ())


def parse(text: str) -> Theory:
    """Parse a theory; raises :class:`ParseError` with a line and column."""
    return _Parser(text).theory()


# -- printing ------------------------------------------------------------

class _Names:
    def __init__(self, taken: set[str]):
        self.taken = taken

    def fresh(self, base: str) -> str:
        name = base
        while name in self.taken or name in KEYWORDS:
            name += "'"
        return name


def print_term(t: Term, env: Sequence[str]) -> str:
    if isinstance(t, Var):
        return env[t.index]
    if not t.args:
        return t.op
    return f"{t.op}({', '.join(print_term(a, env) for a in t.args)})"


def print_formula(phi: Formula, env: Sequence[str], names: _Names, depth: int = 0) -> str:
    if isinstance(phi, Top):
        return "true"
    if isinstance(phi, Bottom):
        return "false"
    if isinstance(phi, Eq):
        return f"{print_term(phi.left, env)} = {print_term(phi.right, env)}"
    if isinstance(phi, Pred):
        return f"{phi.name}({', '.join(print_term(a, env) for a in phi.args)})"
    if isinstance(phi, (And, Or)):
        word = "and" if isinstance(phi, And) else "or"
        inner = ", ".join(print_formula(p, env, names, depth) for p in phi.parts)
        return f"{word}({inner})"
    if isinstance(phi, Exists):
        var = names.fresh(f"y{depth}")
        body = print_formula(phi.body, [var, *env], names, depth + 1)
        return f"exists {var}:{phi.sort}. ({body})"
    raise TypeError(f"not a formula: {phi!r}")


def _context_names(n: int, names: _Names) -> list[str]:
    return [names.fresh(f"x{i}") for i in range(n)]


def print_sequent(seq: Sequent, sig: Signature) -> str:
    names = _Names(_symbol_names(sig))
    env = _context_names(len(seq.context), names)
    ctx = ", ".join(f"{v}:{s}" for v, s in zip(env, seq.context))
    lhs = ", ".join(print_formula(p, env, names) for p in seq.lhs)
    rhs = ", ".join(print_formula(p, env, names) for p in seq.rhs)
    parts = [f"[{ctx}]"]
    if lhs:
        parts.append(lhs)
    parts.append("|-")
    if rhs:
        parts.append(rhs)
    return " ".join(parts)


def _symbol_names(sig: Signature) -> set[str]:
    return set(sig.op) | set(sig.pred)


def print_axiom(ax, sig: Signature) -> str:
    if isinstance(ax, Sequent):
        return f"axiom {print_sequent(ax, sig)};"
    if isinstance(ax, DistinctConstants):
        return f"schema distinct {ax.sort} {{ {' '.join(ax.constants)} }};"
    if isinstance(ax, CoverByConstants):
        return f"schema cover {ax.sort} {{ {' '.join(ax.constants)} }};"
    if isinstance(ax, OpGraph):
        lines = [f"schema graph {ax.op} {{"]
        for ins, out in ax.rows:
            lines.append(f"  ({', '.join(ins)}) -> {out};")
        lines.append("};")
        return "\n".join(lines)
    raise TypeError(f"not an axiom: {ax!r}")


def print_theory(thy: Theory) -> str:
    sig = thy.signature
    lines = [f"sort {s};" for s in sig.sorts]
    for o in sig.operations:
        if o.args:
            lines.append(f"op {o.name} : {', '.join(o.args)} -> {o.result};")
        else:
            lines.append(f"const {o.name} : {o.result};")
    for p in sig.predicates:
        lines.append(f"pred {p.name} : {', '.join(p.args)};")
    lines.extend(print_axiom(ax, sig) for ax in thy.axioms)
    return "\n".join(lines) + "\n"


# -- interpretations -----------------------------------------------------

def print_interpretation(interp) -> str:
    """Mapping blocks of an :class:`~cohnet.constructions.Interpretation`."""
    src, tgt = interp.source.signature, interp.target.signature
    names = _Names(_symbol_names(tgt))
    lines = ["interpretation {"]
    for s in src.sorts:
        lines.append(f"  sort {s} -> {', '.join(interp.sort_map[s])};")
    for o in src.operations:
        ctx = interp.flat_context(o.args)
        env = _context_names(len(ctx), names)
        binder = ", ".join(f"{v}:{s}" for v, s in zip(env, ctx))
        terms = ", ".join(print_term(t, env) for t in interp.op_map[o.name])
        lines.append(f"  op {o.name} -> [{binder}] ({terms});")
    for p in src.predicates:
        ctx = interp.flat_context(p.args)
        env = _context_names(len(ctx), names)
        binder = ", ".join(f"{v}:{s}" for v, s in zip(env, ctx))
        lines.append(f"  pred {p.name} -> [{binder}] "
                     f"{print_formula(interp.pred_map[p.name], env, names)};")
    lines.append("}")
    return "\n".join(lines) + "\n"


def parse_interpretation(text: str, source: Theory, target: Theory):
    from .constructions import Interpretation

    p = _Parser(text)
    p._pred_names = set(target.signature.pred)
    p.expect("interpretation")
    p.expect("{")
    sort_map, op_map, pred_map = {}, {}, {}
    while not p.at("}"):
        if p.accept("sort"):
            name = p.ident("sort")
            p.expect("->")
            sort_map[name] = tuple(p.sort_list(";"))
        elif p.accept("op"):
            name = p.ident("operation")
            p.expect("->")
            env, _ = p.context()
            p.expect("(")
            terms = [] if p.at(")") else p.terms(env)
            p.expect(")")
            op_map[name] = tuple(terms)
        elif p.accept("pred"):
            name = p.ident("predicate")
            p.expect("->")
            env, _ = p.context()
            pred_map[name] = p.formula(env)
        else:
            raise p.error("expected 'sort', 'op' or 'pred'")
        p.expect(";")
    p.expect("}")
    if p.tok.kind != "eof":
        raise p.error("trailing input after interpretation")
    return Interpretation(source, target, sort_map, op_map, pred_map)


__all__ = ["ParseError", "parse", "print_theory", "print_axiom", "print_sequent",
           "print_formula", "print_term", "parse_interpretation", "print_interpretation",
           "SCHEMA_AXIOMS"]
