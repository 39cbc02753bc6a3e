"""Coherent signatures, terms, formulas, sequents and theories.

Variables are context positions. Inside ``Exists(sort, body)`` the bound
variable is position 0 and every outer position shifts up by one.
All connectives are finite.
"""
from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property
from typing import Sequence, Union


@dataclass(frozen=True)
class OpSymbol:
    name: str
    args: tuple[str, ...]
    result: str

    def __post_init__(self):
        object.__setattr__(self, "args", tuple(self.args))


@dataclass(frozen=True)
class PredSymbol:
    name: str
    args: tuple[str, ...]

    def __post_init__(self):
        object.__setattr__(self, "args", tuple(self.args))


@dataclass(frozen=True)
class Signature:
    sorts: tuple[str, ...] = ()
    operations: tuple[OpSymbol, ...] = ()
    predicates: tuple[PredSymbol, ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "sorts", tuple(self.sorts))
        object.__setattr__(self, "operations", tuple(self.operations))
        object.__setattr__(self, "predicates", tuple(self.predicates))
        for kind, names in (("sort", self.sorts),
                            ("operation", [o.name for o in self.operations]),
                            ("predicate", [p.name for p in self.predicates])):
            if len(set(names)) != len(names):
                raise SignatureError(f"duplicate {kind} name")
        declared = set(self.sorts)
        for o in self.operations:
            for s in (*o.args, o.result):
                if s not in declared:
                    raise SignatureError(f"operation {o.name} uses undeclared sort {s}")
        for p in self.predicates:
            for s in p.args:
                if s not in declared:
                    raise SignatureError(f"predicate {p.name} uses undeclared sort {s}")

    @cached_property
    def op(self) -> dict[str, OpSymbol]:
        return {o.name: o for o in self.operations}

    @cached_property
    def pred(self) -> dict[str, PredSymbol]:
        return {p.name: p for p in self.predicates}

    @cached_property
    def typing(self) -> dict[str, tuple[tuple[str, ...], str]]:
        return {o.name: (o.args, o.result) for o in self.operations}

    def constants(self, sort: str | None = None) -> list[str]:
        return [o.name for o in self.operations
                if not o.args and (sort is None or o.result == sort)]


class SignatureError(ValueError):
    pass


# -- terms ---------------------------------------------------------------

@dataclass(frozen=True)
class Var:
    index: int


@dataclass(frozen=True)
class App:
    op: str
    args: tuple[Term, ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "args", tuple(self.args))


Term = Union[Var, App]


# -- formulas ------------------------------------------------------------

@dataclass(frozen=True)
class Top:
    pass


@dataclass(frozen=True)
class Bottom:
    pass


@dataclass(frozen=True)
class Pred:
    name: str
    args: tuple[Term, ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "args", tuple(self.args))


@dataclass(frozen=True)
class Eq:
    left: Term
    right: Term


@dataclass(frozen=True)
class And:
    parts: tuple[Formula, ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "parts", tuple(self.parts))


@dataclass(frozen=True)
class Or:
    parts: tuple[Formula, ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "parts", tuple(self.parts))


@dataclass(frozen=True)
class Exists:
    sort: str
    body: Formula


Formula = Union[Top, Bottom, Pred, Eq, And, Or, Exists]
TRUE = Top()
FALSE = Bottom()


# -- axioms --------------------------------------------------------------

@dataclass(frozen=True)
class Sequent:
    context: tuple[str, ...]
    lhs: tuple[Formula, ...]
    rhs: tuple[Formula, ...]

    def __post_init__(self):
        object.__setattr__(self, "context", tuple(self.context))
        object.__setattr__(self, "lhs", tuple(self.lhs))
        object.__setattr__(self, "rhs", tuple(self.rhs))


@dataclass(frozen=True)
class DistinctConstants:
    """Pairwise ``c = c' |- false`` over the listed constants."""
    sort: str
    constants: tuple[str, ...]

    def __post_init__(self):
        object.__setattr__(self, "constants", tuple(self.constants))


@dataclass(frozen=True)
class CoverByConstants:
    """``[x:sort] |- x = c1 \\/ ... \\/ x = ck``."""
    sort: str
    constants: tuple[str, ...]

    def __post_init__(self):
        object.__setattr__(self, "constants", tuple(self.constants))


@dataclass(frozen=True)
class OpGraph:
    """``|- op(c...) = c_out`` for each row ``((c...), c_out)``."""
    op: str
    rows: tuple[tuple[tuple[str, ...], str], ...]

    def __post_init__(self):
        object.__setattr__(self, "rows",
                           tuple((tuple(ins), out) for ins, out in self.rows))


SchemaAxiom = Union[DistinctConstants, CoverByConstants, OpGraph]
Axiom = Union[Sequent, DistinctConstants, CoverByConstants, OpGraph]
SCHEMA_AXIOMS = (DistinctConstants, CoverByConstants, OpGraph)


@dataclass(frozen=True)
class Theory:
    signature: Signature
    axioms: tuple[Axiom, ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "axioms", tuple(self.axioms))

    def extend(self, operations: Sequence[OpSymbol] = (), axioms: Sequence[Axiom] = (),
               sorts: Sequence[str] = (), predicates: Sequence[PredSymbol] = ()) -> Theory:
        sig = Signature(self.signature.sorts + tuple(sorts),
                        self.signature.operations + tuple(operations),
                        self.signature.predicates + tuple(predicates))
        return Theory(sig, self.axioms + tuple(axioms))


# -- sort checking -------------------------------------------------------

class SortError(ValueError):
    def __init__(self, message: str, axiom: int | None = None, subterm=None):
        self.axiom = axiom
        self.subterm = subterm
        where = f"axiom {axiom}: " if axiom is not None else ""
        super().__init__(where + message)


def term_sort(sig: Signature, context: Sequence[str], t: Term) -> str:
    if isinstance(t, Var):
        if not 0 <= t.index < len(context):
            raise SortError(f"variable {t.index} outside context of length {len(context)}",
                            subterm=t)
        return context[t.index]
    if isinstance(t, App):
        sym = sig.op.get(t.op)
        if sym is None:
            raise SortError(f"unknown operation {t.op}", subterm=t)
        if len(sym.args) != len(t.args):
            raise SortError(f"{t.op} expects {len(sym.args)} arguments, got {len(t.args)}",
                            subterm=t)
        for expected, arg in zip(sym.args, t.args):
            got = term_sort(sig, context, arg)
            if got != expected:
                raise SortError(f"argument of {t.op} has sort {got}, expected {expected}",
                                subterm=arg)
        return sym.result
    raise SortError(f"not a term: {t!r}", subterm=t)


def check_formula(sig: Signature, context: Sequence[str], phi: Formula) -> None:
    if isinstance(phi, (Top, Bottom)):
        return
    if isinstance(phi, Eq):
        a = term_sort(sig, context, phi.left)
        b = term_sort(sig, context, phi.right)
        if a != b:
            raise SortError(f"equation between sorts {a} and {b}", subterm=phi)
        return
    if isinstance(phi, Pred):
        sym = sig.pred.get(phi.name)
        if sym is None:
            raise SortError(f"unknown predicate {phi.name}", subterm=phi)
        if len(sym.args) != len(phi.args):
            raise SortError(f"{phi.name} expects {len(sym.args)} arguments", subterm=phi)
        for expected, arg in zip(sym.args, phi.args):
            got = term_sort(sig, context, arg)
            if got != expected:
                raise SortError(f"argument of {phi.name} has sort {got}, expected {expected}",
                                subterm=arg)
        return
    if isinstance(phi, (And, Or)):
        for part in phi.parts:
            check_formula(sig, context, part)
        return
    if isinstance(phi, Exists):
        if phi.sort not in sig.sorts:
            raise SortError(f"unknown sort {phi.sort}", subterm=phi)
        check_formula(sig, (phi.sort, *context), phi.body)
        return
    raise SortError(f"not a formula: {phi!r}", subterm=phi)


def _check_constants(sig: Signature, sort: str, names: Sequence[str]):
    if sort not in sig.sorts:
        raise SortError(f"unknown sort {sort}")
    for c in names:
        sym = sig.op.get(c)
        if sym is None or sym.args:
            raise SortError(f"{c} is not a constant", subterm=c)
        if sym.result != sort:
            raise SortError(f"constant {c} has sort {sym.result}, expected {sort}", subterm=c)


def check_axiom(sig: Signature, ax: Axiom) -> None:
    if isinstance(ax, Sequent):
        for s in ax.context:
            if s not in sig.sorts:
                raise SortError(f"unknown sort {s} in context")
        for phi in (*ax.lhs, *ax.rhs):
            check_formula(sig, ax.context, phi)
    elif isinstance(ax, (DistinctConstants, CoverByConstants)):
        _check_constants(sig, ax.sort, ax.constants)
    elif isinstance(ax, OpGraph):
        sym = sig.op.get(ax.op)
        if sym is None:
            raise SortError(f"unknown operation {ax.op}")
        for ins, out in ax.rows:
            if len(ins) != len(sym.args):
                raise SortError(f"graph row of {ax.op} has wrong arity", subterm=ins)
            for s, c in zip(sym.args, ins):
                _check_constants(sig, s, [c])
            _check_constants(sig, sym.result, [out])
    else:
        raise SortError(f"not an axiom: {ax!r}")


def sort_check(thy: Theory) -> None:
    """Raise :class:`SortError` naming the first ill-sorted axiom."""
    for i, ax in enumerate(thy.axioms):
        try:
            check_axiom(thy.signature, ax)
        except SortError as exc:
            raise SortError(str(exc), axiom=i, subterm=exc.subterm) from None


# -- schema axiom expansion ----------------------------------------------

def expand(ax: SchemaAxiom) -> list[Sequent]:
    if isinstance(ax, DistinctConstants):
        cs = ax.constants
        return [Sequent((), (Eq(App(cs[i]), App(cs[j])),), (FALSE,))
                for i in range(len(cs)) for j in range(i + 1, len(cs))]
    if isinstance(ax, CoverByConstants):
        return [Sequent((ax.sort,), (), (Or(tuple(Eq(Var(0), App(c)) for c in ax.constants)),))]
    if isinstance(ax, OpGraph):
        return [Sequent((), (), (Eq(App(ax.op, tuple(App(c) for c in ins)), App(out)),))
                for ins, out in ax.rows]
    raise TypeError(f"not a schema axiom: {ax!r}")


def expand_all(thy: Theory) -> Theory:
    out = []
    for ax in thy.axioms:
        out.extend(expand(ax) if isinstance(ax, SCHEMA_AXIOMS) else [ax])
    return Theory(thy.signature, out)


# -- substitution --------------------------------------------------------

def shift(t: Term, by: int, cutoff: int = 0) -> Term:
    """Add ``by`` to every variable index ``>= cutoff``."""
    if isinstance(t, Var):
        return Var(t.index + by) if t.index >= cutoff else t
    return App(t.op, tuple(shift(a, by, cutoff) for a in t.args))


def subst_term(t: Term, terms: Sequence[Term]) -> Term:
    """Replace ``Var(i)`` by ``terms[i]``."""
    if isinstance(t, Var):
        return terms[t.index]
    if not t.args:
        return t
    return App(t.op, tuple(subst_term(a, terms) for a in t.args))


def subst_formula(phi: Formula, terms: Sequence[Term]) -> Formula:
    if isinstance(phi, (Top, Bottom)):
        return phi
    if isinstance(phi, Eq):
        return Eq(subst_term(phi.left, terms), subst_term(phi.right, terms))
    if isinstance(phi, Pred):
        return Pred(phi.name, tuple(subst_term(a, terms) for a in phi.args))
    if isinstance(phi, And):
        return And(tuple(subst_formula(p, terms) for p in phi.parts))
    if isinstance(phi, Or):
        return Or(tuple(subst_formula(p, terms) for p in phi.parts))
    if isinstance(phi, Exists):
        inner = (Var(0), *(shift(t, 1) for t in terms))
        return Exists(phi.sort, subst_formula(phi.body, inner))
    raise TypeError(f"not a formula: {phi!r}")


def rename_term(t: Term, ops: dict[str, str]) -> Term:
    if isinstance(t, Var):
        return t
    return App(ops.get(t.op, t.op), tuple(rename_term(a, ops) for a in t.args))


def rename_formula(phi: Formula, ops: dict[str, str], preds: dict[str, str],
                   sorts: dict[str, str]) -> Formula:
    if isinstance(phi, (Top, Bottom)):
        return phi
    if isinstance(phi, Eq):
        return Eq(rename_term(phi.left, ops), rename_term(phi.right, ops))
    if isinstance(phi, Pred):
        return Pred(preds.get(phi.name, phi.name), tuple(rename_term(a, ops) for a in phi.args))
    if isinstance(phi, And):
        return And(tuple(rename_formula(p, ops, preds, sorts) for p in phi.parts))
    if isinstance(phi, Or):
        return Or(tuple(rename_formula(p, ops, preds, sorts) for p in phi.parts))
    if isinstance(phi, Exists):
        return Exists(sorts.get(phi.sort, phi.sort), rename_formula(phi.body, ops, preds, sorts))
    raise TypeError(f"not a formula: {phi!r}")
