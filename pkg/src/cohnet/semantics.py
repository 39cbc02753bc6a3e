"""Interpretation of coherent syntax in finite sets.

A term in context ``ctx`` denotes a function ``M(ctx) -> M(sort)``; a
formula denotes a subobject of ``M(ctx)``. Equality is equality of
elements (table indices), never any numeric comparison.
"""
from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Mapping, Sequence

from . import kernels
from .finset import (FinFunction, FinSet, ProductSet, Subobject,
                     find_natural_iso, product, transport_ops)
from .syntax import (SCHEMA_AXIOMS, And, Bottom, CoverByConstants,
                     DistinctConstants, Eq, Exists, Formula, OpGraph, Or,
                     Pred, Sequent, Signature, Term, Theory, Top, Var, expand)


class StructureError(ValueError):
    pass


@dataclass(frozen=True)
class SetStructure:
    signature: Signature
    sort_map: Mapping[str, FinSet]
    op_map: Mapping[str, FinFunction]
    pred_map: Mapping[str, Subobject]

    def __post_init__(self):
        for name in ("sort_map", "op_map", "pred_map"):
            object.__setattr__(self, name, dict(getattr(self, name)))
        sig = self.signature
        if set(self.sort_map) != set(sig.sorts):
            raise StructureError("sorts do not match the signature")
        if set(self.op_map) != set(sig.op):
            raise StructureError("operations do not match the signature")
        if set(self.pred_map) != set(sig.pred):
            raise StructureError("predicates do not match the signature")
        for o in sig.operations:
            f = self.op_map[o.name]
            if f.dom.size != self.domain(o.args).size:
                raise StructureError(f"table of {o.name} has the wrong domain")
            if f.cod.size != self.sort_map[o.result].size:
                raise StructureError(f"table of {o.name} has the wrong codomain")
        for p in sig.predicates:
            if self.pred_map[p.name].ambient.sizes != self.domain(p.args).sizes:
                raise StructureError(f"predicate {p.name} has the wrong ambient")

    def domain(self, sorts: Sequence[str]) -> ProductSet:
        return product(self.sort_map[s] for s in sorts)

    def constant(self, name: str) -> int:
        return self.op_map[name].table[0]

    def replace(self, sort_map=None, op_map=None, pred_map=None) -> SetStructure:
        return SetStructure(
            self.signature,
            {**self.sort_map, **(sort_map or {})},
            {**self.op_map, **(op_map or {})},
            {**self.pred_map, **(pred_map or {})})


@dataclass(frozen=True)
class ValidityReport:
    """Outcome of a validity check. ``axiom`` is the index of the failing
    axiom, ``part`` the index within its expansion for schema axioms, and
    ``witness`` the least context tuple where the left side holds and the
    right side fails."""
    valid: bool
    axiom: int | None = None
    part: int | None = None
    witness: tuple[int, ...] | None = None
    detail: str = ""

    def __bool__(self):
        return self.valid

    def describe(self) -> str:
        if self.valid:
            return "valid"
        where = f"axiom {self.axiom}" if self.axiom is not None else "sequent"
        if self.part is not None:
            where += f" (instance {self.part})"
        text = f"invalid: {where} fails at {self.witness}"
        return f"{text}: {self.detail}" if self.detail else text


VALID = ValidityReport(True)


class _Evaluator:
    """Evaluates terms and formulas of one structure, caching tables of
    shared subterms by object identity."""

    def __init__(self, m: SetStructure):
        self.m = m
        self._cache: dict[tuple, tuple] = {}

    def sizes(self, ctx):
        return [self.m.sort_map[s].size for s in ctx]

    def term(self, ctx: tuple[str, ...], t: Term) -> tuple[int, ...]:
        key = (ctx, id(t))
        hit = self._cache.get(key)
        if hit is not None and hit[0] is t:
            return hit[1]
        if isinstance(t, Var):
            table = kernels.projection(self.sizes(ctx), t.index)
        else:
            f = self.m.op_map[t.op]
            n = self.m.domain(ctx).size
            if not t.args:
                table = kernels.constant(f.table[0], n)
            elif len(t.args) == 1:
                table = kernels.compose(self.term(ctx, t.args[0]), f.table)
            else:
                sym = self.m.signature.op[t.op]
                args = [self.term(ctx, a) for a in t.args]
                table = kernels.compose(
                    kernels.pair_tables(args, self.sizes(sym.args), n), f.table)
        self._cache[key] = (t, table)
        return table

    def formula(self, ctx: tuple[str, ...], phi: Formula) -> tuple[int, ...]:
        n = self.m.domain(ctx).size
        if isinstance(phi, Top):
            return tuple(range(n))
        if isinstance(phi, Bottom):
            return ()
        if isinstance(phi, Eq):
            return kernels.equalizer(self.term(ctx, phi.left), self.term(ctx, phi.right))
        if isinstance(phi, Pred):
            sub = self.m.pred_map[phi.name]
            sym = self.m.signature.pred[phi.name]
            args = [self.term(ctx, a) for a in phi.args]
            pairing = kernels.pair_tables(args, self.sizes(sym.args), n)
            return kernels.preimage(pairing, sub.members, sub.ambient.size)
        if isinstance(phi, And):
            if not phi.parts:
                return tuple(range(n))
            members = self.formula(ctx, phi.parts[0])
            for part in phi.parts[1:]:
                if not members:
                    break
                members = kernels.meet(members, self.formula(ctx, part))
            return members
        if isinstance(phi, Or):
            members = ()
            for part in phi.parts:
                members = kernels.join(members, self.formula(ctx, part))
            return members
        if isinstance(phi, Exists):
            inner = self.formula((phi.sort, *ctx), phi.body)
            return kernels.drop_first(inner, n)
        raise TypeError(f"not a formula: {phi!r}")


def eval_term(m: SetStructure, context: Sequence[str], t: Term) -> FinFunction:
    ctx = tuple(context)
    table = _Evaluator(m).term(ctx, t)
    sort = _result_sort(m.signature, ctx, t)
    return FinFunction(m.domain(ctx).as_finset(), m.sort_map[sort], table)


def eval_terms(m: SetStructure, context: Sequence[str], terms: Sequence[Term]
               ) -> list[tuple[int, ...]]:
    """Raw tables of several terms sharing one subterm cache."""
    ev = _Evaluator(m)
    ctx = tuple(context)
    return [ev.term(ctx, t) for t in terms]


def _result_sort(sig: Signature, ctx, t: Term) -> str:
    if isinstance(t, Var):
        return ctx[t.index]
    return sig.op[t.op].result


def eval_formula(m: SetStructure, context: Sequence[str], phi: Formula) -> Subobject:
    ctx = tuple(context)
    return Subobject(m.domain(ctx), _Evaluator(m).formula(ctx, phi))


def _check_sequent(ev: _Evaluator, seq: Sequent) -> tuple[int, ...] | None:
    ctx = seq.context
    ambient = ev.m.domain(ctx)
    lhs = tuple(range(ambient.size))
    for phi in seq.lhs:
        if not lhs:
            return None
        lhs = kernels.meet(lhs, ev.formula(ctx, phi))
    if not lhs:
        return None
    rhs = ()
    for phi in seq.rhs:
        rhs = kernels.join(rhs, ev.formula(ctx, phi))
    missing = kernels.first_missing(lhs, rhs)
    if missing == -1:
        return None
    return ambient.index_to_tuple(missing)


def check_sequent(m: SetStructure, seq: Sequent) -> ValidityReport:
    witness = _check_sequent(_Evaluator(m), seq)
    if witness is None:
        return VALID
    return ValidityReport(False, witness=witness)


def _distinct_part(n: int, i: int, j: int) -> int:
    return i * (n - 1) - i * (i - 1) // 2 + (j - i - 1)


def _check_schema_axiom(m: SetStructure, ax) -> tuple[int, tuple[int, ...], str] | None:
    """Shortcut for the regular sequent families; the failing part and
    witness coincide with checking ``expand(ax)`` in order."""
    if isinstance(ax, DistinctConstants):
        vals = [m.constant(c) for c in ax.constants]
        if len(set(vals)) == len(vals):
            return None
        seen: dict[int, int] = {}
        best = None
        for j, v in enumerate(vals):
            if v in seen:
                i = seen[v]
                if best is None or (i, j) < best:
                    best = (i, j)
            else:
                seen[v] = j
        i, j = best
        return (_distinct_part(len(vals), i, j), (),
                f"{ax.constants[i]} = {ax.constants[j]}")
    if isinstance(ax, CoverByConstants):
        covered = set(m.constant(c) for c in ax.constants)
        for x in range(m.sort_map[ax.sort].size):
            if x not in covered:
                return 0, (x,), f"element {x} of {ax.sort} is not named by a constant"
        return None
    if isinstance(ax, OpGraph):
        sym = m.signature.op[ax.op]
        table = m.op_map[ax.op].table
        dom = m.domain(sym.args)
        for k, (ins, out) in enumerate(ax.rows):
            idx = dom.tuple_to_index(tuple(m.constant(c) for c in ins))
            if table[idx] != m.constant(out):
                return k, (), f"{ax.op}({', '.join(ins)}) != {out}"
        return None
    raise TypeError(f"not a schema axiom: {ax!r}")


def _check_axiom(m: SetStructure, ev: _Evaluator, i: int, ax) -> ValidityReport:
    if isinstance(ax, SCHEMA_AXIOMS):
        hit = _check_schema_axiom(m, ax)
        if hit is None:
            return VALID
        part, witness, detail = hit
        return ValidityReport(False, i, part, witness, detail)
    witness = _check_sequent(ev, ax)
    if witness is None:
        return VALID
    return ValidityReport(False, i, None, witness)


def check_axiom_expanded(m: SetStructure, i: int, ax) -> ValidityReport:
    """Check a schema axiom through its literal sequent expansion."""
    ev = _Evaluator(m)
    for part, seq in enumerate(expand(ax)):
        witness = _check_sequent(ev, seq)
        if witness is not None:
            return ValidityReport(False, i, part, witness)
    return VALID


def check_model(m: SetStructure, thy: Theory, jobs: int = 1) -> ValidityReport:
    """Valid iff every axiom holds in ``m``; otherwise the failure of the
    least-index failing axiom. ``jobs > 1`` checks axioms concurrently
    with the same result."""
    if m.signature != thy.signature:
        raise StructureError("structure and theory have different signatures")
    if jobs <= 1:
        ev = _Evaluator(m)
        for i, ax in enumerate(thy.axioms):
            report = _check_axiom(m, ev, i, ax)
            if not report.valid:
                return report
        return VALID

    def one(item):
        i, ax = item
        return _check_axiom(m, _Evaluator(m), i, ax)

    with ThreadPoolExecutor(max_workers=jobs) as pool:
        for report in pool.map(one, enumerate(thy.axioms)):
            if not report.valid:
                return report
    return VALID


@dataclass(frozen=True)
class MorphismFailure:
    kind: str  # "operation" or "predicate"
    symbol: str
    witness: int


def _alpha_product(m: SetStructure, n: SetStructure, alpha, sorts) -> tuple[int, ...]:
    dom = m.domain(sorts)
    tables = [kernels.compose(kernels.projection(dom.sizes, k), alpha[s].table)
              for k, s in enumerate(sorts)]
    return kernels.pair_tables(tables, [n.sort_map[s].size for s in sorts], dom.size)


def check_model_morphism(m: SetStructure, n: SetStructure,
                         alpha: Mapping[str, FinFunction]) -> MorphismFailure | None:
    """Whether the per-sort family ``alpha`` commutes with every operation
    and carries every predicate of ``m`` into the one of ``n``."""
    for o in m.signature.operations:
        along = _alpha_product(m, n, alpha, o.args)
        left = kernels.compose(m.op_map[o.name].table, alpha[o.result].table)
        right = kernels.compose(along, n.op_map[o.name].table)
        for x, (a, b) in enumerate(zip(left, right)):
            if a != b:
                return MorphismFailure("operation", o.name, x)
    for p in m.signature.predicates:
        along = _alpha_product(m, n, alpha, p.args)
        target = n.pred_map[p.name]
        for x in m.pred_map[p.name].members:
            if along[x] not in target:
                return MorphismFailure("predicate", p.name, x)
    return None


def find_structure_iso(m: SetStructure, n: SetStructure) -> dict[str, FinFunction] | None:
    """A natural isomorphism between two structures of one signature,
    respecting operations and predicates, or ``None``.

    Predicates enter the search as characteristic maps into a two-element
    sort whose elements are pinned by two constants.
    """
    if m.signature != n.signature:
        return None
    omega = FinSet(2)
    typing = dict(m.signature.typing)
    a_sets, b_sets = dict(m.sort_map), dict(n.sort_map)
    a_ops, b_ops = dict(m.op_map), dict(n.op_map)
    if m.signature.predicates:
        a_sets["<omega>"] = b_sets["<omega>"] = omega
        for value, name in enumerate(("<false>", "<true>")):
            typing[name] = ((), "<omega>")
            a_ops[name] = b_ops[name] = FinFunction.element(omega, value)
        for p in m.signature.predicates:
            key = f"<chi {p.name}>"
            typing[key] = (p.args, "<omega>")
            a_ops[key] = _characteristic(m.pred_map[p.name], omega)
            b_ops[key] = _characteristic(n.pred_map[p.name], omega)
    alpha = find_natural_iso(a_sets, a_ops, b_sets, b_ops, typing)
    if alpha is None:
        return None
    alpha.pop("<omega>", None)
    return alpha


def _characteristic(sub: Subobject, omega: FinSet) -> FinFunction:
    table = [0] * sub.ambient.size
    for x in sub.members:
        table[x] = 1
    return FinFunction(sub.ambient.as_finset(), omega, tuple(table))


def transport_structure(m: SetStructure, alpha: Mapping[str, FinFunction]) -> SetStructure:
    """The structure isomorphic to ``m`` along the bijections ``alpha``."""
    sig = m.signature
    ops = transport_ops(m.sort_map, m.op_map, sig.typing, alpha)
    preds = {}
    for p in sig.predicates:
        old = m.domain(p.args)
        new = product(alpha[s].cod for s in p.args)
        preds[p.name] = Subobject.from_indices(new, (
            new.tuple_to_index(tuple(alpha[s](x) for s, x in zip(p.args, old.index_to_tuple(i))))
            for i in m.pred_map[p.name].members))
    return SetStructure(sig, {s: alpha[s].cod for s in sig.sorts}, ops, preds)
