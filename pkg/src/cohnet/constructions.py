"""Building theories from schemas, data and other theories.

* :func:`schema_to_theory` turns a finite category presentation into a
  theory whose models are its instances.
* :func:`hard_code` pins a finite instance down to isomorphism with
  constants, distinctness, cover and operation-graph axioms.
* :func:`pushout` glues two theories along identified symbols.
* :class:`Interpretation` maps sorts to contexts, operations to tuples of
  terms and predicates to formulas; :func:`precompose` transports models
  backwards along it.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Mapping, Sequence

from . import kernels
from .finset import FinFunction, FinSet, Subobject, product
from .schema import CategoryPresentation, Instance, Path, check_functorial
from .semantics import SetStructure, ValidityReport, check_model, _Evaluator, _check_axiom
from .syntax import (And, App, Axiom, Bottom, CoverByConstants,
                     DistinctConstants, Eq, Exists, Formula, OpGraph, OpSymbol,
                     Or, Pred, PredSymbol, Sequent, Signature, SortError, Term,
                     Theory, Top, Var, check_formula, expand, rename_formula,
                     subst_formula, subst_term, term_sort)


class InterpretationError(ValueError):
    pass


@dataclass(frozen=True)
class Interpretation:
    """A theory morphism ``source -> target``.

    ``sort_map[s]`` is a context of target sorts; ``op_map[f]`` has one
    target term per factor of the image of ``f``'s result sort, written over
    the flattened image of ``f``'s argument sorts; ``pred_map[p]`` is a
    formula over the flattened image of ``p``'s argument sorts.
    """
    source: Theory
    target: Theory
    sort_map: Mapping[str, tuple[str, ...]]
    op_map: Mapping[str, tuple[Term, ...]]
    pred_map: Mapping[str, Formula] = field(default_factory=dict)

    def __post_init__(self):
        object.__setattr__(self, "sort_map",
                           {k: tuple(v) for k, v in self.sort_map.items()})
        object.__setattr__(self, "op_map", {k: tuple(v) for k, v in self.op_map.items()})
        object.__setattr__(self, "pred_map", dict(self.pred_map))
        src, tgt = self.source.signature, self.target.signature
        if set(self.sort_map) != set(src.sorts):
            raise InterpretationError("sort map does not cover the source sorts")
        for s, ctx in self.sort_map.items():
            for u in ctx:
                if u not in tgt.sorts:
                    raise InterpretationError(f"sort {s} maps to unknown sort {u}")
        if set(self.op_map) != set(src.op):
            raise InterpretationError("operation map does not cover the source operations")
        if set(self.pred_map) != set(src.pred):
            raise InterpretationError("predicate map does not cover the source predicates")
        for o in src.operations:
            ctx = self.flat_context(o.args)
            want = self.sort_map[o.result]
            terms = self.op_map[o.name]
            if len(terms) != len(want):
                raise InterpretationError(
                    f"{o.name} needs {len(want)} terms, got {len(terms)}")
            for t, s in zip(terms, want):
                try:
                    got = term_sort(tgt, ctx, t)
                except SortError as exc:
                    raise InterpretationError(f"image of {o.name}: {exc}") from None
                if got != s:
                    raise InterpretationError(f"image of {o.name} has sort {got}, expected {s}")
        for p in src.predicates:
            try:
                check_formula(tgt, self.flat_context(p.args), self.pred_map[p.name])
            except SortError as exc:
                raise InterpretationError(f"image of {p.name}: {exc}") from None

    def flat_context(self, sorts: Sequence[str]) -> tuple[str, ...]:
        out: list[str] = []
        for s in sorts:
            out.extend(self.sort_map[s])
        return tuple(out)

    # -- translation --
    def _offsets(self, ctx: Sequence[str]) -> list[int]:
        offs, acc = [], 0
        for s in ctx:
            offs.append(acc)
            acc += len(self.sort_map[s])
        return offs

    def translate_term(self, t: Term, ctx: Sequence[str]) -> tuple[Term, ...]:
        return self._term(t, ctx, self._offsets(ctx))

    def _term(self, t, ctx, offs) -> tuple[Term, ...]:
        if isinstance(t, Var):
            width = len(self.sort_map[ctx[t.index]])
            return tuple(Var(offs[t.index] + k) for k in range(width))
        flat: list[Term] = []
        for a in t.args:
            flat.extend(self._term(a, ctx, offs))
        return tuple(subst_term(u, flat) for u in self.op_map[t.op])

    def translate_formula(self, phi: Formula, ctx: Sequence[str]) -> Formula:
        ctx = tuple(ctx)
        offs = self._offsets(ctx)
        if isinstance(phi, (Top, Bottom)):
            return phi
        if isinstance(phi, Eq):
            left = self._term(phi.left, ctx, offs)
            right = self._term(phi.right, ctx, offs)
            if len(left) == 1:
                return Eq(left[0], right[0])
            return And(tuple(Eq(a, b) for a, b in zip(left, right)))
        if isinstance(phi, Pred):
            flat: list[Term] = []
            for a in phi.args:
                flat.extend(self._term(a, ctx, offs))
            return subst_formula(self.pred_map[phi.name], flat)
        if isinstance(phi, And):
            return And(tuple(self.translate_formula(p, ctx) for p in phi.parts))
        if isinstance(phi, Or):
            return Or(tuple(self.translate_formula(p, ctx) for p in phi.parts))
        if isinstance(phi, Exists):
            body = self.translate_formula(phi.body, (phi.sort, *ctx))
            # innermost binder is the first factor of the bound sort's image
            for u in self.sort_map[phi.sort]:
                body = Exists(u, body)
            return body
        raise TypeError(f"not a formula: {phi!r}")

    def translate_sequent(self, seq: Sequent) -> Sequent:
        return Sequent(self.flat_context(seq.context),
                       tuple(self.translate_formula(p, seq.context) for p in seq.lhs),
                       tuple(self.translate_formula(p, seq.context) for p in seq.rhs))

    def _constant_image(self, c: str) -> str | None:
        terms = self.op_map[c]
        if len(terms) == 1 and isinstance(terms[0], App) and not terms[0].args:
            return terms[0].op
        return None

    def translate_axiom(self, ax: Axiom) -> list[Axiom]:
        """Translate one axiom. Schema axioms stay compressed when their
        symbols map to symbols one-for-one; otherwise they are expanded."""
        if isinstance(ax, Sequent):
            return [self.translate_sequent(ax)]
        if isinstance(ax, (DistinctConstants, CoverByConstants)):
            image = self.sort_map[ax.sort]
            names = [self._constant_image(c) for c in ax.constants]
            if len(image) == 1 and None not in names:
                return [type(ax)(image[0], tuple(names))]
        elif isinstance(ax, OpGraph):
            terms = self.op_map[ax.op]
            sym = self.source.signature.op[ax.op]
            width = len(self.flat_context(sym.args))
            simple = (len(terms) == 1 and isinstance(terms[0], App)
                      and terms[0].args == tuple(Var(k) for k in range(width)))
            consts = {c for ins, out in ax.rows for c in (*ins, out)}
            images = {c: self._constant_image(c) for c in consts}
            if simple and None not in images.values():
                return [OpGraph(terms[0].op, tuple(
                    (tuple(images[c] for c in ins), images[out]) for ins, out in ax.rows))]
        return [self.translate_sequent(s) for s in expand(ax)]

    # -- composition --
    def then(self, other: Interpretation) -> Interpretation:
        """``other . self``: first this interpretation, then ``other``."""
        if other.source != self.target:
            raise InterpretationError("interpretations are not composable")
        sorts = {s: other.flat_context(ctx) for s, ctx in self.sort_map.items()}
        ops = {}
        src = self.source.signature
        for o in src.operations:
            ctx = self.flat_context(o.args)
            terms: list[Term] = []
            for t in self.op_map[o.name]:
                terms.extend(other.translate_term(t, ctx))
            ops[o.name] = tuple(terms)
        preds = {p.name: other.translate_formula(self.pred_map[p.name], self.flat_context(p.args))
                 for p in src.predicates}
        return Interpretation(self.source, other.target, sorts, ops, preds)

    def retarget(self, target: Theory) -> Interpretation:
        """The same symbol maps into a theory with the same signature or an
        extension of it (followed by the inclusion)."""
        return Interpretation(self.source, target, self.sort_map, self.op_map, self.pred_map)

    @classmethod
    def identity(cls, thy: Theory) -> Interpretation:
        return renaming(thy, thy, {}, {}, {})


def renaming(source: Theory, target: Theory, sorts: Mapping[str, str],
             ops: Mapping[str, str], preds: Mapping[str, str]) -> Interpretation:
    """Symbol-for-symbol interpretation; unnamed symbols keep their names."""
    sig = source.signature
    sort_map = {s: (sorts.get(s, s),) for s in sig.sorts}
    op_map = {o.name: (App(ops.get(o.name, o.name), tuple(Var(k) for k in range(len(o.args)))),)
              for o in sig.operations}
    pred_map = {p.name: Pred(preds.get(p.name, p.name), tuple(Var(k) for k in range(len(p.args))))
                for p in sig.predicates}
    return Interpretation(source, target, sort_map, op_map, pred_map)


# -- schemas -----------------------------------------------------------------

def _path_term(path: Path) -> Term:
    t: Term = Var(0)
    for g in path.steps:
        t = App(g, (t,))
    return t


def schema_to_theory(d: CategoryPresentation) -> Theory:
    sig = Signature(d.objects,
                    tuple(OpSymbol(g.name, (g.src,), g.dst) for g in d.generators))
    axioms = [Sequent((p.start,), (), (Eq(_path_term(p), _path_term(q)),))
              for p, q in d.equations]
    return Theory(sig, axioms)


def instance_to_structure(inst: Instance) -> SetStructure:
    return SetStructure(schema_to_theory(inst.schema).signature,
                        inst.object_map, inst.generator_map, {})


def structure_to_instance(m: SetStructure, d: CategoryPresentation) -> Instance:
    return Instance(d, m.sort_map, m.op_map)


def constant_name(obj: str, i: int) -> str:
    return f"{obj}_{i}"


def hard_code(inst: Instance) -> Theory:
    """A theory all of whose models are isomorphic to the instance (with
    every element named by a constant)."""
    violation = check_functorial(inst)
    if violation is not None:
        raise ValueError(f"instance is not functorial: equation {violation.equation} "
                         f"fails at element {violation.witness}")
    base = schema_to_theory(inst.schema)
    consts, axioms = [], []
    for obj in inst.schema.objects:
        names = tuple(constant_name(obj, i) for i in range(inst.object_map[obj].size))
        consts.extend(OpSymbol(c, (), obj) for c in names)
        axioms.append(DistinctConstants(obj, names))
        axioms.append(CoverByConstants(obj, names))
    for g in inst.schema.generators:
        table = inst.generator_map[g.name].table
        axioms.append(OpGraph(g.name, tuple(
            ((constant_name(g.src, i),), constant_name(g.dst, y)) for i, y in enumerate(table))))
    return base.extend(operations=consts, axioms=axioms)


def hard_code_structure(inst: Instance) -> SetStructure:
    """The defining model of :func:`hard_code`: the instance itself with
    constant ``<Obj>_<i>`` interpreted as element ``i``."""
    thy = hard_code(inst)
    ops = dict(inst.generator_map)
    for obj in inst.schema.objects:
        s = inst.object_map[obj]
        for i in range(s.size):
            ops[constant_name(obj, i)] = FinFunction.element(s, i)
    return SetStructure(thy.signature, inst.object_map, ops, {})


# -- pushouts ----------------------------------------------------------------

class PushoutError(ValueError):
    pass


@dataclass(frozen=True)
class TheoryPushout:
    left: Theory
    right: Theory
    apex: Theory
    left_leg: Interpretation
    right_leg: Interpretation
    shared: tuple[tuple[str, str], ...] = ()


def _kind(sig: Signature, name: str) -> str | None:
    kinds = [k for k, names in (("sort", sig.sorts), ("op", sig.op), ("pred", sig.pred))
             if name in names]
    if len(kinds) > 1:
        raise PushoutError(f"symbol {name} is ambiguous between {kinds}")
    return kinds[0] if kinds else None


def rename_axiom(ax: Axiom, sorts: Mapping[str, str], ops: Mapping[str, str],
                 preds: Mapping[str, str]) -> Axiom:
    if isinstance(ax, Sequent):
        return Sequent(tuple(sorts.get(s, s) for s in ax.context),
                       tuple(rename_formula(p, ops, preds, sorts) for p in ax.lhs),
                       tuple(rename_formula(p, ops, preds, sorts) for p in ax.rhs))
    if isinstance(ax, (DistinctConstants, CoverByConstants)):
        return type(ax)(sorts.get(ax.sort, ax.sort), tuple(ops.get(c, c) for c in ax.constants))
    if isinstance(ax, OpGraph):
        return OpGraph(ops.get(ax.op, ax.op), tuple(
            (tuple(ops.get(c, c) for c in ins), ops.get(out, out)) for ins, out in ax.rows))
    raise TypeError(f"not an axiom: {ax!r}")


def rename_theory(thy: Theory, sorts: Mapping[str, str], ops: Mapping[str, str],
                  preds: Mapping[str, str]) -> Theory:
    sig = thy.signature
    new_sig = Signature(
        tuple(sorts.get(s, s) for s in sig.sorts),
        tuple(OpSymbol(ops.get(o.name, o.name), tuple(sorts.get(s, s) for s in o.args),
                       sorts.get(o.result, o.result)) for o in sig.operations),
        tuple(PredSymbol(preds.get(p.name, p.name), tuple(sorts.get(s, s) for s in p.args))
              for p in sig.predicates))
    return Theory(new_sig, tuple(rename_axiom(a, sorts, ops, preds) for a in thy.axioms))


def pushout(left: Theory, right: Theory,
            shared: Sequence[tuple[str, str]] = ()) -> TheoryPushout:
    """Glue two theories, identifying each ``(left symbol, right symbol)``.

    Merged symbols keep the left name. A non-identified symbol keeps its
    name unless the other side has a symbol of the same kind and name, in
    which case it is prefixed with ``left.`` or ``right.``. Axioms are the
    union of both sides' axioms after renaming, duplicates dropped.
    """
    ls, rs = left.signature, right.signature
    merged: dict[str, dict[str, str]] = {"sort": {}, "op": {}, "pred": {}}
    for l, r in shared:
        lk, rk = _kind(ls, l), _kind(rs, r)
        if lk is None or rk is None:
            raise PushoutError(f"identified symbols {l}/{r} are not declared")
        if lk != rk:
            raise PushoutError(f"cannot identify {lk} {l} with {rk} {r}")
        if r in merged[rk] and merged[rk][r] != l:
            raise PushoutError(f"{r} identified with two left symbols")
        merged[rk][r] = l

    names = {"sort": (ls.sorts, rs.sorts), "op": (tuple(ls.op), tuple(rs.op)),
             "pred": (tuple(ls.pred), tuple(rs.pred))}
    lren: dict[str, dict[str, str]] = {}
    rren: dict[str, dict[str, str]] = {}
    for kind, (lnames, rnames) in names.items():
        merged_left = set(merged[kind].values())
        r_free = [r for r in rnames if r not in merged[kind]]
        l_all = set(lnames)
        lren[kind] = {l: f"left.{l}" for l in lnames
                      if l in r_free and l not in merged_left}
        rren[kind] = {r: f"right.{r}" for r in r_free if r in l_all}
        rren[kind].update(merged[kind])

    left_r = rename_theory(left, lren["sort"], lren["op"], lren["pred"])
    right_r = rename_theory(right, rren["sort"], rren["op"], rren["pred"])
    lsig, rsig = left_r.signature, right_r.signature
    for kind in ("op", "pred"):
        for r, l in merged[kind].items():
            lname = lren[kind].get(l, l)
            a = (lsig.op if kind == "op" else lsig.pred)[lname]
            b = (rsig.op if kind == "op" else rsig.pred)[lname]
            if a != b:
                raise PushoutError(f"identified {kind}s {l}/{r} have different arities or sorts")
    sorts = list(lsig.sorts) + [s for s in rsig.sorts if s not in lsig.sorts]
    ops = list(lsig.operations) + [o for o in rsig.operations if o.name not in lsig.op]
    preds = list(lsig.predicates) + [p for p in rsig.predicates if p.name not in lsig.pred]
    axioms: list[Axiom] = []
    seen = set()
    for ax in (*left_r.axioms, *right_r.axioms):
        if ax not in seen:
            seen.add(ax)
            axioms.append(ax)
    apex = Theory(Signature(sorts, ops, preds), axioms)
    return TheoryPushout(
        left, right, apex,
        renaming(left, apex, lren["sort"], lren["op"], lren["pred"]),
        renaming(right, apex, rren["sort"], rren["op"], rren["pred"]),
        tuple(shared))


# -- model transport ---------------------------------------------------------

class PrecomposeError(ValueError):
    def __init__(self, message: str, axiom: int | None = None,
                 report: ValidityReport | None = None):
        self.axiom = axiom
        self.report = report
        super().__init__(message)


def op_domain(sort_map: Mapping[str, FinSet], args: Sequence[str]) -> FinSet:
    """Domain set of an operation table: the sort itself for unary
    operations, otherwise the product flattened to a plain set."""
    if len(args) == 1:
        return sort_map[args[0]]
    return product(sort_map[s] for s in args).as_finset()


def check_translated_axioms(interp: Interpretation, m: SetStructure) -> ValidityReport:
    """Whether every source axiom, translated, holds in the target model.
    A failure names the source axiom index."""
    ev = _Evaluator(m)
    for i, ax in enumerate(interp.source.axioms):
        for piece in interp.translate_axiom(ax):
            report = _check_axiom(m, ev, i, piece)
            if not report.valid:
                return ValidityReport(False, i, report.part, report.witness, report.detail)
    return ValidityReport(True)


def precompose(interp: Interpretation, m: SetStructure, check: bool = True) -> SetStructure:
    """The source structure induced by a target model.

    With ``check`` the target model and every translated source axiom are
    verified first, so the result is a model of the source theory.
    """
    if check:
        report = check_model(m, interp.target)
        if not report.valid:
            raise PrecomposeError(f"target structure is not a model: {report.describe()}",
                                  report=report)
        report = check_translated_axioms(interp, m)
        if not report.valid:
            raise PrecomposeError(
                f"source axiom {report.axiom} fails after translation: {report.describe()}",
                axiom=report.axiom, report=report)
    src = interp.source.signature
    sorts = {}
    for s in src.sorts:
        ctx = interp.sort_map[s]
        sorts[s] = m.sort_map[ctx[0]] if len(ctx) == 1 else m.domain(ctx).as_finset()
    ev = _Evaluator(m)
    ops = {}
    for o in src.operations:
        ctx = interp.flat_context(o.args)
        n = m.domain(ctx).size
        tables = [ev.term(ctx, t) for t in interp.op_map[o.name]]
        res_ctx = interp.sort_map[o.result]
        if len(tables) == 1:
            table = tables[0]
        else:
            table = kernels.pair_tables(tables, [m.sort_map[u].size for u in res_ctx], n)
        ops[o.name] = FinFunction(op_domain(sorts, o.args), sorts[o.result], table)
    preds = {}
    for p in src.predicates:
        ctx = interp.flat_context(p.args)
        members = ev.formula(ctx, interp.pred_map[p.name])
        preds[p.name] = Subobject(product(sorts[s] for s in p.args), members)
    return SetStructure(src, sorts, ops, preds)
