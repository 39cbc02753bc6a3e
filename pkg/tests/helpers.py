"""Random generators and a brute-force evaluator shared by the tests.

The naive evaluator works on explicit environments (tuples of element
indices) and set comprehensions, and shares no code with
``cohnet.semantics`` beyond reading the structure's tables.
"""
from __future__ import annotations

import itertools

from cohnet.finset import FinFunction, FinSet, Subobject, product
from cohnet.semantics import SetStructure
from cohnet.syntax import (And, App, Bottom, CoverByConstants, DistinctConstants, Eq,
                           Exists, OpGraph, OpSymbol, Or, Pred, PredSymbol, Sequent,
                           Signature, Theory, Top, Var)

# -- naive semantics ------------------------------------------------------------


def _radix(values, sizes):
    idx = 0
    for v, n in zip(values, sizes):
        idx = idx * n + v
    return idx


def naive_term(m: SetStructure, env, t):
    if isinstance(t, Var):
        return env[t.index]
    sym = m.signature.op[t.op]
    vals = [naive_term(m, env, a) for a in t.args]
    sizes = [m.sort_map[s].size for s in sym.args]
    return m.op_map[t.op].table[_radix(vals, sizes)]


def naive_holds(m: SetStructure, env, phi) -> bool:
    if isinstance(phi, Top):
        return True
    if isinstance(phi, Bottom):
        return False
    if isinstance(phi, Eq):
        return naive_term(m, env, phi.left) == naive_term(m, env, phi.right)
    if isinstance(phi, Pred):
        sym = m.signature.pred[phi.name]
        vals = [naive_term(m, env, a) for a in phi.args]
        sizes = [m.sort_map[s].size for s in sym.args]
        return _radix(vals, sizes) in set(m.pred_map[phi.name].members)
    if isinstance(phi, And):
        return all(naive_holds(m, env, p) for p in phi.parts)
    if isinstance(phi, Or):
        return any(naive_holds(m, env, p) for p in phi.parts)
    if isinstance(phi, Exists):
        return any(naive_holds(m, (y, *env), phi.body)
                   for y in range(m.sort_map[phi.sort].size))
    raise TypeError(phi)


def naive_formula(m: SetStructure, ctx, phi) -> list[int]:
    """Indices of the context tuples satisfying ``phi``, by enumeration."""
    envs = itertools.product(*(range(m.sort_map[s].size) for s in ctx))
    return [i for i, env in enumerate(envs) if naive_holds(m, env, phi)]


def naive_valid(m: SetStructure, seq: Sequent):
    """Least counterexample tuple, or None."""
    for env in itertools.product(*(range(m.sort_map[s].size) for s in seq.context)):
        if all(naive_holds(m, env, p) for p in seq.lhs) and \
                not any(naive_holds(m, env, p) for p in seq.rhs):
            return env
    return None


# -- random syntax ---------------------------------------------------------------

SORT_NAMES = ["A", "B", "Cs", "left.S", "D'"]
OP_NAMES = ["f", "g", "h", "x0", "y0", "k.l", "add", "mul", "c", "d", "e", "u'"]
PRED_NAMES = ["P", "Q", "R", "right.P", "x1"]


def random_signature(rng, max_sorts=3, max_ops=5, max_preds=2, max_arity=2) -> Signature:
    sorts = rng.sample(SORT_NAMES, rng.randint(1, max_sorts))
    ops = []
    for name in rng.sample(OP_NAMES, rng.randint(0, max_ops)):
        args = tuple(rng.choice(sorts) for _ in range(rng.randint(0, max_arity)))
        ops.append(OpSymbol(name, args, rng.choice(sorts)))
    preds = [PredSymbol(name, tuple(rng.choice(sorts) for _ in range(rng.randint(0, max_arity))))
             for name in rng.sample(PRED_NAMES, rng.randint(0, max_preds))]
    return Signature(tuple(sorts), tuple(ops), tuple(preds))


def random_structure(rng, sig: Signature, max_size=4, min_size=0) -> SetStructure:
    sizes = {s: rng.randint(min_size, max_size) for s in sig.sorts}
    changed = True
    while changed:
        # a function into an empty set needs an empty domain
        changed = False
        for o in sig.operations:
            if sizes[o.result] == 0 and all(sizes[a] > 0 for a in o.args):
                sizes[o.result] = 1
                changed = True
    sets = {s: FinSet(n) for s, n in sizes.items()}
    ops = {}
    for o in sig.operations:
        dom = product(sets[a] for a in o.args)
        cod = sets[o.result]
        ops[o.name] = FinFunction(dom.as_finset(), cod,
                                  tuple(rng.randrange(cod.size) for _ in range(dom.size)))
    preds = {}
    for p in sig.predicates:
        amb = product(sets[a] for a in p.args)
        preds[p.name] = Subobject.from_indices(amb, (i for i in range(amb.size)
                                                     if rng.random() < 0.5))
    return SetStructure(sig, sets, ops, preds)


def random_term(rng, sig: Signature, ctx, sort, depth):
    vars_ = [Var(i) for i, s in enumerate(ctx) if s == sort]
    ops = [o for o in sig.operations if o.result == sort and (depth > 0 or not o.args)]
    rng.shuffle(ops)
    if vars_ and (not ops or rng.random() < 0.5):
        return rng.choice(vars_)
    for o in ops:
        args = [random_term(rng, sig, ctx, a, depth - 1) for a in o.args]
        if None not in args:
            return App(o.name, tuple(args))
    return rng.choice(vars_) if vars_ else None


def random_formula(rng, sig: Signature, ctx, depth, max_vars=4):
    kinds = ["top", "bot", "eq", "eq", "pred"]
    if depth > 0:
        kinds += ["and", "or", "exists", "exists"]
    kind = rng.choice(kinds)
    if kind == "top":
        return Top()
    if kind == "bot":
        return Bottom()
    if kind == "eq":
        s = rng.choice(sig.sorts)
        t = random_term(rng, sig, ctx, s, min(depth, 2))
        u = random_term(rng, sig, ctx, s, min(depth, 2))
        return Eq(t, u) if t is not None and u is not None else Top()
    if kind == "pred":
        if not sig.predicates:
            return Bottom()
        p = rng.choice(sig.predicates)
        args = [random_term(rng, sig, ctx, a, min(depth, 2)) for a in p.args]
        return Pred(p.name, tuple(args)) if None not in args else Bottom()
    if kind in ("and", "or"):
        parts = tuple(random_formula(rng, sig, ctx, depth - 1, max_vars)
                      for _ in range(rng.randint(0, 3)))
        return And(parts) if kind == "and" else Or(parts)
    if len(ctx) >= max_vars:
        return random_formula(rng, sig, ctx, depth - 1, max_vars)
    s = rng.choice(sig.sorts)
    return Exists(s, random_formula(rng, sig, (s, *ctx), depth - 1, max_vars))


def random_context(rng, sig: Signature, max_len=2):
    return tuple(rng.choice(sig.sorts) for _ in range(rng.randint(0, max_len)))


def random_sequent(rng, sig: Signature, depth=3) -> Sequent:
    ctx = random_context(rng, sig)
    lhs = tuple(random_formula(rng, sig, ctx, depth) for _ in range(rng.randint(0, 2)))
    rhs = tuple(random_formula(rng, sig, ctx, depth) for _ in range(rng.randint(0, 2)))
    return Sequent(ctx, lhs, rhs)


def random_schema_axiom(rng, sig: Signature):
    consts = [o for o in sig.operations if not o.args]
    if not consts:
        return None
    s = rng.choice(consts).result
    names = tuple(o.name for o in consts if o.result == s)
    kind = rng.randrange(3)
    if kind == 0:
        return DistinctConstants(s, names)
    if kind == 1:
        return CoverByConstants(s, names)
    by_sort = {}
    for o in consts:
        by_sort.setdefault(o.result, []).append(o.name)
    graphs = [o for o in sig.operations if all(a in by_sort for a in (*o.args, o.result))]
    if not graphs:
        return CoverByConstants(s, names)
    o = rng.choice(graphs)
    rows = tuple((tuple(rng.choice(by_sort[a]) for a in o.args), rng.choice(by_sort[o.result]))
                 for _ in range(rng.randint(0, 3)))
    return OpGraph(o.name, rows)


def random_theory(rng, n_axioms=None, depth=3) -> Theory:
    sig = random_signature(rng)
    n = rng.randint(0, 6) if n_axioms is None else n_axioms
    axioms = []
    for _ in range(n):
        ax = random_schema_axiom(rng, sig) if rng.random() < 0.25 else None
        axioms.append(ax if ax is not None else random_sequent(rng, sig, depth))
    return Theory(sig, tuple(axioms))
