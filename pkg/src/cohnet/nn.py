"""Dense networks over a finite float set as coherent theories.

``float_theory`` pins the float arithmetic down to isomorphism. A layer
theory adds free weight and bias constants, and an interpretation from the
span theory sends the span's output legs to the layer terms, so inference
is precomposition along that interpretation.

Naming: layer ``l`` (1-based) owns the activation ``a<l>``, the weights
``w<l>_<j>_<i>`` (input ``i`` into output ``j``) and the biases ``b<l>_<j>``.
Float elements are the constants ``V_<pattern>`` and ``E_<x*|R|+y>``.
"""
from __future__ import annotations

import re
from dataclasses import dataclass
from functools import lru_cache
from typing import Sequence

from .constructions import (Interpretation, hard_code, hard_code_structure, precompose,
                            pushout, rename_theory, schema_to_theory)
from .finset import FinFunction, FinSet, product, pullback, tupling
from .minifloat import FloatFormat, FloatTables, activation, build_tables, oracle_eval
from .schema import Instance, builtin
from .semantics import SetStructure
from .syntax import (App, Eq, OpGraph, OpSymbol, Sequent, Signature, Term, Theory,
                     Var, subst_term)

MAX_DOMAIN = 2 ** 20
CORE_OPS = ("s", "t", "pair", "p1", "p2")


class ArchitectureError(ValueError):
    pass


# -- architectures and parameters --------------------------------------------

@dataclass(frozen=True)
class Architecture:
    activations: tuple[str, ...]
    widths: tuple[int, ...]
    format: FloatFormat

    def __post_init__(self):
        object.__setattr__(self, "activations", tuple(self.activations))
        object.__setattr__(self, "widths", tuple(self.widths))
        if not self.activations:
            raise ArchitectureError("an architecture needs at least one layer")
        if len(self.widths) != len(self.activations) + 1:
            raise ArchitectureError("need one more width than activations")
        if any(w < 1 for w in self.widths):
            raise ArchitectureError("widths must be positive")

    @property
    def depth(self) -> int:
        return len(self.activations)

    @classmethod
    def parse(cls, text: str, fmt: FloatFormat) -> Architecture:
        """``<a0>-<act1>-<a1>-...``, e.g. ``2-relu-2-id-1``. Activation names
        may not contain ``-``."""
        parts = text.strip().split("-")
        if len(parts) < 3 or len(parts) % 2 == 0:
            raise ArchitectureError(f"malformed architecture {text!r}")
        try:
            widths = tuple(int(p) for p in parts[0::2])
        except ValueError:
            raise ArchitectureError(f"malformed architecture {text!r}") from None
        return cls(tuple(parts[1::2]), widths, fmt)

    def __str__(self):
        out = [str(self.widths[0])]
        for act, w in zip(self.activations, self.widths[1:]):
            out += [act, str(w)]
        return "-".join(out)


def compose(a: Architecture, b: Architecture) -> Architecture:
    """First ``a``, then ``b``."""
    if a.format != b.format:
        raise ArchitectureError("architectures use different float formats")
    if a.widths[-1] != b.widths[0]:
        raise ArchitectureError(
            f"output width {a.widths[-1]} does not match input width {b.widths[0]}")
    return Architecture(a.activations + b.activations, a.widths + b.widths[1:], a.format)


@dataclass(frozen=True)
class ParamAssignment:
    """``weights[l][j][i]`` and ``biases[l][j]`` as bit patterns."""
    weights: tuple[tuple[tuple[int, ...], ...], ...]
    biases: tuple[tuple[int, ...], ...]

    def __post_init__(self):
        object.__setattr__(self, "weights",
                           tuple(tuple(tuple(r) for r in w) for w in self.weights))
        object.__setattr__(self, "biases", tuple(tuple(b) for b in self.biases))

    def check(self, arch: Architecture) -> None:
        if len(self.weights) != arch.depth or len(self.biases) != arch.depth:
            raise ArchitectureError("one weight matrix and bias vector per layer")
        size = arch.format.size
        for l, (w, b) in enumerate(zip(self.weights, self.biases)):
            n, m = arch.widths[l], arch.widths[l + 1]
            if len(w) != m or any(len(row) != n for row in w) or len(b) != m:
                raise ArchitectureError(f"layer {l + 1} parameters have the wrong shape")
            if any(not 0 <= v < size for v in (*b, *(x for row in w for x in row))):
                raise ArchitectureError(f"layer {l + 1} has a pattern outside the format")

    @classmethod
    def random(cls, arch: Architecture, rng) -> ParamAssignment:
        size = arch.format.size
        ws, bs = [], []
        for n, m in zip(arch.widths, arch.widths[1:]):
            ws.append(tuple(tuple(rng.randrange(size) for _ in range(n)) for _ in range(m)))
            bs.append(tuple(rng.randrange(size) for _ in range(m)))
        return cls(tuple(ws), tuple(bs))


@dataclass(frozen=True)
class ParamRef:
    """``w[layer][j,i]`` or ``b[layer][j]``; layers are 1-based."""
    kind: str
    layer: int
    index: tuple[int, ...]

    def __post_init__(self):
        object.__setattr__(self, "index", tuple(self.index))
        want = {"w": 2, "b": 1}.get(self.kind)
        if want is None or len(self.index) != want:
            raise ArchitectureError(f"bad parameter reference {self}")

    @property
    def constant(self) -> str:
        return f"{self.kind}{self.layer}_" + "_".join(map(str, self.index))

    def check(self, arch: Architecture) -> None:
        if not 1 <= self.layer <= arch.depth:
            raise ArchitectureError(f"no layer {self.layer}")
        n, m = arch.widths[self.layer - 1], arch.widths[self.layer]
        bounds = (m, n) if self.kind == "w" else (m,)
        if any(not 0 <= x < b for x, b in zip(self.index, bounds)):
            raise ArchitectureError(f"{self} is out of range")

    def value(self, params: ParamAssignment) -> int:
        if self.kind == "w":
            j, i = self.index
            return params.weights[self.layer - 1][j][i]
        return params.biases[self.layer - 1][self.index[0]]

    def __str__(self):
        return f"{self.kind}[{self.layer}][{','.join(map(str, self.index))}]"


_REF = re.compile(r"^([wb])\[(\d+)\]\[(\d+(?:,\d+)?)\]$")


def parse_ref(text: str) -> ParamRef:
    m = _REF.match(text.replace(" ", ""))
    if not m:
        raise ArchitectureError(f"bad parameter reference {text!r}")
    return ParamRef(m.group(1), int(m.group(2)), tuple(int(x) for x in m.group(3).split(",")))


@dataclass(frozen=True)
class Tie:
    left: ParamRef
    right: ParamRef

    def holds(self, params: ParamAssignment) -> bool:
        return self.left.value(params) == self.right.value(params)

    def __str__(self):
        return f"tie {self.left} {self.right}"


@dataclass(frozen=True)
class Fix:
    ref: ParamRef
    value: int

    def holds(self, params: ParamAssignment) -> bool:
        return self.ref.value(params) == self.value

    def __str__(self):
        return f"fix {self.ref} {self.value:#x}"


TieConstraint = Tie | Fix


# -- float theory --------------------------------------------------------------

@lru_cache(maxsize=None)
def tables_for(fmt: FloatFormat) -> FloatTables:
    return build_tables(fmt)


def _sigma(fmt: FloatFormat, sigma: str | FinFunction) -> FinFunction:
    return activation(sigma, tables_for(fmt)) if isinstance(sigma, str) else sigma


def pol_instance(fmt: FloatFormat, sigma: str | FinFunction) -> Instance:
    tb = tables_for(fmt)
    E = product([tb.R, tb.R]).as_finset()
    return Instance(builtin("Pol"), {"V": tb.R, "E": E},
                    {"s": tb.add, "t": tb.mul, "a": _sigma(fmt, sigma)})


def _pairing_axioms(size: int) -> list:
    V = lambda k: f"V_{k}"
    E = lambda k: f"E_{k}"
    x, y, z = Var(0), Var(1), Var(0)
    pair = lambda u, v: App("pair", (u, v))
    return [
        OpGraph("pair", tuple(((V(a), V(b)), E(a * size + b))
                              for a in range(size) for b in range(size))),
        OpGraph("p1", tuple(((E(k),), V(k // size)) for k in range(size * size))),
        OpGraph("p2", tuple(((E(k),), V(k % size)) for k in range(size * size))),
        Sequent(("V", "V"), (), (Eq(App("p1", (pair(x, y),)), x),)),
        Sequent(("V", "V"), (), (Eq(App("p2", (pair(x, y),)), y),)),
        Sequent(("E",), (), (Eq(pair(App("p1", (z,)), App("p2", (z,))), z),)),
    ]


@lru_cache(maxsize=64)
def _float_theory(fmt: FloatFormat, sigma, act_name: str) -> Theory:
    thy = hard_code(pol_instance(fmt, sigma))
    if act_name != "a":
        thy = rename_theory(thy, {}, {"a": act_name}, {})
    extra = [OpSymbol("pair", ("V", "V"), "E"), OpSymbol("p1", ("E",), "V"),
             OpSymbol("p2", ("E",), "V")]
    return thy.extend(operations=extra, axioms=_pairing_axioms(fmt.size))


def float_theory(fmt: FloatFormat, sigma: str | FinFunction = "id",
                 act_name: str = "a") -> Theory:
    """Hard-coded float arithmetic with activation ``sigma`` named
    ``act_name``, plus pairing ``pair: V, V -> E`` and projections
    ``p1, p2: E -> V`` tying each ``E`` element to a pair of ``V``
    elements."""
    return _float_theory(fmt, sigma, act_name)


def float_structure(fmt: FloatFormat, sigma: str | FinFunction = "id",
                    act_name: str = "a") -> SetStructure:
    """The defining model of :func:`float_theory`."""
    base = hard_code_structure(pol_instance(fmt, sigma))
    tb = tables_for(fmt)
    n = fmt.size
    E = base.sort_map["E"]
    ops = dict(base.op_map)
    ops[act_name] = ops.pop("a")
    ops["pair"] = FinFunction(E, E, tuple(range(n * n)))
    ops["p1"] = FinFunction(E, tb.R, tuple(k // n for k in range(n * n)))
    ops["p2"] = FinFunction(E, tb.R, tuple(k % n for k in range(n * n)))
    return SetStructure(float_theory(fmt, sigma, act_name).signature,
                        base.sort_map, ops, {})


def core_symbols(fmt: FloatFormat) -> list[tuple[str, str]]:
    """Float symbols shared by every layer theory, as identifications."""
    names = ["V", "E", *CORE_OPS]
    names += [f"V_{k}" for k in range(fmt.size)]
    names += [f"E_{k}" for k in range(fmt.size ** 2)]
    return [(x, x) for x in names]


# -- span and layer theories ---------------------------------------------------

def _span_part(n: int, m: int) -> Theory:
    # Span with X and Y replaced by n and m copies of V: each leg becomes a
    # family f1..fn, t1..tm
    span = schema_to_theory(builtin("Span"))
    widths = {"X": n, "Y": m}
    ops = []
    for o in span.signature.operations:
        ops += [OpSymbol(f"{o.name}{i}", o.args, "V") for i in range(1, widths[o.result] + 1)]
    return Theory(Signature(("N", "V"), ops), span.axioms)


@lru_cache(maxsize=64)
def rspan_theory(n: int, m: int, fmt: FloatFormat) -> Theory:
    """Datasets ``V^n <- N -> V^m`` over rigid float arithmetic (with the
    identity activation ``a``); ``N`` is unconstrained."""
    if n < 1 or m < 1:
        raise ArchitectureError("span widths must be positive")
    return pushout(float_theory(fmt, "id"), _span_part(n, m), [("V", "V")]).apex


def _add(u: Term, v: Term) -> Term:
    return App("s", (App("pair", (u, v)),))


def _mul(u: Term, v: Term) -> Term:
    return App("t", (App("pair", (u, v)),))


def _sum(terms: Sequence[Term]) -> Term:
    acc = terms[-1]
    for u in reversed(terms[:-1]):
        acc = _add(u, acc)
    return acc


def layer_terms(n: int, m: int, layer: int, inputs: Sequence[Term]) -> tuple[Term, ...]:
    """``a<l>(add(sum_i mul(w_j_i, x_i), b_j))`` for each output ``j``."""
    out = []
    for j in range(m):
        prods = [_mul(App(f"w{layer}_{j}_{i}"), inputs[i]) for i in range(n)]
        out.append(App(f"a{layer}", (_add(_sum(prods), App(f"b{layer}_{j}")),)))
    return tuple(out)


def output_width(iota: Interpretation) -> int:
    return sum(1 for name in iota.op_map if name[:1] == "t" and name[1:].isdigit())


def span_interpretation(n: int, m: int, fmt: FloatFormat, target: Theory,
                        outputs: Sequence[Term]) -> Interpretation:
    """``rspan_theory(n, m)`` into ``target``: inputs are the identity, the
    ``t`` legs are ``outputs`` (terms over ``n`` copies of ``V``) and the
    span's identity activation is the identity."""
    src = rspan_theory(n, m, fmt)
    sort_map = {"N": ("V",) * n, "V": ("V",), "E": ("E",)}
    op_map = {}
    for o in src.signature.operations:
        if o.name.startswith("f") and o.name[1:].isdigit():
            op_map[o.name] = (Var(int(o.name[1:]) - 1),)
        elif o.name.startswith("t") and o.name[1:].isdigit():
            op_map[o.name] = (outputs[int(o.name[1:]) - 1],)
        elif o.name == "a":
            op_map[o.name] = (Var(0),)
        else:
            op_map[o.name] = (App(o.name, tuple(Var(k) for k in range(len(o.args)))),)
    return Interpretation(src, target, sort_map, op_map, {})


def _params_theory(n: int, m: int, layer: int) -> Theory:
    consts = [OpSymbol(f"w{layer}_{j}_{i}", (), "V") for j in range(m) for i in range(n)]
    consts += [OpSymbol(f"b{layer}_{j}", (), "V") for j in range(m)]
    return Theory(Signature(("V",), consts), ())


def layer_theory(sigma: str | FinFunction, n: int, m: int, fmt: FloatFormat,
                 layer: int = 1) -> tuple[Theory, Interpretation]:
    if n < 1 or m < 1:
        raise ArchitectureError("layer widths must be positive")
    G = pushout(float_theory(fmt, sigma, f"a{layer}"), _params_theory(n, m, layer),
                [("V", "V")]).apex
    iota = span_interpretation(n, m, fmt, G, layer_terms(n, m, layer,
                                                         [Var(i) for i in range(n)]))
    return G, iota


def compose_theories(GA: Theory, iA: Interpretation, GB: Theory, iB: Interpretation,
                     fmt: FloatFormat) -> tuple[Theory, Interpretation]:
    """Glue two network theories over the shared float core and substitute
    the first network's outputs into the second's."""
    n = len(iA.sort_map["N"])
    mid = len(iB.sort_map["N"])
    tA = [iA.op_map[f"t{j}"][0] for j in range(1, output_width(iA) + 1)]
    if len(tA) != mid:
        raise ArchitectureError(f"output width {len(tA)} does not match input width {mid}")
    po = pushout(GA, GB, core_symbols(fmt))
    ctxA, ctxB = ("V",) * n, ("V",) * mid
    left = [po.left_leg.translate_term(t, ctxA)[0] for t in tA]
    m = output_width(iB)
    outs = []
    for j in range(1, m + 1):
        tb = po.right_leg.translate_term(iB.op_map[f"t{j}"][0], ctxB)[0]
        outs.append(subst_term(tb, left))
    return po.apex, span_interpretation(n, m, fmt, po.apex, outs)


def architecture_theory(arch: Architecture, first_layer: int = 1
                        ) -> tuple[Theory, Interpretation]:
    G, iota = None, None
    for k, sigma in enumerate(arch.activations):
        n, m = arch.widths[k], arch.widths[k + 1]
        Gl, il = layer_theory(sigma, n, m, arch.format, first_layer + k)
        if G is None:
            G, iota = Gl, il
        else:
            G, iota = compose_theories(G, iota, Gl, il, arch.format)
    return G, iota


def constraint_axiom(c: TieConstraint) -> Sequent:
    if isinstance(c, Tie):
        eq = Eq(App(c.left.constant), App(c.right.constant))
    else:
        eq = Eq(App(c.ref.constant), App(f"V_{c.value}"))
    return Sequent((), (), (eq,))


def apply_constraints(G: Theory, iota: Interpretation,
                      constraints: Sequence[TieConstraint],
                      arch: Architecture | None = None
                      ) -> tuple[Theory, Interpretation]:
    """One closed equation per tie or fix."""
    for c in constraints:
        refs = (c.left, c.right) if isinstance(c, Tie) else (c.ref,)
        for r in refs:
            if arch is not None:
                r.check(arch)
            if r.constant not in G.signature.op:
                raise ArchitectureError(f"{r} does not name a parameter of the theory")
        if isinstance(c, Fix) and f"V_{c.value}" not in G.signature.op:
            raise ArchitectureError(f"{c.value:#x} is not a float pattern")
    H = G.extend(axioms=[constraint_axiom(c) for c in constraints])
    return H, iota.retarget(H)


# -- models and inference --------------------------------------------------------

def build_model(G: Theory, arch: Architecture, params: ParamAssignment) -> SetStructure:
    params.check(arch)
    fmt = arch.format
    base = float_structure(fmt, "id")
    R = base.sort_map["V"]
    ops = {k: v for k, v in base.op_map.items() if k != "a"}
    for l, sigma in enumerate(arch.activations, 1):
        ops[f"a{l}"] = _sigma(fmt, sigma)
        for j, row in enumerate(params.weights[l - 1]):
            for i, v in enumerate(row):
                ops[f"w{l}_{j}_{i}"] = FinFunction.element(R, v)
        for j, v in enumerate(params.biases[l - 1]):
            ops[f"b{l}_{j}"] = FinFunction.element(R, v)
    return SetStructure(G.signature, base.sort_map, ops, {})


@dataclass(frozen=True)
class SpanDataset:
    """Rows ``f(k) -> t(k)``; ``f`` lands in ``R^n`` and ``t`` in ``R^m``,
    both flattened mixed radix with the last coordinate fastest."""
    N: FinSet
    f: FinFunction
    t: FinFunction
    n: int
    m: int
    radix: int

    def __post_init__(self):
        size = self.radix
        if self.f.dom.size != self.N.size or self.t.dom.size != self.N.size:
            raise ValueError("span legs must start at N")
        if self.f.cod.size != size ** self.n or self.t.cod.size != size ** self.m:
            raise ValueError("span legs have the wrong codomains")

    def rows(self) -> list[tuple[tuple[int, ...], tuple[int, ...]]]:
        R = FinSet(self.radix)
        X, Y = product([R] * self.n), product([R] * self.m)
        return [(X.index_to_tuple(a), Y.index_to_tuple(b))
                for a, b in zip(self.f.table, self.t.table)]


def infer(G: Theory, iota: Interpretation, M: SetStructure, check: bool = True
          ) -> SpanDataset:
    """The network's full input/output span, by precomposition."""
    n = len(iota.sort_map["N"])
    size = M.sort_map["V"].size
    if size ** n > MAX_DOMAIN:
        raise ArchitectureError(f"input domain of {size}^{n} rows is too large to enumerate")
    S = precompose(iota, M, check=check)
    m = sum(1 for o in S.signature.op if o[:1] == "t" and o[1:].isdigit())
    fs = [S.op_map[f"f{i}"] for i in range(1, n + 1)]
    ts = [S.op_map[f"t{j}"] for j in range(1, m + 1)]
    N = S.sort_map["N"]
    return SpanDataset(N, tupling(fs, N), tupling(ts, N), n, m, size)


def oracle_dataset(arch: Architecture, params: ParamAssignment) -> SpanDataset:
    params.check(arch)
    fmt = arch.format
    tb = tables_for(fmt)
    n, m = arch.widths[0], arch.widths[-1]
    if fmt.size ** n > MAX_DOMAIN:
        raise ArchitectureError("input domain too large to enumerate")
    acts = [_sigma(fmt, s) for s in arch.activations]
    X, Y = product([tb.R] * n), product([tb.R] * m)
    out = []
    for k in range(X.size):
        y = oracle_eval(tb, acts, params.weights, params.biases, X.index_to_tuple(k))
        out.append(Y.tuple_to_index(y))
    N = X.as_finset()
    return SpanDataset(N, FinFunction.identity(N), FinFunction(N, Y.as_finset(), out),
                       n, m, fmt.size)


def compose_spans(a: SpanDataset, b: SpanDataset) -> SpanDataset:
    """Pullback of ``a.t`` against ``b.f``, with the outer legs."""
    if a.m != b.n or a.radix != b.radix:
        raise ValueError("spans are not composable")
    P, p1, p2 = pullback(a.t, b.f)
    N = FinSet(len(P.members))
    return SpanDataset(N, FinFunction(N, a.f.cod, p1.then(a.f).table),
                       FinFunction(N, b.t.cod, p2.then(b.t).table), a.n, b.m, a.radix)
