"""Finite sets, total functions between them, finite limits and subobjects.

Elements of a :class:`FinSet` of size ``n`` are the integers ``0..n-1``.
Products index tuples in mixed radix with the last factor varying fastest,
so ``(1, 0)`` in ``16 x 16`` is index 16.
"""
from __future__ import annotations

from bisect import bisect_left
from dataclasses import dataclass, field
from math import prod
from typing import Iterable, Mapping, Sequence

from . import kernels


@dataclass(frozen=True)
class FinSet:
    size: int
    labels: tuple[str, ...] | None = None

    def __post_init__(self):
        if self.size < 0:
            raise ValueError(f"negative set size {self.size}")
        if self.labels is not None:
            object.__setattr__(self, "labels", tuple(self.labels))
            if len(self.labels) != self.size:
                raise ValueError("label count does not match size")
            if len(set(self.labels)) != self.size:
                raise ValueError("labels must be pairwise distinct")

    def __len__(self):
        return self.size

    def __iter__(self):
        return iter(range(self.size))

    def label(self, i: int) -> str:
        return self.labels[i] if self.labels is not None else str(i)


TERMINAL = FinSet(1)
INITIAL = FinSet(0)


@dataclass(frozen=True)
class FinFunction:
    dom: FinSet
    cod: FinSet
    table: tuple[int, ...]

    def __post_init__(self):
        table = tuple(self.table)
        object.__setattr__(self, "table", table)
        if len(table) != self.dom.size:
            raise ValueError(
                f"table has {len(table)} entries, domain has {self.dom.size}")
        n = self.cod.size
        if table and (min(table) < 0 or max(table) >= n):
            bad = next(x for x in table if not 0 <= x < n)
            raise ValueError(f"table entry {bad} outside codomain of size {n}")

    def __call__(self, i: int) -> int:
        return self.table[i]

    @classmethod
    def identity(cls, s: FinSet) -> FinFunction:
        return cls(s, s, tuple(range(s.size)))

    @classmethod
    def constant(cls, dom: FinSet, cod: FinSet, value: int) -> FinFunction:
        return cls(dom, cod, kernels.constant(value, dom.size))

    @classmethod
    def element(cls, cod: FinSet, value: int) -> FinFunction:
        """The global element ``1 -> cod`` picking ``value``."""
        return cls(TERMINAL, cod, (value,))

    def then(self, g: FinFunction) -> FinFunction:
        """Diagrammatic composite: first ``self``, then ``g``."""
        if self.cod.size != g.dom.size:
            raise ValueError("functions are not composable")
        return FinFunction(self.dom, g.cod, kernels.compose(self.table, g.table))

    def is_bijection(self) -> bool:
        return self.dom.size == self.cod.size and len(set(self.table)) == self.dom.size

    def inverse(self) -> FinFunction:
        if not self.is_bijection():
            raise ValueError("function is not a bijection")
        inv = [0] * self.cod.size
        for i, y in enumerate(self.table):
            inv[y] = i
        return FinFunction(self.cod, self.dom, tuple(inv))


@dataclass(frozen=True)
class ProductSet:
    factors: tuple[FinSet, ...]
    size: int = field(init=False)
    strides: tuple[int, ...] = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        factors = tuple(self.factors)
        object.__setattr__(self, "factors", factors)
        object.__setattr__(self, "size", prod(f.size for f in factors))
        strides = []
        acc = 1
        for f in reversed(factors):
            strides.append(acc)
            acc *= f.size
        object.__setattr__(self, "strides", tuple(reversed(strides)))

    @property
    def sizes(self) -> tuple[int, ...]:
        return tuple(f.size for f in self.factors)

    def as_finset(self) -> FinSet:
        return FinSet(self.size)

    def tuple_to_index(self, tup: Sequence[int]) -> int:
        if len(tup) != len(self.factors):
            raise ValueError("tuple length does not match the number of factors")
        index = 0
        for x, f in zip(tup, self.factors):
            if not 0 <= x < f.size:
                raise ValueError(f"coordinate {x} outside factor of size {f.size}")
            index = index * f.size + x
        return index

    def index_to_tuple(self, index: int) -> tuple[int, ...]:
        if not 0 <= index < self.size:
            raise ValueError(f"index {index} outside product of size {self.size}")
        return tuple((index // st) % f.size for st, f in zip(self.strides, self.factors))

    def projection(self, k: int) -> FinFunction:
        return FinFunction(self.as_finset(), self.factors[k],
                           kernels.projection(self.sizes, k))


def product(factors: Iterable[FinSet]) -> ProductSet:
    return ProductSet(tuple(factors))


def tupling(functions: Sequence[FinFunction], dom: FinSet | None = None) -> FinFunction:
    """The pairing ``<f1, ..., fk>`` into the product of the codomains."""
    if dom is None:
        if not functions:
            raise ValueError("an empty tupling needs an explicit domain")
        dom = functions[0].dom
    for f in functions:
        if f.dom.size != dom.size:
            raise ValueError("tupled functions must share a domain")
    cod = product(f.cod for f in functions)
    table = kernels.pair_tables([f.table for f in functions],
                                [f.cod.size for f in functions], dom.size)
    return FinFunction(dom, cod.as_finset(), table)


@dataclass(frozen=True)
class Subobject:
    ambient: ProductSet
    members: tuple[int, ...]

    def __post_init__(self):
        members = tuple(self.members)
        object.__setattr__(self, "members", members)
        prev = -1
        for m in members:
            if m <= prev:
                raise ValueError("members must be sorted and duplicate-free")
            prev = m
        if members and members[-1] >= self.ambient.size:
            raise ValueError("member outside the ambient product")

    @classmethod
    def full(cls, ambient: ProductSet) -> Subobject:
        return cls(ambient, tuple(range(ambient.size)))

    @classmethod
    def empty(cls, ambient: ProductSet) -> Subobject:
        return cls(ambient, ())

    @classmethod
    def from_indices(cls, ambient: ProductSet, indices: Iterable[int]) -> Subobject:
        return cls(ambient, tuple(sorted(set(indices))))

    def __contains__(self, index: int) -> bool:
        i = bisect_left(self.members, index)
        return i < len(self.members) and self.members[i] == index

    def __len__(self):
        return len(self.members)

    def tuples(self) -> list[tuple[int, ...]]:
        return [self.ambient.index_to_tuple(m) for m in self.members]

    def is_full(self) -> bool:
        return len(self.members) == self.ambient.size

    def le(self, other: Subobject) -> bool:
        _check_ambient(self, other)
        return kernels.first_missing(self.members, other.members) == -1


def _check_ambient(a: Subobject, b: Subobject):
    if a.ambient.sizes != b.ambient.sizes:
        raise ValueError("subobjects live in different ambients")


def _as_ambient(f: FinFunction, ambient: ProductSet | None) -> ProductSet:
    if ambient is None:
        return product([f.dom])
    if ambient.size != f.dom.size:
        raise ValueError("ambient product does not match the domain")
    return ambient


def equalizer(f: FinFunction, g: FinFunction,
              ambient: ProductSet | None = None) -> Subobject:
    if f.dom.size != g.dom.size or f.cod.size != g.cod.size:
        raise ValueError("equalizer needs parallel functions")
    return Subobject(_as_ambient(f, ambient), kernels.equalizer(f.table, g.table))


def pullback(f: FinFunction, g: FinFunction
             ) -> tuple[Subobject, FinFunction, FinFunction]:
    """Pullback of a cospan, as a subobject of ``dom f x dom g`` with its
    two projections."""
    if f.cod.size != g.cod.size:
        raise ValueError("pullback needs a common codomain")
    ambient = product([f.dom, g.dom])
    members = kernels.pullback(f.table, g.table)
    apex = FinSet(len(members))
    width = g.dom.size
    p1 = FinFunction(apex, f.dom, tuple(m // width for m in members))
    p2 = FinFunction(apex, g.dom, tuple(m % width for m in members))
    return Subobject(ambient, members), p1, p2


def image(f: FinFunction) -> Subobject:
    return Subobject(product([f.cod]), kernels.image(f.table, f.cod.size))


def preimage(sub: Subobject, f: FinFunction,
             ambient: ProductSet | None = None) -> Subobject:
    """Pullback of a subobject along ``f``."""
    if f.cod.size != sub.ambient.size:
        raise ValueError("function does not land in the subobject's ambient")
    return Subobject(_as_ambient(f, ambient),
                     kernels.preimage(f.table, sub.members, f.cod.size))


def sub_lattice(op: str, subs: Sequence[Subobject],
                ambient: ProductSet | None = None) -> Subobject:
    """Meet or join of finitely many subobjects. An empty meet is the top
    element and an empty join the bottom, so ``ambient`` is required then."""
    if op not in ("meet", "join"):
        raise ValueError(f"unknown lattice operation {op!r}")
    if not subs:
        if ambient is None:
            raise ValueError("empty meet/join needs an ambient")
        return Subobject.full(ambient) if op == "meet" else Subobject.empty(ambient)
    amb = subs[0].ambient if ambient is None else ambient
    for s in subs:
        if s.ambient.sizes != amb.sizes:
            raise ValueError("subobjects live in different ambients")
    fn = kernels.meet if op == "meet" else kernels.join
    members = subs[0].members
    for s in subs[1:]:
        members = fn(members, s.members)
    return Subobject(amb, members)


def meet(subs: Sequence[Subobject], ambient: ProductSet | None = None) -> Subobject:
    return sub_lattice("meet", subs, ambient)


def join(subs: Sequence[Subobject], ambient: ProductSet | None = None) -> Subobject:
    return sub_lattice("join", subs, ambient)


OpTyping = Mapping[str, tuple[Sequence[str], str]]


def find_natural_iso(a_sets: Mapping[str, FinSet], a_ops: Mapping[str, FinFunction],
                     b_sets: Mapping[str, FinSet], b_ops: Mapping[str, FinFunction],
                     typing: OpTyping) -> dict[str, FinFunction] | None:
    """Search for bijections ``alpha[s]: A(s) -> B(s)`` commuting with every
    operation in ``typing`` (``name -> (argument sorts, result sort)``).

    Constants seed the search; unit propagation through the operation
    tables follows, then backtracking over whatever is still unassigned.
    Returns ``None`` when no such family exists.
    """
    sorts = list(a_sets)
    if set(sorts) != set(b_sets):
        return None
    if any(a_sets[s].size != b_sets[s].size for s in sorts):
        return None

    ops = []
    for name, (args, res) in typing.items():
        args = tuple(args)
        a_dom = product(a_sets[s] for s in args)
        b_strides = product(b_sets[s] for s in args).strides
        a_tuples = [a_dom.index_to_tuple(i) for i in range(a_dom.size)]
        ops.append((args, res, a_ops[name].table, b_ops[name].table, a_tuples, b_strides))
    # nullary operations first: they are the seeds
    ops.sort(key=lambda o: len(o[0]))

    def assign(fwd, bwd, s, x, y):
        fx, by = fwd[s][x], bwd[s][y]
        if fx == -1 and by == -1:
            fwd[s][x] = y
            bwd[s][y] = x
            return True
        return fx == y

    def propagate(fwd, bwd):
        changed = True
        while changed:
            changed = False
            for args, res, a_tab, b_tab, a_tuples, b_strides in ops:
                for idx, tup in enumerate(a_tuples):
                    bidx = 0
                    for s, x, st in zip(args, tup, b_strides):
                        y = fwd[s][x]
                        if y == -1:
                            break
                        bidx += y * st
                    else:
                        x_out, y_out = a_tab[idx], b_tab[bidx]
                        before = fwd[res][x_out]
                        if not assign(fwd, bwd, res, x_out, y_out):
                            return False
                        if before == -1:
                            changed = True
        return True

    def search(fwd, bwd):
        if not propagate(fwd, bwd):
            return None
        best = None
        for s in sorts:
            free = fwd[s].count(-1)
            if free and (best is None or free < best[1]):
                best = (s, free)
        if best is None:
            return fwd
        s = best[0]
        x = fwd[s].index(-1)
        for y in range(b_sets[s].size):
            if bwd[s][y] != -1:
                continue
            f2 = {k: list(v) for k, v in fwd.items()}
            b2 = {k: list(v) for k, v in bwd.items()}
            f2[s][x] = y
            b2[s][y] = x
            found = search(f2, b2)
            if found is not None:
                return found
        return None

    fwd = {s: [-1] * a_sets[s].size for s in sorts}
    bwd = {s: [-1] * a_sets[s].size for s in sorts}
    result = search(fwd, bwd)
    if result is None:
        return None
    return {s: FinFunction(a_sets[s], b_sets[s], tuple(result[s])) for s in sorts}


def transport_ops(sets: Mapping[str, FinSet], ops: Mapping[str, FinFunction],
                  typing: OpTyping, alpha: Mapping[str, FinFunction]
                  ) -> dict[str, FinFunction]:
    """Operation tables carried along the bijections ``alpha``: the unique
    tables making every naturality square commute."""
    inv = {s: alpha[s].inverse() for s in alpha}
    out = {}
    for name, (args, res) in typing.items():
        new_dom = product(alpha[s].cod for s in args)
        old_dom = product(sets[s] for s in args)
        table = []
        for i in range(new_dom.size):
            tup = new_dom.index_to_tuple(i)
            pre = old_dom.tuple_to_index(tuple(inv[s](y) for s, y in zip(args, tup)))
            table.append(alpha[res](ops[name](pre)))
        dom = alpha[args[0]].cod if len(args) == 1 else new_dom.as_finset()
        out[name] = FinFunction(dom, alpha[res].cod, tuple(table))
    return out
