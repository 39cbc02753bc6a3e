"""Finitely presented categories and their instances in finite sets.

A schema is a graph plus path equations; it is never closed under
composition (``Pol`` has the loop ``a: V -> V``). An instance assigns a
finite set to every object and a function to every generator, and is a
functor exactly when every equation holds pointwise.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Mapping, Sequence

from .finset import FinFunction, FinSet


@dataclass(frozen=True)
class Generator:
    name: str
    src: str
    dst: str


@dataclass(frozen=True)
class Path:
    """A composable sequence of generators, first applied first.
    The empty path at ``start`` is the identity there."""
    start: str
    steps: tuple[str, ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "steps", tuple(self.steps))


class SchemaError(ValueError):
    pass


@dataclass(frozen=True)
class CategoryPresentation:
    objects: tuple[str, ...]
    generators: tuple[Generator, ...] = ()
    equations: tuple[tuple[Path, Path], ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "objects", tuple(self.objects))
        object.__setattr__(self, "generators", tuple(self.generators))
        object.__setattr__(self, "equations", tuple((p, q) for p, q in self.equations))
        if len(set(self.objects)) != len(self.objects):
            raise SchemaError("duplicate object name")
        names = [g.name for g in self.generators]
        if len(set(names)) != len(names):
            raise SchemaError("duplicate generator name")
        objs = set(self.objects)
        for g in self.generators:
            if g.src not in objs or g.dst not in objs:
                raise SchemaError(f"generator {g.name} has an undeclared endpoint")
        for p, q in self.equations:
            if (p.start, self.target(p)) != (q.start, self.target(q)):
                raise SchemaError(f"equation sides {p} and {q} have different endpoints")

    @property
    def gen(self) -> dict[str, Generator]:
        return {g.name: g for g in self.generators}

    def target(self, path: Path) -> str:
        gens = self.gen
        here = path.start
        if here not in self.objects:
            raise SchemaError(f"unknown object {here}")
        for name in path.steps:
            g = gens.get(name)
            if g is None:
                raise SchemaError(f"unknown generator {name}")
            if g.src != here:
                raise SchemaError(f"path is not composable at {name}")
            here = g.dst
        return here


@dataclass(frozen=True)
class Instance:
    schema: CategoryPresentation
    object_map: Mapping[str, FinSet]
    generator_map: Mapping[str, FinFunction]

    def __post_init__(self):
        object.__setattr__(self, "object_map", dict(self.object_map))
        object.__setattr__(self, "generator_map", dict(self.generator_map))
        if set(self.object_map) != set(self.schema.objects):
            raise SchemaError("instance objects do not match the schema")
        if set(self.generator_map) != {g.name for g in self.schema.generators}:
            raise SchemaError("instance generators do not match the schema")
        for g in self.schema.generators:
            f = self.generator_map[g.name]
            if (f.dom.size != self.object_map[g.src].size
                    or f.cod.size != self.object_map[g.dst].size):
                raise SchemaError(f"function for {g.name} has the wrong shape")

    def path_function(self, path: Path) -> FinFunction:
        result = FinFunction.identity(self.object_map[path.start])
        for name in path.steps:
            result = result.then(self.generator_map[name])
        return result


@dataclass(frozen=True)
class FunctorialityViolation:
    equation: int
    sides: tuple[Path, Path]
    witness: int


def check_functorial(inst: Instance) -> FunctorialityViolation | None:
    """``None`` when every path equation holds; otherwise the first failing
    equation with its least witness element."""
    for k, (p, q) in enumerate(inst.schema.equations):
        fp = inst.path_function(p).table
        fq = inst.path_function(q).table
        for x, (a, b) in enumerate(zip(fp, fq)):
            if a != b:
                return FunctorialityViolation(k, (p, q), x)
    return None


@dataclass(frozen=True)
class NatTransformCandidate:
    source: Instance
    target: Instance
    components: Mapping[str, FinFunction]

    def __post_init__(self):
        object.__setattr__(self, "components", dict(self.components))
        if self.source.schema != self.target.schema:
            raise SchemaError("instances over different schemas")
        for obj in self.source.schema.objects:
            c = self.components.get(obj)
            if c is None:
                raise SchemaError(f"missing component at {obj}")
            if (c.dom.size != self.source.object_map[obj].size
                    or c.cod.size != self.target.object_map[obj].size):
                raise SchemaError(f"component at {obj} has the wrong shape")

    def then(self, other: NatTransformCandidate) -> NatTransformCandidate:
        return NatTransformCandidate(
            self.source, other.target,
            {o: self.components[o].then(other.components[o]) for o in self.components})


@dataclass(frozen=True)
class NaturalityFailure:
    generator: str
    witness: int


def check_natural(cand: NatTransformCandidate) -> NaturalityFailure | None:
    for g in cand.source.schema.generators:
        left = cand.source.generator_map[g.name].then(cand.components[g.dst])
        right = cand.components[g.src].then(cand.target.generator_map[g.name])
        for x, (a, b) in enumerate(zip(left.table, right.table)):
            if a != b:
                return NaturalityFailure(g.name, x)
    return None


def _gens(*triples: tuple[str, str, str]) -> tuple[Generator, ...]:
    return tuple(Generator(*t) for t in triples)


SHOP_OBJECTS = ("Item", "Price", "Order", "Customer", "Employee", "Person", "Address")
SHOP_GENERATORS = _gens(
    ("a", "Item", "Price"),
    ("b", "Order", "Item"),
    ("c", "Order", "Customer"),
    ("d", "Order", "Employee"),
    ("e", "Customer", "Person"),
    ("f", "Employee", "Person"),
    ("g", "Person", "Address"),
)


def builtin(name: str) -> CategoryPresentation:
    if name == "Sort":
        return CategoryPresentation(("A",))
    if name == "Oper":
        return CategoryPresentation(("A", "B"), _gens(("g", "A", "B")))
    if name == "Span":
        return CategoryPresentation(("X", "N", "Y"), _gens(("f", "N", "X"), ("t", "N", "Y")))
    if name == "Pol":
        return CategoryPresentation(
            ("V", "E"), _gens(("s", "E", "V"), ("t", "E", "V"), ("a", "V", "V")))
    if name == "Shop":
        return CategoryPresentation(SHOP_OBJECTS, SHOP_GENERATORS)
    raise SchemaError(f"unknown builtin schema {name!r}")


BUILTINS = ("Sort", "Oper", "Span", "Pol", "Shop")


def paths_up_to(schema: CategoryPresentation, length: int) -> list[Path]:
    """All paths with at most ``length`` steps, identities included."""
    out = [Path(o) for o in schema.objects]
    frontier = list(out)
    for _ in range(length):
        nxt = []
        for p in frontier:
            end = schema.target(p)
            for g in schema.generators:
                if g.src == end:
                    nxt.append(Path(p.start, p.steps + (g.name,)))
        out.extend(nxt)
        frontier = nxt
    return out


def transport_instance(inst: Instance, alpha: Mapping[str, FinFunction]) -> Instance:
    """The instance isomorphic to ``inst`` along the bijections ``alpha``."""
    objs = {o: alpha[o].cod for o in inst.schema.objects}
    gens = {}
    for g in inst.schema.generators:
        gens[g.name] = alpha[g.src].inverse().then(inst.generator_map[g.name]).then(alpha[g.dst])
    return Instance(inst.schema, objs, gens)


def instance_from_tables(schema: CategoryPresentation, sizes: Mapping[str, int],
                         tables: Mapping[str, Sequence[int]]) -> Instance:
    objs = {o: FinSet(sizes[o]) for o in schema.objects}
    gens = {g.name: FinFunction(objs[g.src], objs[g.dst], tuple(tables[g.name]))
            for g in schema.generators}
    return Instance(schema, objs, gens)
