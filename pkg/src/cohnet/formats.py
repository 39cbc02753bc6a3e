"""Line-oriented text files for schemas, instances, structures, network
parameters, constraints and datasets.

Every format is one directive per line with ``#`` comments. Writers emit
exactly what the readers accept, so files round-trip byte for byte.
"""
from __future__ import annotations

from typing import Sequence

from .constructions import op_domain
from .finset import FinFunction, FinSet, Subobject, product
from .minifloat import FloatFormat, FormatError
from .nn import (ArchitectureError, Fix, ParamAssignment, SpanDataset, Tie,
                 TieConstraint, parse_ref)
from .schema import CategoryPresentation, Generator, Instance, Path, SchemaError
from .semantics import SetStructure, StructureError
from .syntax import Signature


class FileFormatError(ValueError):
    def __init__(self, message: str, line: int | None = None):
        self.line = line
        super().__init__(f"line {line}: {message}" if line is not None else message)


def _lines(text: str):
    for no, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if line:
            yield no, line.split()


def _int(word: str, no: int) -> int:
    try:
        return int(word, 0)
    except ValueError:
        raise FileFormatError(f"expected an integer, got {word!r}", no) from None


# -- schemas and instances -------------------------------------------------------

def path_text(p: Path) -> str:
    return ";".join(p.steps) if p.steps else f"id({p.start})"


def _parse_path(word: str, gens: dict[str, Generator], no: int) -> Path:
    if word.startswith("id(") and word.endswith(")"):
        return Path(word[3:-1])
    steps = tuple(word.split(";"))
    if steps[0] not in gens:
        raise FileFormatError(f"unknown generator {steps[0]!r}", no)
    return Path(gens[steps[0]].src, steps)


def parse_schema(text: str) -> CategoryPresentation:
    """``object X``, ``gen a : X -> Y``, ``eq a;b = c`` (``id(X)`` is the
    empty path at ``X``)."""
    objects, gens, eqs = [], [], []
    for no, words in _lines(text):
        try:
            if words[0] == "object" and len(words) == 2:
                if words[1] in objects:
                    raise FileFormatError(f"object {words[1]} declared twice", no)
                objects.append(words[1])
            elif words[0] == "gen" and len(words) == 6 and words[2] == ":" and words[4] == "->":
                for end in (words[3], words[5]):
                    if end not in objects:
                        raise FileFormatError(f"undeclared object {end!r}", no)
                gens.append(Generator(words[1], words[3], words[5]))
            elif words[0] == "eq" and len(words) == 4 and words[2] == "=":
                table = {g.name: g for g in gens}
                eqs.append((_parse_path(words[1], table, no), _parse_path(words[3], table, no)))
            else:
                raise FileFormatError(f"unrecognized line {' '.join(words)!r}", no)
        except SchemaError as exc:
            raise FileFormatError(str(exc), no) from None
    try:
        return CategoryPresentation(tuple(objects), tuple(gens), tuple(eqs))
    except SchemaError as exc:
        raise FileFormatError(str(exc)) from None


def write_schema(d: CategoryPresentation) -> str:
    out = [f"object {o}" for o in d.objects]
    out += [f"gen {g.name} : {g.src} -> {g.dst}" for g in d.generators]
    out += [f"eq {path_text(p)} = {path_text(q)}" for p, q in d.equations]
    return "\n".join(out) + "\n"


def _sets_and_tables(text: str, kinds: tuple[str, ...]):
    sizes, labels, maps, preds = {}, {}, {}, {}
    for no, words in _lines(text):
        key = words[0]
        if key not in kinds or len(words) < 2:
            raise FileFormatError(f"unrecognized line {' '.join(words)!r}", no)
        name = words[1]
        if key in ("set", "sort"):
            if len(words) != 3:
                raise FileFormatError(f"expected '{key} <name> <size>'", no)
            sizes[name] = (_int(words[2], no), no)
        elif key == "labels":
            labels[name] = (tuple(words[2:]), no)
        elif key in ("map", "op"):
            maps[name] = (tuple(_int(w, no) for w in words[2:]), no)
        else:
            preds[name] = (tuple(_int(w, no) for w in words[2:]), no)
    sets = {}
    for name, (size, no) in sizes.items():
        lab = labels.pop(name, (None, no))[0]
        try:
            sets[name] = FinSet(size, lab)
        except ValueError as exc:
            raise FileFormatError(str(exc), no) from None
    if labels:
        name, (_, no) = next(iter(labels.items()))
        raise FileFormatError(f"labels for undeclared set {name!r}", no)
    return sets, maps, preds


def _function(sets, dom: FinSet, cod_name: str, table, no) -> FinFunction:
    try:
        return FinFunction(dom, sets[cod_name], table)
    except ValueError as exc:
        raise FileFormatError(str(exc), no) from None


def parse_instance(text: str, schema: CategoryPresentation) -> Instance:
    """``set X 3``, optional ``labels X p q r``, ``map a 0 1 1``."""
    sets, maps, _ = _sets_and_tables(text, ("set", "labels", "map"))
    missing = [o for o in schema.objects if o not in sets]
    if missing:
        raise FileFormatError(f"no set for object {missing[0]}")
    gens = {}
    for g in schema.generators:
        if g.name not in maps:
            raise FileFormatError(f"no map for generator {g.name}")
        table, no = maps.pop(g.name)
        gens[g.name] = _function(sets, sets[g.src], g.dst, table, no)
    if maps:
        name, (_, no) = next(iter(maps.items()))
        raise FileFormatError(f"map for unknown generator {name!r}", no)
    try:
        return Instance(schema, {o: sets[o] for o in schema.objects}, gens)
    except SchemaError as exc:
        raise FileFormatError(str(exc)) from None


def _set_lines(key: str, name: str, s: FinSet) -> list[str]:
    out = [f"{key} {name} {s.size}"]
    if s.labels is not None:
        out.append(" ".join(["labels", name, *s.labels]))
    return out


def _table_line(key: str, name: str, table: Sequence[int]) -> str:
    return " ".join([key, name, *map(str, table)])


def write_instance(inst: Instance) -> str:
    out = []
    for o in inst.schema.objects:
        out += _set_lines("set", o, inst.object_map[o])
    for g in inst.schema.generators:
        out.append(_table_line("map", g.name, inst.generator_map[g.name].table))
    return "\n".join(out) + "\n"


# -- structures --------------------------------------------------------------------

def parse_structure(text: str, sig: Signature) -> SetStructure:
    """``sort V 16``, optional ``labels``, ``op s <table>``,
    ``pred P <members>`` (flattened tuple indices)."""
    sets, maps, preds = _sets_and_tables(text, ("sort", "labels", "op", "pred"))
    for s in sig.sorts:
        if s not in sets:
            raise FileFormatError(f"no size for sort {s}")
    ops = {}
    for o in sig.operations:
        if o.name not in maps:
            raise FileFormatError(f"no table for operation {o.name}")
        table, no = maps[o.name]
        ops[o.name] = _function(sets, op_domain(sets, o.args), o.result, table, no)
    pmap = {}
    for p in sig.predicates:
        members, no = preds.get(p.name, ((), None))
        try:
            pmap[p.name] = Subobject.from_indices(product(sets[s] for s in p.args), members)
        except ValueError as exc:
            raise FileFormatError(str(exc), no) from None
    try:
        return SetStructure(sig, {s: sets[s] for s in sig.sorts}, ops, pmap)
    except StructureError as exc:
        raise FileFormatError(str(exc)) from None


def write_structure(m: SetStructure) -> str:
    sig = m.signature
    out = []
    for s in sig.sorts:
        out += _set_lines("sort", s, m.sort_map[s])
    for o in sig.operations:
        out.append(_table_line("op", o.name, m.op_map[o.name].table))
    for p in sig.predicates:
        out.append(_table_line("pred", p.name, m.pred_map[p.name].members))
    return "\n".join(out) + "\n"


# -- network parameters and constraints ---------------------------------------------

def parse_params(text: str) -> ParamAssignment:
    """``layer 1`` then one ``w`` row per output and one ``b`` line, in
    layer order; patterns in any integer notation, written as hex."""
    weights: list[list[tuple[int, ...]]] = []
    biases: list[tuple[int, ...] | None] = []
    for no, words in _lines(text):
        key = words[0]
        if key == "layer":
            if len(words) != 2 or _int(words[1], no) != len(weights) + 1:
                raise FileFormatError("layers must be numbered 1, 2, ... in order", no)
            weights.append([])
            biases.append(None)
        elif key in ("w", "b"):
            if not weights:
                raise FileFormatError(f"'{key}' before any 'layer'", no)
            row = tuple(_int(w, no) for w in words[1:])
            if key == "w":
                weights[-1].append(row)
            elif biases[-1] is not None:
                raise FileFormatError("second bias line for one layer", no)
            else:
                biases[-1] = row
        else:
            raise FileFormatError(f"unrecognized line {' '.join(words)!r}", no)
    if any(b is None for b in biases):
        raise FileFormatError("a layer has no bias line")
    return ParamAssignment(tuple(tuple(w) for w in weights), tuple(biases))


def write_params(p: ParamAssignment) -> str:
    out = []
    for l, (w, b) in enumerate(zip(p.weights, p.biases), 1):
        out.append(f"layer {l}")
        out += [" ".join(["w", *(f"{x:#x}" for x in row)]) for row in w]
        out.append(" ".join(["b", *(f"{x:#x}" for x in b)]))
    return "\n".join(out) + "\n"


def parse_constraints(text: str) -> list[TieConstraint]:
    """``tie w[1][0,0] w[1][1,1]`` and ``fix b[2][0] 0x6``."""
    out: list[TieConstraint] = []
    for no, words in _lines(text):
        try:
            if words[0] == "tie" and len(words) == 3:
                out.append(Tie(parse_ref(words[1]), parse_ref(words[2])))
            elif words[0] == "fix" and len(words) == 3:
                out.append(Fix(parse_ref(words[1]), _int(words[2], no)))
            else:
                raise FileFormatError(f"unrecognized line {' '.join(words)!r}", no)
        except ArchitectureError as exc:
            raise FileFormatError(str(exc), no) from None
    return out


def write_constraints(cs: Sequence[TieConstraint]) -> str:
    return "".join(f"{c}\n" for c in cs)


# -- datasets -------------------------------------------------------------------------

def write_dataset(d: SpanDataset, fmt: FloatFormat) -> str:
    if fmt.size != d.radix:
        raise ValueError("format does not match the dataset")
    out = [f"format {fmt}", f"n {d.n}", f"m {d.m}"]
    for x, y in d.rows():
        out.append(" ".join([*(f"{v:#x}" for v in x), "->", *(f"{v:#x}" for v in y)]))
    return "\n".join(out) + "\n"


def parse_dataset(text: str) -> tuple[FloatFormat, SpanDataset]:
    header: dict[str, str] = {}
    rows = []
    for no, words in _lines(text):
        if words[0] in ("format", "n", "m") and len(words) == 2 and not rows:
            header[words[0]] = words[1]
            continue
        if "->" not in words:
            raise FileFormatError("expected 'x... -> y...'", no)
        k = words.index("->")
        rows.append((tuple(_int(w, no) for w in words[:k]),
                     tuple(_int(w, no) for w in words[k + 1:]), no))
    if set(header) != {"format", "n", "m"}:
        raise FileFormatError("dataset header needs format, n and m")
    try:
        fmt = FloatFormat.parse(header["format"])
    except FormatError as exc:
        raise FileFormatError(str(exc)) from None
    n, m, size = _int(header["n"], 0), _int(header["m"], 0), fmt.size
    X, Y = product([FinSet(size)] * n), product([FinSet(size)] * m)
    f, t = [], []
    for x, y, no in rows:
        if len(x) != n or len(y) != m:
            raise FileFormatError("row width does not match the header", no)
        try:
            f.append(X.tuple_to_index(x))
            t.append(Y.tuple_to_index(y))
        except ValueError as exc:
            raise FileFormatError(str(exc), no) from None
    N = FinSet(len(rows))
    return fmt, SpanDataset(N, FinFunction(N, X.as_finset(), f),
                            FinFunction(N, Y.as_finset(), t), n, m, size)


def first_difference(a: SpanDataset, b: SpanDataset) -> int | None:
    """Index of the first differing row, ``-1`` for a shape mismatch, or
    ``None`` when the datasets are identical."""
    if (a.n, a.m, a.radix, a.N.size) != (b.n, b.m, b.radix, b.N.size):
        return -1
    for k, (ra, rb) in enumerate(zip(a.rows(), b.rows())):
        if ra != rb:
            return k
    return None
