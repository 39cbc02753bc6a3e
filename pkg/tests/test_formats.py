import random

import pytest

from cohnet.finset import FinFunction, FinSet
from cohnet.formats import (FileFormatError, first_difference, parse_constraints,
                            parse_dataset, parse_instance, parse_params, parse_schema,
                            parse_structure, write_constraints, write_dataset, write_instance,
                            write_params, write_schema, write_structure)
from cohnet.minifloat import FloatFormat
from cohnet.nn import Architecture, Fix, ParamAssignment, Tie, oracle_dataset, parse_ref
from cohnet.schema import builtin, instance_from_tables

from helpers import random_signature, random_structure

TRIANGLE = """\
# a commuting triangle
object A
object B
object C
gen a : A -> B
gen b : B -> C
gen c : A -> C
eq a;b = c
"""


def test_schema_round_trip():
    d = parse_schema(TRIANGLE)
    assert d.objects == ("A", "B", "C") and len(d.equations) == 1
    assert parse_schema(write_schema(d)) == d
    assert write_schema(parse_schema(write_schema(d))) == write_schema(d)
    for name in ("Sort", "Oper", "Span", "Pol", "Shop"):
        assert parse_schema(write_schema(builtin(name))) == builtin(name)
    loop = parse_schema("object A\ngen p : A -> A\neq p;p = id(A)\n")
    assert loop.equations[0][1].steps == ()


@pytest.mark.parametrize("text, line", [
    ("object A\ngen a : A -> B\n", 2),
    ("object A\nthing\n", 2),
    ("object A\ngen a : A -> A\neq q = a\n", 3),
    ("object A\nobject A\n", 2),
])
def test_schema_errors(text, line):
    with pytest.raises(FileFormatError) as info:
        parse_schema(text)
    assert info.value.line == line


def test_instance_round_trip():
    d = parse_schema(TRIANGLE)
    inst = instance_from_tables(d, {"A": 2, "B": 3, "C": 1},
                                {"a": [0, 2], "b": [0, 0, 0], "c": [0, 0]})
    text = write_instance(inst)
    assert parse_instance(text, d) == inst
    assert write_instance(parse_instance(text, d)) == text
    with pytest.raises(ValueError):
        parse_instance(text.replace("map a 0 2", "map a 0 5"), d)


def test_structure_round_trip():
    rng = random.Random(8)
    for _ in range(100):
        sig = random_signature(rng)
        m = random_structure(rng, sig, max_size=3)
        text = write_structure(m)
        assert parse_structure(text, sig) == m
        assert write_structure(parse_structure(text, sig)) == text


def test_params_round_trip():
    arch = Architecture.parse("2-relu-3-id-1", FloatFormat(2, 1))
    p = ParamAssignment.random(arch, random.Random(1))
    text = write_params(p)
    assert text.startswith("layer 1\nw ")
    assert parse_params(text) == p
    assert parse_params("layer 1\nw 1 2\nb 0xf\n") == ParamAssignment((((1, 2),),), ((15,),))
    with pytest.raises(FileFormatError):
        parse_params("layer 2\nw 1\nb 0\n")
    with pytest.raises(FileFormatError):
        parse_params("layer 1\nw 1\n")
    with pytest.raises(FileFormatError):
        parse_params("w 1\n")


def test_constraints_round_trip():
    text = "tie w[1][0,0] w[1][1,1]\nfix b[2][0] 0x6\n"
    cs = parse_constraints(text)
    assert cs == [Tie(parse_ref("w[1][0,0]"), parse_ref("w[1][1,1]")),
                  Fix(parse_ref("b[2][0]"), 6)]
    assert write_constraints(cs) == text
    with pytest.raises(FileFormatError) as info:
        parse_constraints("# ok\ntie w[1][0] w[1][1,1]\n")
    assert info.value.line == 2


def test_dataset_round_trip_and_diff():
    fmt = FloatFormat(1, 1)
    arch = Architecture.parse("2-relu-1", fmt)
    d = oracle_dataset(arch, ParamAssignment.random(arch, random.Random(2)))
    text = write_dataset(d, fmt)
    lines = text.splitlines()
    assert lines[:3] == ["format s1e1m1:nan", "n 2", "m 1"] and len(lines) == 3 + 64
    assert lines[4].startswith("0x0 0x1 -> ")
    fmt2, back = parse_dataset(text)
    assert fmt2 == fmt and back == d
    assert first_difference(d, back) is None
    changed = FinFunction(d.t.dom, d.t.cod, (d.t.table[0] ^ 1,) + d.t.table[1:])
    other = type(d)(d.N, d.f, changed, d.n, d.m, d.radix)
    assert first_difference(d, other) == 0
    short = type(d)(FinSet(0), FinFunction(FinSet(0), d.f.cod, ()),
                    FinFunction(FinSet(0), d.t.cod, ()), d.n, d.m, d.radix)
    assert first_difference(d, short) == -1
    with pytest.raises(FileFormatError):
        parse_dataset("format s1e1m1\nn 2\nm 1\n0x0 -> 0x1\n")
    with pytest.raises(FileFormatError):
        parse_dataset("n 1\nm 1\n")
