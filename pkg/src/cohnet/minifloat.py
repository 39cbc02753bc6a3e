"""Tiny IEEE-style binary floating-point formats.

Bit layout is sign | exponent | mantissa. Arithmetic is exact on the
decoded rationals followed by round-to-nearest-even. Two treatments of the
all-ones exponent are supported:

``ieee_nan``
    infinities and NaNs as in IEEE 754; every NaN result is the single
    canonical NaN (positive sign, exponent all ones, top mantissa bit set).
``saturating``
    the all-ones exponent holds ordinary finite values and overflow clamps
    to the largest finite magnitude, so no specials exist.
"""
from __future__ import annotations

import math
import re
from bisect import bisect_left
from dataclasses import dataclass
from fractions import Fraction
from functools import cached_property
from pathlib import Path
from typing import Sequence

from .finset import FinFunction, FinSet, product

IEEE_NAN = "ieee_nan"
SATURATING = "saturating"
MAX_BITS = 8


class FormatError(ValueError):
    pass


@dataclass(frozen=True)
class FloatFormat:
    exponent_bits: int
    mantissa_bits: int
    bias: int | None = None
    mode: str = IEEE_NAN

    def __post_init__(self):
        if self.exponent_bits < 1 or self.mantissa_bits < 0:
            raise FormatError("need at least one exponent bit and no negative widths")
        if self.mode not in (IEEE_NAN, SATURATING):
            raise FormatError(f"unknown specials mode {self.mode!r}")
        if self.mode == IEEE_NAN and self.mantissa_bits == 0:
            raise FormatError("ieee_nan mode needs a mantissa bit to encode NaN")
        if self.bias is None:
            object.__setattr__(self, "bias", 2 ** (self.exponent_bits - 1) - 1)

    @property
    def bits(self) -> int:
        return 1 + self.exponent_bits + self.mantissa_bits

    @property
    def size(self) -> int:
        return 2 ** self.bits

    @property
    def exp_max(self) -> int:
        return 2 ** self.exponent_bits - 1

    def __str__(self):
        tag = "nan" if self.mode == IEEE_NAN else "sat"
        text = f"s1e{self.exponent_bits}m{self.mantissa_bits}"
        if self.bias != 2 ** (self.exponent_bits - 1) - 1:
            text += f"b{self.bias}"
        return f"{text}:{tag}"

    @classmethod
    def parse(cls, text: str) -> FloatFormat:
        """``s1e<E>m<M>[b<bias>][:sat|:nan]``; the default mode is nan."""
        m = re.fullmatch(r"s1e(\d+)m(\d+)(?:b(-?\d+))?(?::(sat|nan))?", text.strip())
        if m is None:
            raise FormatError(f"bad float format {text!r}")
        e, mb, bias, tag = m.groups()
        fmt = cls(int(e), int(mb), None if bias is None else int(bias),
                  SATURATING if tag == "sat" else IEEE_NAN)
        if fmt.bits > MAX_BITS:
            raise FormatError(f"{fmt.bits}-bit format exceeds the {MAX_BITS}-bit limit")
        return fmt

    # -- decoding --------------------------------------------------------

    def fields(self, p: int) -> tuple[int, int, int]:
        m = self.mantissa_bits
        return (p >> (self.bits - 1)) & 1, (p >> m) & self.exp_max, p & ((1 << m) - 1)

    def is_nan(self, p: int) -> bool:
        _, e, f = self.fields(p)
        return self.mode == IEEE_NAN and e == self.exp_max and f != 0

    def is_inf(self, p: int) -> bool:
        _, e, f = self.fields(p)
        return self.mode == IEEE_NAN and e == self.exp_max and f == 0

    def magnitude(self, p: int) -> Fraction:
        """Absolute value of a finite pattern."""
        _, e, f = self.fields(p)
        m = self.mantissa_bits
        if e == 0:
            return Fraction(f, 2 ** m) * Fraction(2) ** (1 - self.bias)
        return (1 + Fraction(f, 2 ** m)) * Fraction(2) ** (e - self.bias)

    def decode(self, p: int):
        """Fraction for finite patterns (``-0`` decodes to 0), otherwise
        ``float('inf')``, ``float('-inf')`` or ``float('nan')``."""
        if not 0 <= p < self.size:
            raise FormatError(f"pattern {p} outside the format")
        sign, _, _ = self.fields(p)
        if self.is_nan(p):
            return float("nan")
        if self.is_inf(p):
            return float("-inf") if sign else float("inf")
        v = self.magnitude(p)
        return -v if sign else v

    @property
    def canonical_nan(self) -> int | None:
        if self.mode != IEEE_NAN:
            return None
        return (self.exp_max << self.mantissa_bits) | (1 << (self.mantissa_bits - 1))

    def inf(self, sign: int) -> int:
        return (sign << (self.bits - 1)) | (self.exp_max << self.mantissa_bits)

    @cached_property
    def _finite_ladder(self) -> tuple[list[Fraction], list[int]]:
        """Non-negative finite magnitudes in increasing order with their
        positive-sign patterns; consecutive entries are consecutive patterns."""
        top = self.exp_max if self.mode == SATURATING else self.exp_max - 1
        count = (top + 1) << self.mantissa_bits
        pats = list(range(count))
        return [self.magnitude(p) for p in pats], pats

    @property
    def max_finite(self) -> Fraction:
        return self._finite_ladder[0][-1]

    def encode(self, sign: int, value: Fraction) -> int:
        """Round ``value >= 0`` to nearest, ties to even, with ``sign``."""
        mags, pats = self._finite_ladder
        top = pats[-1]
        signbit = sign << (self.bits - 1)
        if value > mags[-1]:
            if self.mode == SATURATING:
                return signbit | top
            scale = max(self.exp_max - 1, 1)
            ulp = Fraction(2) ** (scale - self.bias - self.mantissa_bits)
            # the tie goes to the even neighbour, which lies past the range
            if value >= mags[-1] + ulp / 2:
                return self.inf(sign)
            return signbit | top
        i = bisect_left(mags, value)
        if mags[i] == value:
            return signbit | pats[i]
        lo, hi = i - 1, i
        dlo, dhi = value - mags[lo], mags[hi] - value
        if dlo < dhi or (dlo == dhi and pats[lo] % 2 == 0):
            return signbit | pats[lo]
        return signbit | pats[hi]

    def encode_value(self, x) -> int:
        """Encode an exact rational (or int/float); ``-0.0`` keeps its sign."""
        if isinstance(x, float):
            if x != x:
                if self.mode != IEEE_NAN:
                    raise FormatError("saturating formats have no NaN")
                return self.canonical_nan
            if x in (float("inf"), float("-inf")):
                sign = 1 if x < 0 else 0
                if self.mode == SATURATING:
                    return (sign << (self.bits - 1)) | self._finite_ladder[1][-1]
                return self.inf(sign)
            sign = 1 if math.copysign(1.0, x) < 0 else 0
            return self.encode(sign, abs(Fraction(x)))
        x = Fraction(x)
        return self.encode(1 if x < 0 else 0, abs(x))

    # -- scalar arithmetic ------------------------------------------------

    def add(self, p: int, q: int) -> int:
        if self.mode == IEEE_NAN:
            if self.is_nan(p) or self.is_nan(q):
                return self.canonical_nan
            pi, qi = self.is_inf(p), self.is_inf(q)
            if pi or qi:
                if pi and qi and self.fields(p)[0] != self.fields(q)[0]:
                    return self.canonical_nan
                return p if pi else q
        sp, sq = self.fields(p)[0], self.fields(q)[0]
        exact = (-1) ** sp * self.magnitude(p) + (-1) ** sq * self.magnitude(q)
        if exact == 0:
            # round-to-nearest: the sum of opposite signs is +0
            return self.encode(1 if (sp and sq) else 0, Fraction(0))
        return self.encode(1 if exact < 0 else 0, abs(exact))

    def mul(self, p: int, q: int) -> int:
        sign = self.fields(p)[0] ^ self.fields(q)[0]
        if self.mode == IEEE_NAN:
            if self.is_nan(p) or self.is_nan(q):
                return self.canonical_nan
            pi, qi = self.is_inf(p), self.is_inf(q)
            if pi or qi:
                other = q if pi else p
                if not self.is_inf(other) and self.magnitude(other) == 0:
                    return self.canonical_nan
                return self.inf(sign)
        return self.encode(sign, self.magnitude(p) * self.magnitude(q))

    def relu(self, p: int) -> int:
        if self.is_nan(p):
            return self.canonical_nan
        return 0 if self.fields(p)[0] else p

    def show(self, p: int) -> str:
        v = self.decode(p)
        if isinstance(v, float):
            return str(v)
        if v == 0 and self.fields(p)[0]:
            return "-0"
        return str(v)


@dataclass(frozen=True)
class FloatTables:
    format: FloatFormat
    R: FinSet
    add: FinFunction
    mul: FinFunction

    def activation(self, name: str) -> FinFunction:
        return activation(name, self)


def build_tables(fmt: FloatFormat) -> FloatTables:
    if fmt.bits > MAX_BITS:
        raise FormatError(f"{fmt.bits}-bit format exceeds the {MAX_BITS}-bit limit")
    n = fmt.size
    R = FinSet(n)
    RR = product([R, R]).as_finset()
    add = tuple(fmt.add(p, q) for p in range(n) for q in range(n))
    mul = tuple(fmt.mul(p, q) for p in range(n) for q in range(n))
    return FloatTables(fmt, R, FinFunction(RR, R, add), FinFunction(RR, R, mul))


def activation(name: str, tables: FloatTables) -> FinFunction:
    """``id``, ``relu`` or ``table:<file>`` as a function ``R -> R``."""
    fmt, R = tables.format, tables.R
    if name == "id":
        return FinFunction.identity(R)
    if name == "relu":
        return FinFunction(R, R, tuple(fmt.relu(p) for p in range(fmt.size)))
    if name.startswith("table:"):
        return FinFunction(R, R, load_activation_table(Path(name[6:]), fmt))
    raise FormatError(f"unknown activation {name!r}")


def load_activation_table(path: Path, fmt: FloatFormat) -> tuple[int, ...]:
    """Read ``pattern -> pattern`` lines; every pattern must appear once."""
    table: dict[int, int] = {}
    for lineno, line in enumerate(path.read_text().splitlines(), 1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        try:
            src, dst = (int(x.strip(), 0) for x in line.split("->"))
        except ValueError:
            raise FormatError(f"{path}:{lineno}: expected 'pattern -> pattern'") from None
        for v in (src, dst):
            if not 0 <= v < fmt.size:
                raise FormatError(f"{path}:{lineno}: pattern {v} outside the format")
        if src in table:
            raise FormatError(f"{path}:{lineno}: pattern {src} mapped twice")
        table[src] = dst
    missing = [p for p in range(fmt.size) if p not in table]
    if missing:
        raise FormatError(f"{path}: activation table is partial, missing {missing[:4]}")
    return tuple(table[p] for p in range(fmt.size))


def fold_sum(tables: FloatTables, values: Sequence[int]) -> int:
    """``add_n``: ``add(v1, add_{n-1}(v2, ...))`` with ``add_1`` the identity."""
    n = tables.R.size
    add = tables.add.table
    acc = values[-1]
    for v in reversed(values[:-1]):
        acc = add[v * n + acc]
    return acc


def oracle_layer(tables: FloatTables, act: FinFunction, weights: Sequence[Sequence[int]],
                 bias: Sequence[int], x: Sequence[int]) -> tuple[int, ...]:
    n = tables.R.size
    mul, add = tables.mul.table, tables.add.table
    if any(len(row) != len(x) for row in weights) or len(bias) != len(weights):
        raise ValueError("layer shapes do not match")
    out = []
    for row, b in zip(weights, bias):
        s = fold_sum(tables, [mul[w * n + xi] for w, xi in zip(row, x)])
        out.append(act.table[add[s * n + b]])
    return tuple(out)


def oracle_eval(tables: FloatTables, activations: Sequence[FinFunction],
                weights: Sequence[Sequence[Sequence[int]]], biases: Sequence[Sequence[int]],
                x: Sequence[int]) -> tuple[int, ...]:
    """Direct evaluation of a dense network on bit patterns.
    ``weights[l][j][i]`` multiplies input ``i`` into output ``j`` of layer ``l``."""
    if not (len(activations) == len(weights) == len(biases)):
        raise ValueError("one activation, weight matrix and bias vector per layer")
    for act, w, b in zip(activations, weights, biases):
        x = oracle_layer(tables, act, w, b, x)
    return tuple(x)
