"""Functions on the hypercube {-1,+1}^m and their Fourier expansions.

Point indexing: bit b of a table index encodes variable x_{b+1}, with the
bit SET meaning x_{b+1} = -1 and clear meaning +1.  Coefficient indexing
uses the same packing: bit b of a subset mask S means variable b+1 is in S.

All tables are numpy float64 (int8 for Boolean truth tables).  Fourier
coefficients of a Boolean source are integer multiples of 2^-m, so every
arithmetic step here is exact in binary floating point as long as m <= 26;
M_MAX enforces that cap.  Real-valued tables keep the same guarantee when
their entries are dyadic rationals small enough that all intermediate sums
fit in 53 mantissa bits.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Sequence

import numpy as np

from .errors import (
    CapacityError,
    DimensionMismatchError,
    ParseError,
    StructureError,
    VerificationError,
)

M_MAX = 26


def _checked_length(m: int, n: int) -> None:
    if not 1 <= m <= M_MAX:
        raise CapacityError(f"m={m} outside supported range 1..{M_MAX}")
    if n != 1 << m:
        raise StructureError(f"table length {n} != 2^{m}")


@dataclass(frozen=True, eq=False)
class BooleanFunction:
    """Truth table of a {-1,+1}-valued function on {-1,+1}^m."""

    m: int
    table: np.ndarray

    def __post_init__(self):
        table = np.asarray(self.table, dtype=np.int8)
        _checked_length(self.m, table.size)
        if not np.all(np.abs(table) == 1):
            raise StructureError("Boolean table entries must be exactly +1 or -1")
        table.setflags(write=False)
        object.__setattr__(self, "table", table)

    def as_real(self) -> "RealFunction":
        return RealFunction(self.m, self.table.astype(np.float64))


@dataclass(frozen=True, eq=False)
class RealFunction:
    """Real-valued (dyadic) table on {-1,+1}^m."""

    m: int
    table: np.ndarray

    def __post_init__(self):
        table = np.asarray(self.table, dtype=np.float64)
        _checked_length(self.m, table.size)
        table.setflags(write=False)
        object.__setattr__(self, "table", table)

    def mean(self) -> float:
        return float(self.table.sum() / self.table.size)


@dataclass(frozen=True, eq=False)
class FourierExpansion:
    """Coefficients indexed by subset bitmask; entry S is the weight of chi_S."""

    m: int
    coeffs: np.ndarray

    def __post_init__(self):
        coeffs = np.asarray(self.coeffs, dtype=np.float64)
        _checked_length(self.m, coeffs.size)
        coeffs.setflags(write=False)
        object.__setattr__(self, "coeffs", coeffs)


@dataclass(frozen=True)
class Partition:
    """Disjoint cover of the variable set {1, ..., m} by nonempty blocks."""

    m: int
    blocks: tuple[frozenset[int], ...]

    def __post_init__(self):
        seen: set[int] = set()
        if not self.blocks:
            raise StructureError("partition needs at least one block")
        for block in self.blocks:
            if not block:
                raise StructureError("empty partition block")
            for i in block:
                if not 1 <= i <= self.m:
                    raise StructureError(f"variable index {i} outside 1..{self.m}")
                if i in seen:
                    raise StructureError(f"variable {i} appears in two blocks")
                seen.add(i)
        if len(seen) != self.m:
            missing = sorted(set(range(1, self.m + 1)) - seen)
            raise StructureError(f"partition does not cover variables {missing}")

    @classmethod
    def from_blocks(cls, m: int, blocks: Iterable[Iterable[int]]) -> "Partition":
        return cls(m, tuple(frozenset(b) for b in blocks))

    def mask(self, j: int) -> int:
        """Bitmask of block j (0-based)."""
        mask = 0
        for i in self.blocks[j]:
            mask |= 1 << (i - 1)
        return mask


CubeFunction = BooleanFunction | RealFunction


def _float_table(f: CubeFunction) -> np.ndarray:
    return f.table.astype(np.float64)


def _butterfly(values: np.ndarray) -> np.ndarray:
    """Unnormalized fast Walsh-Hadamard transform; exact for dyadic input."""
    a = values.copy()
    n = a.size
    h = 1
    while h < n:
        a = a.reshape(-1, 2, h)
        top = a[:, 0, :].copy()
        a[:, 0, :] = top + a[:, 1, :]
        a[:, 1, :] = top - a[:, 1, :]
        a = a.reshape(n)
        h *= 2
    return a


def wht(f: CubeFunction) -> FourierExpansion:
    """Fourier transform: coeffs[S] = 2^-m sum_x f(x) chi_S(x)."""
    return FourierExpansion(f.m, _butterfly(_float_table(f)) / (1 << f.m))


def inverse_wht(expansion: FourierExpansion) -> RealFunction:
    """Evaluate an expansion back to a point table; exact round trip with wht."""
    return RealFunction(expansion.m, _butterfly(expansion.coeffs.copy()))


def sq_l2_dist(f: CubeFunction, g: CubeFunction) -> float:
    """Squared L2 semidistance E[(f-g)^2].

    Equals the coefficient-space sum of squared coefficient differences, and
    4 Pr[f != g] for a Boolean pair.
    """
    if f.m != g.m:
        raise DimensionMismatchError(f"m={f.m} vs m={g.m}")
    diff = _float_table(f) - _float_table(g)
    return float((diff * diff).sum() / diff.size)


def variance(f: CubeFunction) -> float:
    """Var f = E[f^2] - (E f)^2 = sum of squared coefficients over S != 0."""
    t = _float_table(f)
    e = t.sum() / t.size
    e2 = (t * t).sum() / t.size
    return float(e2 - e * e)


def restriction(f: CubeFunction, block: Iterable[int]) -> RealFunction:
    """Part of f's expansion supported on the nonempty subsets of `block`.

    The result is a mean-zero real function of the block variables only
    (constant along all others), with coefficients copied from f.
    """
    block = frozenset(block)
    for i in block:
        if not 1 <= i <= f.m:
            raise StructureError(f"variable index {i} outside 1..{f.m}")
    mask = 0
    for i in block:
        mask |= 1 << (i - 1)
    expansion = wht(f)
    subsets = np.arange(expansion.coeffs.size)
    keep = (subsets & ~mask) == 0
    keep[0] = False
    return inverse_wht(FourierExpansion(f.m, np.where(keep, expansion.coeffs, 0.0)))


def cross_partition_weight(f: BooleanFunction, partition: Partition) -> float:
    """Total squared coefficient mass on sets contained in no single block.

    Computed directly and through the complement identity
    1 - coeffs[0]^2 - sum_j Var(restriction to block j); the two exact dyadic
    sums must agree bit for bit.
    """
    if partition.m != f.m:
        raise DimensionMismatchError(f"partition over {partition.m} vars, f over {f.m}")
    coeffs = wht(f).coeffs
    sq = coeffs * coeffs
    subsets = np.arange(sq.size)
    inside_some = np.zeros(sq.size, dtype=bool)
    block_var_total = 0.0
    for j in range(len(partition.blocks)):
        mask = partition.mask(j)
        inside = (subsets & ~mask) == 0
        block = inside.copy()
        block[0] = False
        block_var_total += float(sq[block].sum())
        inside_some |= inside
    crossing = ~inside_some
    direct = float(sq[crossing].sum())
    via_identity = 1.0 - float(sq[0]) - block_var_total
    if direct != via_identity:
        raise VerificationError(
            f"cross weight mismatch: {direct!r} vs {via_identity!r}"
        )
    return direct


def balance_extend(f: BooleanFunction) -> BooleanFunction:
    """Append variable m+1 to make f balanced while keeping it as close to
    linear: g(x, x_{m+1}) = x_{m+1} * f(x_{m+1} x_1, ..., x_{m+1} x_m).

    Odd-size coefficient sets are unchanged; even-size sets (including the
    empty set) move to S + {m+1}, so the new first-level weight equals the
    old weight on levels 0 and 1.
    """
    if f.m + 1 > M_MAX:
        raise CapacityError(f"cannot extend beyond m={M_MAX}")
    # x_{m+1} = +1 half copies f; the -1 half is -f at the fully flipped point.
    extended = np.concatenate([f.table, -f.table[::-1]])
    return BooleanFunction(f.m + 1, extended)


# ---------------------------------------------------------------------------
# text formats


def _data_lines(text: str) -> list[tuple[int, str]]:
    """Non-empty, non-comment lines with their 1-based numbers."""
    out = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        stripped = raw.strip()
        if stripped and not stripped.startswith("#"):
            out.append((lineno, stripped))
    return out


def _parse_m_header(lines: list[tuple[int, str]]) -> tuple[int, int]:
    if not lines:
        raise ParseError("empty input")
    lineno, header = lines[0]
    if not header.startswith("m="):
        raise ParseError("expected header 'm=<int>'", lineno)
    try:
        m = int(header[2:])
    except ValueError:
        raise ParseError(f"bad variable count {header[2:]!r}", lineno) from None
    return m, lineno


def parse_fraction(token: str) -> Fraction:
    """Exact rational from 'p/q' or decimal text."""
    try:
        return Fraction(token)
    except (ValueError, ZeroDivisionError):
        raise ParseError(f"bad rational {token!r}") from None


def fraction_to_dyadic_float(q: Fraction) -> float:
    value = float(q)
    if Fraction(value) != q:
        raise ParseError(f"{q} is not exactly representable (dyadic required)")
    return value


def parse_boolean_function(text: str) -> BooleanFunction:
    lines = _data_lines(text)
    m, _ = _parse_m_header(lines)
    if len(lines) != 2:
        raise ParseError("expected exactly one table line after the header")
    lineno, row = lines[1]
    if len(row) != 1 << m:
        raise ParseError(f"table line has {len(row)} chars, expected {1 << m}", lineno)
    table = np.empty(1 << m, dtype=np.int8)
    for i, ch in enumerate(row):
        if ch == "+":
            table[i] = 1
        elif ch == "-":
            table[i] = -1
        else:
            raise ParseError(f"bad table character {ch!r} at position {i}", lineno)
    return BooleanFunction(m, table)


def format_boolean_function(f: BooleanFunction, comments: Sequence[str] = ()) -> str:
    head = [f"# {c}" for c in comments]
    row = "".join("+" if v > 0 else "-" for v in f.table)
    return "\n".join(head + [f"m={f.m}", row]) + "\n"


def parse_real_function(text: str) -> RealFunction:
    lines = _data_lines(text)
    m, _ = _parse_m_header(lines)
    if len(lines) != (1 << m) + 1:
        raise ParseError(f"expected {1 << m} value lines after the header")
    table = np.empty(1 << m, dtype=np.float64)
    for i, (lineno, token) in enumerate(lines[1:]):
        try:
            table[i] = fraction_to_dyadic_float(parse_fraction(token))
        except ParseError as exc:
            raise ParseError(str(exc), lineno) from None
    return RealFunction(m, table)


def format_real_function(f: RealFunction, comments: Sequence[str] = ()) -> str:
    head = [f"# {c}" for c in comments]
    rows = [str(Fraction(float(v))) for v in f.table]
    return "\n".join(head + [f"m={f.m}"] + rows) + "\n"


def parse_partition(text: str, m: int) -> Partition:
    blocks = []
    for chunk in text.strip().split("|"):
        if not chunk:
            raise ParseError(f"empty block in partition {text!r}")
        try:
            blocks.append([int(tok) for tok in chunk.split(",")])
        except ValueError:
            raise ParseError(f"bad index in partition block {chunk!r}") from None
    try:
        return Partition.from_blocks(m, blocks)
    except StructureError as exc:
        raise ParseError(str(exc)) from None


def format_partition(partition: Partition) -> str:
    return "|".join(
        ",".join(str(i) for i in sorted(block)) for block in partition.blocks
    )
