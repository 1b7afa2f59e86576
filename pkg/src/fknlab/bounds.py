"""Evaluators for the variance inequalities, their witnesses, and the two
extremal example generators.

Each evaluator computes both sides of one inequality exactly and reports
lhs, rhs, holds (lhs >= rhs) and witness data.  Inequality ids used across
the package and the CLI:

    lemma7    Var|X+Y+E| >= max(Var|X+E|, Var|Y+E|) / K0        (X, Y balanced)
    lemma5    Var|X+Y|   >= max(Var|X+EY|, Var|Y+EX|) / K0      (any X, Y)
    lemma4    Var|X+Y|   >= V min(VarX, VarY) / (K1 (V + E^2))
    theorem1  Var|sum Xi| >= V Var(sum_{i != k} Xi) / (K2 (V + E^2))  for some k
    claim8    E(|x1+y1| - |x2+y2|)^2 >= (|x1| - |x2|)^2 / 4     (y two-point)
    claim9    the constant-absolute-value reduction of lemma4's small case
    corollary2  cross-free Boolean functions are near one block's restriction
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

import numpy as np

from .cube import (
    BooleanFunction,
    FourierExpansion,
    Partition,
    RealFunction,
    cross_partition_weight,
    inverse_wht,
    sq_l2_dist,
    variance,
    wht,
)
from .errors import BalanceError, StructureError, VerificationError
from .rv import (
    DEFAULT_ATOM_CAP,
    DiscreteRV,
    Rational,
    TwoPointBalancedRV,
    _q,
    abs_rv,
    center,
    const_abs_approx,
    convolve,
    expectation,
    negate,
    var_abs_shifted,
    variance_rv,
)


@dataclass(frozen=True)
class Constants:
    """Universal constants of the bounds; defaults are the proved values."""

    k0: Fraction = Fraction(4)
    k1: Fraction = Fraction(20480)
    k2: Fraction = Fraction(61440)

    def __post_init__(self):
        for name in ("k0", "k1", "k2"):
            object.__setattr__(self, name, _q(getattr(self, name)))

    @property
    def corollary_k(self) -> Fraction:
        return self.k2 + 2


DEFAULT_CONSTANTS = Constants()


def _fmt(value: object) -> str:
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, (tuple, list)):
        return ",".join(str(v) for v in value)
    return str(value)


@dataclass(frozen=True)
class BoundReport:
    """Evaluated left/right sides of one inequality instance."""

    lhs: Fraction
    rhs: Fraction
    holds: bool
    witness: dict[str, object] = field(default_factory=dict)

    def __post_init__(self):
        if self.holds != (self.lhs >= self.rhs):
            raise StructureError("holds must equal lhs >= rhs")

    @classmethod
    def compare(cls, lhs: Fraction, rhs: Fraction, witness: dict | None = None) -> "BoundReport":
        return cls(lhs, rhs, lhs >= rhs, witness or {})

    @property
    def ratio(self) -> Fraction | None:
        return self.lhs / self.rhs if self.rhs > 0 else None

    def kv_lines(self) -> list[str]:
        lines = [f"lhs={self.lhs}", f"rhs={self.rhs}"]
        ratio = self.ratio
        lines.append(f"ratio={ratio}" if ratio is not None else "ratio=")
        lines.append(f"holds={_fmt(self.holds)}")
        lines.extend(f"witness.{k}={_fmt(v)}" for k, v in self.witness.items())
        return lines

    def witness_text(self) -> str:
        return ";".join(f"{k}={_fmt(v)}" for k, v in self.witness.items())

    def csv_row(self, instance_id: int | str) -> list[str]:
        ratio = self.ratio
        return [
            str(instance_id),
            str(self.lhs),
            str(self.rhs),
            str(ratio) if ratio is not None else "",
            _fmt(self.holds),
            self.witness_text(),
        ]


def _require_balanced(rv: DiscreteRV, label: str) -> None:
    mean = expectation(rv)
    if mean != 0:
        raise BalanceError(f"{label} has mean {mean}, expected exactly 0")


def lemma7_bound(
    xbar: DiscreteRV,
    ybar: DiscreteRV,
    e: Rational = 0,
    constants: Constants = DEFAULT_CONSTANTS,
) -> BoundReport:
    """Var|X+Y+E| >= max(Var|X+E|, Var|Y+E|) / K0 for balanced X, Y."""
    _require_balanced(xbar, "X")
    _require_balanced(ybar, "Y")
    e = _q(e)
    vx = var_abs_shifted(xbar, e)
    vy = var_abs_shifted(ybar, e)
    lhs = var_abs_shifted(convolve(xbar, ybar), e)
    max_side = max(vx, vy)
    witness: dict[str, object] = {
        "e": e,
        "max_side": "x" if vx >= vy else "y",
        "max_abs_var": max_side,
    }
    if lhs > 0:
        witness["required_k0"] = max_side / lhs
    return BoundReport.compare(lhs, max_side / constants.k0, witness)


def lemma5_bound(
    x: DiscreteRV, y: DiscreteRV, constants: Constants = DEFAULT_CONSTANTS
) -> BoundReport:
    """The unbalanced form: center both variables and take E = E[X+Y]."""
    e = expectation(x) + expectation(y)
    return lemma7_bound(center(x), center(y), e, constants)


def claim8_check(x1: Rational, x2: Rational, ybar: TwoPointBalancedRV) -> BoundReport:
    """Two evaluations of X+E keep a quarter of their absolute-value gap
    after adding an independent balanced two-point variable."""
    x1, x2 = _q(x1), _q(x2)
    atoms = ybar.to_rv().atoms
    lhs = Fraction(0)
    for y1, p1 in atoms:
        for y2, p2 in atoms:
            lhs += p1 * p2 * (abs(x1 + y1) - abs(x2 + y2)) ** 2
    rhs = Fraction(1, 4) * (abs(x1) - abs(x2)) ** 2
    return BoundReport.compare(lhs, rhs, {"x1": x1, "x2": x2, "d": ybar.d, "p": ybar.p})


def claim9_bound(xbar: DiscreteRV, ybar: DiscreteRV, e: Rational = 0) -> BoundReport:
    """Constant-absolute-value case: Var|X'+Y'-E| >= VarX' VarY' / (16 (VarX + E^2)).

    The underlying case analysis fixes an orientation: E >= 0 and
    E|X+E| >= E|Y+E|.  Both normalizations are applied (and recorded) before
    evaluating; without them the literal formula fails on valid inputs.
    """
    _require_balanced(xbar, "X")
    _require_balanced(ybar, "Y")
    e = _q(e)
    flipped = e < 0
    if flipped:
        xbar, ybar, e = negate(xbar), negate(ybar), -e
    x_approx = const_abs_approx(xbar, e)
    y_approx = const_abs_approx(ybar, e)
    swapped = y_approx.magnitude > x_approx.magnitude
    if swapped:
        xbar, ybar = ybar, xbar
        x_approx, y_approx = y_approx, x_approx
    var_x_approx = variance_rv(x_approx.to_rv())
    var_y_approx = variance_rv(y_approx.to_rv())
    lhs = var_abs_shifted(convolve(x_approx.to_rv(), y_approx.to_rv()), -e)
    denominator = 16 * (variance_rv(xbar) + e * e)
    rhs = var_x_approx * var_y_approx / denominator if denominator > 0 else Fraction(0)
    witness = {
        "e": e,
        "flipped": flipped,
        "swapped": swapped,
        "dx": x_approx.magnitude,
        "px": x_approx.p,
        "dy": y_approx.magnitude,
        "py": y_approx.p,
        "var_x_approx": var_x_approx,
        "var_y_approx": var_y_approx,
    }
    return BoundReport.compare(lhs, rhs, witness)


def lemma4_bound(
    x: DiscreteRV,
    y: DiscreteRV,
    constants: Constants = DEFAULT_CONSTANTS,
    atom_cap: int = DEFAULT_ATOM_CAP,
) -> BoundReport:
    """Var|X+Y| >= V min(VarX, VarY) / (K1 (V + E^2)) for any independent X, Y."""
    var_x, var_y = variance_rv(x), variance_rv(y)
    v = var_x + var_y
    e = expectation(x) + expectation(y)
    m_xy = min(var_x, var_y)
    lhs = variance_rv(abs_rv(convolve(x, y, atom_cap)))
    scale = v + e * e
    rhs = v * m_xy / (constants.k1 * scale) if scale > 0 else Fraction(0)
    witness: dict[str, object] = {"v": v, "e": e, "m_xy": m_xy}
    if scale > 0:
        # branch parameter of the two-case analysis behind the bound
        witness["a"] = Fraction(1, 2560) * v / scale
    return BoundReport.compare(lhs, rhs, witness)


def partition_split(variances: Sequence[Fraction]) -> tuple[tuple[int, ...], tuple[int, ...]]:
    """Split indices into (A, B) with both variance sums in [V/3, 2V/3].

    Requires every variance <= 2V/3 (callers with a heavier variable must use
    the single-heavy-variable branch instead).  Indices are 0-based.
    """
    variances = [_q(v) for v in variances]
    total = sum(variances, Fraction(0))
    if total <= 0:
        raise StructureError("total variance must be positive")
    for i, v in enumerate(variances):
        if v < 0:
            raise StructureError(f"negative variance at index {i}")
        if 3 * v > 2 * total:
            raise StructureError(
                f"variance at index {i} exceeds 2V/3; split precondition violated"
            )
    for i, v in enumerate(variances):
        if 3 * v > total:  # v in (V/3, 2V/3]: a singleton works
            a = (i,)
            b = tuple(j for j in range(len(variances)) if j != i)
            return a, b
    running = Fraction(0)
    chosen: list[int] = []
    for i, v in enumerate(variances):
        chosen.append(i)
        running += v
        if 3 * running >= total:
            break
    a = tuple(chosen)
    b = tuple(j for j in range(len(variances)) if j not in set(chosen))
    return a, b


def theorem1_check(
    xs: Sequence[DiscreteRV],
    constants: Constants = DEFAULT_CONSTANTS,
    atom_cap: int = DEFAULT_ATOM_CAP,
) -> BoundReport:
    """Var|sum Xi| >= V Var(sum_{i != k} Xi) / (K2 (V + E^2)), with k chosen
    as the argmax-variance index (ties to the lowest index)."""
    if len(xs) < 2:
        raise StructureError("need at least two variables")
    variances = [variance_rv(x) for x in xs]
    v = sum(variances, Fraction(0))
    e = sum((expectation(x) for x in xs), Fraction(0))
    k = max(range(len(xs)), key=lambda i: (variances[i], -i))
    rest_var = v - variances[k]
    total = xs[0]
    for x in xs[1:]:
        total = convolve(total, x, atom_cap)
    lhs = variance_rv(abs_rv(total))
    scale = v + e * e
    rhs = v * rest_var / (constants.k2 * scale) if scale > 0 else Fraction(0)
    witness: dict[str, object] = {"k": k, "v": v, "e": e, "rest_var": rest_var}
    if v > 0 and all(3 * var <= 2 * v for var in variances):
        split_a, split_b = partition_split(variances)
        witness["split_a"] = split_a
        witness["split_b"] = split_b
    return BoundReport.compare(lhs, rhs, witness)


@dataclass(frozen=True)
class CorollaryReport:
    """Outcome of the partition corollary on one (f, partition) instance."""

    k: int  # 0-based block index minimizing the distance
    dist: Fraction
    epsilon: Fraction
    holds: bool
    var_f: Fraction
    cross_weight: Fraction
    coeff_empty: Fraction
    block_dists: tuple[Fraction, ...]
    corollary_k: Fraction = Fraction(61442)

    @property
    def bound(self) -> Fraction:
        return self.epsilon * self.corollary_k


def corollary2_apply(
    f: BooleanFunction,
    partition: Partition,
    constants: Constants = DEFAULT_CONSTANTS,
    epsilon: Fraction | None = None,
) -> CorollaryReport:
    """Find the block whose restriction (plus the empty coefficient) is
    nearest to f and compare against (K2+2) * epsilon.

    epsilon defaults to cross_weight / Var f, the tightest value satisfying
    the premise; a caller-supplied epsilon is validated against it.
    """
    var_f = Fraction(variance(f))
    if var_f == 0:
        raise StructureError("variance zero: constant function has no epsilon")
    cross = Fraction(cross_partition_weight(f, partition))
    if epsilon is None:
        epsilon = cross / var_f
    else:
        epsilon = _q(epsilon)
        if cross > epsilon * var_f:
            raise StructureError(
                f"premise violated: cross weight {cross} > epsilon*Var f = {epsilon * var_f}"
            )
    expansion = wht(f)
    coeffs = expansion.coeffs
    sq = coeffs * coeffs
    subsets = np.arange(sq.size)
    coeff_empty = Fraction(float(coeffs[0]))
    block_dists: list[Fraction] = []
    for j in range(len(partition.blocks)):
        mask = partition.mask(j)
        outside = (subsets & ~mask) != 0
        coeff_route = Fraction(float(sq[outside].sum()))
        rest_table = restriction_plus_constant(f, expansion, mask)
        pointwise_route = Fraction(sq_l2_dist(f, rest_table))
        if coeff_route != pointwise_route:
            raise VerificationError(
                f"block {j}: coefficient route {coeff_route} != pointwise {pointwise_route}"
            )
        block_dists.append(coeff_route)
    k = min(range(len(block_dists)), key=lambda j: (block_dists[j], j))
    dist = block_dists[k]
    holds = dist <= constants.corollary_k * epsilon
    return CorollaryReport(
        k=k,
        dist=dist,
        epsilon=epsilon,
        holds=holds,
        var_f=var_f,
        cross_weight=cross,
        coeff_empty=coeff_empty,
        block_dists=tuple(block_dists),
        corollary_k=constants.corollary_k,
    )


def restriction_plus_constant(
    f: BooleanFunction, expansion: FourierExpansion, mask: int
) -> RealFunction:
    """Table of f_j + fhat(empty): expansion truncated to subsets of mask."""
    subsets = np.arange(expansion.coeffs.size)
    keep = (subsets & ~mask) == 0
    return inverse_wht(
        FourierExpansion(f.m, np.where(keep, expansion.coeffs, 0.0))
    )


def tribes_example(m: int) -> tuple[BooleanFunction, Partition]:
    """OR of two ANDs on disjoint m-variable blocks (-1 plays "true").

    Checked on construction: distance to the sum X+Y-1 is exactly 4*2^(-2m)
    and Var f = 4p(1-p) with p = 1 - (1 - 2^-m)^2.
    """
    if not 1 <= m <= 13:
        raise StructureError("tribes blocks support 1 <= m <= 13 (2m <= 26)")
    n = 2 * m
    points = np.arange(1 << n, dtype=np.int64)
    x_mask = (1 << m) - 1
    y_mask = x_mask << m
    x_and = np.where((points & x_mask) == x_mask, -1, 1).astype(np.int8)
    y_and = np.where((points & y_mask) == y_mask, -1, 1).astype(np.int8)
    table = np.where((x_and == -1) | (y_and == -1), -1, 1).astype(np.int8)
    f = BooleanFunction(n, table)
    partition = Partition.from_blocks(
        n, [range(1, m + 1), range(m + 1, n + 1)]
    )
    sum_table = RealFunction(n, x_and.astype(np.float64) + y_and - 1.0)
    dist_to_sum = Fraction(sq_l2_dist(f, sum_table))
    if dist_to_sum != Fraction(4, 4**m):
        raise VerificationError(f"tribes distance {dist_to_sum} != 4*2^(-2m)")
    p = 1 - (1 - Fraction(1, 2**m)) ** 2
    if Fraction(variance(f)) != 4 * p * (1 - p):
        raise VerificationError("tribes variance != 4p(1-p)")
    return f, partition


def claim6_example() -> tuple[DiscreteRV, DiscreteRV]:
    """Balanced pair witnessing that the lemma7/lemma5 constant must be >= 4/3:
    X on {0: 1/2, +-2: 1/4 each}, Y uniform on {+-1}; Var|X+Y| = (3/4) Var|X|."""
    x = DiscreteRV.from_atoms([(0, Fraction(1, 2)), (-2, Fraction(1, 4)), (2, Fraction(1, 4))])
    y = DiscreteRV.from_atoms([(-1, Fraction(1, 2)), (1, Fraction(1, 2))])
    if expectation(x) != 0 or expectation(y) != 0:
        raise VerificationError("claim6 variables must be balanced")
    if variance_rv(abs_rv(convolve(x, y))) != Fraction(3, 4):
        raise VerificationError("claim6 Var|X+Y| != 3/4")
    if variance_rv(abs_rv(x)) != 1:
        raise VerificationError("claim6 Var|X| != 1")
    return x, y
