"""Enumeration and randomized sweep engine for the inequality evaluators.

All generated instances are exact rationals with bounded denominators, so a
reported violation is a real violation and never a rounding artifact.  Every
sweep is a deterministic function of its config: instance i draws from its
own RNG stream derived from (seed, i), which keeps results independent of
evaluation order.
"""

from __future__ import annotations

import itertools
import math
import random
from dataclasses import dataclass, replace
from fractions import Fraction
from typing import Iterator

import numpy as np

from .bounds import (
    DEFAULT_CONSTANTS,
    BoundReport,
    Constants,
    TwoPointBalancedRV,
    claim6_example,
    claim8_check,
    claim9_bound,
    corollary2_apply,
    lemma4_bound,
    lemma5_bound,
    lemma7_bound,
    theorem1_check,
    tribes_example,
)
from .cube import (
    BooleanFunction,
    Partition,
    RealFunction,
    sq_l2_dist,
    variance,
)
from .errors import SearchSpaceError, StructureError, VerificationError
from .rv import DiscreteRV, center, format_rv_inline

TARGETS = (
    "fact1",
    "fact8",
    "lemma4",
    "lemma5",
    "lemma7",
    "claim8",
    "claim9",
    "theorem1",
    "corollary2",
)

# targets whose right side is (numerator / constant); empirical_constant
# reports the smallest constant that would have sufficed on the sweep
RATIO_FORM = ("fact1", "lemma4", "lemma5", "lemma7", "claim8", "claim9", "theorem1")


@dataclass(frozen=True)
class SweepConfig:
    target: str
    instance_count: int = 10_000
    seed: int = 0
    support_min: int = 1
    support_max: int = 5
    value_lo: Fraction = Fraction(-3)
    value_hi: Fraction = Fraction(3)
    denom_cap: int = 12
    constants: Constants = DEFAULT_CONSTANTS
    include_claim6: bool = False
    exhaustive_m: int = 3
    rv_count_max: int = 4
    atom_cap: int = 10**6
    collect_rows: bool = False

    def __post_init__(self):
        if self.target not in TARGETS:
            raise StructureError(f"unknown target {self.target!r}; one of {TARGETS}")
        if self.instance_count < 1:
            raise StructureError("instance_count must be >= 1")
        if not 1 <= self.support_min <= self.support_max:
            raise StructureError("need 1 <= support_min <= support_max")
        object.__setattr__(self, "value_lo", Fraction(self.value_lo))
        object.__setattr__(self, "value_hi", Fraction(self.value_hi))
        if self.value_lo >= self.value_hi:
            raise StructureError("value grid is empty")
        if self.denom_cap < max(2, self.support_max):
            raise StructureError("denom_cap too small for the requested supports")


@dataclass(frozen=True)
class SweepResult:
    target: str
    instances_run: int
    violations: tuple[str, ...]
    min_ratio: Fraction | None
    min_ratio_witness: str | None
    empirical_constant: Fraction | None
    errors: tuple[tuple[int, str], ...] = ()
    rows: tuple[tuple[str, ...], ...] | None = None


def _rng_for(seed: int, index: int) -> random.Random:
    return random.Random(((seed & 0xFFFFFFFF) << 40) ^ (index + 1))


def enumerate_boolean_functions(m: int) -> Iterator[BooleanFunction]:
    """All 2^(2^m) truth tables in table-integer order.

    Bit i of the table integer set means table[i] = -1.
    """
    if m > 4:
        raise StructureError("exhaustive enumeration supported only for m <= 4")
    n = 1 << m
    positions = np.arange(n, dtype=np.int64)
    for t in range(1 << n):
        bits = (t >> positions) & 1
        yield BooleanFunction(m, (1 - 2 * bits).astype(np.int8))


def _random_fraction(
    rng: random.Random, lo: Fraction, hi: Fraction, denom_cap: int
) -> Fraction:
    den = rng.randint(1, denom_cap)
    lo_num = math.ceil(lo * den)
    hi_num = math.floor(hi * den)
    if hi_num < lo_num:
        den = denom_cap
        lo_num = math.ceil(lo * den)
        hi_num = math.floor(hi * den)
        if hi_num < lo_num:
            raise StructureError(f"no rational with denominator <= {denom_cap} in [{lo}, {hi}]")
    return Fraction(rng.randint(lo_num, hi_num), den)


def random_rv(
    support_size: int,
    seed: int,
    value_range: tuple[Fraction, Fraction] = (Fraction(-3), Fraction(3)),
    denom_cap: int = 12,
) -> DiscreteRV:
    """Deterministic random variable: distinct bounded-denominator values and
    probabilities k/D with D <= denom_cap."""
    return _random_rv(_rng_for(seed, 0), support_size, value_range, denom_cap)


def _random_rv(
    rng: random.Random,
    support_size: int,
    value_range: tuple[Fraction, Fraction],
    denom_cap: int,
) -> DiscreteRV:
    if support_size < 1:
        raise StructureError("support_size must be >= 1")
    lo, hi = Fraction(value_range[0]), Fraction(value_range[1])
    values: set[Fraction] = set()
    attempts = 0
    while len(values) < support_size:
        values.add(_random_fraction(rng, lo, hi, denom_cap))
        attempts += 1
        if attempts > 1000 * support_size:
            raise StructureError("value grid too small for requested support")
    if support_size == 1:
        return DiscreteRV.constant(values.pop())
    d = rng.randint(support_size, max(denom_cap, support_size))
    cuts = sorted(rng.sample(range(1, d), support_size - 1))
    masses = [b - a for a, b in zip([0] + cuts, cuts + [d])]
    return DiscreteRV.from_atoms(
        (v, Fraction(k, d)) for v, k in zip(sorted(values), masses)
    )


def random_real_function(m: int, seed: int, denom_pow: int = 4, max_num: int = 32) -> RealFunction:
    """Random dyadic table: entries k/2^denom_pow with |k| <= max_num."""
    return _random_real_function(_rng_for(seed, 0), m, denom_pow, max_num)


def _random_real_function(
    rng: random.Random, m: int, denom_pow: int = 4, max_num: int = 32
) -> RealFunction:
    scale = 1 << denom_pow
    table = np.array(
        [rng.randint(-max_num, max_num) / scale for _ in range(1 << m)],
        dtype=np.float64,
    )
    return RealFunction(m, table)


def _random_balanced(rng: random.Random, cfg: SweepConfig) -> DiscreteRV:
    return center(
        _random_rv(
            rng,
            rng.randint(cfg.support_min, cfg.support_max),
            (cfg.value_lo, cfg.value_hi),
            cfg.denom_cap,
        )
    )


def _random_raw(rng: random.Random, cfg: SweepConfig) -> DiscreteRV:
    return _random_rv(
        rng,
        rng.randint(cfg.support_min, cfg.support_max),
        (cfg.value_lo, cfg.value_hi),
        cfg.denom_cap,
    )


def _claim8_instance(
    rng: random.Random, case: int, cfg: SweepConfig
) -> tuple[Fraction, Fraction, TwoPointBalancedRV]:
    """Stratified (x1, x2, Y) generator covering the four case-analysis
    regions of the quarter-gap claim, boundaries included."""
    cap = cfg.denom_cap
    if rng.random() < 0.0625:
        d = Fraction(0)
    else:
        den = rng.randint(1, cap)
        d = Fraction(rng.randint(1, 3 * den), den)
    if case == 0:  # p >= 1/2
        if rng.random() < 0.125:
            p = Fraction(1, 2)
        else:
            b = rng.randint(2, cap)
            p = Fraction(rng.randint(math.ceil(b / 2), b - 1), b)
    elif case == 1:  # 1/4 <= p < 1/2
        if rng.random() < 0.125:
            p = Fraction(1, 4)
        else:
            b = rng.randint(4, max(4, cap))
            p = Fraction(rng.randint(math.ceil(b / 4), math.ceil(b / 2) - 1), b)
    else:  # p < 1/4
        b = rng.randint(5, max(5, cap))
        p = Fraction(rng.randint(1, math.ceil(b / 4) - 1), b)
    ybar = TwoPointBalancedRV(d, p)
    if case <= 1:
        den = rng.randint(1, cap)
        x1 = Fraction(rng.randint(0, 3 * den), den)
    else:
        boundary = 2 * d / (1 - p)
        den = rng.randint(1, cap)
        if case == 2:  # x1 <= 2d/(1-p), endpoint included
            x1 = boundary * Fraction(rng.randint(0, den), den)
        else:  # x1 > 2d/(1-p)
            x1 = boundary + Fraction(rng.randint(1, 3 * den), den)
    den = rng.randint(1, cap)
    x2 = x1 * Fraction(rng.randint(0, den), den)
    if rng.random() < 0.5:
        x2 = -x2
    return x1, x2, ybar


def _evaluate_instance(
    cfg: SweepConfig, index: int, use_claim6: bool
) -> tuple[BoundReport, Fraction | None]:
    """One instance of cfg.target: (report, ratio-form numerator or None)."""
    rng = _rng_for(cfg.seed, index)
    target = cfg.target
    constants = cfg.constants
    if target in ("lemma7", "claim9"):
        if use_claim6:
            xbar, ybar = claim6_example()
            e = Fraction(0)
        else:
            xbar, ybar = _random_balanced(rng, cfg), _random_balanced(rng, cfg)
            e = _random_fraction(rng, cfg.value_lo, cfg.value_hi, cfg.denom_cap)
        inputs = {"x": format_rv_inline(xbar), "y": format_rv_inline(ybar)}
        if target == "lemma7":
            report = lemma7_bound(xbar, ybar, e, constants)
            numerator = report.witness["max_abs_var"]
        else:
            report = claim9_bound(xbar, ybar, e)
            numerator = 16 * report.rhs  # rhs carries the fixed 16 in its denominator
    elif target in ("lemma4", "lemma5"):
        if use_claim6:
            x, y = claim6_example()
        else:
            x, y = _random_raw(rng, cfg), _random_raw(rng, cfg)
        inputs = {"x": format_rv_inline(x), "y": format_rv_inline(y)}
        if target == "lemma4":
            report = lemma4_bound(x, y, constants, cfg.atom_cap)
            numerator = constants.k1 * report.rhs
        else:
            report = lemma5_bound(x, y, constants)
            numerator = report.witness["max_abs_var"]
    elif target == "claim8":
        x1, x2, ybar = _claim8_instance(rng, index % 4, cfg)
        inputs = {"case": index % 4}
        report = claim8_check(x1, x2, ybar)
        numerator = (abs(x1) - abs(x2)) ** 2
    elif target == "theorem1":
        count = rng.randint(2, cfg.rv_count_max)
        xs = [_random_raw(rng, cfg) for _ in range(count)]
        inputs = {f"x{i}": format_rv_inline(x) for i, x in enumerate(xs)}
        report = theorem1_check(xs, constants, cfg.atom_cap)
        numerator = constants.k2 * report.rhs
    elif target == "fact1":
        m = rng.randint(1, 3)
        f, g, h = (_random_real_function(rng, m) for _ in range(3))
        lhs = Fraction(sq_l2_dist(f, g)) + Fraction(sq_l2_dist(g, h))
        numerator = Fraction(sq_l2_dist(f, h))
        report = BoundReport.compare(lhs, numerator / 2, {"m": m})
        inputs = {}
    elif target == "fact8":
        m = rng.randint(1, 3)
        f, g = (_random_real_function(rng, m) for _ in range(2))
        lhs = Fraction(variance(f))
        rhs = Fraction(variance(g)) / 2 - Fraction(sq_l2_dist(f, g))
        report = BoundReport.compare(lhs, rhs, {"m": m})
        numerator = None
        inputs = {}
    else:
        raise StructureError(f"target {target!r} is not instance-generated")
    if inputs:
        report = replace(report, witness={**inputs, **report.witness})
    return report, numerator


def run_sweep(cfg: SweepConfig) -> SweepResult:
    """Evaluate cfg.target on every generated instance; exact throughout."""
    if cfg.target == "corollary2":
        return corollary2_exhaustive(cfg.exhaustive_m, cfg.constants, cfg.collect_rows)
    claim6_first = cfg.include_claim6 and cfg.target in ("lemma4", "lemma5", "lemma7", "claim9")
    total = cfg.instance_count + (1 if claim6_first else 0)
    violations: list[str] = []
    errors: list[tuple[int, str]] = []
    rows: list[tuple[str, ...]] | None = [] if cfg.collect_rows else None
    min_ratio: Fraction | None = None
    min_ratio_witness: str | None = None
    best_constant: Fraction | None = Fraction(0) if cfg.target in RATIO_FORM else None
    for i in range(total):
        use_claim6 = claim6_first and i == 0
        try:
            report, numerator = _evaluate_instance(cfg, i, use_claim6)
        except Exception as exc:  # per-instance failures are data, not crashes
            errors.append((i, f"{type(exc).__name__}: {exc}"))
            continue
        if rows is not None:
            rows.append(tuple(report.csv_row(i)))
        if not report.holds:
            violations.append(
                f"instance={i} lhs={report.lhs} rhs={report.rhs} {report.witness_text()}"
            )
        ratio = report.ratio
        if ratio is not None and (min_ratio is None or ratio < min_ratio):
            min_ratio = ratio
            min_ratio_witness = f"instance={i} {report.witness_text()}"
        if best_constant is not None and numerator is not None and numerator > 0:
            if report.lhs == 0:
                errors.append((i, f"unbounded constant: numerator {numerator} with lhs 0"))
                continue
            best_constant = max(best_constant, numerator / report.lhs)
    return SweepResult(
        target=cfg.target,
        instances_run=total,
        violations=tuple(violations),
        min_ratio=min_ratio,
        min_ratio_witness=min_ratio_witness,
        empirical_constant=best_constant,
        errors=tuple(errors),
        rows=tuple(rows) if rows is not None else None,
    )


def empirical_constant(target: str, cfg: SweepConfig | None = None, **overrides) -> Fraction:
    """Smallest constant that would make `target` hold on the swept instances
    (sup of numerator/lhs; degenerate numerator-0 instances skipped, 0 if all)."""
    if cfg is None:
        cfg = SweepConfig(target=target, **overrides)
    elif cfg.target != target:
        cfg = replace(cfg, target=target)
    if target not in RATIO_FORM:
        raise StructureError(f"{target!r} is not a ratio-form inequality")
    result = run_sweep(cfg)
    if result.errors:
        raise VerificationError(f"sweep errors while estimating constant: {result.errors[:3]}")
    assert result.empirical_constant is not None
    return result.empirical_constant


def two_block_partitions(m: int) -> Iterator[Partition]:
    """All partitions of {1..m} into exactly two nonempty blocks."""
    full = (1 << m) - 1
    for mask in range(1, full):
        if mask < (full ^ mask):
            continue  # each {A, B} pair visited once, via its larger mask
        yield Partition.from_blocks(
            m,
            [
                [i + 1 for i in range(m) if not (mask >> i) & 1],
                [i + 1 for i in range(m) if (mask >> i) & 1],
            ],
        )


def corollary2_exhaustive(
    m: int, constants: Constants = DEFAULT_CONSTANTS, collect_rows: bool = False
) -> SweepResult:
    """Check the partition corollary on every non-constant function on m <= 4
    variables against every 2-block partition; also records the largest
    observed dist/epsilon (the empirical corollary constant)."""
    if m > 4:
        raise StructureError("exhaustive check supported only for m <= 4")
    partitions = list(two_block_partitions(m))
    violations: list[str] = []
    rows: list[tuple[str, ...]] | None = [] if collect_rows else None
    min_ratio: Fraction | None = None
    min_ratio_witness: str | None = None
    best_constant = Fraction(0)
    instance = 0
    for f in enumerate_boolean_functions(m):
        if np.all(f.table == f.table[0]):
            continue
        for partition in partitions:
            outcome = corollary2_apply(f, partition, constants)
            lhs = constants.corollary_k * outcome.epsilon
            report = BoundReport.compare(
                lhs,
                outcome.dist,
                {
                    "table": "".join("+" if v > 0 else "-" for v in f.table),
                    "partition": "|".join(
                        ",".join(map(str, sorted(b))) for b in partition.blocks
                    ),
                    "k": outcome.k,
                    "epsilon": outcome.epsilon,
                },
            )
            if rows is not None:
                rows.append(tuple(report.csv_row(instance)))
            if not outcome.holds:
                violations.append(
                    f"instance={instance} dist={outcome.dist} bound={lhs} {report.witness_text()}"
                )
            ratio = report.ratio
            if ratio is not None and (min_ratio is None or ratio < min_ratio):
                min_ratio = ratio
                min_ratio_witness = f"instance={instance} {report.witness_text()}"
            if outcome.cross_weight > 0:
                best_constant = max(best_constant, outcome.dist / outcome.epsilon)
            instance += 1
    return SweepResult(
        target="corollary2",
        instances_run=instance,
        violations=tuple(violations),
        min_ratio=min_ratio,
        min_ratio_witness=min_ratio_witness,
        empirical_constant=best_constant,
        rows=tuple(rows) if rows is not None else None,
    )


@dataclass(frozen=True)
class TightnessRow:
    m: int
    var_f: Fraction
    cross_weight: Fraction
    min_dist: Fraction


def tightness_scan(max_m: int) -> tuple[TightnessRow, ...]:
    """Tribes table for m = 1..max_m.

    Verifies that cross_weight/Var f and min-block distance both scale like
    2^-m: their products with 2^m must stay inside [1/8, 32] for m >= 2.
    """
    if not 1 <= max_m <= 13:
        raise StructureError("tightness scan supports 1 <= max_m <= 13")
    rows = []
    lo, hi = Fraction(1, 8), Fraction(32)
    for m in range(1, max_m + 1):
        f, partition = tribes_example(m)
        outcome = corollary2_apply(f, partition)
        row = TightnessRow(
            m=m,
            var_f=outcome.var_f,
            cross_weight=outcome.cross_weight,
            min_dist=outcome.dist,
        )
        if m >= 2:
            scaled_cross = (row.cross_weight / row.var_f) * (1 << m)
            scaled_dist = row.min_dist * (1 << m)
            if not lo <= scaled_cross <= hi:
                raise VerificationError(f"m={m}: scaled cross weight {scaled_cross} outside bracket")
            if not lo <= scaled_dist <= hi:
                raise VerificationError(f"m={m}: scaled distance {scaled_dist} outside bracket")
        rows.append(row)
    return tuple(rows)


def conjecture_probe(
    f: BooleanFunction, partition: Partition, budget: int = 10**7
) -> tuple[BooleanFunction, list[BooleanFunction], Fraction]:
    """Exhaustive search for the best composition g(h_1, ..., h_n) of Boolean
    per-block functions approximating f.  Exploratory only: the result is a
    minimizer over a finite family and proves nothing beyond itself.

    g's j-th variable is the output of block j (blocks in partition order,
    variables inside a block in increasing order).
    """
    blocks = partition.blocks
    if len(blocks) > 4 or any(len(b) > 3 for b in blocks):
        raise SearchSpaceError("probe supports at most 4 blocks of at most 3 variables")
    if partition.m != f.m:
        raise StructureError("partition does not match the function")
    # each h is fixed to +1 at the all-(+1) point; g absorbs the lost signs
    combos = 1
    for b in blocks:
        combos *= 1 << ((1 << len(b)) - 1)
    if combos * (1 << f.m) > budget:
        raise SearchSpaceError(f"search touches {combos * (1 << f.m)} points (budget {budget})")
    points = np.arange(1 << f.m, dtype=np.int64)
    local_indices = []
    for block in blocks:
        local = np.zeros_like(points)
        for t, var in enumerate(sorted(block)):
            local |= ((points >> (var - 1)) & 1) << t
        local_indices.append(local)
    n_blocks = len(blocks)
    f_neg = f.table < 0
    best: tuple[Fraction, tuple[int, ...], np.ndarray] | None = None
    h_choices = [range(0, 1 << (1 << len(b)), 2) for b in blocks]
    for combo in itertools.product(*h_choices):
        z = np.zeros_like(points)
        for j, (t_j, local) in enumerate(zip(combo, local_indices)):
            z |= ((t_j >> local) & 1) << j
        neg_counts = np.bincount(z[f_neg], minlength=1 << n_blocks)
        pos_counts = np.bincount(z[~f_neg], minlength=1 << n_blocks)
        mismatches = np.minimum(neg_counts, pos_counts).sum()
        dist = Fraction(4 * int(mismatches), 1 << f.m)
        if best is None or dist < best[0]:
            # majority vote per fiber; ties and empty fibers resolve to +1
            g_table = np.where(neg_counts > pos_counts, -1, 1).astype(np.int8)
            best = (dist, combo, g_table)
            if dist == 0:
                break
    assert best is not None
    dist, combo, g_table = best
    hs = []
    for t_j, block in zip(combo, blocks):
        size = 1 << len(block)
        bits = (t_j >> np.arange(size, dtype=np.int64)) & 1
        hs.append(BooleanFunction(len(block), (1 - 2 * bits).astype(np.int8)))
    g = BooleanFunction(n_blocks, g_table) if n_blocks > 1 else BooleanFunction(1, g_table)
    return g, hs, dist


# ---------------------------------------------------------------------------
# key=value config files


_CONFIG_KEYS = {
    "target": str,
    "n": int,
    "instance_count": int,
    "seed": int,
    "support_min": int,
    "support_max": int,
    "value_lo": Fraction,
    "value_hi": Fraction,
    "denom_cap": int,
    "k0": Fraction,
    "k1": Fraction,
    "k2": Fraction,
    "include_claim6": bool,
    "exhaustive_m": int,
    "rv_count_max": int,
    "atom_cap": int,
}


def parse_sweep_config(text: str) -> SweepConfig:
    """Build a SweepConfig from 'key=value' lines ('#' comments allowed)."""
    fields: dict[str, object] = {}
    constant_overrides: dict[str, Fraction] = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        stripped = raw.strip()
        if not stripped or stripped.startswith("#"):
            continue
        if "=" not in stripped:
            raise StructureError(f"line {lineno}: expected key=value, got {stripped!r}")
        key, _, value = stripped.partition("=")
        key = key.strip().lower()
        value = value.strip()
        if key not in _CONFIG_KEYS:
            raise StructureError(f"line {lineno}: unknown key {key!r}")
        kind = _CONFIG_KEYS[key]
        if kind is bool:
            parsed: object = value.lower() in ("1", "true", "yes")
        elif kind is Fraction:
            parsed = Fraction(value)
        elif kind is int:
            parsed = int(value)
        else:
            parsed = value
        if key in ("k0", "k1", "k2"):
            constant_overrides[key] = parsed  # type: ignore[assignment]
        elif key == "n":
            fields["instance_count"] = parsed
        else:
            fields[key] = parsed
    if "target" not in fields:
        raise StructureError("config missing required key 'target'")
    if constant_overrides:
        fields["constants"] = Constants(
            k0=constant_overrides.get("k0", DEFAULT_CONSTANTS.k0),
            k1=constant_overrides.get("k1", DEFAULT_CONSTANTS.k1),
            k2=constant_overrides.get("k2", DEFAULT_CONSTANTS.k2),
        )
    return SweepConfig(**fields)  # type: ignore[arg-type]
