"""Accumulation benchmark: y <- a*x + y over coefficients of rising width.

Three phases stress the number formats differently:

* phase 1 uses small sixteenth-grid coefficients every compared format
  stores exactly;
* phase 2 switches to coefficients near 2**30, overflowing binary16 while
  the variable-width lanes keep absorbing the growing magnitudes;
* phase 3 draws uniform binary32 coefficients in [0, 1), whose products
  need more fraction bits than even the widest lane carries exactly.

The reference lane is exact dyadic arithmetic, so reference error is zero
by construction.  Products are always formed exactly and then encoded into
each lane's format, since the arithmetic unit under study has no multiplier.
Relative error of an interval lane is measured at the interval midpoint;
the interval width is reported alongside so nothing is hidden.

CLI:
    axpy --lanes f16,f32,u3.4,u4.5 --iters 40,40,40 --seed 1 \
         [--unify-every k] --out results.csv
"""

from __future__ import annotations

import argparse
import csv
import math
import random
import sys
from dataclasses import dataclass, field

from .arith import add
from .codec import PackedUbound, decode, encode_tight, single, _min_exact_unum
from .compress import unify
from .env import Environment
from .exact import Dyadic, ExtendedReal, GeneralInterval
from .softfloat import BINARY16, BINARY32, FloatFormat, round_nearest_even, soft_add

LANE_NAMES = ("f16", "f32", "u3.4", "u4.5")


@dataclass(frozen=True)
class AxpySchedule:
    """Iteration counts and coefficient-generator parameters, seeded."""

    iters: tuple[int, int, int] = (40, 40, 40)
    seed: int = 1
    # phase 1: a = i/16, x = j/16 with i, j drawn from [1, phase1_top];
    # 7 keeps every partial sum within binary16's 11-bit significand
    phase1_top: int = 7
    # phase 2: a integer in [1, 16], x a full 24-bit binary32 significand
    # scaled by 2**phase2_shift, i.e. a value in [2**30, 2**31)
    phase2_shift: int = 7

    def phases(self):
        for phase, count in enumerate(self.iters, start=1):
            for _ in range(count):
                yield phase

    def coefficients(self):
        """The deterministic (phase, a, x) stream."""
        rng = random.Random(self.seed)
        for phase in self.phases():
            if phase == 1:
                a = Dyadic(rng.randint(1, self.phase1_top), -4)
                x = Dyadic(rng.randint(1, self.phase1_top), -4)
            elif phase == 2:
                a = Dyadic(rng.randint(1, 16))
                x = Dyadic((1 << 23) + rng.getrandbits(23), self.phase2_shift)
            else:
                a = Dyadic(rng.getrandbits(24), -24)
                x = Dyadic(rng.getrandbits(24), -24)
                if a.is_zero():
                    a = Dyadic(1, -24)
                if x.is_zero():
                    x = Dyadic(1, -24)
            yield phase, a, x


@dataclass
class LaneResult:
    """Per-iteration trace of one lane.

    ``bits`` is the packed width of the lane's running value.
    ``stored_bits`` is the width the value would occupy if written out to
    memory at that point, i.e. after a final unify; for float lanes both
    are the fixed format width.
    """

    lane: str
    phase: list[int] = field(default_factory=list)
    bits: list[int] = field(default_factory=list)
    stored_bits: list[int] = field(default_factory=list)
    rel_error: list[float] = field(default_factory=list)
    interval_width: list[float | None] = field(default_factory=list)
    overflow: list[bool] = field(default_factory=list)
    intervals: list[GeneralInterval | None] = field(default_factory=list)
    widths: list[Dyadic | None] = field(default_factory=list)


def _rel_error(value: ExtendedReal, ref: Dyadic) -> float:
    if not value.is_finite:
        return math.inf
    diff = abs(value.dyadic - ref)
    denom = abs(ref)
    if denom.is_zero():
        return 0.0 if diff.is_zero() else math.inf
    return abs(diff.to_float() / denom.to_float())


class _FloatLane:
    def __init__(self, fmt: FloatFormat):
        self.fmt = fmt
        self.y = ExtendedReal.finite(Dyadic(0))
        self.overflowed = False

    def step(self, product: Dyadic) -> None:
        p = round_nearest_even(product, self.fmt)
        self.y = soft_add(p, self.y, self.fmt)
        if self.y.is_inf or p.is_inf:
            self.overflowed = True

    def record(self, result: LaneResult, phase: int, ref: Dyadic) -> None:
        result.phase.append(phase)
        result.bits.append(self.fmt.bits)
        result.stored_bits.append(self.fmt.bits)
        result.rel_error.append(_rel_error(self.y, ref))
        result.interval_width.append(None)
        result.overflow.append(self.overflowed)
        result.intervals.append(None)
        result.widths.append(None)


class _UnumLane:
    def __init__(self, env: Environment, unify_every: int | None):
        self.env = env
        self.unify_every = unify_every
        self.y: PackedUbound = single(_min_exact_unum(Dyadic(0), env))
        self.count = 0

    def step(self, product: Dyadic) -> None:
        p = encode_tight(GeneralInterval.point(product), self.env)
        self.y = add(self.y, p)
        self.count += 1
        if self.unify_every and self.count % self.unify_every == 0:
            self.y = unify(self.y)

    def record(self, result: LaneResult, phase: int, ref: Dyadic) -> None:
        d = decode(self.y)
        result.phase.append(phase)
        result.bits.append(self.y.bit_length)
        result.stored_bits.append(unify(self.y).bit_length)
        result.intervals.append(d)
        unbounded = d.lo.is_inf or d.hi.is_inf
        result.overflow.append(unbounded)
        if unbounded:
            result.rel_error.append(math.inf)
            result.interval_width.append(math.inf)
            result.widths.append(None)
            return
        width = d.width().dyadic
        result.widths.append(width)
        result.interval_width.append(width.to_float())
        result.rel_error.append(_rel_error(d.midpoint(), ref))


def _make_lane(name: str, unify_every: int | None):
    if name == "f16":
        return _FloatLane(BINARY16)
    if name == "f32":
        return _FloatLane(BINARY32)
    if name.startswith("u"):
        return _UnumLane(Environment.parse(name[1:]), unify_every)
    raise ValueError(f"unknown lane {name!r}; expected one of {LANE_NAMES}")


@dataclass
class RunResult:
    schedule: AxpySchedule
    lanes: dict[str, LaneResult]
    refs: list[Dyadic]
    unify_every: int | None


def run_axpy(
    schedule: AxpySchedule,
    lanes: list[str] = list(LANE_NAMES),
    unify_every: int | None = None,
) -> RunResult:
    """Run all lanes over the schedule's coefficient stream."""
    workers = {name: _make_lane(name, unify_every) for name in lanes}
    results = {name: LaneResult(name) for name in lanes}
    refs: list[Dyadic] = []
    y_ref = Dyadic(0)
    for phase, a, x in schedule.coefficients():
        product = a * x
        y_ref = y_ref + product
        refs.append(y_ref)
        for name, lane in workers.items():
            lane.step(product)
            lane.record(results[name], phase, y_ref)
    return RunResult(schedule, results, refs, unify_every)


def write_csv(run: RunResult, path: str) -> None:
    """Lane-major CSV: lane, iteration, phase, bits, rel_error, width, overflow."""
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(
            ["lane", "iteration", "phase", "bits", "rel_error", "interval_width", "overflow"]
        )
        for name in run.lanes:
            r = run.lanes[name]
            for i in range(len(r.bits)):
                width = r.interval_width[i]
                w.writerow(
                    [
                        name,
                        i + 1,
                        r.phase[i],
                        r.bits[i],
                        repr(r.rel_error[i]),
                        "" if width is None else repr(width),
                        int(r.overflow[i]),
                    ]
                )


def _mean(xs: list[float]) -> float:
    return sum(xs) / len(xs) if xs else math.nan


def unified_store_mean(run: RunResult, lane: str, phases=(2, 3)) -> float:
    """Mean unify-before-store footprint of a lane over the given phases."""
    r = run.lanes[lane]
    return _mean(
        [float(b) for b, ph in zip(r.stored_bits, r.phase) if ph in phases]
    )


def footprint_report(run: RunResult) -> str:
    """Mean working and stored widths per phase, ratios against float32.

    ``bits`` columns are the running value's packed width; ``store`` is the
    width after the unify applied when writing the value out, which is the
    memory-footprint figure of merit.
    """
    lines = []
    header = (
        f"{'lane':<6} {'ph1 bits':>9} {'ph2 bits':>9} {'ph3 bits':>9}"
        f" {'store2-3':>9} {'vs f32':>8} {'ph2-3 err':>12}"
    )
    lines.append(header)
    lines.append("-" * len(header))
    for name, r in run.lanes.items():
        by_phase = {ph: [] for ph in (1, 2, 3)}
        err23: list[float] = []
        for i, ph in enumerate(r.phase):
            by_phase[ph].append(r.bits[i])
            if ph >= 2:
                err23.append(r.rel_error[i])
        m1, m2, m3 = (_mean([float(b) for b in by_phase[p]]) for p in (1, 2, 3))
        store23 = unified_store_mean(run, name)
        ratio = store23 / 32.0
        lines.append(
            f"{name:<6} {m1:>9.2f} {m2:>9.2f} {m3:>9.2f}"
            f" {store23:>9.2f} {ratio:>8.2f} {_mean(err23):>12.3e}"
        )
    lines.append("float32 interval pair stores 64 bits/value; ratio vs f32 = 2.00")
    return "\n".join(lines)


def main(argv: list[str] | None = None) -> int:
    parser = argparse.ArgumentParser(
        prog="axpy", description="accumulation accuracy/footprint benchmark"
    )
    parser.add_argument(
        "--lanes",
        default="f16,f32,u3.4,u4.5",
        help="comma-separated: f16, f32, u<a>.<b>",
    )
    parser.add_argument(
        "--iters",
        default="40,40,40",
        help="iterations per phase, three comma-separated counts",
    )
    parser.add_argument("--seed", type=int, default=1)
    parser.add_argument(
        "--unify-every",
        type=int,
        default=None,
        metavar="K",
        help="apply unify to the running value every K iterations",
    )
    parser.add_argument("--out", required=True, help="CSV output path")
    args = parser.parse_args(argv)

    iters = tuple(int(t) for t in args.iters.split(","))
    if len(iters) != 3:
        parser.error("--iters needs exactly three counts")
    lanes = [t.strip() for t in args.lanes.split(",") if t.strip()]
    schedule = AxpySchedule(iters=iters, seed=args.seed)
    run = run_axpy(schedule, lanes, args.unify_every)
    write_csv(run, args.out)
    print(footprint_report(run))
    return 0


if __name__ == "__main__":
    sys.exit(main())
