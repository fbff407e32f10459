#!/usr/bin/env python3
"""Side-by-side study of unification cadence on the accumulation benchmark.

Runs the same seeded coefficient stream once without unification feedback
and once unifying after every iteration, then prints the footprint tables
and the point where the every-iteration lane stops being coverable by a
single unum (visible as the working width jumping to two-unum size).
"""

import argparse

from unumkit.axpy import AxpySchedule, footprint_report, run_axpy

LANES = ["f16", "f32", "u3.4", "u4.5"]


def main() -> int:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--seed", type=int, default=1)
    parser.add_argument("--iters", default="40,40,40")
    args = parser.parse_args()
    iters = tuple(int(t) for t in args.iters.split(","))
    sched = AxpySchedule(iters=iters, seed=args.seed)

    plain = run_axpy(sched, LANES, unify_every=None)
    noisy = run_axpy(sched, LANES, unify_every=1)

    print("without unification feedback (store sizes still unified):")
    print(footprint_report(plain))
    print()
    print("unify after every iteration (the cautionary cadence):")
    print(footprint_report(noisy))

    r = noisy.lanes["u3.4"]
    blowup = next(
        (i + 1 for i, b in enumerate(r.bits) if b > 33), None
    )
    if blowup is not None:
        print(
            f"\nu3.4 stops fitting a single unum at iteration {blowup}: "
            "each unification fills its window, so the next addition "
            "overflows it and the cover doubles until none exists"
        )
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
