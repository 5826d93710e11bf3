#!/usr/bin/env python3
"""Table-entry growth report for the polynomial solver.

Samples weakly galled pairs at increasing node counts, solves each, and
reports the memoized table sizes along with log-log growth slopes. Pairs are
identical or lightly perturbed copies; independently drawn pairs reduce to
the star almost surely and leave the leaf-anchored tables empty.

    python3 scripts/scaling_telemetry.py --sizes 25,50,100,200 --samples 8
"""

import argparse
import math
import statistics
import sys
import time
from pathlib import Path

sys.path.insert(0, str(Path(__file__).resolve().parent.parent / "tests"))

from conftest import gen_wgt, perturb  # noqa: E402
from phylocontract.generators import SplitMix64  # noqa: E402
from phylocontract.mcc_dp import solve_with_stats  # noqa: E402


def wgt_with_at_least(target_nodes: int, seed: int):
    rng = SplitMix64(seed)
    leaves = max(3, int(target_nodes * 0.55))
    while True:
        n = gen_wgt(leaves, max(1, target_nodes // 50), rng.randrange(1 << 30))
        if len(n.succ) >= target_nodes:
            return n
        leaves += max(1, (target_nodes - len(n.succ)) // 2)


def loglog_slope(xs, ys):
    lx = [math.log(x) for x in xs]
    ly = [math.log(y) for y in ys]
    mx, my = sum(lx) / len(lx), sum(ly) / len(ly)
    return sum((a - mx) * (b - my) for a, b in zip(lx, ly)) / sum(
        (a - mx) ** 2 for a in lx
    )


def main(argv=None) -> int:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--sizes", default="25,50,100,200", help="target node counts, comma separated")
    ap.add_argument("--samples", type=int, default=8, help="networks per size")
    ap.add_argument("--seed", type=int, default=10_000)
    args = ap.parse_args(argv)
    sizes = [int(s) for s in args.sizes.split(",")]

    print(f"{'target':>7} {'nodes':>6} {'fc':>8} {'fp':>8} {'fl':>8} {'time':>8}")
    n_med, fp_med, fl_med = [], [], []
    for target in sizes:
        fcs, fps, fls, ns, times = [], [], [], [], []
        for s in range(args.samples):
            n = wgt_with_at_least(target, args.seed + 1000 * target + s)
            n2 = perturb(n, 4, 777 + s)
            for pair in ((n, n), (n, n2)):
                t0 = time.monotonic()
                _, stats = solve_with_stats(*pair)
                times.append(time.monotonic() - t0)
                fcs.append(stats.fc_entries)
                fps.append(max(stats.fp_entries, 1))
                fls.append(max(stats.fl_entries, 1))
                ns.append(len(n.succ))
        n_med.append(statistics.median(ns))
        fp_med.append(statistics.median(fps))
        fl_med.append(statistics.median(fls))
        print(
            f"{target:>7} {statistics.median(ns):>6.0f} {statistics.median(fcs):>8.0f} "
            f"{statistics.median(fps):>8.0f} {statistics.median(fls):>8.0f} "
            f"{max(times):>7.2f}s"
        )
    if len(sizes) >= 2:
        print(f"fp log-log slope: {loglog_slope(n_med, fp_med):.3f}")
        print(f"fl log-log slope: {loglog_slope(n_med, fl_med):.3f}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
