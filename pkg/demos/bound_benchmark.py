"""Measure how close real executions get to the worst-case bounds.

Sweeps a seeded corpus of random weighted graphs under five schedulers
and reports the observed step and round counts as fractions of the
theoretical limits. The ratios stay far below 1: the bounds are loose in
practice, tight only for adversarially crafted instances.
"""

from collections import defaultdict

from stabtree.cli import bench_corpus

DAEMONS = ["sync", "central", "rand:p=0.5", "adv:starve", "adv:churn"]


def main():
    runs = bench_corpus(count=200, seed=11, daemons=DAEMONS)
    print(f"{len(runs)} runs, {sum(bool(r.failures) for r in runs)} check failures\n")

    by_daemon = defaultdict(list)
    for r in runs:
        by_daemon[r.daemon].append(r)

    print(f"{'daemon':<12} {'avg steps':>10} {'max steps/limit':>16} {'max rounds/limit':>17}")
    for daemon in DAEMONS:
        rs = by_daemon[daemon]
        avg = sum(r.steps for r in rs) / len(rs)
        step_ratio = max(r.steps / r.step_limit for r in rs)
        round_ratio = max(r.rounds / r.round_limit for r in rs)
        print(f"{daemon:<12} {avg:>10.1f} {step_ratio:>16.3f} {round_ratio:>17.3f}")


if __name__ == "__main__":
    main()
