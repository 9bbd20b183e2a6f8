"""Walk through one execution from a normal start.

Builds a small weighted graph, starts every non-root process isolated,
lets the synchronous daemon drive the protocol to termination, and prints
each configuration along the way.
"""

from stabtree import (
    build_graph,
    legitimate_config,
    normal_initial_configuration,
    root_distances,
    run,
    synchronous_daemon,
)


def show(config, label):
    cells = ", ".join(
        f"{u}:({s.status.value} par={s.par} d={s.d})" for u, s in enumerate(config)
    )
    print(f"{label}: {cells}")


def main():
    # r(0) --1-- a(1) --2-- b(2), plus a shortcut r --4-- b.
    g = build_graph([(0, 1, 1), (1, 2, 2), (0, 2, 4)], 3, 0)
    print("true distances:", root_distances(g))

    config = normal_initial_configuration(g)
    show(config, "start")

    trace = run(config, g, synchronous_daemon())
    for i, record in enumerate(trace.steps):
        fired = {u: r.value for u, r in record.fired.items()}
        print(f"step {i}: fired {fired}")
        show(trace.configs[i + 1], f"  config {i + 1}")

    report = legitimate_config(trace.final, g)
    print(f"terminated in {trace.step_count} steps; legitimate: {report.config_legitimate}")


if __name__ == "__main__":
    main()
