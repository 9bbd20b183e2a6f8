"""Certify a small instance over its entire configuration space.

Enumerates every initial configuration up to a distance cap, follows
every daemon choice from each of them, and confirms: no execution can
loop forever, the executions that stop are exactly the legitimate ones,
no step creates an alive abnormal root, and the longest execution stays
within the worst-case step bound.
"""

from stabtree import build_graph, certify_instance, component_info


def main():
    g = build_graph([(0, 1, 1), (1, 2, 2), (2, 0, 2)], 3, 0)
    d_cap = component_info(g).w_max * g.node_count

    result = certify_instance(g, d_cap)
    print(f"verdict:          {result.verdict}")
    print(f"initial configs:  {result.initial_configs}")
    print(f"reachable:        {result.reachable_count}")
    print(f"longest execution: {result.max_steps_any_path} steps (bound {result.step_limit})")
    for violation in result.violations:
        print(f"violation: {violation}")


if __name__ == "__main__":
    main()
