"""How splitting one payment into a schedule changes the contract.

Solves a four-payment schedule, prints the payment maps (how much promised
utility is settled at each date), the employment and truncation
diagnostics, and then shows the profit gain from paying more often on the
same horizon.
"""

import numpy as np

from paysched import (GridSpec, Model, employment_interval, principal_value,
                      solve_initial, truncation_region)

GRID = GridSpec(y_max=4.0, n_y=100)


def payment_table(solution):
    grid = solution.grid
    print("  y     " + "".join("  eta_%d*  " % l.index for l in solution.layers))
    for y_probe in (0.25, 0.5, 1.0, 1.5, 2.0, 3.0):
        j = int(round(y_probe / grid.dy))
        row = "  %-5g" % grid.nodes[j]
        for layer in solution.layers:
            row += "  %7.4f" % layer.eta_star[j]
        print(row)


def main():
    model = Model(gamma=2.0, k_a=0.2, K=10.0, R_a=0.5, x0=0.0,
                  schedule=(0.0, 1.0, 2.0, 3.0, 4.0))
    solution = solve_initial(model, GRID)
    print("schedule:", model.schedule)

    print("\nminimal payment maps (utility settled at each date):")
    payment_table(solution)

    print("\nper-date diagnostics:")
    for i in range(1, solution.n_periods):
        e = employment_interval(solution, i)
        t = truncation_region(solution, i)
        y = solution.grid.nodes
        t_hi = y[t].max() if t.any() else float("nan")
        print("  date %d: employment nodes %3d / %d, no payment below y=%.3f"
              % (i, int(e.sum()), e.size, t_hi))

    # same horizon, more payment dates
    print("\nprofit vs number of payments (T=4, R_a=%g):" % model.R_a)
    base = None
    for n in (1, 2, 4, 8):
        sched = tuple(i * 4.0 / n for i in range(n + 1))
        m = Model(2.0, model.k_a, model.K, model.R_a, 0.0, sched)
        rep = principal_value(solve_initial(m, GRID))
        gain = "" if base is None else "  (%+.4f)" % (rep.v_p - base)
        base = rep.v_p if base is None else base
        print("  N=%-2d  V_p = %+.6f%s" % (n, rep.v_p, gain))


if __name__ == "__main__":
    main()
