"""When does the principal prefer one long contract over period-by-period
renegotiation?

With no discounting the long contract always wins: renegotiation keeps
resetting the agent's promise, which wastes the cheap late-delivery
channel. With an impatient agent the ranking can flip once the outside
option is expensive enough, because the long contract must compound the
reservation utility while fresh short contracts do not.
"""

from paysched import GridSpec, Model, compare_settings

GRID = GridSpec(y_max=8.0, n_y=200)
SCHEDULE = (0.0, 2.0, 4.0, 6.0, 8.0)


def row(k_a, r_a):
    m = Model(2.0, k_a, 10.0, r_a, 0.0, SCHEDULE)
    c = compare_settings(m, GRID)
    print("  %4.2f  %5.3f   %+9.5f  %+9.5f   %-13s (edge %+.4f)"
          % (k_a, r_a, c.initial.v_p, c.renegotiation.v_p, c.winner,
             c.difference))
    return c


def main():
    print("four payments on [0, 8]; initial contract vs renegotiation\n")
    print("  k_a   R_a    initial    renegot.   winner")
    for r_a in (0.0, 0.5, 0.909):
        row(0.0, r_a)
    print()
    for r_a in (0.0, 0.131, 0.2, 0.25, 0.4):
        row(0.4, r_a)

    print("\nwith k_a=0.4 the initial contract pays compounding interest on")
    print("the reservation utility, so its value falls in R_a much faster")
    print("than the renegotiated one; the winner flips between R_a=0.131")
    print("and R_a=0.25.")


if __name__ == "__main__":
    main()
