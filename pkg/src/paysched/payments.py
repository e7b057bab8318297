"""Payment insertion between periods.

At a payment date the principal hands the agent a lump sum eta (in promised
utility units), paying its monetary cost eta**gamma, and the continuation
state drops to y - eta.  Stitching the next period's start slice v_next into
the current period's terminal slice therefore takes

    f(y) = max over eta in [0, y] of  -eta**gamma + v_next(y - eta)

together with the smallest maximizer eta*(y); ties below a fixed tolerance
resolve to the least eta, so a flat stretch of the objective never inflates
the payment.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .hjb import GridFunction

TIE_TOL = 1e-10


@dataclass
class PaymentLayer:
    """Post-payment value f and minimal maximizer eta* on the y-grid."""

    f: GridFunction
    eta_star: np.ndarray
    index: int


def intermediate_value(v_next: GridFunction, gamma: float, refine: int = 4,
                       index: int = 0) -> PaymentLayer:
    """Maximize -eta**gamma + v_next(y - eta) over eta in [0, y] per node.

    The eta search grid steps at dy / refine so maximizers between nodes
    are not missed; v_next is linearly interpolated off-node.  refine >= 1.
    """
    if gamma <= 1.0:
        raise ValueError("gamma must exceed 1")
    if refine < 1:
        raise ValueError("refine must be at least 1")
    vals = v_next.values
    if abs(vals[0]) > 1e-12:
        raise ValueError("continuation slice must vanish at y = 0")
    n = vals.size
    dy = v_next.dy
    y = v_next.y

    h = dy / refine
    n_eta = (n - 1) * refine + 1
    eta = h * np.arange(n_eta)

    # objective matrix: rows are y-nodes, columns eta candidates; eta > y masked
    rest = y[:, None] - eta[None, :]
    valid = rest >= -1e-12
    cont = np.interp(np.clip(rest, 0.0, y[-1]), y, vals)
    g = np.where(valid, -(eta[None, :] ** gamma) + cont, -np.inf)

    gmax = g.max(axis=1)
    # smallest eta within TIE_TOL of the max
    hit = g >= gmax[:, None] - TIE_TOL
    first = hit.argmax(axis=1)
    eta_star = eta[first]

    f_vals = gmax.copy()
    f_vals[0] = 0.0
    eta_star = eta_star.copy()
    eta_star[0] = 0.0
    return PaymentLayer(GridFunction(f_vals, dy), eta_star, index)
