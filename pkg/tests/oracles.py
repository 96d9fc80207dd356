"""Independent reference computations shared by the unit and acceptance tests."""
import itertools

import numpy as np


def brute_force_dual(K, y, C):
    """Exact dual optimum by enumerating every (0, C, free) assignment of the multipliers.

    On each face the stationarity conditions plus the equality constraint form a
    linear system; the best feasible solution over all faces is the optimum of
    the concave QP. Returns ``(alpha, b, objective)``.
    """
    n = len(y)
    Q = (y[:, None] * y[None, :]) * K
    best = None
    for state in itertools.product((0, 1, 2), repeat=n):
        state = np.array(state)
        free = np.flatnonzero(state == 2)
        alpha = np.where(state == 1, C, 0.0)
        if free.size:
            fixed = state != 2
            m = np.zeros((free.size + 1, free.size + 1))
            m[:-1, :-1] = Q[np.ix_(free, free)]
            m[:-1, -1] = y[free]
            m[-1, :-1] = y[free]
            rhs = np.append(1 - Q[np.ix_(free, fixed)] @ alpha[fixed], -y[fixed] @ alpha[fixed])
            try:
                sol = np.linalg.solve(m, rhs)
            except np.linalg.LinAlgError:
                continue
            alpha[free] = sol[:-1]
            if np.any(alpha[free] <= 0) or np.any(alpha[free] >= C):
                continue
            b = sol[-1]
        elif abs(y @ alpha) > 1e-12:
            continue
        else:
            b = None
        obj = alpha.sum() - 0.5 * alpha @ Q @ alpha
        if best is None or obj > best[2] + 1e-12:
            best = (alpha, b, obj)
    alpha, b, obj = best
    if b is None:
        # every multiplier bounded: any b inside the interval allowed by the margins
        g = K @ (alpha * y)
        lower = ((y > 0) & (alpha == 0)) | ((y < 0) & (alpha == C))
        b = 0.5 * (np.max(y[lower] - g[lower], initial=-1e9) + np.min(y[~lower] - g[~lower], initial=1e9))
    return alpha, b, obj
