"""One-dimensional golden-section maximization."""

import math

INV_PHI = (math.sqrt(5.0) - 1.0) / 2.0


def golden_section_max(f, lo, hi, tol=1e-10, max_iter=500):
    """Maximize a unimodal ``f`` on ``[lo, hi]``.

    Shrinks the bracket until its width is at most ``tol``.  The endpoints are
    evaluated too, so a maximum sitting on the boundary is returned exactly.

    Returns ``(x, f(x), evaluations, width)``.
    """
    if not hi > lo:
        raise ValueError(f"empty interval [{lo}, {hi}]")
    if not tol > 0:
        raise ValueError("tol must be positive")
    a, b = float(lo), float(hi)
    c = b - INV_PHI * (b - a)
    d = a + INV_PHI * (b - a)
    fc, fd = f(c), f(d)
    n = 2
    for _ in range(max_iter):
        if b - a <= tol:
            break
        if fc >= fd:
            b, d, fd = d, c, fc
            c = b - INV_PHI * (b - a)
            fc = f(c)
        else:
            a, c, fc = c, d, fd
            d = a + INV_PHI * (b - a)
            fd = f(d)
        n += 1
    candidates = [(fc, c), (fd, d), (f(lo), float(lo)), (f(hi), float(hi))]
    n += 2
    fx, x = max(candidates, key=lambda t: t[0])
    return x, fx, n, b - a
