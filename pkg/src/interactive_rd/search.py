"""One-dimensional search for concave objectives."""
import math

INV_PHI = (math.sqrt(5.0) - 1.0) / 2.0


def golden_section_max(f, lo, hi, tol=1e-12, max_iter=200):
    """Maximize a unimodal ``f`` on [lo, hi] to abscissa tolerance ``tol``.

    Returns ``(x, f(x))`` for the best point evaluated, endpoints included,
    so maxima sitting on the boundary are found exactly.
    """
    if hi < lo:
        raise ValueError(f"empty bracket [{lo}, {hi}]")
    f_lo, f_hi = f(lo), f(hi)
    best_x, best_f = (lo, f_lo) if f_lo >= f_hi else (hi, f_hi)
    if hi - lo <= tol:
        return best_x, best_f

    a, b = lo, hi
    c = b - INV_PHI * (b - a)
    e = a + INV_PHI * (b - a)
    fc, fe = f(c), f(e)
    for _ in range(max_iter):
        if b - a <= tol:
            break
        if fc >= fe:
            b, e, fe = e, c, fc
            c = b - INV_PHI * (b - a)
            fc = f(c)
        else:
            a, c, fc = c, e, fe
            e = a + INV_PHI * (b - a)
            fe = f(e)
    for x, fx in ((c, fc), (e, fe)):
        if fx > best_f:
            best_x, best_f = x, fx
    return best_x, best_f
