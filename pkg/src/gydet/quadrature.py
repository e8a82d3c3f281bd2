"""Vectorised adaptive Simpson quadrature and Gauss-Legendre nodes."""

import numpy as np

__all__ = ["adaptive_simpson", "gauss_legendre"]


def adaptive_simpson(f, a, b, tol=1e-9, panels=32, max_depth=40):
    """Integrate a vectorised function over ``[a, b]``.

    Panels are refined breadth-first: each round evaluates `f` once on all
    new points. A panel is accepted when the two-half Simpson estimate
    differs from the whole-panel one by at most ``15 * tol_panel``; the
    Richardson-corrected value is kept.

    Parameters
    ----------
    f : callable
        Maps an ndarray of abscissae to an ndarray of values.
    a, b : float
        Integration limits.
    tol : float
        Mixed tolerance: the target absolute error is
        ``tol * max(1, |I|)`` with ``I`` a first coarse estimate.
    panels : int
        Number of initial panels.
    max_depth : int
        Maximum number of halvings of any panel.

    Returns
    -------
    float
    """
    if b == a:
        return 0.0
    edges = np.linspace(a, b, panels + 1)
    lo, hi = edges[:-1], edges[1:]
    mid = 0.5 * (lo + hi)
    f_all = f(np.concatenate([edges, mid]))
    f_lo, f_hi = f_all[: panels], f_all[1 : panels + 1]
    f_mid = f_all[panels + 1 :]
    whole = (hi - lo) / 6.0 * (f_lo + 4.0 * f_mid + f_hi)
    estimate = float(np.sum(whole))
    target = tol * max(1.0, abs(estimate))
    tol_panel = np.full(panels, target / panels)

    total = 0.0
    for depth in range(max_depth + 1):
        q_lo = 0.5 * (lo + mid)
        q_hi = 0.5 * (mid + hi)
        fq = f(np.concatenate([q_lo, q_hi]))
        fq_lo, fq_hi = fq[: len(lo)], fq[len(lo) :]
        half = (hi - lo) / 12.0
        left = half * (f_lo + 4.0 * fq_lo + f_mid)
        right = half * (f_mid + 4.0 * fq_hi + f_hi)
        diff = left + right - whole
        done = np.abs(diff) <= 15.0 * tol_panel
        if depth == max_depth:
            done[:] = True
        total += float(np.sum(left[done] + right[done] + diff[done] / 15.0))
        keep = ~done
        if not np.any(keep):
            break
        # split each unfinished panel into its two halves
        lo, mid, hi = (
            np.concatenate([lo[keep], mid[keep]]),
            np.concatenate([q_lo[keep], q_hi[keep]]),
            np.concatenate([mid[keep], hi[keep]]),
        )
        f_lo, f_mid, f_hi = (
            np.concatenate([f_lo[keep], f_mid[keep]]),
            np.concatenate([fq_lo[keep], fq_hi[keep]]),
            np.concatenate([f_mid[keep], f_hi[keep]]),
        )
        whole = np.concatenate([left[keep], right[keep]])
        tol_panel = np.concatenate([tol_panel[keep], tol_panel[keep]]) / 2.0
    return total


def gauss_legendre(n, a=0.0, b=1.0):
    """Gauss-Legendre nodes and weights mapped to ``[a, b]``."""
    x, w = np.polynomial.legendre.leggauss(n)
    half = 0.5 * (b - a)
    return a + half * (x + 1.0), half * w
