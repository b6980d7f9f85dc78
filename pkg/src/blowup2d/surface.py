"""Blow-up-surface geometry: pyramid bounds, flatness fits, cone margins.

The crossing-time field of a four-soliton run approximates the graph
x -> T(x) of per-point blow-up times.  To leading order that graph is a
pyramid T(x) = T(0) - max(|x_1|, |x_2|) with a logarithmic flatness
correction along each face,

    T(x) = T(0) - x_1 (1 - C0 |log x_1|^(-(p-1)/2))    (0 <= x_2 < x_1),

edges on the bisectrices |x_1| = |x_2| and an apex at the origin.  This
module turns a raw crossing-time array into a ``SurfaceField`` on the
first quadrant (the wedge 0 <= x_2 <= x_1 is the canonical domain; the
mirror half is kept so centred stencils and cross-bisectrix sampling
stay trivial) and provides the geometric diagnostics:

* ``pyramid_check`` -- the two-sided bound -|x| <= T(x) - T(0)
  <= -(1-eps) max(|x_1|, |x_2|) on an annulus, reported per point;
* ``fit_flatness`` -- no-intercept least squares of
  (T(x)-T(0)+x_1)/x_1 against |log x_1|^(-(p-1)/2) on near-axis points;
* ``nonchar_margin`` -- the discrete cone margin
  sup_x (T(x0)-T(x))/|x-x0|, with a three-valued classification
  {noncharacteristic, suspect, undetermined}.  A margin close to 1
  means some direction exhausts the light cone (the origin, where the
  solution is characteristic); a margin clearly below 1 certifies a
  spacelike surface around x0.  Distinguishing margin = 1 from
  margin = 1 - O(1/log) at step h is only possible for pairs further
  apart than the noise scale, so the "suspect" band has half-width
  2h / min|x - x0| and the raw classification is deliberately
  three-valued;
* ``bisectrix_derivatives`` -- one-sided slopes across the pyramid
  edge: anchored difference quotients from each side of the bisectrix
  with one Richardson step.  For a direction omega with
  omega_2 > omega_1 the slope from the {x_2 < x_1} side follows the
  x_1-face (weight omega_1) and the other side the x_2-face (weight
  omega_2); their gap is the edge kink.

Solver fields need two repairs before any of this.  The evolution is
anti-symmetric across the bisectrices, so cells on them hold u = 0
identically and pointwise detectors never fire there, although T is
finite and continuous across the edge; cells next to the line carry
amplitudes suppressed by the odd symmetry and cross the detection
ceiling late.  ``from_run`` therefore masks a band |x_1 - x_2| <=
band_cells * h and refills it by iterated four-neighbour averaging
(cross-band interpolation of a continuous surface).  Second, the apex
time T(0) is not directly measurable (the origin sits inside the
masked band): it is estimated as the intercept of an affine fit of T
against max(|x_1|, |x_2|) over face cells in a shell window, before
any inpainting.  Checks that compare T - T(0) against cones inherit
the uncertainty of that intercept (about 1e-2 at N = 256); the margin
at the origin is the diagnostic most exposed to it.

Every constructed field is checked against the finite-propagation-speed
constraint |T(x) - T(x')| <= |x - x'| + tol * h over neighbour pairs
(the additive term absorbs crossing-time noise and inpainting error).
"""

import math

import numpy as np

from .errors import DomainError

LABELS = ("noncharacteristic", "suspect", "undetermined")
POINT_HEADER = ("x1", "x2", "T", "grad1", "grad2", "margin", "classification")


class SurfaceField:
    """Blow-up times on a uniform first-quadrant grid (NaN = no blow-up).

    ``x`` is the shared 1-D coordinate axis, ``T`` the (n, n) array over
    ``meshgrid(x, x, indexing='ij')`` and ``t_origin`` the apex time used
    to normalise cone comparisons.  Construction verifies the Lipschitz
    invariant and fails with :class:`DomainError` if it is violated.
    """

    def __init__(self, x, T, t_origin, lip_tol=0.5):
        x = np.asarray(x, dtype=float)
        T = np.array(T, dtype=float)
        if x.ndim != 1 or x.size < 5:
            raise DomainError("coordinate axis must be 1-D with >= 5 nodes")
        if T.shape != (x.size, x.size):
            raise DomainError("T must be square over the coordinate axis")
        steps = np.diff(x)
        if np.any(steps <= 0) or np.ptp(steps) > 1e-9 * steps[0]:
            raise DomainError("coordinate axis must be uniform and increasing")
        if x[0] < -1e-12:
            raise DomainError("quadrant grid needs x >= 0")
        self.x = x
        self.T = T
        self.h = float(steps[0])
        self.t_origin = float(t_origin)
        self.x1, self.x2 = np.meshgrid(x, x, indexing="ij")
        self.margin = np.full(T.shape, np.nan)
        self.classification = np.full(T.shape, "", dtype="<U20")
        self.lipschitz = lipschitz_check(self, tol=lip_tol)
        if not self.lipschitz["ok"]:
            raise DomainError(
                "Lipschitz invariant violated: neighbour excess "
                f"{self.lipschitz['worst_excess']:.3g} h exceeds the "
                f"tolerance {lip_tol:g} h")

    @property
    def wedge(self):
        """Mask of the canonical wedge 0 <= x2 <= x1."""
        return self.x2 <= self.x1 + 1e-12

    def value(self, pt):
        """Bilinear value of T at an off-grid point inside the hull."""
        p0, p1 = float(pt[0]), float(pt[1])
        if not (self.x[0] <= p0 <= self.x[-1]
                and self.x[0] <= p1 <= self.x[-1]):
            raise DomainError(
                f"stencil point ({p0:.4g}, {p1:.4g}) leaves the grid hull")
        i = int(np.clip(np.searchsorted(self.x, p0) - 1, 0, self.x.size - 2))
        j = int(np.clip(np.searchsorted(self.x, p1) - 1, 0, self.x.size - 2))
        tx = (p0 - self.x[i]) / self.h
        ty = (p1 - self.x[j]) / self.h
        v = (self.T[i, j] * (1 - tx) * (1 - ty)
             + self.T[i + 1, j] * tx * (1 - ty)
             + self.T[i, j + 1] * (1 - tx) * ty
             + self.T[i + 1, j + 1] * tx * ty)
        if not np.isfinite(v):
            raise DomainError(
                f"stencil point ({p0:.4g}, {p1:.4g}) touches unpopulated "
                "cells")
        return float(v)

    def gradient(self):
        """(dT/dx1, dT/dx2) by centred differences (one-sided at edges)."""
        g1 = np.gradient(self.T, self.x, axis=0, edge_order=1)
        g2 = np.gradient(self.T, self.x, axis=1, edge_order=1)
        return g1, g2


def from_model(fn, n=51, x_max=0.5, t_origin=None, lip_tol=0.5):
    """Sample a model surface fn(x1, x2) on a node-centred quadrant grid."""
    if n < 5:
        raise DomainError("model grid needs n >= 5")
    ax = np.linspace(0.0, float(x_max), int(n))
    X1, X2 = np.meshgrid(ax, ax, indexing="ij")
    T = np.asarray(fn(X1, X2), dtype=float)
    if t_origin is None:
        t_origin = float(fn(np.zeros(1), np.zeros(1))[0])
    return SurfaceField(ax, T, t_origin, lip_tol=lip_tol)


def from_run(f, x_max=0.5, band_cells=2, fit_window=(0.05, 0.2),
             t_origin=None, t0_tol=None, lip_tol=0.5, fill_iters=64):
    """Build a SurfaceField from a solver crossing-time array.

    ``f`` duck-types the solver state (``freeze_t``, ``x``, ``h``, ``N``).
    The four quadrants are folded onto the first by mirror averaging,
    the suppressed-amplitude bisectrix band |x1 - x2| <= band_cells * h
    is discarded, the apex time is fitted as the intercept of
    T ~ t0 + slope * max(x1, x2) over face cells with max(x1, x2) in
    ``fit_window``, and the band is refilled by iterated neighbour
    averaging.  An explicit ``t_origin`` overrides the fitted apex but
    must agree with it within ``t0_tol`` (default 5 h).
    """
    Tfull = np.asarray(f.freeze_t, dtype=float)
    N = Tfull.shape[0]
    if N % 2:
        raise DomainError("folding needs an even grid (cell-centred axes)")
    half = N // 2
    stack = np.stack([Tfull[half:, half:], Tfull[half - 1::-1, half:],
                      Tfull[half:, half - 1::-1],
                      Tfull[half - 1::-1, half - 1::-1]])
    cnt = np.isfinite(stack).sum(axis=0)
    quad = np.where(cnt > 0,
                    np.nansum(np.where(np.isfinite(stack), stack, 0.0),
                              axis=0) / np.maximum(cnt, 1), np.nan)
    qx = np.asarray(f.x, dtype=float)[half:]
    keep = qx <= float(x_max) + 1e-12
    if keep.sum() < 5:
        raise DomainError(f"x_max = {x_max:g} keeps fewer than 5 cells")
    quad = quad[np.ix_(keep, keep)]
    qx = qx[keep]
    h = float(f.h)

    X1, X2 = np.meshgrid(qx, qx, indexing="ij")
    band = np.abs(X1 - X2) <= band_cells * h + 1e-12
    quad[band] = np.nan

    mx = np.maximum(X1, X2)
    sel = np.isfinite(quad) & (mx >= fit_window[0]) & (mx <= fit_window[1])
    if sel.sum() < 5:
        raise DomainError(
            f"apex fit window {fit_window} holds {int(sel.sum())} face "
            "cells; need >= 5")
    A = np.c_[np.ones(int(sel.sum())), mx[sel]]
    (t0_fit, slope_fit), *_ = np.linalg.lstsq(A, quad[sel], rcond=None)
    fit_rms = float(np.sqrt(np.mean((A @ [t0_fit, slope_fit]
                                     - quad[sel]) ** 2)))
    if t_origin is None:
        t_origin = float(t0_fit)
    else:
        tol = 5.0 * h if t0_tol is None else float(t0_tol)
        if abs(t_origin - t0_fit) > tol:
            raise DomainError(
                f"nominal apex time {t_origin:.6g} is {abs(t_origin - t0_fit):.3g} "
                f"away from the fitted intercept {t0_fit:.6g} (tol {tol:.3g})")

    quad, n_filled = inpaint(quad, max_iters=fill_iters)

    S = SurfaceField(qx, quad, t_origin, lip_tol=lip_tol)
    S.slope_fit = float(slope_fit)
    S.t0_fit = float(t0_fit)
    S.fit_rms = fit_rms
    S.n_filled = int(n_filled)
    S.n_unfilled = int((~np.isfinite(quad)).sum())
    return S


def inpaint(T, max_iters=64):
    """Fill NaN cells that touch >= 2 finite four-neighbours, iterated.

    Jacobi-style simultaneous updates keep the fill symmetric; cells in
    regions with no finite support within ``max_iters`` layers stay NaN.
    Returns ``(filled, n_filled)``.
    """
    T = np.array(T, dtype=float)
    n_filled = 0
    for _ in range(int(max_iters)):
        bad = ~np.isfinite(T)
        if not bad.any():
            break
        pad = np.pad(T, 1, constant_values=np.nan)
        stack = np.stack([pad[2:, 1:-1], pad[:-2, 1:-1],
                          pad[1:-1, 2:], pad[1:-1, :-2]])
        cnt = np.isfinite(stack).sum(axis=0)
        mean = (np.nansum(np.where(np.isfinite(stack), stack, 0.0), axis=0)
                / np.maximum(cnt, 1))
        newly = bad & (cnt >= 2)
        if not newly.any():
            break
        T[newly] = mean[newly]
        n_filled += int(newly.sum())
    return T, n_filled


def lipschitz_check(S, tol=0.5):
    """Finite-speed check |dT| <= |dx| + tol * h over neighbour pairs."""
    T = S.T
    h = S.h
    worst = -math.inf
    n_pairs = 0
    for di, dj in ((1, 0), (0, 1), (1, 1), (1, -1)):
        a = T[max(di, 0):T.shape[0] + min(di, 0),
              max(dj, 0):T.shape[1] + min(dj, 0)]
        b = T[max(-di, 0):T.shape[0] + min(-di, 0),
              max(-dj, 0):T.shape[1] + min(-dj, 0)]
        dist = math.hypot(di, dj) * h
        dT = np.abs(a - b)
        ok = np.isfinite(dT)
        n_pairs += int(ok.sum())
        if ok.any():
            worst = max(worst, (float(np.max(dT[ok])) - dist) / h)
    if n_pairs == 0:
        worst = 0.0
    return {"ok": worst <= tol, "tol": float(tol),
            "worst_excess": float(worst), "n_pairs": n_pairs}


def pyramid_check(S, eps, r_inner=0.05, r_outer=0.1):
    """Two-sided pyramid bound on the annulus r_inner <= |x| <= r_outer.

    With T normalised so the apex sits at 0, checks per point
    ``-|x| <= T(x)`` (finite speed from the apex) and
    ``T(x) <= -(1-eps) max(|x1|, |x2|)`` (blow-up no later than the
    eps-shrunk pyramid).  Returns a report with per-point booleans and
    aggregate pass fractions.
    """
    if not 0.0 <= eps < 1.0:
        raise DomainError("eps must lie in [0, 1)")
    rr = np.hypot(S.x1, S.x2)
    mx = np.maximum(S.x1, S.x2)
    ann = np.isfinite(S.T) & (rr >= r_inner) & (rr <= r_outer)
    if not ann.any():
        raise DomainError(
            f"coverage: no populated points in the annulus "
            f"[{r_inner:g}, {r_outer:g}]")
    Tn = S.T[ann] - S.t_origin
    slack = 1e-12 * max(1.0, float(np.max(np.abs(Tn))))
    lower_ok = Tn >= -rr[ann] - slack
    upper_ok = Tn <= -(1.0 - eps) * mx[ann] + slack
    return {"eps": float(eps), "r_inner": float(r_inner),
            "r_outer": float(r_outer), "n_points": int(ann.sum()),
            "lower_fraction": float(lower_ok.mean()),
            "upper_fraction": float(upper_ok.mean()),
            "pass_fraction": float((lower_ok & upper_ok).mean()),
            "points": np.c_[S.x1[ann], S.x2[ann]],
            "lower_ok": lower_ok, "upper_ok": upper_ok}


def fit_flatness(S, c, x_lo=0.03, x_hi=0.3):
    """No-intercept fit of the face flatness correction on axis points.

    Regresses z = (T(x1, x2_min) - T(0) + x1) / x1 against
    q = |log x1|^(-(p-1)/2) over x1 in [x_lo, x_hi]; returns
    ``(C0_hat, fit_residual)`` with the rms misfit of z - C0_hat * q.
    The z values divide by x1, so the estimate inherits the apex-time
    uncertainty amplified by 1/x_lo; keep x_lo well above h.
    """
    row = S.T[:, 0]
    sel = np.isfinite(row) & (S.x >= x_lo) & (S.x <= x_hi) & (S.x > 0)
    if sel.sum() < 5:
        raise DomainError(
            f"flatness fit has {int(sel.sum())} axis points in "
            f"[{x_lo:g}, {x_hi:g}]; need >= 5")
    x1 = S.x[sel]
    q = np.abs(np.log(x1)) ** (-c.gamma)
    z = (row[sel] - S.t_origin + x1) / x1
    c0_hat = float(q @ z / (q @ q))
    resid = float(np.sqrt(np.mean((z - c0_hat * q) ** 2)))
    return c0_hat, resid


def _resolve_x0(S, x0):
    """Fold x0 into the quadrant and return (x0, T(x0)); origin allowed."""
    p = np.abs(np.asarray(x0, dtype=float).reshape(2))
    if p[0] == 0.0 and p[1] == 0.0:
        return p, S.t_origin
    i = int(np.argmin(np.abs(S.x - p[0])))
    j = int(np.argmin(np.abs(S.x - p[1])))
    if (abs(S.x[i] - p[0]) > 1e-9 * (1.0 + p[0])
            or abs(S.x[j] - p[1]) > 1e-9 * (1.0 + p[1])):
        raise DomainError(
            f"x0 = ({x0[0]:.6g}, {x0[1]:.6g}) is neither a grid point nor "
            "the origin")
    v = S.T[i, j]
    if not np.isfinite(v):
        raise DomainError(f"x0 = ({x0[0]:.6g}, {x0[1]:.6g}) is unpopulated")
    return p, float(v)


def nonchar_margin(S, x0, min_sep=0.0):
    """Discrete cone margin sup_x (T(x0) - T(x)) / |x - x0|.

    Pairs closer than ``min_sep`` are excluded; the classification band
    around 1 scales like 2h / min_sep, so larger separations sharpen
    the verdict at the cost of locality.  x0 must be a grid point or
    the origin (whose time is ``t_origin``); it is folded into the
    quadrant first, which leaves the margin unchanged for the
    symmetric fields produced here.
    """
    margin, _, _ = _margin_arg(S, x0, min_sep)
    return margin


def _margin_arg(S, x0, min_sep):
    p, v0 = _resolve_x0(S, x0)
    D = np.hypot(S.x1 - p[0], S.x2 - p[1])
    ok = np.isfinite(S.T) & (D > max(float(min_sep), 1e-12))
    if not ok.any():
        raise DomainError("no admissible pairs for the margin sup")
    q = (v0 - S.T[ok]) / D[ok]
    k = int(np.argmax(q))
    at = (float(S.x1[ok][k]), float(S.x2[ok][k]))
    return float(q[k]), at, float(D[ok][k])


def margin_report(S, x0, min_sep=0.0, delta0=0.1):
    """Margin plus maximising pair, suspect band and three-way label."""
    margin, at, dist = _margin_arg(S, x0, min_sep)
    band = 2.0 * S.h / max(float(min_sep), S.h)
    return {"x0": (float(x0[0]), float(x0[1])), "margin": margin,
            "arg_x": at, "arg_distance": dist, "band": band,
            "label": _label(margin, band, delta0)}


def _label(margin, band, delta0):
    if not 0.0 < delta0 < 1.0:
        raise DomainError("delta0 must lie in (0, 1)")
    if margin >= 1.0 - band:
        return "suspect"
    if margin <= 1.0 - delta0:
        return "noncharacteristic"
    return "undetermined"


def classify(S, delta0=0.1, min_sep=None):
    """Fill per-point margins and labels over the populated grid.

    ``min_sep`` defaults to 8 h (band 0.25).  The loop is a sup over
    the whole field per point; points are independent, so the work is
    batched row-wise through numpy.
    """
    if min_sep is None:
        min_sep = 8.0 * S.h
    band = 2.0 * S.h / max(float(min_sep), S.h)
    _label(0.0, band, delta0)  # validate delta0 once
    pts = np.isfinite(S.T)
    flat_x1 = S.x1[pts]
    flat_x2 = S.x2[pts]
    flat_T = S.T[pts]
    margin = np.full(S.T.shape, np.nan)
    labels = np.full(S.T.shape, "", dtype="<U20")
    idx = np.argwhere(pts)
    for i, j in idx:
        D = np.hypot(flat_x1 - S.x1[i, j], flat_x2 - S.x2[i, j])
        ok = D > max(float(min_sep), 1e-12)
        if not ok.any():
            continue
        m = float(np.max((S.T[i, j] - flat_T[ok]) / D[ok]))
        margin[i, j] = m
        labels[i, j] = _label(m, band, delta0)
    S.margin = margin
    S.classification = labels
    return labels


def bisectrix_derivatives(S, x0, omega, step=None):
    """One-sided slopes of T at a bisectrix point along omega.

    Richardson-refined anchored quotients
    ``2 (T(x0 + t w) - T(x0)) / t - (T(x0 + 2t w) - T(x0)) / 2t`` with
    the sign of t chosen to keep samples on one side of the bisectrix:
    ``left`` uses the {x2 > x1} side, ``right`` the {x2 < x1} side.
    The base step defaults to max(3h, 2 sqrt(2) h / |w1 - w2|) so the
    far samples clear the edge by at least two cells.
    """
    x0 = np.asarray(x0, dtype=float).reshape(2)
    if abs(x0[0] - x0[1]) > 1e-9 * (1.0 + abs(x0[0])):
        raise DomainError(
            f"x0 = ({x0[0]:.6g}, {x0[1]:.6g}) is not on the bisectrix")
    w = np.asarray(omega, dtype=float).reshape(2)
    nw = math.hypot(w[0], w[1])
    if nw == 0.0:
        raise DomainError("omega must be a nonzero direction")
    w = w / nw
    cross = w[1] - w[0]
    if abs(cross) < 1e-9:
        raise DomainError("omega is parallel to the bisectrix")
    if step is None:
        step = max(3.0 * S.h, 2.0 * math.sqrt(2.0) * S.h / abs(cross))
    v0 = S.value(x0)
    side = math.copysign(1.0, cross)
    out = []
    for sgn in (+1.0, -1.0):  # +: left side {x2 > x1}, -: right side
        slopes = []
        for t in (sgn * side * step, 2.0 * sgn * side * step):
            v = S.value(x0 + t * w)
            slopes.append((v - v0) / t)
        out.append(2.0 * slopes[0] - slopes[1])
    return out[0], out[1]


def point_table(S):
    """Per-point rows (wedge only) for the CSV report."""
    g1, g2 = S.gradient()
    rows = []
    sel = S.wedge & np.isfinite(S.T)
    for i, j in np.argwhere(sel):
        rows.append((float(S.x1[i, j]), float(S.x2[i, j]),
                     float(S.T[i, j]), float(g1[i, j]), float(g2[i, j]),
                     float(S.margin[i, j]),
                     S.classification[i, j] or "unclassified"))
    return rows
