"""Linearised similarity flow around a boosted soliton.

First-order formulation.  Writing the similarity flow on pairs
w = (w1, w2), the vector field is

    d/ds (w1, w2) = (w2,  L w1 - 2(p+1)/(p-1)^2 w1 + |w1|^(p-1) w1
                          - (p+3)/(p-1) w2 - 2 y . grad w2),

where, in polar coordinates,

    L v = (1 - r^2) v_rr + (1/r - 2(p+1) r / (p-1)) v_r + v_thth / r^2.

Each kappa(d, .) is a stationary state: L kappa - 2(p+1)/(p-1)^2 kappa
+ kappa^p = 0.  Linearising at kappa(D, .) gives

    L_D (q1, q2) = (q2,  L q1 + psi q1 - (p+3)/(p-1) q2 - 2 y . grad q2),
    psi(D, y) = p kappa(D, y)^(p-1) - 2 (p+1)/(p-1)^2.

Unstable/neutral spectrum.  With t = 1 + D . y, P = (p+1)/(p-1), e the
unit vector along D (e = e1 when D = 0) and e_perp its quarter turn,
L_D has exactly one unstable and two neutral explicit eigenpairs:

    F0 = (1-|D|^2)^(p/(p-1))  t^(-P) (1, 1)            eigenvalue 1,
    F1 = (1-|D|^2)^(1/(p-1))  (e.y + |D|) t^(-P) (1, 0) eigenvalue 0,
    F2 = (1-|D|^2)^(P/2)      (e_perp.y)  t^(-P) (1, 0) eigenvalue 0,

corresponding to dilation/shift of the blow-up point and the two
components of the boost.  The dual family needs only its second
components, which are explicit:

    W_{l,2} = c_l ((1 - |y|^2) / (1 - |D|^2))^{lambda_l} F_{l,1},

and the pairing can be evaluated without solving any elliptic problem:

    Pi_l(q) = int [ (lambda_l - (p+3)/(p-1)) W_{l,2} - 2 y . grad W_{l,2} ] q1 rho
              + 4 alpha int W_{l,2} q1 rho / (1 - |y|^2)
              + int W_{l,2} q2 rho.

The constants c_l are calibrated so that Pi_l(F_l) = 1; then
Pi_l(F_m) = delta_lm.  The radial factors y . grad W_{l,2} are coded in
closed form (y . grad t = t - 1, y . grad r^2 = 2 r^2), keeping the
projector free of finite-difference error.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from blowup2d.errors import DomainError
from blowup2d.solitons import kappa

__all__ = ["apply_L", "linearized_apply", "stationary_residual",
           "EigenSet", "project"]


def apply_L(grid, v):
    """The degenerate elliptic operator L on a scalar grid field."""
    p = grid.p
    v_r = grid.dr(v)
    v_rr = grid.dr(v, 2)
    v_tt = grid.dtheta(v, 2)
    r = grid.rr
    return ((1.0 - r**2) * v_rr
            + (1.0 / r - 2.0 * (p + 1.0) / (p - 1.0) * r) * v_r
            + v_tt / r**2)


def stationary_residual(grid, d):
    """Relative residual of kappa(d, .) in the stationary equation.

    Returns ||L k - 2(p+1)/(p-1)^2 k + k^p||_rho / ||k^p||_rho.
    """
    p = grid.p
    k = kappa(d, grid.y1, grid.y2, p)
    res = apply_L(grid, k) - 2.0 * (p + 1.0) / (p - 1.0) ** 2 * k + k**p
    return float(np.sqrt(grid.quad(res**2) / grid.quad(k ** (2.0 * p))))


def linearized_apply(grid, D, pair):
    """Apply the linearisation L_D at kappa(D, .) to a pair (q1, q2)."""
    p = grid.p
    q1, q2 = pair
    psi = p * kappa(D, grid.y1, grid.y2, p) ** (p - 1.0) \
        - 2.0 * (p + 1.0) / (p - 1.0) ** 2
    out2 = (apply_L(grid, q1) + psi * q1
            - (p + 3.0) / (p - 1.0) * q2
            - 2.0 * grid.rr * grid.dr(q2))
    return q2, out2


@dataclass
class EigenSet:
    """Explicit eigenpairs of L_D and calibrated dual projector data."""

    D: np.ndarray
    p: float
    eigenvalues: tuple
    pairs: list          # [(F_l1, F_l2)] for l = 0, 1, 2
    duals: list          # W_{l,2} scalar fields (calibrated)
    duals_ygrad: list    # y . grad W_{l,2}, closed form (calibrated)

    @classmethod
    def build(cls, grid, D):
        D = np.asarray(D, dtype=float).reshape(2)
        dd = float(np.hypot(D[0], D[1]))
        if not dd < 1.0:
            raise DomainError(f"eigenset needs |D| < 1, got {D}")
        p = grid.p
        P = (p + 1.0) / (p - 1.0)
        e = D / dd if dd > 0.0 else np.array([1.0, 0.0])
        ey = e[0] * grid.y1 + e[1] * grid.y2
        ey_perp = -e[1] * grid.y1 + e[0] * grid.y2
        t = 1.0 + dd * ey
        tP = t**-P
        one = 1.0 - dd**2
        r2 = grid.rr**2

        f0 = one ** (p / (p - 1.0)) * tP
        f1 = one ** (1.0 / (p - 1.0)) * (ey + dd) * tP
        f2 = one ** (P / 2.0) * ey_perp * tP
        pairs = [(f0, f0.copy()), (f1, np.zeros_like(f1)),
                 (f2, np.zeros_like(f2))]

        # dual second components and their radial dilations, closed form
        w0 = (1.0 - r2) * one ** (1.0 / (p - 1.0)) * tP
        g0 = one ** (1.0 / (p - 1.0)) * (
            -2.0 * r2 * tP + (1.0 - r2) * (-P) * t ** (-P - 1.0) * (t - 1.0))
        w1 = f1
        g1 = one ** (1.0 / (p - 1.0)) * (
            ey * tP + (ey + dd) * (-P) * t ** (-P - 1.0) * (t - 1.0))
        w2 = f2
        g2 = one ** (P / 2.0) * (
            ey_perp * tP + ey_perp * (-P) * t ** (-P - 1.0) * (t - 1.0))

        es = cls(D=D, p=p, eigenvalues=(1.0, 0.0, 0.0), pairs=pairs,
                 duals=[w0, w1, w2], duals_ygrad=[g0, g1, g2])
        for l in range(3):
            scale = es._pairing(grid, l, pairs[l])
            es.duals[l] = es.duals[l] / scale
            es.duals_ygrad[l] = es.duals_ygrad[l] / scale
        return es

    def _pairing(self, grid, l, pair):
        p = self.p
        lam = self.eigenvalues[l]
        w, g = self.duals[l], self.duals_ygrad[l]
        q1, q2 = pair
        val = grid.quad(((lam - (p + 3.0) / (p - 1.0)) * w - 2.0 * g) * q1)
        val += 4.0 * grid.alpha * grid.quad(w * q1, grid.alpha - 1.0)
        val += grid.quad(w * q2)
        return float(val)

    def project(self, grid, pair):
        """Components (Pi_0, Pi_1, Pi_2) of a pair on the dual family."""
        return tuple(self._pairing(grid, l, pair) for l in range(3))


def project(grid, D, pair):
    """One-shot projection onto the dual family at kappa(D, .)."""
    return EigenSet.build(grid, D).project(grid, pair)
