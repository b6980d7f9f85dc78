"""Stationary solitons of the similarity flow and their deformations.

The stationary states of the similarity-variable flow that matter here are
the Lorentz family

    kappa(d, y) = kappa0 (1 - |d|^2)^(1/(p-1)) / (1 + d . y)^(2/(p-1)),

defined for |d| < 1 and |y| <= 1; d is the boost parameter, and kappa
concentrates near the boundary point -d/|d| as |d| -> 1.  The two-parameter
deformation obtained by shifting the denominator,

    kappa*_1(d, nu, y) = kappa0 (1 - |d|^2)^(1/(p-1)) / (1 + d.y + nu)^(2/(p-1)),
    kappa*_2(d, nu, y) = nu d/dnu kappa*_1
                       = -(2 kappa0 nu / (p-1)) (1 - |d|^2)^(1/(p-1))
                         / (1 + d.y + nu)^((p+1)/(p-1)),

is defined for nu > -1 + |d| and interpolates between a soliton on its way
to extinction (nu > 0) and one on its way to blow-up (nu < 0).  Writing
d* = d / (1 + nu),

    lambda(d, nu) = ((1 - |d|^2) / ((1+nu)^2 - |d|^2))^(1/(p-1)),
    mu(d, nu)     = 1 / (1 + nu / (1 - |d|)),

one has the exact rescaling kappa*_1(d, nu, .) = lambda kappa(d*, .), the
two-sided size comparison min(mu, mu^2) <= lambda^(p-1) <= max(mu, mu^2),
and the closed-form energy

    E(kappa*(d, nu)) = E0 [ (p+1)/(p-1) lambda^2 - 2/(p-1) lambda^(p+1)
                            + 2/(p-1) nu^2/(1-|d|^2) lambda^(p+1) ],

with E0 = 2 pi kappa0^2 / (p+3) the energy of the constant soliton.

A boosted soliton carries a distinguished moving ellipse E(d): the image of
the half-disk |Y| < 1/2 under the Lorentz change of frame

    y1 = (Y1 - d) / (1 - d Y1),    y2 = Y2 sqrt(1 - d^2) / (1 - d Y1),

namely the ellipse with centre (-3d/(4 - d^2), 0) and semi-axes
a = 2(1 - d^2)/(4 - d^2), b = sqrt((1 - d^2)/(4 - d^2)).  The weighted mass
int_{E(d)} kappa(d e1)^(p+1) rho dy is independent of d: the boost leaves
both the measure kappa^(p+1) rho dy and the half-disk invariant, so the
mass always equals kappa0^(p+1) int_{|y|<1/2} rho dy.
"""

from __future__ import annotations

import numpy as np

from blowup2d.constants import derive_constants
from blowup2d.errors import DomainError

__all__ = [
    "kappa", "kappa_star_pair", "kappa_star_nu_derivative",
    "kappa_star_d_derivative", "x_grad_kappa_star", "size_params",
    "soliton_energy_closed", "ellipse_params", "ellipse_mass",
    "ellipse_mass_closed", "lorentz_map",
]


def _check_d(d):
    d = np.asarray(d, dtype=float).reshape(2)
    if not np.hypot(d[0], d[1]) < 1.0:
        raise DomainError(f"boost parameter needs |d| < 1, got {d}")
    return d


def _check_d_nu(d, nu):
    d = _check_d(d)
    if not nu > -1.0 + np.hypot(d[0], d[1]):
        raise DomainError(f"shift needs nu > -1 + |d|, got nu={nu}, d={d}")
    return d, float(nu)


def kappa(d, y1, y2, p=3.0):
    """Boosted stationary soliton kappa(d, y) for |d| < 1."""
    d = _check_d(d)
    c = derive_constants(p)
    d2 = d[0] ** 2 + d[1] ** 2
    return (c.kappa0 * (1.0 - d2) ** (1.0 / (p - 1.0))
            * (1.0 + d[0] * y1 + d[1] * y2) ** (-2.0 / (p - 1.0)))


def kappa_star_pair(d, nu, y1, y2, p=3.0):
    """Deformed soliton pair (kappa*_1, kappa*_2) for nu > -1 + |d|."""
    d, nu = _check_d_nu(d, nu)
    c = derive_constants(p)
    d2 = d[0] ** 2 + d[1] ** 2
    base = 1.0 + d[0] * y1 + d[1] * y2 + nu
    amp = c.kappa0 * (1.0 - d2) ** (1.0 / (p - 1.0))
    k1 = amp * base ** (-2.0 / (p - 1.0))
    k2 = -(2.0 * nu / (p - 1.0)) * amp * base ** (-(p + 1.0) / (p - 1.0))
    return k1, k2


def kappa_star_nu_derivative(d, nu, y1, y2, p=3.0):
    """d/dnu of kappa*_1 (so that kappa*_2 = nu times this)."""
    d, nu = _check_d_nu(d, nu)
    c = derive_constants(p)
    d2 = d[0] ** 2 + d[1] ** 2
    base = 1.0 + d[0] * y1 + d[1] * y2 + nu
    amp = c.kappa0 * (1.0 - d2) ** (1.0 / (p - 1.0))
    return -(2.0 / (p - 1.0)) * amp * base ** (-(p + 1.0) / (p - 1.0))


def kappa_star_d_derivative(dscalar, e_hat, nu, y1, y2, p=3.0):
    """Derivative of kappa*_1(dscalar * e_hat, nu, y) in dscalar.

    Equals kappa*_1 times -(2/(p-1)) [ dscalar/(1-dscalar^2)
    + (e.y)/(1 + dscalar e.y + nu) ].
    """
    e_hat = np.asarray(e_hat, dtype=float).reshape(2)
    d = dscalar * e_hat
    k1, _ = kappa_star_pair(d, nu, y1, y2, p)
    ey = e_hat[0] * y1 + e_hat[1] * y2
    base = 1.0 + dscalar * ey + nu
    return k1 * (-2.0 / (p - 1.0)) * (dscalar / (1.0 - dscalar**2) + ey / base)


def x_grad_kappa_star(d, nu, x1, x2, p=3.0):
    """The radial-dilation term x . grad kappa*_1(d, nu, x)."""
    d, nu = _check_d_nu(d, nu)
    c = derive_constants(p)
    d2 = d[0] ** 2 + d[1] ** 2
    dx = d[0] * x1 + d[1] * x2
    base = 1.0 + dx + nu
    return (-(2.0 / (p - 1.0)) * c.kappa0 * (1.0 - d2) ** (1.0 / (p - 1.0))
            * dx * base ** (-(p + 1.0) / (p - 1.0)))


def size_params(d, nu, p=3.0):
    """Return (lambda, mu, d_star) for the deformed soliton."""
    d, nu = _check_d_nu(d, nu)
    dd = float(np.hypot(d[0], d[1]))
    lam = ((1.0 - dd**2) / ((1.0 + nu) ** 2 - dd**2)) ** (1.0 / (p - 1.0))
    mu = 1.0 / (1.0 + nu / (1.0 - dd))
    return lam, mu, d / (1.0 + nu)


def soliton_energy_closed(d, nu, p=3.0):
    """Closed-form Lyapunov energy of the pair kappa*(d, nu)."""
    d, nu = _check_d_nu(d, nu)
    c = derive_constants(p)
    dd2 = float(d[0] ** 2 + d[1] ** 2)
    lam, _, _ = size_params(d, nu, p)
    e0 = 2.0 * np.pi * c.kappa0**2 / (p + 3.0)
    return e0 * ((p + 1.0) / (p - 1.0) * lam**2
                 - 2.0 / (p - 1.0) * lam ** (p + 1.0)
                 + 2.0 / (p - 1.0) * nu**2 / (1.0 - dd2) * lam ** (p + 1.0))


# -- moving ellipse ----------------------------------------------------------

def lorentz_map(d, Y1, Y2):
    """Boost of the unit disk fixing (+-1, 0); maps |Y| < 1 onto |y| < 1.

    The convention moves the origin to -d, matching the concentration side
    of kappa(d e1): the half-disk |Y| < 1/2 is carried onto E(d).
    """
    if not abs(d) < 1.0:
        raise DomainError(f"boost parameter needs |d| < 1, got {d}")
    den = 1.0 - d * Y1
    return (Y1 - d) / den, Y2 * np.sqrt(1.0 - d**2) / den


def ellipse_params(d):
    """Centre abscissa and semi-axes (c, a, b) of the moving ellipse E(d)."""
    if not abs(d) < 1.0:
        raise DomainError(f"boost parameter needs |d| < 1, got {d}")
    den = 4.0 - d**2
    return (-3.0 * d / den,
            2.0 * (1.0 - d**2) / den,
            np.sqrt((1.0 - d**2) / den))


def ellipse_mass(d, p=3.0, n_r=96, n_theta=384):
    """Weighted mass int_{E(d)} kappa(d e1, y)^(p+1) rho dy by quadrature.

    Gauss-Legendre radially, trapezoid (spectral) angularly on the ellipse
    mapped to a reference disk; the integrand is analytic on the closed
    ellipse for every |d| < 1 so the rule converges geometrically.
    """
    c, a, b = ellipse_params(d)
    alpha = derive_constants(p).alpha
    x, w = np.polynomial.legendre.leggauss(n_r)
    R = 0.5 * (x + 1.0)
    wR = 0.5 * w
    TH = 2.0 * np.pi * np.arange(n_theta) / n_theta
    RR, TT = np.meshgrid(R, TH, indexing="ij")
    y1 = c + a * RR * np.cos(TT)
    y2 = b * RR * np.sin(TT)
    f = kappa((d, 0.0), y1, y2, p) ** (p + 1.0) * (1.0 - y1**2 - y2**2) ** alpha
    return float(a * b * (2.0 * np.pi / n_theta) * wR @ (f * RR).sum(axis=1))


def ellipse_mass_closed(p=3.0):
    """The d-independent value kappa0^(p+1) int_{|y|<1/2} rho dy."""
    cst = derive_constants(p)
    a1 = cst.alpha + 1.0
    return cst.kappa0 ** (p + 1.0) * np.pi * (1.0 - 0.75**a1) / a1
