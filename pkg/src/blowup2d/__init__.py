"""Numerical laboratory for four-soliton blow-up of the 2D semilinear wave equation.

The package studies u_tt = Delta u + |u|^(p-1) u on R^2 in the subconformal
range 1 < p < 5, through the lens of self-similar variables

    w(y, s) = (T0 - t)^(2/(p-1)) u(x0 + y (T0 - t), t),   s = -log(T0 - t),

in which blow-up at (x0, T0) becomes long-time behaviour of w on the unit
disk, weighted by rho(y) = (1 - |y|^2)^alpha with alpha = (5-p)/(2(p-1)).

Modules
-------
constants    scaling exponents and the slow tanh profile (zeta_bar, d_bar)
funcspace    Gauss-Jacobi disk grid, weighted quadrature/norms, derivatives
solitons     Lorentz-parametrised stationary solitons kappa(d, y) and their
             two-parameter deformation kappa*(d, nu)
spectral     linearised operator around a soliton, explicit eigenfunctions,
             dual projectors
modulation   orthogonality-based extraction of (d, nu) and the remainder q
             from a four-soliton configuration
dynamics     saturated reduced ODE system for (nu, xi, q) and the one-sided
             shooting/bisection argument for the surviving trajectory
wavesolver   physical-space finite-difference solver with per-cell blow-up
             time extraction
similarity   change of similarity centre, directional soliton parameters,
             soliton-loosing timeline
surface      blow-up surface diagnostics: 1-Lipschitz bounds, pyramid shape,
             flatness fit, non-characteristic margins
cli          command-line entry points (verify / simulate / shoot /
             timeline / surface)
"""

from blowup2d.constants import Constants, derive_constants

__all__ = ["Constants", "derive_constants"]
__version__ = "0.1.0"
