"""Scaling constants and the slow profile driving soliton concentration.

For the nonlinearity exponent p in (1, 5) the relevant constants are

    alpha  = (5 - p) / (2 (p - 1))          weight exponent of rho
    kappa0 = (2 (p+1) / (p-1)^2)^(1/(p-1))  amplitude of the constant soliton
    gamma  = (p - 1) / 2                    concentration rate exponent
    pbar   = p (p < 2), 1.99 (p = 2), 2 (p > 2)
    eta    = min(1, delta, (pbar - 1)/2) / 4
    C0     = 2 ((p - 1) / (4 cbar))^((p-1)/2)

where cbar > 0 and delta > 0 are tunable damping/forcing rates of the
reduced dynamics.  The slow profile

    zeta_bar(s) = ((p - 1)/4) (log s - log((p - 1)/(4 cbar))),
    d_bar(s)    = -tanh zeta_bar(s),

is the explicit solution of (1/cbar) zeta' = exp(-4 zeta / (p - 1)) and
satisfies s^gamma (1 + d_bar(s)) -> C0 as s -> infinity: the soliton speed
|d_bar| approaches 1 at the algebraic rate governing the four-soliton
concentration.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from blowup2d.errors import DomainError


@dataclass(frozen=True)
class Constants:
    """All derived constants for one choice of (p, cbar, delta)."""

    p: float
    cbar: float
    delta: float
    alpha: float
    kappa0: float
    pbar: float
    gamma: float
    eta: float
    C0: float


def derive_constants(p, cbar=1.0, delta=1.0):
    """Return the :class:`Constants` bundle for exponent ``p``.

    Raises :class:`DomainError` unless 1 < p < 5, cbar > 0 and delta > 0.
    """
    p = float(p)
    cbar = float(cbar)
    delta = float(delta)
    if not 1.0 < p < 5.0:
        raise DomainError(f"exponent p must lie in (1, 5), got {p}")
    if cbar <= 0.0:
        raise DomainError(f"cbar must be positive, got {cbar}")
    if delta <= 0.0:
        raise DomainError(f"delta must be positive, got {delta}")

    alpha = (5.0 - p) / (2.0 * (p - 1.0))
    kappa0 = (2.0 * (p + 1.0) / (p - 1.0) ** 2) ** (1.0 / (p - 1.0))
    if p < 2.0:
        pbar = p
    elif p == 2.0:
        pbar = 1.99
    else:
        pbar = 2.0
    gamma = (p - 1.0) / 2.0
    eta = 0.25 * min(1.0, delta, (pbar - 1.0) / 2.0)
    C0 = 2.0 * ((p - 1.0) / (4.0 * cbar)) ** ((p - 1.0) / 2.0)
    return Constants(p=p, cbar=cbar, delta=delta, alpha=alpha, kappa0=kappa0,
                     pbar=pbar, gamma=gamma, eta=eta, C0=C0)


def bar_profile(s, p, cbar=1.0):
    """Evaluate the slow profile: return ``(zeta_bar(s), d_bar(s))``.

    ``s`` may be a scalar or an array; all entries must be positive.
    """
    s = np.asarray(s, dtype=float)
    if np.any(s <= 0.0):
        raise DomainError("the similarity time s must be positive")
    zeta = 0.25 * (p - 1.0) * (np.log(s) - np.log((p - 1.0) / (4.0 * cbar)))
    return zeta, -np.tanh(zeta)


def d_bar_prime(s, p, cbar=1.0):
    """Derivative d_bar'(s) = -(1 - d_bar^2) (p - 1) / (4 s)."""
    _, d = bar_profile(s, p, cbar)
    s = np.asarray(s, dtype=float)
    return -(1.0 - d**2) * (p - 1.0) / (4.0 * s)
