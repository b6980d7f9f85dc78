"""Weighted function-space toolbox on the unit disk.

Geometry.  All similarity-variable fields live on the unit disk |y| < 1 and
are integrated against the degenerate weight rho(y) = (1 - |y|^2)^alpha.
Substituting u = r^2 turns

    int_disk f rho dy = (1/2) int_0^1 int_0^{2pi} f(sqrt(u), th) (1-u)^alpha du dth

into a Gauss-Jacobi problem.  A single node set -- the roots of the Jacobi
polynomial with weight (1 - u)^(alpha - 1) -- serves the three exponents
alpha - 1, alpha, alpha + 1 that occur in the quadratic forms: writing
(1-u)^e = (1-u)^(alpha-1) (1-u)^(e-alpha+1) folds the extra integer power
into the integrand, so every field is sampled once and each rule keeps full
Gauss accuracy.  The exponent alpha - 1 appears in the Hardy-type term
rho / (1 - |y|^2) of the dual projectors; alpha + 1 absorbs the factor
(1 - r^2) multiplying radial-derivative squares.

Quadratic forms.  In polar coordinates the degenerate gradient combination
collapses to

    |grad q|^2 - (y . grad q)^2 = (1 - r^2) (dq/dr)^2 + (dq/dth)^2 / r^2,

which is the form used by the norm on pairs (q1, q2),

    ||q||^2 = int (q1^2 + |grad q1|^2 - (y.grad q1)^2) rho + int q2^2 rho,

its polarisation ``phi_inner``, and the Lyapunov energy

    E(q) = int ( q2^2/2 + (|grad q1|^2 - (y.grad q1)^2)/2
                 + (p+1)/(p-1)^2 q1^2 - |q1|^{p+1}/(p+1) ) rho.

Differentiation.  Angular derivatives are spectral (FFT on the uniform
theta grid, Nyquist mode zeroed for odd orders).  Radial derivatives use
7-point Fornberg stencils on the nonuniform nodes; the three ghost nodes at
-r_2, -r_1, -r_0 take values from the theta + pi column, f(-r, th) =
f(r, th + pi), which closes the stencils across the origin without any
coordinate singularity (hence n_theta must be even; we require a multiple
of 4 so quarter-turn symmetrisation stays exact).

The 1D table integral int_{-1}^{1} (1-x^2)^g (1 + d x)^(-b) dx is delegated
to QUADPACK's algebraic-weight rule.  As |d| -> 1 it is bounded, log-
divergent, or power-divergent according to the sign of g + 1 - b.
"""

from __future__ import annotations

import csv
import json
import pathlib

import numpy as np
from scipy.integrate import quad as _quad1d
from scipy.special import roots_jacobi

from blowup2d.errors import DomainError

__all__ = [
    "DiskGrid", "fornberg_weights", "integral_table", "table_regime",
    "save_field", "load_field", "write_csv",
]


def fornberg_weights(z, x, m):
    """Finite-difference weights of derivatives 0..m at z from nodes x.

    Returns an array of shape (m + 1, len(x)); row k holds the weights of
    the k-th derivative.  Classic recursion of Fornberg (1988).
    """
    x = np.asarray(x, dtype=float)
    n = x.size
    c = np.zeros((m + 1, n))
    c1 = 1.0
    c4 = x[0] - z
    c[0, 0] = 1.0
    for i in range(1, n):
        mn = min(i, m)
        c2 = 1.0
        c5 = c4
        c4 = x[i] - z
        for j in range(i):
            c3 = x[i] - x[j]
            c2 *= c3
            if j == i - 1:
                for k in range(mn, 0, -1):
                    c[k, i] = c1 * (k * c[k - 1, i - 1] - c5 * c[k, i - 1]) / c2
                c[0, i] = -c1 * c5 * c[0, i - 1] / c2
            for k in range(mn, 0, -1):
                c[k, j] = (c4 * c[k, j] - k * c[k - 1, j]) / c3
            c[0, j] = c4 * c[0, j] / c3
        c1 = c2
    return c


class DiskGrid:
    """Gauss-Jacobi x uniform-angle grid on the unit disk for one exponent p.

    Fields are arrays of shape (n_r, n_theta) sampled at (r_i, theta_j)
    with r_i = sqrt(u_i), u_i the Gauss-Jacobi nodes for weight
    (1 - u)^(alpha - 1) on (0, 1), and theta_j = 2 pi j / n_theta.
    """

    def __init__(self, n_r, n_theta, p):
        if n_r < 8:
            raise DomainError(f"n_r must be at least 8, got {n_r}")
        if n_theta < 8 or n_theta % 4 != 0:
            raise DomainError(
                f"n_theta must be a multiple of 4 and at least 8, got {n_theta}")
        if not 1.0 < p < 5.0:
            raise DomainError(f"exponent p must lie in (1, 5), got {p}")
        self.n_r = int(n_r)
        self.n_theta = int(n_theta)
        self.p = float(p)
        self.alpha = (5.0 - p) / (2.0 * (p - 1.0))

        x, w = roots_jacobi(self.n_r, self.alpha - 1.0, 0.0)
        self.u = 0.5 * (x + 1.0)
        self.r = np.sqrt(self.u)
        # base rule: int_0^1 h(u) (1-u)^(alpha-1) du = sum w_base h(u_i)
        self._w_base = 0.5**self.alpha * w
        self.theta = 2.0 * np.pi * np.arange(self.n_theta) / self.n_theta

        # dense radial differentiation matrices on the ghost-extended column
        # [-r_2, -r_1, -r_0, r_0, ..., r_{n_r - 1}]
        x_ext = np.concatenate([-self.r[2::-1], self.r])
        n_ext = x_ext.size
        self._d1 = np.zeros((self.n_r, n_ext))
        self._d2 = np.zeros((self.n_r, n_ext))
        width = 7
        for i in range(self.n_r):
            lo = min(i, n_ext - width)
            sten = fornberg_weights(self.r[i], x_ext[lo:lo + width], 2)
            self._d1[i, lo:lo + width] = sten[1]
            self._d2[i, lo:lo + width] = sten[2]

        rr, tt = np.meshgrid(self.r, self.theta, indexing="ij")
        self.rr = rr
        self.tt = tt
        self.y1 = rr * np.cos(tt)
        self.y2 = rr * np.sin(tt)

    # -- quadrature ---------------------------------------------------------

    def radial_weights(self, exponent):
        """Radial weights for int_0^1 h(u) (1-u)^exponent du on the fixed nodes.

        Only the offsets 0, 1, 2 relative to alpha - 1 are supported; they
        keep Gauss accuracy because the extra factor is a polynomial.
        """
        off = exponent - (self.alpha - 1.0)
        k = int(round(off))
        if k not in (0, 1, 2) or abs(off - k) > 1e-12:
            raise DomainError(
                f"weight exponent must be alpha-1, alpha or alpha+1; got {exponent}")
        return self._w_base * (1.0 - self.u) ** k

    def quad(self, field, exponent=None):
        """Integrate field * (1 - |y|^2)^exponent over the disk.

        ``exponent`` defaults to alpha (i.e. the measure rho dy).
        """
        field = np.asarray(field)
        if field.shape != (self.n_r, self.n_theta):
            raise DomainError(
                f"field shape {field.shape} does not match grid "
                f"({self.n_r}, {self.n_theta})")
        wr = self.radial_weights(self.alpha if exponent is None else exponent)
        return float(0.5 * (2.0 * np.pi / self.n_theta) * wr @ field.sum(axis=1))

    # -- differentiation ----------------------------------------------------

    def _extend(self, field):
        ghost = np.roll(field[2::-1, :], -self.n_theta // 2, axis=1)
        return np.concatenate([ghost, field], axis=0)

    def dr(self, field, order=1):
        """Radial derivative (order 1 or 2) via Fornberg stencils."""
        if order == 1:
            return self._d1 @ self._extend(field)
        if order == 2:
            return self._d2 @ self._extend(field)
        raise DomainError(f"radial derivative order must be 1 or 2, got {order}")

    def dtheta(self, field, order=1):
        """Angular derivative of any order, spectral in theta."""
        if order < 1:
            raise DomainError(f"angular derivative order must be >= 1, got {order}")
        fk = np.fft.rfft(field, axis=1)
        k = np.arange(fk.shape[1])
        fk = fk * (1j * k) ** order
        if order % 2 == 1:
            fk[:, -1] = 0.0
        return np.fft.irfft(fk, n=self.n_theta, axis=1)

    # -- quadratic forms ----------------------------------------------------

    def h_norm(self, pair):
        """Norm of a pair (q1, q2) in the weighted energy space."""
        return float(np.sqrt(self.phi_inner(pair, pair)))

    def phi_inner(self, pair_a, pair_b):
        """Bilinear form underlying :meth:`h_norm` (polarised)."""
        a1, a2 = pair_a
        b1, b2 = pair_b
        da_r, db_r = self.dr(a1), self.dr(b1)
        da_t, db_t = self.dtheta(a1), self.dtheta(b1)
        val = self.quad(a1 * b1 + a2 * b2 + da_t * db_t / self.rr**2)
        val += self.quad(da_r * db_r, self.alpha + 1.0)
        return float(val)

    def energy(self, pair):
        """Lyapunov energy of a pair (q1, q2)."""
        q1, q2 = pair
        p = self.p
        dq_r = self.dr(q1)
        dq_t = self.dtheta(q1)
        core = (0.5 * q2**2 + 0.5 * dq_t**2 / self.rr**2
                + (p + 1.0) / (p - 1.0) ** 2 * q1**2
                - np.abs(q1) ** (p + 1.0) / (p + 1.0))
        return float(self.quad(core) + 0.5 * self.quad(dq_r**2, self.alpha + 1.0))

    def hardy_sobolev_ratios(self, q1):
        """Ratios (L^2 with weight rho/(1-|y|^2), L^{p+1} with weight rho)
        over the first-component energy norm of the scalar field q1.

        Both ratios stay bounded uniformly over the space; they quantify the
        compactness mechanism of the weighted embedding.
        """
        dq_r = self.dr(q1)
        dq_t = self.dtheta(q1)
        h0 = np.sqrt(self.quad(q1**2 + dq_t**2 / self.rr**2)
                     + self.quad(dq_r**2, self.alpha + 1.0))
        lw = np.sqrt(self.quad(q1**2, self.alpha - 1.0))
        lp = self.quad(np.abs(q1) ** (self.p + 1.0)) ** (1.0 / (self.p + 1.0))
        return float(lw / h0), float(lp / h0)

    # -- convenience --------------------------------------------------------

    def sample(self, fn):
        """Sample fn(y1, y2) on the grid."""
        return fn(self.y1, self.y2)


def table_regime(gamma, beta):
    """Asymptotic regime of the table integral as |delta| -> 1."""
    gap = gamma + 1.0 - beta
    if gap > 0.0:
        return "finite"
    if gap == 0.0:
        return "log"
    return "power"


def integral_table(gamma, beta, delta):
    """int_{-1}^1 (1 - x^2)^gamma (1 + delta x)^(-beta) dx for |delta| < 1.

    Uses the QUADPACK algebraic-weight rule with weight (1-x)^gamma
    (1+x)^gamma, so the endpoint behaviour is integrated exactly.
    """
    if gamma <= -1.0:
        raise DomainError(f"gamma must exceed -1, got {gamma}")
    if not abs(delta) < 1.0:
        raise DomainError(f"delta must satisfy |delta| < 1, got {delta}")
    val, _ = _quad1d(lambda x: (1.0 + delta * x) ** (-beta), -1.0, 1.0,
                     weight="alg", wvar=(gamma, gamma),
                     epsabs=0.0, epsrel=1e-12, limit=200)
    return val


# -- serialisation ----------------------------------------------------------

def save_field(path, field, grid=None, meta=None):
    """Write a grid field as little-endian float64, row-major, r index first.

    A JSON sidecar ``<path>.json`` records shape, dtype, layout, the grid
    parameters (when given) and any extra metadata.
    """
    path = pathlib.Path(path)
    field = np.ascontiguousarray(np.asarray(field, dtype="<f8"))
    path.write_bytes(field.tobytes())
    side = {
        "shape": list(field.shape),
        "dtype": "<f8",
        "order": "C",
        "layout": "r-then-theta",
    }
    if grid is not None:
        side["grid"] = {"n_r": grid.n_r, "n_theta": grid.n_theta, "p": grid.p}
    if meta:
        side["meta"] = meta
    path.with_suffix(path.suffix + ".json").write_text(
        json.dumps(side, indent=2, sort_keys=True), encoding="utf-8")


def load_field(path):
    """Inverse of :func:`save_field`; returns (field, sidecar_dict)."""
    path = pathlib.Path(path)
    side = json.loads(path.with_suffix(path.suffix + ".json").read_text(
        encoding="utf-8"))
    field = np.frombuffer(path.read_bytes(), dtype="<f8").reshape(side["shape"])
    return field.copy(), side


def write_csv(path, header, rows):
    """Write rows as UTF-8 CSV with a header line and '.' decimal marks."""
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(header)
        for row in rows:
            writer.writerow([repr(float(v)) if isinstance(v, (float, np.floating))
                             else v for v in row])
