"""Domain types and parameter validation shared by all other modules.

The central objects are the physical parameters (diffusion constant ``D``
and perturbation strength ``lam``), power-law drift potentials
``U1(x, t) = mu * x**p * t**q`` with their scale-invariant profiles
``u(z) = mu * z**p`` over the similarity variable ``z = x / sqrt(t)``,
and the gridded density fields used by the finite-difference engine.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import DomainError, ScaleInvarianceError

__all__ = [
    "PhysParams",
    "SimilarityProfile",
    "CallableProfile",
    "PowerLawProfile",
    "PowerLawPotential",
    "Grid",
    "DensityField",
    "ScalingTransform",
    "PotentialVerdict",
    "similarity_variable",
    "validate_potential",
    "REASON_OK",
    "REASON_ODD_EXPONENT",
    "REASON_NONINTEGER_EXPONENT",
    "REASON_NEGATIVE_EXPONENT",
    "REASON_TAIL_SIGN",
    "REASON_GAUSSIAN_COEFFICIENT",
]

# Machine-readable verdict codes for validate_potential.
REASON_OK = "ok"
REASON_ODD_EXPONENT = "odd_exponent"
REASON_NONINTEGER_EXPONENT = "noninteger_exponent"
REASON_NEGATIVE_EXPONENT = "negative_exponent"
REASON_TAIL_SIGN = "tail_sign"
REASON_GAUSSIAN_COEFFICIENT = "gaussian_coefficient"

#: Default cap on |lam|; the perturbative treatment assumes a small parameter.
DEFAULT_LAMBDA_CAP = 0.5

# Step factor for the profile/potential finite-difference fallbacks.
_FD_STEP = 1e-5


def _is_scalar(*vals) -> bool:
    return all(np.ndim(v) == 0 for v in vals)


def _ret(out, *inputs):
    """Return a plain float when every input was scalar."""
    if _is_scalar(*inputs):
        return float(out)
    return out


def _power(x, e: float):
    """x**e that handles negative bases for integer exponents."""
    if float(e).is_integer():
        return np.power(np.asarray(x, dtype=float), int(e))
    return np.power(np.asarray(x, dtype=float), e)


@dataclass(frozen=True)
class PhysParams:
    """Diffusion constant and perturbation strength shared by every computation.

    Parameters
    ----------
    D : float
        Constant diffusion coefficient, units length**2 / time.  Must be > 0.
    lam : float
        Dimensionless perturbation strength multiplying the drift potential.
    lambda_cap : float, optional
        Upper bound enforced on ``abs(lam)``.  The default 0.5 keeps the
        perturbative assumption honest; it is a configuration choice, not a
        physical constant.
    """

    D: float
    lam: float = 0.0
    lambda_cap: float = DEFAULT_LAMBDA_CAP

    def __post_init__(self):
        if not (self.D > 0.0 and math.isfinite(self.D)):
            raise ValueError(f"diffusion constant must be positive, got D={self.D}")
        if not (abs(self.lam) < self.lambda_cap):
            raise ValueError(
                f"perturbation strength |lam|={abs(self.lam)} exceeds cap {self.lambda_cap}"
            )


class SimilarityProfile:
    """Drift profile u(z) over the similarity variable, with derivatives.

    Subclasses provide ``u``; ``du`` and ``d2u`` default to centered finite
    differences and should be overridden when analytic forms exist.
    ``half_line_only`` marks profiles defined only for z >= 0.
    """

    half_line_only: bool = False

    def u(self, z):
        raise NotImplementedError

    def du(self, z):
        h = _FD_STEP * np.maximum(1.0, np.abs(z))
        return (self.u(z + h) - self.u(z - h)) / (2.0 * h)

    def d2u(self, z):
        h = _FD_STEP * np.maximum(1.0, np.abs(z))
        return (self.u(z + h) - 2.0 * self.u(z) + self.u(z - h)) / (h * h)


class CallableProfile(SimilarityProfile):
    """Profile built from plain callables; derivatives fall back to differences."""

    def __init__(self, u, du=None, d2u=None, half_line_only: bool = False):
        self._u = u
        self._du = du
        self._d2u = d2u
        self.half_line_only = half_line_only

    def u(self, z):
        return self._u(z)

    def du(self, z):
        if self._du is not None:
            return self._du(z)
        return super().du(z)

    def d2u(self, z):
        if self._d2u is not None:
            return self._d2u(z)
        return super().d2u(z)


class PowerLawProfile(SimilarityProfile):
    """u(z) = mu * z**p with analytic first and second derivatives."""

    def __init__(self, mu: float, p: float):
        self.mu = float(mu)
        self.p = float(p)
        self.half_line_only = not float(p).is_integer()

    def _check_domain(self, z):
        if self.half_line_only and np.any(np.asarray(z) < 0):
            raise DomainError(
                f"profile with non-integer exponent p={self.p} is defined on z >= 0 only"
            )

    def u(self, z):
        self._check_domain(z)
        return _ret(self.mu * _power(z, self.p), z)

    def du(self, z):
        self._check_domain(z)
        c = self.mu * self.p
        if c == 0.0:
            return _ret(np.zeros_like(np.asarray(z, dtype=float)), z)
        return _ret(c * _power(z, self.p - 1.0), z)

    def d2u(self, z):
        self._check_domain(z)
        c = self.mu * self.p * (self.p - 1.0)
        if c == 0.0:
            return _ret(np.zeros_like(np.asarray(z, dtype=float)), z)
        return _ret(c * _power(z, self.p - 2.0), z)

    def __repr__(self):
        return f"PowerLawProfile(mu={self.mu}, p={self.p})"


@dataclass(frozen=True)
class PowerLawPotential:
    """Drift potential U1(x, t) = mu * x**p * t**q.

    ``q`` defaults to -p/2, the unique choice that makes the potential
    scale-invariant under x -> eps*x, t -> eps**2*t.  A different ``q`` may
    be forced explicitly (useful for probing broken invariance), in which
    case :func:`validate_potential` raises :class:`ScaleInvarianceError`.
    """

    mu: float
    p: float
    q: float | None = None

    def __post_init__(self):
        object.__setattr__(self, "mu", float(self.mu))
        object.__setattr__(self, "p", float(self.p))
        object.__setattr__(self, "q", -self.p / 2.0 if self.q is None else float(self.q))

    @property
    def is_scale_invariant(self) -> bool:
        return self.q == -self.p / 2.0

    def profile(self) -> PowerLawProfile:
        """The similarity profile u(z) = mu * z**p; requires q = -p/2."""
        if not self.is_scale_invariant:
            raise ScaleInvarianceError(
                f"q={self.q} != -p/2={-self.p / 2.0}; no similarity profile exists"
            )
        return PowerLawProfile(self.mu, self.p)

    def scaled(self, factor: float) -> "PowerLawPotential":
        """The potential multiplied by a constant (e.g. the full U = lam*U1)."""
        return PowerLawPotential(factor * self.mu, self.p, self.q)

    def _check_t(self, t):
        if np.any(np.asarray(t) <= 0):
            raise DomainError(f"potential requires t > 0, got t={t}")

    def _check_x(self, x):
        if not float(self.p).is_integer() and np.any(np.asarray(x) < 0):
            raise DomainError(
                f"potential with non-integer p={self.p} is defined on x >= 0 only"
            )

    def __call__(self, x, t):
        self._check_t(t)
        self._check_x(x)
        if self.mu == 0.0:
            return _ret(np.zeros(np.broadcast(x, t).shape), x, t)
        return _ret(self.mu * _power(x, self.p) * _power(t, self.q), x, t)

    def dx(self, x, t):
        """d U1 / dx."""
        self._check_t(t)
        self._check_x(x)
        c = self.mu * self.p
        if c == 0.0:
            return _ret(np.zeros(np.broadcast(x, t).shape), x, t)
        return _ret(c * _power(x, self.p - 1.0) * _power(t, self.q), x, t)

    def dxx(self, x, t):
        """d^2 U1 / dx^2."""
        self._check_t(t)
        self._check_x(x)
        c = self.mu * self.p * (self.p - 1.0)
        if c == 0.0:
            return _ret(np.zeros(np.broadcast(x, t).shape), x, t)
        return _ret(c * _power(x, self.p - 2.0) * _power(t, self.q), x, t)

    def dt(self, x, t):
        """d U1 / dt."""
        self._check_t(t)
        self._check_x(x)
        c = self.mu * self.q
        if c == 0.0:
            return _ret(np.zeros(np.broadcast(x, t).shape), x, t)
        return _ret(c * _power(x, self.p) * _power(t, self.q - 1.0), x, t)


@dataclass(frozen=True)
class Grid:
    """Uniform space-time grid for the finite-difference engine."""

    x_min: float
    x_max: float
    nx: int
    t0: float
    t_end: float
    nt: int

    def __post_init__(self):
        if not self.x_min < self.x_max:
            raise ValueError(f"need x_min < x_max, got [{self.x_min}, {self.x_max}]")
        if self.nx < 3:
            raise ValueError(f"need nx >= 3, got {self.nx}")
        if not 0.0 < self.t0 < self.t_end:
            raise ValueError(f"need 0 < t0 < t_end, got t0={self.t0}, t_end={self.t_end}")
        if self.nt < 1:
            raise ValueError(f"need nt >= 1, got {self.nt}")

    @property
    def dx(self) -> float:
        return (self.x_max - self.x_min) / (self.nx - 1)

    @property
    def dt(self) -> float:
        return (self.t_end - self.t0) / self.nt

    @property
    def xs(self) -> np.ndarray:
        return np.linspace(self.x_min, self.x_max, self.nx)


# Bounded undershoot tolerated in density fields (Crank-Nicolson may produce
# tiny negative excursions; anything larger is a real defect).
_UNDERSHOOT_REL = 1e-12


@dataclass(frozen=True, eq=False)
class DensityField:
    """Gridded density W(x_i, t) at a single time level."""

    grid: Grid
    t: float
    values: np.ndarray
    normalized: bool = False
    norm_tol: float = 1e-6

    def __post_init__(self):
        vals = np.asarray(self.values, dtype=float)
        object.__setattr__(self, "values", vals)
        if vals.shape != (self.grid.nx,):
            raise ValueError(f"values shape {vals.shape} does not match grid nx={self.grid.nx}")
        if not np.all(np.isfinite(vals)):
            raise ValueError("density field contains non-finite values")
        peak = float(np.max(vals, initial=0.0))
        if np.any(vals < -_UNDERSHOOT_REL * max(peak, 1e-300)):
            raise ValueError("density field has negative values beyond round-off undershoot")
        if self.normalized:
            m = float(np.trapezoid(vals, dx=self.grid.dx))
            if abs(m - 1.0) > self.norm_tol:
                raise ValueError(f"field flagged normalized but mass={m!r}")


@dataclass(frozen=True)
class ScalingTransform:
    """A concrete stretching x -> eps**a x, t -> eps**b t with b = 2a, d = 0."""

    eps: float
    a: float
    gamma: float
    b: float | None = None
    d: float | None = None

    def __post_init__(self):
        if not (self.eps > 0.0 and math.isfinite(self.eps)):
            raise ValueError(f"scale factor must be positive, got eps={self.eps}")
        b = 2.0 * self.a if self.b is None else float(self.b)
        d = 0.0 if self.d is None else float(self.d)
        if b != 2.0 * self.a:
            raise ValueError(f"invariance requires b = 2a, got a={self.a}, b={b}")
        if d != 0.0:
            raise ValueError(f"invariance requires d = 0, got d={d}")
        object.__setattr__(self, "b", b)
        object.__setattr__(self, "d", d)

    def map_x(self, x):
        return self.eps**self.a * np.asarray(x, dtype=float)

    def map_t(self, t):
        return self.eps**self.b * np.asarray(t, dtype=float)


def similarity_variable(x, t):
    """The scale-invariant combination z = x / sqrt(t); requires t > 0."""
    if np.any(np.asarray(t) <= 0):
        raise DomainError(f"similarity variable requires t > 0, got t={t}")
    return _ret(np.asarray(x, dtype=float) / np.sqrt(t), x, t)


@dataclass(frozen=True)
class PotentialVerdict:
    """Outcome of the normalizability gate, with a machine-readable reason."""

    accepted: bool
    reason: str
    detail: str = ""


def validate_potential(pot: PowerLawPotential, params: PhysParams) -> PotentialVerdict:
    """Decide whether the power-law potential yields a normalizable density.

    Admissible exponents are p in {0, 1, 2} and even integers p > 2.  For
    p > 2 the quartic-or-higher term dominates the Gaussian tail, so
    lam*mu >= 0 is additionally required; for p = 2 the combined quadratic
    coefficient 1/(4D) + lam*mu/D must stay positive for the tail to decay.

    Raises
    ------
    ScaleInvarianceError
        If the potential has q != -p/2 (no similarity reduction exists);
        this is distinct from a normalizability rejection.
    """
    if not pot.is_scale_invariant:
        raise ScaleInvarianceError(
            f"q={pot.q} violates the scale-invariance condition q=-p/2 for p={pot.p}"
        )
    p = pot.p
    lam_mu = params.lam * pot.mu
    if p < 0:
        return PotentialVerdict(False, REASON_NEGATIVE_EXPONENT, f"p={p} < 0 is singular at z=0")
    if not float(p).is_integer():
        return PotentialVerdict(
            False, REASON_NONINTEGER_EXPONENT, f"p={p} defines no whole-line density"
        )
    p_int = int(p)
    if p_int in (0, 1):
        return PotentialVerdict(True, REASON_OK)
    if p_int == 2:
        coeff = 1.0 / (4.0 * params.D) + lam_mu / params.D
        if coeff > 0.0:
            return PotentialVerdict(True, REASON_OK)
        return PotentialVerdict(
            False,
            REASON_GAUSSIAN_COEFFICIENT,
            f"effective Gaussian coefficient {coeff} <= 0; tail does not decay",
        )
    if p_int % 2 == 1:
        return PotentialVerdict(
            False, REASON_ODD_EXPONENT, f"odd p={p_int} > 2 diverges on one tail"
        )
    if lam_mu < 0.0:
        return PotentialVerdict(
            False,
            REASON_TAIL_SIGN,
            f"lam*mu={lam_mu} < 0 makes the z**{p_int} term dominate and diverge",
        )
    return PotentialVerdict(True, REASON_OK)
